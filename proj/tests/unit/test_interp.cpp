#include <doctest.h>

#include <algorithm>
#include <random>

#include "sdfgrow/interp.hpp"
#include "support.hpp"

using namespace sdfgrow;

namespace {

bool has_point(const std::vector<GrowToCandidate>& c, const Vec3& q, CandidateKind kind) {
  return std::any_of(c.begin(), c.end(), [&](const GrowToCandidate& x) {
    return x.kind == kind && distance(x.q, q) < 1e-9;
  });
}

bool has_any_point(const std::vector<GrowToCandidate>& c, const Vec3& q) {
  return std::any_of(c.begin(), c.end(), [&](const GrowToCandidate& x) { return distance(x.q, q) < 1e-9; });
}

}  // namespace

TEST_CASE("grow-to points of a single circle") {
  const auto c = grow_to_points({0.5, 0, 0}, SampleSet(2, {{{0, 0, 0}, 1.0}}));
  CHECK(c.size() == 3);
  CHECK(has_point(c, {0.5, 0, 0}, CandidateKind::kSelf));
  CHECK(has_point(c, {1, 0, 0}, CandidateKind::kTangent));
  CHECK(has_point(c, {-1, 0, 0}, CandidateKind::kTangent));
}

TEST_CASE("grow-to points drop covered candidates") {
  const auto c = grow_to_points({0.6, 0, 0}, SampleSet(2, {{{0, 0, 0}, 1.0}, {{1.2, 0, 0}, 1.0}}));
  CHECK(has_point(c, {0.6, 0.8, 0}, CandidateKind::kIntersection));
  CHECK(has_point(c, {0.6, -0.8, 0}, CandidateKind::kIntersection));
  CHECK(has_point(c, {-1, 0, 0}, CandidateKind::kTangent));
  CHECK(has_point(c, {2.2, 0, 0}, CandidateKind::kTangent));
  CHECK_FALSE(has_any_point(c, {1, 0, 0}));
  CHECK_FALSE(has_any_point(c, {0.2, 0, 0}));
}

TEST_CASE("axis-degenerate circles give no extreme candidates") {
  const auto c = grow_to_points({2, 0, 0}, SampleSet(3, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}}));
  CHECK(std::none_of(c.begin(), c.end(), [](const GrowToCandidate& x) { return x.kind == CandidateKind::kCircleExtreme; }));
  CHECK(has_point(c, {-1, 0, 0}, CandidateKind::kTangent));
  CHECK(has_point(c, {2, 0, 0}, CandidateKind::kTangent));
  CHECK_FALSE(has_any_point(c, {0, 0, 0}));
  // Off the axis both extremes of the fully uncovered circle appear.
  const auto d = grow_to_points({0.5, 2, 0}, SampleSet(3, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}}));
  CHECK(has_point(d, {0.5, std::sqrt(0.75), 0}, CandidateKind::kCircleExtreme));
  CHECK(has_point(d, {0.5, -std::sqrt(0.75), 0}, CandidateKind::kCircleExtreme));
}

TEST_CASE("radius scores") {
  const Vec3 p{0, 0, 0};
  GrowToCandidate tangent;
  tangent.kind = CandidateKind::kTangent;
  tangent.q = {1.5, 0, 0};
  // Host on the far side with normals pointing the same way: agreement.
  const Sample agree_host{{2.5, 0, 0}, -1.0};
  const Sample agree[] = {agree_host};
  CHECK(score_for_radius(p, 1.5, agree, tangent, 2.0) == doctest::Approx(7.5));
  tangent.q = {0.3, 0, 0};
  const Sample disagree[] = {Sample{{1.3, 0, 0}, -1.0}};
  CHECK(score_for_radius(p, -0.3, disagree, tangent, 2.0) == doctest::Approx(0.6));
  GrowToCandidate inter;
  inter.kind = CandidateKind::kIntersection;
  inter.q = {1, 0, 0};
  const Sample bad[] = {Sample{{2, 0, 0}, 1.0}, Sample{{1, 1, 0}, 1.0}};
  CHECK(score_for_radius(p, 1.0, bad, inter, 2.0) == doctest::Approx(3.0));
  GrowToCandidate self;
  CHECK(score_for_radius(p, 0.0, {}, self, 2.0) == 0.0);
}

TEST_CASE("candidate validity examples") {
  const SampleSet one(2, {{{0, 0, 0}, 1.0}});
  CHECK(validity_with_candidate(one, {0.5, 0, 0}, 1.5));
  CHECK_FALSE(validity_with_candidate(one, {0.5, 0, 0}, -1.5));
  CHECK_FALSE(validity_with_candidate(one, {0.5, 0, 0}, 2.0));
}

TEST_CASE("candidate validity equals the full check") {
  for (int dim : {2, 3}) {
    std::mt19937_64 rng(500 + dim);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    int valid_seen = 0;
    for (int it = 0; it < 60; ++it) {
      const SampleSet set = testing::random_valid_set(rng, dim, dim == 2 ? 12 : 8);
      const Workspace ws(set);
      for (int q = 0; q < 20; ++q) {
        const Vec3 p = testing::random_point(rng, dim);
        const double s = v(rng);
        const bool fast = validity_with_candidate(ws, p, s);
        CHECK(fast == check_validity(testing::with_sample(set, {p, s})).valid);
        valid_seen += fast;
      }
    }
    CHECK(valid_seen > 20);
  }
}

TEST_CASE("interpolation examples") {
  const SampleSet one(2, {{{0, 0, 0}, 1.0}});
  CHECK(interpolate_sdf_to({0.5, 0, 0}, one, 2 * std::sqrt(2.0)) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(interpolate_sdf_to({3, 0, 0}, SampleSet(2)) == 0.0);
  const SampleSet neg(2, {{{0, 0, 0}, -0.5}});
  CHECK(interpolate_sdf_to({0.1, 0, 0}, neg) < 0.0);
  CHECK(interpolate_sdf_to({0, 0, 0}, neg) == -0.5);
}

TEST_CASE("minimum valid radius examples") {
  const SampleSet one(2, {{{0, 0, 0}, 1.0}});
  CHECK(min_valid_radius({0.5, 0, 0}, one) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(min_valid_radius({3, 0, 0}, one) == 0.0);
  const SampleSet two(2, {{{0, 0, 0}, 1.0}, {{1.2, 0, 0}, 1.0}});
  CHECK(min_valid_radius({0.6, 0, 0}, two) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(testing::sweep_min_radius(two, {0.6, 0, 0}, 1e-4, 2.0) == doctest::Approx(0.8).epsilon(2e-4));
}

TEST_CASE("augmented sets stay valid") {
  for (int dim : {2, 3}) {
    std::mt19937_64 rng(600 + dim);
    for (int it = 0; it < 25; ++it) {
      const SampleSet set = testing::random_valid_set(rng, dim, dim == 2 ? 15 : 10);
      const Workspace ws(set);
      for (int q = 0; q < 10; ++q) {
        const Vec3 p = testing::random_point(rng, dim);
        const double s = interpolate_sdf_to(p, ws, default_max_radius(dim));
        CHECK(check_validity(testing::with_sample(set, {p, s})).valid);
        const double m = min_valid_radius(p, ws);
        CHECK(check_validity(testing::with_sample(set, {p, m})).valid);
        CHECK(std::abs(m) <= std::abs(s) + 1e-12);
      }
    }
  }
}

TEST_CASE("sign follows the containing ball") {
  std::mt19937_64 rng(700);
  for (int it = 0; it < 50; ++it) {
    const SampleSet set = testing::random_valid_set(rng, 2, 10);
    const Workspace ws(set);
    const Vec3 p = testing::random_point(rng, 2);
    int sign = 0;
    for (const Sample& s : set.samples()) {
      if (distance(p, s.center) < s.radius() - 1e-6) sign = s.sign();
    }
    if (sign == 0) continue;
    CHECK(interpolate_sdf_to(p, ws, default_max_radius(2)) * sign > 0);
    CHECK(min_valid_radius(p, ws) * sign > 0);
  }
}

TEST_CASE("minimum radius is minimal") {
  std::mt19937_64 rng(800);
  for (int it = 0; it < 10; ++it) {
    const SampleSet set = testing::random_valid_set(rng, 2, 6);
    const Vec3 p = testing::random_point(rng, 2);
    const double m = std::abs(min_valid_radius(p, set));
    CHECK(testing::sweep_min_radius(set, p, 1e-3, 3.0) >= m - 1e-3);
  }
}

TEST_CASE("interpolation is deterministic and reproduces samples") {
  std::mt19937_64 rng(900);
  const SampleSet set = testing::random_valid_set(rng, 2, 20);
  const Workspace a(set), b(set);
  for (int q = 0; q < 20; ++q) {
    const Vec3 p = testing::random_point(rng, 2);
    CHECK(interpolate_sdf_to(p, a, 2.0) == interpolate_sdf_to(p, b, 2.0));
  }
  for (const Sample& s : set.samples()) CHECK(interpolate_sdf_to(s.center, a, 2.0) == s.value);
}
