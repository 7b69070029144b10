#include <doctest.h>

#include <cmath>
#include <limits>

#include "sdfgrow/dos.hpp"
#include "sdfgrow/validity.hpp"
#include "support.hpp"

using namespace sdfgrow;
using namespace sdfgrow::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SphereView view_of(const SampleSet& s) { return SphereView(s.samples(), s.dim(), s.tol()); }

SdfGrid circle_grid(int res, double r = 0.5) { return sample_grid(circle_sdf({0, 0, 0}, r), 2, res); }

DosOptions no_cull(int tau) {
  DosOptions o;
  o.tau = tau;
  o.kappa = kInf;
  return o;
}

}  // namespace

TEST_CASE("default rules") {
  CHECK(default_tau(2, 100000) == 3);
  CHECK(default_tau(3, 8000) == 3);
  CHECK(default_tau(3, 8001) == 2);
  CHECK(default_kappa(2, 1600) == doctest::Approx(160.0));
  CHECK(default_kappa(3, 27000) == doctest::Approx(240.0));
  CHECK(root_max_radius(0.0, 1.0) == doctest::Approx(0.75));
  CHECK(root_max_radius(0.4, 1.0) == doctest::Approx(0.9));
  CHECK(child_max_radius(0.1, 0.5) == doctest::Approx(0.5));
  CHECK(child_max_radius(0.4, 0.5) == doctest::Approx(0.65));
}

TEST_CASE("interesting cells") {
  CHECK_FALSE(is_interesting(10.0, 1.0));
  CHECK(is_interesting(0.0, 1.0));
  CHECK(is_interesting(-0.49, 1.0));
  CHECK_FALSE(is_interesting(0.5, 1.0));

  // Unit circle on 15^2: exactly the cells with |d - 1| < diagonal / 2.
  const SdfGrid g = sample_grid(circle_sdf({0, 0, 0}, 1.0), 2, 15);
  const Dos dos = build_dos(g, no_cull(3));
  const double diag = g.spacing * std::sqrt(2.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double expect = std::abs(norm(g.center(i)) - 1.0) < 0.5 * diag;
    CHECK(dos.levels[0][i].interesting == expect);
    count += expect ? 1 : 0;
    if (expect) {
      // Interesting cells lie in a ring around the circle.
      CHECK(std::abs(norm(g.center(i)) - 1.0) < diag);
    }
  }
  CHECK(count > 20);
}

TEST_CASE("relevant spheres contain every sphere meeting the maximal sphere") {
  const SdfGrid g = circle_grid(12);
  const Dos dos = build_dos(g, no_cull(3));
  const auto& set = dos.samples();
  for (const DosCell& c : dos.levels[0]) {
    if (!c.interesting) continue;
    const double R = root_max_radius(c.center.value, c.diagonal());
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (distance(set[j].center, c.center.center) < R + set[j].radius() - 1e-12) {
        CHECK(std::find(c.relevant.begin(), c.relevant.end(), j) != c.relevant.end());
      }
    }
  }
}

TEST_CASE("covered ratio examples") {
  const SampleSet huge(2, {{{0, 0, 0}, 100.0}});
  CHECK(covered_ratio({-0.1, -0.1, 0}, {0.1, 0.1, 0}, view_of(huge)) == 1.0);
  const SampleSet none(2, {{{5, 5, 0}, 0.1}});
  CHECK(covered_ratio({-0.1, -0.1, 0}, {0.1, 0.1, 0}, view_of(none)) == 0.0);
  // A giant ball whose boundary is nearly the line x = 0 covers about half.
  const SampleSet half(2, {{{-1000, 0, 0}, 1000.0}});
  CHECK(std::abs(covered_ratio({-0.1, -0.1, 0}, {0.1, 0.1, 0}, view_of(half)) - 0.5) <= 0.125);
  const SampleSet half3(3, {{{0, 0, -1000}, 1000.0}});
  CHECK(std::abs(covered_ratio({-0.1, -0.1, -0.1}, {0.1, 0.1, 0.1}, view_of(half3)) - 0.5) <= 0.125);
}

TEST_CASE("culling example") {
  const std::vector<Sample> s{{{0, 0, 0}, 0.5}, {{0.1, 0, 0}, 0.2}, {{0.2, 0, 0}, -0.1}};
  std::vector<std::vector<std::uint32_t>> lists{{0, 1, 2}, {1, 2}};
  CHECK(cull_to_kappa(s, lists, 2.0) == std::vector<std::size_t>{0});
  CHECK(lists[0] == std::vector<std::uint32_t>{1, 2});
  CHECK(lists[1] == std::vector<std::uint32_t>{1, 2});

  std::vector<std::vector<std::uint32_t>> again{{0, 1, 2}};
  CHECK(cull_to_kappa(s, again, 1.0) == std::vector<std::size_t>{0, 1});
  std::vector<std::vector<std::uint32_t>> untouched{{0, 1, 2}};
  CHECK(cull_to_kappa(s, untouched, kInf).empty());
  CHECK(untouched[0].size() == 3);
}

TEST_CASE("culling leaves at most kappa relevant spheres") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 20; ++it) {
    std::vector<Sample> s;
    for (int i = 0; i < 40; ++i) s.push_back({random_point(rng, 2), 0.05 + 0.01 * i});
    std::vector<std::vector<std::uint32_t>> lists(10);
    for (auto& l : lists) {
      for (std::uint32_t i = 0; i < 40; ++i) {
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) l.push_back(i);
      }
    }
    const double kappa = 3 + it % 5;
    const auto removed = cull_to_kappa(s, lists, kappa);
    for (const auto& l : lists) {
      CHECK(static_cast<double>(l.size()) <= kappa);
      for (std::uint32_t i : l) CHECK_FALSE(std::binary_search(removed.begin(), removed.end(), i));
    }
  }
}

TEST_CASE("invalid grids are rejected") {
  SdfGrid g = circle_grid(8);
  g.values[27] = 5.0;
  CHECK_THROWS_AS(build_dos(g), InvalidInputError);
}

TEST_CASE("tau zero adds nothing") {
  Dos dos = build_dos(circle_grid(15), no_cull(0));
  CHECK(refine(dos).empty());
  CHECK(dos.samples().size() == 225);
}

TEST_CASE("refined circle stays valid") {
  Dos dos = build_dos(circle_grid(15), no_cull(3));
  RefineStats st;
  const auto added = refine(dos, &st);
  CHECK(added.size() == st.new_samples);
  CHECK(st.bound_exceeded == 0);
  CHECK(dos.levels.size() == 4);
  const SampleSet& out = dos.samples();
  CHECK(out.size() == 225 + added.size());
  CHECK(check_validity(out).valid);
  CHECK(pairwise_lipschitz(out));

  // Children nest in their parents and sit at their cell centers.
  for (std::size_t lv = 1; lv < dos.levels.size(); ++lv) {
    for (const DosCell& c : dos.levels[lv]) {
      CHECK(c.depth == static_cast<int>(lv));
      CHECK(c.diagonal() == doctest::Approx(dos.levels[0][0].diagonal() / (1 << lv)));
      const double M = child_max_radius(0.0, c.diagonal());
      CHECK(M > 0.0);
    }
  }
}

TEST_CASE("refinement is deterministic and level by level") {
  Dos a = build_dos(circle_grid(10, 0.6), no_cull(2));
  Dos b = build_dos(circle_grid(10, 0.6), no_cull(2));
  refine(a, 1);
  const std::vector<Sample> first(a.new_samples);
  refine(a, 2);
  refine(b, 2);
  REQUIRE(a.new_samples.size() == b.new_samples.size());
  for (std::size_t i = 0; i < a.new_samples.size(); ++i) {
    CHECK(a.new_samples[i].center == b.new_samples[i].center);
    CHECK(a.new_samples[i].value == b.new_samples[i].value);
  }
  // Refining further keeps the earlier samples as a prefix.
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].value == a.new_samples[i].value);
}

TEST_CASE("culled refinement is valid against retained spheres") {
  DosOptions o;
  o.tau = 2;
  o.kappa = 12;
  Dos dos = build_dos(circle_grid(16, 0.3), o);
  CHECK_FALSE(dos.culled.empty());
  CHECK(dos.retained.size() + dos.culled.size() == 256);
  for (const DosCell& c : dos.levels[0]) CHECK(static_cast<double>(c.relevant.size()) <= 12.0);
  refine(dos);
  CHECK(check_validity(dos.samples()).valid);
}

TEST_CASE("refined 3D sphere stays valid") {
  const SdfGrid g = sample_grid(circle_sdf({0.05, -0.03, 0.02}, 0.55), 3, 6);
  Dos dos = build_dos(g, no_cull(1));
  RefineStats st;
  refine(dos, &st);
  CHECK(st.new_samples > 0);
  CHECK(check_validity(dos.samples()).valid);
}
