#include <doctest.h>

#include <algorithm>
#include <random>

#include "sdfgrow/validity.hpp"
#include "support.hpp"

using namespace sdfgrow;

TEST_CASE("validity examples") {
  CHECK(check_validity(SampleSet(2, {{{0, 0, 0}, 1.0}})).valid);

  const auto overlap = check_validity(SampleSet(2, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, -0.5}}));
  CHECK_FALSE(overlap.valid);
  REQUIRE(overlap.violations.size() == 1);
  CHECK(overlap.violations[0].kind == ViolationKind::kOppositeSignOverlap);
  CHECK(overlap.violations[0].indices == std::vector<std::size_t>{0, 1});

  const auto covered = check_validity(SampleSet(2, {{{0, 0, 0}, 1.0}, {{0.1, 0, 0}, 0.5}}));
  CHECK_FALSE(covered.valid);
  CHECK(covered.fully_covered() == std::vector<std::size_t>{1});

  const auto dup = check_validity(SampleSet(2, {{{0, 0, 0}, 1.0}, {{0, 0, 0}, 0.5}}));
  CHECK_FALSE(dup.valid);
  CHECK(std::any_of(dup.violations.begin(), dup.violations.end(),
                    [](const Violation& v) { return v.kind == ViolationKind::kDuplicateConflict; }));
  CHECK(to_string(ViolationKind::kFullyCovered) == "fully-covered-sphere");
}

TEST_CASE("oracle on the example sets") {
  CHECK(check_validity_oracle(SampleSet(2, {{{0, 0, 0}, 1.0}}), 64));
  CHECK_FALSE(check_validity_oracle(SampleSet(2, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, -0.5}}), 64));
  CHECK_FALSE(check_validity_oracle(SampleSet(2, {{{0, 0, 0}, 1.0}, {{0.1, 0, 0}, 0.5}}), 64));
}

TEST_CASE("disjoint positive spheres are valid") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.05, 0.3);
  for (int it = 0; it < 20; ++it) {
    std::vector<Sample> s;
    while (s.size() < 8) {
      const Sample c{testing::random_point(rng, 2), r(rng)};
      bool ok = true;
      for (const Sample& o : s) ok = ok && distance(o.center, c.center) > o.radius() + c.radius();
      if (ok) s.push_back(c);
    }
    const SampleSet set(2, s);
    CHECK(check_validity_oracle(set, 256));
    CHECK(check_validity(set).valid);
  }
}

TEST_CASE("lipschitz examples") {
  CHECK(pairwise_lipschitz(SampleSet(2, {{{0, 0, 0}, 1.0}, {{3, 0, 0}, 2.0}})));
  CHECK_FALSE(pairwise_lipschitz(SampleSet(2, {{{0, 0, 0}, 1.0}, {{0.1, 0, 0}, 0.5}})));
}

TEST_CASE("valid sets are lipschitz and stay valid after removal") {
  for (int dim : {2, 3}) {
    std::mt19937_64 rng(40 + dim);
    for (int it = 0; it < 100; ++it) {
      const SampleSet set = testing::random_perturbed_set(rng, dim, dim == 2 ? 8 : 6);
      if (!check_validity(set).valid) continue;
      CHECK(pairwise_lipschitz(set));
      const std::size_t drop[] = {static_cast<std::size_t>(it) % set.size()};
      CHECK(check_validity(set.without(drop)).valid);
    }
  }
}

TEST_CASE("exact samples of exact distance functions are valid") {
  for (int dim : {2, 3}) {
    std::mt19937_64 rng(60 + dim);
    for (int it = 0; it < 50; ++it) {
      CHECK(check_validity(testing::random_valid_set(rng, dim, 30)).valid);
    }
  }
}

TEST_CASE("worker count does not change the report") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 20; ++it) {
    const SampleSet set = testing::random_any_set(rng, 2, 20);
    const auto a = check_validity(set, 1);
    const auto b = check_validity(set, 4);
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t k = 0; k < a.violations.size(); ++k) {
      CHECK(a.violations[k].kind == b.violations[k].kind);
      CHECK(a.violations[k].indices == b.violations[k].indices);
    }
  }
}
