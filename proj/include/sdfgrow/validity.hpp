#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdfgrow/geom.hpp"
#include "sdfgrow/sample_set.hpp"

namespace sdfgrow {

enum class ViolationKind {
  kOppositeSignOverlap,  // two differently signed open balls overlap
  kFullyCovered,         // a sphere has no point outside all other open balls
  kDuplicateConflict,    // coincident centers with different values
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<std::size_t> indices;
};

struct ValidityReport {
  bool valid = true;
  std::vector<Violation> violations;  // exhaustive, sorted by kind then indices

  std::vector<std::size_t> fully_covered() const;
};

/// Exact validity check: no opposite-sign overlap (open balls, tolerance
/// inclusive) and every sphere keeps an uncovered point.
ValidityReport check_validity(const SampleSet& set, int workers = 1);
ValidityReport check_validity(const SphereView& view, int workers = 1);

/// Test oracle: same pairwise test, coverage approximated by sampling
/// `samples_per_sphere` uniformly spread surface points (>= 64). Optionally
/// reports the smallest decision margin seen, for borderline filtering: how
/// far each test value is from its threshold, minus the sample spacing when
/// a sphere is judged covered. A margin below zero means the sampled verdict
/// may be wrong.
bool check_validity_oracle(const SampleSet& set, int samples_per_sphere,
                           double* decision_margin = nullptr);

/// |s_i - s_j| <= |p_i - p_j| + tol.geom for every pair.
bool pairwise_lipschitz(const SampleSet& set);

/// Evenly spread points on a sphere's surface (circle in 2D, Fibonacci
/// lattice in 3D).
std::vector<Vec3> surface_samples(const Sample& s, int dim, int count);

}  // namespace sdfgrow
