#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sdfgrow/sample_set.hpp"
#include "sdfgrow/sdf_grid.hpp"

namespace sdfgrow {

/// The input has violations other than fully covered spheres (opposite-sign
/// overlaps or conflicting duplicates), which reassigning values cannot fix.
class NotRepairableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Indices of all fully covered spheres, ascending. Throws NotRepairableError
/// naming the first offending pair otherwise.
std::vector<std::size_t> find_fully_covered(const SampleSet& set, int workers = 1);

struct RepairChange {
  std::size_t index = 0;
  double old_value = 0.0;
  double new_value = 0.0;
};

struct RepairStats {
  std::size_t samples = 0;
  std::size_t covered = 0;
  std::size_t kept_original = 0;  // original value was already valid
  std::size_t below_floor = 0;    // geometric minimum was smaller than |old|
  double seconds = 0.0;
};

struct RepairResult {
  SdfGrid repaired;
  std::vector<RepairChange> changed;  // ascending index; only values that differ
  RepairStats stats;
};

/// Strips every fully covered sample and gives each one, independently, its
/// minimum valid value against the stripped set, never going below its
/// original magnitude. The output does not depend on the worker count.
RepairResult repair_pseudo_sdf(const SdfGrid& grid, int workers = 1);
/// Same for scattered samples; returns the new values in input order.
std::vector<double> repair_samples(const SampleSet& set, int workers = 1, RepairStats* stats = nullptr);

}  // namespace sdfgrow
