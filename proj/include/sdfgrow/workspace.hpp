#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdfgrow/box_tree.hpp"
#include "sdfgrow/geom.hpp"
#include "sdfgrow/intersection_cache.hpp"
#include "sdfgrow/sample_set.hpp"

namespace sdfgrow {

/// A growing sample set with everything the interpolation queries need kept
/// in sync: an R-tree over the balls, the intersection cache, and one known
/// uncovered point per sphere.
class Workspace {
 public:
  explicit Workspace(SampleSet set, const CacheOptions& opts = {});

  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  Workspace(Workspace&&) = default;
  Workspace& operator=(Workspace&&) = default;

  const SampleSet& set() const { return set_; }
  int dim() const { return set_.dim(); }
  const Tolerances& tol() const { return set_.tol(); }
  std::size_t size() const { return set_.size(); }

  /// View over the current samples. Invalidated by append().
  SphereView view() const { return SphereView(set_.samples(), set_.dim(), set_.tol(), &tree_); }

  const IntersectionCache& cache() const { return cache_; }

  /// A point of sphere i outside every other open ball, if one exists.
  const std::optional<Vec3>& witness(std::size_t i) const { return witness_[i]; }

  /// Adds a sample; the caller is responsible for keeping the set valid.
  std::size_t append(const Sample& s);

 private:
  SampleSet set_;
  BoxTree tree_;
  IntersectionCache cache_;
  std::vector<std::optional<Vec3>> witness_;
};

}  // namespace sdfgrow
