#include "sdfgrow/workspace.hpp"

#include "sdfgrow/parallel.hpp"

namespace sdfgrow {

Workspace::Workspace(SampleSet set, const CacheOptions& opts)
    : set_(std::move(set)), tree_(make_sphere_tree(set_.samples(), set_.dim())) {
  const SphereView v = view();
  cache_ = IntersectionCache::build(v, opts);
  witness_.resize(set_.size());
  parallel_for(set_.size(), opts.workers, [&](std::size_t i) {
    Vec3 w;
    if (sphere_has_uncovered_point(i, v, &w)) witness_[i] = w;
  });
}

std::size_t Workspace::append(const Sample& s) {
  const std::size_t k = set_.push_back(s);
  insert_sphere(tree_, s, static_cast<std::uint32_t>(k), set_.dim());
  const SphereView v = view();
  cache_.on_insert(v, k);

  const double r = s.radius();
  const double tol = set_.tol().geom;
  std::vector<std::size_t> stale;
  v.visit_near(s.center, r, [&](std::size_t j) {
    if (j != k && witness_[j] && distance(*witness_[j], s.center) < r - tol) stale.push_back(j);
    return true;
  });
  witness_.emplace_back();
  for (std::size_t j : stale) {
    Vec3 w;
    if (sphere_has_uncovered_point(j, v, &w)) {
      witness_[j] = w;
    } else {
      witness_[j].reset();
    }
  }
  Vec3 w;
  if (sphere_has_uncovered_point(k, v, &w)) witness_[k] = w;
  return k;
}

}  // namespace sdfgrow
