#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "sdfgrow/vec.hpp"

namespace sdfgrow {

/// Dynamic R-tree over axis-aligned boxes carrying 32-bit ids. Queries report
/// every id whose box intersects the query box; callers post-filter exactly.
class BoxTree {
 public:
  BoxTree() = default;

  /// Bulk-load (packing) constructor.
  explicit BoxTree(const std::vector<std::pair<std::pair<Vec3, Vec3>, std::uint32_t>>& items);

  void insert(const Vec3& lo, const Vec3& hi, std::uint32_t id) { tree_.insert(make(lo, hi, id)); }
  bool remove(const Vec3& lo, const Vec3& hi, std::uint32_t id) {
    return tree_.remove(make(lo, hi, id)) > 0;
  }
  std::size_t size() const { return tree_.size(); }
  bool empty() const { return tree_.empty(); }
  void clear() { tree_.clear(); }

  /// Calls f(id) for each id whose box intersects [lo, hi]. Stops early when
  /// f returns false. Returns false iff stopped early.
  template <class F>
  bool visit(const Vec3& lo, const Vec3& hi, F&& f) const {
    const Box q(P(lo.x, lo.y, lo.z), P(hi.x, hi.y, hi.z));
    for (auto it = tree_.qbegin(boost::geometry::index::intersects(q)); it != tree_.qend(); ++it) {
      if (!f(it->second)) return false;
    }
    return true;
  }

 private:
  using P = boost::geometry::model::point<double, 3, boost::geometry::cs::cartesian>;
  using Box = boost::geometry::model::box<P>;
  using Value = std::pair<Box, std::uint32_t>;

  static Value make(const Vec3& lo, const Vec3& hi, std::uint32_t id) {
    return {Box(P(lo.x, lo.y, lo.z), P(hi.x, hi.y, hi.z)), id};
  }

  boost::geometry::index::rtree<Value, boost::geometry::index::rstar<16>> tree_;
};

inline BoxTree::BoxTree(const std::vector<std::pair<std::pair<Vec3, Vec3>, std::uint32_t>>& items) {
  std::vector<Value> values;
  values.reserve(items.size());
  for (const auto& [box, id] : items) values.push_back(make(box.first, box.second, id));
  tree_ = decltype(tree_)(values.begin(), values.end());
}

}  // namespace sdfgrow
