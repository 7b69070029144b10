#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdfgrow/box_tree.hpp"
#include "sdfgrow/geom.hpp"

namespace sdfgrow {

enum class CircleCoverage { kFullyUncovered, kPartiallyUncovered, kCovered };

/// An uncovered point on two (2D) or three (3D) sphere surfaces.
struct CachedPoint {
  Vec3 point;
  std::array<std::uint32_t, 3> hosts{};
  int host_count = 0;

  std::span<const std::uint32_t> host_span() const {
    return {hosts.data(), static_cast<std::size_t>(host_count)};
  }
};

/// A crossing circle of two spheres that is not completely covered.
struct CachedCircle {
  IntersectionCircle circle;
  CircleCoverage coverage = CircleCoverage::kFullyUncovered;
};

struct CacheOptions {
  int raster_res = 0;  // pixels along the longest axis; 0 = automatic rule
  int workers = 1;
  bool prefilter = true;  // false: enumerate every touching pair/triple
};

/// Rasterization resolution rule: 10 n^(1/d) rounded up to a power of two,
/// at least 64.
int default_raster_resolution(std::size_t n, int dim);

/// Classify how much of a crossing circle survives the other balls.
CircleCoverage circle_coverage(const IntersectionCircle& circle, const SphereView& view);

/// Uncovered intersection points and circles of a sphere collection, kept in
/// sync as spheres are appended.
class IntersectionCache {
 public:
  IntersectionCache() = default;

  /// `view` must carry an index and no extra sphere.
  static IntersectionCache build(const SphereView& view, const CacheOptions& opts = {});

  /// Incorporate sphere `new_index`, which must be the last sphere of `view`
  /// (and already present in its index).
  void on_insert(const SphereView& view, std::size_t new_index);

  std::vector<CachedPoint> points() const;
  std::vector<CachedCircle> circles() const;
  std::size_t point_count() const { return live_points_; }
  std::size_t circle_count() const { return live_circles_; }

  const CachedPoint& point(std::uint32_t id) const { return points_[id]; }
  const CachedCircle& circle(std::uint32_t id) const { return circles_[id]; }

  /// Live point ids hosted by sphere i.
  std::vector<std::uint32_t> points_on(std::size_t sphere) const;
  std::vector<std::uint32_t> circles_on(std::size_t sphere) const;

  template <class F>
  bool visit_points_near(const Vec3& c, double r, F&& f) const {
    const Vec3 e{r, r, r};
    return point_tree_.visit(c - e, c + e, [&](std::uint32_t id) {
      return !point_alive_[id] || distance(points_[id].point, c) > r || f(id);
    });
  }

  template <class F>
  bool visit_circles_near(const Vec3& c, double r, F&& f) const {
    const Vec3 e{r, r, r};
    return circle_tree_.visit(c - e, c + e, [&](std::uint32_t id) {
      return !circle_alive_[id] || circle_min_distance(c, circles_[id].circle) > r || f(id);
    });
  }

  int raster_resolution() const { return raster_res_; }
  std::size_t nominated_pairs() const { return nominated_pairs_; }
  std::size_t nominated_triples() const { return nominated_triples_; }

 private:
  void add_point(const CachedPoint& p);
  void add_circle(const CachedCircle& c);
  void ensure_spheres(std::size_t n);

  std::vector<CachedPoint> points_;
  std::vector<char> point_alive_;
  BoxTree point_tree_;
  std::vector<CachedCircle> circles_;
  std::vector<char> circle_alive_;
  BoxTree circle_tree_;
  std::vector<std::vector<std::uint32_t>> points_by_sphere_;
  std::vector<std::vector<std::uint32_t>> circles_by_sphere_;
  std::size_t live_points_ = 0;
  std::size_t live_circles_ = 0;
  int raster_res_ = 0;
  std::size_t nominated_pairs_ = 0;
  std::size_t nominated_triples_ = 0;
};

/// Spheres whose surfaces touch sphere i (tangent or crossing), ascending.
std::vector<std::size_t> touching_spheres(std::size_t i, const SphereView& view);

}  // namespace sdfgrow
