#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>

#include "sdfgrow/box_tree.hpp"
#include "sdfgrow/sample_set.hpp"
#include "sdfgrow/vec.hpp"

namespace sdfgrow {

/// Up to two intersection points.
struct PointPair {
  std::array<Vec3, 2> pts{};
  int count = 0;

  void push(const Vec3& p) { pts[static_cast<std::size_t>(count++)] = p; }
  const Vec3* begin() const { return pts.data(); }
  const Vec3* end() const { return pts.data() + count; }
  std::size_t size() const { return static_cast<std::size_t>(count); }
  bool empty() const { return count == 0; }
  const Vec3& operator[](std::size_t i) const { return pts[i]; }
};

/// Circle where two spheres cross (3D only).
struct IntersectionCircle {
  Vec3 center;
  double radius = 0.0;
  Vec3 normal;  // unit, along the center-to-center axis of the hosts
  std::uint32_t i = 0;
  std::uint32_t j = 0;
};

/// How two spheres' surfaces relate, up to tolerance.
enum class Contact {
  kDisjoint,   // balls do not touch
  kContains,   // first ball strictly contains the second sphere
  kInside,     // first sphere strictly inside the second ball
  kTangent,    // surfaces touch at one point
  kCrossing,   // surfaces cross along a circle (3D) or at two points (2D)
  kIdentical,  // same center, same radius
};

Contact classify_contact(const Vec3& c1, double r1, const Vec3& c2, double r2, const Tolerances& tol);

/// Touching point of two tangent spheres (external or internal tangency).
Vec3 tangent_contact_point(const Vec3& c1, double r1, const Vec3& c2, double r2);

/// Intersection of two circles in the z = 0 plane. One point on tangency.
/// Throws DegenerateError for coincident centers with equal radii.
PointPair circle_pair_intersect_2d(const Vec3& c1, double r1, const Vec3& c2, double r2,
                                   const Tolerances& tol = {});

/// Points on all three spheres. Throws DegenerateError for collinear centers.
PointPair sphere_triple_intersect_3d(const Vec3& c1, double r1, const Vec3& c2, double r2,
                                     const Vec3& c3, double r3, const Tolerances& tol = {});

/// Crossing circle of two spheres; none when disjoint, nested or tangent.
std::optional<IntersectionCircle> sphere_pair_circle_3d(const Vec3& c1, double r1, const Vec3& c2,
                                                        double r2, const Tolerances& tol = {});

/// {closest, farthest} points of the circle to p. Throws DegenerateError when
/// p lies on the circle axis.
std::array<Vec3, 2> circle_extreme_points(const Vec3& p, const IntersectionCircle& circle,
                                          const Tolerances& tol = {});

/// Deterministic circle point: center + radius * e with e the lexicographically
/// smallest unit vector orthogonal to the normal.
Vec3 circle_probe_point(const IntersectionCircle& circle);

double circle_min_distance(const Vec3& p, const IntersectionCircle& circle);
double circle_max_distance(const Vec3& p, const IntersectionCircle& circle);

/// Read-only view of a sphere collection: a span of samples, an optional
/// R-tree over their bounding boxes, and an optional extra sphere that gets
/// index size() - 1 (used to test a candidate without mutating the set).
class SphereView {
 public:
  SphereView(std::span<const Sample> samples, int dim, Tolerances tol,
             const BoxTree* index = nullptr)
      : samples_(samples), dim_(dim), tol_(tol), index_(index) {}

  SphereView with_extra(const Sample& extra) const {
    SphereView v = *this;
    v.extra_ = extra;
    return v;
  }

  int dim() const { return dim_; }
  const Tolerances& tol() const { return tol_; }
  std::size_t size() const { return samples_.size() + (extra_ ? 1 : 0); }
  std::size_t base_size() const { return samples_.size(); }
  bool has_extra() const { return extra_.has_value(); }
  const Sample& at(std::size_t i) const { return i < samples_.size() ? samples_[i] : *extra_; }

  /// Calls f(j) for every sphere j whose closed ball comes within `r` (+tol)
  /// of `c`. Stops when f returns false; returns false iff stopped.
  template <class F>
  bool visit_near(const Vec3& c, double r, F&& f) const {
    const double pad = tol_.geom;
    auto test = [&](std::size_t j) {
      const Sample& s = at(j);
      return distance(c, s.center) <= r + s.radius() + pad;
    };
    if (index_) {
      const Vec3 ext{r + pad, r + pad, dim_ == 3 ? r + pad : 0.0};
      const bool done = index_->visit(c - ext, c + ext, [&](std::uint32_t j) {
        return j >= samples_.size() || !test(j) || f(static_cast<std::size_t>(j));
      });
      if (!done) return false;
    } else {
      for (std::size_t j = 0; j < samples_.size(); ++j) {
        if (test(j) && !f(j)) return false;
      }
    }
    if (extra_ && test(samples_.size())) return f(samples_.size());
    return true;
  }

 private:
  std::span<const Sample> samples_;
  int dim_ = 2;
  Tolerances tol_;
  const BoxTree* index_ = nullptr;
  std::optional<Sample> extra_;
};

/// Bounding boxes of every sample's ball, suitable for a SphereView index.
BoxTree make_sphere_tree(std::span<const Sample> samples, int dim);
void insert_sphere(BoxTree& tree, const Sample& s, std::uint32_t id, int dim);

/// True iff q is not strictly inside (deeper than tol.geom) any ball of the
/// view, ignoring the excluded indices. Boundary points count as uncovered.
bool point_uncovered(const Vec3& q, const SphereView& view,
                     std::initializer_list<std::size_t> exclude = {});
bool point_uncovered(const Vec3& q, const SphereView& view, std::span<const std::size_t> exclude);

/// Exact decision whether sphere i has a point outside every other open ball.
/// Witness candidates are the pairwise crossings (2D), or the tangent
/// contacts, triple points and circle probes (3D), and a surface probe when
/// nothing touches the sphere. Optionally returns the witness.
bool sphere_has_uncovered_point(std::size_t i, const SphereView& view, Vec3* witness = nullptr);

/// Brute-force variant over a plain sample span.
bool sphere_has_uncovered_point(std::size_t i, const SampleSet& set);
bool point_uncovered(const Vec3& q, const SampleSet& set,
                     std::initializer_list<std::size_t> exclude = {});

}  // namespace sdfgrow
