#include "sdfgrow/geom.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sdfgrow {

Contact classify_contact(const Vec3& c1, double r1, const Vec3& c2, double r2,
                         const Tolerances& tol) {
  const double d = distance(c1, c2);
  if (d < tol.unique) {
    if (std::abs(r1 - r2) <= tol.geom) return Contact::kIdentical;
    return r1 > r2 ? Contact::kContains : Contact::kInside;
  }
  if (d > r1 + r2 + tol.geom) return Contact::kDisjoint;
  if (d >= r1 + r2 - tol.geom) return Contact::kTangent;
  const double dr = std::abs(r1 - r2);
  if (d < dr - tol.geom) return r1 > r2 ? Contact::kContains : Contact::kInside;
  if (d <= dr + tol.geom) return Contact::kTangent;
  return Contact::kCrossing;
}

Vec3 tangent_contact_point(const Vec3& c1, double r1, const Vec3& c2, double r2) {
  const Vec3 u = normalized(c2 - c1);
  const double d = distance(c1, c2);
  const bool external = std::abs(d - (r1 + r2)) <= std::abs(d - std::abs(r1 - r2));
  Vec3 q1;
  Vec3 q2;
  if (external) {
    q1 = c1 + u * r1;
    q2 = c2 - u * r2;
  } else if (r1 >= r2) {
    q1 = c1 + u * r1;
    q2 = c2 + u * r2;
  } else {
    q1 = c1 - u * r1;
    q2 = c2 - u * r2;
  }
  return (q1 + q2) * 0.5;
}

PointPair circle_pair_intersect_2d(const Vec3& c1, double r1, const Vec3& c2, double r2,
                                   const Tolerances& tol) {
  PointPair out;
  const double d = distance(c1, c2);
  if (d < tol.unique && std::abs(r1 - r2) <= tol.geom) {
    throw DegenerateError("coincident circles intersect in infinitely many points");
  }
  switch (classify_contact(c1, r1, c2, r2, tol)) {
    case Contact::kTangent:
      out.push(tangent_contact_point(c1, r1, c2, r2));
      return out;
    case Contact::kCrossing:
      break;
    default:
      return out;
  }
  const Vec3 u = (c2 - c1) / d;
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(r1 * r1 - a * a, 0.0));
  const Vec3 base = c1 + u * a;
  const Vec3 perp{-u.y, u.x, 0.0};
  out.push(base + perp * h);
  out.push(base - perp * h);
  return out;
}

PointPair sphere_triple_intersect_3d(const Vec3& c1, double r1, const Vec3& c2, double r2,
                                     const Vec3& c3, double r3, const Tolerances& tol) {
  PointPair out;
  const Vec3 d12 = c2 - c1;
  const double d = norm(d12);
  if (d < tol.unique) throw DegenerateError("triple intersection with coincident centers");
  const Vec3 ex = d12 / d;
  const Vec3 d13 = c3 - c1;
  const double i = dot(ex, d13);
  const Vec3 off = d13 - ex * i;
  const double j = norm(off);
  if (j < tol.geom) throw DegenerateError("triple intersection with collinear centers");
  const Vec3 ey = off / j;
  const Vec3 ez = cross(ex, ey);

  const double x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - (i / j) * x;
  const double z2 = r1 * r1 - x * x - y * y;
  // Dropping a slightly negative z^2 moves the point off sphere 1 by about
  // |z^2| / (2 r1); accept that when it stays within tolerance.
  const double slack = 2.0 * std::max(r1, tol.unique) * tol.geom;
  const Vec3 base = c1 + ex * x + ey * y;
  if (z2 < -slack) return out;
  if (z2 <= tol.geom * tol.geom) {
    out.push(base);
    return out;
  }
  const double z = std::sqrt(z2);
  out.push(base + ez * z);
  out.push(base - ez * z);
  return out;
}

std::optional<IntersectionCircle> sphere_pair_circle_3d(const Vec3& c1, double r1, const Vec3& c2,
                                                        double r2, const Tolerances& tol) {
  if (classify_contact(c1, r1, c2, r2, tol) != Contact::kCrossing) return std::nullopt;
  const double d = distance(c1, c2);
  const Vec3 u = (c2 - c1) / d;
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double rho2 = r1 * r1 - a * a;
  if (rho2 <= 0.0) return std::nullopt;
  IntersectionCircle c;
  c.center = c1 + u * a;
  c.radius = std::sqrt(rho2);
  c.normal = u;
  return c;
}

std::array<Vec3, 2> circle_extreme_points(const Vec3& p, const IntersectionCircle& circle,
                                          const Tolerances& tol) {
  const Vec3 v = p - circle.center;
  const Vec3 w = circle.normal * dot(v, circle.normal);
  const Vec3 t = v - w;
  const double tn = norm(t);
  if (tn <= tol.geom) throw DegenerateError("point lies on the circle axis");
  const Vec3 e = t / tn;
  return {circle.center + e * circle.radius, circle.center - e * circle.radius};
}

Vec3 circle_probe_point(const IntersectionCircle& circle) {
  const Vec3& mu = circle.normal;
  for (int k = 0; k < 3; ++k) {
    Vec3 axis;
    axis[static_cast<std::size_t>(k)] = 1.0;
    const Vec3 t = -(axis - mu * mu[static_cast<std::size_t>(k)]);
    const double n = norm(t);
    if (n > 1e-9) return circle.center + t * (circle.radius / n);
  }
  return circle.center;
}

double circle_min_distance(const Vec3& p, const IntersectionCircle& circle) {
  const Vec3 v = p - circle.center;
  const double a = dot(v, circle.normal);
  const double t = norm(v - circle.normal * a);
  return std::hypot(a, t - circle.radius);
}

double circle_max_distance(const Vec3& p, const IntersectionCircle& circle) {
  const Vec3 v = p - circle.center;
  const double a = dot(v, circle.normal);
  const double t = norm(v - circle.normal * a);
  return std::hypot(a, t + circle.radius);
}

BoxTree make_sphere_tree(std::span<const Sample> samples, int dim) {
  std::vector<std::pair<std::pair<Vec3, Vec3>, std::uint32_t>> items;
  items.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = samples[i].radius();
    const Vec3 e{r, r, dim == 3 ? r : 0.0};
    items.push_back({{samples[i].center - e, samples[i].center + e}, static_cast<std::uint32_t>(i)});
  }
  return BoxTree(items);
}

void insert_sphere(BoxTree& tree, const Sample& s, std::uint32_t id, int dim) {
  const double r = s.radius();
  const Vec3 e{r, r, dim == 3 ? r : 0.0};
  tree.insert(s.center - e, s.center + e, id);
}

namespace {

bool excluded(std::size_t j, std::span<const std::size_t> exclude) {
  return std::find(exclude.begin(), exclude.end(), j) != exclude.end();
}

}  // namespace

bool point_uncovered(const Vec3& q, const SphereView& view, std::span<const std::size_t> exclude) {
  const double tol = view.tol().geom;
  return view.visit_near(q, 0.0, [&](std::size_t j) {
    if (excluded(j, exclude)) return true;
    const Sample& s = view.at(j);
    return !(distance(q, s.center) < s.radius() - tol);
  });
}

bool point_uncovered(const Vec3& q, const SphereView& view,
                     std::initializer_list<std::size_t> exclude) {
  return point_uncovered(q, view, std::span<const std::size_t>(exclude.begin(), exclude.size()));
}

namespace {

bool is_point_sphere(const Sample& s, const Tolerances& tol) { return s.radius() <= tol.unique; }

struct Witness {
  Vec3* out;
  bool found(const Vec3& q) {
    if (out) *out = q;
    return true;
  }
};

Vec3 surface_probe(const Sample& s) { return s.center + Vec3{s.radius(), 0.0, 0.0}; }

bool uncovered_2d(std::size_t i, const SphereView& view, Witness w) {
  const Sample& si = view.at(i);
  const Tolerances& tol = view.tol();
  bool touched = false;
  bool covered = false;
  bool hit = false;
  Vec3 hit_point;
  view.visit_near(si.center, si.radius(), [&](std::size_t j) {
    if (j == i) return true;
    const Sample& sj = view.at(j);
    if (is_point_sphere(sj, tol)) return true;
    const Contact c = classify_contact(si.center, si.radius(), sj.center, sj.radius(), tol);
    if (c == Contact::kInside) {
      covered = true;
      return false;
    }
    if (c != Contact::kTangent && c != Contact::kCrossing) return true;
    touched = true;
    for (const Vec3& q : circle_pair_intersect_2d(si.center, si.radius(), sj.center, sj.radius(), tol)) {
      if (point_uncovered(q, view, {i, j})) {
        hit = true;
        hit_point = q;
        return false;
      }
    }
    return true;
  });
  if (hit) return w.found(hit_point);
  if (covered || touched) return false;
  const Vec3 probe = surface_probe(si);
  return point_uncovered(probe, view, {i}) && w.found(probe);
}

bool uncovered_3d(std::size_t i, const SphereView& view, Witness w) {
  const Sample& si = view.at(i);
  const Tolerances& tol = view.tol();
  bool touched = false;
  bool covered = false;
  std::vector<IntersectionCircle> circles;
  std::optional<Vec3> hit;
  view.visit_near(si.center, si.radius(), [&](std::size_t j) {
    if (j == i) return true;
    const Sample& sj = view.at(j);
    if (is_point_sphere(sj, tol)) return true;
    const Contact c = classify_contact(si.center, si.radius(), sj.center, sj.radius(), tol);
    if (c == Contact::kInside) {
      covered = true;
      return false;
    }
    if (c == Contact::kTangent) {
      touched = true;
      const Vec3 q = tangent_contact_point(si.center, si.radius(), sj.center, sj.radius());
      if (point_uncovered(q, view, {i, j})) {
        hit = q;
        return false;
      }
    } else if (c == Contact::kCrossing) {
      touched = true;
      if (auto circle = sphere_pair_circle_3d(si.center, si.radius(), sj.center, sj.radius(), tol)) {
        circle->i = static_cast<std::uint32_t>(i);
        circle->j = static_cast<std::uint32_t>(j);
        circles.push_back(*circle);
      }
    }
    return true;
  });
  if (hit) return w.found(*hit);
  if (covered) return false;

  for (const IntersectionCircle& circle : circles) {
    const std::size_t j = circle.j;
    const Sample& sj = view.at(j);
    bool circle_covered = false;
    bool crossed = false;
    view.visit_near(circle.center, circle.radius, [&](std::size_t k) {
      if (k == i || k == j) return true;
      const Sample& sk = view.at(k);
      if (is_point_sphere(sk, tol)) return true;
      const double rk = sk.radius();
      const double dmax = circle_max_distance(sk.center, circle);
      if (dmax < rk - tol.geom) {
        circle_covered = true;
        return false;
      }
      const double dmin = circle_min_distance(sk.center, circle);
      if (dmin > rk + tol.geom || dmax < rk - tol.geom) return true;
      PointPair pts;
      try {
        pts = sphere_triple_intersect_3d(si.center, si.radius(), sj.center, sj.radius(), sk.center, rk, tol);
      } catch (const DegenerateError&) {
        // Coaxial: k's surface contains the whole circle, which stays on k's boundary.
        return true;
      }
      for (const Vec3& q : pts) {
        crossed = true;
        if (point_uncovered(q, view, {i, j, k})) {
          hit = q;
          return false;
        }
      }
      return true;
    });
    if (hit) return w.found(*hit);
    if (circle_covered || crossed) continue;
    const Vec3 probe = circle_probe_point(circle);
    if (point_uncovered(probe, view, {i, j})) return w.found(probe);
  }
  if (touched) return false;
  const Vec3 probe = surface_probe(si);
  return point_uncovered(probe, view, {i}) && w.found(probe);
}

}  // namespace

bool sphere_has_uncovered_point(std::size_t i, const SphereView& view, Vec3* witness) {
  const Sample& si = view.at(i);
  Witness w{witness};
  if (is_point_sphere(si, view.tol())) {
    return point_uncovered(si.center, view, {i}) && w.found(si.center);
  }
  return view.dim() == 3 ? uncovered_3d(i, view, w) : uncovered_2d(i, view, w);
}

bool sphere_has_uncovered_point(std::size_t i, const SampleSet& set) {
  return sphere_has_uncovered_point(i, SphereView(set.samples(), set.dim(), set.tol()));
}

bool point_uncovered(const Vec3& q, const SampleSet& set, std::initializer_list<std::size_t> exclude) {
  return point_uncovered(q, SphereView(set.samples(), set.dim(), set.tol()), exclude);
}

}  // namespace sdfgrow
