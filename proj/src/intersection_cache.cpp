#include "sdfgrow/intersection_cache.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdfgrow/parallel.hpp"

namespace sdfgrow {

int default_raster_resolution(std::size_t n, int dim) {
  const double target = 10.0 * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), 1.0 / dim);
  int res = 64;
  while (res < target) res *= 2;
  return res;
}

namespace {

bool touches(const Sample& a, const Sample& b, const Tolerances& tol) {
  const Contact c = classify_contact(a.center, a.radius(), b.center, b.radius(), tol);
  return c == Contact::kTangent || c == Contact::kCrossing;
}

bool is_point_sphere(const Sample& s, const Tolerances& tol) { return s.radius() <= tol.unique; }

Vec3 circle_extent(const IntersectionCircle& c) { return {c.radius, c.radius, c.radius}; }

using Pair = std::array<std::uint32_t, 2>;
using Triple = std::array<std::uint32_t, 3>;

struct Nominations {
  std::vector<Pair> pairs;
  std::vector<Triple> triples;
};

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Rasterize the union contour over the bounding box of all balls. A pixel
// records every sphere whose surface meets the pixel box, unless the whole
// box lies strictly inside some ball. Pixels with >= 2 (>= 3) surfaces
// nominate pairs (triples).
Nominations raster_nominate(const SphereView& view, int res, int workers) {
  const int dim = view.dim();
  const Tolerances& tol = view.tol();
  const std::size_t n = view.size();
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = view.at(i);
    if (is_point_sphere(s, tol)) continue;
    any = true;
    for (std::size_t k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], s.center[k] - s.radius());
      hi[k] = std::max(hi[k], s.center[k] + s.radius());
    }
  }
  Nominations out;
  if (!any) return out;
  if (dim == 2) lo.z = hi.z = 0.0;
  double extent = 0.0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) extent = std::max(extent, hi[k] - lo[k]);
  const double h = extent / res;
  std::array<int, 3> count{1, 1, 1};
  for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) {
    count[k] = std::max(1, static_cast<int>(std::ceil((hi[k] - lo[k]) / h)));
  }

  const std::size_t rows = static_cast<std::size_t>(count[1]) * static_cast<std::size_t>(count[2]);
  std::vector<Nominations> per_row(rows);
  parallel_for(rows, workers, [&](std::size_t row) {
    const int iy = static_cast<int>(row % static_cast<std::size_t>(count[1]));
    const int iz = static_cast<int>(row / static_cast<std::size_t>(count[1]));
    Nominations& local = per_row[row];
    std::vector<std::uint32_t> on_surface;
    std::vector<std::uint32_t> previous;
    for (int ix = 0; ix < count[0]; ++ix) {
      Vec3 blo{lo.x + h * ix, lo.y + h * iy, dim == 3 ? lo.z + h * iz : 0.0};
      Vec3 bhi{blo.x + h, blo.y + h, dim == 3 ? blo.z + h : 0.0};
      const Vec3 mid = (blo + bhi) * 0.5;
      const double half_diag = distance(blo, bhi) * 0.5;
      on_surface.clear();
      bool inside = false;
      view.visit_near(mid, half_diag, [&](std::size_t j) {
        const Sample& s = view.at(j);
        if (is_point_sphere(s, tol)) return true;
        double dmin2 = 0.0;
        double dmax2 = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
          const double c = s.center[k];
          const double dl = c - blo[k];
          const double dh = bhi[k] - c;
          const double out = std::max({0.0, -dl, -dh});
          dmin2 += out * out;
          const double far = std::max(std::abs(dl), std::abs(dh));
          dmax2 += far * far;
        }
        const double r = s.radius();
        const double dmax = std::sqrt(dmax2);
        if (dmax < r - tol.geom) {
          inside = true;
          return false;
        }
        if (std::sqrt(dmin2) <= r + tol.geom) on_surface.push_back(static_cast<std::uint32_t>(j));
        return true;
      });
      if (inside || on_surface.size() < 2) continue;
      std::sort(on_surface.begin(), on_surface.end());
      if (on_surface == previous) continue;
      previous = on_surface;
      const std::size_t m = on_surface.size();
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
          local.pairs.push_back({on_surface[a], on_surface[b]});
          if (dim == 3) {
            for (std::size_t c = b + 1; c < m; ++c) {
              local.triples.push_back({on_surface[a], on_surface[b], on_surface[c]});
            }
          }
        }
      }
      sort_unique(local.pairs);
      sort_unique(local.triples);
    }
  });
  for (auto& r : per_row) {
    out.pairs.insert(out.pairs.end(), r.pairs.begin(), r.pairs.end());
    out.triples.insert(out.triples.end(), r.triples.begin(), r.triples.end());
  }
  sort_unique(out.pairs);
  sort_unique(out.triples);
  return out;
}

Nominations exhaustive_nominate(const SphereView& view, int workers) {
  const std::size_t n = view.size();
  std::vector<std::vector<std::size_t>> touching(n);
  parallel_for(n, workers, [&](std::size_t i) { touching[i] = touching_spheres(i, view); });
  Nominations out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ti = touching[i];
    for (std::size_t a = 0; a < ti.size(); ++a) {
      const std::size_t j = ti[a];
      if (j <= i) continue;
      out.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      if (view.dim() != 3) continue;
      for (std::size_t b = a + 1; b < ti.size(); ++b) {
        const std::size_t k = ti[b];
        if (std::binary_search(touching[j].begin(), touching[j].end(), k)) {
          out.triples.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                 static_cast<std::uint32_t>(k)});
        }
      }
    }
  }
  return out;
}

void pair_points(const SphereView& view, std::size_t i, std::size_t j, std::vector<CachedPoint>& out) {
  const Sample& a = view.at(i);
  const Sample& b = view.at(j);
  if (!touches(a, b, view.tol())) return;
  for (const Vec3& q : circle_pair_intersect_2d(a.center, a.radius(), b.center, b.radius(), view.tol())) {
    if (!point_uncovered(q, view, {i, j})) continue;
    CachedPoint p;
    p.point = q;
    p.hosts = {static_cast<std::uint32_t>(std::min(i, j)), static_cast<std::uint32_t>(std::max(i, j)), 0};
    p.host_count = 2;
    out.push_back(p);
  }
}

void triple_points(const SphereView& view, Triple t, std::vector<CachedPoint>& out) {
  std::sort(t.begin(), t.end());
  const Sample& a = view.at(t[0]);
  const Sample& b = view.at(t[1]);
  const Sample& c = view.at(t[2]);
  const Tolerances& tol = view.tol();
  if (!touches(a, b, tol) || !touches(a, c, tol) || !touches(b, c, tol)) return;
  PointPair pts;
  try {
    pts = sphere_triple_intersect_3d(a.center, a.radius(), b.center, b.radius(), c.center, c.radius(), tol);
  } catch (const DegenerateError&) {
    return;
  }
  for (const Vec3& q : pts) {
    if (!point_uncovered(q, view, {t[0], t[1], t[2]})) continue;
    CachedPoint p;
    p.point = q;
    p.hosts = t;
    p.host_count = 3;
    out.push_back(p);
  }
}

std::optional<CachedCircle> pair_circle(const SphereView& view, std::size_t i, std::size_t j) {
  const Sample& a = view.at(i);
  const Sample& b = view.at(j);
  auto circle = sphere_pair_circle_3d(a.center, a.radius(), b.center, b.radius(), view.tol());
  if (!circle) return std::nullopt;
  circle->i = static_cast<std::uint32_t>(std::min(i, j));
  circle->j = static_cast<std::uint32_t>(std::max(i, j));
  const CircleCoverage cov = circle_coverage(*circle, view);
  if (cov == CircleCoverage::kCovered) return std::nullopt;
  return CachedCircle{*circle, cov};
}

}  // namespace

std::vector<std::size_t> touching_spheres(std::size_t i, const SphereView& view) {
  std::vector<std::size_t> out;
  const Sample& si = view.at(i);
  if (is_point_sphere(si, view.tol())) return out;
  view.visit_near(si.center, si.radius(), [&](std::size_t j) {
    if (j != i && !is_point_sphere(view.at(j), view.tol()) && touches(si, view.at(j), view.tol())) {
      out.push_back(j);
    }
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

CircleCoverage circle_coverage(const IntersectionCircle& circle, const SphereView& view) {
  const Tolerances& tol = view.tol();
  const std::size_t i = circle.i;
  const std::size_t j = circle.j;
  const Sample& si = view.at(i);
  const Sample& sj = view.at(j);
  bool fully = true;
  bool partial = false;
  bool covered = false;
  view.visit_near(circle.center, circle.radius, [&](std::size_t k) {
    if (k == i || k == j) return true;
    const Sample& sk = view.at(k);
    if (is_point_sphere(sk, tol)) return true;
    const double rk = sk.radius();
    const double dmin = circle_min_distance(sk.center, circle);
    if (!(dmin < rk - tol.geom)) return true;
    fully = false;
    const double dmax = circle_max_distance(sk.center, circle);
    if (dmax < rk - tol.geom) {
      covered = true;
      return false;
    }
    if (partial) return true;
    PointPair pts;
    try {
      pts = sphere_triple_intersect_3d(si.center, si.radius(), sj.center, sj.radius(), sk.center, rk, tol);
    } catch (const DegenerateError&) {
      return true;
    }
    for (const Vec3& q : pts) {
      if (point_uncovered(q, view, {i, j, k})) {
        partial = true;
        break;
      }
    }
    return true;
  });
  if (covered) return CircleCoverage::kCovered;
  if (fully) return CircleCoverage::kFullyUncovered;
  return partial ? CircleCoverage::kPartiallyUncovered : CircleCoverage::kCovered;
}

void IntersectionCache::ensure_spheres(std::size_t n) {
  if (points_by_sphere_.size() < n) points_by_sphere_.resize(n);
  if (circles_by_sphere_.size() < n) circles_by_sphere_.resize(n);
}

void IntersectionCache::add_point(const CachedPoint& p) {
  const auto id = static_cast<std::uint32_t>(points_.size());
  points_.push_back(p);
  point_alive_.push_back(1);
  point_tree_.insert(p.point, p.point, id);
  for (std::uint32_t h : p.host_span()) {
    ensure_spheres(h + 1);
    points_by_sphere_[h].push_back(id);
  }
  ++live_points_;
}

void IntersectionCache::add_circle(const CachedCircle& c) {
  const auto id = static_cast<std::uint32_t>(circles_.size());
  circles_.push_back(c);
  circle_alive_.push_back(1);
  const Vec3 e = circle_extent(c.circle);
  circle_tree_.insert(c.circle.center - e, c.circle.center + e, id);
  ensure_spheres(std::max(c.circle.i, c.circle.j) + 1);
  circles_by_sphere_[c.circle.i].push_back(id);
  circles_by_sphere_[c.circle.j].push_back(id);
  ++live_circles_;
}

IntersectionCache IntersectionCache::build(const SphereView& view, const CacheOptions& opts) {
  IntersectionCache cache;
  cache.ensure_spheres(view.size());
  Nominations nom;
  if (opts.prefilter) {
    cache.raster_res_ = opts.raster_res > 0 ? opts.raster_res : default_raster_resolution(view.size(), view.dim());
    nom = raster_nominate(view, cache.raster_res_, opts.workers);
  } else {
    nom = exhaustive_nominate(view, opts.workers);
  }
  cache.nominated_pairs_ = nom.pairs.size();
  cache.nominated_triples_ = nom.triples.size();

  if (view.dim() == 2) {
    std::vector<std::vector<CachedPoint>> found(nom.pairs.size());
    parallel_for(nom.pairs.size(), opts.workers,
                 [&](std::size_t k) { pair_points(view, nom.pairs[k][0], nom.pairs[k][1], found[k]); });
    for (const auto& f : found) {
      for (const CachedPoint& p : f) cache.add_point(p);
    }
    return cache;
  }

  std::vector<std::vector<CachedPoint>> found(nom.triples.size());
  parallel_for(nom.triples.size(), opts.workers,
               [&](std::size_t k) { triple_points(view, nom.triples[k], found[k]); });
  for (const auto& f : found) {
    for (const CachedPoint& p : f) cache.add_point(p);
  }
  std::vector<std::optional<CachedCircle>> circles(nom.pairs.size());
  parallel_for(nom.pairs.size(), opts.workers,
               [&](std::size_t k) { circles[k] = pair_circle(view, nom.pairs[k][0], nom.pairs[k][1]); });
  for (const auto& c : circles) {
    if (c) cache.add_circle(*c);
  }
  return cache;
}

void IntersectionCache::on_insert(const SphereView& view, std::size_t new_index) {
  ensure_spheres(view.size());
  const Sample& s = view.at(new_index);
  const double r = s.radius();
  const double tol = view.tol().geom;

  std::vector<std::uint32_t> dead;
  visit_points_near(s.center, r, [&](std::uint32_t id) {
    if (distance(points_[id].point, s.center) < r - tol) dead.push_back(id);
    return true;
  });
  for (std::uint32_t id : dead) {
    point_alive_[id] = 0;
    point_tree_.remove(points_[id].point, points_[id].point, id);
    --live_points_;
  }

  if (view.dim() == 3) {
    std::vector<std::uint32_t> touched;
    visit_circles_near(s.center, r, [&](std::uint32_t id) {
      if (circle_min_distance(s.center, circles_[id].circle) < r - tol) touched.push_back(id);
      return true;
    });
    for (std::uint32_t id : touched) {
      const CircleCoverage cov = circle_coverage(circles_[id].circle, view);
      if (cov == CircleCoverage::kCovered) {
        circle_alive_[id] = 0;
        const Vec3 e = circle_extent(circles_[id].circle);
        circle_tree_.remove(circles_[id].circle.center - e, circles_[id].circle.center + e, id);
        --live_circles_;
      } else {
        circles_[id].coverage = cov;
      }
    }
  }

  const std::vector<std::size_t> near = touching_spheres(new_index, view);
  std::vector<CachedPoint> found;
  if (view.dim() == 2) {
    for (std::size_t j : near) pair_points(view, new_index, j, found);
    for (const CachedPoint& p : found) add_point(p);
    return;
  }
  for (std::size_t a = 0; a < near.size(); ++a) {
    for (std::size_t b = a + 1; b < near.size(); ++b) {
      triple_points(view,
                    {static_cast<std::uint32_t>(new_index), static_cast<std::uint32_t>(near[a]),
                     static_cast<std::uint32_t>(near[b])},
                    found);
    }
  }
  for (const CachedPoint& p : found) add_point(p);
  for (std::size_t j : near) {
    if (auto c = pair_circle(view, new_index, j)) add_circle(*c);
  }
}

std::vector<CachedPoint> IntersectionCache::points() const {
  std::vector<CachedPoint> out;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (point_alive_[k]) out.push_back(points_[k]);
  }
  return out;
}

std::vector<CachedCircle> IntersectionCache::circles() const {
  std::vector<CachedCircle> out;
  for (std::size_t k = 0; k < circles_.size(); ++k) {
    if (circle_alive_[k]) out.push_back(circles_[k]);
  }
  return out;
}

std::vector<std::uint32_t> IntersectionCache::points_on(std::size_t sphere) const {
  std::vector<std::uint32_t> out;
  if (sphere >= points_by_sphere_.size()) return out;
  for (std::uint32_t id : points_by_sphere_[sphere]) {
    if (point_alive_[id]) out.push_back(id);
  }
  return out;
}

std::vector<std::uint32_t> IntersectionCache::circles_on(std::size_t sphere) const {
  std::vector<std::uint32_t> out;
  if (sphere >= circles_by_sphere_.size()) return out;
  for (std::uint32_t id : circles_by_sphere_[sphere]) {
    if (circle_alive_[id]) out.push_back(id);
  }
  return out;
}

}  // namespace sdfgrow
