#include "sdfgrow/interp.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sdfgrow {

double default_max_radius(int dim) { return 2.0 * std::sqrt(static_cast<double>(dim)); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_point_sphere(const Sample& s, const Tolerances& tol) { return s.radius() <= tol.unique; }

const Sample* duplicate_at(const Vec3& p, const SphereView& view) {
  const Sample* hit = nullptr;
  view.visit_near(p, 0.0, [&](std::size_t j) {
    if (distance(p, view.at(j).center) < view.tol().unique) {
      hit = &view.at(j);
      return false;
    }
    return true;
  });
  return hit;
}

GrowToCandidate make_candidate(const Vec3& q, CandidateKind kind, std::initializer_list<std::uint32_t> hosts) {
  GrowToCandidate c;
  c.q = q;
  c.kind = kind;
  for (std::uint32_t h : hosts) c.hosts[static_cast<std::size_t>(c.host_count++)] = h;
  return c;
}

// Outward normal of a signed sphere at q: away from the center for positive
// spheres, towards it for negative ones.
Vec3 signed_normal(const Vec3& q, const Vec3& center, double s) {
  const Vec3 n = normalized(q - center);
  return s < 0.0 ? -n : n;
}

bool normals_agree(const Vec3& p, double s, const Sample& host, const Vec3& q, const Tolerances& tol) {
  if (is_point_sphere(host, tol)) return true;
  return dot(signed_normal(q, p, s), signed_normal(q, host.center, host.value)) > 0.0;
}

}  // namespace

std::vector<GrowToCandidate> grow_to_points(const Vec3& p, const Workspace& ws, CircleMode mode,
                                            double max_radius) {
  const SphereView view = ws.view();
  const Tolerances& tol = ws.tol();
  const double reach = max_radius + tol.geom;
  std::vector<GrowToCandidate> out;
  out.push_back(make_candidate(p, CandidateKind::kSelf, {}));

  view.visit_near(p, max_radius, [&](std::size_t j) {
    const Sample& s = view.at(j);
    const double d = distance(p, s.center);
    if (d < tol.unique) return true;
    const auto host = static_cast<std::uint32_t>(j);
    if (is_point_sphere(s, tol)) {
      if (d <= reach) out.push_back(make_candidate(s.center, CandidateKind::kTangent, {host}));
      return true;
    }
    const Vec3 u = (p - s.center) / d;
    for (double c : {1.0, -1.0}) {
      const Vec3 q = s.center + u * (c * s.radius());
      if (distance(q, p) > reach) continue;
      if (point_uncovered(q, view, {j})) out.push_back(make_candidate(q, CandidateKind::kTangent, {host}));
    }
    return true;
  });

  const IntersectionCache& cache = ws.cache();
  cache.visit_points_near(p, reach, [&](std::uint32_t id) {
    const CachedPoint& cp = cache.point(id);
    GrowToCandidate c;
    c.q = cp.point;
    c.kind = CandidateKind::kIntersection;
    c.hosts = cp.hosts;
    c.host_count = cp.host_count;
    out.push_back(c);
    return true;
  });

  if (ws.dim() == 3) {
    cache.visit_circles_near(p, reach, [&](std::uint32_t id) {
      const CachedCircle& cc = cache.circle(id);
      if (mode == CircleMode::kFullyUncovered && cc.coverage != CircleCoverage::kFullyUncovered) return true;
      std::array<Vec3, 2> ext;
      try {
        ext = circle_extreme_points(p, cc.circle, tol);
      } catch (const DegenerateError&) {
        return true;
      }
      for (const Vec3& q : ext) {
        if (distance(q, p) > reach) continue;
        if (cc.coverage == CircleCoverage::kFullyUncovered || point_uncovered(q, view, {cc.circle.i, cc.circle.j})) {
          out.push_back(make_candidate(q, CandidateKind::kCircleExtreme, {cc.circle.i, cc.circle.j}));
        }
      }
      return true;
    });
  }
  return out;
}

std::vector<GrowToCandidate> grow_to_points(const Vec3& p, const SampleSet& set, CircleMode mode) {
  const Workspace ws(set);
  return grow_to_points(p, ws, mode);
}

double score_for_radius(const Vec3& p, double s, std::span<const Sample> hosts, const GrowToCandidate& q,
                        double max_radius) {
  if (q.kind == CandidateKind::kSelf || distance(q.q, p) == 0.0) return 0.0;
  const Tolerances tol;
  bool agree = false;
  for (const Sample& h : hosts) agree = agree || normals_agree(p, s, h, q.q, tol);
  double type_score = 0.0;
  if (q.kind == CandidateKind::kTangent) {
    type_score = agree ? 3.0 * max_radius : 0.0;
  } else {
    type_score = agree ? 2.0 * max_radius : max_radius;
  }
  const double sign_score = s > 0.0 ? 1.0 : 2.0;
  return sign_score * std::abs(s) + type_score;
}

bool validity_with_candidate(const Workspace& ws, const Vec3& p, double s) {
  const SphereView view = ws.view();
  const Tolerances& tol = ws.tol();
  const Sample cand{p, s};
  const double rho = cand.radius();
  const std::size_t n = view.size();

  std::vector<std::size_t> affected;
  bool ok = view.visit_near(p, rho, [&](std::size_t j) {
    const Sample& sj = view.at(j);
    const double d = distance(p, sj.center);
    if (d < tol.unique && std::abs(s - sj.value) > tol.geom) return false;
    if (sj.sign() != cand.sign() && d < rho + sj.radius() - tol.geom) return false;
    // Some point of sphere j lies strictly inside the new ball.
    if (d - sj.radius() < rho - tol.geom) {
      if (d + sj.radius() < rho - tol.geom) return false;
      affected.push_back(j);
    }
    return true;
  });
  if (!ok) return false;

  const SphereView grown = view.with_extra(cand);
  for (std::size_t j : affected) {
    const auto& w = ws.witness(j);
    if (w && distance(*w, p) >= rho - tol.geom) continue;
    if (!sphere_has_uncovered_point(j, grown)) return false;
  }
  return sphere_has_uncovered_point(n, grown);
}

bool validity_with_candidate(const SampleSet& set, const Vec3& p, double s) {
  const Workspace ws(set);
  return validity_with_candidate(ws, p, s);
}

std::vector<ScoredRadius> scored_radii(const Vec3& p, const Workspace& ws, double max_radius, CircleMode mode) {
  const SphereView view = ws.view();
  const Tolerances& tol = ws.tol();

  // Radius bounds that every valid value must satisfy.
  int forced_sign = 0;
  double lower = 0.0;
  double upper_all = kInf;
  double upper_pos = kInf;  // from negative balls
  double upper_neg = kInf;  // from positive balls
  view.visit_near(p, max_radius, [&](std::size_t j) {
    const Sample& sj = view.at(j);
    const double d = distance(p, sj.center);
    const double r = sj.radius();
    if (d < r - tol.geom) {
      forced_sign = sj.sign();
      lower = std::max(lower, r - d);
    }
    upper_all = std::min(upper_all, d + r);
    if (sj.negative()) {
      upper_pos = std::min(upper_pos, d - r);
    } else {
      upper_neg = std::min(upper_neg, d - r);
    }
    return true;
  });

  const std::vector<GrowToCandidate> cands = grow_to_points(p, ws, mode, max_radius);
  std::vector<ScoredRadius> out;
  std::vector<Sample> hosts;
  for (const GrowToCandidate& c : cands) {
    hosts.clear();
    for (std::uint32_t h : c.host_span()) hosts.push_back(ws.set()[h]);
    const double rho = distance(c.q, p);
    if (rho > max_radius + tol.geom) continue;
    if (rho < lower - tol.geom || rho > upper_all + tol.geom) continue;
    for (int sign : {1, -1}) {
      if (rho == 0.0 && sign < 0) continue;
      if (forced_sign != 0 && sign != forced_sign && rho > 0.0) continue;
      if (rho > (sign > 0 ? upper_pos : upper_neg) + tol.geom) continue;
      const double s = sign * rho;
      out.push_back({s, score_for_radius(p, s, hosts, c, max_radius), c});
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredRadius& a, const ScoredRadius& b) {
    if (a.score != b.score) return a.score > b.score;
    const double ma = std::abs(a.s);
    const double mb = std::abs(b.s);
    if (ma != mb) return ma < mb;
    if ((a.s < 0.0) != (b.s < 0.0)) return a.s < 0.0;
    if (a.source.q != b.source.q) return a.source.q < b.source.q;
    return std::tie(a.source.kind, a.source.hosts) < std::tie(b.source.kind, b.source.hosts);
  });
  return out;
}

double interpolate_sdf_to(const Vec3& p, const Workspace& ws, double max_radius, CircleMode mode,
                          InterpolationStats* stats) {
  InterpolationStats local;
  InterpolationStats& st = stats ? *stats : local;
  st = {};
  if (const Sample* dup = duplicate_at(p, ws.view())) return dup->value;

  const std::vector<ScoredRadius> radii = scored_radii(p, ws, max_radius, mode);
  st.candidates = radii.size();
  std::vector<double> rejected;
  for (const ScoredRadius& r : radii) {
    if (std::find(rejected.begin(), rejected.end(), r.s) != rejected.end()) continue;
    ++st.validations;
    if (validity_with_candidate(ws, p, r.s)) return r.s;
    rejected.push_back(r.s);
  }
  st.fell_back = true;
  return min_valid_radius(p, ws);
}

double interpolate_sdf_to(const Vec3& p, const SampleSet& set, double max_radius) {
  const Workspace ws(set);
  return interpolate_sdf_to(p, ws, max_radius);
}

double interpolate_sdf_to(const Vec3& p, const SampleSet& set) {
  return interpolate_sdf_to(p, set, default_max_radius(set.dim()));
}

namespace {

struct RadiusCandidate {
  double dist;
  Vec3 q;
  std::array<std::size_t, 3> exclude;
  int exclude_count;  // 0: already known to be uncovered
};

// Nearest uncovered point of the sign-`sign` union boundary within distance
// R of p, or infinity.
double nearest_boundary_point(const Vec3& p, int sign, double R, const Workspace& ws, CircleMode mode) {
  const SphereView view = ws.view();
  const Tolerances& tol = ws.tol();
  const IntersectionCache& cache = ws.cache();
  std::vector<RadiusCandidate> cands;

  view.visit_near(p, R, [&](std::size_t j) {
    const Sample& s = view.at(j);
    if (s.sign() != sign || is_point_sphere(s, tol)) return true;
    const double d = distance(p, s.center);
    if (d < tol.unique) return true;
    const Vec3 u = (p - s.center) / d;
    for (double c : {1.0, -1.0}) {
      const Vec3 q = s.center + u * (c * s.radius());
      const double dq = distance(q, p);
      if (dq <= R) cands.push_back({dq, q, {j, 0, 0}, 1});
    }
    return true;
  });

  cache.visit_points_near(p, R, [&](std::uint32_t id) {
    const CachedPoint& cp = cache.point(id);
    for (std::uint32_t h : cp.host_span()) {
      if (ws.set()[h].sign() == sign) {
        cands.push_back({distance(cp.point, p), cp.point, {}, 0});
        break;
      }
    }
    return true;
  });

  if (ws.dim() == 3) {
    cache.visit_circles_near(p, R, [&](std::uint32_t id) {
      const CachedCircle& cc = cache.circle(id);
      if (ws.set()[cc.circle.i].sign() != sign) return true;
      if (mode == CircleMode::kFullyUncovered && cc.coverage != CircleCoverage::kFullyUncovered) return true;
      Vec3 q;
      try {
        q = circle_extreme_points(p, cc.circle, tol)[0];
      } catch (const DegenerateError&) {
        // p on the axis: the whole circle is equidistant; an uncovered arc
        // either has a triple point (cached) or is the full circle.
        q = circle_probe_point(cc.circle);
      }
      const double dq = distance(q, p);
      if (dq <= R) cands.push_back({dq, q, {cc.circle.i, cc.circle.j, 0}, 2});
      return true;
    });
  }

  std::sort(cands.begin(), cands.end(), [](const RadiusCandidate& a, const RadiusCandidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.q < b.q;
  });
  for (const RadiusCandidate& c : cands) {
    const std::span<const std::size_t> ex(c.exclude.data(), static_cast<std::size_t>(c.exclude_count));
    if (c.exclude_count == 0 || point_uncovered(c.q, view, ex)) return c.dist;
  }
  return kInf;
}

}  // namespace

MinRadiusResult min_valid_radius_ex(const Vec3& p, const Workspace& ws, const MinRadiusOptions& opts) {
  const SphereView view = ws.view();
  const Tolerances& tol = ws.tol();
  MinRadiusResult res;
  if (const Sample* dup = duplicate_at(p, view)) {
    res.s = dup->value;
    return res;
  }

  int sign = 0;
  double depth = 0.0;
  view.visit_near(p, 0.0, [&](std::size_t j) {
    const Sample& s = view.at(j);
    const double d = distance(p, s.center);
    if (d < s.radius() - tol.geom && s.radius() - d > depth) {
      sign = s.sign();
      depth = s.radius() - d;
    }
    return true;
  });

  double g = 0.0;
  if (sign != 0) {
    double R = depth > 1e-6 ? 2.0 * depth : 1e-3;
    double best = kInf;
    double cap = -1.0;
    for (;;) {
      best = nearest_boundary_point(p, sign, R, ws, opts.mode);
      if (best <= R) break;
      if (cap < 0.0) {
        cap = 0.0;
        for (const Sample& s : ws.set().samples()) cap = std::max(cap, distance(p, s.center) + s.radius());
      }
      if (R > cap) throw DegenerateError("no uncovered boundary point found for a point inside the union");
      R *= 2.0;
    }
    g = sign * best;
  }

  res.s = g;
  if (opts.lower_bound > 0.0 && std::abs(g) < opts.lower_bound - tol.geom) {
    const int orig = opts.original_sign != 0 ? opts.original_sign : (sign != 0 ? sign : 1);
    const double s0 = orig * opts.lower_bound;
    if (validity_with_candidate(ws, p, s0)) {
      res.s = s0;
      res.kept_original = true;
    } else {
      res.below_floor = true;
    }
  }
  return res;
}

double min_valid_radius(const Vec3& p, const Workspace& ws, double lower_bound) {
  MinRadiusOptions opts;
  opts.lower_bound = lower_bound;
  return min_valid_radius_ex(p, ws, opts).s;
}

double min_valid_radius(const Vec3& p, const SampleSet& set, double lower_bound) {
  const Workspace ws(set);
  return min_valid_radius(p, ws, lower_bound);
}

}  // namespace sdfgrow
