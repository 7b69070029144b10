#include "sdfgrow/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mc_tables.hpp"
#include "sdfgrow/interp.hpp"
#include "sdfgrow/parallel.hpp"

namespace sdfgrow {

NarrowBand::NarrowBand(int dim, const Vec3& first, double h, std::array<int, 3> res)
    : dim_(dim), first_(first), h_(h), res_(res) {
  if (dim == 2) res_[2] = 1;
}

Vec3 NarrowBand::point(int i, int j, int k) const {
  return {first_.x + h_ * i, first_.y + h_ * j, dim_ == 3 ? first_.z + h_ * k : 0.0};
}

bool NarrowBand::in_range(int i, int j, int k) const {
  return i >= 0 && j >= 0 && k >= 0 && i < res_[0] && j < res_[1] && k < res_[2];
}

std::uint64_t NarrowBand::key(int i, int j, int k) const {
  return (static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(res_[1]) + static_cast<std::uint64_t>(j)) *
             static_cast<std::uint64_t>(res_[0]) +
         static_cast<std::uint64_t>(i);
}

std::array<int, 3> NarrowBand::unkey(std::uint64_t key) const {
  const auto nx = static_cast<std::uint64_t>(res_[0]);
  const auto ny = static_cast<std::uint64_t>(res_[1]);
  return {static_cast<int>(key % nx), static_cast<int>((key / nx) % ny), static_cast<int>(key / (nx * ny))};
}

const double* NarrowBand::find(int i, int j, int k) const {
  if (!in_range(i, j, k)) return nullptr;
  const auto it = values_.find(key(i, j, k));
  return it == values_.end() ? nullptr : &it->second;
}

const double* NarrowBand::find_cell_center(int i, int j, int k) const {
  if (!in_range(i, j, k)) return nullptr;
  const auto it = centers_.find(key(i, j, k));
  return it == centers_.end() ? nullptr : &it->second;
}

NarrowBand make_band_lattice(const Dos& dos) {
  const SdfGrid& g = dos.grid;
  const int depth = dos.depth();
  const double hf = g.spacing / static_cast<double>(1 << depth);
  const std::array<int, 3> res{g.res[0] << depth, g.res[1] << depth, g.dim == 3 ? g.res[2] << depth : 1};
  const Vec3 lower = g.lower();
  const Vec3 first{lower.x + 0.5 * hf, lower.y + 0.5 * hf, g.dim == 3 ? lower.z + 0.5 * hf : 0.0};
  NarrowBand band(g.dim, first, hf, res);
  for (int level = 0; level <= depth; ++level) {
    for (const DosCell& c : dos.levels[static_cast<std::size_t>(level)]) {
      if (c.sample_index == kNoSample) continue;
      // Finest centers are lattice points; coarser ones are marching-cell centers.
      const double shift = level == depth ? 0.0 : 0.5;
      int idx[3] = {0, 0, 0};
      for (int a = 0; a < g.dim; ++a) {
        idx[a] = static_cast<int>(std::lround((c.center.center[static_cast<std::size_t>(a)] - first[static_cast<std::size_t>(a)]) / hf - shift));
      }
      if (level == depth) {
        band.set(idx[0], idx[1], idx[2], c.center.value);
      } else {
        band.set_cell_center(idx[0], idx[1], idx[2], c.center.value);
      }
    }
  }
  return band;
}

namespace {

template <class F>
void for_neighbors(const NarrowBand& band, const std::array<int, 3>& p, F&& f) {
  const int zr = band.dim() == 3 ? 1 : 0;
  for (int dz = -zr; dz <= zr; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int i = p[0] + dx, j = p[1] + dy, k = p[2] + dz;
        if (band.in_range(i, j, k)) f(i, j, k);
      }
    }
  }
}

}  // namespace

NarrowBand complete_narrow_band(const Dos& dos, int workers, double iso) {
  NarrowBand band = make_band_lattice(dos);
  const double thr = band.spacing() * std::sqrt(static_cast<double>(band.dim()));
  const Workspace& ws = *dos.ws;
  MinRadiusOptions opts;
  opts.mode = CircleMode::kAnyUncovered;

  auto fill = [&](std::vector<std::uint64_t>& missing, std::vector<std::uint64_t>& frontier) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::vector<double> vals(missing.size());
    parallel_for(missing.size(), workers, [&](std::size_t m) {
      const auto p = band.unkey(missing[m]);
      vals[m] = min_valid_radius_ex(band.point(p[0], p[1], p[2]), ws, opts).s;
    });
    for (std::size_t m = 0; m < missing.size(); ++m) {
      const auto p = band.unkey(missing[m]);
      band.set(p[0], p[1], p[2], vals[m]);
      band.filled.push_back({band.point(p[0], p[1], p[2]), vals[m]});
      if (std::abs(vals[m] - iso) < thr) frontier.push_back(missing[m]);
    }
  };

  std::vector<std::uint64_t> frontier;
  for (const auto& [k, v] : band.values()) {
    if (std::abs(v - iso) < thr) frontier.push_back(k);
  }
  if (iso != 0.0) {
    // Refinement only follows the zero level set; seed the offset level set
    // from every root cell it may cross.
    std::vector<std::uint64_t> missing;
    const int per = 1 << dos.depth();
    for (const DosCell& c : dos.levels[0]) {
      if (c.sample_index == kNoSample || !is_interesting(c.center.value - iso, c.diagonal())) continue;
      const int zn = band.dim() == 3 ? per : 1;
      for (int dz = 0; dz < zn; ++dz) {
        for (int dy = 0; dy < per; ++dy) {
          for (int dx = 0; dx < per; ++dx) {
            const int i = c.index[0] * per + dx, j = c.index[1] * per + dy, k = c.index[2] * per + dz;
            if (!band.find(i, j, k)) missing.push_back(band.key(i, j, k));
          }
        }
      }
    }
    fill(missing, frontier);
  }
  std::sort(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    std::vector<std::uint64_t> missing;
    for (std::uint64_t key : frontier) {
      for_neighbors(band, band.unkey(key), [&](int i, int j, int k) {
        if (!band.find(i, j, k)) missing.push_back(band.key(i, j, k));
      });
    }
    frontier.clear();
    fill(missing, frontier);
  }
  return band;
}

namespace {

struct LocalVertex {
  std::uint64_t key;
  Vec3 pos;
};

struct CellOutput {
  std::vector<LocalVertex> verts;  // per element, 2 or 3 consecutive entries
  bool hole = false;
};

// Offsets of cube corners in the marching cubes table convention.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

class CellMesher {
 public:
  CellMesher(const NarrowBand& band, double iso) : band_(band), iso_(iso) {}

  CellOutput run(const std::array<int, 3>& c) const {
    CellOutput out;
    const int corners = band_.dim() == 3 ? 8 : 4;
    double v[8];
    bool any_missing = false, any_in = false, any_out = false;
    for (int n = 0; n < corners; ++n) {
      const double* x = band_.find(c[0] + kCorner[n][0], c[1] + kCorner[n][1], c[2] + kCorner[n][2]);
      if (!x) {
        any_missing = true;
        continue;
      }
      v[n] = *x;
      (v[n] < iso_ ? any_in : any_out) = true;
    }
    if (any_missing) {
      out.hole = any_in && any_out;
      return out;
    }
    if (!any_in || !any_out) return out;
    if (band_.dim() == 2) {
      squares(c, v, out);
    } else {
      cubes(c, v, out);
    }
    return out;
  }

 private:
  std::array<int, 3> corner(const std::array<int, 3>& c, int n) const {
    return {c[0] + kCorner[n][0], c[1] + kCorner[n][1], c[2] + kCorner[n][2]};
  }

  LocalVertex vertex(const std::array<int, 3>& c, const double* v, int a, int b) const {
    const auto pa = corner(c, a);
    const auto pb = corner(c, b);
    const double t = (iso_ - v[a]) / (v[b] - v[a]);
    if (t <= 0.0) return {band_.key(pa[0], pa[1], pa[2]) * 4 + 3, band_.point(pa[0], pa[1], pa[2])};
    if (t >= 1.0) return {band_.key(pb[0], pb[1], pb[2]) * 4 + 3, band_.point(pb[0], pb[1], pb[2])};
    int axis = 0;
    while (pa[static_cast<std::size_t>(axis)] == pb[static_cast<std::size_t>(axis)]) ++axis;
    const auto& lo = pa[static_cast<std::size_t>(axis)] < pb[static_cast<std::size_t>(axis)] ? pa : pb;
    const Vec3 xa = band_.point(pa[0], pa[1], pa[2]);
    const Vec3 xb = band_.point(pb[0], pb[1], pb[2]);
    return {band_.key(lo[0], lo[1], lo[2]) * 4 + static_cast<std::uint64_t>(axis), xa + (xb - xa) * t};
  }

  void squares(const std::array<int, 3>& c, const double* v, CellOutput& out) const {
    // Edge n joins corners n and n+1 (mod 4); corner n touches edges n-1 and n.
    auto inside = [&](int n) { return v[n] < iso_; };
    auto mid = [&](int e) {
      const auto a = corner(c, e);
      const auto b = corner(c, (e + 1) % 4);
      return (band_.point(a[0], a[1], a[2]) + band_.point(b[0], b[1], b[2])) * 0.5;
    };
    auto emit = [&](int ea, int eb, int ref_corner, bool ref_inside) {
      const auto r = corner(c, ref_corner);
      const Vec3 ma = mid(ea), mb = mid(eb), pr = band_.point(r[0], r[1], r[2]);
      const Vec3 d = mb - ma, w = pr - ma;
      const double z = d.x * w.y - d.y * w.x;
      if ((z > 0.0) != ref_inside) std::swap(ea, eb);
      out.verts.push_back(vertex(c, v, ea, (ea + 1) % 4));
      out.verts.push_back(vertex(c, v, eb, (eb + 1) % 4));
    };
    std::vector<int> crossed;
    for (int e = 0; e < 4; ++e) {
      if (inside(e) != inside((e + 1) % 4)) crossed.push_back(e);
    }
    if (crossed.size() == 2) {
      int ref = 0;
      while (!inside(ref)) ++ref;
      emit(crossed[0], crossed[1], ref, true);
      return;
    }
    // Saddle: two diagonal corners inside.
    const double* center = band_.find_cell_center(c[0], c[1], c[2]);
    const double cv = center ? *center : 0.25 * (v[0] + v[1] + v[2] + v[3]);
    const bool join_inside = cv < iso_;
    for (int n = 0; n < 4; ++n) {
      // Cut off the corners that are not joined through the center.
      if (inside(n) == join_inside) continue;
      emit((n + 3) % 4, n, n, inside(n));
    }
  }

  void cubes(const std::array<int, 3>& c, const double* v, CellOutput& out) const {
    int index = 0;
    for (int n = 0; n < 8; ++n) {
      if (v[n] < iso_) index |= 1 << n;
    }
    const int* tri = mc::triTable[index];
    for (int t = 0; tri[t] != -1; t += 3) {
      // The table winds triangles around the inside; reverse for outward normals.
      for (int m : {0, 2, 1}) {
        const int e = tri[t + m];
        out.verts.push_back(vertex(c, v, kEdge[e][0], kEdge[e][1]));
      }
    }
  }

  const NarrowBand& band_;
  double iso_;
};

}  // namespace

Mesh extract_mesh(const NarrowBand& band, double iso, int workers) {
  Mesh mesh;
  mesh.dim = band.dim();
  const auto& res = band.resolution();
  const int zr = band.dim() == 3 ? 1 : 0;
  std::vector<std::uint64_t> cells;
  for (const auto& [key, v] : band.values()) {
    const auto p = band.unkey(key);
    for (int dz = -zr; dz <= 0; ++dz) {
      for (int dy = -1; dy <= 0; ++dy) {
        for (int dx = -1; dx <= 0; ++dx) {
          const int i = p[0] + dx, j = p[1] + dy, k = p[2] + dz;
          if (i < 0 || j < 0 || k < 0 || i + 1 >= res[0] || j + 1 >= res[1] || (zr && k + 1 >= res[2])) continue;
          cells.push_back(band.key(i, j, k));
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  const CellMesher mesher(band, iso);
  std::vector<CellOutput> outs(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t n) { outs[n] = mesher.run(band.unkey(cells[n])); });

  const std::size_t per = band.dim() == 3 ? 3 : 2;
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  for (std::size_t n = 0; n < cells.size(); ++n) {
    const CellOutput& o = outs[n];
    if (o.hole) mesh.holes.push_back(band.unkey(cells[n]));
    for (std::size_t e = 0; e + per <= o.verts.size(); e += per) {
      std::array<std::uint32_t, 3> el{0, 0, 0};
      for (std::size_t m = 0; m < per; ++m) {
        const LocalVertex& lv = o.verts[e + m];
        auto [it, fresh] = ids.emplace(lv.key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (fresh) mesh.vertices.push_back(lv.pos);
        el[m] = it->second;
      }
      const bool degenerate = per == 2 ? el[0] == el[1] : (el[0] == el[1] || el[1] == el[2] || el[0] == el[2]);
      if (degenerate) continue;
      mesh.elements.push_back(el);
      mesh.provenance.push_back(cells[n]);
    }
  }
  return mesh;
}

namespace {

double element_measure(const Mesh& m, const std::array<std::uint32_t, 3>& e) {
  const Vec3& a = m.vertices[e[0]];
  const Vec3& b = m.vertices[e[1]];
  if (m.dim == 2) return distance(a, b);
  return 0.5 * norm(cross(b - a, m.vertices[e[2]] - a));
}

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double l2 = squared_norm(ab);
  if (l2 == 0.0) return a;
  return a + ab * std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
}

// Closest point on triangle abc (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

std::vector<Vec3> mesh_surface_samples(const Mesh& m, std::size_t n) {
  if (m.elements.empty()) throw InvalidInputError("mesh has no elements");
  std::vector<double> cum;
  cum.reserve(m.elements.size());
  double total = 0.0;
  for (const auto& e : m.elements) cum.push_back(total += element_measure(m, e));
  std::vector<Vec3> out;
  out.reserve(n);
  std::size_t el = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const double target = total * (static_cast<double>(s) + 0.5) / static_cast<double>(n);
    while (el + 1 < cum.size() && cum[el] < target) ++el;
    const auto& e = m.elements[el];
    const double start = el == 0 ? 0.0 : cum[el - 1];
    const double len = cum[el] - start;
    const double u = len > 0.0 ? std::clamp((target - start) / len, 0.0, 1.0) : 0.5;
    const Vec3& a = m.vertices[e[0]];
    const Vec3& b = m.vertices[e[1]];
    if (m.dim == 2) {
      out.push_back(a + (b - a) * u);
      continue;
    }
    // u picks the slice across the triangle, a golden-ratio sequence the
    // position along it; the square root makes the density uniform.
    const double w = std::fmod(static_cast<double>(s) * std::numbers::phi, 1.0);
    const double r = std::sqrt(u);
    const Vec3& c = m.vertices[e[2]];
    out.push_back(a * (1.0 - r) + b * (r * (1.0 - w)) + c * (r * w));
  }
  return out;
}

MeshDistance::MeshDistance(const Mesh& m) : mesh_(&m) {
  if (m.elements.empty()) throw InvalidInputError("mesh has no elements");
  std::vector<std::pair<std::pair<Vec3, Vec3>, std::uint32_t>> boxes;
  double total = 0.0;
  for (std::size_t k = 0; k < m.elements.size(); ++k) {
    const auto& e = m.elements[k];
    Vec3 lo = m.vertices[e[0]], hi = lo;
    const std::size_t per = m.dim == 3 ? 3 : 2;
    for (std::size_t v = 1; v < per; ++v) {
      const Vec3& x = m.vertices[e[v]];
      lo = {std::min(lo.x, x.x), std::min(lo.y, x.y), std::min(lo.z, x.z)};
      hi = {std::max(hi.x, x.x), std::max(hi.y, x.y), std::max(hi.z, x.z)};
    }
    total += distance(lo, hi);
    boxes.push_back({{lo, hi}, static_cast<std::uint32_t>(k)});
  }
  tree_ = BoxTree(boxes);
  scale_ = std::max(total / static_cast<double>(m.elements.size()), 1e-12);
}

double MeshDistance::operator()(const Vec3& q) const {
  const Mesh& m = *mesh_;
  for (double r = scale_;; r *= 2.0) {
    double best = std::numeric_limits<double>::infinity();
    const Vec3 e{r, r, r};
    tree_.visit(q - e, q + e, [&](std::uint32_t id) {
      const auto& el = m.elements[id];
      const Vec3 x = m.dim == 2 ? closest_on_segment(q, m.vertices[el[0]], m.vertices[el[1]])
                                : closest_on_triangle(q, m.vertices[el[0]], m.vertices[el[1]], m.vertices[el[2]]);
      best = std::min(best, distance(q, x));
      return true;
    });
    if (best <= r) return best;
  }
}

namespace {

struct Directed {
  double mean = 0.0;
  double max = 0.0;
};

Directed directed(const Mesh& from, const Mesh& to, std::size_t n) {
  const std::vector<Vec3> pts = mesh_surface_samples(from, n);
  const MeshDistance dist(to);
  Directed d;
  for (const Vec3& p : pts) {
    const double x = dist(p);
    d.mean += x;
    d.max = std::max(d.max, x);
  }
  d.mean /= static_cast<double>(pts.size());
  return d;
}

}  // namespace

double chamfer(const Mesh& a, const Mesh& b, std::size_t n_samples) {
  return 0.5 * (directed(a, b, n_samples).mean + directed(b, a, n_samples).mean);
}

double hausdorff_approx(const Mesh& a, const Mesh& b, std::size_t n_samples) {
  return std::max(directed(a, b, n_samples).max, directed(b, a, n_samples).max);
}

}  // namespace sdfgrow
