#pragma once

// Shared helpers for the unit and acceptance tests: analytic shapes with
// exact signed distance functions and random sample-set generators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "sdfgrow/recon.hpp"
#include "sdfgrow/sample_set.hpp"
#include "sdfgrow/validity.hpp"

namespace sdfgrow::testing {

using Sdf = std::function<double(const Vec3&)>;

inline Sdf circle_sdf(Vec3 c, double r) {
  return [=](const Vec3& x) { return distance(x, c) - r; };
}

inline Sdf annulus_sdf(Vec3 c, double r, double w) {
  return [=](const Vec3& x) { return std::abs(distance(x, c) - r) - w; };
}

// Axis-aligned box with half extents b (z ignored in 2D when b.z == 0).
inline Sdf box_sdf(Vec3 c, Vec3 b) {
  return [=](const Vec3& x) {
    const Vec3 q{std::abs(x.x - c.x) - b.x, std::abs(x.y - c.y) - b.y, std::abs(x.z - c.z) - b.z};
    const Vec3 qp{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
    return norm(qp) + std::min(std::max({q.x, q.y, q.z}), 0.0);
  };
}

inline Sdf capsule_sdf(Vec3 a, Vec3 b, double r) {
  return [=](const Vec3& x) {
    const Vec3 ab = b - a;
    const double t = std::clamp(dot(x - a, ab) / squared_norm(ab), 0.0, 1.0);
    return distance(x, a + ab * t) - r;
  };
}

inline Sdf plane_sdf(Vec3 n, double offset) {
  const Vec3 u = normalized(n);
  return [=](const Vec3& x) { return dot(u, x) - offset; };
}

inline Vec3 random_point(std::mt19937_64& rng, int dim, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec3 p{u(rng), u(rng), 0.0};
  if (dim == 3) p.z = u(rng);
  return p;
}

// A random shape whose SDF is exact everywhere.
inline Sdf random_exact_sdf(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 c = random_point(rng, dim, -0.4, 0.4);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      return circle_sdf(c, 0.2 + 0.5 * u(rng));
    case 1:
      return annulus_sdf(c, 0.3 + 0.3 * u(rng), 0.05 + 0.1 * u(rng));
    case 2:
      return box_sdf(c, {0.1 + 0.4 * u(rng), 0.1 + 0.4 * u(rng), dim == 3 ? 0.1 + 0.4 * u(rng) : 0.0});
    default:
      return capsule_sdf(random_point(rng, dim, -0.6, 0.6), random_point(rng, dim, -0.6, 0.6), 0.1 + 0.2 * u(rng));
  }
}

// Exact samples of a random shape at n random points: always valid.
inline SampleSet random_valid_set(std::mt19937_64& rng, int dim, std::size_t n) {
  const Sdf f = random_exact_sdf(rng, dim);
  std::vector<Sample> s;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = random_point(rng, dim);
    s.push_back({p, f(p)});
  }
  return SampleSet(dim, std::move(s));
}

// Arbitrary values: a mix of valid and invalid configurations.
inline SampleSet random_any_set(std::mt19937_64& rng, int dim, std::size_t n) {
  std::uniform_real_distribution<double> v(-0.8, 0.8);
  std::vector<Sample> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back({random_point(rng, dim), v(rng)});
  return SampleSet(dim, std::move(s));
}

// Perturb the values of exact samples downwards in magnitude or upwards, so
// that some sets stay valid and others become invalid.
inline SampleSet random_perturbed_set(std::mt19937_64& rng, int dim, std::size_t n) {
  SampleSet base = random_valid_set(rng, dim, n);
  std::uniform_real_distribution<double> f(0.6, 1.4);
  std::vector<Sample> s(base.samples().begin(), base.samples().end());
  for (Sample& x : s) {
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) x.value *= f(rng);
  }
  return SampleSet(dim, std::move(s));
}

inline SampleSet grid_samples(const Sdf& f, int dim, int res, double lo = -1.0, double hi = 1.0) {
  const double h = (hi - lo) / res;
  std::vector<Sample> s;
  const int nz = dim == 3 ? res : 1;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < res; ++j) {
      for (int i = 0; i < res; ++i) {
        const Vec3 p{lo + h * (i + 0.5), lo + h * (j + 0.5), dim == 3 ? lo + h * (k + 0.5) : 0.0};
        s.push_back({p, f(p)});
      }
    }
  }
  return SampleSet(dim, std::move(s));
}

inline SampleSet with_sample(const SampleSet& set, const Sample& extra) {
  std::vector<Sample> s(set.samples().begin(), set.samples().end());
  s.push_back(extra);
  return SampleSet(set.dim(), std::move(s), set.tol());
}

// Brute-force radius sweep: the smallest |s| on a `step` lattice (with the
// sign of any containing ball) for which the augmented set is valid
// according to the exact checker.
inline double sweep_min_radius(const SampleSet& set, const Vec3& p, double step, double max_r) {
  int sign = 1;
  for (const Sample& s : set.samples()) {
    if (distance(p, s.center) < s.radius() - set.tol().geom) sign = s.sign();
  }
  for (double r = 0.0; r <= max_r; r += step) {
    if (check_validity(with_sample(set, {p, sign * r})).valid) return r;
  }
  return std::numeric_limits<double>::infinity();
}

// Regular polygon approximating a circle, counterclockwise.
inline Mesh circle_mesh(Vec3 c, double r, std::size_t n) {
  Mesh m;
  m.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    m.vertices.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t), 0.0});
    m.elements.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>((i + 1) % n), 0});
  }
  return m;
}

// Every vertex of a 2D polyline starts exactly one segment and ends exactly one.
inline bool polyline_closed(const Mesh& m) {
  std::vector<int> out(m.vertices.size(), 0), in(m.vertices.size(), 0);
  for (const auto& e : m.elements) {
    ++out[e[0]];
    ++in[e[1]];
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (out[v] != 1 || in[v] != 1) return false;
  }
  return !m.elements.empty();
}

// Every undirected edge of a triangle mesh is shared by exactly two
// triangles, with opposite orientations.
inline bool triangle_mesh_closed(const Mesh& m) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& t : m.elements) {
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  }
  for (const auto& [e, n] : directed) {
    if (n != 1) return false;
    const auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return !m.elements.empty();
}

inline double winding_number(const Mesh& m, const Vec3& p) {
  double total = 0.0;
  for (const auto& e : m.elements) {
    const Vec3 a = m.vertices[e[0]] - p, b = m.vertices[e[1]] - p;
    total += std::atan2(a.x * b.y - a.y * b.x, dot(a, b));
  }
  return total / (2.0 * std::numbers::pi);
}

}  // namespace sdfgrow::testing
