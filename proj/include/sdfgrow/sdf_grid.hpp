#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "sdfgrow/sample_set.hpp"

namespace sdfgrow {

/// Signed distance samples at the cell centers of a regular grid. Values are
/// stored x-fastest, then y, then z.
struct SdfGrid {
  int dim = 2;
  std::array<int, 3> res{1, 1, 1};  // res[2] == 1 in 2D
  Vec3 origin;                      // center of cell (0, 0, 0)
  double spacing = 1.0;
  std::vector<double> values;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(res[0]) * static_cast<std::size_t>(res[1]) * static_cast<std::size_t>(res[2]);
  }
  std::size_t linear(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(res[1]) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(res[0]) +
           static_cast<std::size_t>(i);
  }
  std::array<int, 3> coords(std::size_t linear_index) const;
  Vec3 center(int i, int j, int k) const {
    return {origin.x + spacing * i, origin.y + spacing * j, dim == 3 ? origin.z + spacing * k : 0.0};
  }
  Vec3 center(std::size_t linear_index) const;

  /// Lower corner of cell (0, 0, 0).
  Vec3 lower() const;

  /// Throws InvalidInputError on inconsistent metadata or non-finite values.
  void check() const;

  SampleSet to_samples(Tolerances tol = {}) const;
};

/// Samples f at the cell centers of a res^d grid covering [lo, hi]^d.
SdfGrid sample_grid(const std::function<double(const Vec3&)>& f, int dim, int res, double lo = -1.0,
                    double hi = 1.0);

}  // namespace sdfgrow
