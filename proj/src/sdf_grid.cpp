#include "sdfgrow/sdf_grid.hpp"

#include <cmath>
#include <string>

namespace sdfgrow {

std::array<int, 3> SdfGrid::coords(std::size_t linear_index) const {
  const auto nx = static_cast<std::size_t>(res[0]);
  const auto ny = static_cast<std::size_t>(res[1]);
  return {static_cast<int>(linear_index % nx), static_cast<int>((linear_index / nx) % ny),
          static_cast<int>(linear_index / (nx * ny))};
}

Vec3 SdfGrid::center(std::size_t linear_index) const {
  const auto c = coords(linear_index);
  return center(c[0], c[1], c[2]);
}

Vec3 SdfGrid::lower() const {
  const double half = 0.5 * spacing;
  return {origin.x - half, origin.y - half, dim == 3 ? origin.z - half : 0.0};
}

void SdfGrid::check() const {
  if (dim != 2 && dim != 3) throw InvalidInputError("grid dimension must be 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (res[static_cast<std::size_t>(a)] < 1) throw InvalidInputError("grid resolution must be positive");
  }
  if (dim == 2 && res[2] != 1) throw InvalidInputError("2D grid must have a single z layer");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidInputError("grid spacing must be positive");
  if (!all_finite(origin)) throw InvalidInputError("grid origin must be finite");
  if (values.size() != cell_count()) {
    throw InvalidInputError("grid has " + std::to_string(values.size()) + " values, expected " +
                            std::to_string(cell_count()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInputError("grid contains a non-finite value");
  }
}

SampleSet SdfGrid::to_samples(Tolerances tol) const {
  check();
  std::vector<Sample> s;
  s.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s.push_back({center(i), values[i]});
  return SampleSet(dim, std::move(s), tol);
}

SdfGrid sample_grid(const std::function<double(const Vec3&)>& f, int dim, int res, double lo, double hi) {
  SdfGrid g;
  g.dim = dim;
  g.res = {res, res, dim == 3 ? res : 1};
  g.spacing = (hi - lo) / res;
  g.origin = {lo + 0.5 * g.spacing, lo + 0.5 * g.spacing, dim == 3 ? lo + 0.5 * g.spacing : 0.0};
  g.values.resize(g.cell_count());
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = f(g.center(i));
  return g;
}

}  // namespace sdfgrow
