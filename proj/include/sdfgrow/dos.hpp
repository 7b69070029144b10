#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "sdfgrow/geom.hpp"
#include "sdfgrow/intersection_cache.hpp"
#include "sdfgrow/sdf_grid.hpp"
#include "sdfgrow/workspace.hpp"

namespace sdfgrow {

inline constexpr std::size_t kNoSample = std::numeric_limits<std::size_t>::max();

struct DosCell {
  Vec3 lo;
  Vec3 hi;
  Sample center;
  std::size_t sample_index = kNoSample;  // in the Dos workspace; kNoSample if culled
  int depth = 0;
  std::array<int, 3> index{};  // integer cell coordinates at this depth
  std::vector<std::uint32_t> relevant;
  double covered_ratio = 0.0;
  bool interesting = false;

  double diagonal() const { return distance(lo, hi); }
};

/// Subdivision depth rule: 2 for 3D inputs larger than 20^3, else 3.
int default_tau(int dim, std::size_t n);
/// Culling threshold rule: 4 n^(1/2) in 2D, 8 n^(1/3) in 3D.
double default_kappa(int dim, std::size_t n);

/// A cell is interesting when the surface may cross it: |s| < diagonal / 2.
bool is_interesting(double value, double diagonal);

/// Radius of the ball that bounds every sphere a root cell can grow:
/// max(diagonal/2 + |s|, 3 diagonal/4).
double root_max_radius(double value, double diagonal);
/// Same bound for a child of a cell with center value parent_value:
/// max(|parent_value| + child_diagonal/2, child_diagonal).
double child_max_radius(double parent_value, double child_diagonal);

/// Fraction of the 8^d regular lattice points of the cell strictly inside
/// some ball of the view.
double covered_ratio(const Vec3& lo, const Vec3& hi, const SphereView& view);
double covered_ratio(const DosCell& cell, const SphereView& view);

/// Removes the largest relevant sphere of the cell with the most relevant
/// spheres until no cell has more than kappa. Lists are updated in place;
/// returns the removed sphere indices in ascending order. Ties go to the
/// lowest cell index and then the lowest sphere index.
std::vector<std::size_t> cull_to_kappa(std::span<const Sample> spheres,
                                       std::vector<std::vector<std::uint32_t>>& relevant, double kappa);
std::vector<std::size_t> cull_to_kappa(std::span<const Sample> spheres, std::vector<DosCell>& cells, double kappa);

struct DosOptions {
  int tau = -1;        // < 0: default_tau
  double kappa = -1;   // < 0: default_kappa; infinity disables culling
  CacheOptions cache;  // raster resolution and worker count
};

struct RefineStats {
  std::size_t new_samples = 0;
  std::size_t fallbacks = 0;       // no scored candidate validated
  std::size_t bound_exceeded = 0;  // |s| above the cell's maximal radius
  std::size_t validations = 0;
};

/// Dual octree over the interesting cells of a grid. levels[0] holds one root
/// per grid cell; levels[k] holds the cells created by the k-th subdivision.
struct Dos {
  SdfGrid grid;
  double kappa = std::numeric_limits<double>::infinity();
  int tau = 3;
  std::vector<std::size_t> culled;    // input indices removed by culling
  std::vector<std::size_t> retained;  // input index of each retained workspace sample
  std::vector<std::vector<DosCell>> levels;
  std::vector<Sample> new_samples;  // in assignment order
  std::unique_ptr<Workspace> ws;    // retained input followed by new samples
  int workers = 1;

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  const SampleSet& samples() const { return ws->set(); }
};

/// Validates the grid, flags interesting cells, gathers relevant spheres and
/// culls to kappa. Throws InvalidInputError listing violations.
Dos build_dos(const SdfGrid& grid, const DosOptions& opts = {});

/// Subdivides interesting cells down to depth tau, assigning each new cell
/// center a consistent value in flood-fill order. Returns the new samples.
std::vector<Sample> refine(Dos& dos, int tau, RefineStats* stats = nullptr);
std::vector<Sample> refine(Dos& dos, RefineStats* stats = nullptr);

}  // namespace sdfgrow
