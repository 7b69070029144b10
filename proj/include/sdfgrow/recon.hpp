#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sdfgrow/dos.hpp"
#include "sdfgrow/sample_set.hpp"

namespace sdfgrow {

/// Sparse samples on a uniform lattice. Lattice point (i, j, k) sits at
/// first + h * (i, j, k); marching cell (i, j, k) spans lattice points
/// (i..i+1, j..j+1, k..k+1).
class NarrowBand {
 public:
  NarrowBand() = default;
  NarrowBand(int dim, const Vec3& first, double h, std::array<int, 3> res);

  int dim() const { return dim_; }
  double spacing() const { return h_; }
  const std::array<int, 3>& resolution() const { return res_; }
  Vec3 point(int i, int j, int k) const;
  bool in_range(int i, int j, int k) const;

  std::uint64_t key(int i, int j, int k) const;
  std::array<int, 3> unkey(std::uint64_t key) const;

  void set(int i, int j, int k, double v) { values_[key(i, j, k)] = v; }
  const double* find(int i, int j, int k) const;
  std::size_t size() const { return values_.size(); }
  const std::unordered_map<std::uint64_t, double>& values() const { return values_; }

  /// Value known at the center of marching cell (i, j, k), used to resolve
  /// ambiguous 2D cells.
  void set_cell_center(int i, int j, int k, double v) { centers_[key(i, j, k)] = v; }
  const double* find_cell_center(int i, int j, int k) const;

  /// Samples computed while completing the band (not part of the DOS).
  std::vector<Sample> filled;

 private:
  int dim_ = 2;
  Vec3 first_;
  double h_ = 1.0;
  std::array<int, 3> res_{1, 1, 1};
  std::unordered_map<std::uint64_t, double> values_;
  std::unordered_map<std::uint64_t, double> centers_;
};

/// Fine lattice of a DOS refined to its current depth: the finest cell
/// centers. Its finest samples land on lattice points; coarser samples land
/// on marching-cell centers.
NarrowBand make_band_lattice(const Dos& dos);

/// Collects the finest DOS samples, then repeatedly fills every missing
/// lattice point within one cell (including diagonals) of a band point with
/// its minimum valid value, where band points are those with |v| below the
/// fine-cell diagonal. All fills use the DOS samples as a frozen base.
/// A nonzero iso builds the band around that level set instead, seeded from
/// the root cells it may cross.
NarrowBand complete_narrow_band(const Dos& dos, int workers = 1, double iso = 0.0);

struct Mesh {
  int dim = 2;
  std::vector<Vec3> vertices;
  /// Segments use the first two entries; triangles all three.
  std::vector<std::array<std::uint32_t, 3>> elements;
  std::vector<std::uint64_t> provenance;  // marching cell key per element
  /// Marching cells whose known corners straddle the iso level but that miss
  /// a corner value.
  std::vector<std::array<int, 3>> holes;

  bool empty() const { return elements.empty(); }
};

/// Marching squares (2D) or marching cubes (3D) at `iso` with linear edge
/// interpolation. Segments keep the region below iso on their left; the
/// ambiguous 2D saddle is decided by the cell center value when one is known,
/// else by the corner average. Vertices are shared through lattice edge keys.
Mesh extract_mesh(const NarrowBand& band, double iso = 0.0, int workers = 1);

/// Deterministic, stratified, area/length-uniform points on the mesh.
std::vector<Vec3> mesh_surface_samples(const Mesh& m, std::size_t n);

/// Distance from q to the nearest element of m.
class MeshDistance {
 public:
  explicit MeshDistance(const Mesh& m);
  double operator()(const Vec3& q) const;

 private:
  const Mesh* mesh_;
  BoxTree tree_;
  double scale_ = 1.0;
};

/// Symmetric mean of point-to-mesh distances over n samples each way.
double chamfer(const Mesh& a, const Mesh& b, std::size_t n_samples);
/// Same samples, maximum instead of mean.
double hausdorff_approx(const Mesh& a, const Mesh& b, std::size_t n_samples);

}  // namespace sdfgrow
