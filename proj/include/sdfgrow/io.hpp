#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sdfgrow/recon.hpp"
#include "sdfgrow/sample_set.hpp"
#include "sdfgrow/sdf_grid.hpp"

namespace sdfgrow {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; the message starts with "name:line:".
class ParseError : public IoError {
 public:
  using IoError::IoError;
};

// Grid file:
//   SDFGRID 1
//   dim 2
//   res 15 15
//   origin -0.9333 -0.9333      (center of the first cell)
//   spacing 0.1333
//   values
//   <one value per line, x fastest, then y, then z>
// Blank lines and lines starting with '#' are ignored. Numbers are written
// with 17 significant digits, so a write/read round trip is exact.
SdfGrid read_grid(const std::string& path);
SdfGrid read_grid(std::istream& in, const std::string& name);
void write_grid(const SdfGrid& grid, const std::string& path);
void write_grid(const SdfGrid& grid, std::ostream& out);

// Scattered samples: CSV with header "x,y,s" or "x,y,z,s", one sample per row.
SampleSet read_scattered(const std::string& path);
SampleSet read_scattered(std::istream& in, const std::string& name);
void write_scattered(const SampleSet& set, const std::string& path);
void write_scattered(const SampleSet& set, std::ostream& out);

/// Sphere dump for viewers: same CSV layout as scattered samples (center
/// coordinates, then the signed radius).
void write_spheres(const SampleSet& set, const std::string& path);

// OBJ: "v x y z" then "f a b c" (1-based) in 3D; "v x y 0" then "l a b" in 2D.
void write_obj(const Mesh& mesh, const std::string& path);
void write_obj(const Mesh& mesh, std::ostream& out);
/// Reads v, f (triangles only) and l (two vertices) records; other records
/// are ignored. The mesh is 2D when it has line elements.
Mesh read_obj(const std::string& path);
Mesh read_obj(std::istream& in, const std::string& name);

}  // namespace sdfgrow
