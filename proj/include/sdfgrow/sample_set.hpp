#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdfgrow/vec.hpp"

namespace sdfgrow {

/// Numerical tolerances shared by every geometric predicate.
///
/// `unique` decides whether two points coincide; `geom` is the slack used in
/// containment, tangency and overlap tests. A point is strictly inside a ball
/// only when it is deeper than `geom`.
struct Tolerances {
  double unique = 1e-9;
  double geom = 1e-6;
};

/// A point with a signed distance value. Its sphere has radius |value|; a
/// zero value counts as outside (positive).
struct Sample {
  Vec3 center;
  double value = 0.0;

  double radius() const { return std::abs(value); }
  bool negative() const { return value < 0.0; }
  int sign() const { return value < 0.0 ? -1 : 1; }
};

/// Ordered collection of samples in dimension 2 or 3. Indices are stable;
/// operations that drop samples return a new set plus an index map.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(int dim, std::vector<Sample> samples = {}, Tolerances tol = {});

  int dim() const { return dim_; }
  const Tolerances& tol() const { return tol_; }
  void set_tolerances(Tolerances tol);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const Sample> samples() const { return samples_; }

  std::size_t push_back(const Sample& s);

  /// Copy without the listed indices. `kept` receives the original index of
  /// every retained sample, in order.
  SampleSet without(std::span<const std::size_t> removed,
                    std::vector<std::size_t>* kept = nullptr) const;

 private:
  int dim_ = 2;
  std::vector<Sample> samples_;
  Tolerances tol_;
};

class InvalidInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by geometric primitives on configurations without a finite answer.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdfgrow
