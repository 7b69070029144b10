#include "sdfgrow/sample_set.hpp"

#include <algorithm>

namespace sdfgrow {

SampleSet::SampleSet(int dim, std::vector<Sample> samples, Tolerances tol)
    : dim_(dim), samples_(std::move(samples)) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("sample set dimension must be 2 or 3");
  }
  set_tolerances(tol);
  for (const Sample& s : samples_) {
    if (!all_finite(s.center) || !std::isfinite(s.value)) {
      throw std::invalid_argument("sample set contains non-finite values");
    }
  }
}

void SampleSet::set_tolerances(Tolerances tol) {
  if (!(tol.unique > 0.0) || !(tol.geom > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  tol_ = tol;
}

std::size_t SampleSet::push_back(const Sample& s) {
  if (!all_finite(s.center) || !std::isfinite(s.value)) {
    throw std::invalid_argument("sample is not finite");
  }
  samples_.push_back(s);
  return samples_.size() - 1;
}

SampleSet SampleSet::without(std::span<const std::size_t> removed,
                             std::vector<std::size_t>* kept) const {
  std::vector<char> drop(samples_.size(), 0);
  for (std::size_t i : removed) {
    if (i < drop.size()) drop[i] = 1;
  }
  SampleSet out;
  out.dim_ = dim_;
  out.tol_ = tol_;
  if (kept) kept->clear();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (drop[i]) continue;
    out.samples_.push_back(samples_[i]);
    if (kept) kept->push_back(i);
  }
  return out;
}

}  // namespace sdfgrow
