#include "sdfgrow/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdfgrow/parallel.hpp"

namespace sdfgrow {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kOppositeSignOverlap:
      return "opposite-sign-overlap";
    case ViolationKind::kFullyCovered:
      return "fully-covered-sphere";
    case ViolationKind::kDuplicateConflict:
      return "duplicate-conflict";
  }
  return "unknown";
}

std::vector<std::size_t> ValidityReport::fully_covered() const {
  std::vector<std::size_t> out;
  for (const Violation& v : violations) {
    if (v.kind == ViolationKind::kFullyCovered) out.push_back(v.indices.front());
  }
  return out;
}

ValidityReport check_validity(const SphereView& view, int workers) {
  const std::size_t n = view.size();
  const Tolerances& tol = view.tol();
  std::vector<std::vector<Violation>> per_sphere(n);

  parallel_for(n, workers, [&](std::size_t i) {
    const Sample& si = view.at(i);
    auto& out = per_sphere[i];
    view.visit_near(si.center, si.radius(), [&](std::size_t j) {
      if (j <= i) return true;
      const Sample& sj = view.at(j);
      const double d = distance(si.center, sj.center);
      if (d < tol.unique && std::abs(si.value - sj.value) > tol.geom) {
        out.push_back({ViolationKind::kDuplicateConflict, {i, j}});
      }
      if (si.sign() != sj.sign() && d < si.radius() + sj.radius() - tol.geom) {
        out.push_back({ViolationKind::kOppositeSignOverlap, {i, j}});
      }
      return true;
    });
    if (!sphere_has_uncovered_point(i, view)) {
      out.push_back({ViolationKind::kFullyCovered, {i}});
    }
  });

  ValidityReport report;
  for (auto& v : per_sphere) {
    for (auto& x : v) report.violations.push_back(std::move(x));
  }
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     if (a.kind != b.kind) return a.kind < b.kind;
                     return a.indices < b.indices;
                   });
  report.valid = report.violations.empty();
  return report;
}

ValidityReport check_validity(const SampleSet& set, int workers) {
  const BoxTree tree = make_sphere_tree(set.samples(), set.dim());
  return check_validity(SphereView(set.samples(), set.dim(), set.tol(), &tree), workers);
}

std::vector<Vec3> surface_samples(const Sample& s, int dim, int count) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  const double r = s.radius();
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / count;
      out.push_back(s.center + Vec3{std::cos(t), std::sin(t), 0.0} * r);
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    out.push_back(s.center + Vec3{rr * std::cos(phi), rr * std::sin(phi), z} * r);
  }
  return out;
}

bool check_validity_oracle(const SampleSet& set, int samples_per_sphere, double* decision_margin) {
  const std::size_t n = set.size();
  const Tolerances& tol = set.tol();
  const int count = std::max(samples_per_sphere, 64);
  double margin = std::numeric_limits<double>::infinity();
  bool valid = true;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Sample& a = set[i];
      const Sample& b = set[j];
      const double d = distance(a.center, b.center);
      if (d < tol.unique && std::abs(a.value - b.value) > tol.geom) valid = false;
      if (a.sign() != b.sign()) {
        const double gap = d - (a.radius() + b.radius());
        margin = std::min(margin, std::abs(gap + tol.geom));
        if (gap < -tol.geom) valid = false;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Sample& si = set[i];
    std::vector<Vec3> pts;
    if (si.radius() <= tol.unique) {
      pts.push_back(si.center);
    } else {
      pts = surface_samples(si, set.dim(), count);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec3& x : pts) {
      double clearance = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || set[j].radius() <= tol.unique) continue;
        const double d = distance(x, set[j].center);
        // Identical spheres do not cover each other.
        if (distance(si.center, set[j].center) < tol.unique &&
            std::abs(set[j].radius() - si.radius()) <= tol.geom) {
          continue;
        }
        clearance = std::min(clearance, d - set[j].radius());
      }
      best = std::max(best, clearance);
    }
    if (std::isfinite(best)) {
      // Clearance is 1-Lipschitz along the sphere, so a "covered" verdict is
      // only certain once it clears the largest gap between samples.
      const double resolution = pts.size() == 1 ? 0.0
                                : set.dim() == 2 ? std::numbers::pi * si.radius() / count
                                                 : 2.0 * si.radius() * std::sqrt(4.0 * std::numbers::pi / count);
      const double m = best + tol.geom;
      margin = std::min(margin, m >= 0.0 ? m : -m - resolution);
    }
    if (best < -tol.geom) valid = false;
  }
  if (decision_margin) *decision_margin = margin;
  return valid;
}

bool pairwise_lipschitz(const SampleSet& set) {
  const BoxTree tree = make_sphere_tree(set.samples(), set.dim());
  const SphereView view(set.samples(), set.dim(), set.tol(), &tree);
  const double tol = set.tol().geom;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Sample& si = set[i];
    const bool ok = view.visit_near(si.center, si.radius(), [&](std::size_t j) {
      const Sample& sj = view.at(j);
      return std::abs(si.value - sj.value) <= distance(si.center, sj.center) + tol;
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace sdfgrow
