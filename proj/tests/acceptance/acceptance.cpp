// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cache_oracle.hpp"
#include "sdfgrow/dos.hpp"
#include "sdfgrow/interp.hpp"
#include "sdfgrow/recon.hpp"
#include "sdfgrow/repair.hpp"
#include "sdfgrow/validity.hpp"
#include "sdfgrow/workspace.hpp"
#include "support.hpp"

using namespace sdfgrow;
using namespace sdfgrow::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// Valid sets produced by criteria 2, 5 and 6, checked again by criterion 9.
std::vector<SampleSet> lipschitz_pool;

Dos refined_dos(const SdfGrid& g, int tau, double kappa) {
  DosOptions o;
  o.tau = tau;
  o.kappa = kappa;
  o.cache.workers = 1;
  Dos dos = build_dos(g, o);
  refine(dos);
  return dos;
}

double max_radial_error(const Mesh& m, double r) {
  double e = 0.0;
  for (const Vec3& v : m.vertices) e = std::max(e, std::abs(norm(v) - r));
  return e;
}

// 1. Exact validity equals the surface-sampling oracle away from borderline cases.
void validity_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::size_t compared = 0, agree = 0, borderline = 0, valid_seen = 0;
  for (int dim : {2, 3}) {
    const int sets = dim == 2 ? 500 : 200;
    const int max_n = dim == 2 ? 8 : 6;
    for (int it = 0; it < sets; ++it) {
      const std::size_t n = 1 + rng() % static_cast<std::size_t>(max_n);
      SampleSet set;
      switch (it % 3) {
        case 0: set = random_any_set(rng, dim, n); break;
        case 1: set = random_perturbed_set(rng, dim, n); break;
        default: set = random_valid_set(rng, dim, n); break;
      }
      double margin = 0.0;
      const bool oracle = check_validity_oracle(set, 4096, &margin);
      if (margin < 1e-4) {
        ++borderline;
        continue;
      }
      const bool exact = check_validity(set).valid;
      ++compared;
      valid_seen += exact ? 1 : 0;
      if (exact == oracle) ++agree;
    }
  }
  const double secs = seconds_since(t0);
  o.detail << agree << "/" << compared << " agree (" << borderline << " borderline skipped, " << valid_seen
           << " valid), " << secs << " s";
  o.require(agree == compared, "disagreement with the oracle");
  o.require(compared >= 600, "too few decided cases");
  o.require(secs < 60.0, "runtime >= 60 s");
}

// 2. Every interpolated or minimum value keeps the set valid.
void interpolation_consistency(Outcome& o) {
  std::mt19937_64 rng(2002);
  std::size_t bad_interp = 0, bad_min = 0, total = 0;
  for (int it = 0; it < 100; ++it) {
    const SampleSet set = random_valid_set(rng, 2, 2 + rng() % 15);
    const Workspace ws(set);
    const double M = default_max_radius(2);
    for (int q = 0; q < 200; ++q) {
      const Vec3 p = random_point(rng, 2);
      const SampleSet a = with_sample(set, {p, interpolate_sdf_to(p, ws, M, CircleMode::kFullyUncovered)});
      const SampleSet b = with_sample(set, {p, min_valid_radius(p, ws)});
      const bool va = check_validity(a).valid;
      const bool vb = check_validity(b).valid;
      bad_interp += va ? 0 : 1;
      bad_min += vb ? 0 : 1;
      ++total;
      if (q % 50 == 0) {
        if (va) lipschitz_pool.push_back(a);
        if (vb) lipschitz_pool.push_back(b);
      }
    }
  }
  o.detail << total << " queries, " << bad_interp << " invalid after interpolation, " << bad_min
           << " invalid after minimum radius";
  o.require(bad_interp == 0 && bad_min == 0, "augmented set invalid");
}

// 3. The minimum valid radius matches a brute-force radius sweep. Validity
// is not monotone in the radius: the valid radii can form a window narrower
// than the sweep step. When the 1e-3 sweep finds nothing near s*, a 1e-6
// sweep of [|s*| - 1e-3, |s*| + 1e-3] decides; the coarse sweep still has to
// find nothing valid below that interval.
void minimality(Outcome& o) {
  std::mt19937_64 rng(3003);
  double worst = 0.0;
  int done = 0, fine = 0;
  for (int it = 0; it < 50; ++it) {
    const SampleSet set = random_valid_set(rng, 2, 2 + rng() % 7);
    const Vec3 p = random_point(rng, 2);
    const double m = std::abs(min_valid_radius(p, set));
    double sweep = sweep_min_radius(set, p, 1e-3, 4.0);
    if (sweep > m + 1e-3) {
      ++fine;
      int sign = 1;
      for (const Sample& s : set.samples()) {
        if (distance(p, s.center) < s.radius() - set.tol().geom) sign = s.sign();
      }
      for (double r = std::max(0.0, m - 1e-3); r <= m + 1e-3; r += 1e-6) {
        if (check_validity(with_sample(set, {p, sign * r})).valid) {
          sweep = std::min(sweep, r);
          break;
        }
      }
    }
    worst = std::max(worst, std::abs(m - sweep));
    ++done;
  }
  o.detail << done << " configurations (" << fine << " with a narrow valid window), worst |s* - sweep| = " << worst;
  o.require(worst <= 1e-3 + 1e-9, "difference above 1e-3");
}

// 4. Hand-derived golden values.
void golden(Outcome& o) {
  const SampleSet set(2, {{{0, 0, 0}, 1.0}});
  const double a = interpolate_sdf_to({0.5, 0, 0}, set, default_max_radius(2));
  const double b = min_valid_radius({0.5, 0, 0}, set);
  o.detail << "interpolate = " << a << ", minimum = " << b;
  o.require(std::abs(a - 1.5) <= 1e-9, "interpolate != 1.5");
  o.require(std::abs(b - 0.5) <= 1e-9, "minimum != 0.5");
}

// 5. Refinement and reconstruction of a circle.
void refinement(Outcome& o) {
  const auto t0 = Clock::now();
  const SdfGrid g = sample_grid(circle_sdf({0, 0, 0}, 0.5), 2, 15);
  const Dos dos = refined_dos(g, 3, kInf);
  const NarrowBand band = complete_narrow_band(dos, 1);
  const Mesh mesh = extract_mesh(band, 0.0, 1);
  const double secs = seconds_since(t0);
  const bool valid = check_validity(dos.samples()).valid;
  if (valid) lipschitz_pool.push_back(dos.samples());
  const double hf = band.spacing();
  const double hd = hausdorff_approx(mesh, circle_mesh({0, 0, 0}, 0.5, 20000), 20000);
  o.detail << dos.new_samples.size() << " new samples, valid = " << valid << ", Hausdorff " << hd << " (bound "
           << 2 * hf << "), closed = " << polyline_closed(mesh) << ", " << secs << " s";
  o.require(valid, "refined set invalid");
  o.require(polyline_closed(mesh) && mesh.holes.empty(), "polyline not closed");
  o.require(hd <= 2 * hf, "Hausdorff above 2 h_fine");
  o.require(secs < 30.0, "runtime >= 30 s");
}

// 6. Repair of a min-union pseudo distance field.
void repair(Outcome& o) {
  const SdfGrid g = sample_grid(
      [](const Vec3& x) { return std::min(distance(x, {-0.6, 0, 0}), distance(x, {0.6, 0, 0})) - 1.0; }, 2, 45);
  const std::size_t origin = g.linear(22, 22, 0);
  const auto t0 = Clock::now();
  const RepairResult one = repair_pseudo_sdf(g, 1);
  const double secs = seconds_since(t0);
  const RepairResult eight = repair_pseudo_sdf(g, 8);
  const SampleSet out = one.repaired.to_samples();
  const bool valid = check_validity(out).valid;
  if (valid) lipschitz_pool.push_back(out);
  bool conservative = true;
  for (const RepairChange& c : one.changed) {
    conservative = conservative && std::abs(c.new_value) >= std::abs(c.old_value) &&
                   (c.new_value < 0) == (c.old_value < 0);
  }
  const double before = g.values[origin], after = one.repaired.values[origin];
  o.detail << one.changed.size() << " changed, valid = " << valid << ", origin " << before << " -> " << after
           << ", identical across workers = " << (one.repaired.values == eight.repaired.values) << ", " << secs
           << " s";
  o.require(norm(g.center(origin)) < 1e-12, "origin is not a sample");
  o.require(valid, "repaired grid invalid");
  o.require(conservative, "a changed value shrank or flipped sign");
  o.require(std::abs(before + 0.4) < 1e-9 && std::abs(after + 0.8) <= g.spacing / 2, "origin value");
  o.require(one.repaired.values == eight.repaired.values, "worker count changed the output");
  o.require(secs < 10.0, "runtime >= 10 s");
}

// 7. Default culling keeps the output valid and saves time on a 40^2 grid.
void culling(Outcome& o) {
  const SdfGrid g = sample_grid(circle_sdf({0, 0, 0}, 0.25), 2, 40);
  const double kappa = default_kappa(2, g.cell_count());
  auto timed = [&](double k, bool* valid, std::size_t* culled) {
    std::vector<double> t;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      const Dos dos = refined_dos(g, 3, k);
      t.push_back(seconds_since(t0));
      if (rep == 0) {
        *valid = check_validity(dos.samples()).valid;
        *culled = dos.culled.size();
      }
    }
    std::sort(t.begin(), t.end());
    return t[1];
  };
  bool valid_inf = false, valid_k = false;
  std::size_t culled_inf = 0, culled_k = 0;
  const double t_inf = timed(kInf, &valid_inf, &culled_inf);
  const double t_k = timed(kappa, &valid_k, &culled_k);
  o.detail << "kappa " << kappa << ": " << culled_k << " culled, " << t_k << " s (median of 3), valid = " << valid_k
           << "; kappa inf: " << t_inf << " s, valid = " << valid_inf;
  o.require(valid_k, "culled output invalid w.r.t. retained spheres");
  o.require(valid_inf, "unculled output invalid");
  o.require(t_k < t_inf, "culling did not reduce runtime");
}

// 8. Raster prefilter finds exactly what exhaustive enumeration finds.
void prefilter(Outcome& o) {
  std::size_t equal = 0, total = 0;
  for (int dim : {2, 3}) {
    std::mt19937_64 rng(8000 + dim);
    for (int it = 0; it < (dim == 2 ? 100 : 30); ++it) {
      const std::size_t n = 2 + rng() % (dim == 2 ? 63 : 31);
      const SampleSet set = it % 2 ? random_valid_set(rng, dim, n) : random_any_set(rng, dim, n);
      const auto fast = fingerprint(build_cache(set, true));
      const bool same = fast == fingerprint(build_cache(set, false)) && points_only(fast) == brute_points(set);
      equal += same ? 1 : 0;
      ++total;
    }
  }
  const int r = default_raster_resolution(100, 2);
  o.detail << equal << "/" << total << " caches equal; resolution(n=100, d=2) = " << r;
  o.require(equal == total, "prefiltered cache differs");
  o.require(r == 128, "default resolution rule");
}

// 9. Lipschitz property of every valid output above.
void lipschitz(Outcome& o) {
  std::size_t ok = 0;
  for (const SampleSet& s : lipschitz_pool) ok += pairwise_lipschitz(s) ? 1 : 0;
  o.detail << ok << "/" << lipschitz_pool.size() << " output sets are 1-Lipschitz";
  o.require(ok == lipschitz_pool.size(), "Lipschitz violation");
  o.require(lipschitz_pool.size() >= 100, "too few sets collected");
}

// 10. Linear data is reproduced exactly; offsets land at the offset radius.
void reconstruction(Outcome& o) {
  std::mt19937_64 rng(10010);
  double worst = 0.0;
  bool closed = true;
  for (int it = 0; it < 20; ++it) {
    const int dim = it % 2 ? 3 : 2;
    const Vec3 n = random_point(rng, dim);
    const auto f = plane_sdf(n, 0.3 * random_point(rng, 2).x);
    // Lattice of a tau = 2 refinement of a 12^d grid, filled with the affine
    // values in a band around the plane.
    const int res = 12 * 4;
    const double h = 2.0 / res;
    NarrowBand band(dim, {-1 + h / 2, -1 + h / 2, dim == 3 ? -1 + h / 2 : 0.0}, h, {res, res, res});
    const double width = 2 * h * std::sqrt(static_cast<double>(dim));
    for (int k = 0; k < (dim == 3 ? res : 1); ++k) {
      for (int j = 0; j < res; ++j) {
        for (int i = 0; i < res; ++i) {
          const double v = f(band.point(i, j, k));
          if (std::abs(v) < width) band.set(i, j, k, v);
        }
      }
    }
    const Mesh m = extract_mesh(band);
    closed = closed && !m.empty() && m.holes.empty();
    for (const Vec3& v : m.vertices) worst = std::max(worst, std::abs(f(v)));
  }

  const SdfGrid g = sample_grid(circle_sdf({0, 0, 0}, 0.5), 2, 15);
  const Dos dos = refined_dos(g, 3, kInf);
  const NarrowBand band = complete_narrow_band(dos, 1, 0.15);
  const Mesh offset = extract_mesh(band, 0.15);
  const double err = max_radial_error(offset, 0.65);
  o.detail << "affine worst |f(v)| = " << worst << "; offset max |r - 0.65| = " << err << " (bound "
           << 2 * band.spacing() << "), closed = " << polyline_closed(offset);
  o.require(worst <= 1e-6, "affine reproduction");
  o.require(closed, "affine band has holes");
  o.require(polyline_closed(offset) && offset.holes.empty(), "offset polyline not closed");
  o.require(err <= 2 * band.spacing(), "offset radius");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"validity oracle equivalence", validity_oracle},
      {"interpolation consistency", interpolation_consistency},
      {"minimality", minimality},
      {"golden case", golden},
      {"refinement end-to-end", refinement},
      {"repair end-to-end", repair},
      {"culling ablation", culling},
      {"prefilter completeness", prefilter},
      {"lipschitz property", lipschitz},
      {"reconstruction exactness", reconstruction},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("criterion %zu %s: %s (%s)\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
