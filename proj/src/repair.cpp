#include "sdfgrow/repair.hpp"

#include <chrono>
#include <sstream>

#include "sdfgrow/interp.hpp"
#include "sdfgrow/parallel.hpp"
#include "sdfgrow/validity.hpp"
#include "sdfgrow/workspace.hpp"

namespace sdfgrow {

std::vector<std::size_t> find_fully_covered(const SampleSet& set, int workers) {
  const ValidityReport report = check_validity(set, workers);
  for (const Violation& v : report.violations) {
    if (v.kind == ViolationKind::kFullyCovered) continue;
    std::ostringstream msg;
    msg << "not repairable: " << to_string(v.kind);
    for (std::size_t i : v.indices) msg << ' ' << i;
    throw NotRepairableError(msg.str());
  }
  return report.fully_covered();
}

std::vector<double> repair_samples(const SampleSet& set, int workers, RepairStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  RepairStats local;
  RepairStats& st = stats ? *stats : local;
  st = {};
  st.samples = set.size();

  std::vector<double> out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out[i] = set[i].value;
  const std::vector<std::size_t> covered = find_fully_covered(set, workers);
  st.covered = covered.size();
  if (!covered.empty()) {
    CacheOptions copts;
    copts.workers = workers;
    const Workspace base(set.without(covered), copts);
    std::vector<MinRadiusResult> res(covered.size());
    parallel_for(covered.size(), workers, [&](std::size_t k) {
      const Sample& s = set[covered[k]];
      MinRadiusOptions o;
      o.lower_bound = s.radius();
      o.original_sign = s.sign();
      o.mode = CircleMode::kAnyUncovered;
      res[k] = min_valid_radius_ex(s.center, base, o);
    });
    for (std::size_t k = 0; k < covered.size(); ++k) {
      out[covered[k]] = res[k].s;
      st.kept_original += res[k].kept_original ? 1 : 0;
      st.below_floor += res[k].below_floor ? 1 : 0;
    }
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RepairResult repair_pseudo_sdf(const SdfGrid& grid, int workers) {
  RepairResult r;
  const std::vector<double> v = repair_samples(grid.to_samples(), workers, &r.stats);
  r.repaired = grid;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == grid.values[i]) continue;
    r.changed.push_back({i, grid.values[i], v[i]});
    r.repaired.values[i] = v[i];
  }
  return r;
}

}  // namespace sdfgrow
