#include "sdfgrow/dos.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "sdfgrow/interp.hpp"
#include "sdfgrow/parallel.hpp"
#include "sdfgrow/validity.hpp"

namespace sdfgrow {

int default_tau(int dim, std::size_t n) { return dim == 3 && n > 20 * 20 * 20 ? 2 : 3; }

double default_kappa(int dim, std::size_t n) {
  const double x = static_cast<double>(n);
  return dim == 2 ? 4.0 * std::sqrt(x) : 8.0 * std::cbrt(x);
}

bool is_interesting(double value, double diagonal) { return std::abs(value) < 0.5 * diagonal; }

double root_max_radius(double value, double diagonal) {
  return std::max(0.5 * diagonal + std::abs(value), 0.75 * diagonal);
}

double child_max_radius(double parent_value, double child_diagonal) {
  return std::max(std::abs(parent_value) + 0.5 * child_diagonal, child_diagonal);
}

double covered_ratio(const Vec3& lo, const Vec3& hi, const SphereView& view) {
  const int dim = view.dim();
  const double tol = view.tol().geom;
  const Vec3 mid = (lo + hi) * 0.5;
  std::vector<std::size_t> near;
  view.visit_near(mid, 0.5 * distance(lo, hi), [&](std::size_t j) {
    near.push_back(j);
    return true;
  });
  const int nz = dim == 3 ? 8 : 1;
  int inside = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < 8; ++j) {
      for (int i = 0; i < 8; ++i) {
        const Vec3 x{lo.x + (hi.x - lo.x) * (i + 0.5) / 8.0, lo.y + (hi.y - lo.y) * (j + 0.5) / 8.0,
                     dim == 3 ? lo.z + (hi.z - lo.z) * (k + 0.5) / 8.0 : 0.0};
        for (std::size_t s : near) {
          const Sample& b = view.at(s);
          if (distance(x, b.center) < b.radius() - tol) {
            ++inside;
            break;
          }
        }
      }
    }
  }
  return static_cast<double>(inside) / (64.0 * nz);
}

double covered_ratio(const DosCell& cell, const SphereView& view) { return covered_ratio(cell.lo, cell.hi, view); }

std::vector<std::size_t> cull_to_kappa(std::span<const Sample> spheres,
                                       std::vector<std::vector<std::uint32_t>>& relevant, double kappa) {
  std::vector<std::size_t> removed;
  if (!(kappa < std::numeric_limits<double>::infinity())) return removed;
  const std::size_t cells = relevant.size();
  std::vector<std::vector<std::uint32_t>> cells_of(spheres.size());
  std::vector<std::size_t> count(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    auto& list = relevant[c];
    std::sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double ra = spheres[a].radius();
      const double rb = spheres[b].radius();
      return ra != rb ? ra > rb : a < b;
    });
    list.erase(std::unique(list.begin(), list.end()), list.end());
    count[c] = list.size();
    for (std::uint32_t s : list) cells_of[s].push_back(static_cast<std::uint32_t>(c));
  }

  // Max-heap on (count, -cell); stale entries are skipped on pop.
  using Entry = std::pair<std::size_t, std::ptrdiff_t>;
  std::priority_queue<Entry> heap;
  for (std::size_t c = 0; c < cells; ++c) heap.push({count[c], -static_cast<std::ptrdiff_t>(c)});
  std::vector<char> gone(spheres.size(), 0);
  std::vector<std::size_t> cursor(cells, 0);
  while (!heap.empty()) {
    const auto [n, neg] = heap.top();
    heap.pop();
    const auto c = static_cast<std::size_t>(-neg);
    if (n != count[c]) continue;
    if (static_cast<double>(n) <= kappa) break;
    auto& list = relevant[c];
    while (gone[list[cursor[c]]]) ++cursor[c];
    const std::uint32_t victim = list[cursor[c]];
    gone[victim] = 1;
    removed.push_back(victim);
    for (std::uint32_t other : cells_of[victim]) {
      --count[other];
      heap.push({count[other], -static_cast<std::ptrdiff_t>(other)});
    }
  }
  for (auto& list : relevant) {
    list.erase(std::remove_if(list.begin(), list.end(), [&](std::uint32_t s) { return gone[s] != 0; }), list.end());
    std::sort(list.begin(), list.end());
  }
  std::sort(removed.begin(), removed.end());
  return removed;
}

std::vector<std::size_t> cull_to_kappa(std::span<const Sample> spheres, std::vector<DosCell>& cells, double kappa) {
  std::vector<std::vector<std::uint32_t>> lists;
  lists.reserve(cells.size());
  for (DosCell& c : cells) lists.push_back(std::move(c.relevant));
  auto removed = cull_to_kappa(spheres, lists, kappa);
  for (std::size_t k = 0; k < cells.size(); ++k) cells[k].relevant = std::move(lists[k]);
  return removed;
}

Dos build_dos(const SdfGrid& grid, const DosOptions& opts) {
  const SampleSet input = grid.to_samples();
  const int workers = opts.cache.workers;
  const ValidityReport report = check_validity(input, workers);
  if (!report.valid) {
    std::ostringstream msg;
    msg << "input grid is not a valid discrete SDF (" << report.violations.size() << " violations)";
    for (std::size_t k = 0; k < std::min<std::size_t>(report.violations.size(), 10); ++k) {
      msg << "\n  " << to_string(report.violations[k].kind);
      for (std::size_t i : report.violations[k].indices) msg << ' ' << i;
    }
    throw InvalidInputError(msg.str());
  }

  Dos dos;
  dos.grid = grid;
  dos.workers = workers;
  dos.kappa = opts.kappa < 0 ? default_kappa(grid.dim, input.size()) : opts.kappa;
  dos.tau = opts.tau < 0 ? default_tau(grid.dim, input.size()) : opts.tau;

  const BoxTree tree = make_sphere_tree(input.samples(), input.dim());
  const SphereView view(input.samples(), input.dim(), input.tol(), &tree);
  std::vector<DosCell> roots(input.size());
  const double h = grid.spacing;
  const Vec3 half{0.5 * h, 0.5 * h, grid.dim == 3 ? 0.5 * h : 0.0};
  parallel_for(input.size(), workers, [&](std::size_t i) {
    DosCell& c = roots[i];
    c.center = input[i];
    c.lo = c.center.center - half;
    c.hi = c.center.center + half;
    c.index = grid.coords(i);
    c.interesting = is_interesting(c.center.value, c.diagonal());
    if (!c.interesting) return;
    const double R = root_max_radius(c.center.value, c.diagonal());
    view.visit_near(c.center.center, R, [&](std::size_t j) {
      if (distance(c.center.center, input[j].center) < R + input[j].radius()) {
        c.relevant.push_back(static_cast<std::uint32_t>(j));
      }
      return true;
    });
  });

  dos.culled = cull_to_kappa(input.samples(), roots, dos.kappa);
  SampleSet kept_set = input.without(dos.culled, &dos.retained);
  std::vector<std::size_t> to_kept(input.size(), kNoSample);
  for (std::size_t k = 0; k < dos.retained.size(); ++k) to_kept[dos.retained[k]] = k;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    roots[i].sample_index = to_kept[i];
    for (std::uint32_t& r : roots[i].relevant) r = static_cast<std::uint32_t>(to_kept[r]);
  }
  dos.ws = std::make_unique<Workspace>(std::move(kept_set), opts.cache);
  dos.levels.push_back(std::move(roots));
  return dos;
}

namespace {

std::array<int, 3> level_res(const SdfGrid& g, int depth) {
  return {g.res[0] << depth, g.res[1] << depth, g.res[2] << (g.dim == 3 ? depth : 0)};
}

std::uint64_t cell_key(const std::array<int, 3>& idx, const std::array<int, 3>& res) {
  return (static_cast<std::uint64_t>(idx[2]) * static_cast<std::uint64_t>(res[1]) +
          static_cast<std::uint64_t>(idx[1])) *
             static_cast<std::uint64_t>(res[0]) +
         static_cast<std::uint64_t>(idx[0]);
}

// Subdivides one cell and assigns its children in ascending covered ratio.
void subdivide(Dos& dos, const DosCell& parent, std::vector<DosCell>& out, RefineStats& st) {
  const int dim = dos.grid.dim;
  const int nchild = dim == 3 ? 8 : 4;
  const Vec3 mid = (parent.lo + parent.hi) * 0.5;
  const std::array<int, 3> res = level_res(dos.grid, parent.depth + 1);
  std::vector<DosCell> kids(static_cast<std::size_t>(nchild));
  {
    const SphereView view = dos.ws->view();
    for (int c = 0; c < nchild; ++c) {
      DosCell& k = kids[static_cast<std::size_t>(c)];
      const int bx = c & 1, by = (c >> 1) & 1, bz = (c >> 2) & 1;
      k.lo = {bx ? mid.x : parent.lo.x, by ? mid.y : parent.lo.y, bz ? mid.z : parent.lo.z};
      k.hi = {bx ? parent.hi.x : mid.x, by ? parent.hi.y : mid.y, bz ? parent.hi.z : mid.z};
      k.depth = parent.depth + 1;
      k.index = {parent.index[0] * 2 + bx, parent.index[1] * 2 + by, dim == 3 ? parent.index[2] * 2 + bz : 0};
      k.center.center = (k.lo + k.hi) * 0.5;
      k.covered_ratio = covered_ratio(k, view);
    }
  }
  std::sort(kids.begin(), kids.end(), [&](const DosCell& a, const DosCell& b) {
    if (a.covered_ratio != b.covered_ratio) return a.covered_ratio < b.covered_ratio;
    return cell_key(a.index, res) < cell_key(b.index, res);
  });
  const double tol = dos.ws->tol().geom;
  for (DosCell& k : kids) {
    const double M = child_max_radius(parent.center.value, k.diagonal());
    InterpolationStats is;
    const double s = interpolate_sdf_to(k.center.center, *dos.ws, M, CircleMode::kFullyUncovered, &is);
    st.validations += is.validations;
    if (is.fell_back) ++st.fallbacks;
    if (std::abs(s) > M + tol) ++st.bound_exceeded;
    k.center.value = s;
    k.interesting = is_interesting(s, k.diagonal());
    {
      const SphereView view = dos.ws->view();
      view.visit_near(k.center.center, M, [&](std::size_t j) {
        k.relevant.push_back(static_cast<std::uint32_t>(j));
        return true;
      });
    }
    k.sample_index = dos.ws->append(k.center);
    dos.new_samples.push_back(k.center);
    ++st.new_samples;
    out.push_back(std::move(k));
  }
}

}  // namespace

std::vector<Sample> refine(Dos& dos, int tau, RefineStats* stats) {
  RefineStats local;
  RefineStats& st = stats ? *stats : local;
  const std::size_t first_new = dos.new_samples.size();
  const int dim = dos.grid.dim;

  while (dos.depth() < tau) {
    const int depth = dos.depth();
    const std::vector<DosCell>& cells = dos.levels.back();
    const std::array<int, 3> res = level_res(dos.grid, depth);
    std::vector<std::size_t> ids;
    std::unordered_map<std::uint64_t, std::size_t> slot;  // cell key -> position in ids
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!cells[c].interesting) continue;
      slot.emplace(cell_key(cells[c].index, res), ids.size());
      ids.push_back(c);
    }
    std::vector<double> ratio(ids.size());
    {
      const SphereView view = dos.ws->view();
      parallel_for(ids.size(), dos.workers, [&](std::size_t k) { ratio[k] = covered_ratio(cells[ids[k]], view); });
    }

    std::vector<DosCell> next;
    std::vector<char> done(ids.size(), 0);
    using Entry = std::tuple<double, std::uint64_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::size_t remaining = ids.size();
    while (remaining > 0) {
      // Seed (or reseed a new component) at the lowest-ratio unvisited cell.
      std::size_t seed = ids.size();
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (done[k]) continue;
        if (seed == ids.size() || ratio[k] < ratio[seed] ||
            (ratio[k] == ratio[seed] && cell_key(cells[ids[k]].index, res) < cell_key(cells[ids[seed]].index, res))) {
          seed = k;
        }
      }
      queue.push({ratio[seed], cell_key(cells[ids[seed]].index, res), seed});
      while (!queue.empty()) {
        const auto [r, key, k] = queue.top();
        queue.pop();
        if (done[k]) continue;
        done[k] = 1;
        --remaining;
        const DosCell parent = cells[ids[k]];
        subdivide(dos, parent, next, st);

        const SphereView view = dos.ws->view();
        for (int axis = 0; axis < dim; ++axis) {
          for (int step : {-1, 1}) {
            std::array<int, 3> nb = parent.index;
            nb[static_cast<std::size_t>(axis)] += step;
            if (nb[static_cast<std::size_t>(axis)] < 0 ||
                nb[static_cast<std::size_t>(axis)] >= res[static_cast<std::size_t>(axis)]) {
              continue;
            }
            const auto it = slot.find(cell_key(nb, res));
            if (it == slot.end() || done[it->second]) continue;
            ratio[it->second] = covered_ratio(cells[ids[it->second]], view);
            queue.push({ratio[it->second], it->first, it->second});
          }
        }
      }
    }
    dos.levels.push_back(std::move(next));
  }
  return {dos.new_samples.begin() + static_cast<std::ptrdiff_t>(first_new), dos.new_samples.end()};
}

std::vector<Sample> refine(Dos& dos, RefineStats* stats) { return refine(dos, dos.tau, stats); }

}  // namespace sdfgrow
