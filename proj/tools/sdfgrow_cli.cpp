// sdfgrow: command-line driver for validation, interpolation, refinement,
// reconstruction, repair and mesh metrics.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "sdfgrow/dos.hpp"
#include "sdfgrow/interp.hpp"
#include "sdfgrow/io.hpp"
#include "sdfgrow/parallel.hpp"
#include "sdfgrow/recon.hpp"
#include "sdfgrow/repair.hpp"
#include "sdfgrow/validity.hpp"

using namespace sdfgrow;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIoError = 2;

struct Common {
  int workers = default_workers();
  int raster_res = 0;
  double tol_geom = 1e-6;
  double tol_unique = 1e-9;
};

struct Input {
  bool is_grid = false;
  SdfGrid grid;
  SampleSet set;
};

Input read_input(const std::string& path, const Common& c) {
  std::ifstream probe(path);
  if (!probe) throw IoError("cannot open " + path + " for reading");
  std::string first;
  while (std::getline(probe, first) && (first.empty() || first[0] == '#')) {
  }
  probe.close();
  Input in;
  const Tolerances tol{c.tol_unique, c.tol_geom};
  if (first.rfind("SDFGRID", 0) == 0) {
    in.is_grid = true;
    in.grid = read_grid(path);
    in.set = in.grid.to_samples(tol);
  } else {
    in.set = read_scattered(path);
    in.set.set_tolerances(tol);
  }
  return in;
}

SdfGrid require_grid(const Input& in, const std::string& path) {
  if (!in.is_grid) throw InvalidInputError(path + " is not a grid file; this command needs an SDFGRID input");
  return in.grid;
}

// Parses "auto", "inf" or a number.
double parse_kappa(const std::string& s, int dim, std::size_t n) {
  if (s == "auto") return default_kappa(dim, n);
  if (s == "inf" || s == "none") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double k = std::stod(s, &used);
  if (used != s.size() || !(k > 0)) throw CLI::ValidationError("--kappa", "expected auto, inf or a positive number");
  return k;
}

int parse_tau(int tau, int dim, std::size_t n) { return tau < 0 ? default_tau(dim, n) : tau; }

// Points file: CSV with header "x,y" or "x,y,z".
std::vector<Vec3> read_points(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::vector<Vec3> pts;
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line == "x,y" || line == "x,y,z") {
        if ((line == "x,y,z") != (dim == 3)) throw ParseError(path + ":" + std::to_string(n) + ": dimension mismatch");
        continue;
      }
    }
    std::stringstream ss(line);
    Vec3 p;
    std::string tok;
    int a = 0;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0' || !std::isfinite(v) || a >= dim) {
        throw ParseError(path + ":" + std::to_string(n) + ": expected " + std::to_string(dim) + " finite coordinates");
      }
      p[static_cast<std::size_t>(a++)] = v;
    }
    if (a != dim) throw ParseError(path + ":" + std::to_string(n) + ": expected " + std::to_string(dim) + " coordinates");
    pts.push_back(p);
  }
  return pts;
}

void print_report(const ValidityReport& r, std::ostream& out) {
  if (r.valid) {
    out << "valid\n";
    return;
  }
  out << "invalid: " << r.violations.size() << " violation(s)\n";
  for (const Violation& v : r.violations) {
    out << to_string(v.kind);
    for (std::size_t i : v.indices) out << ' ' << i;
    out << '\n';
  }
}

template <class F>
void with_output(const std::string& path, F&& f) {
  if (path.empty() || path == "-") {
    f(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  f(out);
  if (!out.flush()) throw IoError("failed writing " + path);
}

Dos build_and_refine(const SdfGrid& grid, int tau_flag, const std::string& kappa_flag, const Common& c) {
  const std::size_t n = grid.cell_count();
  DosOptions o;
  o.tau = parse_tau(tau_flag, grid.dim, n);
  o.kappa = parse_kappa(kappa_flag, grid.dim, n);
  o.cache.raster_res = c.raster_res;
  o.cache.workers = c.workers;
  std::cerr << "tau = " << o.tau << (tau_flag < 0 ? " (default)" : "") << "\n";
  std::cerr << "kappa = " << o.kappa << (kappa_flag == "auto" ? (grid.dim == 2 ? " (default 4 n^(1/2))" : " (default 8 n^(1/3))") : "")
            << "\n";
  const auto t0 = std::chrono::steady_clock::now();
  Dos dos = build_dos(grid, o);
  RefineStats st;
  refine(dos, &st);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "culled " << dos.culled.size() << " of " << n << " input samples\n"
            << "new samples " << st.new_samples << ", fallbacks " << st.fallbacks << ", bound exceeded "
            << st.bound_exceeded << ", " << secs << " s\n";
  return dos;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent refinement, reconstruction and repair of discrete signed distance fields."};
  app.require_subcommand(1);
  app.footer(
      "Inputs are SDFGRID files or CSV samples (x,y,s or x,y,z,s). Exit codes: 0 success, 1 invalid or "
      "unrepairable input, 2 I/O, parse or usage error. SDFGROW_WORKERS sets the default worker count.");
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", common.workers, "Worker threads; 0 = all cores (default: SDFGROW_WORKERS or 0)")
        ->capture_default_str();
    sub->add_option("--raster-res", common.raster_res,
                    "Prefilter raster resolution; 0 = 10 n^(1/d) rounded up to a power of two, at least 64")
        ->capture_default_str();
    sub->add_option("--tol-geom", common.tol_geom, "Containment/tangency tolerance")->capture_default_str();
    sub->add_option("--tol-unique", common.tol_unique, "Point coincidence tolerance")->capture_default_str();
  };

  std::string in_path, out_path, points_path, report_path, band_path, mesh_a, mesh_b;
  int tau = -1;
  std::string kappa = "auto";
  double iso = 0.0;
  double max_radius = 0.0;
  bool min_mode = false;
  bool any_circles = false;
  std::size_t metric_samples = 10000;

  auto* validate = app.add_subcommand("validate", "Check a sample set for validity; exit 1 if invalid");
  validate->add_option("input", in_path, "Grid or CSV samples")->required();
  add_common(validate);

  auto* interpolate = app.add_subcommand("interpolate", "Consistent values at query points, each against the input");
  interpolate->add_option("input", in_path, "Grid or CSV samples")->required();
  interpolate->add_option("--points", points_path, "CSV of query points (header x,y or x,y,z)")->required();
  interpolate->add_option("-o,--output", out_path, "Output CSV (default stdout)");
  interpolate->add_flag("--min", min_mode, "Minimum valid value instead of the grow-to interpolant");
  interpolate->add_option("--max-radius", max_radius, "Largest candidate radius; 0 = 2 sqrt(d)")->capture_default_str();
  interpolate->add_flag("--any-circles", any_circles,
                        "Use partially uncovered intersection circles too (default: fully uncovered only)");
  add_common(interpolate);

  auto add_dos = [&](CLI::App* sub) {
    sub->add_option("--tau", tau, "Subdivision depth; -1 = 2 for 3D grids above 20^3, else 3")->capture_default_str();
    sub->add_option("--kappa", kappa, "Culling threshold: auto = 4 n^(1/2) in 2D, 8 n^(1/3) in 3D; inf disables")
        ->capture_default_str();
  };

  auto* refine_cmd = app.add_subcommand("refine", "Refine a grid; writes retained input plus new samples as CSV");
  refine_cmd->add_option("input", in_path, "SDFGRID file")->required();
  refine_cmd->add_option("-o,--output", out_path, "Output CSV (default stdout)");
  add_dos(refine_cmd);
  add_common(refine_cmd);

  auto* reconstruct = app.add_subcommand("reconstruct", "Refine, complete the narrow band and extract a mesh (OBJ)");
  reconstruct->add_option("input", in_path, "SDFGRID file")->required();
  reconstruct->add_option("-o,--output", out_path, "Output OBJ (default stdout)");
  reconstruct->add_option("--iso", iso, "Level set to extract")->capture_default_str();
  reconstruct->add_option("--band", band_path, "Also write the completed band samples as CSV");
  add_dos(reconstruct);
  add_common(reconstruct);

  auto* repair_cmd = app.add_subcommand("repair", "Repair a conservative pseudo-SDF grid");
  repair_cmd->add_option("input", in_path, "SDFGRID file")->required();
  repair_cmd->add_option("-o,--output", out_path, "Output grid (default stdout)");
  repair_cmd->add_option("--report", report_path, "CSV of changed samples (index,old,new); default stderr summary");
  add_common(repair_cmd);

  auto* metrics = app.add_subcommand("metrics", "Chamfer and approximate Hausdorff distance between two OBJ meshes");
  metrics->add_option("--mesh", mesh_a, "Mesh OBJ")->required();
  metrics->add_option("--ref", mesh_b, "Reference OBJ")->required();
  metrics->add_option("--samples", metric_samples, "Surface samples per mesh")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  try {
    if (*validate) {
      const Input in = read_input(in_path, common);
      const ValidityReport r = check_validity(in.set, common.workers);
      print_report(r, std::cout);
      return r.valid ? kOk : kInvalid;
    }
    if (*interpolate) {
      const Input in = read_input(in_path, common);
      const std::vector<Vec3> pts = read_points(points_path, in.set.dim());
      const ValidityReport r = check_validity(in.set, common.workers);
      if (!r.valid) {
        print_report(r, std::cerr);
        throw InvalidInputError(in_path + " is not a valid discrete SDF");
      }
      CacheOptions co;
      co.workers = common.workers;
      co.raster_res = common.raster_res;
      const Workspace ws(in.set, co);
      const double M = max_radius > 0 ? max_radius : default_max_radius(in.set.dim());
      const CircleMode mode = any_circles ? CircleMode::kAnyUncovered : CircleMode::kFullyUncovered;
      std::vector<double> vals(pts.size());
      parallel_for(pts.size(), common.workers, [&](std::size_t i) {
        vals[i] = min_mode ? min_valid_radius(pts[i], ws) : interpolate_sdf_to(pts[i], ws, M, mode);
      });
      std::vector<Sample> out;
      for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({pts[i], vals[i]});
      with_output(out_path, [&](std::ostream& os) { write_scattered(SampleSet(in.set.dim(), out), os); });
      return kOk;
    }
    if (*refine_cmd) {
      const SdfGrid grid = require_grid(read_input(in_path, common), in_path);
      const Dos dos = build_and_refine(grid, tau, kappa, common);
      with_output(out_path, [&](std::ostream& os) { write_scattered(dos.samples(), os); });
      return kOk;
    }
    if (*reconstruct) {
      const SdfGrid grid = require_grid(read_input(in_path, common), in_path);
      const Dos dos = build_and_refine(grid, tau, kappa, common);
      const NarrowBand band = complete_narrow_band(dos, common.workers, iso);
      const Mesh mesh = extract_mesh(band, iso, common.workers);
      std::cerr << "band " << band.size() << " samples (" << band.filled.size() << " filled), mesh "
                << mesh.vertices.size() << " vertices, " << mesh.elements.size() << " elements\n";
      for (const auto& h : mesh.holes) {
        std::cerr << "hole at marching cell " << h[0] << ' ' << h[1] << ' ' << h[2] << '\n';
      }
      if (!band_path.empty()) {
        std::vector<Sample> s;
        for (const auto& [k, v] : band.values()) {
          const auto p = band.unkey(k);
          s.push_back({band.point(p[0], p[1], p[2]), v});
        }
        std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.center < b.center; });
        write_scattered(SampleSet(grid.dim, std::move(s)), band_path);
      }
      with_output(out_path, [&](std::ostream& os) { write_obj(mesh, os); });
      return kOk;
    }
    if (*repair_cmd) {
      const SdfGrid grid = require_grid(read_input(in_path, common), in_path);
      const RepairResult r = repair_pseudo_sdf(grid, common.workers);
      std::cerr << "covered " << r.stats.covered << " of " << r.stats.samples << ", changed " << r.changed.size()
                << ", kept original " << r.stats.kept_original << ", below floor " << r.stats.below_floor << ", "
                << r.stats.seconds << " s\n";
      if (!report_path.empty()) {
        with_output(report_path, [&](std::ostream& os) {
          os << "index,old,new\n";
          char buf[96];
          for (const RepairChange& c : r.changed) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", c.index, c.old_value, c.new_value);
            os << buf;
          }
        });
      }
      with_output(out_path, [&](std::ostream& os) { write_grid(r.repaired, os); });
      return kOk;
    }
    if (*metrics) {
      const Mesh a = read_obj(mesh_a);
      const Mesh b = read_obj(mesh_b);
      if (a.dim != b.dim) throw InvalidInputError("meshes have different dimensions");
      char buf[64];
      std::snprintf(buf, sizeof buf, "chamfer %.9g\n", chamfer(a, b, metric_samples));
      std::cout << buf;
      std::snprintf(buf, sizeof buf, "hausdorff %.9g\n", hausdorff_approx(a, b, metric_samples));
      std::cout << buf;
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const NotRepairableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
