#include "sdfgrow/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace sdfgrow {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

template <class F>
void write_file(const std::string& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

// Line reader that tracks line numbers and skips blank and comment lines.
class Lines {
 public:
  Lines(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(name_ + ":" + std::to_string(number_) + ": " + what);
  }

  double number(const std::string& token) const {
    const char* s = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') fail("expected a number, got '" + token + "'");
    if (!std::isfinite(v)) fail("non-finite value '" + token + "'");
    return v;
  }

  int integer(const std::string& token) const {
    const double v = number(token);
    if (v != std::floor(v) || v < 1 || v > 1 << 24) fail("expected a positive integer, got '" + token + "'");
    return static_cast<int>(v);
  }

  std::size_t line_number() const { return number_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t number_ = 0;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  if (sep == ' ') {
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Reads "key v1 .. vn" and returns the values.
std::vector<std::string> keyed(Lines& lines, const std::string& key, std::size_t count) {
  std::string line;
  if (!lines.next(line)) lines.fail("unexpected end of file, expected '" + key + "'");
  auto t = split(line, ' ');
  if (t.empty() || t[0] != key) lines.fail("expected '" + key + "'");
  if (t.size() != count + 1) {
    lines.fail("'" + key + "' takes " + std::to_string(count) + " values, got " + std::to_string(t.size() - 1));
  }
  t.erase(t.begin());
  return t;
}

}  // namespace

SdfGrid read_grid(std::istream& in, const std::string& name) {
  Lines lines(in, name);
  std::string line;
  if (!lines.next(line) || split(line, ' ') != std::vector<std::string>{"SDFGRID", "1"}) {
    lines.fail("expected header 'SDFGRID 1'");
  }
  SdfGrid g;
  const auto d = keyed(lines, "dim", 1);
  g.dim = lines.integer(d[0]);
  if (g.dim != 2 && g.dim != 3) lines.fail("dim must be 2 or 3");
  const auto r = keyed(lines, "res", static_cast<std::size_t>(g.dim));
  g.res = {1, 1, 1};
  for (int a = 0; a < g.dim; ++a) g.res[static_cast<std::size_t>(a)] = lines.integer(r[static_cast<std::size_t>(a)]);
  const auto o = keyed(lines, "origin", static_cast<std::size_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) g.origin[static_cast<std::size_t>(a)] = lines.number(o[static_cast<std::size_t>(a)]);
  g.spacing = lines.number(keyed(lines, "spacing", 1)[0]);
  if (!(g.spacing > 0)) lines.fail("spacing must be positive");
  keyed(lines, "values", 0);
  const std::size_t expected = g.cell_count();
  g.values.reserve(expected);
  while (lines.next(line)) {
    for (const std::string& t : split(line, ' ')) {
      if (g.values.size() == expected) lines.fail("more than " + std::to_string(expected) + " values");
      g.values.push_back(lines.number(t));
    }
  }
  if (g.values.size() != expected) {
    lines.fail("expected " + std::to_string(expected) + " values, got " + std::to_string(g.values.size()));
  }
  return g;
}

SdfGrid read_grid(const std::string& path) {
  auto in = open_in(path);
  return read_grid(in, path);
}

void write_grid(const SdfGrid& g, std::ostream& out) {
  g.check();
  out << "SDFGRID 1\ndim " << g.dim << "\nres";
  for (int a = 0; a < g.dim; ++a) out << ' ' << g.res[static_cast<std::size_t>(a)];
  out << "\norigin";
  for (int a = 0; a < g.dim; ++a) out << ' ' << fmt(g.origin[static_cast<std::size_t>(a)]);
  out << "\nspacing " << fmt(g.spacing) << "\nvalues\n";
  for (double v : g.values) out << fmt(v) << '\n';
}

void write_grid(const SdfGrid& grid, const std::string& path) {
  grid.check();
  write_file(path, [&](std::ostream& out) { write_grid(grid, out); });
}

SampleSet read_scattered(std::istream& in, const std::string& name) {
  Lines lines(in, name);
  std::string line;
  if (!lines.next(line)) lines.fail("missing header 'x,y,s' or 'x,y,z,s'");
  const auto header = split(line, ',');
  int dim = 0;
  if (header == std::vector<std::string>{"x", "y", "s"}) dim = 2;
  if (header == std::vector<std::string>{"x", "y", "z", "s"}) dim = 3;
  if (dim == 0) lines.fail("expected header 'x,y,s' or 'x,y,z,s'");
  std::vector<Sample> s;
  while (lines.next(line)) {
    const auto t = split(line, ',');
    if (t.size() != static_cast<std::size_t>(dim) + 1) {
      lines.fail("expected " + std::to_string(dim + 1) + " columns, got " + std::to_string(t.size()));
    }
    Sample x;
    for (int a = 0; a < dim; ++a) x.center[static_cast<std::size_t>(a)] = lines.number(t[static_cast<std::size_t>(a)]);
    x.value = lines.number(t.back());
    s.push_back(x);
  }
  return SampleSet(dim, std::move(s));
}

SampleSet read_scattered(const std::string& path) {
  auto in = open_in(path);
  return read_scattered(in, path);
}

void write_scattered(const SampleSet& set, std::ostream& out) {
  out << (set.dim() == 3 ? "x,y,z,s\n" : "x,y,s\n");
  for (const Sample& s : set.samples()) {
    for (int a = 0; a < set.dim(); ++a) out << fmt(s.center[static_cast<std::size_t>(a)]) << ',';
    out << fmt(s.value) << '\n';
  }
}

void write_scattered(const SampleSet& set, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_scattered(set, out); });
}

void write_spheres(const SampleSet& set, const std::string& path) { write_scattered(set, path); }

void write_obj(const Mesh& m, std::ostream& out) {
  for (const Vec3& v : m.vertices) {
    out << "v " << fmt(v.x) << ' ' << fmt(v.y) << ' ' << (m.dim == 3 ? fmt(v.z) : "0") << '\n';
  }
  for (const auto& e : m.elements) {
    if (m.dim == 3) {
      out << "f " << e[0] + 1 << ' ' << e[1] + 1 << ' ' << e[2] + 1 << '\n';
    } else {
      out << "l " << e[0] + 1 << ' ' << e[1] + 1 << '\n';
    }
  }
}

void write_obj(const Mesh& mesh, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_obj(mesh, out); });
}

Mesh read_obj(std::istream& in, const std::string& name) {
  Lines lines(in, name);
  Mesh m;
  m.dim = 3;
  bool lines_seen = false, faces_seen = false, nonzero_z = false;
  std::string line;
  while (lines.next(line)) {
    const auto t = split(line, ' ');
    if (t[0] == "v") {
      if (t.size() < 4) lines.fail("vertex needs 3 coordinates");
      const Vec3 v{lines.number(t[1]), lines.number(t[2]), lines.number(t[3])};
      nonzero_z = nonzero_z || v.z != 0.0;
      m.vertices.push_back(v);
    } else if (t[0] == "f" || t[0] == "l") {
      const std::size_t n = t[0] == "f" ? 3 : 2;
      if (t.size() != n + 1) lines.fail("'" + t[0] + "' takes " + std::to_string(n) + " indices");
      std::array<std::uint32_t, 3> e{0, 0, 0};
      for (std::size_t k = 0; k < n; ++k) {
        // Drop texture/normal references ("7/1/3").
        const double idx = lines.number(t[k + 1].substr(0, t[k + 1].find('/')));
        if (idx < 1 || idx > static_cast<double>(m.vertices.size()) || idx != std::floor(idx)) {
          lines.fail("vertex index " + t[k + 1] + " out of range");
        }
        e[k] = static_cast<std::uint32_t>(idx - 1);
      }
      m.elements.push_back(e);
      (n == 3 ? faces_seen : lines_seen) = true;
    }
  }
  if (lines_seen && faces_seen) lines.fail("mixed line and face elements");
  if (lines_seen || (!faces_seen && !nonzero_z)) m.dim = 2;
  return m;
}

Mesh read_obj(const std::string& path) {
  auto in = open_in(path);
  return read_obj(in, path);
}

}  // namespace sdfgrow
