#include "acma/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace acma {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_error(line, "not a number: '" + s + "'");
  if (!std::isfinite(v)) parse_error(line, "non-finite value");
  return v;
}

long parse_long(const std::string& s, int line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_error(line, "not an integer: '" + s + "'");
  return v;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void export_field(const ScalarField& field, const std::string& path) {
  const GridDomain& g = field.grid();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  std::vector<std::string> lo, hi, counts;
  for (int a = 0; a < g.real_dim(); ++a) {
    lo.push_back(format_double(g.box().lo[a]));
    hi.push_back(format_double(g.box().hi[a]));
    counts.push_back(std::to_string(g.counts()[a]));
  }
  out << "# acma-field 1\n";
  out << "# n=" << g.complex_dim() << "\n";
  out << "# h=" << format_double(g.h()) << "\n";
  out << "# lo=" << join(lo) << "\n";
  out << "# hi=" << join(hi) << "\n";
  out << "# counts=" << join(counts) << "\n";
  out << "index";
  for (int p = 1; p <= g.complex_dim(); ++p) out << ",x" << p << ",y" << p;
  out << ",value,trace\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.active(i)) continue;
    Vec x = g.point(i);
    out << i;
    for (int a = 0; a < g.real_dim(); ++a) out << ',' << format_double(x[a]);
    out << ',' << format_double(field[i]) << ',';
    int b = g.band_slot(i);
    if (b >= 0 && field.has_trace()) out << format_double(field.trace()[static_cast<std::size_t>(b)]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

ScalarField import_field(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  const GridDomain& g = *grid;
  const int d = g.real_dim();
  ScalarField field(grid);
  std::vector<double> trace(g.band().size(), 0.0);
  std::vector<char> seen(g.size(), 0);
  std::size_t traced = 0;
  std::size_t rows = 0;
  bool header = false;
  std::string line;
  int lineno = 0;
  auto mismatch = [&](const std::string& what) { throw Error(ErrorCode::grid_mismatch, what + " (" + path + ")"); };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2);
      std::vector<std::string> vals = split(line.substr(eq + 1), ',');
      if (key == "n") {
        if (parse_long(vals.at(0), lineno) != g.complex_dim()) mismatch("dimension differs");
      } else if (key == "h") {
        if (parse_double(vals.at(0), lineno) != g.h()) mismatch("grid spacing differs");
      } else if (key == "lo" || key == "hi") {
        if (static_cast<int>(vals.size()) != d) mismatch("box dimension differs");
        const Vec& ref = key == "lo" ? g.box().lo : g.box().hi;
        for (int a = 0; a < d; ++a) {
          if (parse_double(vals[static_cast<std::size_t>(a)], lineno) != ref[a]) mismatch("box differs");
        }
      } else if (key == "counts") {
        if (static_cast<int>(vals.size()) != d) mismatch("box dimension differs");
        for (int a = 0; a < d; ++a) {
          if (parse_long(vals[static_cast<std::size_t>(a)], lineno) != g.counts()[a]) mismatch("grid counts differ");
        }
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> cols = split(line, ',');
    if (static_cast<int>(cols.size()) != d + 3) parse_error(lineno, "expected " + std::to_string(d + 3) + " columns");
    long idx = parse_long(cols[0], lineno);
    if (idx < 0 || static_cast<std::size_t>(idx) >= g.size()) parse_error(lineno, "index out of range");
    std::size_t i = static_cast<std::size_t>(idx);
    if (!g.active(i)) mismatch("row " + std::to_string(lineno) + " names an inactive point");
    if (seen[i]) parse_error(lineno, "duplicate point");
    seen[i] = 1;
    ++rows;
    Vec x = g.point(i);
    for (int a = 0; a < d; ++a) {
      if (parse_double(cols[static_cast<std::size_t>(a + 1)], lineno) != x[a]) mismatch("coordinates differ on line " + std::to_string(lineno));
    }
    field[i] = parse_double(cols[static_cast<std::size_t>(d + 1)], lineno);
    const std::string& tr = cols[static_cast<std::size_t>(d + 2)];
    if (!tr.empty()) {
      int b = g.band_slot(i);
      if (b < 0) parse_error(lineno, "trace on a non-band point");
      trace[static_cast<std::size_t>(b)] = parse_double(tr, lineno);
      ++traced;
    }
  }
  if (!header) parse_error(lineno, "missing column header");
  std::size_t active = g.interior().size() + g.band().size();
  if (rows != active) mismatch("file has " + std::to_string(rows) + " points, grid has " + std::to_string(active));
  if (traced == g.band().size() && traced > 0) {
    field.trace() = std::move(trace);
  } else if (traced != 0) {
    parse_error(lineno, "trace given on only part of the band");
  }
  return field;
}

}  // namespace acma
