#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace acma::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::config_error, what); }

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

RunConfig parse(std::istream& in, const std::string& origin);

}  // namespace

const std::map<std::string, std::map<std::string, std::string>>& RunConfig::schema() {
  static const std::map<std::string, std::map<std::string, std::string>> s = {
      {"run", {{"seed", "1"}}},
      {"domain",
       {{"shape", "ball"}, {"radius", "1"}, {"semi_axes", ""}, {"n", "2"}, {"box_half_width", "1.25"}, {"h", "0.125"}}},
      {"structure", {{"family", "standard"}, {"epsilon", "0"}}},
      {"data", {{"f", "one"}, {"phi", "zero"}, {"exact", ""}}},
      {"solver",
       {{"tol", "1e-8"},
        {"max_newton", "60"},
        {"damping", "0.5"},
        {"margin_floor", "0"},
        {"regularization_delta", "0"},
        {"delta_schedule", ""},
        {"linear_tol", "1e-2"},
        {"max_linear", "4000"},
        {"initial_damping", ""}}},
      {"maximal",
       {{"schedule", "2,4,8,16,32"}, {"probe_trials", "100"}, {"fj_probes", "25"}, {"cover_balls", "4"}, {"probe_tau", ""}}},
      {"verify", {{"input", ""}}},
      {"disks", {{"field", "normsq"}, {"point", ""}, {"samples", "16"}, {"radius", "0.2"}, {"tol", "1e-10"}}},
      {"bench", {{"h_list", "0.25,0.125,0.0625"}}},
  };
  return s;
}

namespace {

RunConfig parse(std::istream& in, const std::string& origin) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    config_error(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg = RunConfig::from_string("");
  const auto& schema = RunConfig::schema();
  for (const auto& [section, body] : tree) {
    auto sec = schema.find(section);
    if (sec == schema.end()) config_error(origin + ": unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) config_error(origin + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!sec->second.count(key)) config_error(origin + ": unknown key '" + key + "' in [" + section + "]");
      cfg.set(section, key, value.data());
    }
  }
  return cfg;
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text) {
  if (!text.empty()) {
    std::istringstream in(text);
    RunConfig cfg = parse(in, "<string>");
    cfg.apply_environment();
    return cfg;
  }
  RunConfig cfg;
  cfg.values_ = schema();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path);
  RunConfig cfg = parse(in, path);
  cfg.apply_environment();
  return cfg;
}

void RunConfig::apply_environment() {
  for (auto& [section, keys] : values_) {
    for (auto& [key, value] : keys) {
      if (const char* env = std::getenv(("ACMA_" + upper(section) + "_" + upper(key)).c_str())) value = env;
    }
  }
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  auto sec = values_.find(section);
  if (sec == values_.end() || !sec->second.count(key)) config_error("unknown key " + section + "." + key);
  sec->second[key] = value;
}

std::string RunConfig::text(const std::string& section, const std::string& key) const {
  auto sec = values_.find(section);
  if (sec == values_.end() || !sec->second.count(key)) config_error("unknown key " + section + "." + key);
  return sec->second.at(key);
}

double RunConfig::real(const std::string& section, const std::string& key) const {
  std::string s = text(section, key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    config_error(section + "." + key + ": expected a number, got '" + s + "'");
  }
}

long RunConfig::integer(const std::string& section, const std::string& key) const {
  std::string s = text(section, key);
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    config_error(section + "." + key + ": expected an integer, got '" + s + "'");
  }
}

bool RunConfig::flag(const std::string& section, const std::string& key) const {
  std::string s = text(section, key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  config_error(section + "." + key + ": expected true or false, got '" + s + "'");
}

std::vector<double> RunConfig::reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error(section + "." + key + ": bad list entry '" + item + "'");
    }
  }
  return out;
}

SolverConfig RunConfig::solver() const {
  SolverConfig c;
  c.tol = real("solver", "tol");
  c.max_newton = static_cast<int>(integer("solver", "max_newton"));
  c.damping = real("solver", "damping");
  c.margin_floor = real("solver", "margin_floor");
  c.regularization_delta = real("solver", "regularization_delta");
  c.delta_schedule = reals("solver", "delta_schedule");
  c.linear_tol = real("solver", "linear_tol");
  c.max_linear = static_cast<int>(integer("solver", "max_linear"));
  c.initial_damping = reals("solver", "initial_damping");
  if (!(c.tol > 0.0)) config_error("solver.tol must be positive");
  if (!(c.damping > 0.0 && c.damping < 1.0)) config_error("solver.damping must lie in (0, 1)");
  return c;
}

MaximalConfig RunConfig::maximal() const {
  MaximalConfig m;
  m.solver = solver();
  m.schedule.clear();
  for (double k : reals("maximal", "schedule")) {
    if (k != std::floor(k) || k <= 0) config_error("maximal.schedule entries must be positive integers");
    m.schedule.push_back(static_cast<int>(k));
  }
  return m;
}

}  // namespace acma::cli
