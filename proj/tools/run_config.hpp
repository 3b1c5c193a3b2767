#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acma/maximal.hpp"

namespace acma::cli {

/// Flat INI configuration. Every key has a default in the schema; unknown
/// sections or keys are ConfigError. Environment variables
/// ACMA_<SECTION>_<KEY> (upper case) override the file.
class RunConfig {
 public:
  static RunConfig load(const std::string& path);
  static RunConfig from_string(const std::string& text);
  static const std::map<std::string, std::map<std::string, std::string>>& schema();

  std::string text(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  long integer(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  SolverConfig solver() const;
  MaximalConfig maximal() const;
  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("run", "seed")); }

  /// Resolved values, for echoing into diagnostics.
  const std::map<std::string, std::map<std::string, std::string>>& values() const { return values_; }

 private:
  void apply_environment();
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace acma::cli
