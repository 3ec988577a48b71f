#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampcrit/field_model.hpp"
#include "ampcrit/path_functionals.hpp"
#include "ampcrit/solver.hpp"

namespace ampcrit {

// Configuration problems carry the offending line (0 when synthetic, e.g.
// a --set override).
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(const std::string& msg, int line_)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

// Flat sectioned key=value text. '#' starts a comment; keys are unique per
// section; every key must be consumed by the schema or the file is rejected
// (unknown keys are configuration mistakes, not extensions).
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text);

  // section.key=value, applied on top of the parsed entries (line 0).
  void apply_override(const std::string& assignment);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<double> get_doubles_or(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const;

  // Error if any parsed key was never consumed by a getter.
  void reject_unknown_keys() const;

  // Section -> key -> value snapshot (for manifests).
  std::map<std::string, std::map<std::string, std::string>> snapshot() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
  const Entry* find(const std::string& section, const std::string& key) const;
};

struct OptimizerConfig {
  int starts = 8;
  int max_iters = 200;
  double tol = 1e-10;
  int nystrom_k = 256;
  int sphere_resolution = 100;
  int time_slices = 256;
};

struct ExperimentConfig {
  int q = 1;
  Point probe{0.0, 0.0, 0.0};
  std::vector<double> lambda_grid;
  std::vector<double> radii;
  std::vector<double> rho_ladder;
  std::int64_t samples = 0;
  double lambda = 0.1;
  int axis = -1;  // -1: every monomial axis
  std::uint64_t sample_index = 0;
};

// Fully validated run configuration; constructing it builds the model and the
// solver parameters, so nothing downstream can start from a bad config.
struct RunConfig {
  FieldModel model;
  ComplexMass mass;
  double horizon = 1.0;
  double dt = 0.0;
  OptimizerConfig optimizer;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string output_dir;

  TimeGrid tgrid() const { return TimeGrid::make(horizon, optimizer.time_slices); }

  static RunConfig load(const std::string& path, const std::vector<std::string>& overrides = {});
  static RunConfig from_text(const std::string& text,
                             const std::vector<std::string>& overrides = {});

  std::map<std::string, std::map<std::string, std::string>> echo;  // manifest copy
};

}  // namespace ampcrit
