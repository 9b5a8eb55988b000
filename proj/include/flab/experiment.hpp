#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "flab/verification.hpp"

namespace flab {

inline constexpr const char* kFlabVersion = "0.1.0";

// Subsystem-fraction threshold below which the reduced-state bound decays
// with N: log2(3/2) / 2.
inline constexpr double kSubsystemFractionThreshold = 0.29248;

// Thrown for malformed or contradictory configuration input.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ObservableSpec {
  std::vector<int> sites{1};
  std::string axes{"z"};
};

// "model-b" with explicit coefficients, "random-model-b" with uniform draws
// from [lo, hi], or "ensemble" with a shape and uniform coefficient draws.
struct ModelSpec {
  std::string type{"random-model-b"};
  VectorXd h_x, h_z, coupling_zz;
  double lo = kDefaultSampleLo;
  double hi = kDefaultSampleHi;
  std::optional<EnsembleShape> ensemble;
};

struct ExperimentConfig {
  std::string experiment;
  int n_qubits = 0;
  int periods = 200;             // M
  int points_per_period = 32;    // K
  std::vector<int> subsystem{1};
  ObservableSpec observable;
  ModelSpec model;
  int samples = 20;
  double cluster_tol = kDefaultClusterTol;
  double ratio_tol = kDefaultRatioTol;
  std::uint64_t seed = 1;
  std::string out_dir = "flab-out";

  void validate() const;
  // true when |S| exceeds floor(0.29248 N); the run proceeds but the report
  // carries a theorem-condition warning
  bool subsystem_exceeds_threshold() const;
};

// Strict JSON parse: defaults filled, unknown keys rejected by name.
ExperimentConfig parse_config(const std::string& text);

// Canonical echo with every field present; parse(dump(config)) == config.
nlohmann::json config_to_json(const ExperimentConfig& config);

std::string config_hash(const ExperimentConfig& config);

// Runs the named experiment and writes manifest.json, report.json and the
// experiment's data files into out_dir (atomically, temp + rename).
// Returns 0 when all asserted bounds pass, 1 on a bound violation.
int run_experiment(const ExperimentConfig& config);

}  // namespace flab
