#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "egoe/duality.hpp"
#include "egoe/ensemble.hpp"
#include "egoe/fock.hpp"

namespace egoe {

enum class RunMode { simulate, ingest };

// Full run description, parsed from an INI-style key = value file with
// [section] headers. Every field has a usable default; validate() enforces the
// module preconditions before any compute starts.
struct RunConfig {
  SpaceSpec space{8, 4};

  std::string mean_field_kind = "default";  // "default" | "explicit"
  std::vector<double> mean_field_epsilon;   // used when kind == "explicit"

  double v_scale = 1.0;
  int members = 10;
  std::uint64_t master_seed = 1;
  std::string lambda_spec = "logspace:0.01:1.0:16";
  std::vector<double> lambdas;  // resolved from lambda_spec

  // strength-function histogram and observable curves
  int bins = 51;
  double e_lo = -3.0;
  double e_hi = 3.0;
  double k_halfwidth = 0.1;
  int curve_points = 61;
  double curve_window = 0.2;

  // duality scan
  std::vector<int> duality_m_values = {4, 5, 6, 7};
  bool half_filling = true;  // N = 2m; otherwise fixed_n below
  int fixed_n = 14;
  DualObservable crossing_observable = DualObservable::xi2;
  double central_halfwidth = 0.1;

  std::string out_dir = "out";
  RunMode mode = RunMode::simulate;
  std::string hamiltonian_file;  // ingest inputs
  std::string strength_file;

  MeanField mean_field() const;
  void validate() const;

  // canonical key=value echo used for hashing and the JSON summary
  std::map<std::string, std::string> key_values() const;
};

// "logspace:<min>:<max>:<count>" or a comma-separated explicit list.
std::vector<double> parse_lambda_grid(const std::string& spec);

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// FNV-1a over the canonical key=value echo; stable across runs and platforms.
std::string config_hash(const RunConfig& config);

}  // namespace egoe
