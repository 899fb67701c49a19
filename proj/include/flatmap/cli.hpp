#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests can drive it with in-memory streams.

#include "flatmap/io.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flatmap::cli {

enum ExitCode : int { Ok = 0, ConfigFailure = 1, PrecisionFailure = 2, VerifyFailure = 3 };

struct TuningConfig {
  TuningParameter parameter = TuningParameter::X2;
  bool auto_bracket = false;  // scan [x3 1e-6, x3 (1 - 1e-6)] for a sign change
  Real lo, hi;
  int target_depth = 0;
  int margin = 2;
  int scan_samples = 0;  // > 0: search the bracket for a sign change first
  int refine_rounds = 0;
  int refine_level = 0;
  int refine_target = 0;
};

struct ScanAxis {
  double min = 1, max = 1, step = 1;
  std::vector<double> points() const;
};

/// One map to run, with its optional tuning block.
struct MapRun {
  std::string name = "map";
  MapX<Real> map;
  std::optional<TuningConfig> tuning;
};

struct ExperimentConfig {
  unsigned precision = 256;
  int depth = 8;
  int digits = 17;
  std::optional<MapRun> run;
  HorizonPolicy classification;
  std::optional<ScanAxis> scan_l1, scan_l2;
  std::vector<int> dimension_depths{4, 5, 6, 7, 8};
  int dimension_scales = 16;
  std::vector<MapRun> dimension_runs;
  int verify_samples = 100;
  Real verify_tol;
  bool verify_corrupt = false;
  int property_samples = 32;
  std::vector<std::pair<std::string, std::string>> outputs;

  std::optional<std::string> output(const std::string& key) const;
};

struct Overrides {
  std::optional<unsigned> precision;
  std::optional<int> depth;
};

/// Reads precision first and installs it, then parses every number at that precision.
ExperimentConfig parse_config(const io::json& j, const Overrides& o = {});

/// Applies tuning (and template refinement) if the run asks for it.
MapX<Real> prepare_map(const MapRun& run, const PrecisionPolicy& policy);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatmap::cli
