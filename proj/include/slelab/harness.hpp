#pragma once

// Experiment orchestration: JSON configuration, per-sample substreams,
// a bounded worker pool, persistence and resumable reductions.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slelab/estimators.hpp"

namespace slelab {

enum class ExperimentKind { HitProb, Exponent, MinkMoments, BoundCheck, Integral };

const char* to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::HitProb;
  double kappa = 8.0 / 3.0;
  std::vector<Complex> points;
  // hit-prob / bound-check: one radius per point. exponent: the radius
  // list, applied to every point. mink-moments: the r refinement list.
  std::vector<double> radii;
  Rect domain{-1.0, 1.0, 0.2, 1.2};
  int n_max = 3;  // moment order (mink-moments) or n (integral)
  std::size_t n_samples = 1000;
  SimConfig sim;
  std::uint64_t seed = 1;
  std::string output_dir;  // empty: $SLELAB_OUTPUT_DIR or "slelab-out"
  unsigned workers = 1;
  bool reproducible = true;  // deterministic reduction order
};

/// Parses a config document; missing fields take their defaults.
ExperimentConfig config_from_json(const std::string& text);
/// Canonical JSON with every default materialized.
std::string config_to_json(const ExperimentConfig& cfg);
/// FNV-1a of the canonical JSON without n_samples, workers and output_dir.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// Checks every field against the owning module before any simulation.
/// Throws Error (InvalidArgument or Resolution).
void validate_config(const ExperimentConfig& cfg);

/// Resolves the output directory (config, then $SLELAB_OUTPUT_DIR, then
/// "slelab-out").
std::string output_directory(const ExperimentConfig& cfg);

struct EstimandRecord {
  std::string name;
  std::string params;
  EstimateResult result;
  std::string error;  // empty on success
};

struct RunReport {
  std::string version;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  std::size_t n_samples = 0;
  std::vector<EstimandRecord> estimands;
  std::string output_dir;
  bool ok() const;
};

/// Runs all estimands of the experiment and writes config.json,
/// manifest.json and results.csv into the output directory. Per-estimand
/// failures are recorded in the manifest; check RunReport::ok().
RunReport run_experiment(const ExperimentConfig& cfg);

/// Extends a finished run in `dir` to `n_samples` without re-simulating
/// completed substreams. When `expected` is given its hash must match the
/// stored one (ErrorCode::ConfigMismatch otherwise).
RunReport resume_experiment(const std::string& dir, std::size_t n_samples,
                            const ExperimentConfig* expected = nullptr);

/// Deterministic seed for estimand `k` of a run with master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

/// 12 significant digits, the precision used for printed output.
std::string format_number(double x);

}  // namespace slelab
