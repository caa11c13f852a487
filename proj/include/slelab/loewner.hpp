#pragma once

// Chordal Loewner evolution with a piecewise-constant driver. Each step of
// length dt with driver value W is the exact vertical-slit map
//   g(z) = W + sqrt((z - W)^2 + 4 dt),
// so a step adds half-plane capacity 2 dt and its tip is W + 2i sqrt(dt).

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "slelab/core.hpp"

namespace slelab {

/// Per-sample random stream: MT19937-64 seeded through std::seed_seq with
/// the words (seed lo, seed hi, index lo, index hi). Streams for distinct
/// (seed, index) pairs are used as independent substreams.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index);

  /// Standard normal deviate.
  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct DrivingPath {
  std::vector<double> times;   // t_0 = 0 < t_1 < ... < t_N
  std::vector<double> values;  // V_{t_k}, V_0 = 0
  double kappa = 0.0;
  std::uint64_t seed = 0;

  std::size_t steps() const noexcept {
    return times.empty() ? 0 : times.size() - 1;
  }
  double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }
};

/// Uniform-grid driver V = sqrt(kappa) B on [0, T] with `steps` steps,
/// drawn from stream (seed, 0).
DrivingPath sample_driver(const SleParams& p, double T, std::size_t steps,
                          std::uint64_t seed);

/// Builds a path from explicit grid values (validated).
DrivingPath make_driving_path(std::vector<double> times,
                              std::vector<double> values, double kappa = 0.0);

struct Trace {
  std::vector<Complex> vertices;
  std::vector<double> times;
};

struct HullProbe {
  Complex z;
  double blow_up_time = std::numeric_limits<double>::infinity();
  Complex g_T_z;  // meaningful only when blow_up_time is infinite

  bool blew_up() const noexcept { return blow_up_time != std::numeric_limits<double>::infinity(); }
};

/// One forward step: W + sqrt((z - W)^2 + 4 dt), branch with Im >= 0.
Complex forward_slit(Complex z, double W, double dt);
/// Inverse of forward_slit: W + sqrt((w - W)^2 - 4 dt), branch with Im >= 0.
Complex inverse_slit(Complex w, double W, double dt);

/// The inverse Loewner map g_{t_k}^{-1} = f_1 o ... o f_k as a growing
/// composition of slit inverses. Dyadic blocks of steps are summarized by
/// truncated Laurent expansions about the block's real center and used
/// whenever the evaluation point is far from the block's singular interval;
/// otherwise the block is descended to exact slit maps.
class InverseLoewnerChain {
 public:
  static constexpr int kOrder = 12;         // Laurent terms kept
  static constexpr int kMinLevel = 2;       // smallest summarized block: 4 steps
  static constexpr double kFarFactor = 3.0; // |w - c| >= kFarFactor * rho

  InverseLoewnerChain() = default;
  /// A larger far factor trades speed for accuracy.
  explicit InverseLoewnerChain(double far_factor) : far_factor_(far_factor) {}

  void push(double W, double dt);
  std::size_t size() const noexcept { return drivers_.size(); }
  void clear();

  /// f_1 o ... o f_count applied to w (count defaults to all steps).
  Complex apply(Complex w) const { return apply(w, size()); }
  Complex apply(Complex w, std::size_t count) const;
  /// Same map with every step evaluated exactly, O(count).
  Complex apply_exact(Complex w, std::size_t count) const;

 private:
  struct Block {
    double center = 0.0;
    double rho = 0.0;  // singular interval is [center - rho, center + rho]
    double lo = 0.0, hi = 0.0, duration = 0.0;
    std::array<double, kOrder + 1> coeff{};  // coeff[n] multiplies u^n
  };

  void build_block(int level, std::size_t index);
  static Block leaf_block(double W, double dt);
  static Block compose(const Block& outer, const Block& inner);
  static Complex eval(const Block& b, Complex w);

  std::vector<double> drivers_;
  std::vector<double> dts_;
  std::vector<std::vector<Block>> levels_;  // levels_[l - kMinLevel]
  double far_factor_ = kFarFactor;
};

/// gamma(t_k) for every grid time; vertex 0 is the origin.
Trace trace_from_driver(const DrivingPath& path);

/// Integrates g_t(z) over the whole path with exact slit steps; blow-up is
/// declared once |g_t(z) - V_t| or Im g_t(z) falls below `blowup_delta`.
HullProbe forward_probe(const DrivingPath& path, Complex z,
                        double blowup_delta = 1e-8);

/// Half-plane capacity of the hull from c ~ z (g_T(z) - z) at four far
/// probe points placed symmetrically about the imaginary axis.
double hcap_estimate(const DrivingPath& path);

double dist_to_segment(Complex z, Complex a, Complex b);
double dist_to_trace(const Trace& tr, Complex z);

// ---------------------------------------------------------------------------
// Streaming trace growth used by the Monte Carlo estimators.

struct SimConfig {
  enum class Scheme { Adaptive, Uniform };
  Scheme scheme = Scheme::Adaptive;
  double c_res = 100.0;          // uniform: dt = r_min^2 / c_res
  double r_esc_factor = 8.0;     // escape radius multiplier
  double blowup_delta = 1e-8;
  double near_res = 10.0;        // adaptive: segment <= r / near_res near targets
  double far_eta = 0.03;         // adaptive: segment <= far_eta * distance away
  double h_eps = 0.25;           // adaptive: driver increment <= h_eps * |g_t(w) - W|
  double grid_step_factor = 10.0;  // Minkowski grid step = r / factor
  std::size_t max_steps = 20'000'000;
};

/// Decides the allowed segment length near the current tip and consumes
/// accepted segments.
class GrowthObserver {
 public:
  virtual ~GrowthObserver() = default;
  /// Longest acceptable chord between consecutive vertices near `tip`.
  virtual double max_segment(Complex tip) const = 0;
  /// Called for every accepted step; return false to stop growth.
  virtual bool on_segment(Complex from, Complex to, double t) = 0;
  /// Largest acceptable driver increment (and 2 sqrt(dt)) when the driver
  /// sits at W. Lets observers keep the map accurate at watched points.
  virtual double max_driver_step(double /*W*/) const {
    return std::numeric_limits<double>::infinity();
  }
  /// Called after each accepted step with the new driver value.
  virtual void on_step(double /*W*/, double /*dt*/) {}
};

struct GrowthSummary {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double final_time = 0.0;
  bool escaped = false;
  bool stopped = false;  // observer requested stop
};

/// Grows a trace until it leaves the disk of radius `escape_radius`, the
/// observer stops it, or max_steps is reached. Uniform scheme uses step
/// `uniform_dt`; adaptive scheme refines steps with Brownian bridges until
/// the chord fits the observer's max_segment. When `driver` / `trace` are
/// given, the accepted grid is recorded.
GrowthSummary grow_trace(const SleParams& p, const SimConfig& sim,
                         double escape_radius, double uniform_dt,
                         SampleStream& stream, GrowthObserver& obs,
                         DrivingPath* driver = nullptr, Trace* trace = nullptr);

}  // namespace slelab
