#pragma once

// Monte Carlo estimators on simulated traces: multi-point hitting
// probabilities, log-log exponent fits, Minkowski content and its moments,
// and the deterministic integral bounds on D^n.

#include <cstdint>
#include <functional>
#include <vector>

#include "slelab/core.hpp"
#include "slelab/loewner.hpp"

namespace slelab {

struct EstimateResult {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n_samples = 0;
  std::uint64_t config_hash = 0;
};

/// Streaming mean / variance accumulator (Welford). Merging is exact for
/// the count and associative up to rounding.
class Accumulator {
 public:
  void add(double x);
  void merge(const Accumulator& other);
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // unbiased, 0 when n < 2
  EstimateResult result(std::uint64_t hash = 0) const;

  /// Raw state, for persisting a partial reduction.
  double m2() const noexcept { return m2_; }
  static Accumulator restore(std::size_t n, double mean, double m2);

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ExponentFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  std::vector<double> radii;
  std::vector<double> probs;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in the closed half-plane.
struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double area() const noexcept { return width() * height(); }
  bool contains(Complex z) const noexcept {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  double distance(Complex z) const noexcept;
};

/// Integration domain for the D^n bounds: a rectangle or the half-disk
/// {|z - c| <= R, Im z >= 0} with c real.
struct Domain {
  enum class Kind { Rectangle, HalfDisk };
  Kind kind = Kind::Rectangle;
  Rect rect;
  double center = 0.0;
  double radius = 0.0;

  static Domain rectangle(Rect r);
  static Domain half_disk(double center, double radius);
  double area() const;
  /// Maps (u, v) in [0,1)^2 to a uniform point of the domain.
  Complex sample(double u, double v) const;
};

/// Runs fn(index) for index in [begin, end) on up to `workers` threads.
/// fn must only touch state owned by its index.
void parallel_for(std::size_t begin, std::size_t end, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Hitting probabilities.

/// Escape radius r_esc_factor * max_k (|z_k| + r_k).
double escape_radius(const PointConfig& cfg, const SimConfig& sim);

/// Uniform step r_min^2 / c_res.
double uniform_step(const PointConfig& cfg, const SimConfig& sim);

/// Rejects configurations the simulation grid cannot resolve: every r_k
/// must be at least four step displacements (uniform: 8 sqrt(dt); adaptive:
/// near_res >= 4). Throws ErrorCode::Resolution.
void check_resolution(const PointConfig& cfg, const SimConfig& sim);

/// Per-target hit flags of one trace drawn from substream (seed, index).
std::vector<bool> hit_sample(const PointConfig& cfg, const SleParams& p,
                             const SimConfig& sim, std::uint64_t seed,
                             std::uint64_t index);

/// 1 if every target was hit by sample (seed, index), else 0.
double hit_indicator(const PointConfig& cfg, const SleParams& p,
                     const SimConfig& sim, std::uint64_t seed,
                     std::uint64_t index);

/// Running distances from each point to the trace of sample (seed, index),
/// exact down to resolve[k]: growth stops once every point is that close.
std::vector<double> sample_distances(const std::vector<Complex>& points,
                                     const std::vector<double>& resolve,
                                     double escape, double uniform_dt,
                                     const SleParams& p, const SimConfig& sim,
                                     std::uint64_t seed, std::uint64_t index);

/// Fraction of samples 0..n-1 hitting every disk, with binomial stderr.
/// Samples are reduced in index order whatever the worker count.
EstimateResult hit_prob(const PointConfig& cfg, const SleParams& p,
                        std::size_t n_samples, const SimConfig& sim,
                        std::uint64_t seed = 1, unsigned workers = 1);

/// Hit estimates for several radius lists evaluated on one trace ensemble
/// (coupled samples). Traces are resolved for the smallest radius of each
/// point. Every radius list must match the point count.
std::vector<EstimateResult> hit_prob_coupled(
    const std::vector<Complex>& points,
    const std::vector<std::vector<double>>& radius_sets, const SleParams& p,
    std::size_t n_samples, const SimConfig& sim, std::uint64_t seed = 1,
    unsigned workers = 1);

// ---------------------------------------------------------------------------

/// Least-squares slope of log p against log r. Weighted by the delta-method
/// variance (stderr / p)^2 when every stderr is positive, ordinary least
/// squares with residual-based error otherwise.
ExponentFit exponent_fit(const std::vector<double>& radii,
                         const std::vector<EstimateResult>& estimates);
ExponentFit exponent_fit(const std::vector<double>& radii,
                         const std::vector<double>& probs);

// ---------------------------------------------------------------------------
// Minkowski content.

/// r^{d-2} times the area of cells of D whose centers lie within r of the
/// trace polyline. The cell size is the largest divisor of each side not
/// exceeding grid_step.
double minkowski_content(const Trace& tr, const Rect& domain, double r,
                         double grid_step, const SleParams& p);

/// Neighborhood areas (without the r^{d-2} factor) for several radii on one
/// trace, each counted on its own grid of step r / grid_step_factor.
std::vector<double> neighborhood_areas(const std::vector<Complex>& vertices,
                                       const Rect& domain,
                                       const std::vector<double>& radii,
                                       double grid_step_factor);

struct MomentTable {
  std::vector<double> radii;
  int n_max = 0;
  // mean[i][m] and std_error[i][m] for radius i and moment m = 0..n_max.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> std_error;
  std::size_t n_samples = 0;
};

/// Per-sample contents Cont(gamma cap D; r_i) for sample (seed, index).
std::vector<double> content_sample(const SleParams& p, const Rect& domain,
                                   const std::vector<double>& radii,
                                   const SimConfig& sim, std::uint64_t seed,
                                   std::uint64_t index);

/// E[Cont(gamma cap D; r)^m] for m = 0..n_max on one trace ensemble.
MomentTable content_moments(const SleParams& p, const Rect& domain,
                            const std::vector<double>& radii, int n_max,
                            std::size_t n_samples, const SimConfig& sim,
                            std::uint64_t seed = 1, unsigned workers = 1);

/// Reduces per-sample contents (one row per sample) into a moment table.
MomentTable reduce_moments(const std::vector<double>& radii, int n_max,
                           const std::vector<std::vector<double>>& samples);

// ---------------------------------------------------------------------------
// Deterministic integrals.

/// Monte Carlo estimate of the integral over D^n of
/// prod_k min_{j<k} |z_k - z_j|^{d-2} (z_0 = 0).
EstimateResult integral_lk_bound(const Domain& domain, int n,
                                 std::size_t mc_points, const SleParams& p,
                                 std::uint64_t seed = 1);

/// Integral of green_halfplane over a rectangle (Gauss-Kronrod, nested).
double green_integral(const Rect& domain, const SleParams& p);

}  // namespace slelab
