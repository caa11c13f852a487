#include "slelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slelab/error.hpp"

namespace slelab {

// ---------------------------------------------------------------------------
// Accumulator

void Accumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Accumulator::merge(const Accumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

Accumulator Accumulator::restore(std::size_t n, double mean, double m2) {
  Accumulator a;
  a.n_ = n;
  a.mean_ = mean;
  a.m2_ = m2;
  return a;
}

double Accumulator::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

EstimateResult Accumulator::result(std::uint64_t hash) const {
  EstimateResult r;
  r.mean = mean_;
  r.n_samples = n_;
  r.std_error = n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
  r.config_hash = hash;
  return r;
}

// ---------------------------------------------------------------------------
// Domains

double Rect::distance(Complex z) const noexcept {
  const double dx = std::max({x0 - z.real(), 0.0, z.real() - x1});
  const double dy = std::max({y0 - z.imag(), 0.0, z.imag() - y1});
  return std::hypot(dx, dy);
}

namespace {

void validate_rect(const Rect& r) {
  require(std::isfinite(r.x0) && std::isfinite(r.x1) && std::isfinite(r.y0) &&
              std::isfinite(r.y1),
          "domain bounds must be finite");
  require(r.x1 >= r.x0 && r.y1 >= r.y0, "domain bounds are inverted");
  require(r.y0 >= 0.0, "domain must lie in the closed upper half-plane");
}

}  // namespace

Domain Domain::rectangle(Rect r) {
  validate_rect(r);
  Domain d;
  d.kind = Kind::Rectangle;
  d.rect = r;
  return d;
}

Domain Domain::half_disk(double center, double radius) {
  require(std::isfinite(center) && radius > 0.0,
          "half-disk needs a finite center and a positive radius");
  Domain d;
  d.kind = Kind::HalfDisk;
  d.center = center;
  d.radius = radius;
  return d;
}

double Domain::area() const {
  if (kind == Kind::Rectangle) return rect.area();
  return 0.5 * std::numbers::pi * radius * radius;
}

Complex Domain::sample(double u, double v) const {
  if (kind == Kind::Rectangle)
    return {rect.x0 + u * rect.width(), rect.y0 + v * rect.height()};
  const double rho = radius * std::sqrt(u);
  const double theta = std::numbers::pi * v;
  return {center + rho * std::cos(theta), rho * std::sin(theta)};
}

// ---------------------------------------------------------------------------
// Worker pool

void parallel_for(std::size_t begin, std::size_t end, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (begin >= end) return;
  const std::size_t n = end - begin;
  const auto t = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, workers), n));
  if (t == 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < end && !stop; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          stop = true;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

// ---------------------------------------------------------------------------
// Hitting

namespace {

// Tracks the running distance from each target to the polyline and refines
// steps near targets that are still unresolved.
class DistanceObserver final : public GrowthObserver {
 public:
  DistanceObserver(const std::vector<Complex>& points,
                   const std::vector<double>& resolve, const SimConfig& sim)
      : points_(points),
        resolve_(resolve),
        near_res_(sim.near_res),
        eta_(sim.far_eta),
        h_eps_(sim.h_eps),
        dist_(points.size(), std::numeric_limits<double>::infinity()) {
    for (std::size_t k = 0; k < points_.size(); ++k) {
      dist_[k] = std::abs(points_[k]);
      // Points of the circle |w - z_k| = resolve_k inside the closed
      // half-plane, followed forward under g_t.
      for (int q = 0; q < 4; ++q) {
        const Complex w = points_[k] + std::polar(resolve_[k], q * std::numbers::pi / 2.0);
        if (w.imag() >= 0.0) probes_.push_back({k, w});
      }
    }
  }

  double max_driver_step(double W) const override {
    if (h_eps_ <= 0.0) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (const auto& pr : probes_)
      if (dist_[pr.owner] > resolve_[pr.owner])
        m = std::min(m, std::abs(pr.w - W));
    return h_eps_ * m;
  }

  void on_step(double W, double dt) override {
    for (auto& pr : probes_) pr.w = forward_slit(pr.w, W, dt);
  }

  double max_segment(Complex tip) const override {
    double allowed = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points_.size(); ++k) {
      if (dist_[k] <= resolve_[k]) continue;
      const double gap = std::abs(tip - points_[k]) - resolve_[k];
      allowed = std::min(allowed,
                         std::max(resolve_[k] / near_res_, eta_ * gap));
    }
    return allowed;
  }

  bool on_segment(Complex from, Complex to, double) override {
    bool open = false;
    for (std::size_t k = 0; k < points_.size(); ++k) {
      dist_[k] = std::min(dist_[k], dist_to_segment(points_[k], from, to));
      if (dist_[k] > resolve_[k]) open = true;
    }
    return open;
  }

  const std::vector<double>& distances() const noexcept { return dist_; }

 private:
  const std::vector<Complex>& points_;
  const std::vector<double>& resolve_;
  struct Probe {
    std::size_t owner;
    Complex w;
  };
  double near_res_, eta_, h_eps_;
  std::vector<double> dist_;
  std::vector<Probe> probes_;
};

void check_sim(const SimConfig& sim) {
  require(sim.r_esc_factor >= 1.0 && std::isfinite(sim.r_esc_factor),
          "escape radius factor must be at least 1");
  require(sim.blowup_delta > 0.0, "blow-up threshold must be positive");
  require(sim.far_eta > 0.0 && sim.far_eta <= 1.0,
          "far_eta must lie in (0, 1]");
  require(sim.h_eps >= 0.0 && std::isfinite(sim.h_eps),
          "h_eps must be non-negative (0 disables driver control)");
  require(sim.c_res > 0.0, "c_res must be positive");
  require(sim.grid_step_factor >= 4.0,
          "grid step must be at most r/4 (grid_step_factor >= 4)");
  require(sim.max_steps >= 1, "max_steps must be positive");
}

}  // namespace

std::vector<double> sample_distances(const std::vector<Complex>& points,
                                     const std::vector<double>& resolve,
                                     double escape, double uniform_dt,
                                     const SleParams& p, const SimConfig& sim,
                                     std::uint64_t seed, std::uint64_t index) {
  require(points.size() == resolve.size(),
          "one resolution radius per point expected");
  DistanceObserver obs(points, resolve, sim);
  bool open = false;
  for (std::size_t k = 0; k < points.size(); ++k)
    if (obs.distances()[k] > resolve[k]) open = true;
  if (!open) return obs.distances();
  SampleStream stream(seed, index);
  grow_trace(p, sim, escape, uniform_dt, stream, obs);
  return obs.distances();
}

double escape_radius(const PointConfig& cfg, const SimConfig& sim) {
  double m = 0.0;
  for (std::size_t k = 0; k < cfg.size(); ++k)
    m = std::max(m, std::abs(cfg.point(k).z()) + cfg.radius(k));
  return sim.r_esc_factor * m;
}

double uniform_step(const PointConfig& cfg, const SimConfig& sim) {
  require(!cfg.empty(), "configuration has no marked points");
  const double rmin = *std::min_element(cfg.radii().begin(), cfg.radii().end());
  return rmin * rmin / sim.c_res;
}

void check_resolution(const PointConfig& cfg, const SimConfig& sim) {
  require(!cfg.empty(), "configuration has no marked points");
  check_sim(sim);
  if (sim.scheme == SimConfig::Scheme::Uniform) {
    const double floor = 8.0 * std::sqrt(uniform_step(cfg, sim));
    for (std::size_t k = 0; k < cfg.size(); ++k)
      if (cfg.radius(k) < floor)
        fail(ErrorCode::Resolution,
             "radius " + std::to_string(cfg.radius(k)) +
                 " is below the resolution floor 8 sqrt(dt) = " +
                 std::to_string(floor) + "; raise c_res");
  } else if (sim.near_res < 4.0) {
    fail(ErrorCode::Resolution,
         "near_res must be at least 4 so every step stays below r/4");
  }
}

std::vector<bool> hit_sample(const PointConfig& cfg, const SleParams& p,
                             const SimConfig& sim, std::uint64_t seed,
                             std::uint64_t index) {
  std::vector<Complex> pts;
  for (const auto& hp : cfg.points()) pts.push_back(hp.z());
  const double dt = sim.scheme == SimConfig::Scheme::Uniform
                        ? uniform_step(cfg, sim)
                        : 0.0;
  const auto dist = sample_distances(pts, cfg.radii(), escape_radius(cfg, sim),
                                     dt, p, sim, seed, index);
  std::vector<bool> hit(cfg.size());
  for (std::size_t k = 0; k < cfg.size(); ++k) hit[k] = dist[k] <= cfg.radius(k);
  return hit;
}

double hit_indicator(const PointConfig& cfg, const SleParams& p,
                     const SimConfig& sim, std::uint64_t seed,
                     std::uint64_t index) {
  const auto hit = hit_sample(cfg, p, sim, seed, index);
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }) ? 1.0
                                                                        : 0.0;
}

EstimateResult hit_prob(const PointConfig& cfg, const SleParams& p,
                        std::size_t n_samples, const SimConfig& sim,
                        std::uint64_t seed, unsigned workers) {
  require(n_samples >= 1, "n_samples must be at least 1");
  check_resolution(cfg, sim);
  std::vector<double> hits(n_samples);
  parallel_for(0, n_samples, workers, [&](std::size_t i) {
    hits[i] = hit_indicator(cfg, p, sim, seed, i);
  });
  Accumulator acc;
  for (double h : hits) acc.add(h);
  return acc.result();
}

std::vector<EstimateResult> hit_prob_coupled(
    const std::vector<Complex>& points,
    const std::vector<std::vector<double>>& radius_sets, const SleParams& p,
    std::size_t n_samples, const SimConfig& sim, std::uint64_t seed,
    unsigned workers) {
  require(n_samples >= 1, "n_samples must be at least 1");
  require(!radius_sets.empty(), "at least one radius set is needed");
  const std::size_t n = points.size();
  std::vector<double> rmin(n, std::numeric_limits<double>::infinity());
  std::vector<double> rmax(n, 0.0);
  for (const auto& set : radius_sets) {
    require(set.size() == n, "radius set size differs from the point count");
    for (std::size_t k = 0; k < n; ++k) {
      rmin[k] = std::min(rmin[k], set[k]);
      rmax[k] = std::max(rmax[k], set[k]);
    }
  }
  // Resolution and escape follow the finest and the widest configuration.
  const PointConfig fine = PointConfig::from_complex(points, rmin);
  const PointConfig wide = PointConfig::from_complex(points, rmax);
  check_resolution(fine, sim);
  const double esc = escape_radius(wide, sim);
  const double dt = sim.scheme == SimConfig::Scheme::Uniform
                        ? uniform_step(fine, sim)
                        : 0.0;

  std::vector<std::vector<double>> dists(n_samples);
  parallel_for(0, n_samples, workers, [&](std::size_t i) {
    dists[i] = sample_distances(points, rmin, esc, dt, p, sim, seed, i);
  });
  std::vector<Accumulator> acc(radius_sets.size());
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto& dist = dists[i];
    for (std::size_t s = 0; s < radius_sets.size(); ++s) {
      bool all = true;
      for (std::size_t k = 0; k < n; ++k)
        all = all && dist[k] <= radius_sets[s][k];
      acc[s].add(all ? 1.0 : 0.0);
    }
  }
  std::vector<EstimateResult> out;
  for (const auto& a : acc) out.push_back(a.result());
  return out;
}

// ---------------------------------------------------------------------------
// Exponent fit

ExponentFit exponent_fit(const std::vector<double>& radii,
                         const std::vector<EstimateResult>& estimates) {
  require(radii.size() == estimates.size(),
          "radii and estimates differ in length");
  require(radii.size() >= 3, "exponent fit needs at least 3 radii");
  const std::size_t n = radii.size();
  std::vector<double> x(n), y(n), w(n);
  bool weighted = true;
  for (std::size_t i = 0; i < n; ++i) {
    require(radii[i] > 0.0, "radii must be positive");
    if (!(estimates[i].mean > 0.0))
      fail(ErrorCode::InvalidArgument,
           "estimate at r = " + std::to_string(radii[i]) +
               " is zero; more samples are needed");
    x[i] = std::log(radii[i]);
    y[i] = std::log(estimates[i].mean);
    const double rel = estimates[i].std_error / estimates[i].mean;
    if (!(rel > 0.0)) weighted = false;
    w[i] = rel > 0.0 ? 1.0 / (rel * rel) : 1.0;
  }
  if (!weighted) std::fill(w.begin(), w.end(), 1.0);

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xb = sx / sw, yb = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xb) * (x[i] - xb);
    sxy += w[i] * (x[i] - xb) * (y[i] - yb);
  }
  require(sxx > 0.0, "exponent fit needs at least two distinct radii");

  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  if (weighted) {
    fit.slope_stderr = std::sqrt(1.0 / sxx);
  } else {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  fit.radii = radii;
  for (const auto& e : estimates) fit.probs.push_back(e.mean);
  return fit;
}

ExponentFit exponent_fit(const std::vector<double>& radii,
                         const std::vector<double>& probs) {
  std::vector<EstimateResult> est;
  for (double v : probs) est.push_back({v, 0.0, 0, 0});
  return exponent_fit(radii, est);
}

// ---------------------------------------------------------------------------
// Minkowski content

namespace {

struct Grid {
  std::size_t nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
};

Grid make_grid(const Rect& d, double step) {
  if (d.width() < step || d.height() < step)
    fail(ErrorCode::InvalidArgument,
         "domain is smaller than one grid cell of size " +
             std::to_string(step));
  Grid g;
  g.nx = static_cast<std::size_t>(std::ceil(d.width() / step - 1e-9));
  g.ny = static_cast<std::size_t>(std::ceil(d.height() / step - 1e-9));
  g.hx = d.width() / static_cast<double>(g.nx);
  g.hy = d.height() / static_cast<double>(g.ny);
  return g;
}

double covered_area(const std::vector<Complex>& v, const Rect& d, double r,
                    const Grid& g) {
  std::vector<unsigned char> mark(g.nx * g.ny, 0);
  std::size_t count = 0;
  auto clamp_index = [](double t, std::size_t n) -> long {
    return std::clamp(static_cast<long>(std::floor(t)), 0L,
                      static_cast<long>(n) - 1);
  };
  auto visit = [&](Complex a, Complex b) {
    const double lx = std::min(a.real(), b.real()) - r;
    const double ux = std::max(a.real(), b.real()) + r;
    const double ly = std::min(a.imag(), b.imag()) - r;
    const double uy = std::max(a.imag(), b.imag()) + r;
    if (ux < d.x0 || lx > d.x1 || uy < d.y0 || ly > d.y1) return;
    const long i0 = clamp_index((lx - d.x0) / g.hx - 0.5, g.nx);
    const long i1 = clamp_index((ux - d.x0) / g.hx + 0.5, g.nx);
    const long j0 = clamp_index((ly - d.y0) / g.hy - 0.5, g.ny);
    const long j1 = clamp_index((uy - d.y0) / g.hy + 0.5, g.ny);
    for (long j = j0; j <= j1; ++j) {
      const double cy = d.y0 + (static_cast<double>(j) + 0.5) * g.hy;
      for (long i = i0; i <= i1; ++i) {
        unsigned char& m = mark[static_cast<std::size_t>(j) * g.nx +
                                static_cast<std::size_t>(i)];
        if (m) continue;
        const Complex c(d.x0 + (static_cast<double>(i) + 0.5) * g.hx, cy);
        if (dist_to_segment(c, a, b) <= r) {
          m = 1;
          ++count;
        }
      }
    }
  };
  if (v.size() == 1) visit(v[0], v[0]);
  for (std::size_t k = 1; k < v.size(); ++k) visit(v[k - 1], v[k]);
  return static_cast<double>(count) * g.hx * g.hy;
}

}  // namespace

double minkowski_content(const Trace& tr, const Rect& domain, double r,
                         double grid_step, const SleParams& p) {
  validate_rect(domain);
  require(!tr.vertices.empty(), "trace must have at least one vertex");
  require(r > 0.0 && std::isfinite(r), "r must be positive");
  require(grid_step > 0.0, "grid step must be positive");
  if (grid_step > r / 4.0 * (1.0 + 1e-12))
    fail(ErrorCode::Resolution,
         "grid step " + std::to_string(grid_step) +
             " is coarser than r/4 = " + std::to_string(r / 4.0));
  const Grid g = make_grid(domain, grid_step);
  return std::pow(r, p.d - 2.0) * covered_area(tr.vertices, domain, r, g);
}

std::vector<double> neighborhood_areas(const std::vector<Complex>& vertices,
                                       const Rect& domain,
                                       const std::vector<double>& radii,
                                       double grid_step_factor) {
  require(grid_step_factor >= 4.0, "grid step must be at most r/4");
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    require(r > 0.0, "radii must be positive");
    out.push_back(covered_area(vertices, domain, r,
                               make_grid(domain, r / grid_step_factor)));
  }
  return out;
}

namespace {

// Refines the trace within reach of D and stops nothing; growth ends at the
// escape radius.
class DomainObserver final : public GrowthObserver {
 public:
  DomainObserver(const Rect& d, double reach, double fine, double eta,
                 std::vector<Complex>* vertices)
      : d_(d), reach_(reach), fine_(fine), eta_(eta), v_(vertices) {}

  double max_segment(Complex tip) const override {
    return std::max(fine_, eta_ * (d_.distance(tip) - reach_));
  }
  bool on_segment(Complex, Complex to, double) override {
    v_->push_back(to);
    return true;
  }

 private:
  Rect d_;
  double reach_, fine_, eta_;
  std::vector<Complex>* v_;
};

}  // namespace

std::vector<double> content_sample(const SleParams& p, const Rect& domain,
                                   const std::vector<double>& radii,
                                   const SimConfig& sim, std::uint64_t seed,
                                   std::uint64_t index) {
  validate_rect(domain);
  require(!radii.empty(), "at least one radius is needed");
  check_sim(sim);
  if (sim.scheme == SimConfig::Scheme::Adaptive)
    require(sim.near_res >= 4.0, "near_res must be at least 4");
  const double rmin = *std::min_element(radii.begin(), radii.end());
  const double rmax = *std::max_element(radii.begin(), radii.end());
  require(rmin > 0.0, "radii must be positive");
  if (domain.area() == 0.0) return std::vector<double>(radii.size(), 0.0);

  const double far = std::max({std::abs(Complex(domain.x0, domain.y0)),
                               std::abs(Complex(domain.x1, domain.y0)),
                               std::abs(Complex(domain.x0, domain.y1)),
                               std::abs(Complex(domain.x1, domain.y1))});
  const double esc = sim.r_esc_factor * (far + rmax);
  std::vector<Complex> vertices{Complex(0.0)};
  DomainObserver obs(domain, rmax, rmin / sim.near_res, sim.far_eta, &vertices);
  SampleStream stream(seed, index);
  grow_trace(p, sim, esc, rmin * rmin / sim.c_res, stream, obs);

  auto areas = neighborhood_areas(vertices, domain, radii, sim.grid_step_factor);
  for (std::size_t i = 0; i < radii.size(); ++i)
    areas[i] *= std::pow(radii[i], p.d - 2.0);
  return areas;
}

MomentTable reduce_moments(const std::vector<double>& radii, int n_max,
                           const std::vector<std::vector<double>>& samples) {
  require(n_max >= 0 && n_max <= 4, "n_max must lie in 0..4");
  MomentTable t;
  t.radii = radii;
  t.n_max = n_max;
  t.n_samples = samples.size();
  const std::size_t nm = static_cast<std::size_t>(n_max) + 1;
  std::vector<std::vector<Accumulator>> acc(radii.size(),
                                            std::vector<Accumulator>(nm));
  for (const auto& row : samples) {
    require(row.size() == radii.size(), "sample row has the wrong width");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double pw = 1.0;
      for (std::size_t m = 0; m < nm; ++m) {
        acc[i][m].add(pw);
        pw *= row[i];
      }
    }
  }
  t.mean.assign(radii.size(), std::vector<double>(nm, 0.0));
  t.std_error.assign(radii.size(), std::vector<double>(nm, 0.0));
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t m = 0; m < nm; ++m) {
      const auto r = acc[i][m].result();
      t.mean[i][m] = m == 0 ? 1.0 : r.mean;
      t.std_error[i][m] = m == 0 ? 0.0 : r.std_error;
    }
  return t;
}

MomentTable content_moments(const SleParams& p, const Rect& domain,
                            const std::vector<double>& radii, int n_max,
                            std::size_t n_samples, const SimConfig& sim,
                            std::uint64_t seed, unsigned workers) {
  require(n_samples >= 1, "n_samples must be at least 1");
  require(n_max >= 0 && n_max <= 4, "n_max must lie in 0..4");
  std::vector<std::vector<double>> rows(n_samples);
  parallel_for(0, n_samples, workers, [&](std::size_t i) {
    rows[i] = content_sample(p, domain, radii, sim, seed, i);
  });
  return reduce_moments(radii, n_max, rows);
}

// ---------------------------------------------------------------------------
// Integrals

EstimateResult integral_lk_bound(const Domain& domain, int n,
                                 std::size_t mc_points, const SleParams& p,
                                 std::uint64_t seed) {
  require(n >= 1 && n <= 4, "n must lie in 1..4");
  require(mc_points >= 10'000, "mc_points must be at least 10^4");
  const double vol = std::pow(domain.area(), n);
  SampleStream stream(seed, 0);
  Accumulator acc;
  std::vector<Complex> z(static_cast<std::size_t>(n) + 1);
  z[0] = 0.0;
  for (std::size_t s = 0; s < mc_points; ++s) {
    for (int k = 1; k <= n; ++k) {
      const double u = stream.uniform();
      const double v = stream.uniform();
      z[static_cast<std::size_t>(k)] = domain.sample(u, v);
    }
    double prod = 1.0;
    for (int k = 1; k <= n; ++k) {
      double l = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j)
        l = std::min(l, std::abs(z[static_cast<std::size_t>(k)] -
                                 z[static_cast<std::size_t>(j)]));
      prod *= std::pow(l, p.d - 2.0);
    }
    acc.add(vol * prod);
  }
  return acc.result();
}

double green_integral(const Rect& domain, const SleParams& p) {
  validate_rect(domain);
  if (domain.area() == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double y) {
    if (y <= 0.0) return 0.0;
    auto f = [&](double x) { return green_halfplane(Complex(x, y), p); };
    return gauss_kronrod<double, 31>::integrate(f, domain.x0, domain.x1, 10,
                                                1e-12);
  };
  return gauss_kronrod<double, 31>::integrate(inner, domain.y0, domain.y1, 10,
                                              1e-10);
}

}  // namespace slelab
