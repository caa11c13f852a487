#include "slelab/loewner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "slelab/error.hpp"

namespace slelab {

namespace {

constexpr int L = InverseLoewnerChain::kOrder;
using Series = std::array<double, L + 1>;

// Truncated product of two power series in u (index = power).
Series mul(const Series& a, const Series& b) {
  Series out{};
  for (int i = 0; i <= L; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; i + j <= L; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// sum_{n>=1} coeff[n] x(u)^n for a series x(u) without constant term.
Series substitute(const Series& coeff, const Series& x) {
  Series acc{};
  acc[0] = coeff[L];
  for (int n = L - 1; n >= 1; --n) {
    acc = mul(acc, x);
    acc[0] += coeff[n];
  }
  return mul(acc, x);
}

// u / (1 - s u) as a series in u.
Series shifted_variable(double s) {
  Series v{};
  double pw = 1.0;
  for (int n = 1; n <= L; ++n) {
    v[n] = pw;
    pw *= s;
  }
  return v;
}

// Reciprocal of a series with constant term 1.
Series reciprocal_unit(const Series& a) {
  Series b{};
  b[0] = 1.0;
  for (int n = 1; n <= L; ++n) {
    double acc = 0.0;
    for (int i = 1; i <= n; ++i) acc -= a[i] * b[n - i];
    b[n] = acc;
  }
  return b;
}

}  // namespace

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

DrivingPath sample_driver(const SleParams& p, double T, std::size_t steps,
                          std::uint64_t seed) {
  require(T > 0.0 && std::isfinite(T), "horizon T must be positive");
  require(steps >= 1, "driver needs at least one step");
  DrivingPath path;
  path.kappa = p.kappa;
  path.seed = seed;
  path.times.resize(steps + 1);
  path.values.resize(steps + 1);
  SampleStream stream(seed, 0);
  const double dt = T / static_cast<double>(steps);
  const double scale = std::sqrt(p.kappa * dt);
  path.times[0] = 0.0;
  path.values[0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    path.times[k] = T * static_cast<double>(k) / static_cast<double>(steps);
    path.values[k] = path.values[k - 1] + scale * stream.normal();
  }
  return path;
}

DrivingPath make_driving_path(std::vector<double> times,
                              std::vector<double> values, double kappa) {
  require(!times.empty() && times.size() == values.size(),
          "driving path needs matching, non-empty time and value grids");
  require(times[0] == 0.0 && values[0] == 0.0,
          "driving path must start at t = 0 with V_0 = 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    require(times[k] > times[k - 1] && std::isfinite(values[k]),
            "driving path times must increase strictly");
  DrivingPath path;
  path.times = std::move(times);
  path.values = std::move(values);
  path.kappa = kappa;
  return path;
}

namespace {

// Principal square root; avoids the overflow-safe path of std::sqrt, whose
// cost dominates trace growth. Inputs here are O(1) in magnitude.
Complex principal_sqrt(Complex x) {
  const double a = x.real();
  const double b = x.imag();
  const double m = std::sqrt(a * a + b * b);
  if (m == 0.0) return {0.0, b};
  if (a >= 0.0) {
    const double t = std::sqrt(0.5 * (m + a));
    return {t, b / (2.0 * t)};
  }
  const double t = std::sqrt(0.5 * (m - a));
  return {std::abs(b) / (2.0 * t), std::copysign(t, b)};
}

}  // namespace

Complex forward_slit(Complex z, double W, double dt) {
  const Complex x = z - W;
  Complex s = principal_sqrt(x * x + 4.0 * dt);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() * x.real() < 0.0)) s = -s;
  return W + s;
}

Complex inverse_slit(Complex w, double W, double dt) {
  const Complex x = w - W;
  Complex s = principal_sqrt(x * x - 4.0 * dt);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() * x.real() < 0.0)) s = -s;
  return W + s;
}

// ---------------------------------------------------------------------------

InverseLoewnerChain::Block InverseLoewnerChain::leaf_block(double W,
                                                           double dt) {
  Block b;
  b.center = W;
  b.lo = b.hi = W;
  b.duration = dt;
  b.rho = 2.0 * std::sqrt(dt);
  // (w - W) sqrt(1 - 4 dt v^2) - (w - W) with v = 1 / (w - W).
  double binom = 1.0;
  double pw = 1.0;
  for (int m = 1; 2 * m - 1 <= L; ++m) {
    binom *= (0.5 - (m - 1)) / m;
    pw *= -4.0 * dt;
    b.coeff[2 * m - 1] = binom * pw;
  }
  return b;
}

InverseLoewnerChain::Block InverseLoewnerChain::compose(const Block& outer,
                                                        const Block& inner) {
  Block out;
  out.lo = std::min(outer.lo, inner.lo);
  out.hi = std::max(outer.hi, inner.hi);
  out.duration = outer.duration + inner.duration;
  out.center = 0.5 * (out.lo + out.hi);
  out.rho = 0.5 * (out.hi - out.lo) + 2.0 * std::sqrt(out.duration);

  // inner(w) - w as a series in u = 1 / (w - center).
  const double s_in = inner.center - out.center;
  const Series d_in = s_in == 0.0
                          ? inner.coeff
                          : substitute(inner.coeff, shifted_variable(s_in));

  // 1 / (inner(w) - outer.center) = u / (1 + e(u)).
  const double s_out = outer.center - out.center;
  Series e{};
  e[1] = -s_out;
  for (int n = 1; n < L; ++n) e[n + 1] += d_in[n];
  Series v = reciprocal_unit([&] {
    Series one_plus = e;
    one_plus[0] = 1.0;
    return one_plus;
  }());
  for (int n = L; n >= 1; --n) v[n] = v[n - 1];
  v[0] = 0.0;

  const Series d_out = substitute(outer.coeff, v);
  for (int n = 1; n <= L; ++n) out.coeff[n] = d_in[n] + d_out[n];
  return out;
}

Complex InverseLoewnerChain::eval(const Block& b, Complex w) {
  const Complex u = 1.0 / (w - b.center);
  Complex acc = b.coeff[L];
  for (int n = L - 1; n >= 1; --n) acc = acc * u + b.coeff[n];
  return w + acc * u;
}

void InverseLoewnerChain::clear() {
  drivers_.clear();
  dts_.clear();
  levels_.clear();
}

void InverseLoewnerChain::push(double W, double dt) {
  drivers_.push_back(W);
  dts_.push_back(dt);
  const std::size_t n = drivers_.size();
  for (int level = kMinLevel;; ++level) {
    const std::size_t width = std::size_t{1} << level;
    if (n % width != 0) break;
    build_block(level, n / width - 1);
  }
}

void InverseLoewnerChain::build_block(int level, std::size_t index) {
  const auto slot = static_cast<std::size_t>(level - kMinLevel);
  if (levels_.size() <= slot) levels_.resize(slot + 1);
  auto& row = levels_[slot];
  Block b;
  if (level == kMinLevel) {
    const std::size_t first = index << level;
    b = leaf_block(drivers_[first], dts_[first]);
    for (std::size_t i = 1; i < (std::size_t{1} << level); ++i)
      b = compose(b, leaf_block(drivers_[first + i], dts_[first + i]));
  } else {
    const auto& below = levels_[slot - 1];
    b = compose(below[2 * index], below[2 * index + 1]);
  }
  if (row.size() <= index) row.resize(index + 1);
  row[index] = b;
}

Complex InverseLoewnerChain::apply(Complex w, std::size_t count) const {
  std::size_t j = std::min(count, drivers_.size());
  while (j > 0) {
    const int top = std::min<int>(std::countr_zero(j),
                                  kMinLevel + static_cast<int>(levels_.size()) - 1);
    bool used_block = false;
    for (int level = top; level >= kMinLevel; --level) {
      const std::size_t width = std::size_t{1} << level;
      const Block& b = levels_[static_cast<std::size_t>(level - kMinLevel)]
                              [j / width - 1];
      const double far = far_factor_ * b.rho;
      if (std::norm(w - b.center) >= far * far) {
        w = eval(b, w);
        j -= width;
        used_block = true;
        break;
      }
    }
    if (!used_block) {
      --j;
      w = inverse_slit(w, drivers_[j], dts_[j]);
    }
  }
  return w;
}

Complex InverseLoewnerChain::apply_exact(Complex w, std::size_t count) const {
  for (std::size_t j = std::min(count, drivers_.size()); j > 0; --j)
    w = inverse_slit(w, drivers_[j - 1], dts_[j - 1]);
  return w;
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kBranchTolerance = 1e-9;
}

namespace {
constexpr double kTraceFarFactor = 10.0;
}

Trace trace_from_driver(const DrivingPath& path) {
  Trace tr;
  if (path.times.empty()) {
    tr.vertices.push_back(0.0);
    tr.times.push_back(0.0);
    return tr;
  }
  tr.vertices.reserve(path.times.size());
  tr.times = path.times;
  tr.vertices.push_back(0.0);
  // Truncation error near the tip is amplified by the square roots; a wide
  // far zone keeps vertices accurate to about 1e-12.
  InverseLoewnerChain chain(kTraceFarFactor);
  for (std::size_t k = 1; k < path.times.size(); ++k) {
    const double dt = path.times[k] - path.times[k - 1];
    const double W = path.values[k];
    const Complex v = chain.apply(Complex(W, 2.0 * std::sqrt(dt)));
    if (v.imag() < -kBranchTolerance)
      fail(ErrorCode::Internal,
           "trace vertex " + std::to_string(k) + " left the half-plane");
    tr.vertices.push_back(v);
    chain.push(W, dt);
  }
  return tr;
}

HullProbe forward_probe(const DrivingPath& path, Complex z,
                        double blowup_delta) {
  require(z.imag() > 0.0, "probe point must lie off the real line");
  HullProbe probe;
  probe.z = z;
  Complex g = z;
  for (std::size_t k = 1; k < path.times.size(); ++k) {
    const double dt = path.times[k] - path.times[k - 1];
    const double W = path.values[k];
    g = forward_slit(g, W, dt);
    if (std::abs(g - W) < blowup_delta || g.imag() < blowup_delta) {
      probe.blow_up_time = path.times[k];
      probe.g_T_z = g;
      return probe;
    }
  }
  probe.g_T_z = g;
  return probe;
}

double hcap_estimate(const DrivingPath& path) {
  if (path.steps() == 0) return 0.0;
  double spread = 0.0;
  for (double v : path.values) spread = std::max(spread, std::abs(v));
  const double far = 100.0 * (1.0 + spread + 2.0 * std::sqrt(path.horizon()));
  Complex sum = 0.0;
  for (int m = 0; m < 4; ++m) {
    const double theta = (2 * m + 1) * M_PI / 8.0;
    const Complex z = std::polar(far, theta);
    const HullProbe probe = forward_probe(path, z, 0.0);
    sum += z * (probe.g_T_z - z);
  }
  // The 1/z term of g_T(z) - z cancels in the real part over the
  // mirror-symmetric probe set.
  return sum.real() / 4.0;
}

double dist_to_segment(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double t =
      std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

double dist_to_trace(const Trace& tr, Complex z) {
  require(!tr.vertices.empty(), "trace must have at least one vertex");
  if (tr.vertices.size() == 1) return std::abs(z - tr.vertices[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < tr.vertices.size(); ++k)
    best = std::min(best, dist_to_segment(z, tr.vertices[k - 1], tr.vertices[k]));
  return best;
}

// ---------------------------------------------------------------------------

GrowthSummary grow_trace(const SleParams& p, const SimConfig& sim,
                         double escape_radius, double uniform_dt,
                         SampleStream& stream, GrowthObserver& obs,
                         DrivingPath* driver, Trace* trace) {
  require(escape_radius > 0.0, "escape radius must be positive");
  const bool uniform = sim.scheme == SimConfig::Scheme::Uniform;
  if (uniform) require(uniform_dt > 0.0, "uniform scheme needs dt > 0");

  GrowthSummary out;
  InverseLoewnerChain chain;
  const double sqrt_kappa = std::sqrt(p.kappa);
  const double dt_cap = 0.01 * escape_radius * escape_radius;
  const double dt_floor = 1e-16 * escape_radius * escape_radius;

  double t = 0.0;
  double V = 0.0;
  Complex tip = 0.0;
  double last_dt = 0.0;
  std::vector<std::pair<double, double>> pending;  // (dt, dW), top = next

  if (driver) {
    driver->times.assign(1, 0.0);
    driver->values.assign(1, 0.0);
    driver->kappa = p.kappa;
  }
  if (trace) {
    trace->vertices.assign(1, Complex(0.0));
    trace->times.assign(1, 0.0);
  }

  while (out.steps < sim.max_steps) {
    double dt = uniform_dt;
    double dW = 0.0;
    Complex cand;
    if (uniform) {
      dW = sqrt_kappa * std::sqrt(dt) * stream.normal();
      cand = chain.apply(Complex(V + dW, 2.0 * std::sqrt(dt)));
    } else {
      const double allowed = obs.max_segment(tip);
      if (pending.empty()) {
        double fresh = last_dt > 0.0 ? 2.0 * last_dt
                                     : 0.0625 * allowed * allowed;
        fresh = std::min(fresh, dt_cap);
        pending.emplace_back(fresh,
                             sqrt_kappa * std::sqrt(fresh) * stream.normal());
      }
      std::tie(dt, dW) = pending.back();
      pending.pop_back();
      const double hmax = obs.max_driver_step(V);
      const bool coarse = std::max(2.0 * std::sqrt(dt), std::abs(dW)) > hmax;
      if (!coarse || dt <= dt_floor) cand = chain.apply(Complex(V + dW, 2.0 * std::sqrt(dt)));
      if ((coarse || std::abs(cand - tip) > allowed) && dt > dt_floor) {
        // Brownian bridge midpoint: mean dW/2, variance kappa dt / 4.
        const double half = dW / 2.0 +
                            0.5 * sqrt_kappa * std::sqrt(dt) * stream.normal();
        pending.emplace_back(dt / 2.0, dW - half);
        pending.emplace_back(dt / 2.0, half);
        ++out.rejected;
        continue;
      }
    }

    if (cand.imag() < -kBranchTolerance)
      fail(ErrorCode::Internal, "trace vertex left the half-plane");
    chain.push(V + dW, dt);
    V += dW;
    t += dt;
    last_dt = dt;
    obs.on_step(V, dt);
    ++out.steps;
    if (driver) {
      driver->times.push_back(t);
      driver->values.push_back(V);
    }
    if (trace) {
      trace->vertices.push_back(cand);
      trace->times.push_back(t);
    }
    const bool keep_going = obs.on_segment(tip, cand, t);
    tip = cand;
    if (std::abs(tip) > escape_radius) {
      out.escaped = true;
      break;
    }
    if (!keep_going) {
      out.stopped = true;
      break;
    }
  }
  out.final_time = t;
  return out;
}

}  // namespace slelab
