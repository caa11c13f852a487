#include "slelab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "slelab/error.hpp"
#include "slelab/estimators.hpp"
#include "slelab/geometry.hpp"
#include "slelab/harness.hpp"

namespace slelab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string num(double x) { return format_number(x); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool full(const AcceptanceOptions& o) { return o.scale == AcceptanceScale::Full; }

std::size_t scaled(const AcceptanceOptions& o, std::size_t full_n,
                   std::size_t smoke_n) {
  return full(o) ? full_n : smoke_n;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig base_config(const AcceptanceOptions& o, ExperimentKind kind,
                             const std::string& sub, std::uint64_t seed_offset) {
  ExperimentConfig c;
  c.kind = kind;
  c.kappa = 8.0 / 3.0;
  c.sim = o.sim;
  c.seed = o.seed + seed_offset;
  c.workers = o.workers;
  c.reproducible = true;
  c.output_dir = (fs::path(o.out_dir) / sub).string();
  return c;
}

const EstimandRecord& find(const RunReport& r, const std::string& name,
                           std::size_t nth = 0) {
  for (const auto& e : r.estimands)
    if (e.name == name && nth-- == 0) {
      if (!e.error.empty()) fail(ErrorCode::Internal, name + ": " + e.error);
      return e;
    }
  fail(ErrorCode::Internal, "estimand " + name + " missing from the report");
}

// ---------------------------------------------------------------------------

Verdict c1_p_calculus(const AcceptanceOptions& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> logu(-3.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kTol = 1e-12;
  std::size_t checks = 0;
  double worst_cont = 0.0;
  for (double kappa : {1.0, 2.0, 8.0 / 3.0, 4.0, 6.0}) {
    const SleParams p = derive_params(kappa);
    for (int i = 0; i < 10'000; ++i) {
      const double y = unit(rng) < 0.1 ? 0.0 : std::pow(10.0, logu(rng));
      double x1 = std::pow(10.0, logu(rng));
      double x2 = std::pow(10.0, logu(rng));
      if (x1 > x2) std::swap(x1, x2);
      if (y > 0.0) {
        const double inner = std::pow(y, p.alpha - (2.0 - p.d)) *
                             std::pow(y, 2.0 - p.d);
        const double outer = std::pow(y, p.alpha);
        const double rel = std::abs(inner - outer) / outer;
        worst_cont = std::max(worst_cont, rel);
        if (rel > kTol)
          return {false, "branch mismatch at y = " + num(y) + ", kappa = " +
                             num(kappa) + ": rel " + num(rel)};
        if (std::abs(p_scaling(y, y, p) - outer) > kTol * outer)
          return {false, "P_y(y) differs from y^alpha at y = " + num(y)};
      }
      const double P1 = p_scaling(y, x1, p);
      const double P2 = p_scaling(y, x2, p);
      if (P1 > P2 * (1.0 + kTol))
        return {false, "P_y not monotone at y = " + num(y) + ", x1 = " +
                           num(x1) + ", x2 = " + num(x2)};
      const double ratio = P1 / P2;
      const double lo = std::pow(x1 / x2, p.alpha);
      const double hi = std::pow(x1 / x2, 2.0 - p.d);
      if (ratio < lo * (1.0 - kTol) || ratio > hi * (1.0 + kTol))
        return {false, "sandwich violated at y = " + num(y) + ", x1 = " +
                           num(x1) + ", x2 = " + num(x2) + ", kappa = " +
                           num(kappa)};
      ++checks;
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 1.0, std::to_string(checks) + " triples; worst branch gap " +
                          num(worst_cont) + "; " + num(secs) + " s (limit 1 s)"};
}

Verdict c2_loewner_exact(const AcceptanceOptions& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Constant driver on an irregular grid.
  std::vector<double> times{0.0}, values{0.0};
  for (int k = 0; k < 2000; ++k) times.push_back(times.back() + 1e-3 * (0.2 + unit(rng)));
  values.assign(times.size(), 0.0);
  const DrivingPath path = make_driving_path(times, values, 0.0);
  const Trace tr = trace_from_driver(path);
  double worst = 0.0;
  for (std::size_t k = 1; k < tr.vertices.size(); ++k) {
    const Complex exact(0.0, 2.0 * std::sqrt(tr.times[k]));
    worst = std::max(worst, std::abs(tr.vertices[k] - exact) / std::abs(exact));
  }
  double worst_probe = 0.0;
  const double T = path.horizon();
  for (int i = 0; i < 100; ++i) {
    const double re = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 2.0 * unit(rng));
    const Complex z(re, 0.05 + 2.0 * unit(rng));
    const HullProbe probe = forward_probe(path, z);
    Complex exact = std::sqrt(z * z + 4.0 * T);
    if (exact.imag() < 0.0) exact = -exact;
    if (probe.blew_up()) return {false, "unexpected blow-up at z = " + num(re)};
    worst_probe = std::max(worst_probe, std::abs(probe.g_T_z - exact) / std::abs(exact));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-9 && worst_probe <= 1e-9 && secs < 1.0;
  return {ok, "max tip error " + num(worst) + ", max probe error " +
                  num(worst_probe) + " (limit 1e-9); " + num(secs) + " s"};
}

Verdict c3_hcap(const AcceptanceOptions& o) {
  const auto t0 = Clock::now();
  const SleParams p = derive_params(8.0 / 3.0);
  // Default step rule with r_min = 0.1: ceil(c_res T / r_min^2).
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(o.sim.c_res * 1.0 / (0.1 * 0.1)));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DrivingPath path = sample_driver(p, 1.0, steps, o.seed + 1000 + s);
    const double c = hcap_estimate(path);
    worst = std::max(worst, std::abs(c - 2.0) / 2.0);
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.02 && secs < 60.0,
          "worst |c - 2T| / 2T over 100 seeds = " + num(worst) +
              " (limit 0.02), " + std::to_string(steps) + " steps; " +
              num(secs) + " s"};
}

struct ExponentRun {
  std::vector<double> radii;
  std::vector<EstimateResult> probs;
  EstimateResult slope;
};

ExponentRun run_exponent(const AcceptanceOptions& o, const std::string& sub,
                         Complex z, std::vector<double> radii, std::size_t n,
                         std::uint64_t seed_offset, const SimConfig& sim) {
  ExperimentConfig c = base_config(o, ExperimentKind::Exponent, sub, seed_offset);
  c.points = {z};
  c.radii = radii;
  c.n_samples = n;
  c.sim = sim;
  const RunReport rep = run_experiment(c);
  ExponentRun out;
  out.radii = radii;
  for (std::size_t k = 0; k < radii.size(); ++k)
    out.probs.push_back(find(rep, "hit_prob", k).result);
  out.slope = find(rep, "slope").result;
  return out;
}

std::string describe_probs(const ExponentRun& r) {
  std::string s;
  for (std::size_t k = 0; k < r.radii.size(); ++k)
    s += "p(" + num(r.radii[k]) + ")=" + num(r.probs[k].mean) + "+-" +
         num(r.probs[k].std_error) + " ";
  return s;
}

struct Suite {
  const AcceptanceOptions& o;
  std::optional<ExponentRun> interior;

  const ExponentRun& interior_run() {
    if (!interior)
      interior = run_exponent(o, "c4-interior", Complex(0.0, 1.0),
                              {0.2, 0.1, 0.05}, scaled(o, 20'000, 2'000), 4, o.sim);
    return *interior;
  }

  Verdict c4() {
    const ExponentRun& r = interior_run();
    const double target = 2.0 - derive_params(8.0 / 3.0).d;
    const double dev = std::abs(r.slope.mean - target);
    return {dev <= 3.0 * r.slope.std_error,
            "slope " + num(r.slope.mean) + " +- " + num(r.slope.std_error) +
                " vs 2-d = " + num(target) + " (" +
                num(dev / r.slope.std_error) + " stderr); " + describe_probs(r)};
  }

  Verdict c5() {
    const ExponentRun r = run_exponent(o, "c5-boundary", Complex(1.0, 0.0),
                                       {0.4, 0.2, 0.1}, scaled(o, 50'000, 4'000),
                                       5, o.sim);
    const double dev = std::abs(r.slope.mean - 2.0);
    const double tol = full(o) ? 3.0 * r.slope.std_error : 0.5;
    return {dev <= tol, "slope " + num(r.slope.mean) + " +- " +
                            num(r.slope.std_error) + " vs alpha = 2, tolerance " +
                            num(tol) + "; " + describe_probs(r)};
  }

  Verdict c6() {
    const std::size_t n = scaled(o, 20'000, 2'000);
    auto run = [&](Complex z, const std::string& sub, std::uint64_t off) {
      ExperimentConfig c = base_config(o, ExperimentKind::HitProb, sub, off);
      c.points = {z};
      c.radii = {0.05};
      c.n_samples = n;
      return find(run_experiment(c), "hit_prob").result;
    };
    const EstimateResult a = run(std::polar(1.0, std::numbers::pi / 4.0), "c6-quarter", 6);
    const EstimateResult b = run(Complex(0.0, 1.0), "c6-half", 7);
    if (a.mean <= 0.0 || b.mean <= 0.0) return {false, "no hits; more samples needed"};
    const double ratio = a.mean / b.mean;
    const double se = ratio * std::hypot(a.std_error / a.mean, b.std_error / b.mean);
    const double target = 0.5;
    const double green = std::pow(2.0, -2.0 / 3.0);
    return {std::abs(ratio - target) <= 3.0 * se,
            "ratio " + num(ratio) + " +- " + num(se) + " vs 2^-1 (" +
                num(std::abs(ratio - target) / se) + " stderr); the Green profile at |z| = 1 gives 2^(-2/3) = " +
                num(green) + " (" + num(std::abs(ratio - green) / se) + " stderr)"};
  }

  Verdict c7() {
    const SleParams p = derive_params(8.0 / 3.0);
    const std::size_t n = scaled(o, 10'000, 1'000);
    const std::vector<std::vector<Complex>> configs = {
        {Complex(0, 1), Complex(0, 2)},
        {Complex(0, 1), Complex(0, 2), Complex(1, 1)}};
    std::vector<double> radii;
    for (int k = 0; k < 4; ++k) radii.push_back(0.2 / std::pow(2.0, k));
    bool ok = true;
    std::string detail;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
      const auto& pts = configs[ci];
      std::vector<std::vector<double>> sets;
      for (double r : radii) sets.emplace_back(pts.size(), r);
      const auto est = hit_prob_coupled(pts, sets, p, n, o.sim,
                                        derive_seed(o.seed + 70, ci), o.workers);
      std::vector<double> ratio, se;
      for (std::size_t k = 0; k < radii.size(); ++k) {
        const double bound = multipoint_interior_bound(
            PointConfig::from_complex(pts, sets[k]), p);
        ratio.push_back(est[k].mean / bound);
        // A zero count still carries one-hit resolution.
        se.push_back(std::max(est[k].std_error, 1.0 / static_cast<double>(n)) / bound);
      }
      // Weighted least-squares slope of the ratio against the refinement index.
      double sw = 0, sx = 0, sy = 0;
      for (std::size_t k = 0; k < ratio.size(); ++k) {
        const double w = 1.0 / (se[k] * se[k]);
        sw += w;
        sx += w * static_cast<double>(k);
        sy += w * ratio[k];
      }
      const double xb = sx / sw, yb = sy / sw;
      double sxx = 0, sxy = 0;
      for (std::size_t k = 0; k < ratio.size(); ++k) {
        const double w = 1.0 / (se[k] * se[k]);
        sxx += w * (k - xb) * (k - xb);
        sxy += w * (k - xb) * (ratio[k] - yb);
      }
      const double slope = sxy / sxx;
      const double slope_se = std::sqrt(1.0 / sxx);
      const bool pass = slope <= 2.0 * slope_se;
      ok = ok && pass;
      detail += "n=" + std::to_string(pts.size()) + ": ratios";
      for (std::size_t k = 0; k < ratio.size(); ++k)
        detail += " " + num(ratio[k]) + "+-" + num(se[k]);
      detail += ", trend " + num(slope) + " +- " + num(slope_se) + (pass ? "; " : " (upward); ");
    }
    return {ok, detail};
  }

  Verdict c8() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(o.seed + 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 6);
    const double kappas[] = {1.0, 2.0, 8.0 / 3.0, 4.0, 6.0};
    std::size_t circles = 0;
    double tightest = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = count(rng);
      std::vector<Complex> pts;
      std::vector<double> radii;
      while (static_cast<int>(pts.size()) < n) {
        const Complex z(4.0 * unit(rng) - 2.0,
                        unit(rng) < 0.2 ? 0.0 : 2.0 * unit(rng));
        double gap = std::abs(z);
        for (const Complex& w : pts) gap = std::min(gap, std::abs(z - w));
        if (gap < 1e-3) continue;
        pts.push_back(z);
        radii.push_back(gap * std::pow(10.0, -4.0 + 4.3 * unit(rng)));
      }
      const PointConfig cfg = PointConfig::from_complex(pts, radii);
      const SleParams p = derive_params(kappas[trial % 5]);
      const auto levels = quantize_radii(cfg);
      std::vector<int> pairs;
      const auto pruned = prune_conflicts(build_circles(cfg, levels), cfg, &pairs);
      for (int c : pairs)
        if (c > 1) return {false, "trial " + std::to_string(trial) + ": |I_jk| = " + std::to_string(c)};
      const CircleFamily fam = partition_runs(pruned, cfg, levels);
      for (std::size_t a = 0; a < fam.circles.size(); ++a)
        for (std::size_t b = a + 1; b < fam.circles.size(); ++b)
          if (!circles_disjoint(fam.circles[a], fam.circles[b]))
            return {false, "trial " + std::to_string(trial) + ": circles intersect"};
      for (std::size_t j = 0; j < cfg.size(); ++j) {
        const int later = static_cast<int>(cfg.size() - 1 - j);
        if (fam.owners[j].runs > 1 + 3 * later)
          return {false, "trial " + std::to_string(trial) + ": |E_j| too large"};
      }
      const double prod = family_bound_product(fam, p);
      const double limit = std::pow(4.0, p.alpha * n * n) *
                           multipoint_interior_bound(cfg, p);
      if (!(prod <= limit))
        return {false, "trial " + std::to_string(trial) + ": family product " +
                           num(prod) + " exceeds " + num(limit)};
      tightest = std::max(tightest, std::log(prod / multipoint_interior_bound(cfg, p)) /
                                        std::log(std::pow(4.0, p.alpha * n * n)));
      circles += fam.circles.size();
    }
    const double secs = seconds_since(t0);
    return {secs < 10.0, "1000 configs, " + std::to_string(circles) +
                             " circles; largest product / bound as a power of 4^(alpha n^2): " +
                             num(tightest) + "; " + num(secs) + " s"};
  }

  Verdict c9() {
    const auto t0 = Clock::now();
    const SleParams p = derive_params(8.0 / 3.0);
    Trace tr;
    tr.vertices = {Complex(0.4, 0.3), Complex(1.2, 0.9)};
    tr.times = {0.0, 1.0};
    const double len = std::abs(tr.vertices[1] - tr.vertices[0]);
    const Rect d{0.0, 2.0, 0.0, 1.5};
    double worst = 0.0;
    for (double r : {0.1, 0.05}) {
      const double got = minkowski_content(tr, d, r, r / 10.0, p) / std::pow(r, p.d - 2.0);
      const double exact = 2.0 * r * len + std::numbers::pi * r * r;
      worst = std::max(worst, std::abs(got - exact) / exact);
    }
    const double secs = seconds_since(t0);
    return {worst <= 0.01 && secs < 1.0,
            "worst relative stadium-area error " + num(worst) + " (limit 0.01); " +
                num(secs) + " s"};
  }

  Verdict c10() {
    const SleParams p = derive_params(8.0 / 3.0);
    const std::size_t n = scaled(o, 2'000, 200);
    const std::vector<double> radii{0.1, 0.05, 0.025};
    const Rect d1{-1.0, 1.0, 0.2, 1.2};
    const Rect d2{0.0, 2.0, 0.5, 1.5};
    const MomentTable t1 = content_moments(p, d1, radii, 3, n, o.sim,
                                           derive_seed(o.seed + 10, 0), o.workers);
    bool ok = true;
    std::string detail = "D1 moments:";
    for (int m = 1; m <= 3; ++m) {
      detail += " m=" + std::to_string(m) + "[";
      for (std::size_t i = 0; i < radii.size(); ++i) {
        detail += (i ? " " : "") + num(t1.mean[i][m]);
        if (i > 0) {
          const double ratio = t1.mean[i][m] / t1.mean[i - 1][m];
          if (!(std::abs(ratio - 1.0) <= 0.10)) {
            ok = false;
            detail += "(ratio " + num(ratio) + ")";
          }
        }
      }
      detail += "]";
    }
    const MomentTable t2 = content_moments(p, d2, {radii.back()}, 1, n, o.sim,
                                           derive_seed(o.seed + 10, 1), o.workers);
    const double g1 = green_integral(d1, p);
    const double g2 = green_integral(d2, p);
    const double c1 = t1.mean.back()[1] / g1;
    const double c2 = t2.mean[0][1] / g2;
    const double agree = std::abs(c1 / c2 - 1.0);
    if (!(agree <= 0.15)) ok = false;
    detail += "; E[Cont]/int G: D1 " + num(c1) + ", D2 " + num(c2) +
              " (relative gap " + num(agree) + ", limit 0.15)";
    return {ok, detail};
  }

  Verdict c11() {
    const auto t0 = Clock::now();
    const std::size_t n = scaled(o, 200, 60);
    auto cfg = [&](const std::string& sub, unsigned workers, std::size_t samples) {
      ExperimentConfig c = base_config(o, ExperimentKind::HitProb, sub, 11);
      c.points = {Complex(0.0, 1.0)};
      c.radii = {0.2};
      c.n_samples = samples;
      c.workers = workers;
      return c;
    };
    run_experiment(cfg("c11-w1", 1, n));
    run_experiment(cfg("c11-w4", 4, n));
    run_experiment(cfg("c11-resume", 1, n / 2));
    const ExperimentConfig expect = cfg("c11-resume", 1, n);
    resume_experiment(expect.output_dir, n, &expect);
    const fs::path base(o.out_dir);
    const std::string a = read_file(base / "c11-w1" / "results.csv");
    const std::string b = read_file(base / "c11-w4" / "results.csv");
    const std::string c = read_file(base / "c11-resume" / "results.csv");
    const double secs = seconds_since(t0);
    const bool ok = !a.empty() && a == b && a == c && secs < 60.0;
    return {ok, std::string("1 vs 4 workers ") + (a == b ? "identical" : "DIFFER") +
                    ", resumed run " + (a == c ? "identical" : "DIFFERS") + "; " +
                    num(secs) + " s"};
  }

  Verdict c12() {
    const ExponentRun& base = interior_run();
    SimConfig wide = o.sim;
    wide.r_esc_factor *= 2.0;
    const ExponentRun r = run_exponent(o, "c12-truncation", Complex(0.0, 1.0),
                                       base.radii, base.probs[0].n_samples, 4, wide);
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < r.radii.size(); ++k) {
      const double diff = std::abs(r.probs[k].mean - base.probs[k].mean);
      const double se = std::hypot(r.probs[k].std_error, base.probs[k].std_error);
      const bool pass = diff < 2.0 * se || diff == 0.0;
      ok = ok && pass;
      detail += "r=" + num(r.radii[k]) + ": shift " + num(diff) + " vs 2 se " +
                num(2.0 * se) + "; ";
    }
    return {ok, detail};
  }
};

}  // namespace

std::vector<std::pair<int, std::string>> acceptance_criteria() {
  return {{1, "P_y calculus"},          {2, "Loewner exactness"},
          {3, "capacity normalization"}, {4, "interior exponent"},
          {5, "boundary exponent"},      {6, "Green angular profile"},
          {7, "multi-point ratio boundedness"},
          {8, "circle-family invariants"},
          {9, "Minkowski calibration"},  {10, "content moment stability"},
          {11, "determinism"},           {12, "truncation audit"}};
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts,
    const std::function<void(const CriterionResult&)>& on_result) {
  Suite suite{opts, std::nullopt};
  std::vector<CriterionResult> out;
  for (const auto& [id, name] : acceptance_criteria()) {
    if (!opts.only.empty() &&
        std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end())
      continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      switch (id) {
        case 1: v = c1_p_calculus(opts); break;
        case 2: v = c2_loewner_exact(opts); break;
        case 3: v = c3_hcap(opts); break;
        case 4: v = suite.c4(); break;
        case 5: v = suite.c5(); break;
        case 6: v = suite.c6(); break;
        case 7: v = suite.c7(); break;
        case 8: v = suite.c8(); break;
        case 9: v = suite.c9(); break;
        case 10: v = suite.c10(); break;
        case 11: v = suite.c11(); break;
        case 12: v = suite.c12(); break;
        default: break;
      }
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    CriterionResult r{id, name, v.passed, v.detail, seconds_since(t0)};
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[128];
  std::snprintf(head, sizeof head, "%s [%d] %s (%.1f s): ",
                r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace slelab
