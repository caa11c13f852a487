#include "slelab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "slelab/error.hpp"
#include "slelab/geometry.hpp"

namespace slelab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kKindNames[] = {"hit-prob", "exponent", "mink-moments",
                                      "bound-check", "integral"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json sim_to_json(const SimConfig& s) {
  return {{"scheme", s.scheme == SimConfig::Scheme::Adaptive ? "adaptive"
                                                             : "uniform"},
          {"c_res", s.c_res},
          {"r_esc_factor", s.r_esc_factor},
          {"blowup_delta", s.blowup_delta},
          {"near_res", s.near_res},
          {"far_eta", s.far_eta},
          {"h_eps", s.h_eps},
          {"grid_step_factor", s.grid_step_factor},
          {"max_steps", s.max_steps}};
}

json config_json(const ExperimentConfig& c) {
  json pts = json::array();
  for (const Complex& z : c.points) pts.push_back({z.real(), z.imag()});
  return {{"kind", to_string(c.kind)},
          {"kappa", c.kappa},
          {"points", pts},
          {"radii", c.radii},
          {"domain",
           {{"x0", c.domain.x0},
            {"x1", c.domain.x1},
            {"y0", c.domain.y0},
            {"y1", c.domain.y1}}},
          {"n_max", c.n_max},
          {"n_samples", c.n_samples},
          {"sim", sim_to_json(c.sim)},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"workers", c.workers},
          {"mode", c.reproducible ? "reproducible" : "throughput"}};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known)
      fail(ErrorCode::InvalidArgument,
           "unknown field '" + it.key() + "' in " + where);
  }
}

ExperimentConfig parse_config(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  check_keys(j,
             {"kind", "kappa", "points", "radii", "domain", "n_max",
              "n_samples", "sim", "seed", "output_dir", "workers", "mode"},
             "config");
  ExperimentConfig c;
  if (j.contains("kind")) c.kind = parse_kind(j.at("kind").get<std::string>());
  c.kappa = j.value("kappa", c.kappa);
  if (j.contains("points"))
    for (const auto& pt : j.at("points")) {
      require(pt.is_array() && pt.size() == 2,
              "each point must be a [re, im] pair");
      c.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
      require(std::isfinite(c.points.back().real()) && c.points.back().imag() >= 0.0 &&
                  std::isfinite(c.points.back().imag()),
              "points must lie in the closed upper half-plane");
    }
  if (j.contains("radii")) c.radii = j.at("radii").get<std::vector<double>>();
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    check_keys(d, {"x0", "x1", "y0", "y1"}, "domain");
    c.domain.x0 = d.value("x0", c.domain.x0);
    c.domain.x1 = d.value("x1", c.domain.x1);
    c.domain.y0 = d.value("y0", c.domain.y0);
    c.domain.y1 = d.value("y1", c.domain.y1);
  }
  c.n_max = j.value("n_max", c.n_max);
  if (j.contains("n_samples")) {
    require(j.at("n_samples").is_number_unsigned(),
            "n_samples must be a non-negative integer");
    c.n_samples = j.at("n_samples").get<std::size_t>();
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s,
               {"scheme", "c_res", "r_esc_factor", "blowup_delta", "near_res",
                "far_eta", "h_eps", "grid_step_factor", "max_steps"},
               "sim");
    const std::string scheme = s.value("scheme", std::string("adaptive"));
    if (scheme == "adaptive")
      c.sim.scheme = SimConfig::Scheme::Adaptive;
    else if (scheme == "uniform")
      c.sim.scheme = SimConfig::Scheme::Uniform;
    else
      fail(ErrorCode::InvalidArgument, "unknown scheme '" + scheme + "'");
    c.sim.c_res = s.value("c_res", c.sim.c_res);
    c.sim.r_esc_factor = s.value("r_esc_factor", c.sim.r_esc_factor);
    c.sim.blowup_delta = s.value("blowup_delta", c.sim.blowup_delta);
    c.sim.near_res = s.value("near_res", c.sim.near_res);
    c.sim.far_eta = s.value("far_eta", c.sim.far_eta);
    c.sim.h_eps = s.value("h_eps", c.sim.h_eps);
    c.sim.grid_step_factor = s.value("grid_step_factor", c.sim.grid_step_factor);
    c.sim.max_steps = s.value("max_steps", c.sim.max_steps);
  }
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.workers = j.value("workers", c.workers);
  const std::string mode = j.value("mode", std::string("reproducible"));
  require(mode == "reproducible" || mode == "throughput",
          "mode must be 'reproducible' or 'throughput'");
  c.reproducible = mode == "reproducible";
  return c;
}

PointConfig point_config(const std::vector<Complex>& pts,
                         const std::vector<double>& radii) {
  return PointConfig::from_complex(pts, radii);
}

std::vector<double> uniform_radii(std::size_t n, double r) {
  return std::vector<double>(n, r);
}

std::string describe_points(const std::vector<Complex>& pts) {
  std::string s = "z=";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) s += "|";
    s += format_number(pts[k].real()) + (pts[k].imag() < 0 ? "-" : "+") +
         format_number(std::abs(pts[k].imag())) + "i";
  }
  return s;
}

std::string describe_radii(const std::vector<double>& radii) {
  std::string s = "r=";
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k) s += "|";
    s += format_number(radii[k]);
  }
  return s;
}

// A sampled experiment: `width` values per sample index, reduced into one
// accumulator each, followed by derived estimands.
struct Plan {
  std::vector<std::string> names;
  std::vector<std::string> params;
  std::function<void(std::size_t, double*)> sample;
  std::function<void(const std::vector<Accumulator>&,
                     std::vector<EstimandRecord>&)>
      finalize;
  std::size_t width() const { return names.size(); }
};

EstimandRecord deterministic(std::string name, std::string params, double v) {
  return {std::move(name), std::move(params), {v, 0.0, 0, 0}, {}};
}

Plan make_plan(const ExperimentConfig& c) {
  const SleParams p = derive_params(c.kappa);
  Plan plan;
  switch (c.kind) {
    case ExperimentKind::HitProb:
    case ExperimentKind::BoundCheck: {
      const PointConfig cfg = point_config(c.points, c.radii);
      const std::uint64_t s0 = derive_seed(c.seed, 0);
      plan.names = {"hit_prob"};
      plan.params = {describe_points(c.points) + ";" + describe_radii(c.radii)};
      plan.sample = [cfg, p, sim = c.sim, s0](std::size_t i, double* out) {
        out[0] = hit_indicator(cfg, p, sim, s0, i);
      };
      if (c.kind == ExperimentKind::BoundCheck) {
        plan.finalize = [cfg, p, params = plan.params[0]](
                            const std::vector<Accumulator>& acc,
                            std::vector<EstimandRecord>& out) {
          const double bound = multipoint_interior_bound(cfg, p);
          const auto fam = build_family(cfg);
          const double family = family_bound_product(fam, p);
          const double n = static_cast<double>(cfg.size());
          const double limit = std::pow(4.0, p.alpha * n * n) *
                               multipoint_interior_bound(
                                   quantized_config(cfg, quantize_radii(cfg)), p);
          out.push_back(deterministic("interior_bound", params, bound));
          out.push_back(deterministic("family_product", params, family));
          out.push_back(deterministic("family_limit", params, limit));
          EstimandRecord ratio{"ratio", params, acc[0].result(), {}};
          ratio.result.mean /= bound;
          ratio.result.std_error /= bound;
          out.push_back(ratio);
        };
      }
      break;
    }
    case ExperimentKind::Exponent: {
      std::vector<PointConfig> cfgs;
      for (double r : c.radii) {
        cfgs.push_back(point_config(c.points, uniform_radii(c.points.size(), r)));
        plan.names.push_back("hit_prob");
        plan.params.push_back(describe_points(c.points) + ";r=" +
                              format_number(r));
      }
      plan.sample = [cfgs, p, sim = c.sim, seed = c.seed](std::size_t i,
                                                           double* out) {
        for (std::size_t k = 0; k < cfgs.size(); ++k)
          out[k] = hit_indicator(cfgs[k], p, sim, derive_seed(seed, k), i);
      };
      plan.finalize = [radii = c.radii, pts = c.points](
                          const std::vector<Accumulator>& acc,
                          std::vector<EstimandRecord>& out) {
        EstimandRecord rec{"slope", describe_points(pts) + ";" +
                                        describe_radii(radii),
                           {}, {}};
        try {
          std::vector<EstimateResult> est;
          for (const auto& a : acc) est.push_back(a.result());
          const ExponentFit fit = exponent_fit(radii, est);
          rec.result = {fit.slope, fit.slope_stderr, acc[0].count(), 0};
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
        out.push_back(rec);
      };
      break;
    }
    case ExperimentKind::MinkMoments: {
      const std::size_t nm = static_cast<std::size_t>(c.n_max);
      for (double r : c.radii)
        for (std::size_t m = 1; m <= nm; ++m) {
          plan.names.push_back("moment_" + std::to_string(m));
          plan.params.push_back("r=" + format_number(r));
        }
      plan.sample = [p, d = c.domain, radii = c.radii, nm, sim = c.sim,
                     s0 = derive_seed(c.seed, 0)](std::size_t i, double* out) {
        const auto cont = content_sample(p, d, radii, sim, s0, i);
        for (std::size_t k = 0; k < radii.size(); ++k) {
          double pw = 1.0;
          for (std::size_t m = 1; m <= nm; ++m) {
            pw *= cont[k];
            out[k * nm + m - 1] = pw;
          }
        }
      };
      break;
    }
    case ExperimentKind::Integral: {
      plan.finalize = [c, p](const std::vector<Accumulator>&,
                             std::vector<EstimandRecord>& out) {
        const std::string params = "n=" + std::to_string(c.n_max);
        EstimandRecord lk{"integral_lk", params, {}, {}};
        try {
          lk.result = integral_lk_bound(Domain::rectangle(c.domain), c.n_max,
                                        c.n_samples, p, derive_seed(c.seed, 0));
        } catch (const std::exception& e) {
          lk.error = e.what();
        }
        out.push_back(lk);
        EstimandRecord g{"green_integral", "n=1", {}, {}};
        try {
          g.result.mean = green_integral(c.domain, p);
        } catch (const std::exception& e) {
          g.error = e.what();
        }
        out.push_back(g);
      };
      break;
    }
  }
  return plan;
}

// Runs samples [begin, end) and folds them into `acc`. Returns the first
// sample error, if any.
std::string run_samples(const Plan& plan, const ExperimentConfig& c,
                        std::size_t begin, std::size_t end,
                        std::vector<Accumulator>& acc) {
  const std::size_t w = plan.width();
  if (w == 0 || begin >= end) return {};
  std::mutex err_mu;
  std::string first_error;
  std::size_t first_index = end;
  auto record = [&](std::size_t i, const char* what) {
    std::lock_guard<std::mutex> lock(err_mu);
    if (i < first_index) {
      first_index = i;
      first_error = "sample " + std::to_string(i) + ": " + what;
    }
  };

  if (c.reproducible) {
    std::vector<double> values((end - begin) * w, 0.0);
    parallel_for(begin, end, c.workers, [&](std::size_t i) {
      try {
        plan.sample(i, values.data() + (i - begin) * w);
      } catch (const std::exception& e) {
        record(i, e.what());
      }
    });
    if (!first_error.empty()) return first_error;
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t k = 0; k < w; ++k) acc[k].add(values[(i - begin) * w + k]);
    return {};
  }

  // Throughput mode: contiguous blocks per worker, merged in worker order.
  const unsigned workers = std::max(1u, c.workers);
  const std::size_t n = end - begin;
  std::vector<std::vector<Accumulator>> partial(workers,
                                                std::vector<Accumulator>(w));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t lo = begin + n * t / workers;
    const std::size_t hi = begin + n * (t + 1) / workers;
    threads.emplace_back([&, t, lo, hi] {
      std::vector<double> row(w);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          plan.sample(i, row.data());
        } catch (const std::exception& e) {
          record(i, e.what());
          return;
        }
        for (std::size_t k = 0; k < w; ++k) partial[t][k].add(row[k]);
      }
    });
  }
  for (auto& th : threads) th.join();
  if (!first_error.empty()) return first_error;
  for (const auto& part : partial)
    for (std::size_t k = 0; k < w; ++k) acc[k].merge(part[k]);
  return {};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string results_csv(const RunReport& r) {
  std::string out = "estimand,params,mean,stderr,n\n";
  for (const auto& e : r.estimands) {
    if (!e.error.empty()) continue;
    out += e.name + "," + hash_hex(fnv1a(e.params)) + "," +
           full_precision(e.result.mean) + "," +
           full_precision(e.result.std_error) + "," +
           std::to_string(e.result.n_samples) + "\n";
  }
  return out;
}

void persist(const ExperimentConfig& c, const RunReport& r,
             const std::vector<Accumulator>& acc, std::size_t completed,
             const std::string& run_error) {
  const fs::path dir(r.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  json est = json::array();
  for (const auto& e : r.estimands) {
    json item = {{"name", e.name},
                 {"params", e.params},
                 {"params_digest", hash_hex(fnv1a(e.params))}};
    if (e.error.empty()) {
      item["mean"] = e.result.mean;
      item["stderr"] = e.result.std_error;
      item["n"] = e.result.n_samples;
      item["error"] = nullptr;
    } else {
      item["error"] = e.error;
    }
    est.push_back(item);
  }
  json state = json::array();
  for (const auto& a : acc)
    state.push_back({{"n", a.count()}, {"mean", a.mean()}, {"m2", a.m2()}});
  json manifest = {{"version", r.version},
                   {"config_hash", hash_hex(r.config_hash)},
                   {"kind", to_string(c.kind)},
                   {"mode", c.reproducible ? "reproducible" : "throughput"},
                   {"n_samples", r.n_samples},
                   {"wall_seconds", r.wall_seconds},
                   {"estimands", est},
                   {"resume",
                    {{"completed_samples", completed},
                     {"substreams", "(derive_seed(seed, k), index) for index < "
                                    "completed_samples"},
                     {"accumulators", state}}}};
  if (!run_error.empty()) manifest["error"] = run_error;

  write_text(dir / "config.json", config_to_json(c) + "\n");
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "results.csv", results_csv(r));
}

RunReport execute(const ExperimentConfig& c, std::vector<Accumulator> acc,
                  std::size_t done) {
  const auto t0 = std::chrono::steady_clock::now();
  const Plan plan = make_plan(c);
  if (acc.empty()) acc.assign(plan.width(), Accumulator{});
  require(acc.size() == plan.width(),
          "stored reduction state does not match the experiment");

  RunReport report;
  report.version = SLELAB_VERSION;
  report.config_hash = config_hash(c);
  report.n_samples = c.n_samples;
  report.output_dir = output_directory(c);

  const std::string err = run_samples(plan, c, done, c.n_samples, acc);
  const std::size_t completed = err.empty() ? c.n_samples : done;
  for (std::size_t k = 0; k < plan.width(); ++k) {
    EstimandRecord rec{plan.names[k], plan.params[k], acc[k].result(report.config_hash), {}};
    if (!err.empty()) rec.error = err;
    report.estimands.push_back(rec);
  }
  if (plan.finalize && err.empty()) plan.finalize(acc, report.estimands);
  for (auto& e : report.estimands) e.result.config_hash = report.config_hash;

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  persist(c, report, acc, completed, err);
  return report;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  return kKindNames[static_cast<int>(k)];
}

ExperimentKind parse_kind(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == kKindNames[i]) return static_cast<ExperimentKind>(i);
  fail(ErrorCode::InvalidArgument, "unknown experiment kind '" + s + "'");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed config: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("bad config field: ") + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return config_json(cfg).dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  json j = config_json(cfg);
  j.erase("n_samples");
  j.erase("workers");
  j.erase("output_dir");
  return fnv1a(j.dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const ExperimentConfig& c) {
  const SleParams p = derive_params(c.kappa);
  (void)p;
  require(c.workers >= 1, "workers must be at least 1");
  switch (c.kind) {
    case ExperimentKind::HitProb:
    case ExperimentKind::BoundCheck: {
      require(!c.points.empty(), "at least one point is required");
      require(c.n_samples >= 1, "n_samples must be at least 1");
      check_resolution(point_config(c.points, c.radii), c.sim);
      break;
    }
    case ExperimentKind::Exponent: {
      require(!c.points.empty(), "at least one point is required");
      require(c.n_samples >= 1, "n_samples must be at least 1");
      require(c.radii.size() >= 3, "exponent fit needs at least 3 radii");
      for (double r : c.radii)
        check_resolution(point_config(c.points, uniform_radii(c.points.size(), r)),
                         c.sim);
      break;
    }
    case ExperimentKind::MinkMoments: {
      Domain::rectangle(c.domain);
      require(c.n_samples >= 1, "n_samples must be at least 1");
      require(c.n_max >= 1 && c.n_max <= 4, "n_max must lie in 1..4");
      require(!c.radii.empty(), "at least one radius is required");
      for (double r : c.radii) require(r > 0.0, "radii must be positive");
      if (c.domain.area() > 0.0) {
        const double rmin = *std::min_element(c.radii.begin(), c.radii.end());
        require(c.domain.width() >= rmin / c.sim.grid_step_factor &&
                    c.domain.height() >= rmin / c.sim.grid_step_factor,
                "domain is smaller than one grid cell");
      }
      for (double r : c.radii)
        check_resolution(PointConfig::from_complex(std::vector<Complex>{Complex(0, 1)},
                                                   std::vector<double>{r}),
                         c.sim);
      break;
    }
    case ExperimentKind::Integral: {
      Domain::rectangle(c.domain);
      require(c.n_max >= 1 && c.n_max <= 4, "n must lie in 1..4");
      require(c.n_samples >= 10'000, "integral needs at least 10^4 points");
      break;
    }
  }
}

std::string output_directory(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("SLELAB_OUTPUT_DIR"); env && *env) return env;
  return "slelab-out";
}

bool RunReport::ok() const {
  return std::all_of(estimands.begin(), estimands.end(),
                     [](const EstimandRecord& e) { return e.error.empty(); });
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  return execute(cfg, {}, 0);
}

RunReport resume_experiment(const std::string& dir, std::size_t n_samples,
                            const ExperimentConfig* expected) {
  const fs::path base(dir);
  ExperimentConfig stored = config_from_json(read_text(base / "config.json"));
  json manifest;
  try {
    manifest = json::parse(read_text(base / "manifest.json"));
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("malformed manifest: ") + e.what());
  }
  const std::string recorded = manifest.value("config_hash", std::string());
  if (recorded != hash_hex(config_hash(stored)))
    fail(ErrorCode::ConfigMismatch,
         "manifest hash " + recorded + " does not match the stored config");
  if (expected && hash_hex(config_hash(*expected)) != recorded)
    fail(ErrorCode::ConfigMismatch,
         "config hash " + hash_hex(config_hash(*expected)) +
             " differs from the manifest's " + recorded);

  const json& st = manifest.at("resume");
  const std::size_t done = st.at("completed_samples").get<std::size_t>();
  require(n_samples >= done, "resume cannot shrink a run below " +
                                 std::to_string(done) + " samples");
  std::vector<Accumulator> acc;
  for (const auto& a : st.at("accumulators"))
    acc.push_back(Accumulator::restore(a.at("n").get<std::size_t>(),
                                       a.at("mean").get<double>(),
                                       a.at("m2").get<double>()));
  stored.n_samples = n_samples;
  stored.output_dir = dir;
  if (expected) {
    stored.workers = expected->workers;
  }
  validate_config(stored);
  if (stored.kind == ExperimentKind::Integral) acc.clear();
  return execute(stored, std::move(acc), stored.kind == ExperimentKind::Integral ? 0 : done);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  // splitmix64 finalizer over (seed, k).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace slelab
