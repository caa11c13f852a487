// slelab command-line front end. Talks to the library only through the C
// interface in slelab.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slelab/slelab.h"
#include "svg.hpp"

using nlohmann::json;
namespace plot = slelab::plot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCriterion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Carries a library status out of a subcommand.
struct ApiError : std::runtime_error {
  int status;
  ApiError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(int status, const char* what) {
  if (status != SLELAB_OK)
    throw ApiError(status, std::string(what) + ": " + slelab_last_error());
}

int exit_code_for(int status) {
  switch (status) {
    case SLELAB_ERR_INVALID_ARGUMENT:
    case SLELAB_ERR_RESOLUTION:
    case SLELAB_ERR_CONFIG_MISMATCH:
    case SLELAB_ERR_NULL_POINTER:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using PathPtr = std::unique_ptr<slelab_path, Deleter<slelab_path, slelab_path_destroy>>;
using TracePtr = std::unique_ptr<slelab_trace, Deleter<slelab_trace, slelab_trace_destroy>>;
using PointsPtr = std::unique_ptr<slelab_points, Deleter<slelab_points, slelab_points_destroy>>;
using FamilyPtr = std::unique_ptr<slelab_family, Deleter<slelab_family, slelab_family_destroy>>;
using ExperimentPtr =
    std::unique_ptr<slelab_experiment, Deleter<slelab_experiment, slelab_experiment_destroy>>;
using ReportPtr = std::unique_ptr<slelab_report, Deleter<slelab_report, slelab_report_destroy>>;

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(std::string("malformed ") + what + " '" + text + "'");
    }
    if (used != item.size())
      throw UsageError(std::string("malformed ") + what + " '" + text + "'");
    out.push_back(v);
  }
  if (expected && out.size() != expected)
    throw UsageError(std::string("malformed ") + what + " '" + text + "'");
  return out;
}

std::pair<double, double> parse_point(const std::string& text) {
  const auto v = parse_numbers(text, 2, "point (expected re,im)");
  return {v[0], v[1]};
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ApiError(SLELAB_ERR_IO, "cannot open " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  double kappa = 0.0;
  double t = 1.0;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  std::string out, svg;
};

int cmd_simulate(const SimulateArgs& a) {
  slelab_path* raw_path = nullptr;
  check(slelab_path_sample(a.kappa, a.t, a.steps, a.seed, &raw_path), "simulate");
  PathPtr path(raw_path);
  slelab_trace* raw_trace = nullptr;
  check(slelab_trace_from_path(path.get(), &raw_trace), "simulate");
  TracePtr trace(raw_trace);
  std::size_t n = 0;
  check(slelab_trace_size(trace.get(), &n), "simulate");
  std::vector<double> t(n), re(n), im(n);
  check(slelab_trace_get(trace.get(), t.data(), re.data(), im.data(), n), "simulate");

  Sink sink(a.out);
  auto& o = sink.out();
  o << "t,re,im\n";
  for (std::size_t k = 0; k < n; ++k)
    o << fmt17(t[k]) << ',' << fmt17(re[k]) << ',' << fmt17(im[k]) << '\n';
  if (!a.svg.empty()) {
    plot::PlotSpec spec;
    spec.kind = plot::PlotKind::Trace;
    spec.title = "SLE trace, kappa = " + fmt12(a.kappa);
    spec.x_label = "Re";
    spec.y_label = "Im";
    spec.series.push_back({"trace", re, im});
    spec.output_path = a.svg;
    plot::write_svg(spec);
  }
  return kExitOk;
}

// ---- bound -----------------------------------------------------------------

struct PointArgs {
  std::vector<std::string> points;
  std::vector<double> radii;
};

PointsPtr make_points(const PointArgs& a) {
  if (a.points.size() != a.radii.size())
    throw UsageError("need one radius per point");
  std::vector<double> re, im;
  for (const auto& s : a.points) {
    const auto [x, y] = parse_point(s);
    re.push_back(x);
    im.push_back(y);
  }
  slelab_points* raw = nullptr;
  check(slelab_points_create(re.data(), im.data(), a.radii.data(), re.size(), &raw),
        "points");
  return PointsPtr(raw);
}

struct BoundArgs {
  PointArgs pts;
  double kappa = 8.0 / 3.0;
  std::string json_out, svg;
};

int cmd_bound(const BoundArgs& a) {
  PointsPtr pts = make_points(a.pts);
  double bound = 0, product = 0, limit = 0;
  check(slelab_multipoint_interior_bound(pts.get(), a.kappa, &bound), "bound");
  slelab_family* raw = nullptr;
  check(slelab_family_build(pts.get(), &raw), "bound");
  FamilyPtr fam(raw);
  check(slelab_family_bound_product(fam.get(), a.kappa, &product), "bound");
  check(slelab_family_limit(pts.get(), a.kappa, &limit), "bound");

  std::cout << "interior_bound " << fmt12(bound) << '\n'
            << "family_product " << fmt12(product) << '\n'
            << "family_limit " << fmt12(limit) << '\n'
            << "verdict " << (product <= limit ? "within" : "exceeds")
            << " 4^(alpha n^2) limit\n";

  std::size_t nc = 0, nr = 0;
  check(slelab_family_circle_count(fam.get(), &nc), "bound");
  check(slelab_family_run_count(fam.get(), &nr), "bound");
  json doc;
  doc["kappa"] = a.kappa;
  doc["interior_bound"] = bound;
  doc["family_product"] = product;
  doc["family_limit"] = limit;
  json circles = json::array();
  plot::PlotSpec spec;
  for (std::size_t i = 0; i < nc; ++i) {
    double re, im, radius;
    std::size_t owner;
    int level, run;
    check(slelab_family_circle(fam.get(), i, &re, &im, &radius, &owner, &level, &run),
          "bound");
    circles.push_back({{"center", {re, im}}, {"radius", radius}, {"owner", owner},
                       {"level", level}, {"run", run}});
    spec.circles.push_back({re, im, radius, static_cast<int>(owner)});
  }
  json runs = json::array();
  for (std::size_t i = 0; i < nr; ++i) {
    std::size_t owner;
    double outer, inner;
    int count;
    check(slelab_family_run(fam.get(), i, &owner, &outer, &inner, &count), "bound");
    runs.push_back({{"owner", owner}, {"outer_radius", outer},
                    {"inner_radius", inner}, {"count", count}});
  }
  doc["circles"] = circles;
  doc["runs"] = runs;
  if (a.json_out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    Sink sink(a.json_out);
    sink.out() << doc.dump(2) << '\n';
  }
  if (!a.svg.empty()) {
    for (const auto& s : a.pts.points) spec.markers.push_back(parse_point(s));
    spec.kind = plot::PlotKind::Circles;
    spec.title = "circle family";
    spec.x_label = "Re";
    spec.y_label = "Im";
    spec.output_path = a.svg;
    plot::write_svg(spec);
  }
  return kExitOk;
}

// ---- green -----------------------------------------------------------------

struct GreenArgs {
  double kappa = 8.0 / 3.0;
  std::string point;
  std::string integral;  // x0,x1,y0,y1
  double x = 0.0, y_min = 0.01, y_max = 1.0;
  std::size_t count = 0;
  std::string out, svg;
};

int cmd_green(const GreenArgs& a) {
  if (!a.point.empty()) {
    const auto [re, im] = parse_point(a.point);
    double g = 0;
    check(slelab_green_halfplane(a.kappa, re, im, &g), "green");
    std::cout << fmt12(g) << '\n';
  }
  if (!a.integral.empty()) {
    const auto r = parse_numbers(a.integral, 4, "rectangle (expected x0,x1,y0,y1)");
    double v = 0;
    check(slelab_green_integral(a.kappa, r[0], r[1], r[2], r[3], &v), "green");
    std::cout << "integral " << fmt12(v) << '\n';
  }
  if (a.count > 0) {
    if (!(a.y_min > 0 && a.y_max > a.y_min))
      throw UsageError("need 0 < --y-min < --y-max");
    plot::Series s{"G(x + iy)", {}, {}};
    const double ratio = a.count > 1 ? std::pow(a.y_max / a.y_min, 1.0 / (a.count - 1)) : 1.0;
    double y = a.y_min;
    for (std::size_t k = 0; k < a.count; ++k, y *= ratio) {
      double g = 0;
      check(slelab_green_halfplane(a.kappa, a.x, y, &g), "green");
      s.x.push_back(y);
      s.y.push_back(g);
    }
    Sink sink(a.out);
    sink.out() << "y,green\n";
    for (std::size_t k = 0; k < s.x.size(); ++k)
      sink.out() << fmt17(s.x[k]) << ',' << fmt17(s.y[k]) << '\n';
    if (!a.svg.empty()) {
      plot::PlotSpec spec;
      spec.kind = plot::PlotKind::LogLog;
      spec.title = "Green's function, x = " + fmt12(a.x);
      spec.x_label = "Im z";
      spec.y_label = "G(z)";
      spec.series.push_back(s);
      spec.output_path = a.svg;
      plot::write_svg(spec);
    }
  }
  if (a.point.empty() && a.integral.empty() && a.count == 0)
    throw UsageError("green needs --point, --integral or --count");
  return kExitOk;
}

// ---- experiments (hit-prob, mink) ------------------------------------------

struct RunArgs {
  std::string config;
  std::string resume;
  double kappa = 8.0 / 3.0;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output_dir;
  bool throughput = false;
  std::string scheme;
  double r_esc_factor = 0.0;
};

void apply_run_flags(const RunArgs& a, json& cfg) {
  cfg["kappa"] = a.kappa;
  cfg["n_samples"] = a.n;
  cfg["seed"] = a.seed;
  cfg["workers"] = a.workers;
  cfg["mode"] = a.throughput ? "throughput" : "reproducible";
  if (!a.output_dir.empty()) cfg["output_dir"] = a.output_dir;
  if (!a.scheme.empty()) cfg["sim"]["scheme"] = a.scheme;
  if (a.r_esc_factor > 0) cfg["sim"]["r_esc_factor"] = a.r_esc_factor;
}

ExperimentPtr load_experiment(const std::string& text) {
  slelab_experiment* raw = nullptr;
  check(slelab_experiment_from_json(text.c_str(), &raw), "config");
  ExperimentPtr exp(raw);
  check(slelab_experiment_validate(exp.get()), "config");
  return exp;
}

struct Estimand {
  std::string name, params, error;
  double mean, se;
  std::size_t n;
};

std::vector<Estimand> estimands(const slelab_report* rep) {
  std::size_t count = 0;
  check(slelab_report_count(rep, &count), "report");
  std::vector<Estimand> out;
  for (std::size_t i = 0; i < count; ++i) {
    const char *name, *params, *error;
    Estimand e{};
    check(slelab_report_estimand(rep, i, &name, &params, &e.mean, &e.se, &e.n, &error),
          "report");
    e.name = name;
    e.params = params;
    e.error = error;
    out.push_back(e);
  }
  return out;
}

int print_report(const slelab_report* rep) {
  const char* dir = nullptr;
  check(slelab_report_output_dir(rep, &dir), "report");
  int ok = 0;
  check(slelab_report_ok(rep, &ok), "report");
  for (const auto& e : estimands(rep)) {
    std::cout << e.name << " [" << e.params << "] ";
    if (e.error.empty())
      std::cout << fmt12(e.mean) << " +- " << fmt12(e.se) << " (n=" << e.n << ")\n";
    else
      std::cout << "error: " << e.error << '\n';
  }
  std::cout << "output " << dir << '\n';
  return ok ? kExitOk : kExitRuntime;
}

ReportPtr run_or_resume(const RunArgs& a, const std::string& text) {
  slelab_report* raw = nullptr;
  if (!a.resume.empty()) {
    ExperimentPtr expected;
    if (!a.config.empty()) expected = load_experiment(text);
    check(slelab_experiment_resume(a.resume.c_str(), a.n, expected.get(), &raw),
          "resume");
  } else {
    ExperimentPtr exp = load_experiment(text);
    check(slelab_experiment_run(exp.get(), &raw), "run");
  }
  return ReportPtr(raw);
}

struct HitArgs {
  RunArgs run;
  PointArgs pts;
  std::string kind = "hit-prob";
};

int cmd_hit_prob(const HitArgs& a) {
  std::string text;
  if (!a.run.config.empty()) {
    text = read_file(a.run.config);
  } else if (a.run.resume.empty()) {
    json cfg;
    cfg["kind"] = a.kind;
    json pts = json::array();
    for (const auto& s : a.pts.points) {
      const auto [re, im] = parse_point(s);
      pts.push_back({re, im});
    }
    cfg["points"] = pts;
    cfg["radii"] = a.pts.radii;
    apply_run_flags(a.run, cfg);
    text = cfg.dump();
  }
  ReportPtr rep = run_or_resume(a.run, text);
  return print_report(rep.get());
}

struct MinkArgs {
  RunArgs run;
  std::string domain = "-1,1,0.2,1.2";
  std::vector<double> radii{0.1, 0.05, 0.025};
  int moments = 3;
  std::string csv, svg;
};

int cmd_mink(const MinkArgs& a) {
  std::string text;
  if (!a.run.config.empty()) {
    text = read_file(a.run.config);
  } else if (a.run.resume.empty()) {
    const auto d = parse_numbers(a.domain, 4, "domain (expected x0,x1,y0,y1)");
    json cfg;
    cfg["kind"] = "mink-moments";
    cfg["domain"] = {{"x0", d[0]}, {"x1", d[1]}, {"y0", d[2]}, {"y1", d[3]}};
    cfg["radii"] = a.radii;
    cfg["n_max"] = a.moments;
    apply_run_flags(a.run, cfg);
    text = cfg.dump();
  }
  ReportPtr rep = run_or_resume(a.run, text);
  const int status = print_report(rep.get());

  std::map<std::string, plot::Series> by_moment;
  Sink sink(a.csv.empty() ? std::string() : a.csv);
  if (!a.csv.empty()) sink.out() << "r,m,mean,stderr,n\n";
  for (const auto& e : estimands(rep.get())) {
    if (e.name.rfind("moment_", 0) != 0 || !e.error.empty()) continue;
    const std::string m = e.name.substr(7);
    const double r = std::stod(e.params.substr(e.params.find('=') + 1));
    if (!a.csv.empty())
      sink.out() << fmt17(r) << ',' << m << ',' << fmt17(e.mean) << ','
                 << fmt17(e.se) << ',' << e.n << '\n';
    auto& s = by_moment[m];
    s.label = "m = " + m;
    s.x.push_back(r);
    s.y.push_back(e.mean);
  }
  if (!a.svg.empty()) {
    plot::PlotSpec spec;
    spec.kind = plot::PlotKind::LogLog;
    spec.title = "content moments";
    spec.x_label = "r";
    spec.y_label = "E[Cont^m]";
    for (auto& [m, s] : by_moment) spec.series.push_back(s);
    spec.output_path = a.svg;
    plot::write_svg(spec);
  }
  return status;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string config;
  bool smoke = false;
  std::vector<int> only;
  unsigned workers = 1;
  std::string out_dir;
};

void print_criterion(int id, const char* name, int passed, const char* detail,
                     double seconds, void*) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s): ", seconds);
  std::cout << (passed ? "PASS" : "FAIL") << " [" << id << "] " << name << buf
            << detail << std::endl;
}

int cmd_verify(VerifyArgs a) {
  if (!a.config.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(a.config));
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad verify config: ") + e.what());
    }
    for (const auto& [key, value] : doc.items())
      if (key != "scale" && key != "criteria" && key != "workers" && key != "output_dir")
        throw UsageError("unknown verify config key '" + key + "'");
    try {
      if (doc.contains("scale")) a.smoke = doc["scale"].get<std::string>() == "smoke";
      if (doc.contains("criteria")) a.only = doc["criteria"].get<std::vector<int>>();
      if (doc.contains("workers")) a.workers = doc["workers"].get<unsigned>();
      if (doc.contains("output_dir")) a.out_dir = doc["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad verify config: ") + e.what());
    }
  }
  int failed = 0;
  check(slelab_acceptance_run(a.smoke ? "smoke" : "full",
                              a.only.empty() ? nullptr : a.only.data(), a.only.size(),
                              a.workers, a.out_dir.empty() ? nullptr : a.out_dir.c_str(),
                              print_criterion, nullptr, &failed),
        "verify");
  std::cout << (failed ? "FAILED " : "all passed ") << "(" << failed << " failing)\n";
  return failed ? kExitCriterion : kExitOk;
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--config", a.config, "experiment JSON; overrides the flags");
  cmd->add_option("--resume", a.resume, "extend the finished run in this directory to --n samples");
  cmd->add_option("--kappa", a.kappa, "SLE parameter in (0, 8)");
  cmd->add_option("-n,--n", a.n, "number of samples");
  cmd->add_option("--seed", a.seed, "master seed");
  cmd->add_option("--workers", a.workers, "worker threads");
  cmd->add_option("--output-dir", a.output_dir, "artifact directory");
  cmd->add_flag("--throughput", a.throughput, "parallel reduction (not bit-reproducible)");
  cmd->add_option("--scheme", a.scheme, "adaptive or uniform");
  cmd->add_option("--r-esc-factor", a.r_esc_factor, "escape radius multiplier");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slelab: multi-point SLE hitting estimates"};
  app.set_version_flag("--version", std::string(slelab_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "sample a driver and write the trace as CSV");
  c_sim->add_option("--kappa", sim.kappa, "SLE parameter in (0, 8)")->required();
  c_sim->add_option("--t", sim.t, "time horizon");
  c_sim->add_option("--steps", sim.steps, "number of uniform steps");
  c_sim->add_option("--seed", sim.seed, "seed");
  c_sim->add_option("--out", sim.out, "CSV path (default: stdout)");
  c_sim->add_option("--svg", sim.svg, "write the trace polyline as SVG");

  BoundArgs bound;
  auto* c_bound = app.add_subcommand("bound", "multi-point bound and circle family");
  c_bound->add_option("--points", bound.pts.points, "points as re,im")->required();
  c_bound->add_option("--radii", bound.pts.radii, "one radius per point")->required();
  c_bound->add_option("--kappa", bound.kappa, "SLE parameter in (0, 8)");
  c_bound->add_option("--json", bound.json_out, "family JSON path (default: stdout)");
  c_bound->add_option("--svg", bound.svg, "write the circle family as SVG");

  GreenArgs green;
  auto* c_green = app.add_subcommand("green", "evaluate the half-plane Green's function");
  c_green->add_option("--kappa", green.kappa, "SLE parameter in (0, 8)");
  c_green->add_option("--point", green.point, "single point re,im");
  c_green->add_option("--integral", green.integral, "integrate over x0,x1,y0,y1");
  c_green->add_option("--x", green.x, "real part of the vertical sweep");
  c_green->add_option("--y-min", green.y_min, "sweep start");
  c_green->add_option("--y-max", green.y_max, "sweep end");
  c_green->add_option("--count", green.count, "sweep points (log spaced)");
  c_green->add_option("--out", green.out, "sweep CSV path (default: stdout)");
  c_green->add_option("--svg", green.svg, "log-log SVG of the sweep");

  HitArgs hit;
  auto* c_hit = app.add_subcommand("hit-prob", "estimate hitting probabilities");
  add_run_flags(c_hit, hit.run);
  c_hit->add_option("--points", hit.pts.points, "points as re,im");
  c_hit->add_option("--radii", hit.pts.radii, "radii (exponent: the radius list)");
  c_hit->add_option("--kind", hit.kind, "hit-prob, exponent or bound-check")
      ->check(CLI::IsMember({"hit-prob", "exponent", "bound-check"}));

  MinkArgs mink;
  auto* c_mink = app.add_subcommand("mink", "Minkowski content moments");
  add_run_flags(c_mink, mink.run);
  c_mink->add_option("--domain", mink.domain, "rectangle x0,x1,y0,y1");
  c_mink->add_option("--radii", mink.radii, "neighbourhood radii");
  c_mink->add_option("--moments", mink.moments, "highest moment");
  c_mink->add_option("--csv", mink.csv, "moment table CSV");
  c_mink->add_option("--svg", mink.svg, "log-log SVG of moments against r");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "run the acceptance criteria");
  c_verify->add_option("--config", verify.config, "JSON with scale, criteria, workers, output_dir");
  c_verify->add_flag("--smoke", verify.smoke, "reduced sample sizes");
  c_verify->add_option("--only", verify.only, "criterion ids");
  c_verify->add_option("--workers", verify.workers, "worker threads");
  c_verify->add_option("--out-dir", verify.out_dir, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_sim) return cmd_simulate(sim);
    if (*c_bound) return cmd_bound(bound);
    if (*c_green) return cmd_green(green);
    if (*c_hit) return cmd_hit_prob(hit);
    if (*c_mink) return cmd_mink(mink);
    if (*c_verify) return cmd_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
