#include "slelab/slelab.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "slelab/acceptance.hpp"
#include "slelab/error.hpp"
#include "slelab/estimators.hpp"
#include "slelab/geometry.hpp"
#include "slelab/harness.hpp"

struct slelab_points {
  slelab::PointConfig cfg;
};
struct slelab_family {
  slelab::CircleFamily fam;
};
struct slelab_path {
  slelab::DrivingPath path;
};
struct slelab_trace {
  slelab::Trace trace;
};
struct slelab_experiment {
  slelab::ExperimentConfig cfg;
};
struct slelab_report {
  slelab::RunReport report;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const char* msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
int guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SLELAB_OK;
  } catch (const slelab::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SLELAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SLELAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SLELAB_ERR_INTERNAL, "unknown exception");
  }
}

#define SLELAB_NONNULL(p)                                               \
  do {                                                                  \
    if ((p) == nullptr)                                                 \
      return set_error(SLELAB_ERR_NULL_POINTER, #p " must not be NULL"); \
  } while (0)

slelab::SleParams params(double kappa) { return slelab::derive_params(kappa); }

}  // namespace

extern "C" {

const char* slelab_version(void) { return SLELAB_VERSION; }

const char* slelab_last_error(void) { return g_last_error.c_str(); }

const char* slelab_status_name(int status) {
  switch (status) {
    case SLELAB_OK: return "ok";
    case SLELAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SLELAB_ERR_RESOLUTION: return "below resolution floor";
    case SLELAB_ERR_INTERNAL: return "internal error";
    case SLELAB_ERR_IO: return "i/o error";
    case SLELAB_ERR_CONFIG_MISMATCH: return "config mismatch";
    case SLELAB_ERR_NULL_POINTER: return "null pointer";
    case SLELAB_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    default: return "unknown status";
  }
}

int slelab_derive_params(double kappa, double* d, double* alpha) {
  SLELAB_NONNULL(d);
  SLELAB_NONNULL(alpha);
  return guard([&] {
    const auto p = params(kappa);
    *d = p.d;
    *alpha = p.alpha;
  });
}

int slelab_p_scaling(double kappa, double y, double x, double* out) {
  SLELAB_NONNULL(out);
  return guard([&] { *out = slelab::p_scaling(y, x, params(kappa)); });
}

int slelab_p_ratio(double kappa, double y, double r, double l, double* out) {
  SLELAB_NONNULL(out);
  return guard([&] { *out = slelab::p_ratio(y, r, l, params(kappa)); });
}

int slelab_green_halfplane(double kappa, double re, double im, double* out) {
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::green_halfplane(slelab::Complex(re, im), params(kappa));
  });
}

int slelab_green_domain(double kappa, double re, double im, double a, double b,
                        double c, double d, double* out) {
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::green_domain(slelab::Complex(re, im),
                                slelab::MobiusMap(a, b, c, d), params(kappa));
  });
}

int slelab_boundary_green_upper(double kappa, const double* xs, size_t n,
                                double* out) {
  SLELAB_NONNULL(out);
  if (n > 0) SLELAB_NONNULL(xs);
  return guard([&] {
    *out = slelab::boundary_green_upper(std::span<const double>(xs, n),
                                        params(kappa));
  });
}

int slelab_points_create(const double* re, const double* im,
                         const double* radii, size_t n, slelab_points** out) {
  SLELAB_NONNULL(out);
  *out = nullptr;
  if (n > 0) {
    SLELAB_NONNULL(re);
    SLELAB_NONNULL(im);
    SLELAB_NONNULL(radii);
  }
  return guard([&] {
    std::vector<slelab::HalfPlanePoint> pts;
    for (size_t k = 0; k < n; ++k) pts.emplace_back(re[k], im[k]);
    *out = new slelab_points{
        slelab::PointConfig(std::move(pts), std::vector<double>(radii, radii + n))};
  });
}

void slelab_points_destroy(slelab_points* pts) { delete pts; }

int slelab_points_gap(const slelab_points* pts, size_t k, double* out) {
  SLELAB_NONNULL(pts);
  SLELAB_NONNULL(out);
  return guard([&] {
    slelab::require(k < pts->cfg.size(), "point index out of range");
    *out = pts->cfg.gap(k);
  });
}

int slelab_multipoint_interior_bound(const slelab_points* pts, double kappa,
                                     double* out) {
  SLELAB_NONNULL(pts);
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::multipoint_interior_bound(pts->cfg, params(kappa));
  });
}

int slelab_multipoint_green_upper(const slelab_points* pts, double kappa,
                                  double* out) {
  SLELAB_NONNULL(pts);
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::multipoint_green_upper(pts->cfg, params(kappa));
  });
}

int slelab_family_build(const slelab_points* pts, slelab_family** out) {
  SLELAB_NONNULL(pts);
  SLELAB_NONNULL(out);
  *out = nullptr;
  return guard([&] { *out = new slelab_family{slelab::build_family(pts->cfg)}; });
}

void slelab_family_destroy(slelab_family* fam) { delete fam; }

int slelab_family_circle_count(const slelab_family* fam, size_t* out) {
  SLELAB_NONNULL(fam);
  SLELAB_NONNULL(out);
  *out = fam->fam.circles.size();
  return SLELAB_OK;
}

int slelab_family_circle(const slelab_family* fam, size_t i, double* re,
                         double* im, double* radius, size_t* owner, int* level,
                         int* run) {
  SLELAB_NONNULL(fam);
  return guard([&] {
    slelab::require(i < fam->fam.circles.size(), "circle index out of range");
    const auto& c = fam->fam.circles[i];
    if (re) *re = c.center.real();
    if (im) *im = c.center.imag();
    if (radius) *radius = c.radius;
    if (owner) *owner = c.owner;
    if (level) *level = c.level;
    if (run) *run = fam->fam.run_of[i];
  });
}

int slelab_family_run_count(const slelab_family* fam, size_t* out) {
  SLELAB_NONNULL(fam);
  SLELAB_NONNULL(out);
  *out = fam->fam.runs.size();
  return SLELAB_OK;
}

int slelab_family_run(const slelab_family* fam, size_t i, size_t* owner,
                      double* outer_radius, double* inner_radius, int* count) {
  SLELAB_NONNULL(fam);
  return guard([&] {
    slelab::require(i < fam->fam.runs.size(), "run index out of range");
    const auto& r = fam->fam.runs[i];
    if (owner) *owner = r.owner;
    if (outer_radius) *outer_radius = r.outer_radius;
    if (inner_radius) *inner_radius = r.inner_radius;
    if (count) *count = r.count;
  });
}

int slelab_family_owner(const slelab_family* fam, size_t j, int* levels,
                        int* removed, int* runs, int* skipped_annuli) {
  SLELAB_NONNULL(fam);
  return guard([&] {
    slelab::require(j < fam->fam.owners.size(), "owner index out of range");
    const auto& s = fam->fam.owners[j];
    if (levels) *levels = s.levels;
    if (removed) *removed = s.removed;
    if (runs) *runs = s.runs;
    if (skipped_annuli) *skipped_annuli = s.skipped_annuli;
  });
}

int slelab_family_bound_product(const slelab_family* fam, double kappa,
                                double* out) {
  SLELAB_NONNULL(fam);
  SLELAB_NONNULL(out);
  return guard([&] { *out = slelab::family_bound_product(fam->fam, params(kappa)); });
}

int slelab_family_limit(const slelab_points* pts, double kappa, double* out) {
  SLELAB_NONNULL(pts);
  SLELAB_NONNULL(out);
  return guard([&] {
    const auto p = params(kappa);
    const double n = static_cast<double>(pts->cfg.size());
    const auto q = slelab::quantized_config(pts->cfg, slelab::quantize_radii(pts->cfg));
    *out = std::pow(4.0, p.alpha * n * n) * slelab::multipoint_interior_bound(q, p);
  });
}

int slelab_path_sample(double kappa, double t_end, size_t steps, uint64_t seed,
                       slelab_path** out) {
  SLELAB_NONNULL(out);
  *out = nullptr;
  return guard([&] {
    *out = new slelab_path{slelab::sample_driver(params(kappa), t_end, steps, seed)};
  });
}

int slelab_path_create(const double* times, const double* values, size_t n,
                       double kappa, slelab_path** out) {
  SLELAB_NONNULL(out);
  *out = nullptr;
  if (n > 0) {
    SLELAB_NONNULL(times);
    SLELAB_NONNULL(values);
  }
  return guard([&] {
    *out = new slelab_path{slelab::make_driving_path(
        std::vector<double>(times, times + n), std::vector<double>(values, values + n),
        kappa)};
  });
}

void slelab_path_destroy(slelab_path* path) { delete path; }

int slelab_path_size(const slelab_path* path, size_t* out) {
  SLELAB_NONNULL(path);
  SLELAB_NONNULL(out);
  *out = path->path.times.size();
  return SLELAB_OK;
}

int slelab_path_get(const slelab_path* path, double* times, double* values,
                    size_t capacity) {
  SLELAB_NONNULL(path);
  const size_t n = path->path.times.size();
  if (capacity < n)
    return set_error(SLELAB_ERR_BUFFER_TOO_SMALL, "path buffer too small");
  if (times) std::copy(path->path.times.begin(), path->path.times.end(), times);
  if (values) std::copy(path->path.values.begin(), path->path.values.end(), values);
  return SLELAB_OK;
}

int slelab_trace_from_path(const slelab_path* path, slelab_trace** out) {
  SLELAB_NONNULL(path);
  SLELAB_NONNULL(out);
  *out = nullptr;
  return guard([&] { *out = new slelab_trace{slelab::trace_from_driver(path->path)}; });
}

void slelab_trace_destroy(slelab_trace* tr) { delete tr; }

int slelab_trace_size(const slelab_trace* tr, size_t* out) {
  SLELAB_NONNULL(tr);
  SLELAB_NONNULL(out);
  *out = tr->trace.vertices.size();
  return SLELAB_OK;
}

int slelab_trace_get(const slelab_trace* tr, double* times, double* re,
                     double* im, size_t capacity) {
  SLELAB_NONNULL(tr);
  const size_t n = tr->trace.vertices.size();
  if (capacity < n)
    return set_error(SLELAB_ERR_BUFFER_TOO_SMALL, "trace buffer too small");
  for (size_t k = 0; k < n; ++k) {
    if (times) times[k] = tr->trace.times[k];
    if (re) re[k] = tr->trace.vertices[k].real();
    if (im) im[k] = tr->trace.vertices[k].imag();
  }
  return SLELAB_OK;
}

int slelab_dist_to_trace(const slelab_trace* tr, double re, double im,
                         double* out) {
  SLELAB_NONNULL(tr);
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::dist_to_trace(tr->trace, slelab::Complex(re, im));
  });
}

int slelab_forward_probe(const slelab_path* path, double re, double im,
                         double blowup_delta, int* blew_up,
                         double* blow_up_time, double* g_re, double* g_im) {
  SLELAB_NONNULL(path);
  return guard([&] {
    const auto probe = slelab::forward_probe(path->path, slelab::Complex(re, im),
                                             blowup_delta);
    if (blew_up) *blew_up = probe.blew_up() ? 1 : 0;
    if (blow_up_time) *blow_up_time = probe.blow_up_time;
    if (g_re) *g_re = probe.g_T_z.real();
    if (g_im) *g_im = probe.g_T_z.imag();
  });
}

int slelab_hcap_estimate(const slelab_path* path, double* out) {
  SLELAB_NONNULL(path);
  SLELAB_NONNULL(out);
  return guard([&] { *out = slelab::hcap_estimate(path->path); });
}

int slelab_minkowski_content(const slelab_trace* tr, double x0, double x1,
                             double y0, double y1, double r, double grid_step,
                             double kappa, double* out) {
  SLELAB_NONNULL(tr);
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::minkowski_content(tr->trace, slelab::Rect{x0, x1, y0, y1}, r,
                                     grid_step, params(kappa));
  });
}

int slelab_exponent_fit(const double* radii, const double* means,
                        const double* stderrs, size_t n, double* slope,
                        double* slope_stderr, double* intercept) {
  if (n > 0) {
    SLELAB_NONNULL(radii);
    SLELAB_NONNULL(means);
  }
  return guard([&] {
    std::vector<slelab::EstimateResult> est;
    for (size_t i = 0; i < n; ++i)
      est.push_back({means[i], stderrs ? stderrs[i] : 0.0, 0, 0});
    const auto fit = slelab::exponent_fit(std::vector<double>(radii, radii + n), est);
    if (slope) *slope = fit.slope;
    if (slope_stderr) *slope_stderr = fit.slope_stderr;
    if (intercept) *intercept = fit.intercept;
  });
}

int slelab_green_integral(double kappa, double x0, double x1, double y0,
                          double y1, double* out) {
  SLELAB_NONNULL(out);
  return guard([&] {
    *out = slelab::green_integral(slelab::Rect{x0, x1, y0, y1}, params(kappa));
  });
}

int slelab_experiment_from_json(const char* json, slelab_experiment** out) {
  SLELAB_NONNULL(json);
  SLELAB_NONNULL(out);
  *out = nullptr;
  return guard([&] { *out = new slelab_experiment{slelab::config_from_json(json)}; });
}

void slelab_experiment_destroy(slelab_experiment* exp) { delete exp; }

int slelab_experiment_validate(const slelab_experiment* exp) {
  SLELAB_NONNULL(exp);
  return guard([&] { slelab::validate_config(exp->cfg); });
}

int slelab_experiment_to_json(const slelab_experiment* exp, char* buf,
                              size_t capacity, size_t* needed) {
  SLELAB_NONNULL(exp);
  const std::string text = slelab::config_to_json(exp->cfg);
  if (needed) *needed = text.size() + 1;
  if (buf == nullptr || capacity < text.size() + 1)
    return set_error(SLELAB_ERR_BUFFER_TOO_SMALL, "JSON buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return SLELAB_OK;
}

int slelab_experiment_hash(const slelab_experiment* exp, char buf[17]) {
  SLELAB_NONNULL(exp);
  SLELAB_NONNULL(buf);
  const std::string h = slelab::hash_hex(slelab::config_hash(exp->cfg));
  std::memcpy(buf, h.c_str(), 17);
  return SLELAB_OK;
}

int slelab_experiment_run(const slelab_experiment* exp, slelab_report** out) {
  SLELAB_NONNULL(exp);
  SLELAB_NONNULL(out);
  *out = nullptr;
  return guard([&] { *out = new slelab_report{slelab::run_experiment(exp->cfg)}; });
}

int slelab_experiment_resume(const char* dir, size_t n_samples,
                             const slelab_experiment* expected,
                             slelab_report** out) {
  SLELAB_NONNULL(dir);
  SLELAB_NONNULL(out);
  *out = nullptr;
  return guard([&] {
    *out = new slelab_report{slelab::resume_experiment(
        dir, n_samples, expected ? &expected->cfg : nullptr)};
  });
}

void slelab_report_destroy(slelab_report* rep) { delete rep; }

int slelab_report_ok(const slelab_report* rep, int* ok) {
  SLELAB_NONNULL(rep);
  SLELAB_NONNULL(ok);
  *ok = rep->report.ok() ? 1 : 0;
  return SLELAB_OK;
}

int slelab_report_output_dir(const slelab_report* rep, const char** out) {
  SLELAB_NONNULL(rep);
  SLELAB_NONNULL(out);
  *out = rep->report.output_dir.c_str();
  return SLELAB_OK;
}

int slelab_report_count(const slelab_report* rep, size_t* out) {
  SLELAB_NONNULL(rep);
  SLELAB_NONNULL(out);
  *out = rep->report.estimands.size();
  return SLELAB_OK;
}

int slelab_report_estimand(const slelab_report* rep, size_t i,
                           const char** name, const char** params_out,
                           double* mean, double* std_error, size_t* n,
                           const char** error) {
  SLELAB_NONNULL(rep);
  if (i >= rep->report.estimands.size())
    return set_error(SLELAB_ERR_INVALID_ARGUMENT, "estimand index out of range");
  const auto& e = rep->report.estimands[i];
  if (name) *name = e.name.c_str();
  if (params_out) *params_out = e.params.c_str();
  if (mean) *mean = e.result.mean;
  if (std_error) *std_error = e.result.std_error;
  if (n) *n = e.result.n_samples;
  if (error) *error = e.error.c_str();
  return SLELAB_OK;
}

int slelab_acceptance_run(const char* scale, const int* ids, size_t n_ids,
                          unsigned workers, const char* out_dir,
                          slelab_criterion_cb cb, void* user, int* failed) {
  SLELAB_NONNULL(scale);
  if (n_ids > 0) SLELAB_NONNULL(ids);
  return guard([&] {
    slelab::AcceptanceOptions opts;
    const std::string s(scale);
    if (s == "full")
      opts.scale = slelab::AcceptanceScale::Full;
    else if (s == "smoke")
      opts.scale = slelab::AcceptanceScale::Smoke;
    else
      slelab::fail(slelab::ErrorCode::InvalidArgument,
                   "scale must be 'full' or 'smoke'");
    opts.only.assign(ids, ids + n_ids);
    opts.workers = workers == 0 ? 1 : workers;
    if (out_dir && *out_dir) opts.out_dir = out_dir;
    const auto results = slelab::run_acceptance(
        opts, [&](const slelab::CriterionResult& r) {
          if (cb) cb(r.id, r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(),
                     r.seconds, user);
        });
    int bad = 0;
    for (const auto& r : results) bad += r.passed ? 0 : 1;
    if (failed) *failed = bad;
  });
}

}  // extern "C"
