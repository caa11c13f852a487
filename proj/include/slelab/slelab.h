/*
 * slelab C interface.
 *
 * Every function returns an slelab_status. On failure the message of the
 * most recent error on the calling thread is available from
 * slelab_last_error(). Objects are opaque handles released with their
 * matching *_destroy function; destroying NULL is a no-op.
 */
#ifndef SLELAB_H
#define SLELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SLELAB_BUILDING)
#    define SLELAB_API __declspec(dllexport)
#  else
#    define SLELAB_API __declspec(dllimport)
#  endif
#else
#  define SLELAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slelab_status {
  SLELAB_OK = 0,
  SLELAB_ERR_INVALID_ARGUMENT = 1,
  SLELAB_ERR_RESOLUTION = 2,
  SLELAB_ERR_INTERNAL = 3,
  SLELAB_ERR_IO = 4,
  SLELAB_ERR_CONFIG_MISMATCH = 5,
  SLELAB_ERR_NULL_POINTER = 6,
  SLELAB_ERR_BUFFER_TOO_SMALL = 7
} slelab_status;

typedef struct slelab_points slelab_points;
typedef struct slelab_family slelab_family;
typedef struct slelab_path slelab_path;
typedef struct slelab_trace slelab_trace;
typedef struct slelab_experiment slelab_experiment;
typedef struct slelab_report slelab_report;

SLELAB_API const char* slelab_version(void);
SLELAB_API const char* slelab_last_error(void);
SLELAB_API const char* slelab_status_name(int status);

/* ---- scaling functions and Green's functions ---------------------------- */

SLELAB_API int slelab_derive_params(double kappa, double* d, double* alpha);
SLELAB_API int slelab_p_scaling(double kappa, double y, double x, double* out);
SLELAB_API int slelab_p_ratio(double kappa, double y, double r, double l,
                              double* out);
SLELAB_API int slelab_green_halfplane(double kappa, double re, double im,
                                      double* out);
/* Green's function of the image of H under z -> (a z + b) / (c z + d). */
SLELAB_API int slelab_green_domain(double kappa, double re, double im,
                                   double a, double b, double c, double d,
                                   double* out);
SLELAB_API int slelab_boundary_green_upper(double kappa, const double* xs,
                                           size_t n, double* out);

/* ---- marked-point configurations ---------------------------------------- */

SLELAB_API int slelab_points_create(const double* re, const double* im,
                                    const double* radii, size_t n,
                                    slelab_points** out);
SLELAB_API void slelab_points_destroy(slelab_points* pts);
SLELAB_API int slelab_points_gap(const slelab_points* pts, size_t k,
                                 double* out);
SLELAB_API int slelab_multipoint_interior_bound(const slelab_points* pts,
                                                double kappa, double* out);
SLELAB_API int slelab_multipoint_green_upper(const slelab_points* pts,
                                             double kappa, double* out);

/* ---- circle families ---------------------------------------------------- */

SLELAB_API int slelab_family_build(const slelab_points* pts,
                                   slelab_family** out);
SLELAB_API void slelab_family_destroy(slelab_family* fam);
SLELAB_API int slelab_family_circle_count(const slelab_family* fam,
                                          size_t* out);
SLELAB_API int slelab_family_circle(const slelab_family* fam, size_t i,
                                    double* re, double* im, double* radius,
                                    size_t* owner, int* level, int* run);
SLELAB_API int slelab_family_run_count(const slelab_family* fam, size_t* out);
SLELAB_API int slelab_family_run(const slelab_family* fam, size_t i,
                                 size_t* owner, double* outer_radius,
                                 double* inner_radius, int* count);
SLELAB_API int slelab_family_owner(const slelab_family* fam, size_t j,
                                   int* levels, int* removed, int* runs,
                                   int* skipped_annuli);
SLELAB_API int slelab_family_bound_product(const slelab_family* fam,
                                           double kappa, double* out);
/* 4^{alpha n^2} times the interior bound of the quantized configuration. */
SLELAB_API int slelab_family_limit(const slelab_points* pts, double kappa,
                                   double* out);

/* ---- Loewner evolution -------------------------------------------------- */

SLELAB_API int slelab_path_sample(double kappa, double t_end, size_t steps,
                                  uint64_t seed, slelab_path** out);
SLELAB_API int slelab_path_create(const double* times, const double* values,
                                  size_t n, double kappa, slelab_path** out);
SLELAB_API void slelab_path_destroy(slelab_path* path);
SLELAB_API int slelab_path_size(const slelab_path* path, size_t* out);
SLELAB_API int slelab_path_get(const slelab_path* path, double* times,
                               double* values, size_t capacity);

SLELAB_API int slelab_trace_from_path(const slelab_path* path,
                                      slelab_trace** out);
SLELAB_API void slelab_trace_destroy(slelab_trace* tr);
SLELAB_API int slelab_trace_size(const slelab_trace* tr, size_t* out);
SLELAB_API int slelab_trace_get(const slelab_trace* tr, double* times,
                                double* re, double* im, size_t capacity);
SLELAB_API int slelab_dist_to_trace(const slelab_trace* tr, double re,
                                    double im, double* out);

/* blew_up receives 1 when the point was swallowed before the horizon. */
SLELAB_API int slelab_forward_probe(const slelab_path* path, double re,
                                    double im, double blowup_delta,
                                    int* blew_up, double* blow_up_time,
                                    double* g_re, double* g_im);
SLELAB_API int slelab_hcap_estimate(const slelab_path* path, double* out);

/* ---- estimators --------------------------------------------------------- */

SLELAB_API int slelab_minkowski_content(const slelab_trace* tr, double x0,
                                        double x1, double y0, double y1,
                                        double r, double grid_step,
                                        double kappa, double* out);
/* stderrs may be NULL for an unweighted fit. */
SLELAB_API int slelab_exponent_fit(const double* radii, const double* means,
                                   const double* stderrs, size_t n,
                                   double* slope, double* slope_stderr,
                                   double* intercept);
SLELAB_API int slelab_green_integral(double kappa, double x0, double x1,
                                     double y0, double y1, double* out);

/* ---- experiments -------------------------------------------------------- */

SLELAB_API int slelab_experiment_from_json(const char* json,
                                           slelab_experiment** out);
SLELAB_API void slelab_experiment_destroy(slelab_experiment* exp);
SLELAB_API int slelab_experiment_validate(const slelab_experiment* exp);
/* Canonical JSON; *needed receives the size including the terminator. */
SLELAB_API int slelab_experiment_to_json(const slelab_experiment* exp,
                                         char* buf, size_t capacity,
                                         size_t* needed);
SLELAB_API int slelab_experiment_hash(const slelab_experiment* exp,
                                      char buf[17]);
SLELAB_API int slelab_experiment_run(const slelab_experiment* exp,
                                     slelab_report** out);
/* expected may be NULL. */
SLELAB_API int slelab_experiment_resume(const char* dir, size_t n_samples,
                                        const slelab_experiment* expected,
                                        slelab_report** out);

SLELAB_API void slelab_report_destroy(slelab_report* rep);
SLELAB_API int slelab_report_ok(const slelab_report* rep, int* ok);
SLELAB_API int slelab_report_output_dir(const slelab_report* rep,
                                        const char** out);
SLELAB_API int slelab_report_count(const slelab_report* rep, size_t* out);
/* Strings stay valid until the report is destroyed; error is "" on success. */
SLELAB_API int slelab_report_estimand(const slelab_report* rep, size_t i,
                                      const char** name, const char** params,
                                      double* mean, double* std_error,
                                      size_t* n, const char** error);

/* ---- acceptance --------------------------------------------------------- */

typedef void (*slelab_criterion_cb)(int id, const char* name, int passed,
                                    const char* detail, double seconds,
                                    void* user);

/* scale is "full" or "smoke". ids may be NULL to run every criterion.
 * out_dir receives the experiment artifacts (NULL: a default directory).
 * *failed receives the number of failing criteria. */
SLELAB_API int slelab_acceptance_run(const char* scale, const int* ids,
                                     size_t n_ids, unsigned workers,
                                     const char* out_dir,
                                     slelab_criterion_cb cb, void* user,
                                     int* failed);

#ifdef __cplusplus
}
#endif

#endif /* SLELAB_H */
