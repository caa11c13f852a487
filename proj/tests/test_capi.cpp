// Exercises the shared library through the C interface only.

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "slelab/slelab.h"

namespace fs = std::filesystem;

TEST_CASE("status reporting") {
  CHECK(std::string(slelab_version()).size() > 0);
  double d = 0, a = 0;
  CHECK(slelab_derive_params(8.0 / 3.0, &d, &a) == SLELAB_OK);
  CHECK(a == doctest::Approx(2.0));
  CHECK(std::string(slelab_last_error()).empty());
  CHECK(slelab_derive_params(9.0, &d, &a) == SLELAB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(slelab_last_error()).size() > 0);
  CHECK(slelab_derive_params(2.0, nullptr, &a) == SLELAB_ERR_NULL_POINTER);
  CHECK(std::string(slelab_status_name(SLELAB_ERR_RESOLUTION)) == "below resolution floor");
}

TEST_CASE("scalar functions") {
  double v = 0;
  REQUIRE(slelab_p_scaling(2.0, 1.0, 0.5, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(std::pow(0.5, 0.75)));
  REQUIRE(slelab_p_ratio(2.0, 0.5, 3.0, 2.0, &v) == SLELAB_OK);
  CHECK(v == 1.0);
  REQUIRE(slelab_green_halfplane(2.0, 0.0, 2.0, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(std::pow(2.0, -0.75)));
  REQUIRE(slelab_green_domain(8.0 / 3.0, 1.0, 1.0, 1, 1, 0, 1, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(slelab_green_halfplane(2.0, 1.0, 0.0, &v) == SLELAB_ERR_INVALID_ARGUMENT);
  const double xs[] = {1.0, 1.1};
  REQUIRE(slelab_boundary_green_upper(8.0 / 3.0, xs, 2, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("points and circle families") {
  const double re[] = {0.0, 0.0}, im[] = {1.0, 2.0}, r[] = {0.1, 0.1};
  slelab_points* pts = nullptr;
  REQUIRE(slelab_points_create(re, im, r, 2, &pts) == SLELAB_OK);
  double v = 0;
  REQUIRE(slelab_multipoint_interior_bound(pts, 2.0, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(std::pow(10.0, -1.5)));
  REQUIRE(slelab_multipoint_green_upper(pts, 2.0, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(1.0));
  REQUIRE(slelab_points_gap(pts, 1, &v) == SLELAB_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(slelab_points_gap(pts, 5, &v) == SLELAB_ERR_INVALID_ARGUMENT);

  slelab_family* fam = nullptr;
  REQUIRE(slelab_family_build(pts, &fam) == SLELAB_OK);
  size_t nc = 0, nr = 0;
  REQUIRE(slelab_family_circle_count(fam, &nc) == SLELAB_OK);
  REQUIRE(slelab_family_run_count(fam, &nr) == SLELAB_OK);
  CHECK(nc >= 2);
  CHECK(nr >= 2);
  double cre, cim, rad;
  size_t owner;
  int level, run;
  REQUIRE(slelab_family_circle(fam, 0, &cre, &cim, &rad, &owner, &level, &run) == SLELAB_OK);
  CHECK(level == 1);
  CHECK(rad == doctest::Approx(0.25));
  CHECK(slelab_family_circle(fam, nc, &cre, &cim, &rad, &owner, &level, &run) ==
        SLELAB_ERR_INVALID_ARGUMENT);
  double prod = 0, limit = 0;
  REQUIRE(slelab_family_bound_product(fam, 2.0, &prod) == SLELAB_OK);
  REQUIRE(slelab_family_limit(pts, 2.0, &limit) == SLELAB_OK);
  CHECK(prod <= limit);
  slelab_family_destroy(fam);
  slelab_points_destroy(pts);
  slelab_points_destroy(nullptr);

  const double bad_im[] = {1.0, 1.0};
  CHECK(slelab_points_create(re, bad_im, r, 2, &pts) == SLELAB_ERR_INVALID_ARGUMENT);
  CHECK(pts == nullptr);
}

TEST_CASE("paths, traces and probes") {
  slelab_path* path = nullptr;
  REQUIRE(slelab_path_sample(2.0, 1.0, 4, 42, &path) == SLELAB_OK);
  size_t n = 0;
  REQUIRE(slelab_path_size(path, &n) == SLELAB_OK);
  CHECK(n == 5);
  std::vector<double> t(n), v(n);
  CHECK(slelab_path_get(path, t.data(), v.data(), 2) == SLELAB_ERR_BUFFER_TOO_SMALL);
  REQUIRE(slelab_path_get(path, t.data(), v.data(), n) == SLELAB_OK);
  CHECK(v[4] == -1.6021893152810245);
  slelab_path_destroy(path);

  const double times[] = {0.0, 0.25, 0.5, 0.75, 1.0}, zero[] = {0, 0, 0, 0, 0};
  REQUIRE(slelab_path_create(times, zero, 5, 0.0, &path) == SLELAB_OK);
  slelab_trace* tr = nullptr;
  REQUIRE(slelab_trace_from_path(path, &tr) == SLELAB_OK);
  REQUIRE(slelab_trace_size(tr, &n) == SLELAB_OK);
  std::vector<double> tt(n), re(n), im(n);
  REQUIRE(slelab_trace_get(tr, tt.data(), re.data(), im.data(), n) == SLELAB_OK);
  CHECK(im.back() == doctest::Approx(2.0));
  double dist = 0;
  REQUIRE(slelab_dist_to_trace(tr, 1.0, 1.0, &dist) == SLELAB_OK);
  CHECK(dist == doctest::Approx(1.0));
  double content = 0;
  REQUIRE(slelab_minkowski_content(tr, -1, 1, 0, 3, 0.1, 0.01, 8.0 / 3.0, &content) ==
          SLELAB_OK);
  CHECK(content > 0.0);

  int blew = -1;
  double when = 0, gre = 0, gim = 0;
  REQUIRE(slelab_forward_probe(path, 1.0, 1.0, 1e-8, &blew, &when, &gre, &gim) == SLELAB_OK);
  CHECK(blew == 0);
  CHECK(gre == doctest::Approx(std::sqrt(std::complex<double>(4.0, 2.0)).real()));
  double c = 0;
  REQUIRE(slelab_hcap_estimate(path, &c) == SLELAB_OK);
  CHECK(c == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(slelab_forward_probe(path, 1.0, 0.0, 1e-8, &blew, &when, &gre, &gim) ==
        SLELAB_ERR_INVALID_ARGUMENT);
  slelab_trace_destroy(tr);
  slelab_path_destroy(path);
}

TEST_CASE("fits and integrals") {
  const double radii[] = {0.4, 0.2, 0.1};
  double means[3];
  for (int i = 0; i < 3; ++i) means[i] = std::pow(radii[i], 2.0);
  double slope = 0, se = -1, icpt = 0;
  REQUIRE(slelab_exponent_fit(radii, means, nullptr, 3, &slope, &se, &icpt) == SLELAB_OK);
  CHECK(slope == doctest::Approx(2.0));
  CHECK(slelab_exponent_fit(radii, means, nullptr, 2, &slope, &se, &icpt) ==
        SLELAB_ERR_INVALID_ARGUMENT);
  double g = 0;
  REQUIRE(slelab_green_integral(8.0 / 3.0, -1, 1, 0.2, 1.2, &g) == SLELAB_OK);
  CHECK(g > 0.0);
}

TEST_CASE("experiments through the C interface") {
  const fs::path dir = fs::temp_directory_path() / "slelab-capi-run";
  fs::remove_all(dir);
  const std::string json = R"({"kind":"hit-prob","points":[[0,1]],"radii":[0.3],)"
                           R"("n_samples":6,"seed":3,"output_dir":")" +
                           dir.string() + "\"}";
  slelab_experiment* exp = nullptr;
  REQUIRE(slelab_experiment_from_json(json.c_str(), &exp) == SLELAB_OK);
  REQUIRE(slelab_experiment_validate(exp) == SLELAB_OK);
  size_t needed = 0;
  CHECK(slelab_experiment_to_json(exp, nullptr, 0, &needed) == SLELAB_ERR_BUFFER_TOO_SMALL);
  std::vector<char> buf(needed);
  REQUIRE(slelab_experiment_to_json(exp, buf.data(), buf.size(), &needed) == SLELAB_OK);
  CHECK(std::strstr(buf.data(), "\"kind\"") != nullptr);
  char hash[17];
  REQUIRE(slelab_experiment_hash(exp, hash) == SLELAB_OK);
  CHECK(std::strlen(hash) == 16);

  slelab_report* rep = nullptr;
  REQUIRE(slelab_experiment_run(exp, &rep) == SLELAB_OK);
  int ok = 0;
  REQUIRE(slelab_report_ok(rep, &ok) == SLELAB_OK);
  CHECK(ok == 1);
  size_t count = 0;
  REQUIRE(slelab_report_count(rep, &count) == SLELAB_OK);
  REQUIRE(count == 1);
  const char *name, *params, *error;
  double mean, se;
  size_t n;
  REQUIRE(slelab_report_estimand(rep, 0, &name, &params, &mean, &se, &n, &error) == SLELAB_OK);
  CHECK(std::string(name) == "hit_prob");
  CHECK(n == 6);
  CHECK(std::string(error).empty());
  slelab_report_destroy(rep);

  REQUIRE(slelab_experiment_resume(dir.string().c_str(), 9, exp, &rep) == SLELAB_OK);
  REQUIRE(slelab_report_estimand(rep, 0, &name, &params, &mean, &se, &n, &error) == SLELAB_OK);
  CHECK(n == 9);
  slelab_report_destroy(rep);
  slelab_experiment_destroy(exp);

  CHECK(slelab_experiment_from_json("{\"kind\":1}", &exp) == SLELAB_ERR_INVALID_ARGUMENT);
  CHECK(slelab_experiment_from_json(nullptr, &exp) == SLELAB_ERR_NULL_POINTER);
}

namespace {
int g_seen = 0;
void count_cb(int, const char*, int passed, const char*, double, void*) { g_seen += passed; }
}  // namespace

TEST_CASE("acceptance entry point") {
  const int ids[] = {1, 8};
  int failed = -1;
  REQUIRE(slelab_acceptance_run("smoke", ids, 2, 1, nullptr, count_cb, nullptr, &failed) ==
          SLELAB_OK);
  CHECK(failed == 0);
  CHECK(g_seen == 2);
  CHECK(slelab_acceptance_run("huge", ids, 2, 1, nullptr, nullptr, nullptr, &failed) ==
        SLELAB_ERR_INVALID_ARGUMENT);
}
