#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "slelab/error.hpp"
#include "slelab/harness.hpp"

using namespace slelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("slelab-harness-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig small_hit(const fs::path& out, std::size_t n) {
  ExperimentConfig c;
  c.kind = ExperimentKind::HitProb;
  c.points = {Complex(0, 1)};
  c.radii = {0.3};
  c.n_samples = n;
  c.seed = 77;
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("config parsing and canonical form") {
  const auto c = config_from_json(R"({"kind":"exponent","points":[[1,0]],"radii":[0.4,0.2,0.1]})");
  CHECK(c.kind == ExperimentKind::Exponent);
  CHECK(c.points.at(0) == Complex(1, 0));
  CHECK(c.radii.size() == 3);
  CHECK(c.kappa == doctest::Approx(8.0 / 3.0));
  const auto canon = nlohmann::json::parse(config_to_json(c));
  CHECK(canon.contains("sim"));
  CHECK(canon["sim"].contains("r_esc_factor"));
  CHECK(canon["mode"] == "reproducible");
  const auto again = config_from_json(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));
  CHECK(config_hash(again) == config_hash(c));

  CHECK_THROWS_AS(config_from_json(R"({"kind":"nope"})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"bogus":1})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"sim":{"bogus":1}})"), Error);
  CHECK_THROWS_AS(config_from_json("not json"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"points":[[0,-1]],"radii":[0.1]})"), Error);
}

TEST_CASE("config hash covers the physics, not the bookkeeping") {
  ExperimentConfig a = small_hit("x", 10);
  ExperimentConfig b = a;
  b.n_samples = 999;
  b.workers = 4;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 78;
  CHECK(config_hash(a) != config_hash(b));
  ExperimentConfig c = a;
  c.sim.r_esc_factor = 16.0;
  CHECK(config_hash(a) != config_hash(c));
  CHECK(hash_hex(0x1234).size() == 16);
}

TEST_CASE("validation happens before simulation") {
  ExperimentConfig c = small_hit(scratch("invalid"), 10);
  c.sim.scheme = SimConfig::Scheme::Uniform;
  c.sim.c_res = 10.0;
  try {
    run_experiment(c);
    FAIL("expected a resolution error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Resolution);
  }
  CHECK_FALSE(fs::exists(c.output_dir));
  ExperimentConfig d = small_hit(scratch("invalid2"), 0);
  CHECK_THROWS_AS(validate_config(d), Error);
  ExperimentConfig e = small_hit(scratch("invalid3"), 10);
  e.kind = ExperimentKind::Exponent;
  e.radii = {0.2, 0.1};
  CHECK_THROWS_AS(validate_config(e), Error);
}

TEST_CASE("smoke run writes a manifest with one estimand") {
  const auto dir = scratch("smoke");
  const auto rep = run_experiment(small_hit(dir, 10));
  CHECK(rep.ok());
  REQUIRE(rep.estimands.size() == 1);
  CHECK(rep.estimands[0].result.n_samples == 10);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "results.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["n_samples"] == 10);
  CHECK(manifest["estimands"].size() == 1);
  CHECK(manifest["config_hash"] == hash_hex(rep.config_hash));
  CHECK(manifest.contains("version"));
  CHECK(manifest.contains("wall_seconds"));
  const std::string csv = slurp(dir / "results.csv");
  CHECK(csv.rfind("estimand,params,mean,stderr,n\n", 0) == 0);
}

TEST_CASE("reproducible runs are byte-identical across repeats and workers") {
  const auto a = scratch("rep-a"), b = scratch("rep-b"), c = scratch("rep-c");
  run_experiment(small_hit(a, 24));
  run_experiment(small_hit(b, 24));
  auto par = small_hit(c, 24);
  par.workers = 3;
  run_experiment(par);
  CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
  CHECK(slurp(a / "results.csv") == slurp(c / "results.csv"));
}

TEST_CASE("throughput mode agrees to tolerance") {
  const auto a = scratch("tp-a"), b = scratch("tp-b");
  const auto ra = run_experiment(small_hit(a, 24));
  auto t = small_hit(b, 24);
  t.workers = 3;
  t.reproducible = false;
  const auto rb = run_experiment(t);
  CHECK(rb.estimands[0].result.mean == doctest::Approx(ra.estimands[0].result.mean).epsilon(1e-12));
}

TEST_CASE("resume equals a single pass") {
  const auto one = scratch("resume-one"), two = scratch("resume-two");
  run_experiment(small_hit(one, 30));
  run_experiment(small_hit(two, 12));
  const auto rep = resume_experiment(two.string(), 30);
  CHECK(rep.n_samples == 30);
  CHECK(slurp(one / "results.csv") == slurp(two / "results.csv"));

  auto other = small_hit(scratch("unused"), 30);
  other.seed = 5;
  try {
    resume_experiment(two.string(), 40, &other);
    FAIL("expected a config mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigMismatch);
  }
  auto same = small_hit(scratch("unused2"), 40);
  CHECK_NOTHROW(resume_experiment(two.string(), 40, &same));
  CHECK_THROWS_AS(resume_experiment((fs::temp_directory_path() / "slelab-missing").string(), 5),
                  Error);
}

TEST_CASE("bound-check, exponent and integral kinds") {
  auto bc = small_hit(scratch("bound"), 8);
  bc.kind = ExperimentKind::BoundCheck;
  bc.points = {Complex(0, 1), Complex(0, 2)};
  bc.radii = {0.3, 0.3};
  const auto rb = run_experiment(bc);
  std::vector<std::string> names;
  for (const auto& e : rb.estimands) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"hit_prob", "interior_bound", "family_product",
                                          "family_limit", "ratio"});

  auto ex = small_hit(scratch("exponent"), 6);
  ex.kind = ExperimentKind::Exponent;
  ex.radii = {1.5, 1.2, 1.1};  // every trace hits: the fit sees equal estimates
  const auto re = run_experiment(ex);
  REQUIRE(re.estimands.size() == 4);
  CHECK(re.estimands.back().name == "slope");
  CHECK(re.estimands.back().result.mean == doctest::Approx(0.0).epsilon(1e-12));

  ExperimentConfig in;
  in.kind = ExperimentKind::Integral;
  in.n_max = 2;
  in.n_samples = 20000;
  in.output_dir = scratch("integral").string();
  const auto ri = run_experiment(in);
  CHECK(ri.ok());
  REQUIRE(ri.estimands.size() == 2);
  CHECK(ri.estimands[0].result.mean > 0.0);
  CHECK(ri.estimands[1].name == "green_integral");
}

TEST_CASE("seeds, numbers and output directories") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1.0) == "1");

  ExperimentConfig c;
  c.output_dir = "given";
  CHECK(output_directory(c) == "given");
  c.output_dir.clear();
  setenv("SLELAB_OUTPUT_DIR", "from-env", 1);
  CHECK(output_directory(c) == "from-env");
  unsetenv("SLELAB_OUTPUT_DIR");
  CHECK(output_directory(c) == "slelab-out");
}
