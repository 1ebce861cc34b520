#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "codazzi/config.hpp"
#include "codazzi/error.hpp"
#include "codazzi/pipeline.hpp"

using namespace codazzi;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = CODAZZI_CONFIG_DIR;
const std::string kData = CODAZZI_TEST_DATA;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("codazzi_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kSmall = R"(
name: small
seed: 5
metric:
  family: helicoid-isothermal
  lambda: 1
solver:
  t_end: 0.25
  n_space: 64
  n_time: 32
  epsilon: 0.1
  region_policy: record
data:
  kind: perturbation
  modes: 2
  amplitude_fraction: 0.2
reconstruct:
  enabled: true
  lattice: 4
output:
  snapshot_stride: 8
)";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("shipped configs load and validate") {
    for (const char* name : {"catenoid_constant", "helicoid_constant", "helicoid_perturbed",
                             "helicoid_whole_plane", "catenoid_y_timelike"}) {
      CAPTURE(name);
      const RunConfig c = load_config(kConfigs + "/" + name + ".yaml");
      CHECK(c.name == name);
      CHECK_NOTHROW(validate_config(c));
    }
  }

  TEST_CASE("normalized text round trips") {
    const RunConfig c = load_config(kConfigs + "/helicoid_perturbed.yaml");
    const std::string text = config_to_yaml(c);
    const RunConfig back = parse_config(text, kConfigs, c.name);
    CHECK(config_to_yaml(back) == text);
    CHECK(back.seed == c.seed);
    CHECK(back.solver.epsilon_sweep == c.solver.epsilon_sweep);
  }

  TEST_CASE("defaults") {
    const RunConfig c = parse_config("metric:\n  family: helicoid-isothermal\n");
    CHECK(c.metric.family == "helicoid-isothermal");
    CHECK(c.data.kind == DataKind::constant);
    CHECK(c.verify.window_fraction == doctest::Approx(1.0 / 16));
    CHECK(c.solver.region_policy == RegionPolicy::abort);
  }

  TEST_CASE("unknown keys are rejected") {
    const std::string head = "metric:\n  family: helicoid-isothermal\n";
    CHECK_NOTHROW(parse_config(head + "solver:\n  epsilon: 0.1\n"));
    CHECK_THROWS_AS(parse_config(head + "solver:\n  epsilon: 0.1\n  epsilonn: 0.2\n"), Error);
    CHECK_THROWS_AS(parse_config(head + "solvr:\n  epsilon: 0.1\n"), Error);
    CHECK_THROWS_AS(parse_config(head + "solver:\n  orientation: z\n"), Error);
    CHECK_THROWS_AS(parse_config(head + "data:\n  kind: noise\n"), Error);
    CHECK_THROWS_AS(parse_config("solver:\n  epsilon: 0.1\n"), Error);
  }

  TEST_CASE("alpha not below beta is a configuration error") {
    const RunConfig c = load_config(kData + "/invalid_alpha.yaml");
    try {
      validate_config(c);
      FAIL("expected a configuration error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }

  TEST_CASE("positive curvature is rejected before compute") {
    const RunConfig c = load_config(kData + "/positive_curvature.yaml");
    try {
      validate_config(c);
      FAIL("expected a curvature error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::curvature);
      CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
  }

  TEST_CASE("data outside the region is rejected") {
    RunConfig c = parse_config("metric:\n  family: helicoid-isothermal\ndata:\n  q: 1.2\n");
    CHECK_THROWS_AS(validate_config(c), Error);
  }

  TEST_CASE("command-line overrides") {
    CHECK(parse_eps_list("0.1,0.05") == std::vector<double>{0.1, 0.05});
    CHECK_THROWS_AS(parse_eps_list("0.1,abc"), Error);
    CHECK_THROWS_AS(parse_eps_list(""), Error);
    CHECK(parse_grid("128x256") == std::pair<std::size_t, std::size_t>{128, 256});
    CHECK_THROWS_AS(parse_grid("128"), Error);
    CHECK_THROWS_AS(parse_grid("0x4"), Error);
  }

  TEST_CASE("output root") {
    RunConfig c = parse_config(kSmall);
    ::unsetenv("CODAZZI_OUTPUT_ROOT");
    CHECK(resolve_output_directory(c) == "codazzi-out/small");
    ::setenv("CODAZZI_OUTPUT_ROOT", "/tmp/root", 1);
    CHECK(resolve_output_directory(c) == "/tmp/root/small");
    c.output.directory = "here";
    CHECK(resolve_output_directory(c) == "/tmp/root/here");
    c.output.directory = "/abs/dir";
    CHECK(resolve_output_directory(c) == "/abs/dir");
    ::unsetenv("CODAZZI_OUTPUT_ROOT");
    c.output.directory = "here";
    CHECK(resolve_output_directory(c) == "here");
  }

  TEST_CASE("execute is deterministic and its artifacts can be re-verified") {
    RunConfig c = parse_config(kSmall);
    const fs::path dir = scratch("execute");
    c.output.directory = dir.string();
    std::ostringstream log;
    REQUIRE(execute(c, Command::run, log) == kExitOk);
    for (const char* f : {"manifest.yaml", "trajectory.csv", "snapshots.csv", "mesh.obj",
                          "mesh_vertices.csv"})
      CHECK(fs::exists(dir / f));
    const std::string manifest = slurp(dir / "manifest.yaml");
    const std::string mesh = slurp(dir / "mesh.obj");
    REQUIRE(execute(c, Command::run, log) == kExitOk);
    CHECK(slurp(dir / "manifest.yaml") == manifest);
    CHECK(slurp(dir / "mesh.obj") == mesh);

    const RunConfig again = load_config((dir / "manifest.yaml").string());
    CHECK(config_to_yaml(again) == config_to_yaml(c));

    CHECK(verify_artifacts(dir.string(), log) == kExitOk);
    CHECK(fs::exists(dir / "verify.yaml"));
    CHECK(reconstruct_artifacts(dir.string(), log) == kExitOk);
    CHECK(slurp(dir / "mesh.obj") == mesh);
    fs::remove_all(dir);
  }

  TEST_CASE("missing artifacts") {
    std::ostringstream log;
    CHECK_THROWS_AS(verify_artifacts(scratch("missing").string(), log), Error);
  }

  TEST_CASE("metric listing") {
    const std::string text = list_metrics_text();
    for (const char* name : {"catenoid", "helicoid-isothermal", "torus-isothermal", "custom"})
      CHECK(text.find(name) != std::string::npos);
  }
}
