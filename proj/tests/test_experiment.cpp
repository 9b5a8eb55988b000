#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "flab/experiment.hpp"

using namespace flab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("minimal config parses with defaults") {
  ExperimentConfig c = parse_config(R"({"experiment":"dtc-demo","N":4,"seed":1})");
  CHECK(c.experiment == "dtc-demo");
  CHECK(c.n_qubits == 4);
  CHECK(c.seed == 1);
  CHECK(c.points_per_period == 32);
  CHECK(c.cluster_tol == kDefaultClusterTol);
  CHECK(c.ratio_tol == kDefaultRatioTol);
  CHECK(c.observable.sites == std::vector<int>{1});
  CHECK(c.observable.axes == "z");
  CHECK(c.model.type == "random-model-b");
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiment":"dtc-demo","N":4,"foo":1})"),
                       doctest::Contains("foo"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"experiment":"dtc-demo","N":4,"model":{"typ":"model-b"}})"),
      doctest::Contains("typ"), ConfigError);
}

TEST_CASE("constraint violations name the field") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiment":"dtc-demo"})"), doctest::Contains("\"N\""),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiment":"nope","N":4})"),
                       doctest::Contains("experiment"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiment":"dtc-demo","N":4,"M":0})"),
                       doctest::Contains("\"M\""), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"experiment":"periodicity-rdm","N":4,"subsystem":[5]})"),
      doctest::Contains("subsystem"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"experiment":"periodicity-scalar","N":4,"cluster_tol":-1.0})"),
      doctest::Contains("cluster_tol"), ConfigError);
}

TEST_CASE("config round-trips through its canonical json") {
  const std::string text = R"({
    "experiment": "periodicity-rdm", "N": 6, "M": 120, "K": 8,
    "subsystem": [1, 4], "observable": {"sites": [2], "axes": "x"},
    "model": {"type": "model-b", "h_x": [1,2,3,4,5,6], "h_z": [0,0,0,0,0,0.5],
              "coupling_zz": [1,1,1,1,1]},
    "samples": 3, "cluster_tol": 1e-9, "ratio_tol": 1e-7, "seed": 99, "out_dir": "x"
  })";
  ExperimentConfig c = parse_config(text);
  ExperimentConfig back = parse_config(config_to_json(c).dump());
  CHECK(config_to_json(back).dump() == config_to_json(c).dump());
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("config hash ignores the output directory") {
  ExperimentConfig a = parse_config(R"({"experiment":"dtc-demo","N":4,"out_dir":"p"})");
  ExperimentConfig b = parse_config(R"({"experiment":"dtc-demo","N":4,"out_dir":"q"})");
  CHECK(config_hash(a) == config_hash(b));
  ExperimentConfig c = parse_config(R"({"experiment":"dtc-demo","N":4,"seed":2})");
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("subsystem threshold warning rule") {
  ExperimentConfig c = parse_config(
      R"({"experiment":"periodicity-rdm","N":4,"subsystem":[1,2]})");
  CHECK(c.subsystem_exceeds_threshold());  // floor(0.29248 * 4) = 1 < 2
  ExperimentConfig ok = parse_config(
      R"({"experiment":"periodicity-rdm","N":10,"subsystem":[1,2]})");
  CHECK_FALSE(ok.subsystem_exceeds_threshold());
}

TEST_CASE("periodicity-scalar on the zero model reports epsilon_hat = 0") {
  TempDir dir("flab-test-zero");
  nlohmann::json cfg = {
      {"experiment", "periodicity-scalar"},
      {"N", 3},
      {"M", 10},
      {"K", 8},
      {"model",
       {{"type", "model-b"},
        {"h_x", {0, 0, 0}},
        {"h_z", {0, 0, 0}},
        {"coupling_zz", {0, 0}}}},
      {"seed", 5},
      {"out_dir", dir.path.string()}};
  ExperimentConfig c = parse_config(cfg.dump());
  CHECK(run_experiment(c) == 0);

  nlohmann::json report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(report.at("periodicity").at("epsilon_hat").get<double>() == 0.0);
  CHECK(report.at("periodicity").at("bound_satisfied").get<bool>());
  CHECK(report.at("seed") == 5);
  CHECK(report.contains("config_hash"));

  // rerun is byte-identical (report.json carries no timestamp)
  const std::string first = slurp(dir.path / "report.json");
  CHECK(run_experiment(c) == 0);
  CHECK(slurp(dir.path / "report.json") == first);

  // outputs reference the seed and config hash
  const std::string csv = slurp(dir.path / "signals.csv");
  CHECK(csv.find("seed=5") != std::string::npos);
  CHECK(csv.find("config_hash=") != std::string::npos);
  CHECK(csv.find("m,x,value") != std::string::npos);
  CHECK(fs::exists(dir.path / "manifest.json"));
  CHECK(fs::exists(dir.path / "spectrum.json"));
}

TEST_CASE("periodicity-rdm run carries the theorem-condition warning") {
  TempDir dir("flab-test-rdm");
  nlohmann::json cfg = {{"experiment", "periodicity-rdm"}, {"N", 4},      {"M", 30},
                        {"K", 4},                          {"seed", 11},  {"samples", 2},
                        {"subsystem", {1, 3}},             {"out_dir", dir.path.string()}};
  ExperimentConfig c = parse_config(cfg.dump());
  const int status = run_experiment(c);
  nlohmann::json report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(report.at("theorem_condition_warning").get<bool>());  // 2 > floor(0.29248*4)
  CHECK(report.at("d_s") == 4);
  CHECK((status == 0 || status == 1));
  CHECK(fs::exists(dir.path / "rdm_trajectory.json"));
}

TEST_CASE("lemma-suite at N = 6 passes every check") {
  TempDir dir("flab-test-lemma");
  nlohmann::json cfg = {{"experiment", "lemma-suite"},
                        {"N", 6},
                        {"M", 2000},
                        {"K", 8},
                        {"seed", 42},
                        {"samples", 10},
                        {"model", {{"type", "random-model-b"}, {"lo", -2.0}, {"hi", 2.0}}},
                        {"out_dir", dir.path.string()}};
  ExperimentConfig c = parse_config(cfg.dump());
  CHECK(run_experiment(c) == 0);
  nlohmann::json report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(report.at("all_pass").get<bool>());
  CHECK(report.at("checks").size() == 6);
  const std::string csv = slurp(dir.path / "summary.csv");
  CHECK(csv.find("check,measured,bound,pass,seed") != std::string::npos);
  CHECK(csv.find("equilibration_bound") != std::string::npos);
  CHECK(csv.find("nondegeneracy_scan") != std::string::npos);
}

TEST_CASE("dtc-demo flags the fine-tuned point and its instability") {
  TempDir dir("flab-test-dtc");
  nlohmann::json cfg = {{"experiment", "dtc-demo"},
                        {"N", 4},
                        {"M", 400},
                        {"seed", 3},
                        {"out_dir", dir.path.string()}};
  ExperimentConfig c = parse_config(cfg.dump());
  CHECK(run_experiment(c) == 0);
  nlohmann::json report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(report.at("pi_pulse_subharmonic_detected").get<bool>());
  CHECK(report.at("pi_pulse_d2").get<long long>() > 1);
  CHECK(report.at("shifted_pulse").at("pass").get<bool>());
  CHECK(fs::exists(dir.path / "signals.csv"));
  CHECK(fs::exists(dir.path / "signals_shifted.csv"));
}

TEST_CASE("nondegeneracy-scan experiment writes a summary") {
  TempDir dir("flab-test-scan");
  nlohmann::json cfg = {{"experiment", "nondegeneracy-scan"},
                        {"N", 4},
                        {"samples", 10},
                        {"seed", 8},
                        {"out_dir", dir.path.string()}};
  CHECK(run_experiment(parse_config(cfg.dump())) == 0);
  nlohmann::json report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(report.at("scan").at("pass").get<bool>());
}

TEST_CASE("perturbation-bound experiment passes") {
  TempDir dir("flab-test-pert");
  nlohmann::json cfg = {{"experiment", "perturbation-bound"},
                        {"N", 4},
                        {"seed", 13},
                        {"out_dir", dir.path.string()}};
  CHECK(run_experiment(parse_config(cfg.dump())) == 0);
}

}  // TEST_SUITE
