#include "flab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace flab {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kExperiments = {"periodicity-scalar", "periodicity-rdm",
                                            "lemma-suite",        "nondegeneracy-scan",
                                            "dtc-demo",           "perturbation-bound"};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail("unknown key \"" + item.key() + "\" in " + where);
}

int get_int(const nlohmann::json& j, const std::string& key, int fallback, int min_value) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) fail("field \"" + key + "\": must be an integer");
  const long long v = j.at(key).get<long long>();
  if (v < min_value)
    fail("field \"" + key + "\": must be >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

double get_positive(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail("field \"" + key + "\": must be a number");
  const double v = j.at(key).get<double>();
  if (!(v > 0.0)) fail("field \"" + key + "\": must be > 0");
  return v;
}

VectorXd get_vector(const nlohmann::json& j, const std::string& key) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) fail("field \"" + key + "\": must be an array of numbers");
  VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(static_cast<long>(i)) = arr.at(i).get<double>();
  return v;
}

MatrixXi get_flag_matrix(const nlohmann::json& j, const std::string& key, int cols) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) fail("field \"" + key + "\": must be an array of rows");
  MatrixXi m(static_cast<long>(arr.size()), cols);
  for (size_t r = 0; r < arr.size(); ++r) {
    if (static_cast<int>(arr.at(r).size()) != cols)
      fail("field \"" + key + "\": each row must have " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) m(static_cast<long>(r), c) = arr.at(r).at(c).get<int>();
  }
  return m;
}

ModelSpec parse_model(const nlohmann::json& j) {
  reject_unknown_keys(j, {"type", "h_x", "h_z", "coupling_zz", "lo", "hi", "boundaries",
                          "on_site_flags", "coupling_flags"},
                      "\"model\"");
  ModelSpec m;
  m.type = j.value("type", std::string("random-model-b"));
  if (m.type == "model-b") {
    if (!j.contains("h_x") || !j.contains("h_z") || !j.contains("coupling_zz"))
      fail("field \"model\": model-b requires h_x, h_z and coupling_zz");
    m.h_x = get_vector(j, "h_x");
    m.h_z = get_vector(j, "h_z");
    m.coupling_zz = get_vector(j, "coupling_zz");
  } else if (m.type == "random-model-b" || m.type == "ensemble") {
    m.lo = j.value("lo", kDefaultSampleLo);
    m.hi = j.value("hi", kDefaultSampleHi);
    if (!(m.lo <= m.hi)) fail("field \"model\": lo must be <= hi");
    if (m.type == "ensemble") {
      if (!j.contains("boundaries") || !j.contains("on_site_flags") ||
          !j.contains("coupling_flags"))
        fail("field \"model\": ensemble requires boundaries, on_site_flags, coupling_flags");
      EnsembleShape shape;
      shape.boundaries = j.at("boundaries").get<std::vector<double>>();
      shape.on_site_flags = get_flag_matrix(j, "on_site_flags", 3);
      shape.coupling_flags = get_flag_matrix(j, "coupling_flags", 9);
      shape.validate();
      m.ensemble = std::move(shape);
    }
  } else {
    fail("field \"model.type\": must be model-b, random-model-b or ensemble");
  }
  return m;
}

nlohmann::json model_to_json(const ModelSpec& m) {
  nlohmann::json j{{"type", m.type}};
  if (m.type == "model-b") {
    j["h_x"] = std::vector<double>(m.h_x.data(), m.h_x.data() + m.h_x.size());
    j["h_z"] = std::vector<double>(m.h_z.data(), m.h_z.data() + m.h_z.size());
    j["coupling_zz"] =
        std::vector<double>(m.coupling_zz.data(), m.coupling_zz.data() + m.coupling_zz.size());
  } else {
    j["lo"] = m.lo;
    j["hi"] = m.hi;
    if (m.ensemble) {
      j["boundaries"] = m.ensemble->boundaries;
      nlohmann::json alpha = nlohmann::json::array(), gamma = nlohmann::json::array();
      for (long r = 0; r < m.ensemble->on_site_flags.rows(); ++r) {
        std::vector<int> row(3);
        for (int c = 0; c < 3; ++c) row[c] = m.ensemble->on_site_flags(r, c);
        alpha.push_back(row);
      }
      for (long r = 0; r < m.ensemble->coupling_flags.rows(); ++r) {
        std::vector<int> row(9);
        for (int c = 0; c < 9; ++c) row[c] = m.ensemble->coupling_flags(r, c);
        gamma.push_back(row);
      }
      j["on_site_flags"] = std::move(alpha);
      j["coupling_flags"] = std::move(gamma);
    }
  }
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kExperiments.count(experiment))
    fail("field \"experiment\": unknown experiment \"" + experiment + "\"");
  if (n_qubits < 1) fail("field \"N\": must be >= 1");
  if (n_qubits > dimension_cap())
    fail("field \"N\": exceeds the dimension cap " + std::to_string(dimension_cap()));
  if (periods < 1) fail("field \"M\": must be >= 1");
  if (points_per_period < 1) fail("field \"K\": must be >= 1");
  if (samples < 1) fail("field \"samples\": must be >= 1");
  if (!(cluster_tol > 0.0)) fail("field \"cluster_tol\": must be > 0");
  if (!(ratio_tol > 0.0)) fail("field \"ratio_tol\": must be > 0");

  std::set<int> seen;
  for (int s : subsystem) {
    if (s < 1 || s > n_qubits)
      fail("field \"subsystem\": site " + std::to_string(s) + " out of range 1.." +
           std::to_string(n_qubits));
    if (!seen.insert(s).second) fail("field \"subsystem\": sites must be distinct");
  }
  if (subsystem.empty()) fail("field \"subsystem\": must be nonempty");

  if (observable.sites.size() != observable.axes.size())
    fail("field \"observable\": sites and axes must have equal length");
  for (int s : observable.sites)
    if (s < 1 || s > n_qubits) fail("field \"observable\": site out of range");
  for (char a : observable.axes)
    if (a != 'x' && a != 'y' && a != 'z') fail("field \"observable\": axes must use x, y, z");

  if (model.type == "model-b") {
    if (model.h_x.size() != n_qubits || model.h_z.size() != n_qubits)
      fail("field \"model\": h_x and h_z must have length N");
    if (model.coupling_zz.size() != std::max(0, n_qubits - 1))
      fail("field \"model\": coupling_zz must have length N-1");
  }
}

bool ExperimentConfig::subsystem_exceeds_threshold() const {
  return static_cast<double>(subsystem.size()) >
         std::floor(kSubsystemFractionThreshold * n_qubits);
}

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  reject_unknown_keys(j,
                      {"experiment", "N", "M", "K", "subsystem", "observable", "model", "samples",
                       "cluster_tol", "ratio_tol", "seed", "out_dir"},
                      "config");

  ExperimentConfig c;
  if (!j.contains("experiment")) fail("field \"experiment\": required");
  c.experiment = j.at("experiment").get<std::string>();
  c.n_qubits = get_int(j, "N", 0, 1);
  if (!j.contains("N")) fail("field \"N\": required");
  c.periods = get_int(j, "M", c.periods, 1);
  c.points_per_period = get_int(j, "K", c.points_per_period, 1);
  if (j.contains("subsystem")) c.subsystem = j.at("subsystem").get<std::vector<int>>();
  if (j.contains("observable")) {
    reject_unknown_keys(j.at("observable"), {"sites", "axes"}, "\"observable\"");
    c.observable.sites = j.at("observable").at("sites").get<std::vector<int>>();
    c.observable.axes = j.at("observable").at("axes").get<std::string>();
  }
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  c.samples = get_int(j, "samples", c.samples, 1);
  c.cluster_tol = get_positive(j, "cluster_tol", c.cluster_tol);
  c.ratio_tol = get_positive(j, "ratio_tol", c.ratio_tol);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment},
          {"N", c.n_qubits},
          {"M", c.periods},
          {"K", c.points_per_period},
          {"subsystem", c.subsystem},
          {"observable", {{"sites", c.observable.sites}, {"axes", c.observable.axes}}},
          {"model", model_to_json(c.model)},
          {"samples", c.samples},
          {"cluster_tol", c.cluster_tol},
          {"ratio_tol", c.ratio_tol},
          {"seed", c.seed},
          {"out_dir", c.out_dir}};
}

std::string config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical dump, out_dir excluded: moving the output
  // directory must not change what was computed
  nlohmann::json j = config_to_json(config);
  j.erase("out_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header(const ExperimentConfig& config) {
  return "# seed=" + std::to_string(config.seed) + " config_hash=" + config_hash(config) + "\n";
}

std::string scalar_signal_csv(const ExperimentConfig& config, const ScalarSignal& signal) {
  std::string out = csv_header(config) + "m,x,value\n";
  for (int m = 0; m < signal.periods; ++m)
    for (int k = 0; k < signal.points_per_period; ++k)
      out += std::to_string(m) + "," + format_double(signal.offsets(k)) + "," +
             format_double(signal.values(m, k)) + "\n";
  return out;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

nlohmann::json report_envelope(const ExperimentConfig& config) {
  return {{"experiment", config.experiment},
          {"seed", config.seed},
          {"config_hash", config_hash(config)},
          {"flab_version", kFlabVersion}};
}

void write_manifest(const ExperimentConfig& config) {
  nlohmann::json manifest = {
      {"config", config_to_json(config)},
      {"config_hash", config_hash(config)},
      {"seed", config.seed},
      {"versions",
       {{"flab", kFlabVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
      {"timestamp", timestamp_utc()}};
  write_text_atomic(fs::path(config.out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

void write_report(const ExperimentConfig& config, const nlohmann::json& report) {
  write_text_atomic(fs::path(config.out_dir) / "report.json", report.dump(2) + "\n");
}

DriveSchedule build_model(const ExperimentConfig& config, Rng rng) {
  const ModelSpec& m = config.model;
  if (m.type == "model-b") return make_model_b(m.h_x, m.h_z, m.coupling_zz);
  if (m.type == "random-model-b") return sample_model_b(config.n_qubits, m.lo, m.hi, rng);
  EnsembleParameters params = sample_parameters(*m.ensemble, config.n_qubits, m.lo, m.hi, rng);
  return make_ensemble_schedule(*m.ensemble, params, config.n_qubits);
}

// shifts the site-1 z field of piece 1; ||Delta H|| = delta exactly
DriveSchedule perturb_schedule(const DriveSchedule& schedule, double delta) {
  DriveSchedule out = schedule;
  out.pieces[0].on_site(0, AxisZ) += delta;
  return out;
}

int run_periodicity_scalar(const ExperimentConfig& config) {
  Rng rng(config.seed);
  const DriveSchedule schedule = build_model(config, rng.derive(1));
  Rng state_rng = rng.derive(2);
  const VectorXcd state0 = sample_haar_product_state(config.n_qubits, state_rng);

  CompiledSchedule compiled(schedule);
  const SpectralDecomposition decomp =
      spectral_decomposition(compiled.floquet_operator(), config.cluster_tol);
  const DegeneracyMetrics metrics = degeneracy_metrics(decomp, config.ratio_tol);
  const Observable a =
      pauli_string_observable(config.n_qubits, config.observable.sites, config.observable.axes)
          .normalized();

  PeriodGridEvaluator eval(compiled, decomp,
                           midpoint_offsets(config.points_per_period, schedule));
  const ScalarSignal signal = eval.scalar_signal(state0, a, config.periods);
  const double d_eff = effective_dimension(eigenspace_overlaps(state0, decomp));
  const PeriodicityReport report =
      make_scalar_report(signal, static_cast<double>(metrics.d2), d_eff);

  nlohmann::json out = report_envelope(config);
  out["d2"] = metrics.d2;
  out["d_eff"] = d_eff;
  out["bound_without_slack"] = theory_bound_scalar(static_cast<double>(metrics.d2), d_eff);
  out["periodicity"] = periodicity_report_json(report);
  write_report(config, out);
  write_text_atomic(fs::path(config.out_dir) / "signals.csv", scalar_signal_csv(config, signal));
  write_text_atomic(fs::path(config.out_dir) / "spectrum.json",
                    spectral_report_json(decomp, metrics).dump(2) + "\n");
  return report.bound_satisfied ? 0 : 1;
}

int run_periodicity_rdm(const ExperimentConfig& config) {
  Rng rng(config.seed);
  const DriveSchedule schedule = build_model(config, rng.derive(1));
  Rng state_rng = rng.derive(2);
  const VectorXcd state0 = sample_haar_product_state(config.n_qubits, state_rng);

  CompiledSchedule compiled(schedule);
  const SpectralDecomposition decomp =
      spectral_decomposition(compiled.floquet_operator(), config.cluster_tol);
  const DegeneracyMetrics metrics = degeneracy_metrics(decomp, config.ratio_tol);

  PeriodGridEvaluator eval(compiled, decomp,
                           midpoint_offsets(config.points_per_period, schedule));
  const RdmSignal signal = eval.rdm_signal(state0, config.subsystem, config.periods);
  const double d_eff = effective_dimension(eigenspace_overlaps(state0, decomp));
  const int d_s = 1 << config.subsystem.size();
  const PeriodicityReport report =
      make_rdm_report(signal, d_s, static_cast<double>(metrics.d2), d_eff);

  nlohmann::json out = report_envelope(config);
  out["d2"] = metrics.d2;
  out["d_eff"] = d_eff;
  out["d_s"] = d_s;
  out["bound_without_slack"] = theory_bound_rdm(d_s, static_cast<double>(metrics.d2), d_eff);
  out["periodicity"] = periodicity_report_json(report);
  out["theorem_condition_warning"] = config.subsystem_exceeds_threshold();
  write_report(config, out);

  // plot-ready distances: trace distance to the reference profile at each grid point
  const std::vector<MatrixXcd> profile = reference_profile(signal);
  std::string csv = csv_header(config) + "m,x,value\n";
  for (int m = 0; m < signal.periods; ++m)
    for (int k = 0; k < signal.points_per_period; ++k)
      csv += std::to_string(m) + "," + format_double(signal.offsets(k)) + "," +
             format_double(trace_distance(signal.values[m][k], profile[k])) + "\n";
  write_text_atomic(fs::path(config.out_dir) / "signals.csv", csv);
  write_text_atomic(fs::path(config.out_dir) / "spectrum.json",
                    spectral_report_json(decomp, metrics).dump(2) + "\n");

  if (d_s <= 4 && signal.periods * signal.points_per_period <= 5000) {
    nlohmann::json traj = nlohmann::json::array();
    for (int m = 0; m < signal.periods; ++m) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < signal.points_per_period; ++k) {
        nlohmann::json entries = nlohmann::json::array();
        const MatrixXcd& rho = signal.values[m][k];
        for (long r = 0; r < rho.rows(); ++r)
          for (long cc = 0; cc < rho.cols(); ++cc)
            entries.push_back({rho(r, cc).real(), rho(r, cc).imag()});
        row.push_back(std::move(entries));
      }
      traj.push_back(std::move(row));
    }
    write_text_atomic(fs::path(config.out_dir) / "rdm_trajectory.json",
                      nlohmann::json{{"d_s", d_s}, {"values", std::move(traj)}}.dump() + "\n");
  }
  return report.bound_satisfied ? 0 : 1;
}

int run_lemma_suite(const ExperimentConfig& config) {
  Rng rng(config.seed);
  const DriveSchedule schedule = build_model(config, rng.derive(1));
  const Observable a =
      pauli_string_observable(config.n_qubits, config.observable.sites, config.observable.axes)
          .normalized();

  std::vector<VerificationReport> reports;

  Rng eq_rng = rng.derive(10);
  reports.push_back(verify_equilibration_bound(schedule, a, config.samples, config.periods,
                                               config.points_per_period, eq_rng));

  const SpectralDecomposition decomp =
      spectral_decomposition(floquet_operator(schedule), config.cluster_tol);
  Rng haar_rng = rng.derive(11);
  reports.push_back(verify_haar_projector_bound(decomp, config.n_qubits,
                                                std::max(1000, 100 * config.samples), haar_rng));
  Rng deff_rng = rng.derive(12);
  // the overwhelming-probability fraction is calibrated at N >= 8; smaller
  // chains still straddle the (1.5 - 1e-6)^N threshold
  reports.push_back(deff_threshold_experiment(decomp, config.n_qubits, 10 * config.samples,
                                              deff_rng, config.n_qubits >= 8 ? 0.95 : 0.5));

  ScanDescriptor scan;
  scan.n_qubits = config.n_qubits;
  scan.lo = config.model.lo;
  scan.hi = config.model.hi;
  scan.ensemble = config.model.ensemble;
  Rng scan_rng = rng.derive(13);
  // ratio coincidences are judged at 1e-12: eigenphases carry ~1e-14 error,
  // while at 1e-8 the s(s-1) ratio multiset produces frequent accidental
  // near-coincidences that say nothing about true gap degeneracy
  reports.push_back(nondegeneracy_scan(scan, 5 * config.samples, config.cluster_tol, 1e-12,
                                       scan_rng));

  Rng pert_rng = rng.derive(14);
  const int n_small = std::min(config.n_qubits, 4);
  VectorXd g_x(n_small), g_z(n_small), kk(std::max(0, n_small - 1));
  for (int l = 0; l < n_small; ++l) g_x(l) = pert_rng.uniform(-1.0, 1.0);
  for (int l = 0; l < n_small; ++l) g_z(l) = pert_rng.uniform(-1.0, 1.0);
  for (int l = 0; l < n_small - 1; ++l) kk(l) = pert_rng.uniform(-1.0, 1.0);
  reports.push_back(quasienergy_perturbation_scaling(
      g_x, g_z, kk, {1e-1, 3.1622776601683794e-2, 1e-2, 3.1622776601683794e-3, 1e-3}));

  reports.push_back(
      propagator_distance_bound(schedule, perturb_schedule(schedule, 1e-3), {1.0, 5.0, 10.0}));

  for (auto& rep : reports) rep.seed = config.seed;

  bool all_pass = true;
  nlohmann::json arr = nlohmann::json::array();
  std::string csv = csv_header(config) + std::string(kVerificationCsvHeader) + "\n";
  for (const auto& rep : reports) {
    all_pass = all_pass && rep.pass;
    arr.push_back(verification_report_json(rep));
    csv += verification_csv_row(rep) + "\n";
  }
  nlohmann::json out = report_envelope(config);
  out["checks"] = std::move(arr);
  out["all_pass"] = all_pass;
  write_report(config, out);
  write_text_atomic(fs::path(config.out_dir) / "summary.csv", csv);
  write_text_atomic(fs::path(config.out_dir) / "spectrum.json",
                    spectral_report_json(decomp, degeneracy_metrics(decomp, config.ratio_tol))
                            .dump(2) +
                        "\n");
  return all_pass ? 0 : 1;
}

int run_nondegeneracy_scan(const ExperimentConfig& config) {
  ScanDescriptor scan;
  scan.n_qubits = config.n_qubits;
  scan.lo = config.model.lo;
  scan.hi = config.model.hi;
  scan.ensemble = config.model.ensemble;
  Rng rng(config.seed);
  VerificationReport rep =
      nondegeneracy_scan(scan, config.samples, config.cluster_tol, config.ratio_tol, rng);
  rep.seed = config.seed;

  nlohmann::json out = report_envelope(config);
  out["scan"] = verification_report_json(rep);
  write_report(config, out);
  write_text_atomic(fs::path(config.out_dir) / "summary.csv",
                    csv_header(config) + std::string(kVerificationCsvHeader) + "\n" +
                        verification_csv_row(rep) + "\n");
  return rep.pass ? 0 : 1;
}

int run_dtc_demo(const ExperimentConfig& config) {
  Rng rng(config.seed);
  Rng field_rng = rng.derive(1);
  const int n = config.n_qubits;
  VectorXd h_z(n), coupling(std::max(0, n - 1));
  for (int l = 0; l < n; ++l) h_z(l) = field_rng.uniform(config.model.lo, config.model.hi);
  for (int l = 0; l < n - 1; ++l) coupling(l) = field_rng.uniform(config.model.lo, config.model.hi);

  // exact pi pulse, product initial state along z
  const VectorXd h_pi = VectorXd::Constant(n, M_PI);
  ScalarSignal pi_signal;
  VerificationReport pi_rep =
      dtc_subharmonic_experiment(h_pi, h_z, coupling, config.periods, nullptr, &pi_signal);
  pi_rep.seed = config.seed;

  // generic shift of the pulse restores driving-period equilibration
  Rng state_rng = rng.derive(2);
  const VectorXcd haar_state = sample_haar_product_state(n, state_rng);
  const VectorXd h_shifted = VectorXd::Constant(n, M_PI - 1e-3);
  ScalarSignal shifted_signal;
  VerificationReport shifted_rep = dtc_subharmonic_experiment(h_shifted, h_z, coupling,
                                                              config.periods, &haar_state,
                                                              &shifted_signal);
  shifted_rep.seed = config.seed;

  // the fine-tuned point is spectrally special: pi-paired quasienergies
  const DegeneracyMetrics pi_metrics = degeneracy_metrics(
      spectral_decomposition(floquet_operator(make_model_b(h_pi, h_z, coupling)),
                             config.cluster_tol),
      config.ratio_tol);

  const double z0 = pi_signal.values(0, 0);
  const bool pi_subharmonic =
      pi_rep.details.at("epsilon_hat_period2").get<double>() <= 1e-10 &&
      pi_rep.details.at("min_period1_distance").get<double>() >= 0.25 * z0 * z0;
  const bool all_pass = pi_subharmonic && shifted_rep.pass && pi_metrics.d2 > 1;

  nlohmann::json out = report_envelope(config);
  out["pi_pulse"] = verification_report_json(pi_rep);
  out["shifted_pulse"] = verification_report_json(shifted_rep);
  out["pi_pulse_d2"] = pi_metrics.d2;
  out["pi_pulse_subharmonic_detected"] = pi_subharmonic;
  out["all_pass"] = all_pass;
  write_report(config, out);
  write_text_atomic(fs::path(config.out_dir) / "signals.csv",
                    scalar_signal_csv(config, pi_signal));
  write_text_atomic(fs::path(config.out_dir) / "signals_shifted.csv",
                    scalar_signal_csv(config, shifted_signal));
  return all_pass ? 0 : 1;
}

int run_perturbation_bound(const ExperimentConfig& config) {
  Rng rng(config.seed);
  const DriveSchedule schedule = build_model(config, rng.derive(1));
  VerificationReport rep =
      propagator_distance_bound(schedule, perturb_schedule(schedule, 1e-3), {1.0, 5.0, 10.0});
  rep.seed = config.seed;

  nlohmann::json out = report_envelope(config);
  out["check"] = verification_report_json(rep);
  write_report(config, out);
  write_text_atomic(fs::path(config.out_dir) / "summary.csv",
                    csv_header(config) + std::string(kVerificationCsvHeader) + "\n" +
                        verification_csv_row(rep) + "\n");
  return rep.pass ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  write_manifest(config);
  if (config.experiment == "periodicity-scalar") return run_periodicity_scalar(config);
  if (config.experiment == "periodicity-rdm") return run_periodicity_rdm(config);
  if (config.experiment == "lemma-suite") return run_lemma_suite(config);
  if (config.experiment == "nondegeneracy-scan") return run_nondegeneracy_scan(config);
  if (config.experiment == "dtc-demo") return run_dtc_demo(config);
  if (config.experiment == "perturbation-bound") return run_perturbation_bound(config);
  fail("field \"experiment\": unknown experiment \"" + config.experiment + "\"");
}

}  // namespace flab
