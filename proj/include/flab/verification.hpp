#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "flab/periodicity.hpp"

namespace flab {

// One executable check: measured value against a bound with declared slack.
// pass is true exactly when `measured comparison bound` holds.
struct VerificationReport {
  std::string check;
  double measured = 0.0;
  double bound = 0.0;
  std::string comparison = "<=";  // "<=" or ">="
  bool pass = false;
  long long samples = 0;
  std::uint64_t seed = 0;
  nlohmann::json details;
};

nlohmann::json verification_report_json(const VerificationReport& report);
std::string verification_csv_row(const VerificationReport& report);
inline constexpr const char* kVerificationCsvHeader = "check,measured,bound,pass,seed";

// Time-averaged distance bound mean_m d_m <= D2/D_eff + slack(M), checked on
// Haar product states; passes when at least `required_fraction` of the
// sampled states satisfy it.
VerificationReport verify_equilibration_bound(const DriveSchedule& schedule, const Observable& a,
                                              int n_states, int periods, int points_per_period,
                                              Rng& rng, double required_fraction = 0.95);

// Monte Carlo mean of sum_j <phi|Pi_j|phi>^2 against D1 2^N / 3^N + 3 SE.
VerificationReport verify_haar_projector_bound(const SpectralDecomposition& decomp, int n_qubits,
                                               int samples, Rng& rng);

// Fraction of Haar product states with D_eff above (3/2 - 1e-6)^N.
VerificationReport deff_threshold_experiment(const SpectralDecomposition& decomp, int n_qubits,
                                             int samples, Rng& rng,
                                             double required_fraction = 0.95);

// Family scanned by nondegeneracy_scan: model b by default, or an explicit
// ensemble shape; zero_couplings forces J = 0 (the non-interacting control).
struct ScanDescriptor {
  int n_qubits = 0;
  double lo = kDefaultSampleLo;
  double hi = kDefaultSampleHi;
  bool zero_couplings = false;
  std::optional<EnsembleShape> ensemble;
};

// Fraction of parameter draws with D1 = 1 and D2 = 1 at the given tolerances;
// marginal decompositions are counted separately, not as failures. Unless the
// descriptor already has zero couplings, a J = 0 companion scan must find
// D2 >= 2 in every draw.
VerificationReport nondegeneracy_scan(const ScanDescriptor& descriptor, int n_samples,
                                      double cluster_tol, double ratio_tol, Rng& rng,
                                      double margin_threshold = 1e-6);

// max_j |E_j - E'_j| between e^{-iH'_2/2} e^{-iH'_1/2} and e^{-i(H'_1+H'_2)/2}
// with coefficients scaled by each epsilon; log-log slope must be 2.0 +- 0.2.
VerificationReport quasienergy_perturbation_scaling(const VectorXd& g_x, const VectorXd& g_z,
                                                    const VectorXd& coupling_zz,
                                                    const std::vector<double>& eps_list);

// ||U_1(0,t) - U_2(0,t)|| <= eps_pert * t + 1e-9 on the time grid, where
// eps_pert = max_j ||H_j^(1) - H_j^(2)||.
VerificationReport propagator_distance_bound(const DriveSchedule& schedule1,
                                             const DriveSchedule& schedule2,
                                             const std::vector<double>& t_grid);

// Stroboscopic z_m = <psi(m)|sigma_1^z|psi(m)>: period-1 epsilon_hat against
// the equilibration bound, period-2 epsilon_hat on the re-blocked signal, and
// a classification of the run. state0 defaults to |0...0>.
VerificationReport dtc_subharmonic_experiment(const VectorXd& h_x, const VectorXd& h_z,
                                              const VectorXd& coupling_zz, int periods,
                                              const VectorXcd* state0 = nullptr,
                                              ScalarSignal* signal_out = nullptr);

}  // namespace flab
