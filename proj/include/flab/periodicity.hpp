#pragma once

#include <json.hpp>
#include <vector>

#include "flab/dynamics.hpp"

namespace flab {

// Scalar trajectory sampled on an M-period x K-point grid; row m holds the
// values within period [m, m+1) at the stated offsets.
struct ScalarSignal {
  int periods = 0;
  int points_per_period = 0;
  VectorXd offsets;  // strictly increasing, in [0, 1)
  MatrixXd values;   // periods x points_per_period
};

// Matrix-valued counterpart: values[m][k] is a reduced density matrix.
struct RdmSignal {
  int periods = 0;
  int points_per_period = 0;
  VectorXd offsets;
  std::vector<std::vector<MatrixXcd>> values;
};

inline constexpr int kDefaultPointsPerPeriod = 32;

// Midpoint grid x_k = (k + 1/2) / K; throws if any offset hits a piece
// boundary of the schedule (pick a different K).
VectorXd midpoint_offsets(int points_per_period, const DriveSchedule& schedule);

// Shared machinery for sampling trajectories on the period grid. Builds the
// intra-period propagators once (in the Floquet eigenbasis) so evaluating at
// (m, x_k) costs one matrix-vector product; stroboscopic phase advance is
// exact in the eigenbasis.
class PeriodGridEvaluator {
 public:
  PeriodGridEvaluator(const CompiledSchedule& schedule, const SpectralDecomposition& decomp,
                      const VectorXd& offsets);

  const VectorXd& offsets() const { return offsets_; }

  ScalarSignal scalar_signal(const VectorXcd& state0, const Observable& a, int periods) const;
  // one signal per initial state; the observable transform is shared
  std::vector<ScalarSignal> scalar_signals(const std::vector<VectorXcd>& states,
                                           const Observable& a, int periods) const;
  RdmSignal rdm_signal(const VectorXcd& state0, const std::vector<int>& subsystem_sites,
                       int periods) const;
  // z_m on the integer-time grid (K = 1, offset 0)
  ScalarSignal stroboscopic_signal(const VectorXcd& state0, const Observable& a,
                                   int periods) const;

 private:
  const SpectralDecomposition& decomp_;
  VectorXd offsets_;
  VectorXd phases_;                  // per-column eigenphase of U_F (theta = arg lambda)
  std::vector<MatrixXcd> grid_ops_;  // W_k = U(0, x_k) Q

  VectorXcd advance(const VectorXcd& coeffs, long long m) const;
};

ScalarSignal sample_scalar_signal(const VectorXcd& state0, const DriveSchedule& schedule,
                                  const SpectralDecomposition& decomp, const Observable& a,
                                  int periods, int points_per_period);

RdmSignal sample_rdm_signal(const VectorXcd& state0, const DriveSchedule& schedule,
                            const SpectralDecomposition& decomp,
                            const std::vector<int>& subsystem_sites, int periods,
                            int points_per_period);

// Re-blocks a signal into periods of `factor` driving periods (M must be
// divisible by factor); the subharmonic diagnostic for period-doubling.
ScalarSignal reblock(const ScalarSignal& signal, int factor);

// Pointwise mean over periods.
VectorXd reference_profile(const ScalarSignal& signal);
std::vector<MatrixXcd> reference_profile(const RdmSignal& signal);

// Scalar: midpoint quadrature of |f - profile|^2 over one period.
// Matrix: quadrature of the trace distance itself (not squared).
VectorXd period_distances(const ScalarSignal& signal, const VectorXd& profile);
VectorXd period_distances(const RdmSignal& signal, const std::vector<MatrixXcd>& profile);

// Smallest eps >= 0 with |{m : d_m <= eps}| / M >= 1 - eps, exactly.
double epsilon_hat(const VectorXd& distances);

double good_fraction_at(const VectorXd& distances, double eps);

// sqrt(D2 / D_eff).
double theory_bound_scalar(double d2, double d_eff);

// (d_S^2 D2 / D_eff)^{1/4}.
double theory_bound_rdm(int d_s, double d2, double d_eff);

// Finite-M slack added to a mean-distance bound B: 5 (B + floor) / sqrt(M),
// where floor = 1/D_eff for the scalar case and 1/sqrt(D_eff) for the matrix
// case (same units as B).
double equilibration_slack(double mean_bound, double floor_term, int periods);

struct PeriodicityReport {
  int periods = 0;
  int points_per_period = 0;
  VectorXd per_period_distance;
  double epsilon_hat = 0.0;
  double theory_bound = 0.0;  // with finite-M slack included
  bool bound_satisfied = false;

  double good_fraction(double eps) const { return good_fraction_at(per_period_distance, eps); }
};

// Distances + epsilon_hat against sqrt(mean-bound + slack).
PeriodicityReport make_scalar_report(const ScalarSignal& signal, double d2, double d_eff);
PeriodicityReport make_rdm_report(const RdmSignal& signal, int d_s, double d2, double d_eff);

nlohmann::json periodicity_report_json(const PeriodicityReport& report);

}  // namespace flab
