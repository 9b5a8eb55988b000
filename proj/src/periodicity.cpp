#include "flab/periodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flab {

VectorXd midpoint_offsets(int points_per_period, const DriveSchedule& schedule) {
  if (points_per_period < 1) throw std::invalid_argument("points_per_period must be >= 1");
  VectorXd offsets(points_per_period);
  for (int k = 0; k < points_per_period; ++k)
    offsets(k) = (k + 0.5) / points_per_period;
  for (int k = 0; k < points_per_period; ++k)
    for (double t : schedule.boundaries)
      if (std::abs(offsets(k) - t) < 1e-12)
        throw std::invalid_argument(
            "grid offset coincides with a piece boundary; choose a different K");
  return offsets;
}

PeriodGridEvaluator::PeriodGridEvaluator(const CompiledSchedule& schedule,
                                         const SpectralDecomposition& decomp,
                                         const VectorXd& offsets)
    : decomp_(decomp), offsets_(offsets) {
  if (schedule.dim() != decomp.dim())
    throw std::invalid_argument("schedule and decomposition dimensions differ");
  for (long k = 0; k + 1 < offsets_.size(); ++k)
    if (!(offsets_(k) < offsets_(k + 1)))
      throw std::invalid_argument("offsets must be strictly increasing");
  if (offsets_.size() > 0 && (offsets_(0) < 0.0 || offsets_(offsets_.size() - 1) >= 1.0))
    throw std::invalid_argument("offsets must lie in [0, 1)");

  phases_ = -decomp_.eigenphases;  // theta_i = arg(lambda_i) = -E_i

  // W_k = U(0, x_k) Q, assembled piecewise: for x in piece j,
  // U(0, x) Q = V_j e^{-i w_j (x - t_j)} [V_j^dag U(0, t_j) Q]
  const auto& bounds = schedule.schedule().boundaries;
  grid_ops_.reserve(offsets_.size());
  int piece = 0;
  MatrixXcd compressed;  // V_piece^dag U(0, t_piece) Q
  bool have_compressed = false;
  for (long k = 0; k < offsets_.size(); ++k) {
    const double x = offsets_(k);
    if (x == 0.0) {
      grid_ops_.push_back(decomp_.eigenvectors);
      continue;
    }
    while (piece + 1 < static_cast<int>(bounds.size()) - 1 && x >= bounds[piece + 1]) {
      ++piece;
      have_compressed = false;
    }
    if (!have_compressed) {
      compressed = schedule.piece_basis(piece).adjoint() *
                   (schedule.prefix_product(piece) * decomp_.eigenvectors);
      have_compressed = true;
    }
    VectorXcd ph = (complexd(0.0, -(x - bounds[piece])) * schedule.piece_energies(piece).array())
                       .exp()
                       .matrix();
    grid_ops_.push_back(schedule.piece_basis(piece) * (ph.asDiagonal() * compressed));
  }
}

VectorXcd PeriodGridEvaluator::advance(const VectorXcd& coeffs, long long m) const {
  VectorXcd out(coeffs.size());
  for (long i = 0; i < coeffs.size(); ++i)
    out(i) = coeffs(i) *
             std::polar(1.0, std::remainder(static_cast<double>(m) * phases_(i), kTwoPi));
  return out;
}

ScalarSignal PeriodGridEvaluator::scalar_signal(const VectorXcd& state0, const Observable& a,
                                                int periods) const {
  return scalar_signals({state0}, a, periods).front();
}

std::vector<ScalarSignal> PeriodGridEvaluator::scalar_signals(const std::vector<VectorXcd>& states,
                                                              const Observable& a,
                                                              int periods) const {
  if (periods < 1) throw std::invalid_argument("periods must be >= 1");
  const long d = decomp_.dim();
  const long n_states = static_cast<long>(states.size());
  const long n_points = offsets_.size();
  if (a.matrix.rows() != d) throw std::invalid_argument("observable dimension mismatch");

  MatrixXcd coeffs(d, n_states);
  for (long s = 0; s < n_states; ++s) {
    if (states[s].size() != d) throw std::invalid_argument("state dimension mismatch");
    coeffs.col(s) = decomp_.eigenvectors.adjoint() * states[s];
  }

  std::vector<MatrixXcd> a_grid;
  a_grid.reserve(grid_ops_.size());
  for (const MatrixXcd& w : grid_ops_) a_grid.push_back(w.adjoint() * (a.matrix * w));

  std::vector<ScalarSignal> signals(n_states);
  for (auto& sig : signals) {
    sig.periods = periods;
    sig.points_per_period = static_cast<int>(n_points);
    sig.offsets = offsets_;
    sig.values.resize(periods, n_points);
  }

  MatrixXcd evolved(d, n_states), image(d, n_states);
  VectorXcd phase(d);
  for (int m = 0; m < periods; ++m) {
    for (long i = 0; i < d; ++i)
      phase(i) = std::polar(1.0, std::remainder(static_cast<double>(m) * phases_(i), kTwoPi));
    evolved = phase.asDiagonal() * coeffs;
    for (long k = 0; k < n_points; ++k) {
      image.noalias() = a_grid[k] * evolved;
      for (long s = 0; s < n_states; ++s)
        signals[s].values(m, k) = std::real(evolved.col(s).dot(image.col(s)));
    }
  }
  return signals;
}

RdmSignal PeriodGridEvaluator::rdm_signal(const VectorXcd& state0,
                                          const std::vector<int>& subsystem_sites,
                                          int periods) const {
  if (periods < 1) throw std::invalid_argument("periods must be >= 1");
  const long d = decomp_.dim();
  if (state0.size() != d) throw std::invalid_argument("state dimension mismatch");

  VectorXcd coeffs = decomp_.eigenvectors.adjoint() * state0;

  RdmSignal sig;
  sig.periods = periods;
  sig.points_per_period = static_cast<int>(offsets_.size());
  sig.offsets = offsets_;
  sig.values.resize(periods);
  for (int m = 0; m < periods; ++m) {
    const VectorXcd evolved = advance(coeffs, m);
    sig.values[m].reserve(grid_ops_.size());
    for (const MatrixXcd& w : grid_ops_)
      sig.values[m].push_back(reduced_density_matrix(w * evolved, subsystem_sites));
  }
  return sig;
}

ScalarSignal PeriodGridEvaluator::stroboscopic_signal(const VectorXcd& state0, const Observable& a,
                                                      int periods) const {
  if (periods < 1) throw std::invalid_argument("periods must be >= 1");
  const long d = decomp_.dim();
  if (state0.size() != d || a.matrix.rows() != d)
    throw std::invalid_argument("dimension mismatch");

  VectorXcd coeffs = decomp_.eigenvectors.adjoint() * state0;
  MatrixXcd a_eig = decomp_.eigenvectors.adjoint() * (a.matrix * decomp_.eigenvectors);

  ScalarSignal sig;
  sig.periods = periods;
  sig.points_per_period = 1;
  sig.offsets = VectorXd::Zero(1);
  sig.values.resize(periods, 1);
  for (int m = 0; m < periods; ++m) {
    const VectorXcd evolved = advance(coeffs, m);
    sig.values(m, 0) = std::real(evolved.dot(a_eig * evolved));
  }
  return sig;
}

ScalarSignal sample_scalar_signal(const VectorXcd& state0, const DriveSchedule& schedule,
                                  const SpectralDecomposition& decomp, const Observable& a,
                                  int periods, int points_per_period) {
  CompiledSchedule compiled(schedule);
  PeriodGridEvaluator eval(compiled, decomp, midpoint_offsets(points_per_period, schedule));
  return eval.scalar_signal(state0, a, periods);
}

RdmSignal sample_rdm_signal(const VectorXcd& state0, const DriveSchedule& schedule,
                            const SpectralDecomposition& decomp,
                            const std::vector<int>& subsystem_sites, int periods,
                            int points_per_period) {
  CompiledSchedule compiled(schedule);
  PeriodGridEvaluator eval(compiled, decomp, midpoint_offsets(points_per_period, schedule));
  return eval.rdm_signal(state0, subsystem_sites, periods);
}

ScalarSignal reblock(const ScalarSignal& signal, int factor) {
  if (factor < 1) throw std::invalid_argument("reblock factor must be >= 1");
  if (signal.periods % factor != 0)
    throw std::invalid_argument("period count must be divisible by the reblock factor");
  ScalarSignal out;
  out.periods = signal.periods / factor;
  out.points_per_period = signal.points_per_period * factor;
  out.offsets.resize(out.points_per_period);
  for (int q = 0; q < factor; ++q)
    for (int k = 0; k < signal.points_per_period; ++k)
      out.offsets(q * signal.points_per_period + k) = (q + signal.offsets(k)) / factor;
  out.values.resize(out.periods, out.points_per_period);
  for (int m = 0; m < out.periods; ++m)
    for (int q = 0; q < factor; ++q)
      out.values.row(m).segment(q * signal.points_per_period, signal.points_per_period) =
          signal.values.row(m * factor + q);
  return out;
}

VectorXd reference_profile(const ScalarSignal& signal) {
  if (signal.periods < 1) throw std::invalid_argument("signal is empty");
  return signal.values.colwise().mean();
}

std::vector<MatrixXcd> reference_profile(const RdmSignal& signal) {
  if (signal.periods < 1) throw std::invalid_argument("signal is empty");
  std::vector<MatrixXcd> profile;
  profile.reserve(signal.points_per_period);
  for (int k = 0; k < signal.points_per_period; ++k) {
    MatrixXcd mean = signal.values[0][k];
    for (int m = 1; m < signal.periods; ++m) mean += signal.values[m][k];
    profile.push_back(mean / static_cast<double>(signal.periods));
  }
  return profile;
}

VectorXd period_distances(const ScalarSignal& signal, const VectorXd& profile) {
  if (profile.size() != signal.points_per_period)
    throw std::invalid_argument("profile length does not match the grid");
  VectorXd distances(signal.periods);
  for (int m = 0; m < signal.periods; ++m)
    distances(m) = (signal.values.row(m).transpose() - profile).squaredNorm() /
                   signal.points_per_period;
  return distances;
}

VectorXd period_distances(const RdmSignal& signal, const std::vector<MatrixXcd>& profile) {
  if (static_cast<int>(profile.size()) != signal.points_per_period)
    throw std::invalid_argument("profile length does not match the grid");
  VectorXd distances(signal.periods);
  for (int m = 0; m < signal.periods; ++m) {
    double acc = 0.0;
    for (int k = 0; k < signal.points_per_period; ++k)
      acc += trace_distance(signal.values[m][k], profile[k]);
    distances(m) = acc / signal.points_per_period;
  }
  return distances;
}

double epsilon_hat(const VectorXd& distances) {
  const long m_total = distances.size();
  if (m_total < 1) throw std::invalid_argument("need at least one period");
  std::vector<double> sorted(distances.data(), distances.data() + m_total);
  for (double d : sorted)
    if (!(d >= 0.0)) throw std::invalid_argument("distances must be >= 0");
  std::sort(sorted.begin(), sorted.end());

  // good-fraction(eps) is a non-decreasing step function; 1 - eps strictly
  // decreases, so scan the intervals between jumps for the first crossing
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= m_total; ++i) {
    const double lo = i == 0 ? 0.0 : sorted[i - 1];
    const double hi = i == m_total ? std::numeric_limits<double>::infinity() : sorted[i];
    const double candidate = std::max(lo, 1.0 - static_cast<double>(i) / m_total);
    if (candidate < hi || i == m_total) best = std::min(best, candidate);
  }
  return best;
}

double good_fraction_at(const VectorXd& distances, double eps) {
  if (distances.size() < 1) throw std::invalid_argument("need at least one period");
  long good = 0;
  for (long m = 0; m < distances.size(); ++m)
    if (distances(m) <= eps) ++good;
  return static_cast<double>(good) / distances.size();
}

double theory_bound_scalar(double d2, double d_eff) {
  if (!(d2 >= 1.0) || !(d_eff >= 1.0)) throw std::invalid_argument("D2 and D_eff must be >= 1");
  return std::sqrt(d2 / d_eff);
}

double theory_bound_rdm(int d_s, double d2, double d_eff) {
  if (d_s < 2) throw std::invalid_argument("d_s must be >= 2");
  if (!(d2 >= 1.0) || !(d_eff >= 1.0)) throw std::invalid_argument("D2 and D_eff must be >= 1");
  return std::pow(static_cast<double>(d_s) * d_s * d2 / d_eff, 0.25);
}

double equilibration_slack(double mean_bound, double floor_term, int periods) {
  if (periods < 1) throw std::invalid_argument("periods must be >= 1");
  return 5.0 * (mean_bound + floor_term) / std::sqrt(static_cast<double>(periods));
}

namespace {

PeriodicityReport finish_report(VectorXd distances, int periods, int points, double mean_bound,
                                double floor_term) {
  PeriodicityReport rep;
  rep.periods = periods;
  rep.points_per_period = points;
  rep.per_period_distance = std::move(distances);
  rep.epsilon_hat = epsilon_hat(rep.per_period_distance);
  rep.theory_bound = std::sqrt(mean_bound + equilibration_slack(mean_bound, floor_term, periods));
  rep.bound_satisfied = rep.epsilon_hat <= rep.theory_bound;
  return rep;
}

}  // namespace

PeriodicityReport make_scalar_report(const ScalarSignal& signal, double d2, double d_eff) {
  VectorXd distances = period_distances(signal, reference_profile(signal));
  return finish_report(std::move(distances), signal.periods, signal.points_per_period,
                       d2 / d_eff, 1.0 / d_eff);
}

PeriodicityReport make_rdm_report(const RdmSignal& signal, int d_s, double d2, double d_eff) {
  VectorXd distances = period_distances(signal, reference_profile(signal));
  const double mean_bound = d_s * std::sqrt(d2 / d_eff);
  return finish_report(std::move(distances), signal.periods, signal.points_per_period, mean_bound,
                       1.0 / std::sqrt(d_eff));
}

nlohmann::json periodicity_report_json(const PeriodicityReport& report) {
  std::vector<double> distances(report.per_period_distance.data(),
                                report.per_period_distance.data() + report.per_period_distance.size());
  return {{"M", report.periods},
          {"K", report.points_per_period},
          {"epsilon_hat", report.epsilon_hat},
          {"theory_bound", report.theory_bound},
          {"bound_satisfied", report.bound_satisfied},
          {"distances", distances}};
}

}  // namespace flab
