#include "flab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace flab {

Observable::Observable(MatrixXcd m) : matrix(std::move(m)) {
  require_hermitian(matrix, 1e-12);
  op_norm = hermitian_norm(matrix);
}

Observable Observable::normalized() const {
  if (op_norm <= 0.0) throw NumericalError("cannot normalize a zero observable");
  Observable out(*this);
  out.matrix /= op_norm;
  out.op_norm = 1.0;
  return out;
}

Observable pauli_string_observable(int n_qubits, const std::vector<int>& sites,
                                   const std::string& axes) {
  const long dim = check_qubit_count(n_qubits);
  if (sites.size() != axes.size())
    throw std::invalid_argument("sites and axes must have equal length");
  MatrixXcd m = MatrixXcd::Identity(dim, dim);
  for (size_t i = 0; i < sites.size(); ++i) {
    const int site = sites[i];
    if (site < 1 || site > n_qubits) throw std::invalid_argument("site out of range");
    int axis;
    switch (axes[i]) {
      case 'x': case 'X': axis = AxisX; break;
      case 'y': case 'Y': axis = AxisY; break;
      case 'z': case 'Z': axis = AxisZ; break;
      default: throw std::invalid_argument("axis must be one of x, y, z");
    }
    PieceSpec p = PieceSpec::zero(n_qubits, 1.0);
    p.on_site(site - 1, axis) = 1.0;
    m = build_piece_matrix(p, n_qubits) * m;
  }
  return Observable(std::move(m));
}

VectorXcd stroboscopic_state(const OverlapDecomposition& overlaps,
                             const SpectralDecomposition& decomp, long long m) {
  if (m < 0) throw std::invalid_argument("period index must be >= 0");
  VectorXcd coeff(overlaps.n_kept());
  for (int k = 0; k < overlaps.n_kept(); ++k) {
    const double phase = std::arg(decomp.distinct_eigenvalues[overlaps.cluster_indices[k]]);
    coeff(k) = overlaps.weights(k) *
               std::polar(1.0, std::remainder(static_cast<double>(m) * phase, kTwoPi));
  }
  return overlaps.components * coeff;
}

VectorXcd state_at(const VectorXcd& state0, const CompiledSchedule& schedule,
                   const SpectralDecomposition& decomp, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  if (state0.size() != decomp.dim())
    throw std::invalid_argument("state dimension does not match the decomposition");
  const double whole = std::floor(t);
  OverlapDecomposition overlaps = eigenspace_overlaps(state0, decomp);
  VectorXcd strobe = stroboscopic_state(overlaps, decomp, static_cast<long long>(whole));
  const double frac = t - whole;
  if (frac == 0.0) return strobe;
  return schedule.propagator_to(frac) * strobe;
}

VectorXcd state_at(const VectorXcd& state0, const DriveSchedule& schedule,
                   const SpectralDecomposition& decomp, double t) {
  return state_at(state0, CompiledSchedule(schedule), decomp, t);
}

double observable_expectation(const Observable& a, const VectorXcd& state) {
  if (a.matrix.rows() != state.size())
    throw std::invalid_argument("observable and state dimensions differ");
  return std::real(state.dot(a.matrix * state));
}

MatrixXcd reduced_density_matrix(const VectorXcd& state, const std::vector<int>& subsystem_sites) {
  const long dim = state.size();
  int n_qubits = 0;
  while ((1L << n_qubits) < dim) ++n_qubits;
  if ((1L << n_qubits) != dim) throw std::invalid_argument("state dimension is not a power of 2");

  if (subsystem_sites.empty()) throw std::invalid_argument("subsystem must be nonempty");
  std::vector<int> sites = subsystem_sites;
  std::sort(sites.begin(), sites.end());
  if (sites.front() < 1 || sites.back() > n_qubits)
    throw std::invalid_argument("subsystem site out of range");
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end())
    throw std::invalid_argument("subsystem sites must be distinct");

  const int n_sub = static_cast<int>(sites.size());
  const long d_s = 1L << n_sub;
  const long d_env = dim >> n_sub;

  // site l occupies bit N - l of the basis index; the subsystem index keeps
  // the site order of S (first site of S = most significant subsystem bit)
  std::vector<int> sub_bits(n_sub);
  for (int a = 0; a < n_sub; ++a) sub_bits[a] = n_qubits - sites[a];
  std::vector<int> env_bits;
  for (int bit = n_qubits - 1; bit >= 0; --bit)
    if (std::find(sub_bits.begin(), sub_bits.end(), bit) == sub_bits.end())
      env_bits.push_back(bit);

  std::vector<long> scatter_sub(d_s, 0);
  for (long s = 0; s < d_s; ++s)
    for (int a = 0; a < n_sub; ++a)
      if ((s >> (n_sub - 1 - a)) & 1) scatter_sub[s] |= 1L << sub_bits[a];
  std::vector<long> scatter_env(d_env, 0);
  for (long e = 0; e < d_env; ++e)
    for (size_t a = 0; a < env_bits.size(); ++a)
      if ((e >> (env_bits.size() - 1 - a)) & 1) scatter_env[e] |= 1L << env_bits[a];

  MatrixXcd rho = MatrixXcd::Zero(d_s, d_s);
  VectorXcd slice(d_s);
  for (long e = 0; e < d_env; ++e) {
    for (long s = 0; s < d_s; ++s) slice(s) = state(scatter_sub[s] | scatter_env[e]);
    rho.noalias() += slice * slice.adjoint();
  }
  return rho;
}

void require_density_matrix(const MatrixXcd& rho, double tol) {
  require_hermitian(rho, tol);
  if (std::abs(std::real(rho.trace()) - 1.0) > tol || std::abs(std::imag(rho.trace())) > tol)
    throw NumericalError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw NumericalError("density matrix has a negative eigenvalue");
}

double von_neumann_entropy(const MatrixXcd& rho) {
  require_hermitian(rho, 1e-10);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  double entropy = 0.0;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()(i);
    if (p < -1e-10)
      throw NumericalError("density matrix eigenvalue below -1e-10; upstream bug");
    if (p <= 0.0) continue;
    entropy -= p * std::log(p);
  }
  return entropy;
}

double trace_distance(const MatrixXcd& rho1, const MatrixXcd& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
    throw std::invalid_argument("dimension mismatch in trace_distance");
  MatrixXcd diff = rho1 - rho2;
  require_hermitian(diff, 1e-10);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return es.eigenvalues().cwiseAbs().sum();
}

std::vector<MatrixXcd> clock_shift_basis(int d_s) {
  if (d_s < 2) throw std::invalid_argument("d_s must be >= 2");
  std::vector<MatrixXcd> ops;
  ops.reserve(static_cast<size_t>(d_s) * d_s);
  const double root = 1.0 / std::sqrt(static_cast<double>(d_s));
  for (int j1 = 0; j1 < d_s; ++j1) {
    for (int j2 = 0; j2 < d_s; ++j2) {
      MatrixXcd a = MatrixXcd::Zero(d_s, d_s);
      for (int k = 0; k < d_s; ++k)
        a((j1 + k) % d_s, k) = root * std::polar(1.0, kTwoPi * j2 * k / d_s);
      ops.push_back(std::move(a));
    }
  }
  return ops;
}

}  // namespace flab
