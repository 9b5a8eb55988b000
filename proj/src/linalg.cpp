#include "flab/linalg.hpp"

#include <atomic>

namespace flab {

namespace {
std::atomic<int> g_dimension_cap{14};
}

int dimension_cap() { return g_dimension_cap.load(); }

void set_dimension_cap(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 30)
    throw std::invalid_argument("dimension cap must be in [1, 30]");
  g_dimension_cap.store(n_qubits);
}

long check_qubit_count(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  if (n_qubits > dimension_cap())
    throw std::invalid_argument("n_qubits = " + std::to_string(n_qubits) +
                                " exceeds the dimension cap " +
                                std::to_string(dimension_cap()));
  return 1L << n_qubits;
}

double max_abs(const MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= tol * scale;
}

void require_hermitian(const MatrixXcd& m, double tol) {
  if (!is_hermitian(m, tol)) throw NumericalError("matrix is not Hermitian within tolerance");
}

bool is_unitary(const MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  MatrixXcd g = m.adjoint() * m;
  g.diagonal().array() -= 1.0;
  return max_abs(g) <= tol;
}

void require_unitary(const MatrixXcd& m, double tol) {
  if (!is_unitary(m, tol)) throw NumericalError("matrix is not unitary within tolerance");
}

double spectral_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  // sqrt of the top eigenvalue of m^dag m; adequate at desk scale
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed in spectral_norm");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hermitian_norm(const MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed in hermitian_norm");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace flab
