#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace flab {

using complexd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Thrown when a matrix fails a structural precondition (non-Hermitian input,
// loss of unitarity, eigensolver breakdown).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an eigenphase clustering is tolerance-sensitive and the caller
// asked for a non-marginal decomposition.
struct MarginalDecompositionError : NumericalError {
  using NumericalError::NumericalError;
};

// Dense matrices only; the cap bounds 2^N allocations. Configurable at runtime.
int dimension_cap();
void set_dimension_cap(int n_qubits);

// Returns 2^n_qubits, throwing if n_qubits < 1 or above the cap.
long check_qubit_count(int n_qubits);

// Distance on the phase circle, result in [0, pi].
inline double circular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, kTwoPi));
}

double max_abs(const MatrixXcd& m);

bool is_hermitian(const MatrixXcd& m, double tol = 1e-12);
void require_hermitian(const MatrixXcd& m, double tol = 1e-12);

bool is_unitary(const MatrixXcd& m, double tol = 1e-10);
void require_unitary(const MatrixXcd& m, double tol = 1e-10);

// Largest singular value. For Hermitian input this equals the largest |eigenvalue|.
double spectral_norm(const MatrixXcd& m);

// Largest |eigenvalue| of a Hermitian matrix (cheaper than a full SVD).
double hermitian_norm(const MatrixXcd& h);

}  // namespace flab
