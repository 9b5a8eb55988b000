#pragma once

#include <string>
#include <vector>

#include "flab/floquet.hpp"
#include "flab/random_states.hpp"

namespace flab {

// Hermitian observable with its operator norm attached; the periodicity
// bounds assume the norm-1 convention, use normalized() to enforce it.
struct Observable {
  MatrixXcd matrix;
  double op_norm = 0.0;

  explicit Observable(MatrixXcd m);
  Observable normalized() const;
};

// Tensor product of Pauli matrices on the listed sites (1-based), identity
// elsewhere. axes uses one character per site from {x, y, z}.
Observable pauli_string_observable(int n_qubits, const std::vector<int>& sites,
                                   const std::string& axes);

// sum_j c_j lambda_j^m |j>; equals m applications of U_F.
VectorXcd stroboscopic_state(const OverlapDecomposition& overlaps,
                             const SpectralDecomposition& decomp, long long m);

// psi(t) = U(0, t - floor(t)) applied to the stroboscopic state at floor(t).
VectorXcd state_at(const VectorXcd& state0, const CompiledSchedule& schedule,
                   const SpectralDecomposition& decomp, double t);
VectorXcd state_at(const VectorXcd& state0, const DriveSchedule& schedule,
                   const SpectralDecomposition& decomp, double t);

double observable_expectation(const Observable& a, const VectorXcd& state);

// Partial trace over the complement of the listed sites (1-based, possibly
// non-contiguous).
MatrixXcd reduced_density_matrix(const VectorXcd& state, const std::vector<int>& subsystem_sites);

void require_density_matrix(const MatrixXcd& rho, double tol = 1e-10);

// -sum p ln p; eigenvalues in [-1e-10, 0) are clamped to 0, anything lower
// indicates an upstream bug and throws.
double von_neumann_entropy(const MatrixXcd& rho);

// Trace norm of the Hermitian difference.
double trace_distance(const MatrixXcd& rho1, const MatrixXcd& rho2);

// The d_S^2 shift/phase operators A_{d_S j1 + j2 + 1}; trace-orthonormal,
// each with operator norm 1/sqrt(d_S).
std::vector<MatrixXcd> clock_shift_basis(int d_s);

}  // namespace flab
