#pragma once

#include <json.hpp>
#include <vector>

#include "flab/linalg.hpp"
#include "flab/spin_model.hpp"

namespace flab {

// e^{-i H dt} via eigendecomposition of H; exact for a constant Hamiltonian.
MatrixXcd hermitian_propagator(const MatrixXcd& hamiltonian, double dt);

// Piece eigendecompositions cached once so that repeated propagator
// evaluations (many intra-period offsets, long products) cost one
// matrix product each instead of one eigensolve each.
class CompiledSchedule {
 public:
  explicit CompiledSchedule(const DriveSchedule& schedule);

  const DriveSchedule& schedule() const { return schedule_; }
  long dim() const;
  int n_pieces() const { return schedule_.n_pieces(); }

  MatrixXcd piece_propagator(int piece, double dt) const;  // e^{-i H_j dt}
  const MatrixXcd& full_piece_propagator(int piece) const;
  const MatrixXcd& floquet_operator() const;
  // product of the first `pieces_done` full piece propagators (identity for 0)
  const MatrixXcd& prefix_product(int pieces_done) const;
  MatrixXcd propagator_to(double x) const;

  const MatrixXcd& piece_basis(int piece) const { return bases_.at(piece); }
  const VectorXd& piece_energies(int piece) const { return energies_.at(piece); }

 private:
  DriveSchedule schedule_;
  std::vector<MatrixXcd> bases_;
  std::vector<VectorXd> energies_;
  std::vector<MatrixXcd> full_props_;
  std::vector<MatrixXcd> prefix_;
};

// Product of piece propagators in time order: piece 1 is the rightmost factor.
MatrixXcd floquet_operator(const DriveSchedule& schedule);

// U(0, x) for x in [0, 1]: full propagators of completed pieces, partial
// exponential of the piece containing x.
MatrixXcd propagator_to(const DriveSchedule& schedule, double x);

// Eigenstructure of a unitary: distinct eigenvalues lambda_j on the unit
// circle, orthonormal eigenvectors grouped into contiguous cluster blocks,
// multiplicities d_j. Quasienergies use the convention lambda = e^{-iE},
// E in [-pi, pi). Projectors are formed on demand from the cluster blocks;
// their span is stable even when individual eigenvectors are not.
struct SpectralDecomposition {
  VectorXd eigenphases;               // E_i per eigenvector, aligned with columns
  MatrixXcd eigenvectors;             // orthonormal columns, grouped by cluster
  std::vector<int> cluster_assignments;  // eigenvector index -> cluster label
  std::vector<int> cluster_offsets;   // size s+1; cluster j owns columns [o_j, o_{j+1})
  std::vector<int> multiplicities;    // d_j
  std::vector<complexd> distinct_eigenvalues;  // lambda_j (unit modulus)
  std::vector<double> cluster_phases;          // E_j of the representatives
  double cluster_tol = 0.0;
  double min_intercluster_gap = 0.0;  // circular gap between adjacent clusters
  bool marginal = false;              // gap within a factor 10 of cluster_tol

  long dim() const { return eigenvectors.rows(); }
  int n_clusters() const { return static_cast<int>(multiplicities.size()); }
  MatrixXcd projector(int cluster) const;
  Eigen::Ref<const MatrixXcd> cluster_block(int cluster) const;
};

inline constexpr double kDefaultClusterTol = 1e-8;
inline constexpr double kDefaultRatioTol = 1e-8;

// Eigenphases clustered by single-linkage circular distance <= cluster_tol.
SpectralDecomposition spectral_decomposition(const MatrixXcd& unitary,
                                             double cluster_tol = kDefaultClusterTol);

// D1 = 2^{-N} sum d_j^2; D2 = the largest multiplicity among eigenvalue
// ratios lambda_k / lambda_j over ordered pairs j != k (1 when no ratios
// coincide and when the ratio set is empty). gap_margin is the smallest
// circular separation between ratio phases not identified within ratio_tol;
// phase_gap_margin is the smallest gap between distinct eigenphase clusters.
struct DegeneracyMetrics {
  double d1 = 1.0;
  long long d2 = 1;
  double gap_margin = 0.0;
  double phase_gap_margin = 0.0;
  bool marginal = false;
};

DegeneracyMetrics degeneracy_metrics(const SpectralDecomposition& decomp,
                                     double ratio_tol = kDefaultRatioTol);

nlohmann::json spectral_report_json(const SpectralDecomposition& decomp,
                                    const DegeneracyMetrics& metrics);

}  // namespace flab
