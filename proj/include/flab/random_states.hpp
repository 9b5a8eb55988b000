#pragma once

#include <vector>

#include "flab/floquet.hpp"
#include "flab/linalg.hpp"
#include "flab/rng.hpp"

namespace flab {

// Tensor product of N single-qubit states, each Haar-uniform (two standard
// complex Gaussians, normalized). Unit norm by construction.
VectorXcd sample_haar_product_state(int n_qubits, Rng& rng);

// Expansion of a state over the Floquet eigenspaces: c_j = ||Pi_j psi||, with
// |j> the normalized projection. Clusters with c_j <= kOverlapDropThreshold
// are omitted to avoid division blow-ups.
struct OverlapDecomposition {
  std::vector<int> cluster_indices;  // indices into the decomposition's clusters
  VectorXd weights;                  // c_j, aligned with cluster_indices
  MatrixXcd components;              // column a holds |j_a>

  int n_kept() const { return static_cast<int>(cluster_indices.size()); }
};

inline constexpr double kOverlapDropThreshold = 1e-14;

OverlapDecomposition eigenspace_overlaps(const VectorXcd& state,
                                         const SpectralDecomposition& decomp);

// D_eff = 1 / sum_j c_j^4.
double effective_dimension(const OverlapDecomposition& overlaps);

// tr(psi_diag A) = sum_j c_j^2 <j|A|j>; equals the infinite-time average of
// <psi(m)|A|psi(m)> when D2 = 1.
double diagonal_ensemble_expectation(const OverlapDecomposition& overlaps,
                                     const SpectralDecomposition& decomp, const MatrixXcd& a);

}  // namespace flab
