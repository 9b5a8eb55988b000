#include "flab/random_states.hpp"

namespace flab {

VectorXcd sample_haar_product_state(int n_qubits, Rng& rng) {
  const long dim = check_qubit_count(n_qubits);
  VectorXcd state = VectorXcd::Ones(1);
  for (int l = 0; l < n_qubits; ++l) {
    Eigen::Vector2cd q;
    q << complexd(rng.gaussian(), rng.gaussian()), complexd(rng.gaussian(), rng.gaussian());
    q.normalize();
    VectorXcd next(state.size() * 2);
    next.head(state.size()) = q(0) * state;
    next.tail(state.size()) = q(1) * state;
    state.swap(next);
  }
  (void)dim;
  return state;
}

OverlapDecomposition eigenspace_overlaps(const VectorXcd& state,
                                         const SpectralDecomposition& decomp) {
  if (state.size() != decomp.dim())
    throw std::invalid_argument("state dimension does not match the decomposition");

  // coefficients in the eigenvector basis; Pi_j psi is the cluster block slice
  VectorXcd coeffs = decomp.eigenvectors.adjoint() * state;

  OverlapDecomposition out;
  std::vector<double> weights;
  std::vector<VectorXcd> comps;
  for (int j = 0; j < decomp.n_clusters(); ++j) {
    const int lo = decomp.cluster_offsets[j];
    const int len = decomp.multiplicities[j];
    const double cj = coeffs.segment(lo, len).norm();
    if (cj <= kOverlapDropThreshold) continue;
    out.cluster_indices.push_back(j);
    weights.push_back(cj);
    comps.push_back(decomp.cluster_block(j) * (coeffs.segment(lo, len) / cj));
  }
  out.weights = Eigen::Map<VectorXd>(weights.data(), static_cast<long>(weights.size()));
  out.components.resize(decomp.dim(), static_cast<long>(comps.size()));
  for (size_t a = 0; a < comps.size(); ++a) out.components.col(static_cast<long>(a)) = comps[a];
  return out;
}

double effective_dimension(const OverlapDecomposition& overlaps) {
  const double sum4 = overlaps.weights.array().square().square().sum();
  if (sum4 <= 0.0) throw std::invalid_argument("overlap decomposition is empty");
  return 1.0 / sum4;
}

double diagonal_ensemble_expectation(const OverlapDecomposition& overlaps,
                                     const SpectralDecomposition& decomp, const MatrixXcd& a) {
  if (a.rows() != decomp.dim() || a.cols() != decomp.dim())
    throw std::invalid_argument("observable dimension does not match the decomposition");
  double value = 0.0;
  for (int k = 0; k < overlaps.n_kept(); ++k) {
    const auto j = overlaps.components.col(k);
    value += overlaps.weights(k) * overlaps.weights(k) * std::real(j.dot(a * j));
  }
  return value;
}

}  // namespace flab
