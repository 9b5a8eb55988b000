#include "flab/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flab {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kPencilMergeTol = 1e-4;
constexpr double kResidualTol = 1e-9;

struct RawEigen {
  VectorXcd values;
  MatrixXcd vectors;
};

// Eigendecomposition of a unitary through the Hermitian pencil
// K = e^{i phi} U + e^{-i phi} U^dag. Eigenvectors of K are eigenvectors of U
// except where two distinct eigenphases collide through the cosine; those
// small clusters are resolved by a Schur step on the compressed block.
RawEigen unitary_eigensystem(const MatrixXcd& u) {
  const long d = u.rows();
  const double phi = 0.5740316430885;
  const complexd z = std::polar(1.0, phi);

  MatrixXcd pencil = z * u + std::conj(z) * u.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(pencil);
  if (es.info() != Eigen::Success) throw NumericalError("pencil eigendecomposition failed");

  RawEigen out;
  out.vectors = es.eigenvectors();
  const VectorXd mu = es.eigenvalues();

  long i = 0;
  while (i < d) {
    long j = i + 1;
    while (j < d && mu(j) - mu(j - 1) <= kPencilMergeTol) ++j;
    const long w = j - i;
    if (w > 1) {
      MatrixXcd block = out.vectors.middleCols(i, w).adjoint() * (u * out.vectors.middleCols(i, w));
      Eigen::ComplexSchur<MatrixXcd> schur(block);
      if (schur.info() != Eigen::Success) throw NumericalError("block Schur failed");
      out.vectors.middleCols(i, w) = out.vectors.middleCols(i, w) * schur.matrixU();
    }
    i = j;
  }

  MatrixXcd image = u * out.vectors;  // Rayleigh values and residuals in one pass
  out.values.resize(d);
  double residual = 0.0;
  for (long k = 0; k < d; ++k) {
    out.values(k) = out.vectors.col(k).dot(image.col(k));
    residual = std::max(residual, (image.col(k) - out.values(k) * out.vectors.col(k)).cwiseAbs().maxCoeff());
  }
  if (residual > kResidualTol) {
    // rare: fall back to the full Schur decomposition of U
    Eigen::ComplexSchur<MatrixXcd> schur(u);
    if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
    out.vectors = schur.matrixU();
    out.values = schur.matrixT().diagonal();
  }
  return out;
}

}  // namespace

MatrixXcd hermitian_propagator(const MatrixXcd& hamiltonian, double dt) {
  require_hermitian(hamiltonian, 1e-12);
  if (!(dt >= 0.0)) throw std::invalid_argument("dt must be >= 0");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hamiltonian);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  VectorXcd phases = (complexd(0.0, -dt) * es.eigenvalues()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CompiledSchedule::CompiledSchedule(const DriveSchedule& schedule) : schedule_(schedule) {
  schedule_.validate();
  const int n = schedule_.n_pieces();
  bases_.reserve(n);
  energies_.reserve(n);
  full_props_.reserve(n);
  prefix_.reserve(n + 1);
  for (int j = 0; j < n; ++j) {
    MatrixXcd h = build_piece_matrix(schedule_.pieces[j], schedule_.n_qubits);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("piece eigendecomposition failed");
    bases_.push_back(es.eigenvectors());
    energies_.push_back(es.eigenvalues());
  }
  const long d = dim();
  prefix_.push_back(MatrixXcd::Identity(d, d));
  for (int j = 0; j < n; ++j) {
    full_props_.push_back(piece_propagator(j, schedule_.pieces[j].duration));
    prefix_.push_back(full_props_[j] * prefix_[j]);
  }
}

long CompiledSchedule::dim() const { return 1L << schedule_.n_qubits; }

MatrixXcd CompiledSchedule::piece_propagator(int piece, double dt) const {
  if (!(dt >= 0.0)) throw std::invalid_argument("dt must be >= 0");
  VectorXcd phases = (complexd(0.0, -dt) * energies_[piece]).array().exp();
  return bases_[piece] * phases.asDiagonal() * bases_[piece].adjoint();
}

const MatrixXcd& CompiledSchedule::full_piece_propagator(int piece) const {
  return full_props_.at(piece);
}

const MatrixXcd& CompiledSchedule::floquet_operator() const { return prefix_.back(); }

const MatrixXcd& CompiledSchedule::prefix_product(int pieces_done) const {
  return prefix_.at(pieces_done);
}

MatrixXcd CompiledSchedule::propagator_to(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("x must lie in [0, 1]");
  const auto& t = schedule_.boundaries;
  int done = 0;
  while (done < schedule_.n_pieces() && x >= t[done + 1]) ++done;
  if (done == schedule_.n_pieces()) return floquet_operator();
  const double dt = x - t[done];
  if (dt == 0.0) return prefix_[done];
  return piece_propagator(done, dt) * prefix_[done];
}

MatrixXcd floquet_operator(const DriveSchedule& schedule) {
  return CompiledSchedule(schedule).floquet_operator();
}

MatrixXcd propagator_to(const DriveSchedule& schedule, double x) {
  return CompiledSchedule(schedule).propagator_to(x);
}

MatrixXcd SpectralDecomposition::projector(int cluster) const {
  auto block = cluster_block(cluster);
  return block * block.adjoint();
}

Eigen::Ref<const MatrixXcd> SpectralDecomposition::cluster_block(int cluster) const {
  const int lo = cluster_offsets.at(cluster);
  const int hi = cluster_offsets.at(cluster + 1);
  return eigenvectors.middleCols(lo, hi - lo);
}

SpectralDecomposition spectral_decomposition(const MatrixXcd& unitary, double cluster_tol) {
  if (unitary.rows() != unitary.cols() || unitary.rows() < 1)
    throw std::invalid_argument("unitary must be a square matrix");
  if (!(cluster_tol > 0.0)) throw std::invalid_argument("cluster_tol must be > 0");
  require_unitary(unitary, kUnitaryTol);

  const long d = unitary.rows();
  RawEigen raw = unitary_eigensystem(unitary);

  // quasienergies: lambda = e^{-iE}, E in [-pi, pi)
  VectorXd phase(d);
  for (long i = 0; i < d; ++i) phase(i) = -std::arg(raw.values(i));

  std::vector<long> order(d);
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(), [&](long a, long b) { return phase(a) < phase(b); });

  // single-linkage chaining on the sorted circle
  std::vector<long> cluster_of(d, 0);
  long n_clusters = 1;
  for (long i = 1; i < d; ++i) {
    if (phase(order[i]) - phase(order[i - 1]) > cluster_tol) ++n_clusters;
    cluster_of[i] = n_clusters - 1;
  }
  const double wrap_gap =
      d > 1 ? phase(order[0]) + kTwoPi - phase(order[d - 1]) : kTwoPi;
  const bool wrap_merged = n_clusters > 1 && wrap_gap <= cluster_tol;

  // group member positions (in sorted order) per cluster; a wrap merge makes
  // the last cluster circularly continue into the first
  std::vector<std::vector<long>> members(n_clusters);
  for (long i = 0; i < d; ++i) members[cluster_of[i]].push_back(i);
  if (wrap_merged) {
    auto& last = members[n_clusters - 1];
    last.insert(last.end(), members[0].begin(), members[0].end());
    members.erase(members.begin());
    --n_clusters;
  }

  SpectralDecomposition out;
  out.cluster_tol = cluster_tol;
  out.eigenvectors.resize(d, d);
  out.eigenphases.resize(d);
  out.cluster_assignments.assign(d, 0);
  out.cluster_offsets.assign(1, 0);

  for (long c = 0; c < n_clusters; ++c) {
    complexd sum = 0.0;
    for (long pos : members[c]) sum += raw.values(order[pos]) / std::abs(raw.values(order[pos]));
    complexd rep = std::abs(sum) > 1e-12 ? sum / std::abs(sum)
                                         : raw.values(order[members[c][0]]);
    const int base = out.cluster_offsets.back();
    for (size_t k = 0; k < members[c].size(); ++k) {
      const long src = order[members[c][k]];
      out.eigenvectors.col(base + static_cast<long>(k)) = raw.vectors.col(src);
      out.eigenphases(base + static_cast<long>(k)) = phase(src);
      out.cluster_assignments[base + k] = static_cast<int>(c);
    }
    out.cluster_offsets.push_back(base + static_cast<int>(members[c].size()));
    out.multiplicities.push_back(static_cast<int>(members[c].size()));
    out.distinct_eigenvalues.push_back(rep);
    out.cluster_phases.push_back(-std::arg(rep));
  }

  // smallest circular gap between members of adjacent clusters
  double min_gap = kTwoPi;
  if (n_clusters > 1) {
    for (long i = 1; i < d; ++i) {
      const double g = phase(order[i]) - phase(order[i - 1]);
      if (g > cluster_tol) min_gap = std::min(min_gap, g);
    }
    if (!wrap_merged) min_gap = std::min(min_gap, wrap_gap);
  }
  out.min_intercluster_gap = min_gap;
  out.marginal = n_clusters > 1 && min_gap < 10.0 * cluster_tol;
  return out;
}

DegeneracyMetrics degeneracy_metrics(const SpectralDecomposition& decomp, double ratio_tol) {
  if (!(ratio_tol > 0.0)) throw std::invalid_argument("ratio_tol must be > 0");
  const int s = decomp.n_clusters();
  const long dim = decomp.dim();

  DegeneracyMetrics out;
  out.marginal = decomp.marginal;
  out.phase_gap_margin = decomp.min_intercluster_gap;

  double sum_sq = 0.0;
  for (int dj : decomp.multiplicities) sum_sq += static_cast<double>(dj) * dj;
  out.d1 = sum_sq / static_cast<double>(dim);

  if (s < 2) {
    out.d2 = 1;
    out.gap_margin = kTwoPi;
    return out;
  }

  // phases of all eigenvalue ratios lambda_k / lambda_j, j != k, in [0, 2pi)
  std::vector<double> ratios;
  ratios.reserve(static_cast<size_t>(s) * (s - 1));
  for (int j = 0; j < s; ++j) {
    const double tj = std::arg(decomp.distinct_eigenvalues[j]);
    for (int k = 0; k < s; ++k) {
      if (k == j) continue;
      double r = std::fmod(std::arg(decomp.distinct_eigenvalues[k]) - tj, kTwoPi);
      if (r < 0.0) r += kTwoPi;
      ratios.push_back(r);
    }
  }
  std::sort(ratios.begin(), ratios.end());
  const size_t n = ratios.size();

  // rotate so the scan starts after the largest circular gap
  size_t start = 0;
  double largest_gap = ratios.front() + kTwoPi - ratios.back();
  for (size_t i = 1; i < n; ++i) {
    const double g = ratios[i] - ratios[i - 1];
    if (g > largest_gap) {
      largest_gap = g;
      start = i;
    }
  }
  if (largest_gap <= ratio_tol) {
    // every ratio chains with the next around the whole circle
    out.d2 = static_cast<long long>(n);
    out.gap_margin = 0.0;
    return out;
  }

  long long best = 1, run = 1;
  long long n_runs = 1;
  double margin = kTwoPi;
  for (size_t i = 1; i < n; ++i) {
    const size_t a = (start + i - 1) % n, b = (start + i) % n;
    double g = ratios[b] - ratios[a];
    if (g < 0.0) g += kTwoPi;
    if (g <= ratio_tol) {
      ++run;
    } else {
      ++n_runs;
      margin = std::min(margin, g);
      best = std::max(best, run);
      run = 1;
    }
  }
  best = std::max(best, run);
  margin = std::min(margin, largest_gap);
  out.d2 = best;
  out.gap_margin = n_runs > 1 ? margin : kTwoPi;
  // D2 is tolerance-sensitive when the nearest distinct ratio values sit
  // within a factor 10 of the identification tolerance
  out.marginal = out.marginal || out.gap_margin < 10.0 * ratio_tol;
  return out;
}

nlohmann::json spectral_report_json(const SpectralDecomposition& decomp,
                                    const DegeneracyMetrics& metrics) {
  std::vector<double> phases(decomp.eigenphases.data(),
                             decomp.eigenphases.data() + decomp.eigenphases.size());
  return {{"eigenphases", phases},
          {"multiplicities", decomp.multiplicities},
          {"D1", metrics.d1},
          {"D2", metrics.d2},
          {"gap_margin", metrics.gap_margin},
          {"phase_gap_margin", metrics.phase_gap_margin},
          {"marginal", metrics.marginal},
          {"cluster_tol", decomp.cluster_tol}};
}

}  // namespace flab
