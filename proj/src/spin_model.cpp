#include "flab/spin_model.hpp"

#include <cmath>

namespace flab {

namespace {

constexpr double kDurationTol = 1e-12;

void require_finite(const MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " contains a non-finite value");
}

// Single-qubit Pauli action on a basis ket: sigma^u |b> = amp |b'>.
// b' differs from b in the bit for x and y; amp carries the sign/phase.
inline complexd pauli_amp(int axis, int bit_in, int& bit_out) {
  switch (axis) {
    case AxisX:
      bit_out = 1 - bit_in;
      return 1.0;
    case AxisY:
      bit_out = 1 - bit_in;
      return bit_in == 0 ? complexd(0.0, 1.0) : complexd(0.0, -1.0);
    default:
      bit_out = bit_in;
      return bit_in == 0 ? 1.0 : -1.0;
  }
}

}  // namespace

MatrixXcd pauli_matrix(int axis) {
  MatrixXcd m(2, 2);
  switch (axis) {
    case AxisX: m << 0, 1, 1, 0; break;
    case AxisY: m << 0, complexd(0, -1), complexd(0, 1), 0; break;
    case AxisZ: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli axis must be 0, 1 or 2");
  }
  return m;
}

PieceSpec PieceSpec::zero(int n_qubits, double duration) {
  PieceSpec p;
  p.on_site = MatrixXd::Zero(n_qubits, 3);
  p.coupling = MatrixXd::Zero(std::max(0, n_qubits - 1), 9);
  p.duration = duration;
  return p;
}

DriveSchedule DriveSchedule::from_pieces(int n_qubits, std::vector<PieceSpec> pieces) {
  DriveSchedule s;
  s.n_qubits = n_qubits;
  s.pieces = std::move(pieces);
  s.boundaries.resize(s.pieces.size() + 1);
  s.boundaries[0] = 0.0;
  for (size_t j = 0; j < s.pieces.size(); ++j)
    s.boundaries[j + 1] = s.boundaries[j] + s.pieces[j].duration;
  if (!s.pieces.empty()) s.boundaries.back() = 1.0;  // absorb rounding in the last boundary
  s.validate();
  return s;
}

void DriveSchedule::validate() const {
  check_qubit_count(n_qubits);
  if (pieces.empty()) throw std::invalid_argument("schedule must have at least one piece");
  if (boundaries.size() != pieces.size() + 1)
    throw std::invalid_argument("boundary count does not match piece count");
  if (boundaries.front() != 0.0) throw std::invalid_argument("t_0 must be 0");
  double total = 0.0;
  for (size_t j = 0; j < pieces.size(); ++j) {
    const PieceSpec& p = pieces[j];
    if (!(p.duration > 0.0)) throw std::invalid_argument("piece duration must be > 0");
    if (p.on_site.rows() != n_qubits || p.on_site.cols() != 3)
      throw std::invalid_argument("on_site coefficients must be N x 3");
    if (p.coupling.rows() != n_qubits - 1 || (n_qubits > 1 && p.coupling.cols() != 9))
      throw std::invalid_argument("coupling coefficients must be (N-1) x 9");
    require_finite(p.on_site, "on_site");
    if (p.coupling.size() > 0) require_finite(p.coupling, "coupling");
    if (!(boundaries[j + 1] > boundaries[j]))
      throw std::invalid_argument("boundaries must be strictly increasing");
    if (std::abs(boundaries[j + 1] - boundaries[j] - p.duration) > kDurationTol)
      throw std::invalid_argument("boundaries are inconsistent with piece durations");
    total += p.duration;
  }
  if (std::abs(total - 1.0) > kDurationTol)
    throw std::invalid_argument("piece durations must sum to 1");
  if (std::abs(boundaries.back() - 1.0) > kDurationTol)
    throw std::invalid_argument("t_n must be 1");
}

void EnsembleShape::validate() const {
  const int n = n_pieces();
  if (n < 1) throw std::invalid_argument("ensemble must have at least one piece");
  if (coupling_flags.rows() != n || on_site_flags.cols() != 3 || coupling_flags.cols() != 9)
    throw std::invalid_argument("flag arrays must be n x 3 and n x 9");
  if (static_cast<int>(boundaries.size()) != n + 1)
    throw std::invalid_argument("T must have n+1 entries");
  if (boundaries.front() != 0.0 || std::abs(boundaries.back() - 1.0) > kDurationTol)
    throw std::invalid_argument("T must run from 0 to 1");
  for (int j = 0; j < n; ++j)
    if (!(boundaries[j + 1] > boundaries[j]))
      throw std::invalid_argument("T must be strictly increasing");
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < 3; ++a)
      if (on_site_flags(j, a) != 0 && on_site_flags(j, a) != 1)
        throw std::invalid_argument("alpha flags must be 0 or 1");
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < 9; ++a)
      if (coupling_flags(j, a) != 0 && coupling_flags(j, a) != 1)
        throw std::invalid_argument("gamma flags must be 0 or 1");
}

EnsembleShape model_b_shape() {
  EnsembleShape s;
  s.boundaries = {0.0, 0.5, 1.0};
  s.on_site_flags = MatrixXi::Zero(2, 3);
  s.coupling_flags = MatrixXi::Zero(2, 9);
  s.on_site_flags(0, AxisZ) = 1;
  s.coupling_flags(0, 3 * AxisZ + AxisZ) = 1;
  s.on_site_flags(1, AxisX) = 1;
  return s;
}

MatrixXcd build_piece_matrix(const PieceSpec& piece, int n_qubits) {
  const long dim = check_qubit_count(n_qubits);
  if (piece.on_site.rows() != n_qubits || piece.on_site.cols() != 3)
    throw std::invalid_argument("on_site coefficients must be N x 3");
  if (piece.coupling.rows() != n_qubits - 1 || (n_qubits > 1 && piece.coupling.cols() != 9))
    throw std::invalid_argument("coupling coefficients must be (N-1) x 9");
  require_finite(piece.on_site, "on_site");
  if (piece.coupling.size() > 0) require_finite(piece.coupling, "coupling");

  MatrixXcd h = MatrixXcd::Zero(dim, dim);

  // site l (1-based) lives at bit position N - l; site 1 is the MSB
  auto bit_of_site = [n_qubits](int site) { return n_qubits - site; };

  for (int site = 1; site <= n_qubits; ++site) {
    const int bit = bit_of_site(site);
    for (int axis = 0; axis < 3; ++axis) {
      const double c = piece.on_site(site - 1, axis);
      if (c == 0.0) continue;
      for (long col = 0; col < dim; ++col) {
        int b = (col >> bit) & 1, bo;
        const complexd amp = pauli_amp(axis, b, bo);
        const long row = (col & ~(1L << bit)) | (static_cast<long>(bo) << bit);
        h(row, col) += c * amp;
      }
    }
  }
  for (int bond = 1; bond <= n_qubits - 1; ++bond) {
    const int bit_l = bit_of_site(bond), bit_r = bit_of_site(bond + 1);
    for (int u = 0; u < 3; ++u) {
      for (int v = 0; v < 3; ++v) {
        const double c = piece.coupling(bond - 1, 3 * u + v);
        if (c == 0.0) continue;
        for (long col = 0; col < dim; ++col) {
          int bl = (col >> bit_l) & 1, br = (col >> bit_r) & 1, blo, bro;
          const complexd amp = pauli_amp(u, bl, blo) * pauli_amp(v, br, bro);
          long row = (col & ~(1L << bit_l)) | (static_cast<long>(blo) << bit_l);
          row = (row & ~(1L << bit_r)) | (static_cast<long>(bro) << bit_r);
          h(row, col) += c * amp;
        }
      }
    }
  }
  return h;
}

DriveSchedule make_model_b(const VectorXd& h_x, const VectorXd& h_z, const VectorXd& coupling_zz) {
  const int n = static_cast<int>(h_x.size());
  if (h_z.size() != n) throw std::invalid_argument("h_x and h_z must have equal length N");
  if (coupling_zz.size() != std::max(0, n - 1))
    throw std::invalid_argument("coupling_zz must have length N-1");

  PieceSpec p1 = PieceSpec::zero(n, 0.5);
  p1.on_site.col(AxisZ) = h_z;
  if (n > 1) p1.coupling.col(3 * AxisZ + AxisZ) = coupling_zz;
  PieceSpec p2 = PieceSpec::zero(n, 0.5);
  p2.on_site.col(AxisX) = h_x;
  return DriveSchedule::from_pieces(n, {std::move(p1), std::move(p2)});
}

DriveSchedule make_ensemble_schedule(const EnsembleShape& shape, const EnsembleParameters& params,
                                     int n_qubits) {
  shape.validate();
  const int n = shape.n_pieces();
  if (static_cast<int>(params.on_site.size()) != n || static_cast<int>(params.coupling.size()) != n)
    throw std::invalid_argument("parameter blocks must match the piece count");

  std::vector<PieceSpec> pieces;
  pieces.reserve(n);
  for (int j = 0; j < n; ++j) {
    PieceSpec p = PieceSpec::zero(n_qubits, shape.boundaries[j + 1] - shape.boundaries[j]);
    if (params.on_site[j].rows() != n_qubits || params.on_site[j].cols() != 3)
      throw std::invalid_argument("on_site parameters must be N x 3");
    if (params.coupling[j].rows() != n_qubits - 1 ||
        (n_qubits > 1 && params.coupling[j].cols() != 9))
      throw std::invalid_argument("coupling parameters must be (N-1) x 9");
    for (int a = 0; a < 3; ++a)
      if (shape.on_site_flags(j, a)) p.on_site.col(a) = params.on_site[j].col(a);
    if (n_qubits > 1)
      for (int a = 0; a < 9; ++a)
        if (shape.coupling_flags(j, a)) p.coupling.col(a) = params.coupling[j].col(a);
    pieces.push_back(std::move(p));
  }
  DriveSchedule s;
  s.n_qubits = n_qubits;
  s.pieces = std::move(pieces);
  s.boundaries = shape.boundaries;
  s.validate();
  return s;
}

EnsembleParameters sample_parameters(const EnsembleShape& shape, int n_qubits, double lo, double hi,
                                     Rng& rng) {
  shape.validate();
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("sampling interval must be finite and nonempty");
  EnsembleParameters params;
  for (int j = 0; j < shape.n_pieces(); ++j) {
    MatrixXd on_site(n_qubits, 3);
    for (int l = 0; l < n_qubits; ++l)
      for (int a = 0; a < 3; ++a) on_site(l, a) = rng.uniform(lo, hi);
    MatrixXd coupling(std::max(0, n_qubits - 1), 9);
    for (int l = 0; l < n_qubits - 1; ++l)
      for (int a = 0; a < 9; ++a) coupling(l, a) = rng.uniform(lo, hi);
    params.on_site.push_back(std::move(on_site));
    params.coupling.push_back(std::move(coupling));
  }
  return params;
}

DriveSchedule sample_model_b(int n_qubits, double lo, double hi, Rng& rng) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("sampling interval must be finite and nonempty");
  VectorXd h_x(n_qubits), h_z(n_qubits), coupling(std::max(0, n_qubits - 1));
  for (int l = 0; l < n_qubits; ++l) h_x(l) = rng.uniform(lo, hi);
  for (int l = 0; l < n_qubits; ++l) h_z(l) = rng.uniform(lo, hi);
  for (int l = 0; l < n_qubits - 1; ++l) coupling(l) = rng.uniform(lo, hi);
  return make_model_b(h_x, h_z, coupling);
}

nlohmann::json schedule_to_json(const DriveSchedule& schedule) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const PieceSpec& p : schedule.pieces) {
    nlohmann::json on_site = nlohmann::json::array();
    for (int l = 0; l < p.on_site.rows(); ++l) {
      nlohmann::json row = nlohmann::json::array();
      for (int a = 0; a < 3; ++a) row.push_back(p.on_site(l, a));
      on_site.push_back(std::move(row));
    }
    nlohmann::json coupling = nlohmann::json::array();
    for (int l = 0; l < p.coupling.rows(); ++l) {
      nlohmann::json row = nlohmann::json::array();
      for (int a = 0; a < 9; ++a) row.push_back(p.coupling(l, a));
      coupling.push_back(std::move(row));
    }
    pieces.push_back({{"on_site", std::move(on_site)}, {"coupling", std::move(coupling)}});
  }
  return {{"n_qubits", schedule.n_qubits},
          {"boundaries", schedule.boundaries},
          {"pieces", std::move(pieces)}};
}

DriveSchedule schedule_from_json(const nlohmann::json& j) {
  DriveSchedule s;
  s.n_qubits = j.at("n_qubits").get<int>();
  s.boundaries = j.at("boundaries").get<std::vector<double>>();
  for (const auto& pj : j.at("pieces")) {
    PieceSpec p;
    const auto& on_site = pj.at("on_site");
    p.on_site.resize(static_cast<long>(on_site.size()), 3);
    for (long l = 0; l < p.on_site.rows(); ++l)
      for (int a = 0; a < 3; ++a) p.on_site(l, a) = on_site.at(l).at(a).get<double>();
    const auto& coupling = pj.at("coupling");
    p.coupling.resize(static_cast<long>(coupling.size()), 9);
    for (long l = 0; l < p.coupling.rows(); ++l)
      for (int a = 0; a < 9; ++a) p.coupling(l, a) = coupling.at(l).at(a).get<double>();
    const size_t idx = s.pieces.size();
    if (idx + 1 >= s.boundaries.size())
      throw std::invalid_argument("more pieces than boundary intervals");
    p.duration = s.boundaries[idx + 1] - s.boundaries[idx];
    s.pieces.push_back(std::move(p));
  }
  s.validate();
  return s;
}

}  // namespace flab
