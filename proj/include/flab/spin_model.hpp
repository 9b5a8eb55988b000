#pragma once

#include <json.hpp>
#include <vector>

#include "flab/linalg.hpp"
#include "flab/rng.hpp"

namespace flab {

// Pauli axis indices used throughout: x = 0, y = 1, z = 2.
enum Axis : int { AxisX = 0, AxisY = 1, AxisZ = 2 };

MatrixXcd pauli_matrix(int axis);

// One piece of a piecewise-constant drive. on_site is N x 3 (site, axis);
// coupling is (N-1) x 9 with column 3*u + v for the sigma^u sigma^v bond term.
// duration is the fraction of the unit period the piece is active.
struct PieceSpec {
  MatrixXd on_site;
  MatrixXd coupling;
  double duration = 0.0;

  static PieceSpec zero(int n_qubits, double duration);
};

// One period of a piecewise time-independent drive; the period is normalized
// to 1, so boundaries run 0 = t_0 < t_1 < ... < t_n = 1.
struct DriveSchedule {
  int n_qubits = 0;
  std::vector<PieceSpec> pieces;
  std::vector<double> boundaries;

  // Builds boundaries from piece durations and validates all invariants.
  static DriveSchedule from_pieces(int n_qubits, std::vector<PieceSpec> pieces);

  void validate() const;
  int n_pieces() const { return static_cast<int>(pieces.size()); }
};

// The tuple (n, T, alpha, gamma): number of pieces, switching times, and the
// 0/1 flags selecting which on-site / nearest-neighbor terms are present.
struct EnsembleShape {
  std::vector<double> boundaries;  // size n+1, 0 = t_0 < ... < t_n = 1
  MatrixXi on_site_flags;          // n x 3
  MatrixXi coupling_flags;         // n x 9

  int n_pieces() const { return static_cast<int>(on_site_flags.rows()); }
  void validate() const;
};

// Coefficient draw for an ensemble shape: one on-site block (N x 3) and one
// coupling block ((N-1) x 9) per piece.
struct EnsembleParameters {
  std::vector<MatrixXd> on_site;
  std::vector<MatrixXd> coupling;
};

// Shape of the two-piece drive: piece 1 carries z fields + zz couplings on
// [0, 1/2), piece 2 carries x fields on [1/2, 1).
EnsembleShape model_b_shape();

// Dense 2^N x 2^N matrix of sum_l sum_u h_l^u sigma_l^u
//                            + sum_l sum_uv J_l^uv sigma_l^u sigma_{l+1}^v.
// Site 1 is the most significant bit of the computational-basis index.
MatrixXcd build_piece_matrix(const PieceSpec& piece, int n_qubits);

DriveSchedule make_model_b(const VectorXd& h_x, const VectorXd& h_z, const VectorXd& coupling_zz);

// Realizes the flags as forced zeros on the sampled coefficients.
DriveSchedule make_ensemble_schedule(const EnsembleShape& shape, const EnsembleParameters& params,
                                     int n_qubits);

// Every coefficient independent uniform on [lo, hi]; fixed traversal order so
// the draw is deterministic given the rng state.
EnsembleParameters sample_parameters(const EnsembleShape& shape, int n_qubits, double lo, double hi,
                                     Rng& rng);

inline constexpr double kDefaultSampleLo = -20.0;
inline constexpr double kDefaultSampleHi = 20.0;

DriveSchedule sample_model_b(int n_qubits, double lo, double hi, Rng& rng);

nlohmann::json schedule_to_json(const DriveSchedule& schedule);
DriveSchedule schedule_from_json(const nlohmann::json& j);

}  // namespace flab
