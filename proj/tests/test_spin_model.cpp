#include <doctest.h>

#include "flab/floquet.hpp"
#include "flab/spin_model.hpp"
#include "oracles.hpp"

using namespace flab;

namespace {

PieceSpec random_piece(int n, Rng& rng, double scale = 1.0, double duration = 1.0) {
  PieceSpec p = PieceSpec::zero(n, duration);
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < 3; ++a) p.on_site(l, a) = rng.uniform(-scale, scale);
  for (int l = 0; l < n - 1; ++l)
    for (int a = 0; a < 9; ++a) p.coupling(l, a) = rng.uniform(-scale, scale);
  return p;
}

}  // namespace

TEST_SUITE("spin_model") {

TEST_CASE("zero coefficients give the zero matrix") {
  MatrixXcd h = build_piece_matrix(PieceSpec::zero(2, 1.0), 2);
  CHECK(h.rows() == 4);
  CHECK(max_abs(h) == 0.0);
}

TEST_CASE("single-qubit z field is diag(1, -1)") {
  PieceSpec p = PieceSpec::zero(1, 1.0);
  p.on_site(0, AxisZ) = 1.0;
  MatrixXcd h = build_piece_matrix(p, 1);
  CHECK(std::abs(h(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(h(1, 1) + 1.0) < 1e-15);
  CHECK(std::abs(h(0, 1)) == 0.0);
}

TEST_CASE("random 3-qubit piece matches the Kronecker-product oracle") {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    PieceSpec p = random_piece(3, rng);
    CHECK(max_abs(build_piece_matrix(p, 3) - oracles::piece_matrix(p, 3)) < 1e-12);
  }
}

TEST_CASE("piece matrices are Hermitian") {
  Rng rng(12);
  for (int n : {1, 2, 4}) {
    PieceSpec p = random_piece(n, rng, 20.0);
    CHECK(is_hermitian(build_piece_matrix(p, n), 1e-12));
  }
}

TEST_CASE("assembly is linear in the coefficients") {
  Rng rng(13);
  PieceSpec p1 = random_piece(3, rng), p2 = random_piece(3, rng);
  const double a = 1.7, b = -0.3;
  PieceSpec mix = PieceSpec::zero(3, 1.0);
  mix.on_site = a * p1.on_site + b * p2.on_site;
  mix.coupling = a * p1.coupling + b * p2.coupling;
  MatrixXcd lhs = build_piece_matrix(mix, 3);
  MatrixXcd rhs = a * build_piece_matrix(p1, 3) + b * build_piece_matrix(p2, 3);
  CHECK(max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("a bond term commutes with Paulis on far sites") {
  PieceSpec p = PieceSpec::zero(4, 1.0);
  p.coupling(1, 3 * AxisX + AxisY) = 0.8;  // acts on sites 2 and 3
  MatrixXcd h = build_piece_matrix(p, 4);
  for (int far : {1, 4}) {
    for (int axis = 0; axis < 3; ++axis) {
      PieceSpec q = PieceSpec::zero(4, 1.0);
      q.on_site(far - 1, axis) = 1.0;
      MatrixXcd sigma = build_piece_matrix(q, 4);
      CHECK(max_abs(h * sigma - sigma * h) < 1e-12);
    }
  }
}

TEST_CASE("model b with a pi pulse gives -i sigma^x") {
  VectorXd h_x(1), h_z(1), j(0);
  h_x << M_PI;
  h_z << 0.0;
  MatrixXcd uf = floquet_operator(make_model_b(h_x, h_z, j));
  MatrixXcd expected = complexd(0, -1) * pauli_matrix(AxisX);
  CHECK(max_abs(uf - expected) < 1e-12);
}

TEST_CASE("model b with zero coefficients has zero pieces") {
  DriveSchedule s = make_model_b(VectorXd::Zero(2), VectorXd::Zero(2), VectorXd::Zero(1));
  CHECK(s.n_pieces() == 2);
  for (const auto& p : s.pieces) CHECK(max_abs(build_piece_matrix(p, 2)) == 0.0);
}

TEST_CASE("model b piece-1 spectrum is the diagonal field sum") {
  VectorXd h_x = VectorXd::Zero(2), h_z(2), j(1);
  h_z << 0.3, 0.7;
  j << 0.0;
  DriveSchedule s = make_model_b(h_x, h_z, j);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(build_piece_matrix(s.pieces[0], 2));
  VectorXd expected(4);
  expected << -1.0, -0.4, 0.4, 1.0;
  CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ensemble schedule with model-b flags reproduces make_model_b") {
  Rng rng(21);
  const int n = 3;
  EnsembleShape shape = model_b_shape();
  EnsembleParameters params = sample_parameters(shape, n, -5.0, 5.0, rng);
  DriveSchedule ens = make_ensemble_schedule(shape, params, n);

  VectorXd h_x(n), h_z(n), j(n - 1);
  for (int l = 0; l < n; ++l) h_z(l) = params.on_site[0](l, AxisZ);
  for (int l = 0; l < n - 1; ++l) j(l) = params.coupling[0](l, 3 * AxisZ + AxisZ);
  for (int l = 0; l < n; ++l) h_x(l) = params.on_site[1](l, AxisX);
  DriveSchedule direct = make_model_b(h_x, h_z, j);

  REQUIRE(ens.n_pieces() == direct.n_pieces());
  for (int p = 0; p < ens.n_pieces(); ++p)
    CHECK(max_abs(build_piece_matrix(ens.pieces[p], n) -
                  build_piece_matrix(direct.pieces[p], n)) == 0.0);
}

TEST_CASE("all-zero flags zero out every sampled coefficient") {
  Rng rng(22);
  EnsembleShape shape = model_b_shape();
  shape.on_site_flags.setZero();
  shape.coupling_flags.setZero();
  EnsembleParameters params = sample_parameters(shape, 2, -5.0, 5.0, rng);
  DriveSchedule s = make_ensemble_schedule(shape, params, 2);
  for (const auto& p : s.pieces) CHECK(max_abs(build_piece_matrix(p, 2)) == 0.0);
}

TEST_CASE("single-piece ensemble with x, z and zz flags set") {
  Rng rng(23);
  EnsembleShape shape;
  shape.boundaries = {0.0, 1.0};
  shape.on_site_flags = MatrixXi::Zero(1, 3);
  shape.coupling_flags = MatrixXi::Zero(1, 9);
  shape.on_site_flags(0, AxisX) = 1;
  shape.on_site_flags(0, AxisZ) = 1;
  shape.coupling_flags(0, 3 * AxisZ + AxisZ) = 1;
  EnsembleParameters params = sample_parameters(shape, 3, -2.0, 2.0, rng);
  DriveSchedule s = make_ensemble_schedule(shape, params, 3);
  REQUIRE(s.n_pieces() == 1);
  const PieceSpec& p = s.pieces[0];
  CHECK(p.on_site.col(AxisY).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.on_site.col(AxisX).cwiseAbs().maxCoeff() > 0.0);
  CHECK(p.on_site.col(AxisZ).cwiseAbs().maxCoeff() > 0.0);
  for (int a = 0; a < 9; ++a)
    if (a != 3 * AxisZ + AxisZ) CHECK(p.coupling.col(a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.coupling.col(3 * AxisZ + AxisZ).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sampling: degenerate interval, bounds, determinism") {
  EnsembleShape shape = model_b_shape();
  Rng rng_a(7), rng_b(7);
  EnsembleParameters zero = sample_parameters(shape, 2, 0.0, 0.0, rng_a);
  for (const auto& m : zero.on_site) CHECK(m.cwiseAbs().maxCoeff() == 0.0);

  Rng rng_c(8);
  EnsembleParameters box = sample_parameters(shape, 4, -20.0, 20.0, rng_c);
  for (const auto& m : box.on_site) {
    CHECK(m.maxCoeff() <= 20.0);
    CHECK(m.minCoeff() >= -20.0);
  }

  Rng r1(99), r2(99);
  EnsembleParameters a = sample_parameters(shape, 3, -1.0, 1.0, r1);
  EnsembleParameters b = sample_parameters(shape, 3, -1.0, 1.0, r2);
  for (size_t i = 0; i < a.on_site.size(); ++i) {
    CHECK(a.on_site[i] == b.on_site[i]);
    CHECK(a.coupling[i] == b.coupling[i]);
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(check_qubit_count(dimension_cap() + 1), std::invalid_argument);
  CHECK_THROWS_AS(build_piece_matrix(PieceSpec::zero(3, 1.0), 2), std::invalid_argument);

  EnsembleShape bad = model_b_shape();
  bad.boundaries = {0.0, 0.7, 0.5};  // non-monotone T
  Rng rng(1);
  CHECK_THROWS_AS(sample_parameters(bad, 2, -1.0, 1.0, rng), std::invalid_argument);

  VectorXd h2 = VectorXd::Zero(2);
  CHECK_THROWS_AS(make_model_b(h2, VectorXd::Zero(3), VectorXd::Zero(1)), std::invalid_argument);

  Rng rng2(2);
  CHECK_THROWS_AS(sample_model_b(2, 1.0, -1.0, rng2), std::invalid_argument);

  DriveSchedule s = make_model_b(VectorXd::Zero(2), VectorXd::Zero(2), VectorXd::Zero(1));
  s.pieces[0].duration = 0.4;  // now inconsistent with boundaries
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("schedule json round trip is bit-exact") {
  Rng rng(31);
  DriveSchedule s = sample_model_b(3, -20.0, 20.0, rng);
  nlohmann::json j = schedule_to_json(s);
  DriveSchedule back = schedule_from_json(j);
  CHECK(back.n_qubits == s.n_qubits);
  CHECK(back.boundaries == s.boundaries);
  for (int p = 0; p < s.n_pieces(); ++p) {
    CHECK(back.pieces[p].on_site == s.pieces[p].on_site);
    CHECK(back.pieces[p].coupling == s.pieces[p].coupling);
  }
  // text -> schedule -> text fixed point
  const std::string text = j.dump();
  CHECK(schedule_to_json(schedule_from_json(nlohmann::json::parse(text))).dump() == text);
}

}  // TEST_SUITE
