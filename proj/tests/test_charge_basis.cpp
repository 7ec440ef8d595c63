#include <doctest.h>

#include <cmath>

#include "cos2q/charge_basis.hpp"
#include "cos2q/error.hpp"

using namespace cos2q;

namespace {

ModeSpec mode(int n_cut) { return ModeSpec{n_cut, 1.0, 0.0}; }

TwoModeSpace space(int nt, int np) { return {mode(nt), mode(np)}; }

cplx entry(const OperatorMatrix& op, int i, int j) { return op.dense()(i, j); }

}  // namespace

TEST_SUITE("charge_basis") {

TEST_CASE("number operator is diag(n) in index order n + n_cut") {
  const OperatorMatrix n = number_operator(mode(3));
  REQUIRE(n.dimension() == 7);
  CHECK(n.hermitian());
  for (int k = 0; k < 7; ++k) CHECK(entry(n, k, k).real() == doctest::Approx(k - 3));
}

TEST_CASE("cos and sin harmonics have the textbook charge matrix elements") {
  const ModeSpec m = mode(4);
  const Eigen::MatrixXcd c = harmonic_operator(m, 1, Harmonic::cos).dense();
  const Eigen::MatrixXcd s = harmonic_operator(m, 1, Harmonic::sin).dense();
  const Eigen::MatrixXcd c2 = harmonic_operator(m, 2, Harmonic::cos).dense();
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      // <n+1| cos |n> = 1/2, <n+1| sin |n> = 1/(2i)
      const cplx want_c = std::abs(i - j) == 1 ? cplx(0.5) : cplx(0.0);
      const cplx want_s = i - j == 1 ? cplx(0.0, -0.5) : (j - i == 1 ? cplx(0.0, 0.5) : cplx(0.0));
      const cplx want_c2 = std::abs(i - j) == 2 ? cplx(0.5) : cplx(0.0);
      CHECK(std::abs(c(i, j) - want_c) == 0.0);
      CHECK(std::abs(s(i, j) - want_s) == 0.0);
      CHECK(std::abs(c2(i, j) - want_c2) == 0.0);
    }
  }
}

TEST_CASE("shift operator raises charge and annihilates the top state") {
  const ModeSpec m = mode(2);
  const OperatorMatrix up = shift_operator(m, 1);
  Vector top = Vector::Zero(5);
  top(4) = 1.0;
  CHECK(up.apply(top).norm() == 0.0);
  Vector bottom = Vector::Zero(5);
  bottom(0) = 1.0;
  const Vector raised = up.apply(bottom);
  CHECK(std::abs(raised(1) - cplx(1.0)) == 0.0);
  CHECK(raised.norm() == doctest::Approx(1.0));
}

TEST_CASE("harmonics are built from shifts without wraparound") {
  const ModeSpec m = mode(5);
  for (int k = 1; k <= 3; ++k) {
    const OperatorMatrix e = shift_operator(m, k);
    const Eigen::MatrixXcd ed = e.dense();
    const Eigen::MatrixXcd want_c = 0.5 * (ed + ed.adjoint());
    const Eigen::MatrixXcd want_s = (ed - ed.adjoint()) / cplx(0.0, 2.0);
    CHECK((harmonic_operator(m, k, Harmonic::cos).dense() - want_c).cwiseAbs().maxCoeff() == 0.0);
    CHECK((harmonic_operator(m, k, Harmonic::sin).dense() - want_s).cwiseAbs().maxCoeff() < 1e-16);
    CHECK(ed(0, ed.cols() - 1) == cplx(0.0));
  }
}

TEST_CASE("two-mode index puts theta first") {
  const TwoModeSpace s = space(2, 3);
  CHECK(s.dimension() == 35);
  CHECK(s.index(-2, -3) == 0);
  CHECK(s.index(-2, -2) == 1);
  CHECK(s.index(-1, -3) == 7);
  CHECK(s.index(2, 3) == 34);
  // n_theta (x) 1 is diagonal with the theta charge of each index
  const OperatorMatrix nt = two_mode_embed(number_operator(s.theta), OperatorMatrix::identity(7));
  const OperatorMatrix np = two_mode_embed(OperatorMatrix::identity(5), number_operator(s.phi));
  CHECK(entry(nt, s.index(1, -3), s.index(1, -3)).real() == doctest::Approx(1.0));
  CHECK(entry(np, s.index(1, -3), s.index(1, -3)).real() == doctest::Approx(-3.0));
}

TEST_CASE("embedding is a Kronecker product") {
  const TwoModeSpace s = space(3, 2);
  const OperatorMatrix a = harmonic_operator(s.theta, 1, Harmonic::sin);
  const OperatorMatrix b = number_operator(s.phi);
  const OperatorMatrix ia = two_mode_embed(a, OperatorMatrix::identity(s.phi.dimension()));
  const OperatorMatrix ib = two_mode_embed(OperatorMatrix::identity(s.theta.dimension()), b);
  CHECK(max_abs_difference(ia * ib, two_mode_embed(a, b)) < 1e-15);
  CHECK(max_abs_difference(ib * ia, two_mode_embed(a, b)) < 1e-15);
}

TEST_CASE("joint harmonic obeys the angle-difference identity exactly") {
  const TwoModeSpace s = space(4, 4);
  const OperatorMatrix it = OperatorMatrix::identity(9);
  auto ct = two_mode_embed(harmonic_operator(s.theta, 1, Harmonic::cos), it);
  auto st = two_mode_embed(harmonic_operator(s.theta, 1, Harmonic::sin), it);
  auto cp = two_mode_embed(it, harmonic_operator(s.phi, 1, Harmonic::cos));
  auto sp = two_mode_embed(it, harmonic_operator(s.phi, 1, Harmonic::sin));
  CHECK(max_abs_difference(joint_harmonic(s, 1, 1, Harmonic::cos), ct * cp + st * sp) < 1e-15);
  CHECK(max_abs_difference(joint_harmonic(s, 1, 1, Harmonic::sin), st * cp - ct * sp) < 1e-15);
  CHECK(max_asymmetry(joint_harmonic(s, 2, 2, Harmonic::cos)) == 0.0);
}

TEST_CASE("parity is an involution, commutes with cos and flips n and sin") {
  const TwoModeSpace s = space(3, 4);
  const OperatorMatrix p = parity_operator(s);
  const OperatorMatrix id = OperatorMatrix::identity(s.dimension());
  CHECK(max_abs_difference(p * p, id) == 0.0);
  const OperatorMatrix c = joint_harmonic(s, 1, -1, Harmonic::cos);
  CHECK(commutator(p, c).entries().norm() == 0.0);
  const OperatorMatrix sn = joint_harmonic(s, 1, 1, Harmonic::sin);
  CHECK(max_abs_difference(p * sn * p, -1.0 * sn) == 0.0);
  const OperatorMatrix n = two_mode_embed(number_operator(s.theta), OperatorMatrix::identity(9));
  CHECK(max_abs_difference(p * n * p, -1.0 * n) == 0.0);
}

TEST_CASE("parity requires zero offset charge") {
  ModeSpec m = mode(2);
  m.n_offset = 0.25;
  CHECK_THROWS_AS(parity_operator(m), InvalidArgument);
}

TEST_CASE("bad cutoffs and harmonics are rejected") {
  CHECK_THROWS_AS(number_operator(mode(0)), InvalidArgument);
  CHECK_THROWS_AS(harmonic_operator(mode(2), 5, Harmonic::cos), InvalidArgument);
  CHECK_THROWS_AS(harmonic_operator(mode(2), 0, Harmonic::cos), InvalidArgument);
}

TEST_CASE("offset charge shifts the number operator") {
  const ModeSpec m{6, 0.7, 0.2};
  const Eigen::MatrixXcd n = number_operator(m).dense();
  for (int k = 0; k < 13; ++k) CHECK(n(k, k).real() == doctest::Approx(k - 6 - 0.2));
  CHECK((n - Eigen::MatrixXcd(n.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
