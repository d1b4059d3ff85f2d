#include "doctest.h"

#include "oracles.hpp"
#include "polq/core.hpp"
#include "polq/errors.hpp"
#include "polq/optics.hpp"

using namespace polq;

namespace {

bool close(const Mat2& a, const Mat2& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

Mat2 mat(Complex a, Complex b, Complex c, Complex d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

} // namespace

TEST_CASE("rho_from_poincare examples") {
  CHECK(close(rho_from_poincare({0, 0, 0}).matrix(), 0.5 * Mat2::Identity(), 1e-15));
  CHECK(close(rho_from_poincare({1, 0, 0}).matrix(), mat(1, 0, 0, 0), 1e-15));
  // A = 1/2, B = 1/2, delta = 0 in the (A, B, delta) form.
  CHECK(close(rho_from_poincare({0, 1, 0}).matrix(), mat(0.5, 0.5, 0.5, 0.5), 1e-15));
}

TEST_CASE("rho_from_poincare rejects states outside the ball") {
  CHECK_THROWS_AS(rho_from_poincare({1.1, 0, 0}), DomainError);
  CHECK_THROWS_AS(rho_from_poincare({0.6, 0.6, 0.6}), DomainError);
  CHECK_NOTHROW(rho_from_poincare({1.0 + 1e-10, 0, 0}));
}

TEST_CASE("poincare_from_rho examples") {
  const auto r0 = poincare_from_rho(rho_mixed());
  CHECK(r0.norm() == doctest::Approx(0.0).epsilon(1e-15));
  const auto rh = poincare_from_rho(rho_h());
  CHECK(rh.rH == doctest::Approx(1.0));
  const DensityMatrix m(mat(0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5));
  const auto r = poincare_from_rho(m);
  CHECK(r.rH == doctest::Approx(0.0));
  CHECK(r.rD == doctest::Approx(0.0));
  CHECK(r.rR == doctest::Approx(-1.0));
}

TEST_CASE("rho_from_abdelta examples") {
  CHECK(close(rho_from_abdelta({1, 0, 0}).matrix(), rho_h().matrix(), 1e-15));
  CHECK(close(rho_from_abdelta({0, 0, 0}).matrix(), rho_v().matrix(), 1e-15));
  CHECK(close(rho_from_abdelta({0.5, 0.5, kPi / 2}).matrix(), mat(0.5, Complex(0, 0.5), Complex(0, -0.5), 0.5),
              1e-15));
  CHECK_THROWS_AS(rho_from_abdelta({0.5, 0.6, 0}), DomainError);
  CHECK_THROWS_AS(rho_from_abdelta({1.2, 0, 0}), DomainError);
}

TEST_CASE("abdelta_from_rho inverts rho_from_abdelta") {
  const StateParams p{0.3, 0.2, -2.0};
  const StateParams q = abdelta_from_rho(rho_from_abdelta(p));
  CHECK(q.A == doctest::Approx(p.A));
  CHECK(q.B == doctest::Approx(p.B));
  CHECK(q.delta == doctest::Approx(p.delta));
  CHECK(abdelta_from_rho(rho_from_abdelta({0.5, 0.5, kPi})).delta == doctest::Approx(-kPi));
}

TEST_CASE("DensityMatrix validation") {
  CHECK_THROWS_AS(DensityMatrix(mat(0.5, 0.1, 0.2, 0.5)), DomainError);
  CHECK_THROWS_AS(DensityMatrix(mat(0.6, 0, 0, 0.5)), DomainError);
  CHECK_THROWS_AS(DensityMatrix(mat(1.5, 0, 0, -0.5)), DomainError);
  CHECK_NOTHROW(DensityMatrix(mat(0.5, 0.5, 0.5, 0.5)));
  CHECK_THROWS_AS(DensityMatrix::from_unnormalized(Mat2::Zero()), DegenerateInput);
  const auto scaled = DensityMatrix::from_unnormalized(3.0 * rho_d().matrix());
  CHECK(close(scaled.matrix(), rho_d().matrix(), 1e-15));
}

TEST_CASE("fidelity examples") {
  CHECK(fidelity(rho_h(), rho_h()) == doctest::Approx(1.0));
  CHECK(fidelity(rho_h(), rho_v()) == doctest::Approx(0.0));
  // Commuting diagonal matrices: (sum_i sqrt(p_i q_i))^2 = (sqrt(1 * 0.5))^2.
  CHECK(fidelity(rho_h(), rho_mixed()) == doctest::Approx(0.5));
}

TEST_CASE("fidelity agrees with the eigendecomposition oracle") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d a = oracle::ball_point(g);
    const Eigen::Vector3d b = oracle::ball_point(g);
    const auto ra = rho_from_poincare(PoincareVector::from_vector(a));
    const auto rb = rho_from_poincare(PoincareVector::from_vector(b));
    const double expected = oracle::fidelity(ra.matrix(), rb.matrix());
    REQUIRE(fidelity(ra, rb) == doctest::Approx(expected).epsilon(1e-10));
    REQUIRE(fidelity(ra, rb) == doctest::Approx(fidelity(rb, ra)).epsilon(1e-14));
  }
}

TEST_CASE("fidelity of pure states is the squared overlap") {
  std::mt19937_64 g(12);
  for (int i = 0; i < 500; ++i) {
    const Vec2 psi = oracle::random_unitary(g).col(0);
    const Vec2 phi = oracle::random_unitary(g).col(0);
    const double overlap = std::norm(psi.dot(phi));
    REQUIRE(fidelity(DensityMatrix::pure(psi), DensityMatrix::pure(phi)) == doctest::Approx(overlap).epsilon(1e-10));
  }
}

TEST_CASE("fidelity is one only for identical states") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 500; ++i) {
    const auto rho = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    REQUIRE(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
    const auto other = rho_from_poincare(PoincareVector::from_vector(0.9 * oracle::ball_point(g)));
    REQUIRE(fidelity(rho, other) < 1.0 - 1e-12);
  }
}

TEST_CASE("fidelity is invariant under joint unitary conjugation") {
  std::mt19937_64 g(14);
  std::uniform_real_distribution<double> angle(0, kPi);
  for (int i = 0; i < 500; ++i) {
    const auto a = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    const auto b = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    const JonesOperator u = hwp(angle(g)).then(qwp(angle(g)));
    REQUIRE(fidelity(apply_unitary(u, a), apply_unitary(u, b)) == doctest::Approx(fidelity(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("purity examples") {
  CHECK(purity(rho_h()) == doctest::Approx(1.0));
  CHECK(purity(rho_mixed()) == doctest::Approx(0.5));
  const auto rho = rho_from_poincare({0.3, 0.0, 0.4});
  const Mat2 sq = rho.matrix() * rho.matrix();
  CHECK(purity(rho) == doctest::Approx(sq.trace().real()));
  CHECK(purity(rho) == doctest::Approx(0.625));
}

TEST_CASE("purity equals (1 + |r|^2) / 2") {
  std::mt19937_64 g(15);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d r = oracle::ball_point(g);
    const auto rho = rho_from_poincare(PoincareVector::from_vector(r));
    REQUIRE(std::abs(purity(rho) - 0.5 * (1 + r.squaredNorm())) < 1e-12);
  }
}

TEST_CASE("Poincare round trip over the ball") {
  std::mt19937_64 g(16);
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Vector3d r = oracle::ball_point(g);
    const auto back = poincare_from_rho(rho_from_poincare(PoincareVector::from_vector(r))).as_vector();
    REQUIRE((back - r).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((oracle::poincare(rho_from_poincare(PoincareVector::from_vector(r)).matrix()) - r).norm() < 1e-14);
  }
}

TEST_CASE("(A, B, delta) form agrees with the footnote conversions") {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(g);
    const double b = u(g) * std::sqrt(a * (1 - a));
    const double delta = -kPi + 2 * kPi * u(g);
    const auto lhs = rho_from_abdelta({a, b, delta});
    const auto rhs = rho_from_poincare({2 * a - 1, 2 * b * std::cos(delta), 2 * b * std::sin(delta)});
    REQUIRE(close(lhs.matrix(), rhs.matrix(), 1e-12));
  }
}

TEST_CASE("eigenvalues of constructed states stay in [0, 1]") {
  std::mt19937_64 g(18);
  for (int i = 0; i < 2000; ++i) {
    const auto rho = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    const auto ev = rho.eigenvalues();
    REQUIRE(ev(0) >= -1e-12);
    REQUIRE(ev(1) <= 1 + 1e-12);
  }
}

TEST_CASE("fiducial kets sit at the cardinal points") {
  CHECK(poincare_from_rho(DensityMatrix::pure(ket_r())).rR == doctest::Approx(1.0));
  CHECK(poincare_from_rho(DensityMatrix::pure(ket_l())).rR == doctest::Approx(-1.0));
  CHECK(poincare_from_rho(DensityMatrix::pure(ket_a())).rD == doctest::Approx(-1.0));
  CHECK(poincare_from_rho(DensityMatrix::pure(ket_v())).rH == doctest::Approx(-1.0));
}

TEST_CASE("trace distance matches the oracle") {
  std::mt19937_64 g(19);
  for (int i = 0; i < 500; ++i) {
    const auto a = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    const auto b = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    REQUIRE(trace_distance(a, b) == doctest::Approx(oracle::trace_distance(a.matrix(), b.matrix())).epsilon(1e-12));
  }
}
