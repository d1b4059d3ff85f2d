#include "doctest.h"

#include "oracles.hpp"
#include "polq/errors.hpp"
#include "polq/synthesis.hpp"

using namespace polq;

namespace {

constexpr double kDeg = kPi / 180.0;

double opd_full(const Spectrum& s) { return 20 * coherence_length(s); }

/// The chain written out by hand from the element matrices and the decoherence rule.
Mat2 chain_oracle(const SynthesisAngles& a, const Spectrum& s, double opd) {
  Mat2 rho = rho_h().matrix();
  const Mat2 h1 = hwp(a.theta1).matrix();
  rho = h1 * rho * h1.adjoint();
  const Complex gamma = decoherence_factor(s, opd);
  rho(0, 1) *= gamma;
  rho(1, 0) *= std::conj(gamma);
  const Mat2 h2 = hwp(a.theta2).matrix();
  const Mat2 q = qwp(a.theta3).matrix();
  rho = q * h2 * rho * h2.adjoint() * q.adjoint();
  return rho;
}

} // namespace

TEST_CASE("synth_angles examples") {
  const auto h = synth_angles(rho_h());
  CHECK(h.theta1 == doctest::Approx(0.0));
  CHECK(h.theta2 == doctest::Approx(0.0));
  CHECK(h.theta3 == doctest::Approx(0.0));
  const auto mixed = synth_angles(rho_mixed());
  CHECK(mixed.theta1 == doctest::Approx(22.5 * kDeg));
  CHECK(mixed.theta2 == 0.0);
  CHECK(mixed.theta3 == 0.0);
  const auto d = synth_angles(rho_d());
  CHECK(d.theta1 == doctest::Approx(0.0));
  CHECK(d.theta2 == doctest::Approx(22.5 * kDeg));
  CHECK(d.theta3 == doctest::Approx(45.0 * kDeg));
  const Spectrum s;
  CHECK(fidelity(forward_pipeline(d, s, opd_full(s)), rho_d()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("circular targets resolve to the limit of nearby states") {
  const Spectrum s;
  for (double rr : {1.0, -1.0, 0.4, -0.7}) {
    const auto target = rho_from_poincare({0, 0, rr});
    const auto a = synth_angles(target);
    CHECK(a.theta3 == 0.0);
    CHECK(std::abs(a.theta2) == doctest::Approx(kPi / 8));
    CHECK(fidelity(forward_pipeline(a, s, opd_full(s)), target) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("forward_pipeline examples") {
  const Spectrum s;
  CHECK(fidelity(forward_pipeline({0, 0, 0}, s, 0), rho_h()) == doctest::Approx(1.0));
  CHECK(fidelity(forward_pipeline({0, 0, 0}, s, opd_full(s)), rho_h()) == doctest::Approx(1.0));
  for (double t2 : {0.0, 0.4, 1.3}) {
    const auto out = forward_pipeline({22.5 * kDeg, t2, -t2}, s, opd_full(s));
    CHECK(poincare_from_rho(out).norm() < 1e-6);
  }
}

TEST_CASE("forward_pipeline agrees with the hand-built chain") {
  const Spectrum s;
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const SynthesisAngles a{angle(g), angle(g), angle(g)};
    const double opd = 3 * coherence_length(s) * u(g);
    const Mat2 expected = chain_oracle(a, s, opd);
    REQUIRE((forward_pipeline(a, s, opd).matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("synthesis round trip over the Poincare ball") {
  const Spectrum s;
  std::mt19937_64 g(32);
  for (int i = 0; i < 1000; ++i) {
    const auto target = rho_from_poincare(PoincareVector::from_vector(oracle::ball_point(g)));
    const auto a = synth_angles(target);
    REQUIRE(a.theta1 >= 0.0);
    REQUIRE(a.theta1 <= kPi / 8 + 1e-15);
    const double f = oracle::fidelity(forward_pipeline(a, s, opd_full(s)).matrix(), target.matrix());
    REQUIRE(f >= 1 - 1e-10);
  }
}

TEST_CASE("round trip holds on the surface too") {
  const Spectrum s;
  std::mt19937_64 g(33);
  for (int i = 0; i < 1000; ++i) {
    const auto target = rho_from_poincare(PoincareVector::from_vector(oracle::sphere_point(g)));
    REQUIRE(fidelity(forward_pipeline(synth_angles(target), s, opd_full(s)), target) >= 1 - 1e-10);
  }
}

TEST_CASE("full decoherence leaves |r| = |cos 4 theta1|") {
  const Spectrum s;
  std::mt19937_64 g(34);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const SynthesisAngles a{angle(g), angle(g), angle(g)};
    const double r = poincare_from_rho(forward_pipeline(a, s, opd_full(s))).norm();
    REQUIRE(std::abs(r - std::abs(std::cos(4 * a.theta1))) < 1e-12);
  }
}

TEST_CASE("the unpolarized part is unchanged by the final waveplates") {
  const Spectrum s;
  std::mt19937_64 g(35);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const double theta1 = angle(g);
    const double opd = 2 * coherence_length(s) * u(g);
    const double after_decoherer = poincare_from_rho(forward_pipeline({theta1, 0, 0}, s, opd)).norm();
    const double after_all = poincare_from_rho(forward_pipeline({theta1, angle(g), angle(g)}, s, opd)).norm();
    REQUIRE(std::abs(after_all - after_decoherer) < 1e-12);
  }
}

TEST_CASE("intermediate decomposition") {
  auto [p0, m0] = intermediate_decomposition(0);
  CHECK(p0 == doctest::Approx(1.0));
  CHECK(m0 == doctest::Approx(0.0));
  auto [p1, m1] = intermediate_decomposition(22.5 * kDeg);
  CHECK(p1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m1 == doctest::Approx(1.0));
  auto [p2, m2] = intermediate_decomposition(15 * kDeg);
  CHECK(p2 == doctest::Approx(0.5));
  CHECK(m2 == doctest::Approx(0.5));
  CHECK_THROWS_AS(intermediate_decomposition(0.5), DomainError);
  const Spectrum s;
  for (int k = 0; k <= 100; ++k) {
    const double theta1 = kPi / 8 * k / 100.0;
    auto [p, m] = intermediate_decomposition(theta1);
    REQUIRE(p + m == doctest::Approx(1.0).epsilon(1e-14));
    // The decohered state is p |H><H| + m I/2.
    const Mat2 expected = p * rho_h().matrix() + m * rho_mixed().matrix();
    REQUIRE((forward_pipeline({theta1, 0, 0}, s, opd_full(s)).matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("retardance error reachability rule") {
  CHECK(RetardanceErrors{0.02, 0.01}.guarantees_reachability());
  CHECK_FALSE(RetardanceErrors{0.01, 0.02}.guarantees_reachability());
}

TEST_CASE("imperfect synthesis with zero errors matches the analytic angles") {
  const Spectrum s;
  const auto result = synth_angles_imperfect(rho_d(), {0, 0}, s, opd_full(s));
  CHECK(result.infidelity < 1e-8);
  CHECK(fidelity(forward_pipeline(result.angles, s, opd_full(s)), rho_d()) >= 1 - 1e-8);
}

TEST_CASE("imperfect synthesis reaches R with slightly wrong waveplates") {
  const Spectrum s;
  const RetardanceErrors errors{0.02, 0.01};
  const auto target = rho_from_abdelta({0.5, 0.5, kPi / 2});
  const auto result = synth_angles_imperfect(target, errors, s, opd_full(s));
  const double infidelity = 1 - oracle::fidelity(
                                    forward_pipeline_imperfect(result.angles, errors, s, opd_full(s)).matrix(),
                                    target.matrix());
  CHECK(infidelity < 1e-8);
  // The ideal angles are measurably off with these waveplates.
  const double naive = 1 - fidelity(forward_pipeline_imperfect(synth_angles(target), errors, s, opd_full(s)), target);
  CHECK(naive > 1e-6);
}

TEST_CASE("imperfect synthesis over random pure targets") {
  const Spectrum s;
  const RetardanceErrors errors{0.02, 0.01};
  std::mt19937_64 g(36);
  for (int i = 0; i < 200; ++i) {
    const auto target = rho_from_poincare(PoincareVector::from_vector(oracle::sphere_point(g)));
    const auto result = synth_angles_imperfect(target, errors, s, opd_full(s));
    const double infidelity = 1 - oracle::fidelity(
                                      forward_pipeline_imperfect(result.angles, errors, s, opd_full(s)).matrix(),
                                      target.matrix());
    REQUIRE(infidelity < 1e-8);
  }
}

TEST_CASE("imperfect synthesis reports failure above the threshold") {
  const Spectrum s;
  CHECK_THROWS_AS(synth_angles_imperfect(rho_r(), {0.02, 0.01}, s, opd_full(s), -1.0), ConvergenceFailure);
}
