#include "doctest.h"

#include "oracles.hpp"
#include "polq/distinguish.hpp"
#include "polq/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>

using namespace polq;

namespace {

UncertaintyEllipsoid sphere_patch(double radius, double a) {
  UncertaintyEllipsoid e;
  e.mean_r = {radius, 0, 0};
  e.radial_semiaxis = a;
  e.transverse_semiaxes = {a, a};
  e.axes = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
  return e;
}

/// Points of a face-centred cubic lattice with nearest-neighbour distance 2a inside the unit
/// ball: equal spheres of radius a in the densest packing.
long fcc_count(double a) {
  const double cube = 2.0 * a * std::sqrt(2.0);
  const int n = static_cast<int>(std::ceil(1.0 / cube)) + 1;
  const std::array<Eigen::Vector3d, 4> basis{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0.5, 0.5, 0),
                                             Eigen::Vector3d(0.5, 0, 0.5), Eigen::Vector3d(0, 0.5, 0.5)};
  long count = 0;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      for (int k = -n; k <= n; ++k) {
        for (const auto& b : basis) {
          const Eigen::Vector3d p = cube * (Eigen::Vector3d(i, j, k) + b);
          count += p.squaredNorm() <= 1.0 ? 1 : 0;
        }
      }
    }
  }
  return count;
}

EllipsoidOptions no_drift() {
  EllipsoidOptions o;
  o.drift = DriftModel::none();
  return o;
}

} // namespace

TEST_CASE("noiseless ellipsoids collapse") {
  EllipsoidOptions o;
  o.exact_expectation = true;
  for (double r : {0.0, 0.5, 1.0}) {
    const auto e = ellipsoid_at(rho_from_poincare({r, 0, 0}), 10, 300000, 1, o);
    CHECK(e.radial_semiaxis < 1e-8);
    CHECK(e.transverse_semiaxes[0] < 1e-8);
    CHECK(e.transverse_semiaxes[1] < 1e-8);
  }
}

TEST_CASE("radial direction defaults to rH at the center") {
  EllipsoidOptions o;
  o.exact_expectation = true;
  const auto e = ellipsoid_at(rho_mixed(), 5, 300000, 1, o);
  CHECK(e.mean_r.norm() < 1e-6);
  CHECK((e.axes[0] - Eigen::Vector3d::UnitX()).norm() < 1e-12);
}

TEST_CASE("ellipsoid axes are orthonormal with the radial axis first") {
  for (const Eigen::Vector3d& r : {Eigen::Vector3d(0.3, 0.2, -0.6), Eigen::Vector3d(0, 0, 0.9),
                                   Eigen::Vector3d(0.7, 0.1, 0.1)}) {
    const auto e = ellipsoid_at(rho_from_poincare(PoincareVector::from_vector(r)), 10, 300000, 4);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        REQUIRE(std::abs(e.axes[a].dot(e.axes[b]) - (a == b ? 1.0 : 0.0)) < 1e-10);
      }
    }
    CHECK(e.axes[0].dot(e.mean_r.as_vector().normalized()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.radial_semiaxis > 0);
    CHECK(e.trials_used == 10);
    CHECK(e.radial_sigma() == doctest::Approx(e.radial_semiaxis / 1.69));
  }
}

TEST_CASE("ellipsoid argument validation") {
  CHECK_THROWS_AS(ellipsoid_at(rho_h(), 2, 300000, 1), std::invalid_argument);
  CHECK_THROWS_AS(ellipsoid_at(rho_h(), 10, 0, 1), DomainError);
  CHECK_THROWS_AS(ellipsoid_profile({0.5, 1.2}, 10, 300000, 1), DomainError);
}

TEST_CASE("ellipsoids are deterministic per seed") {
  const auto a = ellipsoid_profile({0, 0.5, 1}, 10, 300000, 9);
  const auto b = ellipsoid_profile({0, 0.5, 1}, 10, 300000, 9);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].radial_semiaxis == b[i].radial_semiaxis);
    CHECK(a[i].transverse_semiaxes == b[i].transverse_semiaxes);
    for (std::size_t p = 0; p < a[i].points.size(); ++p) {
      REQUIRE(a[i].points[p].as_vector() == b[i].points[p].as_vector());
    }
  }
  CHECK(ellipsoid_profile({0.5}, 10, 300000, 10)[0].radial_semiaxis != a[1].radial_semiaxis);
}

TEST_CASE("profile over five radii thins toward the surface") {
  const std::vector<double> radii{0, 0.25, 0.5, 0.75, 1};
  double at_surface = 0;
  double at_quarter = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto profile = ellipsoid_profile(radii, 10, 300000, seed);
    REQUIRE(profile.size() == 5);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      REQUIRE(profile[i].mean_r.norm() == doctest::Approx(radii[i]).epsilon(0.02));
    }
    at_quarter += profile[1].radial_semiaxis;
    at_surface += profile[4].radial_semiaxis;
  }
  CHECK(at_surface < at_quarter);
}

TEST_CASE("semi-axes scale as one over root N") {
  const auto rho = rho_from_poincare({0.3, -0.2, 0.25});
  const auto small = ellipsoid_at(rho, 300, 1e5, 21, no_drift());
  const auto large = ellipsoid_at(rho, 300, 4e5, 22, no_drift());
  CHECK(large.radial_semiaxis / small.radial_semiaxis == doctest::Approx(0.5).epsilon(0.2));
  CHECK(large.transverse_semiaxes[0] / small.transverse_semiaxes[0] == doctest::Approx(0.5).epsilon(0.2));
  CHECK(large.transverse_semiaxes[1] / small.transverse_semiaxes[1] == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("containment follows the three-dimensional gaussian law") {
  // For near-gaussian scatter the 1.69 sigma ellipsoid holds P(chi2_3 <= 1.69^2) of the points.
  const boost::math::chi_squared_distribution<double> chi2(3.0);
  const double predicted = boost::math::cdf(chi2, 1.69 * 1.69);
  CHECK(predicted == doctest::Approx(0.586).epsilon(0.01));
  for (const Eigen::Vector3d& r : {Eigen::Vector3d(0.2, 0.1, -0.3), Eigen::Vector3d(0, 0.5, 0.5)}) {
    const auto e = ellipsoid_at(rho_from_poincare(PoincareVector::from_vector(r)), 500, 300000, 31, no_drift());
    const double fraction = containment_fraction(e);
    CHECK(std::abs(fraction - predicted) < 0.05);
    CHECK(fraction < 0.93);
  }
}

TEST_CASE("constant volume counts") {
  const double a = 0.01;
  const double v0 = 4 * kPi / 3 * a * a * a;
  const std::vector<UncertaintyEllipsoid> flat{sphere_patch(0, a), sphere_patch(1, a)};
  CHECK(count_distinguishable(flat, 1.0).total_states == doctest::Approx((4 * kPi / 3) / v0).epsilon(1e-3));
  CHECK(count_distinguishable(flat).total_states == doctest::Approx(0.74e6).epsilon(1e-3));
  CHECK(count_distinguishable_mean_volume(flat, 1.0) == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(count_distinguishable(flat).method == PackingMethod::radial_shell_integration);
}

TEST_CASE("packing estimate agrees with an FCC lattice count") {
  for (double a : {0.01, 0.03, 0.1}) {
    const std::vector<UncertaintyEllipsoid> flat{sphere_patch(0, a), sphere_patch(1, a)};
    const double estimate = count_distinguishable(flat).total_states;
    const auto lattice = static_cast<double>(fcc_count(a));
    INFO("a = " << a << " estimate " << estimate << " lattice " << lattice);
    CHECK(estimate / lattice > 0.5);
    CHECK(estimate / lattice < 2.0);
  }
}

TEST_CASE("interpolated volume") {
  const std::vector<UncertaintyEllipsoid> profile{sphere_patch(1, 0.01), sphere_patch(0, 0.02)};
  const double v0 = sphere_patch(0, 0.02).volume();
  const double v1 = sphere_patch(1, 0.01).volume();
  CHECK(interpolated_volume(profile, 0) == doctest::Approx(v0));
  CHECK(interpolated_volume(profile, 0.5) == doctest::Approx(0.5 * (v0 + v1)));
  CHECK(interpolated_volume(profile, 1.5) == doctest::Approx(v1));
}

TEST_CASE("larger patches mean fewer states") {
  double previous = std::numeric_limits<double>::infinity();
  for (double a : {0.005, 0.01, 0.02, 0.04}) {
    const std::vector<UncertaintyEllipsoid> p{sphere_patch(0, 2 * a), sphere_patch(0.5, 1.5 * a), sphere_patch(1, a)};
    const double n = count_distinguishable(p).total_states;
    CHECK(n < previous);
    previous = n;
  }
  // Growing only one patch still lowers the count.
  const std::vector<UncertaintyEllipsoid> base{sphere_patch(0, 0.02), sphere_patch(1, 0.01)};
  const std::vector<UncertaintyEllipsoid> grown{sphere_patch(0, 0.02), sphere_patch(1, 0.012)};
  CHECK(count_distinguishable(grown).total_states < count_distinguishable(base).total_states);
}

TEST_CASE("count_distinguishable errors") {
  CHECK_THROWS_AS(count_distinguishable({sphere_patch(0, 0.01)}), std::invalid_argument);
  const std::vector<UncertaintyEllipsoid> flat{sphere_patch(0, 0.01), sphere_patch(1, 0.01)};
  CHECK_THROWS_AS(count_distinguishable(flat, 0.0), DomainError);
  CHECK_THROWS_AS(count_distinguishable(flat, 1.5), DomainError);
  CHECK_THROWS_AS(count_distinguishable({sphere_patch(0, 0.0), sphere_patch(1, 0.01)}), DomainError);
}
