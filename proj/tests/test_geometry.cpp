#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "domelimit/geometry.hpp"

using namespace dome;
using std::numbers::pi;

namespace {

void check_triad(const SurfaceFrame<double>& f) {
  CHECK(std::abs(f.t_phi.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(f.e_theta.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(f.n.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(f.t_phi.dot(f.e_theta)) <= 1e-12);
  CHECK(std::abs(f.t_phi.dot(f.n)) <= 1e-12);
  CHECK(std::abs(f.e_theta.dot(f.n)) <= 1e-12);
  CHECK((f.t_phi.cross(f.e_theta) - f.n).norm() <= 1e-12);
  CHECK(std::abs(f.e_theta.z()) <= 1e-15);
}

}  // namespace

TEST_CASE("sphere frame at the equator") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  const auto f = meridian_frame<double>(g, pi / 2, 0.0);
  CHECK(f.r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.sigma == doctest::Approx(pi / 2));
  CHECK(f.rho_c == doctest::Approx(1.0));
  CHECK((f.t_phi - Vector3d(0, 0, -1)).norm() < 1e-15);
  CHECK((f.n - Vector3d(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("sphere apex") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  for (double th : {0.0, 0.7, 2.0, pi}) {
    const auto f = meridian_frame<double>(g, 0.0, th);
    CHECK(f.r == 0.0);
    CHECK((f.position - Vector3d(0, 0, 1)).norm() < 1e-15);
    check_triad(f);
  }
  CHECK(g.closed_apex());
}

TEST_CASE("ellipsoid with equal semi-diameters is the sphere") {
  const auto s = MeridianGeometry::sphere(1.0, pi / 2);
  const auto e = MeridianGeometry::ellipsoid(1.0, 1.0);
  for (double ph : {0.0, 0.3, 1.0, pi / 2})
    for (double th : {0.0, 1.1, 3.0}) {
      const auto a = meridian_frame<double>(s, ph, th);
      const auto b = meridian_frame<double>(e, ph, th);
      CHECK((a.position - b.position).norm() < 1e-15);
      CHECK((a.t_phi - b.t_phi).norm() < 1e-15);
      CHECK((a.n - b.n).norm() < 1e-15);
      CHECK(a.rho_c == doctest::Approx(b.rho_c));
      CHECK(a.sigma == doctest::Approx(b.sigma));
    }
}

TEST_CASE("jacobian factors") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  const auto j = jacobian_factors<double>(g, pi / 3);
  CHECK(j.J0 == doctest::Approx(std::sin(pi / 3)));
  for (double z : {-0.05, 0.0, 0.02, 0.05})
    CHECK(j.Jn(z) == doctest::Approx((1 + z) * (1 + z)).epsilon(1e-14));
  CHECK(j.Jn(0.0) == 1.0);

  const auto g2 = MeridianGeometry::sphere(2.0, pi / 2);
  CHECK(jacobian_factors<double>(g2, pi / 2).J0 == doctest::Approx(4.0));

  const auto e = MeridianGeometry::ellipsoid(1.0, 0.6);
  for (double u : {0.0, 0.4, 1.2})
    CHECK(jacobian_factors<double>(e, u).Jn(0.0) == 1.0);
}

TEST_CASE("random frames are orthonormal and right-handed") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const MeridianGeometry geoms[] = {
      MeridianGeometry::sphere(1.3, 0.6 * pi),
      MeridianGeometry::ellipsoid(1.0, 0.5),
      MeridianGeometry::ellipsoid(1.0, 1.7, pi / 2, 0.2),
  };
  for (const auto& g : geoms)
    for (int i = 0; i < 1000; ++i) {
      const double ph = g.phi_in + U(rng) * (g.phi_fin - g.phi_in);
      check_triad(meridian_frame<double>(g, ph, 2 * pi * U(rng)));
    }
}

TEST_CASE("tangent and curvature against finite differences") {
  const MeridianGeometry geoms[] = {
      MeridianGeometry::sphere(1.0, pi / 2),
      MeridianGeometry::ellipsoid(1.0, 0.5),
      MeridianGeometry::ellipsoid(2.0, 3.0),
  };
  const double h = 1e-5;
  for (const auto& g : geoms)
    for (double ph : {0.2, 0.7, 1.1, 1.5}) {
      const double th = 0.4;
      const auto f = meridian_frame<double>(g, ph, th);
      const Vector3d dP = (meridian_frame<double>(g, ph + h, th).position -
                           meridian_frame<double>(g, ph - h, th).position) /
                          (2 * h);
      CHECK((dP - f.speed * f.t_phi).norm() <= 1e-6 * dP.norm());

      // rho_c = |dP/dphi| / (dsigma/dphi), sigma recovered from the tangent
      auto sig = [&](double p) {
        const auto q = meridian_frame<double>(g, p, th);
        return std::atan2(-q.t_phi.z(), std::hypot(q.t_phi.x(), q.t_phi.y()));
      };
      const double dsig = (sig(ph + h) - sig(ph - h)) / (2 * h);
      CHECK(f.rho_c == doctest::Approx(dP.norm() / dsig).epsilon(1e-5));
      CHECK(f.sigma == doctest::Approx(sig(ph)).epsilon(1e-12));
    }
}

TEST_CASE("sphere has constant curvature radius and sigma = phi") {
  const auto g = MeridianGeometry::sphere(2.5, pi / 2);
  for (double ph : {0.0, 0.3, 1.0, pi / 2}) {
    const auto p = meridian_point<double>(g, ph);
    CHECK(p.rho_c == 2.5);
    CHECK(p.sigma == ph);
  }
}

TEST_CASE("ellipsoid apex limit of sin(sigma)/r") {
  const auto g = MeridianGeometry::ellipsoid(1.0, 0.6);
  const auto p0 = meridian_point<double>(g, 0.0);
  const auto p1 = meridian_point<double>(g, 1e-6);
  CHECK(p0.sin_sigma_over_r == doctest::Approx(std::sin(p1.sigma) / p1.r).epsilon(1e-9));
  CHECK(p0.sin_sigma_over_r == doctest::Approx(1.0 / p0.rho_c).epsilon(1e-12));
}

TEST_CASE("tabulated meridian follows a sampled sphere") {
  std::vector<double> r, z;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double a = 0.5 * pi * i / n;
    r.push_back(std::sin(a));
    z.push_back(std::cos(a));
  }
  const auto g = MeridianGeometry::tabulated(r, z, 0.0, pi / 2);
  for (double ph : {0.1, 0.5, 1.0, 1.4}) {
    const auto f = meridian_frame<double>(g, ph, 0.3);
    CHECK(std::abs(f.position.norm() - 1.0) < 1e-4);
    CHECK((f.n - f.position.normalized()).norm() < 1e-3);
    CHECK(f.rho_c == doctest::Approx(1.0).epsilon(2e-2));
  }
}

TEST_CASE("invalid geometry and out-of-range parameters") {
  CHECK_THROWS_AS(MeridianGeometry::sphere(-1.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(MeridianGeometry::sphere(1.0, 1.0, 1.2).validate(), ConfigError);
  CHECK_THROWS_AS(MeridianGeometry::ellipsoid(1.0, 0.0).validate(), ConfigError);
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  CHECK_THROWS_AS(meridian_point<double>(g, 2.0), DomainError);
  CHECK_THROWS_AS(meridian_point<double>(g, -0.1), DomainError);
}
