#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "domelimit/common.hpp"

namespace dome {

enum class MeridianKind { sphere, ellipsoid, tabulated };

// Sampled generatrix with monotone cubic (Fritsch-Carlson) interpolants of
// r and z over a chord-length parameter mapped onto [phi_in, phi_fin].
// Experimental.
class TabulatedMeridian {
 public:
  TabulatedMeridian(std::vector<double> r, std::vector<double> z,
                    double phi_in, double phi_fin);

  // r, z and their first derivatives at parameter phi.
  void evaluate(double phi, double& r, double& z, double& dr, double& dz) const;

  const std::vector<double>& knots() const { return knots_; }

 private:
  std::vector<double> knots_, r_, z_, dr_, dz_;
};

struct MeridianGeometry {
  MeridianKind kind = MeridianKind::sphere;
  double R = 1.0;
  double b = 1.0;
  double phi_in = 0.0;
  double phi_fin = std::numbers::pi / 2;
  std::shared_ptr<const TabulatedMeridian> table;

  static MeridianGeometry sphere(double R, double phi_fin, double phi_in = 0.0);
  // Parameter is the eccentric anomaly u: r = R sin u, z = b cos u.
  static MeridianGeometry ellipsoid(double R, double b,
                                    double u_fin = std::numbers::pi / 2,
                                    double u_in = 0.0);
  static MeridianGeometry tabulated(std::vector<double> r, std::vector<double> z,
                                    double phi_in, double phi_fin);

  bool closed_apex() const { return phi_in == 0.0; }
  // Throws ConfigError on nonsensical parameters.
  void validate() const;
};

template <typename Scalar>
struct MeridianPoint {
  Scalar r, z;
  Scalar dr, dz;  // derivatives with respect to phi
  Scalar speed;
  Scalar sigma;
  Scalar rho_c;
  Scalar sin_sigma_over_r;  // finite at the apex
};

template <typename Scalar>
struct SurfaceFrame {
  Vec3<Scalar> position;
  Vec3<Scalar> t_phi, e_theta, n;
  Scalar r;
  Scalar rho_c;
  Scalar sigma;
  Scalar speed;
  Scalar sin_sigma_over_r;
};

template <typename Scalar>
struct JacobianFactors {
  Scalar J0;
  Scalar inv_rho_c;
  Scalar sin_sigma_over_r;

  Scalar Jn(Scalar zeta) const {
    return (Scalar(1) + zeta * inv_rho_c) * (Scalar(1) + zeta * sin_sigma_over_r);
  }
};

void check_phi_range(const MeridianGeometry& g, double phi);

template <typename Scalar>
MeridianPoint<Scalar> meridian_point(const MeridianGeometry& g, Scalar phi) {
  using std::atan2;
  using std::cos;
  using std::sin;
  using std::sqrt;
  check_phi_range(g, static_cast<double>(phi));
  MeridianPoint<Scalar> p;
  const Scalar R(g.R);
  switch (g.kind) {
    case MeridianKind::sphere: {
      p.r = R * sin(phi);
      p.z = R * cos(phi);
      p.dr = R * cos(phi);
      p.dz = -R * sin(phi);
      p.speed = R;
      p.sigma = phi;
      p.rho_c = R;
      p.sin_sigma_over_r = Scalar(1) / R;
      break;
    }
    case MeridianKind::ellipsoid: {
      const Scalar b(g.b);
      p.r = R * sin(phi);
      p.z = b * cos(phi);
      p.dr = R * cos(phi);
      p.dz = -b * sin(phi);
      p.speed = sqrt(p.dr * p.dr + p.dz * p.dz);
      p.sigma = atan2(b * sin(phi), R * cos(phi));
      p.rho_c = p.speed * p.speed * p.speed / (b * R);
      p.sin_sigma_over_r = b / (R * p.speed);
      break;
    }
    case MeridianKind::tabulated: {
      const double ph = static_cast<double>(phi);
      double r, z, dr, dz;
      g.table->evaluate(ph, r, z, dr, dz);
      const double speed = std::hypot(dr, dz);
      const double sigma = std::atan2(-dz, dr);
      // curvature from a central difference of the tangential angle
      const double span = g.phi_fin - g.phi_in;
      const double h = 1e-5 * span;
      const double a = std::max(g.phi_in, ph - h);
      const double c = std::min(g.phi_fin, ph + h);
      double ra, za, dra, dza, rc, zc, drc, dzc;
      g.table->evaluate(a, ra, za, dra, dza);
      g.table->evaluate(c, rc, zc, drc, dzc);
      const double dsigma =
          (std::atan2(-dzc, drc) - std::atan2(-dza, dra)) / (c - a);
      const double rho_c = speed / dsigma;
      p.r = Scalar(r);
      p.z = Scalar(z);
      p.dr = Scalar(dr);
      p.dz = Scalar(dz);
      p.speed = Scalar(speed);
      p.sigma = Scalar(sigma);
      p.rho_c = Scalar(rho_c);
      p.sin_sigma_over_r =
          Scalar(r > 1e-12 * g.R ? std::sin(sigma) / r : 1.0 / rho_c);
      break;
    }
  }
  return p;
}

template <typename Scalar>
SurfaceFrame<Scalar> meridian_frame(const MeridianGeometry& g, Scalar phi,
                                    Scalar theta) {
  using std::cos;
  using std::sin;
  const auto p = meridian_point<Scalar>(g, phi);
  const Scalar c = cos(theta), s = sin(theta);
  const Vec3<Scalar> e_r(c, s, Scalar(0));
  const Vec3<Scalar> k(Scalar(0), Scalar(0), Scalar(1));
  SurfaceFrame<Scalar> f;
  f.position = p.r * e_r + p.z * k;
  f.t_phi = (p.dr * e_r + p.dz * k) / p.speed;
  f.e_theta = Vec3<Scalar>(-s, c, Scalar(0));
  f.n = f.t_phi.cross(f.e_theta);
  f.r = p.r;
  f.rho_c = p.rho_c;
  f.sigma = p.sigma;
  f.speed = p.speed;
  f.sin_sigma_over_r = p.sin_sigma_over_r;
  return f;
}

template <typename Scalar>
JacobianFactors<Scalar> jacobian_factors(const MeridianGeometry& g, Scalar phi) {
  const auto p = meridian_point<Scalar>(g, phi);
  return {p.r * p.speed, Scalar(1) / p.rho_c, p.sin_sigma_over_r};
}

}  // namespace dome
