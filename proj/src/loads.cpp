#include "domelimit/loads.hpp"

#include <cmath>

#include "domelimit/quadrature.hpp"

namespace dome {

void LoadCase::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("load: gamma must be positive");
  if (!(thickness > 0.0)) throw ConfigError("load: thickness must be positive");
  if (std::abs(live_dir.norm() - 1.0) > 1e-12)
    throw ConfigError("load: live direction must be a unit vector");
  if (std::abs(live_dir.z()) > 1e-12)
    throw ConfigError("load: live direction must be horizontal");
}

SurfaceLoadDensity surface_load_density(const MeridianGeometry& g,
                                        const LoadCase& load, double phi) {
  const auto p = meridian_point<double>(g, phi);
  const double t = load.thickness;
  const double inv_rho = 1.0 / p.rho_c;
  SurfaceLoadDensity d;
  d.f_c = (1.0 + t * t / 12.0 * inv_rho * p.sin_sigma_over_r) * load.gamma * t;
  d.c_c = (inv_rho + p.sin_sigma_over_r) * load.gamma * t * t * t / 12.0;
  return d;
}

SurfaceLoads surface_loads(const MeridianGeometry& g, const LoadCase& load,
                           double phi, double theta) {
  const auto f = meridian_frame<double>(g, phi, theta);
  const auto d = surface_load_density(g, load, phi);
  SurfaceLoads s;
  s.force_dead = -d.f_c * Vector3d::UnitZ();
  s.force_live = d.f_c * load.live_dir;
  s.couple_dead = d.c_c * std::sin(f.sigma) * f.e_theta;
  s.couple_live = d.c_c * f.n.cross(load.live_dir);
  return s;
}

ElementLoadResultants element_load_resultants(const MeridianGeometry& g,
                                              const LoadCase& load,
                                              const ParamRect& rect,
                                              int order) {
  ElementLoadResultants res;
  const double dphi = rect.phi2 - rect.phi1;
  const double dtheta = rect.theta2 - rect.theta1;
  if (dphi == 0.0 || dtheta == 0.0) return res;
  const auto& q = gauss_legendre(order);
  const double Jr = dphi * dtheta / 4.0;
  for (int a = 0; a < order; ++a) {
    const double phi = rect.phi1 + 0.5 * (1.0 + q.x[a]) * dphi;
    const auto jac = jacobian_factors<double>(g, phi);
    for (int b = 0; b < order; ++b) {
      const double theta = rect.theta1 + 0.5 * (1.0 + q.x[b]) * dtheta;
      const double w = q.w[a] * q.w[b] * jac.J0 * Jr;
      const auto P = meridian_frame<double>(g, phi, theta).position;
      const auto s = surface_loads(g, load, phi, theta);
      res.f_d += w * s.force_dead;
      res.f_l += w * s.force_live;
      res.c_d += w * (P.cross(s.force_dead) + s.couple_dead);
      res.c_l += w * (P.cross(s.force_live) + s.couple_live);
    }
  }
  return res;
}

double spherical_shell_volume(double R, double t, double phi1, double phi2,
                              double theta_span) {
  return theta_span * (std::cos(phi1) - std::cos(phi2)) *
         (R * R * t + t * t * t / 12.0);
}

}  // namespace dome
