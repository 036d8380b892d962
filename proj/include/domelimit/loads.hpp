#pragma once

#include "domelimit/geometry.hpp"

namespace dome {

struct LoadCase {
  double gamma = 1.0;
  Vector3d live_dir = Vector3d::UnitX();
  double thickness = 0.1;

  void validate() const;
};

struct SurfaceLoadDensity {
  double f_c;  // force per unit mid-surface area
  double c_c;  // couple per unit mid-surface area
};

// Pointwise surface forces and couples at (phi, theta).
struct SurfaceLoads {
  Vector3d force_dead, force_live;
  Vector3d couple_dead, couple_live;
};

struct ElementLoadResultants {
  Vector3d f_d = Vector3d::Zero(), f_l = Vector3d::Zero();
  Vector3d c_d = Vector3d::Zero(), c_l = Vector3d::Zero();  // about the origin
};

// Closed parameter rectangle [phi1, phi2] x [theta1, theta2].
struct ParamRect {
  double phi1, phi2, theta1, theta2;
};

SurfaceLoadDensity surface_load_density(const MeridianGeometry& g,
                                        const LoadCase& load, double phi);

SurfaceLoads surface_loads(const MeridianGeometry& g, const LoadCase& load,
                           double phi, double theta);

// Tensor-product Gauss rule with `order` points per direction.
ElementLoadResultants element_load_resultants(const MeridianGeometry& g,
                                              const LoadCase& load,
                                              const ParamRect& rect,
                                              int order = 4);

// Volume of the shell between parameter bounds, from the closed form for the
// sphere: Theta (cos phi1 - cos phi2) (R^2 t + t^3 / 12).
double spherical_shell_volume(double R, double t, double phi1, double phi2,
                              double theta_span);

}  // namespace dome
