#include "domelimit/admissibility.hpp"

#include <string>

namespace dome {

const char* friction_mode_name(FrictionMode m) {
  switch (m) {
    case FrictionMode::coulomb: return "coulomb";
    case FrictionMode::not_enforced: return "not_enforced";
    case FrictionMode::in_plane_only: return "in_plane_only";
    case FrictionMode::out_of_plane_only: return "out_of_plane_only";
  }
  return "?";
}

FrictionMode parse_friction_mode(const std::string& s) {
  for (auto m : {FrictionMode::coulomb, FrictionMode::not_enforced,
                 FrictionMode::in_plane_only, FrictionMode::out_of_plane_only})
    if (s == friction_mode_name(m)) return m;
  throw ConfigError("unknown friction mode '" + s + "'");
}

UnilateralMatrices unilateral_matrices(double t) {
  if (!(t > 0.0)) throw ConfigError("unilateral matrices: thickness must be positive");
  return {unilateral_matrix<double>(t, +1), unilateral_matrix<double>(t, -1)};
}

FrictionMatrices friction_matrices(double mu, int n_alpha, FrictionMode mode) {
  FrictionMatrices fm;
  if (mode == FrictionMode::not_enforced) return fm;
  if (!(mu > 0.0))
    throw ConfigError("friction coefficient must be positive, got " + std::to_string(mu));
  if (n_alpha < 2)
    throw ConfigError("n_alpha must be >= 2, got " + std::to_string(n_alpha));
  for (int j = 0; j < n_alpha; ++j) {
    const double a = j * std::numbers::pi / n_alpha;
    fm.angles.push_back(a);
    fm.F.push_back(friction_matrix<double>(mu, a, mode));
  }
  return fm;
}

ConeConstraints build_cone_constraints(const Mesh& mesh, double t, double mu,
                                       int n_alpha, FrictionMode mode) {
  ConeConstraints cc;
  const auto um = unilateral_matrices(t);
  const auto fm = friction_matrices(mu, n_alpha, mode);
  cc.families.push_back({um.A_plus, ConeKind::rotated, ConeRole::hinge_plus, 0.0});
  cc.families.push_back({um.A_minus, ConeKind::rotated, ConeRole::hinge_minus, 0.0});
  for (std::size_t j = 0; j < fm.F.size(); ++j)
    cc.families.push_back({fm.F[j], ConeKind::standard, ConeRole::friction, fm.angles[j]});
  cc.nodes.resize(mesh.nodes.size());
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) cc.nodes[k] = static_cast<Index>(k);
  return cc;
}

}  // namespace dome
