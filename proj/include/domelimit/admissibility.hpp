#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "domelimit/meshing.hpp"

namespace dome {

template <typename Scalar>
using ConeMatrix = Eigen::Matrix<Scalar, 3, kStressComponents>;

// rotated:  2 xi1 xi2 >= xi3^2, xi1, xi2 >= 0
// standard: xi1 >= |(xi2, xi3)|
enum class ConeKind { rotated, standard };

enum class FrictionMode { coulomb, not_enforced, in_plane_only, out_of_plane_only };

const char* friction_mode_name(FrictionMode m);
FrictionMode parse_friction_mode(const std::string& s);

// Rows (S_phi, S_theta, sqrt(2) S_phitheta) of S = sign M - N t / 2, using the
// symmetric part of N.
template <typename Scalar>
ConeMatrix<Scalar> unilateral_matrix(Scalar t, int sign) {
  const Scalar s(sign > 0 ? 1 : -1);
  const Scalar r2 = std::sqrt(Scalar(2));
  ConeMatrix<Scalar> A = ConeMatrix<Scalar>::Zero();
  A(0, kNphi) = -t / 2;
  A(0, kMphi) = s;
  A(1, kNtheta) = -t / 2;
  A(1, kMtheta) = s;
  A(2, kNthetaphi) = -r2 * t / 4;
  A(2, kNphitheta) = -r2 * t / 4;
  A(2, kMphitheta) = s * r2;
  return A;
}

// Coulomb cone for the in-plane direction n = cos(a) t_phi + sin(a) e_theta:
// rows (-mu N n.n, N n.tau, T.n) with tau = -sin(a) t_phi + cos(a) e_theta.
template <typename Scalar>
ConeMatrix<Scalar> friction_matrix(Scalar mu, Scalar alpha,
                                   FrictionMode mode = FrictionMode::coulomb) {
  const Scalar c = std::cos(alpha), s = std::sin(alpha);
  ConeMatrix<Scalar> F = ConeMatrix<Scalar>::Zero();
  F(0, kNphi) = -mu * c * c;
  F(0, kNthetaphi) = -mu * s * c;
  F(0, kNphitheta) = -mu * s * c;
  F(0, kNtheta) = -mu * s * s;
  if (mode != FrictionMode::out_of_plane_only) {
    F(1, kNphi) = -s * c;
    F(1, kNthetaphi) = c * c;
    F(1, kNphitheta) = -s * s;
    F(1, kNtheta) = s * c;
  }
  if (mode != FrictionMode::in_plane_only) {
    F(2, kTphi) = c;
    F(2, kTtheta) = s;
  }
  return F;
}

struct UnilateralMatrices {
  ConeMatrix<double> A_plus, A_minus;
};

struct FrictionMatrices {
  std::vector<double> angles;
  std::vector<ConeMatrix<double>> F;
};

UnilateralMatrices unilateral_matrices(double t);

// Angles j pi / n_alpha, j = 0..n_alpha-1. Empty for not_enforced.
FrictionMatrices friction_matrices(double mu, int n_alpha, FrictionMode mode);

enum class ConeRole { hinge_plus, hinge_minus, friction };

// One cone matrix applied at every node in the constraint set.
struct ConeFamily {
  ConeMatrix<double> matrix;
  ConeKind kind;
  ConeRole role;
  double angle = 0.0;  // friction direction, radians
};

struct ConeConstraints {
  std::vector<Index> nodes;
  std::vector<ConeFamily> families;

  struct Entry {
    Index node;
    const ConeMatrix<double>& matrix;
    ConeKind kind;
  };

  Index size() const {
    return static_cast<Index>(nodes.size() * families.size());
  }
  // Cone i lives at node i / families, family i % families.
  Entry operator[](Index i) const {
    const auto nf = static_cast<Index>(families.size());
    const auto& f = families[static_cast<std::size_t>(i % nf)];
    return {nodes[static_cast<std::size_t>(i / nf)], f.matrix, f.kind};
  }
};

ConeConstraints build_cone_constraints(const Mesh& mesh, double t, double mu,
                                       int n_alpha, FrictionMode mode);

// Signed distance-like margin, >= 0 inside the cone.
template <typename Scalar>
Scalar cone_margin(ConeKind kind, const Vec3<Scalar>& xi) {
  using std::hypot;
  if (kind == ConeKind::standard) return xi(0) - hypot(xi(1), xi(2));
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  return r * (xi(0) + xi(1)) - hypot(r * (xi(0) - xi(1)), xi(2));
}

}  // namespace dome
