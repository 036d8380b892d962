#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dome {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vector3d = Eigen::Vector3d;
using Index = Eigen::Index;

// Nodal stress layout: (N_phi, N_thetaphi, N_phitheta, N_theta, T_phi, T_theta,
// M_phi, M_phitheta, M_theta).
inline constexpr int kStressComponents = 9;

enum StressComponent : int {
  kNphi = 0,
  kNthetaphi = 1,
  kNphitheta = 2,
  kNtheta = 3,
  kTphi = 4,
  kTtheta = 5,
  kMphi = 6,
  kMphitheta = 7,
  kMtheta = 8,
};

const char* component_name(int c);

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dome
