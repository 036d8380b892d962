#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "domelimit/admissibility.hpp"
#include "domelimit/assembly.hpp"

namespace dome {

using ConeVectors = Eigen::Matrix<double, 3, Eigen::Dynamic>;

// Physical units used to nondimensionalize the program before solving.
struct ProgramUnits {
  double gamma = 1.0;
  double R = 1.0;
  double t = 0.1;
  double mesh_size = 1.0;  // dimensionless element size used in row scaling
};

// maximize lambda subject to
//   B x + lambda f_live = -f_dead,  C x = 0,  A_c x_node in K (every cone c).
struct ConicProgram {
  SparseMatrix B;
  SparseMatrix C;
  Eigen::VectorXd f_dead, f_live;
  std::vector<BoundaryConstraint> bc;
  ConeConstraints cones;
  ProgramUnits units;
  Index n_nodes = 0;

  Index n_vars() const { return kStressComponents * n_nodes + 1; }
  Index n_eq() const { return B.rows() + C.rows(); }
  Index n_cones() const { return cones.size(); }

  // Scale of stress component c (force/length or moment/length).
  double stress_unit(int c) const;
  // Scale of equilibrium row i (force or moment).
  double row_unit(Index i) const;
  // Scale of a cone family's rows.
  double cone_unit(ConeKind kind) const;
};

ConicProgram build_program(const StructuralSystem& sys, ConeConstraints cones,
                           const ProgramUnits& units);

enum class SolveStatus { optimal, infeasible, unbounded, numerical_trouble };

const char* status_name(SolveStatus s);

struct SolverOptions {
  double feastol = 1e-9;
  double abstol = 1e-10;
  double reltol = 1e-8;  // relative duality gap
  int max_iter = 150;
  double regularization = 1e-9;
  int refine_steps = 4;
  bool verbose = false;

  bool operator==(const SolverOptions&) const = default;
};

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_trouble;
  double lambda = 0.0;
  Eigen::VectorXd x_hat;    // 9N physical stress components
  Eigen::VectorXd u;        // 6E element velocities (translation; rotation)
  Eigen::VectorXd bc_mult;  // one per bc row
  ConeVectors cone_duals;   // physical, same cone convention as the program
  ConeVectors flows;        // dimensionless duals
  double gap = 0.0;         // duality gap relative to max(1, |lambda|)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string message;

  // Dual of cone `family` at node position `k` of the program's node list.
  Eigen::Vector3d dual(const ConicProgram& p, Index k, Index family) const;
};

SolveReport solve(const ConicProgram& program, const SolverOptions& opts = {});

struct CertificateTolerances {
  double equality = 1e-6;
  double cone_margin = -1e-8;
  double dual_equality = 1e-6;
  double strong_duality = 1e-6;
  double normalization = 1e-6;

  bool operator==(const CertificateTolerances&) const = default;
};

struct CertificateDiagnostics {
  double equality_residual = 0.0;  // (a), relative to the load scale
  double worst_cone_margin = 0.0;  // (b), dimensionless
  double dual_residual = 0.0;      // (c), dimensionless
  double strong_duality = 0.0;     // (d) |lambda + u'f_dead| / max(1, lambda)
  double normalization = 0.0;      // (e) |1 - u'f_live|
  bool degenerate = false;         // zero live load
  bool ok = false;
  std::string failure;
};

CertificateDiagnostics check_certificate(const ConicProgram& program,
                                         const SolveReport& report,
                                         const CertificateTolerances& tol = {});

// Text dump: dimensions, equality triplets, right-hand side, cone table.
void export_program(std::ostream& os, const ConicProgram& program);

}  // namespace dome
