#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "domelimit/mechanism.hpp"

namespace dome {

// One dome and its discretization.  Lengths are in units of R, angles in
// degrees; thickness and rise are ratios to R.
struct StudySpec {
  MeridianKind shape = MeridianKind::sphere;
  std::vector<double> table_r, table_z;  // tabulated generatrix, scaled by R
  ModelKind model = ModelKind::half;
  double radius = 1.0;
  double gamma = 1.0;
  double thickness_ratio = 0.1;
  double half_embrace_deg = 90.0;
  double rise_ratio = 1.0;  // b / R, ellipsoids only
  double oculus_deg = 0.0;
  double friction_coefficient = 0.7;
  FrictionMode friction_mode = FrictionMode::coulomb;
  int mesh_m = 32, mesh_n = 64;
  int n_alpha = 32;
  std::array<double, 3> live_direction{1.0, 0.0, 0.0};
  SolverOptions solver;
  CertificateTolerances certificate;
  AssemblyOptions quadrature;
  double crack_threshold = 1e-4;

  bool operator==(const StudySpec&) const = default;

  // Throws ConfigError.
  void validate() const;
  MeridianGeometry geometry() const;
  LoadCase load_case() const;
  ProgramUnits units() const;
};

struct LimitResult {
  SolveReport report;
  CertificateDiagnostics certificate;
  std::optional<MechanismReport> mechanism;
  std::vector<CrackRecord> cracks;
  std::string mechanism_error;
  double assembly_seconds = 0.0;

  double lambda() const { return report.lambda; }
  // Infeasible, or no positive multiplier.
  bool unstable() const;
};

// Mesh and program are rebuilt from the spec; `program_out`, if given,
// receives the program that was solved.
LimitResult run_limit_analysis(const StudySpec& spec, Mesh* mesh_out = nullptr,
                               ConicProgram* program_out = nullptr);

// Runs f(0..n-1) on up to `jobs` threads.  Results land in index order.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

struct ConvergenceCell {
  int m, n, n_alpha;
  SolveStatus status;
  double lambda;
  int iterations;
  double seconds;
  bool certified;
};

std::vector<ConvergenceCell> convergence_study(const StudySpec& base,
                                               const std::vector<std::array<int, 2>>& meshes,
                                               const std::vector<int>& n_alphas, int jobs = 1);

// Rows of cells (same mesh) in which lambda increases with n_alpha by more
// than `slack`.  Empty when every row is non-increasing.
std::vector<std::string> monotonicity_violations(const std::vector<ConvergenceCell>& cells,
                                                 double slack = 1e-6);

enum class SweepVariable { thickness_ratio, half_embrace_deg, friction_coefficient, rise_ratio };

const char* sweep_variable_name(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& s);
void set_sweep_variable(StudySpec& spec, SweepVariable v, double value);

struct SweepPoint {
  double value;
  FrictionMode mode;
  SolveStatus status;
  double lambda;
  bool unstable;
  bool certified;
};

// Grid order: modes outer, values inner.
std::vector<SweepPoint> parametric_sweep(const StudySpec& base, SweepVariable var,
                                         const std::vector<double>& values,
                                         const std::vector<FrictionMode>& modes, int jobs = 1);

struct ThicknessSearch {
  double thickness_ratio;  // smallest stable t/R found
  double lower;            // largest unstable t/R found
  double lambda;           // at thickness_ratio
  int solves;
};

// Bisection on stability.  The bracket must be unstable at `lo` and stable
// at `hi`; otherwise ConfigError.
ThicknessSearch min_thickness_search(const StudySpec& base, double lo, double hi,
                                     double tol = 1e-4);

}  // namespace dome
