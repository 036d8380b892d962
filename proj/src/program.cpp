#include <cmath>
#include <ostream>

#include "domelimit/conic_solver.hpp"

namespace dome {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_trouble: return "numerical_trouble";
  }
  return "?";
}

double ConicProgram::stress_unit(int c) const {
  const double base = units.gamma * units.R * units.t;
  return c >= kMphi ? base * units.t : base;
}

double ConicProgram::row_unit(Index i) const {
  if (i >= B.rows()) return stress_unit(bc[static_cast<std::size_t>(i - B.rows())].component);
  const double force = units.gamma * units.t * units.R * units.R * units.mesh_size;
  return (i % 6) < 3 ? force : force * units.R;
}

double ConicProgram::cone_unit(ConeKind kind) const {
  const double base = units.gamma * units.R * units.t;
  return kind == ConeKind::rotated ? base * units.t : base;
}

ConicProgram build_program(const StructuralSystem& sys, ConeConstraints cones,
                           const ProgramUnits& units) {
  if (!(units.gamma > 0 && units.R > 0 && units.t > 0 && units.mesh_size > 0))
    throw ConfigError("program units must be positive");
  ConicProgram p;
  p.B = sys.B;
  p.C = sys.bc_matrix();
  p.f_dead = sys.f_dead;
  p.f_live = sys.f_live;
  p.bc = sys.bc;
  p.cones = std::move(cones);
  p.units = units;
  p.n_nodes = sys.B.cols() / kStressComponents;
  for (Index k : p.cones.nodes)
    if (k < 0 || k >= p.n_nodes) throw AssemblyError("cone references unknown node");
  return p;
}

Eigen::Vector3d SolveReport::dual(const ConicProgram& p, Index k,
                                  Index family) const {
  const auto nf = static_cast<Index>(p.cones.families.size());
  return cone_duals.col(k * nf + family);
}

void export_program(std::ostream& os, const ConicProgram& p) {
  const Index n9 = kStressComponents * p.n_nodes;
  os.precision(17);
  os << "# dome-limit conic program\n";
  os << "# maximize x[lambda_index] s.t. A x = b, cone rows in K\n";
  os << "# rotated cone: 2 xi1 xi2 >= xi3^2, xi1, xi2 >= 0; standard: xi1 >= |(xi2, xi3)|\n";
  os << "dims " << p.n_eq() << ' ' << p.n_vars() << ' ' << p.n_cones() << '\n';
  os << "lambda_index " << n9 << '\n';

  Index nnz = p.B.nonZeros() + p.C.nonZeros();
  for (Index i = 0; i < p.f_live.size(); ++i) nnz += p.f_live(i) != 0.0;
  os << "equality " << nnz << '\n';
  for (int k = 0; k < p.B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(p.B, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  for (Index i = 0; i < p.f_live.size(); ++i)
    if (p.f_live(i) != 0.0) os << i << ' ' << n9 << ' ' << p.f_live(i) << '\n';
  for (int k = 0; k < p.C.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(p.C, k); it; ++it)
      os << it.row() + p.B.rows() << ' ' << it.col() << ' ' << it.value() << '\n';

  os << "rhs " << p.n_eq() << '\n';
  for (Index i = 0; i < p.B.rows(); ++i) os << -p.f_dead(i) << '\n';
  for (Index i = 0; i < p.C.rows(); ++i) os << 0.0 << '\n';

  // Each family is a 3x9 matrix acting on the 9 unknowns of a node.
  os << "families " << p.cones.families.size() << '\n';
  for (const auto& f : p.cones.families) {
    os << (f.kind == ConeKind::rotated ? 'R' : 'S');
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < kStressComponents; ++c) os << ' ' << f.matrix(r, c);
    os << '\n';
  }
  os << "cones " << p.n_cones() << '\n';
  const auto nf = static_cast<Index>(p.cones.families.size());
  for (Index i = 0; i < p.n_cones(); ++i)
    os << p.cones.nodes[static_cast<std::size_t>(i / nf)] * kStressComponents << ' '
       << i % nf << '\n';
}

}  // namespace dome
