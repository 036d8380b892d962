#include <limits>
#include <cmath>
#include <sstream>

#include "domelimit/conic_solver.hpp"

namespace dome {

CertificateDiagnostics check_certificate(const ConicProgram& p,
                                         const SolveReport& rep,
                                         const CertificateTolerances& tol) {
  CertificateDiagnostics diag;
  std::ostringstream why;
  if (rep.status != SolveStatus::optimal) {
    diag.failure = std::string("status is ") + status_name(rep.status);
    return diag;
  }
  const Index n9 = kStressComponents * p.n_nodes;
  if (rep.x_hat.size() != n9 || rep.u.size() != p.B.rows() ||
      rep.bc_mult.size() != p.C.rows() || rep.cone_duals.cols() != p.n_cones()) {
    diag.failure = "report dimensions do not match the program";
    return diag;
  }

  // (a) primal equalities
  const Eigen::VectorXd r = p.B * rep.x_hat + p.f_dead + rep.lambda * p.f_live;
  const double load = std::max(p.f_dead.lpNorm<Eigen::Infinity>(),
                               std::numeric_limits<double>::min());
  double eq = r.lpNorm<Eigen::Infinity>() / load;
  for (const auto& bc : p.bc)
    eq = std::max(eq, std::abs(rep.x_hat(bc.node * kStressComponents + bc.component)) /
                          p.stress_unit(bc.component));
  diag.equality_residual = eq;

  // (b) cone margins, dimensionless; (c) dual equality, in scaled columns
  Eigen::VectorXd dual = p.B.transpose() * rep.u;
  const Eigen::VectorXd btu = dual;
  dual += p.C.transpose() * rep.bc_mult;
  double margin = std::numeric_limits<double>::infinity();
  const auto nf = static_cast<Index>(p.cones.families.size());
  for (Index i = 0; i < p.n_cones(); ++i) {
    const auto& fam = p.cones.families[static_cast<std::size_t>(i % nf)];
    const Index node = p.cones.nodes[static_cast<std::size_t>(i / nf)];
    const auto xk = rep.x_hat.segment<kStressComponents>(node * kStressComponents);
    const Vector3d xi = fam.matrix * xk / p.cone_unit(fam.kind);
    margin = std::min(margin, cone_margin<double>(fam.kind, xi));
    dual.segment<kStressComponents>(node * kStressComponents) -=
        fam.matrix.transpose() * rep.cone_duals.col(i);
  }
  diag.worst_cone_margin = p.n_cones() ? margin : 0.0;
  double dres = 0.0, dref = 1.0;
  for (Index j = 0; j < n9; ++j) {
    const double s = p.stress_unit(static_cast<int>(j % kStressComponents));
    dres = std::max(dres, std::abs(dual(j)) * s);
    dref = std::max(dref, std::abs(btu(j)) * s);
  }
  diag.dual_residual = dres / dref;

  // (d) strong duality, (e) normalization
  diag.degenerate = p.f_live.lpNorm<Eigen::Infinity>() == 0.0;
  diag.strong_duality =
      std::abs(rep.lambda + rep.u.dot(p.f_dead)) / std::max(1.0, std::abs(rep.lambda));
  diag.normalization = std::abs(1.0 - rep.u.dot(p.f_live));

  bool ok = true;
  auto fail = [&](const char* name, double value, double limit) {
    if (ok) why << name << " = " << value << " (limit " << limit << ")";
    ok = false;
  };
  if (diag.degenerate) {
    why << "zero live load: normalization 1 - u'f_live = 0 cannot hold";
    ok = false;
  }
  if (!(diag.equality_residual <= tol.equality))
    fail("equality residual", diag.equality_residual, tol.equality);
  if (!(diag.worst_cone_margin >= tol.cone_margin))
    fail("worst cone margin", diag.worst_cone_margin, tol.cone_margin);
  if (!(diag.dual_residual <= tol.dual_equality))
    fail("dual equality residual", diag.dual_residual, tol.dual_equality);
  if (!(diag.strong_duality <= tol.strong_duality))
    fail("|lambda + u'f_dead|", diag.strong_duality, tol.strong_duality);
  if (!(diag.normalization <= tol.normalization))
    fail("|1 - u'f_live|", diag.normalization, tol.normalization);
  diag.ok = ok;
  diag.failure = why.str();
  return diag;
}

}  // namespace dome
