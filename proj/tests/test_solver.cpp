#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "domelimit/studies.hpp"

using namespace dome;

namespace {

// One node; N_phi + lambda = 0 and N_theta = -d.  The remaining components
// are pinned.  With the cone -N_theta >= |N_phi| the optimum is lambda = d.
ConicProgram toy_program(double d, bool with_cone, bool contradict = false) {
  StructuralSystem sys;
  sys.B.resize(2, kStressComponents);
  sys.B.insert(0, kNphi) = 1.0;
  sys.B.insert(1, kNtheta) = 1.0;
  sys.f_dead = Eigen::Vector2d(0.0, d);
  sys.f_live = Eigen::Vector2d(1.0, 0.0);
  for (int c = 0; c < kStressComponents; ++c)
    if (c != kNphi && c != kNtheta) sys.bc.push_back({0, c});

  ConeConstraints cc;
  cc.nodes = {0};
  if (with_cone) {
    ConeMatrix<double> A = ConeMatrix<double>::Zero();
    if (contradict) {
      A(0, kNtheta) = 1.0;  // N_theta >= |N_phi| cannot hold
      A(1, kNphi) = 1.0;
    } else {
      A(0, kNtheta) = -1.0;
      A(1, kNphi) = -1.0;
    }
    cc.families.push_back({A, ConeKind::standard, ConeRole::friction, 0.0});
  }
  return build_program(sys, std::move(cc), ProgramUnits{1.0, 1.0, 1.0, 1.0});
}

StudySpec small_spec(int m, int n, int na) {
  StudySpec s;
  s.mesh_m = m;
  s.mesh_n = n;
  s.n_alpha = na;
  return s;
}

}  // namespace

TEST_CASE("toy program with a known optimum") {
  const auto p = toy_program(2.5, true);
  const auto rep = solve(p);
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(rep.lambda == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(rep.x_hat[kNphi] == doctest::Approx(-2.5).epsilon(1e-8));
  const auto cert = check_certificate(p, rep);
  CHECK_MESSAGE(cert.ok, cert.failure);
  // u'f_live = 1 and lambda = -u'f_dead
  CHECK(rep.u[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.u[1] * 2.5 == doctest::Approx(-2.5).epsilon(1e-8));
}

TEST_CASE("toy programs that are infeasible or unbounded") {
  CHECK(solve(toy_program(1.0, true, true)).status == SolveStatus::infeasible);
  CHECK(solve(toy_program(1.0, false)).status == SolveStatus::unbounded);
}

TEST_CASE("coarse hemisphere") {
  Mesh mesh;
  ConicProgram p;
  const auto r = run_limit_analysis(small_spec(4, 8, 2), &mesh, &p);
  REQUIRE(r.report.status == SolveStatus::optimal);
  CHECK_MESSAGE(r.certificate.ok, r.certificate.failure);
  CHECK(r.lambda() == doctest::Approx(0.2569590).epsilon(1e-5));
  CHECK(r.certificate.equality_residual < 1e-8);
  CHECK(r.certificate.worst_cone_margin > -1e-8);
  CHECK(p.n_cones() == 45 * 4);
  CHECK(r.report.x_hat.size() == 405);
  CHECK(r.report.u.size() == 192);

  SUBCASE("a lower multiplier fails the certificate") {
    SolveReport worse = r.report;
    worse.lambda *= 0.98;
    const auto c = check_certificate(p, worse);
    CHECK(!c.ok);
    CHECK(c.strong_duality > 1e-3);
  }
  SUBCASE("zero live load is degenerate") {
    ConicProgram q = p;
    q.f_live.setZero();
    const auto c = check_certificate(q, r.report);
    CHECK(c.degenerate);
    CHECK(!c.ok);
    CHECK(c.failure.find("zero live load") != std::string::npos);
  }
  SUBCASE("non-optimal status is rejected") {
    SolveReport bad = r.report;
    bad.status = SolveStatus::numerical_trouble;
    CHECK(!check_certificate(p, bad).ok);
  }
}

TEST_CASE("finer friction grids never raise the multiplier") {
  // the angle set for n_alpha = 2k contains the one for k
  double prev = 1e300;
  for (int na : {2, 4, 8}) {
    const auto r = run_limit_analysis(small_spec(4, 8, na));
    REQUIRE(r.report.status == SolveStatus::optimal);
    CHECK(r.certificate.ok);
    CHECK(r.lambda() <= prev + 1e-7);
    prev = r.lambda();
  }
}

TEST_CASE("multiplier does not depend on the unit weight") {
  auto s = small_spec(4, 8, 4);
  const auto a = run_limit_analysis(s);
  s.gamma = 10.0;
  const auto b = run_limit_analysis(s);
  REQUIRE(a.report.status == SolveStatus::optimal);
  REQUIRE(b.report.status == SolveStatus::optimal);
  CHECK(std::abs(a.lambda() - b.lambda()) <= 1e-8);
  CHECK(b.certificate.ok);
}

TEST_CASE("repeated solves are identical") {
  const auto s = small_spec(4, 8, 4);
  const auto a = run_limit_analysis(s);
  const auto b = run_limit_analysis(s);
  CHECK(a.lambda() == b.lambda());
  CHECK(a.report.iterations == b.report.iterations);
  CHECK((a.report.x_hat - b.report.x_hat).norm() == 0.0);
}

TEST_CASE("unbounded optimal face without friction") {
  // stresses free of friction admit a self-equilibrated ray along the optimal
  // face at this thickness; the solve has to settle anyway
  auto s = small_spec(4, 8, 4);
  s.thickness_ratio = 0.12;
  s.friction_mode = FrictionMode::not_enforced;
  const auto r = run_limit_analysis(s);
  REQUIRE(r.report.status == SolveStatus::optimal);
  CHECK_MESSAGE(r.certificate.ok, r.certificate.failure);
  CHECK(r.lambda() == doctest::Approx(0.51113).epsilon(1e-4));
}

TEST_CASE("low friction makes the dome inadmissible") {
  auto s = small_spec(8, 16, 8);
  s.friction_coefficient = 0.3;
  const auto r = run_limit_analysis(s);
  CHECK(r.report.status == SolveStatus::infeasible);
  CHECK(r.unstable());
  CHECK(!r.certificate.ok);
  CHECK(!r.mechanism);
}

TEST_CASE("program export") {
  ConicProgram p;
  run_limit_analysis(small_spec(2, 4, 2), nullptr, &p);
  std::ostringstream os;
  export_program(os, p);
  std::istringstream is(os.str());
  std::string line, key;
  Index neq = 0, nvar = 0, ncone = 0;
  while (std::getline(is, line))
    if (line.rfind("dims", 0) == 0) {
      std::istringstream(line) >> key >> neq >> nvar >> ncone;
      break;
    }
  CHECK(neq == p.n_eq());
  CHECK(nvar == 9 * 15 + 1);
  CHECK(ncone == 15 * 4);

  Index lam = -1, nnz = 0;
  is >> key >> lam >> key >> nnz;
  CHECK(lam == 9 * 15);
  Index rows_seen = 0;
  for (Index k = 0; k < nnz; ++k) {
    Index i, j;
    double v;
    is >> i >> j >> v;
    CHECK(i < neq);
    CHECK(j < nvar);
    ++rows_seen;
  }
  CHECK(rows_seen == nnz);
  Index nrhs = 0;
  is >> key >> nrhs;
  CHECK(key == "rhs");
  CHECK(nrhs == neq);
  for (Index k = 0; k < nrhs; ++k) {
    double v;
    is >> v;
  }
  Index nfam = 0;
  is >> key >> nfam;
  CHECK(key == "families");
  CHECK(nfam == 4);
}
