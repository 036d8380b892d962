#include "domelimit/studies.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace dome {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void StudySpec::validate() const {
  require(radius > 0.0 && std::isfinite(radius), "radius must be positive");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  require(thickness_ratio > 0.0 && thickness_ratio < 1.0, "thickness_ratio must lie in (0, 1)");
  require(half_embrace_deg > 0.0 && half_embrace_deg <= 180.0,
          "half_embrace_deg must lie in (0, 180]");
  require(oculus_deg >= 0.0 && oculus_deg < half_embrace_deg,
          "oculus_deg must lie in [0, half_embrace_deg)");
  require(rise_ratio > 0.0 && std::isfinite(rise_ratio), "rise_ratio must be positive");
  if (shape == MeridianKind::tabulated) {
    require(table_r.size() == table_z.size() && table_r.size() >= 3,
            "tabulated meridian needs matching r and z arrays with at least 3 samples");
  }
  if (friction_mode != FrictionMode::not_enforced) {
    require(friction_coefficient > 0.0 && std::isfinite(friction_coefficient),
            "friction_coefficient must be positive");
    require(n_alpha >= 2, "n_alpha must be >= 2");
  }
  require(mesh_m >= 1, "mesh_m must be >= 1");
  require(mesh_n >= (model == ModelKind::full ? 3 : 2), "mesh_n too small for the model");
  const double dn = std::hypot(live_direction[0], live_direction[1], live_direction[2]);
  require(dn > 0.0 && std::isfinite(dn), "live_direction must be a nonzero vector");
  require(live_direction[2] == 0.0, "live_direction must be horizontal (z = 0)");
  require(model == ModelKind::full || live_direction[1] == 0.0,
          "half model needs a live direction in the symmetry plane (y = 0)");
  require(solver.feastol > 0.0 && solver.abstol > 0.0 && solver.reltol > 0.0,
          "solver tolerances must be positive");
  require(solver.max_iter >= 1, "max_iter must be >= 1");
  require(solver.regularization > 0.0, "regularization must be positive");
  require(solver.refine_steps >= 0, "refine_steps must be >= 0");
  require(certificate.equality > 0.0 && certificate.dual_equality > 0.0 &&
              certificate.strong_duality > 0.0 && certificate.normalization > 0.0,
          "certificate tolerances must be positive");
  require(certificate.cone_margin <= 0.0, "certificate cone margin must be <= 0");
  require(quadrature.edge_order >= 1 && quadrature.edge_order <= 64 &&
              quadrature.load_order >= 1 && quadrature.load_order <= 64,
          "quadrature orders must lie in [1, 64]");
  require(crack_threshold > 0.0 && crack_threshold < 1.0, "crack_threshold must lie in (0, 1)");
  geometry().validate();
}

MeridianGeometry StudySpec::geometry() const {
  const double fin = half_embrace_deg * kDeg, in = oculus_deg * kDeg;
  switch (shape) {
    case MeridianKind::sphere: return MeridianGeometry::sphere(radius, fin, in);
    case MeridianKind::ellipsoid:
      return MeridianGeometry::ellipsoid(radius, rise_ratio * radius, fin, in);
    case MeridianKind::tabulated: {
      std::vector<double> r(table_r), z(table_z);
      for (auto& v : r) v *= radius;
      for (auto& v : z) v *= radius;
      return MeridianGeometry::tabulated(std::move(r), std::move(z), in, fin);
    }
  }
  throw ConfigError("unknown shape");
}

LoadCase StudySpec::load_case() const {
  LoadCase lc;
  lc.gamma = gamma;
  lc.thickness = thickness_ratio * radius;
  lc.live_dir = Vector3d(live_direction[0], live_direction[1], live_direction[2]).normalized();
  return lc;
}

ProgramUnits StudySpec::units() const {
  const double span = model == ModelKind::full ? 2 * std::numbers::pi : std::numbers::pi;
  const double dphi = (half_embrace_deg - oculus_deg) * kDeg / mesh_m;
  return {gamma, radius, thickness_ratio * radius, std::sqrt(dphi * span / mesh_n)};
}

bool LimitResult::unstable() const {
  return report.status == SolveStatus::infeasible ||
         (report.status == SolveStatus::optimal && !(report.lambda > 0.0));
}

LimitResult run_limit_analysis(const StudySpec& spec, Mesh* mesh_out, ConicProgram* program_out) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const MeridianGeometry g = spec.geometry();
  Mesh mesh = build_mesh(g, spec.mesh_m, spec.mesh_n, spec.model);
  const LoadCase lc = spec.load_case();
  const StructuralSystem sys = assemble_structural(mesh, g, lc, spec.quadrature);
  ConeConstraints cones = build_cone_constraints(mesh, lc.thickness, spec.friction_coefficient,
                                                 spec.n_alpha, spec.friction_mode);
  ConicProgram program = build_program(sys, std::move(cones), spec.units());

  LimitResult res;
  res.assembly_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.report = solve(program, spec.solver);
  res.certificate = check_certificate(program, res.report, spec.certificate);
  if (res.report.status == SolveStatus::optimal) {
    try {
      res.mechanism = extract_mechanism(program, res.report, mesh);
      res.cracks = classify_cracks(*res.mechanism, mesh, spec.crack_threshold);
    } catch (const DomainError& e) {
      res.mechanism_error = e.what();
    }
  }
  if (mesh_out) *mesh_out = std::move(mesh);
  if (program_out) *program_out = std::move(program);
  return res;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto worker = [&] {
    for (int i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::min(jobs, n); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<ConvergenceCell> convergence_study(const StudySpec& base,
                                               const std::vector<std::array<int, 2>>& meshes,
                                               const std::vector<int>& n_alphas, int jobs) {
  if (meshes.empty() || n_alphas.empty()) throw ConfigError("convergence grid is empty");
  std::vector<StudySpec> specs;
  for (const auto& mn : meshes)
    for (int na : n_alphas) {
      StudySpec s = base;
      s.mesh_m = mn[0];
      s.mesh_n = mn[1];
      s.n_alpha = na;
      s.validate();
      specs.push_back(s);
    }
  std::vector<ConvergenceCell> cells(specs.size());
  parallel_for(static_cast<int>(specs.size()), jobs, [&](int i) {
    const auto& s = specs[static_cast<std::size_t>(i)];
    const auto t0 = std::chrono::steady_clock::now();
    const LimitResult r = run_limit_analysis(s);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    cells[static_cast<std::size_t>(i)] = {s.mesh_m,          s.mesh_n,
                                          s.n_alpha,         r.report.status,
                                          r.report.lambda,   r.report.iterations,
                                          sec,               r.certificate.ok};
  });
  return cells;
}

std::vector<std::string> monotonicity_violations(const std::vector<ConvergenceCell>& cells,
                                                 double slack) {
  std::map<std::pair<int, int>, std::vector<const ConvergenceCell*>> rows;
  for (const auto& c : cells)
    if (c.status == SolveStatus::optimal) rows[{c.m, c.n}].push_back(&c);
  std::vector<std::string> out;
  for (auto& [mn, row] : rows) {
    std::sort(row.begin(), row.end(),
              [](auto* a, auto* b) { return a->n_alpha < b->n_alpha; });
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k]->lambda > row[k - 1]->lambda + slack) {
        std::ostringstream os;
        os << mn.first << 'x' << mn.second << ": lambda(" << row[k]->n_alpha
           << ") = " << row[k]->lambda << " > lambda(" << row[k - 1]->n_alpha
           << ") = " << row[k - 1]->lambda;
        out.push_back(os.str());
      }
  }
  return out;
}

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::thickness_ratio: return "thickness_ratio";
    case SweepVariable::half_embrace_deg: return "half_embrace_deg";
    case SweepVariable::friction_coefficient: return "friction_coefficient";
    case SweepVariable::rise_ratio: return "rise_ratio";
  }
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& s) {
  for (auto v : {SweepVariable::thickness_ratio, SweepVariable::half_embrace_deg,
                 SweepVariable::friction_coefficient, SweepVariable::rise_ratio})
    if (s == sweep_variable_name(v)) return v;
  throw ConfigError("unknown sweep variable '" + s + "'");
}

void set_sweep_variable(StudySpec& spec, SweepVariable v, double value) {
  switch (v) {
    case SweepVariable::thickness_ratio: spec.thickness_ratio = value; break;
    case SweepVariable::half_embrace_deg: spec.half_embrace_deg = value; break;
    case SweepVariable::friction_coefficient: spec.friction_coefficient = value; break;
    case SweepVariable::rise_ratio: spec.rise_ratio = value; break;
  }
}

std::vector<SweepPoint> parametric_sweep(const StudySpec& base, SweepVariable var,
                                         const std::vector<double>& values,
                                         const std::vector<FrictionMode>& modes, int jobs) {
  if (values.empty() || modes.empty()) throw ConfigError("sweep grid is empty");
  if (var == SweepVariable::rise_ratio && base.shape != MeridianKind::ellipsoid)
    throw ConfigError("rise_ratio sweeps need the ellipsoid shape");
  std::vector<StudySpec> specs;
  for (auto mode : modes)
    for (double v : values) {
      StudySpec s = base;
      s.friction_mode = mode;
      set_sweep_variable(s, var, v);
      s.validate();
      specs.push_back(s);
    }
  std::vector<SweepPoint> pts(specs.size());
  parallel_for(static_cast<int>(specs.size()), jobs, [&](int i) {
    const auto& s = specs[static_cast<std::size_t>(i)];
    const LimitResult r = run_limit_analysis(s);
    pts[static_cast<std::size_t>(i)] = {values[static_cast<std::size_t>(i) % values.size()],
                                        s.friction_mode,
                                        r.report.status,
                                        r.report.lambda,
                                        r.unstable(),
                                        r.certificate.ok};
  });
  return pts;
}

ThicknessSearch min_thickness_search(const StudySpec& base, double lo, double hi, double tol) {
  if (!(lo > 0.0 && hi > lo && hi < 1.0)) throw ConfigError("invalid thickness bracket");
  if (!(tol > 0.0)) throw ConfigError("thickness tolerance must be positive");
  ThicknessSearch out{hi, lo, 0.0, 0};
  auto probe = [&](double t, double* lambda) {
    StudySpec s = base;
    s.thickness_ratio = t;
    const LimitResult r = run_limit_analysis(s);
    ++out.solves;
    if (r.report.status == SolveStatus::numerical_trouble ||
        r.report.status == SolveStatus::unbounded) {
      std::ostringstream os;
      os << "solver returned " << status_name(r.report.status) << " at t/R = " << t;
      throw DomainError(os.str());
    }
    if (lambda) *lambda = r.report.lambda;
    return !r.unstable();
  };
  if (probe(lo, nullptr)) throw ConfigError("invalid bracket: lower thickness is stable");
  if (!probe(hi, &out.lambda)) throw ConfigError("invalid bracket: upper thickness is unstable");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    double l = 0.0;
    if (probe(mid, &l)) {
      hi = mid;
      out.lambda = l;
    } else {
      lo = mid;
    }
  }
  out.thickness_ratio = hi;
  out.lower = lo;
  return out;
}

}  // namespace dome
