// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "domelimit/studies.hpp"

using namespace dome;
using std::numbers::pi;

namespace {

constexpr double kDeg = pi / 180.0;

int failures = 0;
std::map<int, bool> verdicts;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  verdicts[id] = ok;
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StudySpec dome_spec(double t, int m = 32, int na = 32) {
  StudySpec s;
  s.thickness_ratio = t;
  s.mesh_m = m;
  s.mesh_n = 2 * m;
  s.n_alpha = na;
  return s;
}

struct Run {
  LimitResult result;
  Mesh mesh;
  double seconds = 0.0;
};

// every optimal solve outside the grid, for the certificate criterion
std::vector<std::pair<std::string, CertificateDiagnostics>> certified_runs;

Run run(const std::string& label, const StudySpec& s) {
  Run r;
  const auto t0 = std::chrono::steady_clock::now();
  r.result = run_limit_analysis(s, &r.mesh);
  r.seconds = seconds_since(t0);
  std::printf("  %-28s %-18s lambda %.7f  %5.1f s  %d it\n", label.c_str(),
              status_name(r.result.report.status), r.result.lambda(), r.seconds,
              r.result.report.iterations);
  if (r.result.report.status == SolveStatus::optimal)
    certified_runs.emplace_back(label, r.result.certificate);
  return r;
}

bool optimal(const Run& r) { return r.result.report.status == SolveStatus::optimal; }

// Crack records summed per parallel (row of nodes with equal phi).
std::map<double, double> row_flow(const std::vector<CrackRecord>& cracks, CrackKind kind) {
  std::map<double, double> rows;
  for (const auto& c : cracks)
    if (c.kind == kind) rows[std::round(c.phi / kDeg * 1e6) / 1e6] += c.magnitude;
  return rows;
}

double total(const std::map<double, double>& rows) {
  double s = 0.0;
  for (const auto& [phi, v] : rows) s += v;
  return s;
}

std::pair<double, double> peak(const std::map<double, double>& rows) {
  std::pair<double, double> best{0.0, -1.0};
  for (const auto& [phi, v] : rows)
    if (v > best.second) best = {phi, v};
  return best;
}

double flow_of(const std::vector<CrackRecord>& cracks, auto pred) {
  double s = 0.0;
  for (const auto& c : cracks)
    if (pred(c)) s += c.magnitude;
  return s;
}

bool is_hinge(const CrackRecord& c) {
  return c.kind == CrackKind::hinge_extrados || c.kind == CrackKind::hinge_intrados;
}

// 1: validation multipliers
void validation(const Run& r10, const Run& r20) {
  bool ok = true;
  std::string d;
  for (const auto& [r, target] : {std::pair{&r10, 0.176}, std::pair{&r20, 0.405}}) {
    ok = ok && optimal(*r) && std::abs(r->result.lambda() - target) <= 0.005 && r->seconds <= 60.0;
    d += fmt("lambda %.4f (%.3f) %.1f s; ", r->result.lambda(), target, r->seconds);
  }
  report(1, ok, d);
}

// 2 and 3: the convergence grid
void grid(int jobs) {
  const std::vector<std::array<int, 2>> meshes{{4, 8}, {8, 16}, {16, 32}, {32, 64}, {64, 128}};
  const std::vector<int> nas{2, 4, 8, 16, 32, 64};
  const double reference[5][6] = {{0.269, 0.213, 0.189, 0.183, 0.181, 0.181},
                                {0.240, 0.190, 0.171, 0.166, 0.164, 0.164},
                                {0.246, 0.194, 0.180, 0.174, 0.172, 0.172},
                                {0.249, 0.197, 0.184, 0.178, 0.176, 0.176},
                                {0.250, 0.198, 0.185, 0.179, 0.177, 0.176}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = convergence_study(dome_spec(0.1), meshes, nas, jobs);
  const double wall = seconds_since(t0);

  int within = 0, certified = 0, optimal_cells = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const double want = reference[i / nas.size()][i % nas.size()];
    const double err = c.status == SolveStatus::optimal ? std::abs(c.lambda - want) : 1.0;
    worst = std::max(worst, err);
    within += err <= 0.005;
    optimal_cells += c.status == SolveStatus::optimal;
    certified += c.status == SolveStatus::optimal && c.certified;
    std::printf("  %3dx%-3d n_alpha %2d  %-18s lambda %.6f  ref %.3f  diff %+.4f  %6.1f s\n",
                c.m, c.n, c.n_alpha, status_name(c.status), c.lambda, want, c.lambda - want,
                c.seconds);
  }
  report(2, within == 30 && wall <= 900.0,
         fmt("%d/30 cells within 0.005, worst %.4f, grid %.0f s", within, worst, wall));

  const auto v = monotonicity_violations(cells);
  std::string d = fmt("%d rows checked", static_cast<int>(meshes.size()));
  for (const auto& s : v) d += "; " + s;
  report(3, v.empty() && optimal_cells == 30, d);

  if (certified != optimal_cells)
    certified_runs.emplace_back("grid", CertificateDiagnostics{.ok = false, .failure = "grid cell"});
  std::printf("  grid: %d/%d optimal cells certified\n", certified, optimal_cells);
}

// 4: dead-load resultant against the shell weight
void statics() {
  const auto s = dome_spec(0.1);
  const auto g = s.geometry();
  const auto mesh = build_mesh(g, s.mesh_m, s.mesh_n, s.model);
  const auto sys = assemble_structural(mesh, g, s.load_case(), s.quadrature);
  Vector3d f = Vector3d::Zero();
  for (Index e = 0; e < mesh.element_count(); ++e) f += sys.f_dead.segment<3>(6 * e);
  const double R = s.radius, t = s.thickness_ratio * R;
  const double V = s.gamma * 2 * pi * (1 - std::cos(s.half_embrace_deg * kDeg)) *
                   (R * R * t + t * t * t / 12);
  const double weight = -2 * f.z();
  const double rel = std::abs(weight - V) / V;
  report(4, rel <= 1e-8 && std::abs(f.y()) <= 1e-12 * V,
         fmt("2 sum f_dead,z = %.12f, V = %.12f, rel %.1e", weight, V, rel));
}

// 6: cone matrices against the mechanical conditions evaluated directly
void cone_equivalence() {
  std::mt19937 rng(7);
  std::normal_distribution<double> G(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int samples = 10000;
  int mismatch = 0, near = 0, inside = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = 0.05 + 0.3 * U(rng), mu = 0.2 + U(rng);
    Eigen::Matrix<double, 9, 1> x;
    for (int k = 0; k < 9; ++k) x[k] = G(rng);
    x[kNphi] -= 1.5;
    x[kNtheta] -= 1.5;
    for (int k : {kMphi, kMphitheta, kMtheta}) x[k] *= 0.3 * t;
    x[kTphi] *= 0.4;
    x[kTtheta] *= 0.4;

    Eigen::Matrix2d N, M;
    const double ns = 0.5 * (x[kNthetaphi] + x[kNphitheta]);
    N << x[kNphi], ns, ns, x[kNtheta];
    M << x[kMphi], x[kMphitheta], x[kMphitheta], x[kMtheta];
    const auto um = unilateral_matrices(t);
    for (int sign : {+1, -1}) {
      const Eigen::Matrix2d S = sign * M - 0.5 * t * N;
      const double direct = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(S).eigenvalues()[0];
      const Vector3d xi = (sign > 0 ? um.A_plus : um.A_minus) * x;
      const double cone = cone_margin<double>(ConeKind::rotated, xi);
      if (std::abs(direct) < 1e-13 * S.norm()) {
        ++near;
        continue;
      }
      mismatch += (cone >= 0.0) != (direct >= 0.0);
      inside += direct >= 0.0;
    }

    const double a = pi * U(rng), c = std::cos(a), sn = std::sin(a);
    const double tx = c * x[kNphi] + sn * x[kNphitheta], ty = c * x[kNthetaphi] + sn * x[kNtheta];
    const double sigma = c * tx + sn * ty, tau_in = -sn * tx + c * ty;
    const double tau_out = c * x[kTphi] + sn * x[kTtheta];
    const double direct = -mu * sigma - std::hypot(tau_in, tau_out);
    const Vector3d xi = friction_matrix<double>(mu, a) * x;
    const double cone = cone_margin<double>(ConeKind::standard, xi);
    if (std::abs(direct) < 1e-13 * x.head<6>().norm()) {
      ++near;
      continue;
    }
    mismatch += (cone >= 0.0) != (direct >= 0.0);
  }
  report(6, mismatch == 0 && inside > samples / 10 && inside < 2 * samples - samples / 10,
         fmt("%d samples, %d mismatches, %d on the boundary, %d/%d unilateral inside", samples,
             mismatch, near, inside, 2 * samples));
}

// 7: full vs half model
void symmetry(const Run& h10, const Run& h20) {
  bool ok = true;
  std::string d;
  for (const auto& [h, t] : {std::pair{&h10, 0.1}, std::pair{&h20, 0.2}}) {
    auto s = dome_spec(t);
    s.model = ModelKind::full;
    const auto f = run(fmt("full t=%.1f", t), s);
    const double diff = std::abs(f.result.lambda() - h->result.lambda());
    ok = ok && optimal(f) && optimal(*h) && diff <= 2e-3;
    d += fmt("t=%.1f full %.6f half %.6f; ", t, f.result.lambda(), h->result.lambda());
  }
  report(7, ok, d);
}

// 8: qualitative crack patterns
void patterns(const Run& r10, const Run& r20) {
  if (!optimal(r10) || !optimal(r20) || !r10.result.mechanism || !r20.result.mechanism) {
    report(8, false, "no mechanism");
    return;
  }
  const auto& c10 = r10.result.cracks;
  const auto& c20 = r20.result.cracks;
  const double base = dome_spec(0.1).half_embrace_deg;
  auto all = [](const CrackRecord&) { return true; };

  // t/R = 0.1: intrados ring in the haunch, extrados rings near the crown
  // and at the base, lateral in-plane sliding
  const auto intr = row_flow(c10, CrackKind::hinge_intrados);
  const auto extr = row_flow(c10, CrackKind::hinge_extrados);
  const auto [phi_int, int_peak] = peak(intr);
  const double int_share = int_peak / total(intr);
  const double base_share = (extr.count(base) ? extr.at(base) : 0.0) / total(extr);
  std::map<double, double> upper;
  for (const auto& [phi, v] : extr)
    if (phi < phi_int) upper[phi] = v;
  const auto [phi_top, top_peak] = peak(upper);
  const double upper_share = total(upper) / total(extr);
  const double in_plane = flow_of(c10, [](const CrackRecord& c) {
    return c.kind == CrackKind::in_plane_shear;
  });
  const double lateral = flow_of(c10, [](const CrackRecord& c) {
    return c.kind == CrackKind::in_plane_shear && c.theta >= 20 * kDeg && c.theta <= 160 * kDeg;
  });
  const double all10 = flow_of(c10, all);
  const double hinge10 = flow_of(c10, is_hinge) / all10;
  const bool ok10 = phi_int >= 30 && phi_int <= 80 && int_share >= 0.5 && base_share >= 0.3 &&
                    !upper.empty() && phi_top < 30 && upper_share >= 0.15 && phi_top < phi_int &&
                    phi_int < base && lateral >= 0.5 * in_plane && in_plane >= 0.2 * all10 &&
                    hinge10 > 0.3;

  // t/R = 0.2: sliding at the base, hinges negligible
  const auto top = std::max_element(c20.begin(), c20.end(), [](const auto& a, const auto& b) {
    return a.magnitude < b.magnitude;
  });
  const bool base_slide = top != c20.end() && top->kind == CrackKind::out_of_plane_shear &&
                          std::abs(top->phi / kDeg - base) < 1e-9;
  const double all20 = flow_of(c20, all);
  const double out20 = flow_of(c20, [&](const CrackRecord& c) {
                         return c.kind == CrackKind::out_of_plane_shear &&
                                std::abs(c.phi / kDeg - base) < 1e-9;
                       }) / all20;
  const double hinge20 = flow_of(c20, is_hinge) / all20;
  const bool ok20 = base_slide && hinge20 < 0.15;

  report(8, ok10 && ok20,
         fmt("t=0.1: intrados ring %.1f deg (%.2f), extrados crown band peak %.1f deg (%.2f), "
             "base extrados %.2f, in-plane %.2f of flow (%.2f lateral), hinges %.2f; "
             "t=0.2: largest record %s at %.1f deg, base sliding %.2f, hinges %.2f",
             phi_int, int_share, phi_top, upper_share, base_share, in_plane / all10,
             lateral / in_plane, hinge10, top == c20.end() ? "none" : crack_kind_name(top->kind),
             top == c20.end() ? 0.0 : top->phi / kDeg, out20, hinge20));
}

// 9: friction-mode ordering
void friction_modes(const Run& coulomb) {
  double lam[4] = {coulomb.result.lambda(), 0, 0, 0};
  bool ok = optimal(coulomb);
  const FrictionMode modes[] = {FrictionMode::in_plane_only, FrictionMode::out_of_plane_only,
                                FrictionMode::not_enforced};
  for (int k = 0; k < 3; ++k) {
    auto s = dome_spec(0.1);
    s.friction_mode = modes[k];
    const auto r = run(friction_mode_name(modes[k]), s);
    ok = ok && optimal(r);
    lam[k + 1] = r.result.lambda();
  }
  const double mid = std::min(lam[1], lam[2]);
  ok = ok && lam[0] <= mid + 1e-6 && mid <= lam[3] + 1e-6;
  report(9, ok,
         fmt("coulomb %.6f, in_plane_only %.6f, out_of_plane_only %.6f, not_enforced %.6f", lam[0],
             lam[1], lam[2], lam[3]));
}

// 10: unit weight and size
void scale_invariance(const Run& ref) {
  auto s = dome_spec(0.1);
  s.gamma = 10.0;
  const auto a = run("gamma x10", s);
  s = dome_spec(0.1);
  s.radius = 2.5;
  const auto b = run("R x2.5", s);
  const double l = ref.result.lambda();
  const double da = std::abs(a.result.lambda() - l), db = std::abs(b.result.lambda() - l);
  report(10, optimal(ref) && optimal(a) && optimal(b) && da <= 1e-8 && db <= 1e-8,
         fmt("|d lambda| %.1e (gamma), %.1e (R)", da, db));
}

// 5: certificates on every optimal solve
void certificates() {
  int bad = 0;
  std::string d;
  for (const auto& [label, c] : certified_runs)
    if (!c.ok) {
      ++bad;
      d += "; " + label + ": " + c.failure;
    }
  report(5, bad == 0, fmt("%d solve sets checked, %d failed", static_cast<int>(certified_runs.size()), bad) + d);
}

}  // namespace

int main() {
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const auto h10 = run("half t=0.1", dome_spec(0.1));
  const auto h20 = run("half t=0.2", dome_spec(0.2));
  validation(h10, h20);
  statics();
  cone_equivalence();
  symmetry(h10, h20);
  patterns(h10, h20);
  friction_modes(h10);
  scale_invariance(h10);
  grid(jobs);
  certificates();

  std::printf("\nsummary\n");
  for (const auto& [id, ok] : verdicts) std::printf("criterion %2d: %s\n", id, ok ? "PASS" : "FAIL");
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
