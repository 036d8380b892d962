#include "domelimit/assembly.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "domelimit/quadrature.hpp"

namespace dome {

EdgeIntegrals EdgeIntegrals::zero() {
  EdgeIntegrals E;
  for (int r = 0; r < 2; ++r) {
    for (int a = 0; a < 2; ++a) {
      E.L[a][r].setZero();
      E.Lam[a][r].setZero();
    }
    E.Ln[r].setZero();
    E.Lamn[r].setZero();
  }
  E.length = 0.0;
  return E;
}

std::array<double, 2> rect_corner(const ParamRect& rect, int k) {
  switch (k & 3) {
    case 0: return {rect.phi1, rect.theta1};
    case 1: return {rect.phi2, rect.theta1};
    case 2: return {rect.phi2, rect.theta2};
    default: return {rect.phi1, rect.theta2};
  }
}

namespace {

struct EdgeMap {
  std::array<double, 2> p0, dp;  // p(v) = p0 + (v + 1) dp / 2

  double phi(double v) const { return p0[0] + 0.5 * (v + 1.0) * dp[0]; }
  double theta(double v) const { return p0[1] + 0.5 * (v + 1.0) * dp[1]; }
};

double edge_speed(const MeridianGeometry& g, const EdgeMap& em, double v) {
  const auto p = meridian_point<double>(g, em.phi(v));
  return std::hypot(0.5 * em.dp[0] * p.speed, 0.5 * em.dp[1] * p.r);
}

}  // namespace

EdgeIntegrals edge_integrals(const MeridianGeometry& g, const ParamRect& rect,
                             int edge, int order) {
  EdgeIntegrals E = EdgeIntegrals::zero();
  const auto a = rect_corner(rect, edge);
  const auto b = rect_corner(rect, edge + 1);
  const EdgeMap em{a, {b[0] - a[0], b[1] - a[1]}};
  const auto& q = gauss_legendre(order);
  const bool parallel = em.dp[0] == 0.0;

  std::vector<double> speed(order), s(order);
  double length = 0.0;
  for (int i = 0; i < order; ++i) {
    speed[i] = edge_speed(g, em, q.x[i]);
    length += q.w[i] * speed[i];
  }
  if (!(length > 0.0)) return E;
  for (int i = 0; i < order; ++i) {
    if (parallel) {
      s[i] = 0.5 * (q.x[i] + 1.0) * length;
      continue;
    }
    // arclength from v = -1 to x_i by a nested rule on [-1, x_i]
    const double half = 0.5 * (q.x[i] + 1.0);
    double acc = 0.0;
    for (int j = 0; j < order; ++j) {
      const double w = -1.0 + half * (q.x[j] + 1.0);
      acc += q.w[j] * edge_speed(g, em, w);
    }
    s[i] = half * acc;
  }

  for (int i = 0; i < order; ++i) {
    const auto f = meridian_frame<double>(g, em.phi(q.x[i]), em.theta(q.x[i]));
    const double w = q.w[i] * speed[i];
    const double l[2] = {1.0 - s[i] / length, s[i] / length};
    const Vector3d basis[2] = {f.t_phi, f.e_theta};
    for (int r = 0; r < 2; ++r) {
      for (int al = 0; al < 2; ++al) {
        E.L[al][r] += w * l[r] * basis[al];
        E.Lam[al][r] += w * l[r] * f.position.cross(basis[al]);
      }
      E.Ln[r] += w * l[r] * f.n;
      E.Lamn[r] += w * l[r] * f.position.cross(f.n);
    }
  }
  E.length = length;
  return E;
}

ElementOperators element_operators(const std::array<EdgeIntegrals, 4>& E) {
  // Edges and basis indices are 1-based below, as in the block layout.
  auto L = [&](int i, int a, int r) -> const Vector3d& { return E[i - 1].L[a - 1][r - 1]; };
  auto Ln = [&](int i, int r) -> const Vector3d& { return E[i - 1].Ln[r - 1]; };
  auto Lm = [&](int i, int a, int r) -> const Vector3d& { return E[i - 1].Lam[a - 1][r - 1]; };
  auto Lmn = [&](int i, int r) -> const Vector3d& { return E[i - 1].Lamn[r - 1]; };

  ElementOperators op;
  auto& Bt = op.Bt;
  auto& Br = op.Br;
  auto col = [](int node, int comp) { return 9 * (node - 1) + comp; };

  // node 1
  Bt.col(col(1, 0)) = -L(4, 1, 2);
  Bt.col(col(1, 1)) = -L(4, 2, 2);
  Bt.col(col(1, 2)) = -L(1, 1, 1);
  Bt.col(col(1, 3)) = -L(1, 2, 1);
  Bt.col(col(1, 4)) = -Ln(4, 2);
  Bt.col(col(1, 5)) = -Ln(1, 1);
  // node 2
  Bt.col(col(2, 0)) = L(2, 1, 1);
  Bt.col(col(2, 1)) = L(2, 2, 1);
  Bt.col(col(2, 2)) = -L(1, 1, 2);
  Bt.col(col(2, 3)) = -L(1, 2, 2);
  Bt.col(col(2, 4)) = Ln(2, 1);
  Bt.col(col(2, 5)) = -Ln(1, 2);
  // node 3
  Bt.col(col(3, 0)) = L(2, 1, 2);
  Bt.col(col(3, 1)) = L(2, 2, 2);
  Bt.col(col(3, 2)) = L(3, 1, 1);
  Bt.col(col(3, 3)) = L(3, 2, 1);
  Bt.col(col(3, 4)) = Ln(2, 2);
  Bt.col(col(3, 5)) = Ln(3, 1);
  // node 4
  Bt.col(col(4, 0)) = -L(4, 1, 1);
  Bt.col(col(4, 1)) = -L(4, 2, 1);
  Bt.col(col(4, 2)) = L(3, 1, 2);
  Bt.col(col(4, 3)) = L(3, 2, 2);
  Bt.col(col(4, 4)) = -Ln(4, 1);
  Bt.col(col(4, 5)) = Ln(3, 2);

  Br.col(col(1, 0)) = -Lm(4, 1, 2);
  Br.col(col(1, 1)) = -Lm(4, 2, 2);
  Br.col(col(1, 2)) = -Lm(1, 1, 1);
  Br.col(col(1, 3)) = -Lm(1, 2, 1);
  Br.col(col(1, 4)) = -Lmn(4, 2);
  Br.col(col(1, 5)) = -Lmn(1, 1);
  Br.col(col(1, 6)) = -L(4, 2, 2);
  Br.col(col(1, 7)) = -L(1, 2, 1) + L(4, 1, 2);
  Br.col(col(1, 8)) = L(1, 1, 1);

  Br.col(col(2, 0)) = Lm(2, 1, 1);
  Br.col(col(2, 1)) = Lm(2, 2, 1);
  Br.col(col(2, 2)) = -Lm(1, 1, 2);
  Br.col(col(2, 3)) = -Lm(1, 2, 2);
  Br.col(col(2, 4)) = Lmn(2, 1);
  Br.col(col(2, 5)) = -Lmn(1, 2);
  Br.col(col(2, 6)) = L(2, 2, 1);
  Br.col(col(2, 7)) = -L(1, 2, 2) - L(2, 1, 1);
  Br.col(col(2, 8)) = L(1, 1, 2);

  Br.col(col(3, 0)) = Lm(2, 1, 2);
  Br.col(col(3, 1)) = Lm(2, 2, 2);
  Br.col(col(3, 2)) = Lm(3, 1, 1);
  Br.col(col(3, 3)) = Lm(3, 2, 1);
  Br.col(col(3, 4)) = Lmn(2, 2);
  Br.col(col(3, 5)) = Lmn(3, 1);
  Br.col(col(3, 6)) = L(2, 2, 2);
  Br.col(col(3, 7)) = L(3, 2, 1) - L(2, 1, 2);
  Br.col(col(3, 8)) = -L(3, 1, 1);

  Br.col(col(4, 0)) = -Lm(4, 1, 1);
  Br.col(col(4, 1)) = -Lm(4, 2, 1);
  Br.col(col(4, 2)) = Lm(3, 1, 2);
  Br.col(col(4, 3)) = Lm(3, 2, 2);
  Br.col(col(4, 4)) = -Lmn(4, 1);
  Br.col(col(4, 5)) = Lmn(3, 2);
  Br.col(col(4, 6)) = -L(4, 2, 1);
  Br.col(col(4, 7)) = L(3, 2, 2) + L(4, 1, 1);
  Br.col(col(4, 8)) = -L(3, 1, 2);
  return op;
}

ElementOperators element_operators(const MeridianGeometry& g,
                                   const ParamRect& rect, int order) {
  std::array<EdgeIntegrals, 4> E;
  for (int k = 0; k < 4; ++k) E[k] = edge_integrals(g, rect, k, order);
  return element_operators(E);
}

ElementOperators edge_operator(const MeridianGeometry& g, const ParamRect& rect,
                               int edge, int order) {
  std::array<EdgeIntegrals, 4> E;
  for (int k = 0; k < 4; ++k)
    E[k] = k == edge ? edge_integrals(g, rect, k, order) : EdgeIntegrals::zero();
  return element_operators(E);
}

SparseMatrix StructuralSystem::bc_matrix() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(bc.size());
  for (std::size_t i = 0; i < bc.size(); ++i)
    trip.emplace_back(static_cast<int>(i),
                      static_cast<int>(bc[i].node * kStressComponents + bc[i].component),
                      1.0);
  SparseMatrix C(static_cast<Index>(bc.size()), B.cols());
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

std::vector<BoundaryConstraint> boundary_constraints(const Mesh& mesh) {
  static constexpr int symmetry[] = {kNthetaphi, kNphitheta, kTtheta, kMphitheta};
  static constexpr int free_ring[] = {kNphi, kNthetaphi, kTphi, kMphi, kMphitheta};
  std::vector<BoundaryConstraint> bc;
  for (Index k = 0; k < mesh.node_count(); ++k) {
    const auto& node = mesh.nodes[k];
    if (node.has(kSymmetryEdge) && mesh.model != ModelKind::half)
      throw AssemblyError("symmetry tag on a full-model mesh at node " +
                          std::to_string(k));
    if (node.has(kApex) && node.has(kFreeRing))
      throw AssemblyError("node " + std::to_string(k) +
                          " tagged both apex and free ring");
    // a pinned component appears once even if two tags request it
    bool pinned[kStressComponents] = {};
    if (node.has(kSymmetryEdge))
      for (int c : symmetry) pinned[c] = true;
    if (node.has(kFreeRing))
      for (int c : free_ring) pinned[c] = true;
    for (int c = 0; c < kStressComponents; ++c)
      if (pinned[c]) bc.push_back({k, c});
  }
  return bc;
}

StructuralSystem assemble_structural(const Mesh& mesh, const MeridianGeometry& g,
                                     const LoadCase& load,
                                     const AssemblyOptions& opts) {
  load.validate();
  if (mesh.model == ModelKind::half && std::abs(load.live_dir.y()) > 1e-12)
    throw AssemblyError("half model requires the live direction in the xz-plane");

  const Index E = mesh.element_count();
  const Index N = mesh.node_count();
  StructuralSystem sys;
  sys.f_dead.setZero(6 * E);
  sys.f_live.setZero(6 * E);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(E) * 6 * 36);
  for (Index e = 0; e < E; ++e) {
    const auto& el = mesh.elements[e];
    const auto op = element_operators(g, el.rect, opts.edge_order);
    const auto res = element_load_resultants(g, load, el.rect, opts.load_order);
    for (int a = 0; a < 4; ++a) {
      for (int c = 0; c < kStressComponents; ++c) {
        const int lc = 9 * a + c;
        const int gc = static_cast<int>(el.nodes[a] * kStressComponents + c);
        for (int r = 0; r < 3; ++r) {
          if (op.Bt(r, lc) != 0.0)
            trip.emplace_back(static_cast<int>(6 * e + r), gc, op.Bt(r, lc));
          if (op.Br(r, lc) != 0.0)
            trip.emplace_back(static_cast<int>(6 * e + 3 + r), gc, op.Br(r, lc));
        }
      }
    }
    sys.f_dead.segment<3>(6 * e) = res.f_d;
    sys.f_dead.segment<3>(6 * e + 3) = res.c_d;
    sys.f_live.segment<3>(6 * e) = res.f_l;
    sys.f_live.segment<3>(6 * e + 3) = res.c_l;
  }
  sys.B.resize(6 * E, kStressComponents * N);
  sys.B.setFromTriplets(trip.begin(), trip.end());
  sys.bc = boundary_constraints(mesh);
  return sys;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace dome
