#include "domelimit/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Geometry>

namespace dome {

const char* crack_kind_name(CrackKind k) {
  switch (k) {
    case CrackKind::hinge_extrados: return "hinge_extrados";
    case CrackKind::hinge_intrados: return "hinge_intrados";
    case CrackKind::in_plane_shear: return "in_plane_shear";
    case CrackKind::out_of_plane_shear: return "out_of_plane_shear";
  }
  return "?";
}

double MechanismReport::max_flow() const {
  double m = 0.0;
  for (const auto* v : {&hinge_extrados, &hinge_intrados, &in_plane, &out_of_plane})
    if (v->size()) m = std::max(m, v->maxCoeff());
  return m;
}

Vector3d MechanismReport::displaced(Index e, const Vector3d& p, double a) const {
  const Vector3d w = rotation.col(e);
  const double angle = a * w.norm();
  if (angle == 0.0) return p + a * velocity.col(e);
  return Eigen::AngleAxisd(angle, w.normalized()) * p + a * velocity.col(e);
}

MechanismReport extract_mechanism(const ConicProgram& p, const SolveReport& rep,
                                  const Mesh& mesh, const MechanismOptions& opts) {
  if (rep.status != SolveStatus::optimal)
    throw DomainError(std::string("no mechanism: solve status ") + status_name(rep.status));
  const Index E = mesh.element_count();
  if (rep.u.size() != 6 * E || p.n_nodes != mesh.node_count())
    throw DomainError("no mechanism: report does not match the mesh");

  MechanismReport mech;
  mech.lambda = rep.lambda;
  mech.normalization = std::abs(1.0 - rep.u.dot(p.f_live));
  mech.strong_duality =
      std::abs(rep.lambda + rep.u.dot(p.f_dead)) / std::max(1.0, std::abs(rep.lambda));
  if (!(mech.normalization <= opts.identity_tol) || !(mech.strong_duality <= opts.identity_tol)) {
    std::ostringstream os;
    os << "no mechanism: |1 - u'f_live| = " << mech.normalization
       << ", |lambda + u'f_dead| = " << mech.strong_duality;
    throw DomainError(os.str());
  }

  mech.velocity.resize(3, E);
  mech.rotation.resize(3, E);
  for (Index e = 0; e < E; ++e) {
    mech.velocity.col(e) = rep.u.segment<3>(6 * e);
    mech.rotation.col(e) = rep.u.segment<3>(6 * e + 3);
  }

  const Index N = mesh.node_count();
  for (auto* v : {&mech.hinge_extrados, &mech.hinge_intrados, &mech.in_plane, &mech.out_of_plane})
    v->setZero(N);
  const auto nf = static_cast<Index>(p.cones.families.size());
  for (Index i = 0; i < p.n_cones(); ++i) {
    const auto& fam = p.cones.families[static_cast<std::size_t>(i % nf)];
    const Index node = p.cones.nodes[static_cast<std::size_t>(i / nf)];
    const Vector3d s = rep.flows.col(i);
    switch (fam.role) {
      case ConeRole::hinge_plus: mech.hinge_extrados(node) += s.norm(); break;
      case ConeRole::hinge_minus: mech.hinge_intrados(node) += s.norm(); break;
      case ConeRole::friction:
        mech.in_plane(node) += std::abs(s(1));
        mech.out_of_plane(node) += std::abs(s(2));
        break;
    }
  }
  mech.consistent = !(mech.max_flow() == 0.0 && rep.u.lpNorm<Eigen::Infinity>() > 0.0);
  return mech;
}

std::vector<CrackRecord> classify_cracks(const MechanismReport& mech, const Mesh& mesh,
                                         double threshold) {
  std::vector<CrackRecord> out;
  const double cut = threshold * mech.max_flow();
  if (!(cut > 0.0)) return out;
  const std::pair<CrackKind, const Eigen::VectorXd*> fields[] = {
      {CrackKind::hinge_extrados, &mech.hinge_extrados},
      {CrackKind::hinge_intrados, &mech.hinge_intrados},
      {CrackKind::in_plane_shear, &mech.in_plane},
      {CrackKind::out_of_plane_shear, &mech.out_of_plane},
  };
  for (Index k = 0; k < mesh.node_count(); ++k) {
    const auto& nd = mesh.nodes[static_cast<std::size_t>(k)];
    for (const auto& [kind, v] : fields)
      if ((*v)(k) > cut) out.push_back({k, nd.phi, nd.theta, kind, (*v)(k)});
  }
  return out;
}

void export_mechanism_vtk(std::ostream& os, const MechanismReport& mech, const Mesh& mesh,
                          double amplitude) {
  const Index N = mesh.node_count(), E = mesh.element_count();
  os.precision(12);
  os << "# vtk DataFile Version 3.0\n";
  os << "dome mechanism, amplitude " << amplitude << "\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << N + 4 * E << " double\n";
  for (const auto& nd : mesh.nodes) {
    const auto& x = nd.frame.position;
    os << x(0) << ' ' << x(1) << ' ' << x(2) << '\n';
  }
  for (Index e = 0; e < E; ++e)
    for (Index id : mesh.elements[static_cast<std::size_t>(e)].nodes) {
      const Vector3d x =
          mech.displaced(e, mesh.nodes[static_cast<std::size_t>(id)].frame.position, amplitude);
      os << x(0) << ' ' << x(1) << ' ' << x(2) << '\n';
    }

  os << "CELLS " << 2 * E << ' ' << 10 * E << '\n';
  for (const auto& el : mesh.elements)
    os << "4 " << el.nodes[0] << ' ' << el.nodes[1] << ' ' << el.nodes[2] << ' ' << el.nodes[3]
       << '\n';
  for (Index e = 0; e < E; ++e) {
    const Index b = N + 4 * e;
    os << "4 " << b << ' ' << b + 1 << ' ' << b + 2 << ' ' << b + 3 << '\n';
  }
  os << "CELL_TYPES " << 2 * E << '\n';
  for (Index e = 0; e < 2 * E; ++e) os << "9\n";

  os << "CELL_DATA " << 2 * E << '\n';
  os << "SCALARS part int 1\nLOOKUP_TABLE default\n";
  for (Index e = 0; e < 2 * E; ++e) os << (e < E ? 0 : 1) << '\n';

  // displaced corners carry the values of the node they came from
  auto field = [&](const char* name, const Eigen::VectorXd& v) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Index k = 0; k < N; ++k) os << v(k) << '\n';
    for (const auto& el : mesh.elements)
      for (Index id : el.nodes) os << v(id) << '\n';
  };
  os << "POINT_DATA " << N + 4 * E << '\n';
  field("hinge", mech.hinge_extrados + mech.hinge_intrados);
  field("in_plane_sliding", mech.in_plane);
  field("out_of_plane_sliding", mech.out_of_plane);
}

void write_crack_table(std::ostream& os, const std::vector<CrackRecord>& cracks,
                       const std::string& header) {
  os.precision(10);
  if (!header.empty()) os << header;
  os << "node,phi_deg,theta_deg,kind,magnitude\n";
  constexpr double deg = 180.0 / std::numbers::pi;
  for (const auto& c : cracks)
    os << c.node << ',' << c.phi * deg << ',' << c.theta * deg << ',' << crack_kind_name(c.kind)
       << ',' << c.magnitude << '\n';
}

}  // namespace dome
