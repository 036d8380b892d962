#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "domelimit/conic_solver.hpp"
#include "domelimit/meshing.hpp"

namespace dome {

enum class CrackKind { hinge_extrados, hinge_intrados, in_plane_shear, out_of_plane_shear };

const char* crack_kind_name(CrackKind k);

// Velocities are normalized so that the live load does unit power.
struct MechanismReport {
  Eigen::Matrix3Xd velocity;  // per element, translation of the origin
  Eigen::Matrix3Xd rotation;  // per element, rotation rate
  // Per-node flow magnitudes, dimensionless.  Extrados/intrados name the face
  // the center of pressure reaches when the hinge opens.
  Eigen::VectorXd hinge_extrados, hinge_intrados, in_plane, out_of_plane;
  double lambda = 0.0;
  double normalization = 0.0;   // |1 - u'f_live|
  double strong_duality = 0.0;  // |lambda + u'f_dead| / max(1, lambda)
  bool consistent = true;       // false if u is nonzero but every flow vanishes

  double max_flow() const;
  // Rigid image of point p under element e, amplitude a (exact rotation).
  Vector3d displaced(Index e, const Vector3d& p, double a) const;
};

struct CrackRecord {
  Index node;
  double phi, theta;
  CrackKind kind;
  double magnitude;
};

struct MechanismOptions {
  double identity_tol = 1e-6;
};

// Throws DomainError if the solve is not optimal or the normalization fails.
MechanismReport extract_mechanism(const ConicProgram& program, const SolveReport& report,
                                  const Mesh& mesh, const MechanismOptions& opts = {});

// Records sorted by node, then kind.  `threshold` is relative to the largest
// flow of any kind.
std::vector<CrackRecord> classify_cracks(const MechanismReport& mech, const Mesh& mesh,
                                         double threshold = 1e-4);

// Legacy ASCII unstructured grid: undeformed quads followed by the displaced
// (rigidly moved) element copies.
void export_mechanism_vtk(std::ostream& os, const MechanismReport& mech, const Mesh& mesh,
                          double amplitude);

void write_crack_table(std::ostream& os, const std::vector<CrackRecord>& cracks,
                       const std::string& header = {});

}  // namespace dome
