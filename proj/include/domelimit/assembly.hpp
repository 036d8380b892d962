#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "domelimit/loads.hpp"
#include "domelimit/meshing.hpp"

namespace dome {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using ElementMatrix = Eigen::Matrix<double, 3, 4 * kStressComponents>;

// Lagrange-weighted line integrals along one element edge. Index a selects
// the basis vector (0: t_phi, 1: e_theta); index r the Lagrange function
// (0: l1, attached to the edge's first node; 1: l2).
struct EdgeIntegrals {
  Vector3d L[2][2];
  Vector3d Ln[2];
  Vector3d Lam[2][2];
  Vector3d Lamn[2];
  double length = 0.0;

  static EdgeIntegrals zero();
};

struct ElementOperators {
  ElementMatrix Bt = ElementMatrix::Zero();
  ElementMatrix Br = ElementMatrix::Zero();
};

struct BoundaryConstraint {
  Index node;
  int component;
};

struct StructuralSystem {
  SparseMatrix B;          // 6E x 9N
  Eigen::VectorXd f_dead;  // 6E, per element (force; moment about origin)
  Eigen::VectorXd f_live;
  std::vector<BoundaryConstraint> bc;

  Index equilibrium_rows() const { return B.rows(); }
  Index unknowns() const { return B.cols(); }
  // One unit entry per pinned component.
  SparseMatrix bc_matrix() const;
};

struct AssemblyOptions {
  int edge_order = 8;
  int load_order = 4;

  bool operator==(const AssemblyOptions&) const = default;
};

// Parameter-space corner k (0..3) of a rectangle in local node order.
std::array<double, 2> rect_corner(const ParamRect& rect, int k);

EdgeIntegrals edge_integrals(const MeridianGeometry& g, const ParamRect& rect,
                             int edge, int order = 8);

ElementOperators element_operators(const std::array<EdgeIntegrals, 4>& edges);
ElementOperators element_operators(const MeridianGeometry& g,
                                   const ParamRect& rect, int order = 8);

// Contribution of a single edge, i.e. the operators with the other three
// edges' integrals set to zero.
ElementOperators edge_operator(const MeridianGeometry& g, const ParamRect& rect,
                               int edge, int order = 8);

std::vector<BoundaryConstraint> boundary_constraints(const Mesh& mesh);

StructuralSystem assemble_structural(const Mesh& mesh, const MeridianGeometry& g,
                                     const LoadCase& load,
                                     const AssemblyOptions& opts = {});

void write_matrix_market(std::ostream& os, const SparseMatrix& A);

}  // namespace dome
