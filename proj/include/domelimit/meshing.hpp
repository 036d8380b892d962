#pragma once

#include <array>
#include <vector>

#include "domelimit/geometry.hpp"
#include "domelimit/loads.hpp"

namespace dome {

enum class ModelKind { half, full };

enum NodeTag : unsigned {
  kSymmetryEdge = 1u << 0,
  kApex = 1u << 1,
  kFreeRing = 1u << 2,
  kBase = 1u << 3,
};

struct MeshNode {
  double phi, theta;
  int row, col;
  SurfaceFrame<double> frame;
  unsigned tags = 0;

  bool has(NodeTag t) const { return (tags & t) != 0; }
};

// Local order: 1 = (phi1, theta1), 2 = (phi2, theta1), 3 = (phi2, theta2),
// 4 = (phi1, theta2). Edge i joins node i to node i + 1 (mod 4).
struct MeshElement {
  std::array<Index, 4> nodes;
  ParamRect rect;
  int row, col;
};

struct Mesh {
  ModelKind model = ModelKind::half;
  int m = 0, n = 0;
  double theta_span = 0.0;
  std::vector<MeshNode> nodes;
  std::vector<MeshElement> elements;

  Index node_count() const { return static_cast<Index>(nodes.size()); }
  Index element_count() const { return static_cast<Index>(elements.size()); }
  Index node_id(int row, int col) const;
};

// An edge shared by two elements, given by (element, local edge index 0..3).
struct EdgePair {
  Index elem_a;
  int edge_a;
  Index elem_b;
  int edge_b;
};

struct EdgeTopology {
  std::vector<EdgePair> interior;
  // (element, local edge) pairs on the mesh boundary
  std::vector<std::pair<Index, int>> boundary;
};

Mesh build_mesh(const MeridianGeometry& g, int m, int n, ModelKind model);

EdgeTopology edge_topology(const Mesh& mesh);

const char* model_name(ModelKind k);

}  // namespace dome
