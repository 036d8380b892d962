#include "domelimit/meshing.hpp"

#include <map>
#include <numbers>
#include <string>

namespace dome {

const char* model_name(ModelKind k) {
  return k == ModelKind::half ? "half" : "full";
}

Index Mesh::node_id(int row, int col) const {
  if (model == ModelKind::full) col %= n;
  const int cols = model == ModelKind::half ? n + 1 : n;
  return static_cast<Index>(row) * cols + col;
}

Mesh build_mesh(const MeridianGeometry& g, int m, int n, ModelKind model) {
  if (m < 1) throw ConfigError("mesh: m must be >= 1, got " + std::to_string(m));
  if (n < 2) throw ConfigError("mesh: n must be >= 2, got " + std::to_string(n));
  if (model == ModelKind::full && n < 3)
    throw ConfigError("mesh: full model needs n >= 3");

  Mesh mesh;
  mesh.model = model;
  mesh.m = m;
  mesh.n = n;
  mesh.theta_span =
      model == ModelKind::half ? std::numbers::pi : 2 * std::numbers::pi;
  const int cols = model == ModelKind::half ? n + 1 : n;
  const double dphi = (g.phi_fin - g.phi_in) / m;
  const double dtheta = mesh.theta_span / n;

  auto phi_at = [&](int i) { return i == m ? g.phi_fin : g.phi_in + i * dphi; };
  auto theta_at = [&](int j) {
    return (model == ModelKind::half && j == n) ? std::numbers::pi : j * dtheta;
  };

  mesh.nodes.reserve(static_cast<std::size_t>((m + 1) * cols));
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j < cols; ++j) {
      MeshNode node;
      node.phi = phi_at(i);
      node.theta = theta_at(j);
      node.row = i;
      node.col = j;
      node.frame = meridian_frame<double>(g, node.phi, node.theta);
      if (model == ModelKind::half && (j == 0 || j == n))
        node.tags |= kSymmetryEdge;
      if (i == 0) node.tags |= g.closed_apex() ? kApex : kFreeRing;
      if (i == m) node.tags |= kBase;
      mesh.nodes.push_back(node);
    }
  }

  mesh.elements.reserve(static_cast<std::size_t>(m * n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      MeshElement e;
      e.row = i;
      e.col = j;
      e.nodes = {mesh.node_id(i, j), mesh.node_id(i + 1, j),
                 mesh.node_id(i + 1, j + 1), mesh.node_id(i, j + 1)};
      const double th2 = (j + 1 == n) ? mesh.theta_span : (j + 1) * dtheta;
      e.rect = {phi_at(i), phi_at(i + 1), j * dtheta, th2};
      mesh.elements.push_back(e);
    }
  }
  return mesh;
}

EdgeTopology edge_topology(const Mesh& mesh) {
  // Key an edge by its sorted node pair; apex parallels are zero-length but
  // still carry distinct node ids, so they pair up like any other edge.
  std::map<std::pair<Index, Index>, std::vector<std::pair<Index, int>>> edges;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& nodes = mesh.elements[e].nodes;
    for (int k = 0; k < 4; ++k) {
      Index a = nodes[k], b = nodes[(k + 1) % 4];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back({e, k});
    }
  }
  EdgeTopology topo;
  for (const auto& [key, uses] : edges) {
    if (uses.size() == 2) {
      topo.interior.push_back(
          {uses[0].first, uses[0].second, uses[1].first, uses[1].second});
    } else if (uses.size() == 1) {
      topo.boundary.push_back(uses[0]);
    } else {
      throw AssemblyError("mesh: edge shared by " +
                          std::to_string(uses.size()) + " elements");
    }
  }
  return topo;
}

}  // namespace dome
