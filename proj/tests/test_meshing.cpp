#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "domelimit/meshing.hpp"

using namespace dome;
using std::numbers::pi;

TEST_CASE("half hemisphere 4x8 counts") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  const auto mesh = build_mesh(g, 4, 8, ModelKind::half);
  CHECK(mesh.element_count() == 32);
  CHECK(mesh.node_count() == 45);
}

TEST_CASE("16x32 half mesh") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  const auto mesh = build_mesh(g, 16, 32, ModelKind::half);
  CHECK(mesh.element_count() == 512);
  CHECK(mesh.node_count() == 17 * 33);
}

TEST_CASE("apex columns stay distinct") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  const auto mesh = build_mesh(g, 3, 6, ModelKind::half);
  std::set<Index> ids;
  for (const auto& nd : mesh.nodes)
    if (nd.row == 0) {
      CHECK(nd.has(kApex));
      CHECK((nd.frame.position - Vector3d(0, 0, 1)).norm() < 1e-15);
      ids.insert(mesh.node_id(nd.row, nd.col));
    }
  CHECK(ids.size() == 7);
}

TEST_CASE("node tags") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2, 0.2);
  const auto half = build_mesh(g, 4, 8, ModelKind::half);
  for (const auto& nd : half.nodes) {
    CHECK(nd.has(kSymmetryEdge) == (nd.col == 0 || nd.col == 8));
    CHECK(nd.has(kFreeRing) == (nd.row == 0));
    CHECK(nd.has(kBase) == (nd.row == 4));
    CHECK(!nd.has(kApex));
  }
  const auto full = build_mesh(g, 4, 8, ModelKind::full);
  CHECK(full.node_count() == 5 * 8);
  for (const auto& nd : full.nodes) CHECK(!nd.has(kSymmetryEdge));
}

TEST_CASE("elements are positively oriented parameter rectangles") {
  const auto g = MeridianGeometry::ellipsoid(1.0, 0.6, pi / 2, 0.1);
  for (auto model : {ModelKind::half, ModelKind::full}) {
    const auto mesh = build_mesh(g, 5, 12, model);
    double area = 0.0;
    for (const auto& el : mesh.elements) {
      CHECK(el.rect.phi1 < el.rect.phi2);
      CHECK(el.rect.theta1 < el.rect.theta2);
      area += (el.rect.phi2 - el.rect.phi1) * (el.rect.theta2 - el.rect.theta1);
      // local order: node1 (phi1, theta1), node2 (phi2, theta1), node3 (phi2, theta2)
      const auto& n1 = mesh.nodes[static_cast<std::size_t>(el.nodes[0])];
      const auto& n2 = mesh.nodes[static_cast<std::size_t>(el.nodes[1])];
      const auto& n3 = mesh.nodes[static_cast<std::size_t>(el.nodes[2])];
      CHECK(n1.phi == el.rect.phi1);
      CHECK(n2.phi == el.rect.phi2);
      CHECK(n1.theta == el.rect.theta1);
      CHECK(std::fmod(n3.theta, 2 * pi) == doctest::Approx(std::fmod(el.rect.theta2, 2 * pi)));
    }
    CHECK(area == doctest::Approx((g.phi_fin - g.phi_in) * mesh.theta_span).epsilon(1e-14));
  }
}

TEST_CASE("edge topology") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  const int m = 4, n = 8;

  const auto half = build_mesh(g, m, n, ModelKind::half);
  const auto th = edge_topology(half);
  // interior: meridian edges between columns, parallel edges between rows
  CHECK(th.interior.size() == static_cast<std::size_t>(m * (n - 1) + (m - 1) * n));
  CHECK(th.boundary.size() == static_cast<std::size_t>(2 * m + 2 * n));

  const auto full = build_mesh(g, m, n, ModelKind::full);
  const auto tf = edge_topology(full);
  CHECK(tf.interior.size() == static_cast<std::size_t>(m * n + (m - 1) * n));
  CHECK(tf.boundary.size() == static_cast<std::size_t>(2 * n));
  for (const auto& p : tf.interior) CHECK(p.elem_a != p.elem_b);
}

TEST_CASE("invalid mesh sizes") {
  const auto g = MeridianGeometry::sphere(1.0, pi / 2);
  CHECK_THROWS_AS(build_mesh(g, 0, 8, ModelKind::half), ConfigError);
  CHECK_THROWS_AS(build_mesh(g, 4, 1, ModelKind::half), ConfigError);
  CHECK_THROWS_AS(build_mesh(g, 4, 2, ModelKind::full), ConfigError);
}
