#include "psfem/bench.hpp"
#include "psfem/errors.hpp"
#include "psfem/mesh.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace psfem;

namespace {

double shoelace(const QuadVertices &v) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += v[i].x() * v[(i + 1) % 4].y() - v[(i + 1) % 4].x() * v[i].y();
  return 0.5 * s;
}

} // namespace

TEST(Mesh, BilinearCoefficientsOfCornerQuad) {
  // Lower-left quad of the 2x2 irregular mesh.
  const QuadVertices v = {Point(0, 0), Point(0.4, 0), Point(0.5, 0.5), Point(0, 0.3)};
  const auto g = bilinear_coeffs(v);
  const double a[4] = {0.225, 0.225, 0.025, 0.025};
  const double b[4] = {0.2, 0.05, 0.2, 0.05};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(g.a[i], a[i], 1e-15);
    EXPECT_NEAR(g.b[i], b[i], 1e-15);
  }
  EXPECT_NEAR(g.J[0], 0.04375, 1e-15);
  EXPECT_NEAR(g.J[1], 0.01, 1e-15);
  EXPECT_NEAR(g.J[2], 0.00375, 1e-15);
  EXPECT_NEAR(g.d_K, 0.5 * std::sqrt(0.025 * 0.025 + 0.05 * 0.05), 1e-15);
}

TEST(Mesh, MapMatchesShapeFunctionForm) {
  std::mt19937 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto v = testing_support::random_convex_quad(rng);
    const auto g = bilinear_coeffs(v);
    for (double xi : {-1.0, -0.3, 0.6, 1.0})
      for (double eta : {-1.0, 0.2, 0.9}) {
        EXPECT_LT((map_ref_to_phys(g, xi, eta) - testing_support::map_point(v, xi, eta)).norm(),
                  1e-12);
        const Mat2 J = testing_support::map_jacobian(v, xi, eta);
        EXPECT_LT((jacobian_matrix(g, xi, eta) - J).norm(), 1e-12);
        EXPECT_NEAR(g.jacobian(xi, eta), J.determinant(), 1e-12);
        EXPECT_LT((inverse_jacobian(g, xi, eta) * J - Mat2::Identity()).norm(), 1e-10);
      }
    EXPECT_NEAR(g.area(), shoelace(v), 1e-12);
    const Point p = testing_support::map_point(v, 0.3, -0.45);
    const Point r = map_phys_to_ref(g, p);
    EXPECT_NEAR(r.x(), 0.3, 1e-10);
    EXPECT_NEAR(r.y(), -0.45, 1e-10);
  }
}

TEST(Mesh, RejectsBadQuads) {
  const QuadVertices cw = {Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)};
  EXPECT_THROW(bilinear_coeffs(cw), GeometryError);
  const QuadVertices dart = {Point(0, 0), Point(2, 0), Point(0.5, 0.5), Point(0, 2)};
  EXPECT_THROW(bilinear_coeffs(dart), GeometryError);
  const QuadVertices flat = {Point(0, 0), Point(1, 0), Point(2, 0), Point(3, 0)};
  EXPECT_THROW(bilinear_coeffs(flat), GeometryError);
}

TEST(Mesh, ExampleMeshesTopology) {
  const auto m1 = example_mesh(1);
  EXPECT_EQ(m1.num_vertices(), 9u);
  EXPECT_EQ(m1.num_elements(), 4u);
  EXPECT_EQ(m1.num_interior_vertices(), 1u);
  const auto m2 = example_mesh(2);
  EXPECT_EQ(m2.num_vertices(), 12u);
  EXPECT_EQ(m2.num_elements(), 5u);
  EXPECT_EQ(m2.num_interior_vertices(), 0u);
  for (const auto *m : {&m1, &m2}) {
    const auto q = quality_report(*m);
    EXPECT_GT(q.min_jacobian_margin, 0.0);
  }
}

TEST(Mesh, RefinementCountsAndArea) {
  auto m = example_mesh(1);
  m = refine_bisection(m);
  EXPECT_EQ(m.num_vertices(), 25u);
  EXPECT_EQ(m.num_elements(), 16u);
  m = refine_bisection(m);
  EXPECT_EQ(m.num_vertices(), 81u);
  EXPECT_EQ(m.num_elements(), 64u);
  EXPECT_EQ(m.num_interior_vertices(), 49u);
  double area = 0.0;
  for (const auto &g : m.geometry()) area += g.area();
  EXPECT_NEAR(area, 1.0, 1e-14);
  EXPECT_EQ(m.edges().size(), 144u);
}

TEST(Mesh, BisectionHalvesDistortionQuadratically) {
  // d_K shrinks by 4 per bisection while h_K halves: alpha = 1.
  std::vector<QuadMesh> ladder{example_mesh(1)};
  for (int i = 0; i < 4; ++i) ladder.push_back(refine_bisection(ladder.back()));
  // Level 0 still carries the initial distortion pattern.
  EXPECT_NEAR(fit_distortion_exponent(std::span<const QuadMesh>(ladder).subspan(1)), 1.0, 0.15);
  std::vector<QuadMesh> rects{rectangle_mesh(0, 1, 0, 1, 2, 2)};
  rects.push_back(refine_bisection(rects.back()));
  EXPECT_TRUE(std::isinf(fit_distortion_exponent(rects)));
  EXPECT_THROW(fit_distortion_exponent(std::span<const QuadMesh>(rects).first(1)), InputError);
}

TEST(Mesh, PerturbedMeshesLoseDistortionOrder) {
  // Moving interior nodes by O(h) in a checkerboard keeps d_K = O(h): alpha = 0.
  std::vector<QuadMesh> ladder;
  for (int n : {4, 8, 16, 32}) {
    auto base = rectangle_mesh(0, 1, 0, 1, n, n);
    auto v = base.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!base.boundary_vertex()[i]) {
        const int ix = static_cast<int>(std::lround(v[i].x() * n));
        const int iy = static_cast<int>(std::lround(v[i].y() * n));
        v[i].x() += ((ix + iy) % 2 ? 0.2 : -0.2) / n;
      }
    ladder.emplace_back(v, base.quads());
  }
  EXPECT_NEAR(fit_distortion_exponent(ladder), 0.0, 0.05);
}

TEST(Mesh, QualityReportOnSquares) {
  const auto m = rectangle_mesh(0, 2, 0, 2, 2, 2);
  const auto q = quality_report(m);
  // Corner triangle of a unit square: legs 1, hypotenuse sqrt 2.
  const double rho = 4 * 0.5 / (2 + std::sqrt(2.0));
  for (double r : q.rho_K) EXPECT_NEAR(r, rho, 1e-14);
  EXPECT_NEAR(q.varrho, std::sqrt(2.0) / rho, 1e-12);
  EXPECT_TRUE(q.varrho_above_two);
  EXPECT_NEAR(q.jamet_ratio, std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(q.mc2_max_deviation, 0.0);
  EXPECT_NEAR(q.min_jacobian_margin, 1.0, 1e-14);
}

TEST(Mesh, InscribedCircle) {
  const QuadVertices sq = {Point(0, 0), Point(3, 0), Point(3, 3), Point(0, 3)};
  EXPECT_NEAR(inscribed_circle_diameter(sq), 3.0, 1e-12);
  const QuadVertices rect = {Point(0, 0), Point(4, 0), Point(4, 1), Point(0, 1)};
  EXPECT_NEAR(inscribed_circle_diameter(rect), 1.0, 1e-12);
}

TEST(Mesh, TextRoundTrip) {
  const auto m = refine_bisection(example_mesh(2));
  std::stringstream ss;
  write_mesh(ss, m);
  const auto r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  ASSERT_EQ(r.quads(), m.quads());
  for (std::size_t i = 0; i < m.num_vertices(); ++i)
    EXPECT_EQ(r.vertices()[i], m.vertices()[i]);
}

TEST(Mesh, ReadErrors) {
  std::stringstream bad_header("quadmesh 2\nV 0\nQ 0\n");
  EXPECT_THROW(read_mesh(bad_header), InputError);
  std::stringstream bad_index("quadmesh 1\nV 3\n0 0\n1 0\n1 1\nQ 1\n0 1 2 3\n");
  EXPECT_THROW(read_mesh(bad_index), InputError);
  std::stringstream truncated("quadmesh 1\nV 4\n0 0\n1 0\n");
  EXPECT_THROW(read_mesh(truncated), InputError);
  EXPECT_THROW(read_mesh_file("/nonexistent/mesh.txt"), InputError);
}
