#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psfem {

using Point = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Coefficients of the bilinear map F_K from the reference square [-1,1]^2:
///   x = a0 + a1*xi + a2*eta + a12*xi*eta,
///   y = b0 + b1*xi + b2*eta + b12*xi*eta,
/// with Jacobian determinant J0 + J1*xi + J2*eta.
struct ElementGeometry {
  std::array<double, 4> a{}; // a0, a1, a2, a12
  std::array<double, 4> b{}; // b0, b1, b2, b12
  std::array<double, 3> J{}; // J0, J1, J2
  double d_K = 0.0;          // distance between the diagonal midpoints
  double h_K = 0.0;          // element diameter

  double a0() const { return a[0]; }
  double a1() const { return a[1]; }
  double a2() const { return a[2]; }
  double a12() const { return a[3]; }
  double b0() const { return b[0]; }
  double b1() const { return b[1]; }
  double b2() const { return b[2]; }
  double b12() const { return b[3]; }

  double jacobian(double xi, double eta) const { return J[0] + J[1] * xi + J[2] * eta; }
  double area() const { return 4.0 * J[0]; }
  Point center() const { return {a[0], b[0]}; }
};

using QuadVertices = std::array<Point, 4>;

/// Builds the map coefficients of a strictly convex, counter-clockwise quad.
/// Throws GeometryError otherwise; `element` only labels the message.
ElementGeometry bilinear_coeffs(const QuadVertices &v, long element = -1);

Point map_ref_to_phys(const ElementGeometry &g, double xi, double eta);

/// DF_K(xi, eta) = d(x,y)/d(xi,eta).
Mat2 jacobian_matrix(const ElementGeometry &g, double xi, double eta);

/// Rows are grad(xi) and grad(eta) in physical coordinates.
Mat2 inverse_jacobian(const ElementGeometry &g, double xi, double eta);

/// Newton inversion of F_K; returns (xi, eta).
Point map_phys_to_ref(const ElementGeometry &g, const Point &p, double tol = 1e-14,
                      int max_iter = 50);

/// Unstructured quadrilateral mesh. Quads are stored counter-clockwise with
/// the first vertex mapped to (-1,-1). Boundary flags and vertex patches are
/// derived from connectivity on construction.
class QuadMesh {
public:
  QuadMesh() = default;
  QuadMesh(std::vector<Point> vertices, std::vector<std::array<int, 4>> quads);

  const std::vector<Point> &vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>> &quads() const { return quads_; }
  const std::vector<bool> &boundary_vertex() const { return boundary_; }
  const std::vector<std::vector<int>> &patches() const { return patches_; }
  const std::vector<ElementGeometry> &geometry() const { return geometry_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return quads_.size(); }
  std::size_t num_interior_vertices() const;

  QuadVertices element_vertices(std::size_t k) const;
  const ElementGeometry &element(std::size_t k) const { return geometry_[k]; }

  /// Unique undirected edges as sorted vertex pairs, in first-seen order.
  std::vector<std::array<int, 2>> edges() const;
  /// For each edge of edges(), the one or two adjacent elements (-1 if none).
  std::vector<std::array<int, 2>> edge_elements() const;

  double h_max() const;

private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 4>> quads_;
  std::vector<bool> boundary_;
  std::vector<std::vector<int>> patches_;
  std::vector<ElementGeometry> geometry_;
};

/// Splits every quad into four through the edge midpoints and F_K(0,0).
/// Children keep the parent's local orientation.
QuadMesh refine_bisection(const QuadMesh &mesh);

/// Uniform nx-by-ny grid of axis-aligned rectangles on [x0,x1]x[y0,y1].
QuadMesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny);

struct MeshQualityReport {
  std::vector<double> rho_K; // min incircle diameter of the four corner triangles
  std::vector<double> h_K;
  std::vector<double> d_K;
  double varrho = 0.0;            // max_K h_K / rho_K
  bool varrho_above_two = false;  // shape-regularity constant exceeds 2
  std::optional<double> alpha_fit; // only from a refinement ladder
  double mc2_max_deviation = 0.0;
  double jamet_ratio = 0.0; // max_K h_K / (inscribed circle diameter of K)
  double min_jacobian_margin = 0.0; // min_K (J0 - |J1| - |J2|) / J0
};

/// Single-mesh report. MC2 deviations are normalized by max(h_K1, h_K2)^alpha.
MeshQualityReport quality_report(const QuadMesh &mesh, double alpha = 1.0);

/// Fits d = O(h^{1+alpha}) across a ladder of meshes by least squares on
/// (log max_K h_K, log max_K d_K); returns +inf when every level is made of
/// parallelograms. Requires at least two levels.
double fit_distortion_exponent(std::span<const QuadMesh> ladder);

/// Diameter of the largest circle inscribed in a convex quad.
double inscribed_circle_diameter(const QuadVertices &v);

/// Text mesh format:
///   quadmesh 1
///   V <n>
///   x y        (n lines)
///   Q <m>
///   i1 i2 i3 i4  (m lines, 0-based, counter-clockwise)
void write_mesh(std::ostream &os, const QuadMesh &mesh);
QuadMesh read_mesh(std::istream &is);
QuadMesh read_mesh_file(const std::string &path);

} // namespace psfem
