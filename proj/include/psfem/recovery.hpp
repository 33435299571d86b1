#pragma once

#include "psfem/fields.hpp"
#include "psfem/mesh.hpp"
#include "psfem/quadrature.hpp"
#include "psfem/solver.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace psfem {

/// Elements sharing a vertex, with every node on their closure.
struct VertexPatch {
  int center = -1;
  std::vector<int> elements;
  std::vector<int> nodes; // sorted, includes center
  double h = 0.0;         // longest element edge in the patch
};

VertexPatch vertex_patch(const QuadMesh &mesh, int vertex);

/// Adds every element touching a node of the patch.
VertexPatch enlarge_patch(const QuadMesh &mesh, const VertexPatch &patch);

/// Least-squares quadratic in scaled local coordinates ((x,y) - Z) / h, with
/// coefficients for (1, x, y, x^2, xy, y^2).
struct QuadraticFit {
  Point origin;
  double h = 1.0;
  Eigen::Matrix<double, 6, 1> c;

  double value(const Point &p) const;
  Eigen::Vector2d gradient(const Point &p) const;
};

/// Fits nodal values over the patch nodes (enlarging once if the patch has
/// fewer than six nodes or an ill-conditioned normal matrix).
/// `nodal_values` is indexed by global vertex id.
QuadraticFit ppr_fit(const QuadMesh &mesh, const VertexPatch &patch,
                     std::span<const double> nodal_values);

Eigen::Vector2d ppr_vertex_gradient(const QuadMesh &mesh, const VertexPatch &patch,
                                    std::span<const double> nodal_values);

/// Linear minimizer phi = alpha1 + alpha2 x + alpha3 y of
/// sum_j (int_{K_j} (phi - psi))^2 over the patch elements.
struct LinearFit {
  Eigen::Vector3d alpha; // physical coefficients
  double value(const Point &p) const { return alpha[0] + alpha[1] * p.x() + alpha[2] * p.y(); }
};

/// Closed-form (int 1, int (x - o_x)/s, int (y - o_y)/s) over an element.
Eigen::Vector3d geometric_moments(const ElementGeometry &g, const Point &origin, double scale);

/// `cell_moments[j]` is int_{K_j} psi for patch.elements[j].
LinearFit rh_vertex_fit(const QuadMesh &mesh, const VertexPatch &patch,
                        std::span<const double> cell_moments);

/// Per-vertex values, interpolated bilinearly on each element.
struct RecoveredField {
  Eigen::MatrixXd values; // num_vertices x components

  Eigen::VectorXd evaluate(const QuadMesh &mesh, std::size_t k, double xi, double eta) const;
};

/// G_h u_h with components (du/dx, du/dy, dv/dx, dv/dy). Boundary vertices
/// average the gradients of the interior-vertex fits whose closed patch
/// contains them.
RecoveredField recover_gradient(const QuadMesh &mesh, const Eigen::VectorXd &u);

/// R_h applied componentwise to a field given by its element moments
/// (rows = elements, columns = components).
RecoveredField recover_from_moments(const QuadMesh &mesh, const Eigen::MatrixXd &moments);

/// R_h sigma_h with components (s11, s22, s12).
RecoveredField recover_stress(const QuadMesh &mesh, const HybridSolution &sol,
                              const GaussRule &rule);

struct Estimators {
  double eta_u = 0.0;     // ||G_h u_h - grad u_h||
  double eta_sigma = 0.0; // ||R_h sigma_h - sigma_h||
};

Estimators estimators(const HybridSolution &sol, const RecoveredField &grad_field,
                      const RecoveredField &stress_field, const GaussRule &rule);

struct RecoveryErrors {
  double gradient = 0.0; // ||grad u - G_h u_h||
  double stress = 0.0;   // ||sigma - R_h sigma_h||
};

RecoveryErrors recovery_errors(const QuadMesh &mesh, const ExactSolution &exact,
                               const RecoveredField &grad_field,
                               const RecoveredField &stress_field, const GaussRule &rule);

} // namespace psfem
