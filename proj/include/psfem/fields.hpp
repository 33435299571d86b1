#pragma once

#include "psfem/material.hpp"
#include "psfem/mesh.hpp"
#include "psfem/ps_element.hpp"
#include "psfem/quadrature.hpp"
#include "psfem/solver.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace psfem {

/// Closed-form displacement/stress pair with its body force.
/// grad_u(i, j) = d u_i / d x_j.
struct ExactSolution {
  std::function<Eigen::Vector2d(const Point &)> u;
  std::function<Mat2(const Point &)> grad_u;
  std::function<SymTensor2(const Point &)> sigma;
  std::function<Eigen::Vector2d(const Point &)> f;
};

/// Nodal interpolant u^I.
Eigen::VectorXd interp_u(const QuadMesh &mesh, const ExactSolution &exact);

/// Discrete gradient of a nodal field on element k at (xi, eta).
Mat2 displacement_gradient(const QuadMesh &mesh, const Eigen::VectorXd &u, std::size_t k,
                           double xi, double eta);

/// Per-element a(.,.)-projection of the exact stress onto the stress mode:
/// beta^I = H_K^-1 int_K A^T C^-1 sigma.
std::vector<Vector5d> project_sigma(const QuadMesh &mesh, const Material &material,
                                    const ExactSolution &exact, const GaussRule &rule,
                                    const std::vector<ElementMatrices> &elements);
std::vector<Vector5d> project_sigma(const QuadMesh &mesh, const Material &material,
                                    const ExactSolution &exact, const GaussRule &rule);

/// int_K of each stress component for the element field A beta.
Eigen::Vector3d element_stress_moments(const ElementGeometry &g, const Vector5d &beta,
                                       const GaussRule &rule);

struct ErrorReport {
  double e_u = 0.0;         // |u - u_h|_1
  double e_sigma = 0.0;     // ||sigma - sigma_h||
  double theta_u = 0.0;     // |u_h - u^I|_1
  double theta_sigma = 0.0; // ||sigma_h - sigma^I||
  double norm_u = 0.0;      // |u|_1
  double norm_sigma = 0.0;  // ||sigma||
  double interp_u = 0.0;    // |u - u^I|_1
  double interp_sigma = 0.0; // ||sigma - sigma^I||

  double rel_e_u() const { return e_u / norm_u; }
  double rel_e_sigma() const { return e_sigma / norm_sigma; }
  double rel_theta_u() const { return theta_u / norm_u; }
  double rel_theta_sigma() const { return theta_sigma / norm_sigma; }
};

/// All norms use the given rule element by element. Stress norms are the
/// L2 norm of the component triple (s11, s22, s12), matching the published
/// convergence tables.
ErrorReport error_report(const HybridSolution &sol, const ExactSolution &exact,
                         const GaussRule &rule, const Eigen::VectorXd &u_interp,
                         const std::vector<Vector5d> &beta_interp);
ErrorReport error_report(const HybridSolution &sol, const ExactSolution &exact,
                         const GaussRule &rule);

} // namespace psfem
