#pragma once

#include "psfem/material.hpp"
#include "psfem/mesh.hpp"
#include "psfem/ps_element.hpp"
#include "psfem/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace psfem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using DirichletData = std::function<Eigen::Vector2d(const Point &)>;

/// Condensed displacement system. Dof 2*v + c is component c of vertex v.
struct AssembledSystem {
  SparseMatrix K;
  Eigen::VectorXd load;
  std::vector<ElementMatrices> elements;
};

AssembledSystem assemble(const QuadMesh &mesh, const Material &material,
                         const VectorField &body_force, const GaussRule &rule);

/// Displacements plus the per-element stress parameters.
struct HybridSolution {
  const QuadMesh *mesh = nullptr;
  Material material;
  Eigen::VectorXd u;
  std::vector<Vector5d> beta;
  double relative_residual = 0.0;

  Vector8d element_displacement(std::size_t k) const;
};

/// Local displacement vector of element k from a global one.
Vector8d gather(const QuadMesh &mesh, const Eigen::VectorXd &u, std::size_t k);

/// Boundary dofs take the nodal values of g; the interior block is solved by
/// sparse LDL^T and stresses are recovered element by element.
HybridSolution solve_dirichlet(const AssembledSystem &system, const QuadMesh &mesh,
                               const Material &material, const DirichletData &g,
                               double tolerance = 1e-12);

/// Adds a constant hydrostatic stress c I to every element so that
/// int_Omega tr(sigma_h) = target. Displacements are unaffected: the shift is
/// orthogonal to every stress with zero mean trace and to div of H^1_0 fields.
/// Returns c.
double normalize_mean_trace(HybridSolution &sol, const GaussRule &rule, double target = 0.0);

/// int_Omega tr(sigma_h).
double mean_trace_integral(const HybridSolution &sol, const GaussRule &rule);

/// Residual of the interior equilibrium equations sum_K G_K^T beta_K = load,
/// relative to the larger of the load norm and the norm of the summed
/// element force magnitudes (so it stays meaningful with zero load).
double equilibrium_residual(const AssembledSystem &system, const HybridSolution &sol);

} // namespace psfem
