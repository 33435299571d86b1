#pragma once

#include "psfem/material.hpp"
#include "psfem/mesh.hpp"
#include "psfem/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>

namespace psfem {

using StressModeMatrix = Eigen::Matrix<double, 3, 5>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix58d = Eigen::Matrix<double, 5, 8>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Vector5d = Eigen::Matrix<double, 5, 1>;
using Vector8d = Eigen::Matrix<double, 8, 1>;
using VectorField = std::function<Eigen::Vector2d(const Point &)>;

/// Five-parameter stress mode on the reference square:
///
///   [ 1 0 0  eta             (a2/b2)^2 xi ]
///   [ 0 1 0  (b1/a1)^2 eta   xi           ]
///   [ 0 0 1  (b1/a1) eta     (a2/b2) xi   ]
///
/// Throws GeometryError when |a1| or |b2| is below 1e-12 h_K.
StressModeMatrix stress_mode_eval(const ElementGeometry &g, double xi, double eta);

/// Matrix M with a(sigma, tau) = tau^T M sigma for 3-vectors (s11, s22, s12);
/// includes the factor 2 on the shear slot.
Eigen::Matrix3d weighted_compliance(const Material &m);

/// Bilinear shape functions at (xi, eta), nodes ordered as the quad.
Eigen::Vector4d shape_values(double xi, double eta);

/// Physical gradients of the four shape functions (columns).
Eigen::Matrix<double, 2, 4> shape_gradients(const ElementGeometry &g, double xi, double eta);

/// Engineering strain-displacement matrix: rows (du/dx, dv/dy, du/dy + dv/dx),
/// dofs interleaved (u1, v1, u2, v2, ...).
Eigen::Matrix<double, 3, 8> strain_displacement(const ElementGeometry &g, double xi, double eta);

struct ElementMatrices {
  Matrix5d H;   // flexibility, int A^T C^-1 A
  Matrix58d G;  // coupling, int A^T : eps(phi_j)
  Matrix8d Ke;  // condensed stiffness G^T H^-1 G
  Vector8d fe;  // load, int f . phi_j
  Eigen::LLT<Matrix5d> H_factor;
};

/// Throws NumericError if H is not positive definite.
ElementMatrices element_matrices(const ElementGeometry &g, const Material &m,
                                 const GaussRule &rule, const VectorField &body_force = {},
                                 long element = -1);

/// beta = H^-1 G u_e.
Vector5d element_stress_from_displacement(const ElementMatrices &em, const Vector8d &ue);

/// sigma_h(F_K(xi, eta)) = A(xi, eta) beta.
SymTensor2 stress_at(const ElementGeometry &g, const Vector5d &beta, double xi, double eta);

} // namespace psfem
