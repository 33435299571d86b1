#include "psfem/ps_element.hpp"

#include "psfem/errors.hpp"

#include <cmath>
#include <string>

namespace psfem {

StressModeMatrix stress_mode_eval(const ElementGeometry &g, double xi, double eta) {
  if (std::abs(g.a1()) < 1e-12 * g.h_K || std::abs(g.b2()) < 1e-12 * g.h_K)
    throw GeometryError("ill-oriented element for the stress mode: a1 = " +
                        std::to_string(g.a1()) + ", b2 = " + std::to_string(g.b2()));
  const double r = g.b1() / g.a1();
  const double s = g.a2() / g.b2();
  StressModeMatrix A;
  A << 1, 0, 0, eta, s * s * xi,
       0, 1, 0, r * r * eta, xi,
       0, 0, 1, r * eta, s * xi;
  return A;
}

Eigen::Matrix3d weighted_compliance(const Material &m) {
  const double c = m.lambda / (2.0 * (m.mu + m.lambda));
  const double s = 1.0 / (2.0 * m.mu);
  Eigen::Matrix3d M;
  M << s * (1.0 - c), -s * c, 0.0,
       -s * c, s * (1.0 - c), 0.0,
       0.0, 0.0, 2.0 * s;
  return M;
}

Eigen::Vector4d shape_values(double xi, double eta) {
  return 0.25 * Eigen::Vector4d((1 - xi) * (1 - eta), (1 + xi) * (1 - eta), (1 + xi) * (1 + eta),
                                (1 - xi) * (1 + eta));
}

Eigen::Matrix<double, 2, 4> shape_gradients(const ElementGeometry &g, double xi, double eta) {
  Eigen::Matrix<double, 2, 4> ref;
  ref << -(1 - eta), (1 - eta), (1 + eta), -(1 + eta),
         -(1 - xi), -(1 + xi), (1 + xi), (1 - xi);
  ref *= 0.25;
  return inverse_jacobian(g, xi, eta).transpose() * ref;
}

Eigen::Matrix<double, 3, 8> strain_displacement(const ElementGeometry &g, double xi, double eta) {
  const auto dN = shape_gradients(g, xi, eta);
  Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
  for (int i = 0; i < 4; ++i) {
    B(0, 2 * i) = dN(0, i);
    B(1, 2 * i + 1) = dN(1, i);
    B(2, 2 * i) = dN(1, i);
    B(2, 2 * i + 1) = dN(0, i);
  }
  return B;
}

ElementMatrices element_matrices(const ElementGeometry &g, const Material &m,
                                 const GaussRule &rule, const VectorField &body_force,
                                 long element) {
  ElementMatrices em;
  em.H.setZero();
  em.G.setZero();
  em.fe.setZero();
  const Eigen::Matrix3d Cw = weighted_compliance(m);
  for (const auto &q : rule.nodes) {
    const double wj = q.weight * g.jacobian(q.xi, q.eta);
    const StressModeMatrix A = stress_mode_eval(g, q.xi, q.eta);
    em.H.noalias() += wj * A.transpose() * Cw * A;
    em.G.noalias() += wj * A.transpose() * strain_displacement(g, q.xi, q.eta);
    if (body_force) {
      const Eigen::Vector2d f = body_force(map_ref_to_phys(g, q.xi, q.eta));
      const Eigen::Vector4d N = shape_values(q.xi, q.eta);
      for (int i = 0; i < 4; ++i) {
        em.fe[2 * i] += wj * f.x() * N[i];
        em.fe[2 * i + 1] += wj * f.y() * N[i];
      }
    }
  }
  em.H = 0.5 * (em.H + em.H.transpose());
  em.H_factor.compute(em.H);
  if (em.H_factor.info() != Eigen::Success)
    throw NumericError("flexibility matrix not positive definite" +
                       (element >= 0 ? " on element " + std::to_string(element) : std::string{}));
  em.Ke = em.G.transpose() * em.H_factor.solve(em.G);
  em.Ke = 0.5 * (em.Ke + em.Ke.transpose());
  return em;
}

Vector5d element_stress_from_displacement(const ElementMatrices &em, const Vector8d &ue) {
  return em.H_factor.solve(em.G * ue);
}

SymTensor2 stress_at(const ElementGeometry &g, const Vector5d &beta, double xi, double eta) {
  const Eigen::Vector3d s = stress_mode_eval(g, xi, eta) * beta;
  return {s[0], s[1], s[2]};
}

} // namespace psfem
