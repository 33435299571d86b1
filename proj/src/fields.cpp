#include "psfem/fields.hpp"

#include <cmath>

namespace psfem {

namespace {

double frob2(const Mat2 &m) { return m.squaredNorm(); }

SymTensor2 minus(const SymTensor2 &a, const SymTensor2 &b) {
  return {a.t11 - b.t11, a.t22 - b.t22, a.t12 - b.t12};
}

} // namespace

Eigen::VectorXd interp_u(const QuadMesh &mesh, const ExactSolution &exact) {
  Eigen::VectorXd u(2 * mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Eigen::Vector2d val = exact.u(mesh.vertices()[v]);
    u[2 * v] = val.x();
    u[2 * v + 1] = val.y();
  }
  return u;
}

Mat2 displacement_gradient(const QuadMesh &mesh, const Eigen::VectorXd &u, std::size_t k,
                           double xi, double eta) {
  const auto dN = shape_gradients(mesh.element(k), xi, eta);
  const auto &q = mesh.quads()[k];
  Mat2 grad = Mat2::Zero();
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d ui(u[2 * q[i]], u[2 * q[i] + 1]);
    grad += ui * dN.col(i).transpose();
  }
  return grad;
}

std::vector<Vector5d> project_sigma(const QuadMesh &mesh, const Material &material,
                                    const ExactSolution &exact, const GaussRule &rule,
                                    const std::vector<ElementMatrices> &elements) {
  const Eigen::Matrix3d Cw = weighted_compliance(material);
  std::vector<Vector5d> beta(mesh.num_elements());
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &g = mesh.element(k);
    Vector5d rhs = Vector5d::Zero();
    for (const auto &q : rule.nodes) {
      const SymTensor2 s = exact.sigma(map_ref_to_phys(g, q.xi, q.eta));
      rhs += q.weight * g.jacobian(q.xi, q.eta) * stress_mode_eval(g, q.xi, q.eta).transpose() *
             (Cw * Eigen::Vector3d(s.t11, s.t22, s.t12));
    }
    beta[k] = elements[k].H_factor.solve(rhs);
  }
  return beta;
}

std::vector<Vector5d> project_sigma(const QuadMesh &mesh, const Material &material,
                                    const ExactSolution &exact, const GaussRule &rule) {
  std::vector<ElementMatrices> elements;
  elements.reserve(mesh.num_elements());
  for (std::size_t k = 0; k < mesh.num_elements(); ++k)
    elements.push_back(element_matrices(mesh.element(k), material, rule, {}, static_cast<long>(k)));
  return project_sigma(mesh, material, exact, rule, elements);
}

Eigen::Vector3d element_stress_moments(const ElementGeometry &g, const Vector5d &beta,
                                       const GaussRule &rule) {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (const auto &q : rule.nodes)
    m += q.weight * g.jacobian(q.xi, q.eta) * (stress_mode_eval(g, q.xi, q.eta) * beta);
  return m;
}

ErrorReport error_report(const HybridSolution &sol, const ExactSolution &exact,
                         const GaussRule &rule, const Eigen::VectorXd &u_interp,
                         const std::vector<Vector5d> &beta_interp) {
  const QuadMesh &mesh = *sol.mesh;
  ErrorReport r;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &g = mesh.element(k);
    for (const auto &q : rule.nodes) {
      const double wj = q.weight * g.jacobian(q.xi, q.eta);
      const Point x = map_ref_to_phys(g, q.xi, q.eta);
      const Mat2 du = exact.grad_u(x);
      const Mat2 duh = displacement_gradient(mesh, sol.u, k, q.xi, q.eta);
      const Mat2 dui = displacement_gradient(mesh, u_interp, k, q.xi, q.eta);
      const SymTensor2 s = exact.sigma(x);
      const SymTensor2 sh = stress_at(g, sol.beta[k], q.xi, q.eta);
      const SymTensor2 si = stress_at(g, beta_interp[k], q.xi, q.eta);

      r.norm_u += wj * frob2(du);
      r.e_u += wj * frob2(du - duh);
      r.theta_u += wj * frob2(duh - dui);
      r.interp_u += wj * frob2(du - dui);
      r.norm_sigma += wj * component_norm2(s);
      const SymTensor2 es = minus(s, sh), ts = minus(sh, si), is = minus(s, si);
      r.e_sigma += wj * component_norm2(es);
      r.theta_sigma += wj * component_norm2(ts);
      r.interp_sigma += wj * component_norm2(is);
    }
  }
  for (double *p : {&r.e_u, &r.e_sigma, &r.theta_u, &r.theta_sigma, &r.norm_u, &r.norm_sigma,
                    &r.interp_u, &r.interp_sigma})
    *p = std::sqrt(*p);
  return r;
}

ErrorReport error_report(const HybridSolution &sol, const ExactSolution &exact,
                         const GaussRule &rule) {
  return error_report(sol, exact, rule, interp_u(*sol.mesh, exact),
                      project_sigma(*sol.mesh, sol.material, exact, rule));
}

} // namespace psfem
