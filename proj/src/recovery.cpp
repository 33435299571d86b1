#include "psfem/recovery.hpp"

#include "psfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>

namespace psfem {

namespace {

constexpr double kConditionLimit = 1e12;

double condition_number(const Eigen::MatrixXd &sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const auto &ev = es.eigenvalues();
  if (ev[0] <= 0.0) return std::numeric_limits<double>::infinity();
  return ev[ev.size() - 1] / ev[0];
}

VertexPatch patch_from_elements(const QuadMesh &mesh, int center, std::vector<int> elements) {
  VertexPatch p;
  p.center = center;
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  p.elements = std::move(elements);
  std::set<int> nodes;
  for (int k : p.elements) {
    const auto &q = mesh.quads()[k];
    for (int i = 0; i < 4; ++i) {
      nodes.insert(q[i]);
      p.h = std::max(p.h, (mesh.vertices()[q[i]] - mesh.vertices()[q[(i + 1) % 4]]).norm());
    }
  }
  p.nodes.assign(nodes.begin(), nodes.end());
  return p;
}

// Least-squares operator of the PPR fit: c = P * (values at patch.nodes).
struct PprOperator {
  VertexPatch patch;
  Eigen::Matrix<double, 6, Eigen::Dynamic> P;
};

std::optional<PprOperator> try_ppr_operator(const QuadMesh &mesh, const VertexPatch &patch) {
  const auto n = static_cast<Eigen::Index>(patch.nodes.size());
  if (n < 6) return std::nullopt;
  const Point &o = mesh.vertices()[patch.center];
  Eigen::MatrixXd Q(n, 6);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Point s = (mesh.vertices()[patch.nodes[r]] - o) / patch.h;
    Q.row(r) << 1.0, s.x(), s.y(), s.x() * s.x(), s.x() * s.y(), s.y() * s.y();
  }
  const Eigen::MatrixXd N = Q.transpose() * Q;
  if (condition_number(N) > kConditionLimit) return std::nullopt;
  PprOperator op{patch, {}};
  op.P = N.ldlt().solve(Q.transpose());
  return op;
}

PprOperator ppr_operator(const QuadMesh &mesh, const VertexPatch &patch) {
  if (auto op = try_ppr_operator(mesh, patch)) return *op;
  if (auto op = try_ppr_operator(mesh, enlarge_patch(mesh, patch))) return *op;
  throw NumericError("PPR fit is rank deficient at vertex " + std::to_string(patch.center) +
                     " even after enlarging the patch");
}

QuadraticFit apply_ppr(const QuadMesh &mesh, const PprOperator &op,
                       std::span<const double> values) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(op.patch.nodes.size()));
  for (std::size_t r = 0; r < op.patch.nodes.size(); ++r) b[r] = values[op.patch.nodes[r]];
  QuadraticFit fit;
  fit.origin = mesh.vertices()[op.patch.center];
  fit.h = op.patch.h;
  fit.c = op.P * b;
  return fit;
}

// Least-squares operator of the moment fit, in physical coefficients:
// alpha = P * (moments over patch.elements).
Eigen::Matrix<double, 3, Eigen::Dynamic> rh_operator(const QuadMesh &mesh,
                                                      const VertexPatch &patch) {
  const auto N = static_cast<Eigen::Index>(patch.elements.size());
  if (N < 3)
    throw UnsupportedMeshError("moment fit needs at least three elements around vertex " +
                               std::to_string(patch.center));
  const Point &o = mesh.vertices()[patch.center];
  Eigen::MatrixXd A(N, 3);
  for (Eigen::Index j = 0; j < N; ++j)
    A.row(j) = geometric_moments(mesh.element(patch.elements[j]), o, patch.h).transpose();
  const Eigen::Matrix3d M = A.transpose() * A;
  if (condition_number(M) > kConditionLimit)
    throw NumericError("moment fit normal matrix is singular at vertex " +
                       std::to_string(patch.center) + " (collinear element centers)");
  // Scaled coefficients c: phi = c0 + c1 (x - ox)/h + c2 (y - oy)/h.
  const Eigen::MatrixXd C = M.ldlt().solve(A.transpose());
  Eigen::Matrix3d to_phys;
  to_phys << 1.0, -o.x() / patch.h, -o.y() / patch.h,
             0.0, 1.0 / patch.h, 0.0,
             0.0, 0.0, 1.0 / patch.h;
  return to_phys * C;
}

} // namespace

VertexPatch vertex_patch(const QuadMesh &mesh, int vertex) {
  return patch_from_elements(mesh, vertex, mesh.patches()[vertex]);
}

VertexPatch enlarge_patch(const QuadMesh &mesh, const VertexPatch &patch) {
  std::vector<int> elements = patch.elements;
  for (int v : patch.nodes)
    for (int k : mesh.patches()[v]) elements.push_back(k);
  return patch_from_elements(mesh, patch.center, std::move(elements));
}

double QuadraticFit::value(const Point &p) const {
  const Point s = (p - origin) / h;
  return c[0] + c[1] * s.x() + c[2] * s.y() + c[3] * s.x() * s.x() + c[4] * s.x() * s.y() +
         c[5] * s.y() * s.y();
}

Eigen::Vector2d QuadraticFit::gradient(const Point &p) const {
  const Point s = (p - origin) / h;
  return Eigen::Vector2d(c[1] + 2.0 * c[3] * s.x() + c[4] * s.y(),
                         c[2] + c[4] * s.x() + 2.0 * c[5] * s.y()) /
         h;
}

QuadraticFit ppr_fit(const QuadMesh &mesh, const VertexPatch &patch,
                     std::span<const double> nodal_values) {
  return apply_ppr(mesh, ppr_operator(mesh, patch), nodal_values);
}

Eigen::Vector2d ppr_vertex_gradient(const QuadMesh &mesh, const VertexPatch &patch,
                                    std::span<const double> nodal_values) {
  return ppr_fit(mesh, patch, nodal_values).gradient(mesh.vertices()[patch.center]);
}

Eigen::Vector3d geometric_moments(const ElementGeometry &g, const Point &origin, double scale) {
  const double J0 = g.J[0], J1 = g.J[1], J2 = g.J[2];
  const double m0 = 4.0 * J0;
  const double mx = 4.0 * ((g.a0() - origin.x()) * J0 + (g.a1() * J1 + g.a2() * J2) / 3.0);
  const double my = 4.0 * ((g.b0() - origin.y()) * J0 + (g.b1() * J1 + g.b2() * J2) / 3.0);
  return {m0, mx / scale, my / scale};
}

LinearFit rh_vertex_fit(const QuadMesh &mesh, const VertexPatch &patch,
                        std::span<const double> cell_moments) {
  const auto P = rh_operator(mesh, patch);
  const Eigen::Map<const Eigen::VectorXd> b(cell_moments.data(),
                                            static_cast<Eigen::Index>(cell_moments.size()));
  return {P * b};
}

Eigen::VectorXd RecoveredField::evaluate(const QuadMesh &mesh, std::size_t k, double xi,
                                         double eta) const {
  const Eigen::Vector4d N = shape_values(xi, eta);
  const auto &q = mesh.quads()[k];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(values.cols());
  for (int i = 0; i < 4; ++i) out += N[i] * values.row(q[i]).transpose();
  return out;
}

RecoveredField recover_gradient(const QuadMesh &mesh, const Eigen::VectorXd &u) {
  const std::size_t nv = mesh.num_vertices();
  std::vector<double> ux(nv), uy(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    ux[v] = u[2 * v];
    uy[v] = u[2 * v + 1];
  }
  RecoveredField field{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), 4)};
  std::vector<int> count(nv, 0);
  const auto &boundary = mesh.boundary_vertex();
  for (std::size_t i = 0; i < nv; ++i) {
    if (boundary[i]) continue;
    const VertexPatch patch = vertex_patch(mesh, static_cast<int>(i));
    const PprOperator op = ppr_operator(mesh, patch);
    const QuadraticFit fx = apply_ppr(mesh, op, ux);
    const QuadraticFit fy = apply_ppr(mesh, op, uy);
    const auto put = [&](std::size_t row, const Point &p) {
      field.values.row(row).segment<2>(0) += fx.gradient(p).transpose();
      field.values.row(row).segment<2>(2) += fy.gradient(p).transpose();
    };
    put(i, mesh.vertices()[i]);
    for (int b : patch.nodes) {
      if (!boundary[b]) continue;
      put(b, mesh.vertices()[b]);
      ++count[b];
    }
  }
  for (std::size_t b = 0; b < nv; ++b) {
    if (!boundary[b]) continue;
    if (count[b] == 0)
      throw UnsupportedMeshError("boundary vertex " + std::to_string(b) +
                                 " lies in no interior vertex patch; refine the mesh");
    field.values.row(b) /= count[b];
  }
  return field;
}

RecoveredField recover_from_moments(const QuadMesh &mesh, const Eigen::MatrixXd &moments) {
  const std::size_t nv = mesh.num_vertices();
  const Eigen::Index ncomp = moments.cols();
  RecoveredField field{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), ncomp)};
  std::vector<int> count(nv, 0);
  const auto &boundary = mesh.boundary_vertex();
  for (std::size_t i = 0; i < nv; ++i) {
    if (boundary[i]) continue;
    const VertexPatch patch = vertex_patch(mesh, static_cast<int>(i));
    const auto P = rh_operator(mesh, patch);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(patch.elements.size()), ncomp);
    for (std::size_t j = 0; j < patch.elements.size(); ++j)
      b.row(static_cast<Eigen::Index>(j)) = moments.row(patch.elements[j]);
    const Eigen::MatrixXd alpha = P * b; // 3 x ncomp
    const auto put = [&](std::size_t row, const Point &p) {
      field.values.row(row) += (alpha.row(0) + p.x() * alpha.row(1) + p.y() * alpha.row(2));
    };
    put(i, mesh.vertices()[i]);
    for (int bv : patch.nodes) {
      if (!boundary[bv]) continue;
      put(bv, mesh.vertices()[bv]);
      ++count[bv];
    }
  }
  for (std::size_t b = 0; b < nv; ++b) {
    if (!boundary[b]) continue;
    if (count[b] == 0)
      throw UnsupportedMeshError("boundary vertex " + std::to_string(b) +
                                 " lies in no interior vertex patch; refine the mesh");
    field.values.row(b) /= count[b];
  }
  return field;
}

RecoveredField recover_stress(const QuadMesh &mesh, const HybridSolution &sol,
                              const GaussRule &rule) {
  Eigen::MatrixXd moments(static_cast<Eigen::Index>(mesh.num_elements()), 3);
  for (std::size_t k = 0; k < mesh.num_elements(); ++k)
    moments.row(static_cast<Eigen::Index>(k)) =
        element_stress_moments(mesh.element(k), sol.beta[k], rule).transpose();
  return recover_from_moments(mesh, moments);
}

Estimators estimators(const HybridSolution &sol, const RecoveredField &grad_field,
                      const RecoveredField &stress_field, const GaussRule &rule) {
  const QuadMesh &mesh = *sol.mesh;
  Estimators est;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &g = mesh.element(k);
    for (const auto &q : rule.nodes) {
      const double wj = q.weight * g.jacobian(q.xi, q.eta);
      const Mat2 duh = displacement_gradient(mesh, sol.u, k, q.xi, q.eta);
      const Eigen::VectorXd gr = grad_field.evaluate(mesh, k, q.xi, q.eta);
      Mat2 rg;
      rg << gr[0], gr[1], gr[2], gr[3];
      est.eta_u += wj * (rg - duh).squaredNorm();
      const SymTensor2 sh = stress_at(g, sol.beta[k], q.xi, q.eta);
      const Eigen::VectorXd sr = stress_field.evaluate(mesh, k, q.xi, q.eta);
      const SymTensor2 d{sr[0] - sh.t11, sr[1] - sh.t22, sr[2] - sh.t12};
      est.eta_sigma += wj * component_norm2(d);
    }
  }
  est.eta_u = std::sqrt(est.eta_u);
  est.eta_sigma = std::sqrt(est.eta_sigma);
  return est;
}

RecoveryErrors recovery_errors(const QuadMesh &mesh, const ExactSolution &exact,
                               const RecoveredField &grad_field,
                               const RecoveredField &stress_field, const GaussRule &rule) {
  RecoveryErrors err;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &g = mesh.element(k);
    for (const auto &q : rule.nodes) {
      const double wj = q.weight * g.jacobian(q.xi, q.eta);
      const Point x = map_ref_to_phys(g, q.xi, q.eta);
      const Eigen::VectorXd gr = grad_field.evaluate(mesh, k, q.xi, q.eta);
      Mat2 rg;
      rg << gr[0], gr[1], gr[2], gr[3];
      err.gradient += wj * (exact.grad_u(x) - rg).squaredNorm();
      const SymTensor2 s = exact.sigma(x);
      const Eigen::VectorXd sr = stress_field.evaluate(mesh, k, q.xi, q.eta);
      const SymTensor2 d{s.t11 - sr[0], s.t22 - sr[1], s.t12 - sr[2]};
      err.stress += wj * component_norm2(d);
    }
  }
  err.gradient = std::sqrt(err.gradient);
  err.stress = std::sqrt(err.stress);
  return err;
}

} // namespace psfem
