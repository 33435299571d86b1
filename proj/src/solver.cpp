#include "psfem/solver.hpp"

#include "psfem/errors.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>

namespace psfem {

Vector8d gather(const QuadMesh &mesh, const Eigen::VectorXd &u, std::size_t k) {
  Vector8d ue;
  const auto &q = mesh.quads()[k];
  for (int i = 0; i < 4; ++i) {
    ue[2 * i] = u[2 * q[i]];
    ue[2 * i + 1] = u[2 * q[i] + 1];
  }
  return ue;
}

Vector8d HybridSolution::element_displacement(std::size_t k) const { return gather(*mesh, u, k); }

AssembledSystem assemble(const QuadMesh &mesh, const Material &material,
                         const VectorField &body_force, const GaussRule &rule) {
  AssembledSystem sys;
  const auto ndof = static_cast<Eigen::Index>(2 * mesh.num_vertices());
  sys.load = Eigen::VectorXd::Zero(ndof);
  sys.elements.reserve(mesh.num_elements());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(64 * mesh.num_elements());
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    auto em = element_matrices(mesh.element(k), material, rule, body_force, static_cast<long>(k));
    const auto &q = mesh.quads()[k];
    int dof[8];
    for (int i = 0; i < 4; ++i) {
      dof[2 * i] = 2 * q[i];
      dof[2 * i + 1] = 2 * q[i] + 1;
    }
    for (int i = 0; i < 8; ++i) {
      sys.load[dof[i]] += em.fe[i];
      for (int j = 0; j < 8; ++j) trip.emplace_back(dof[i], dof[j], em.Ke(i, j));
    }
    sys.elements.push_back(std::move(em));
  }
  sys.K.resize(ndof, ndof);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

HybridSolution solve_dirichlet(const AssembledSystem &system, const QuadMesh &mesh,
                               const Material &material, const DirichletData &g,
                               double tolerance) {
  const auto ndof = static_cast<Eigen::Index>(2 * mesh.num_vertices());
  if (mesh.num_vertices() == mesh.num_interior_vertices())
    throw InputError("solve_dirichlet: mesh has no boundary vertices");

  HybridSolution sol;
  sol.mesh = &mesh;
  sol.material = material;
  sol.u = Eigen::VectorXd::Zero(ndof);

  std::vector<Eigen::Index> free_index(ndof, -1);
  Eigen::Index nfree = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary_vertex()[v]) {
      const Eigen::Vector2d gv = g(mesh.vertices()[v]);
      sol.u[2 * v] = gv.x();
      sol.u[2 * v + 1] = gv.y();
    } else {
      free_index[2 * v] = nfree++;
      free_index[2 * v + 1] = nfree++;
    }
  }

  if (nfree > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
    for (Eigen::Index i = 0; i < ndof; ++i)
      if (free_index[i] >= 0) rhs[free_index[i]] = system.load[i];
    for (Eigen::Index col = 0; col < system.K.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(system.K, col); it; ++it) {
        const Eigen::Index fr = free_index[it.row()];
        if (fr < 0) continue;
        const Eigen::Index fc = free_index[it.col()];
        if (fc >= 0)
          trip.emplace_back(fr, fc, it.value());
        else
          rhs[fr] -= it.value() * sol.u[it.col()];
      }
    }
    SparseMatrix Kff(nfree, nfree);
    Kff.setFromTriplets(trip.begin(), trip.end());

    Eigen::SimplicialLDLT<SparseMatrix> ldlt(Kff);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("solve_dirichlet: factorization of the condensed system failed");
    Eigen::VectorXd x = ldlt.solve(rhs);
    const double rhs_norm = rhs.norm();
    const auto rel = [&](const Eigen::VectorXd &r) {
      return rhs_norm > 0.0 ? r.norm() / rhs_norm : r.norm();
    };
    Eigen::VectorXd r = rhs - Kff * x;
    for (int sweep = 0; sweep < 3 && rel(r) > tolerance; ++sweep) {
      x += ldlt.solve(r);
      r = rhs - Kff * x;
    }
    sol.relative_residual = rel(r);
    if (sol.relative_residual > tolerance)
      throw NumericError("solve_dirichlet: relative residual " +
                         std::to_string(sol.relative_residual) + " exceeds tolerance");
    for (Eigen::Index i = 0; i < ndof; ++i)
      if (free_index[i] >= 0) sol.u[i] = x[free_index[i]];
  }

  sol.beta.reserve(mesh.num_elements());
  for (std::size_t k = 0; k < mesh.num_elements(); ++k)
    sol.beta.push_back(element_stress_from_displacement(system.elements[k], gather(mesh, sol.u, k)));
  return sol;
}

double mean_trace_integral(const HybridSolution &sol, const GaussRule &rule) {
  const QuadMesh &mesh = *sol.mesh;
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &g = mesh.element(k);
    for (const auto &q : rule.nodes)
      total += q.weight * g.jacobian(q.xi, q.eta) * stress_at(g, sol.beta[k], q.xi, q.eta).trace();
  }
  return total;
}

double normalize_mean_trace(HybridSolution &sol, const GaussRule &rule, double target) {
  double area = 0.0;
  for (const auto &g : sol.mesh->geometry()) area += g.area();
  const double c = (target - mean_trace_integral(sol, rule)) / (2.0 * area);
  for (auto &b : sol.beta) {
    b[0] += c;
    b[1] += c;
  }
  return c;
}

double equilibrium_residual(const AssembledSystem &system, const HybridSolution &sol) {
  const QuadMesh &mesh = *sol.mesh;
  Eigen::VectorXd internal = Eigen::VectorXd::Zero(system.load.size());
  Eigen::VectorXd magnitude = Eigen::VectorXd::Zero(system.load.size());
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const Vector8d fk = system.elements[k].G.transpose() * sol.beta[k];
    const auto &q = mesh.quads()[k];
    for (int i = 0; i < 4; ++i) {
      for (int c = 0; c < 2; ++c) {
        internal[2 * q[i] + c] += fk[2 * i + c];
        magnitude[2 * q[i] + c] += std::abs(fk[2 * i + c]);
      }
    }
  }
  double r2 = 0.0, f2 = 0.0, m2 = 0.0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary_vertex()[v]) continue;
    for (int c = 0; c < 2; ++c) {
      const double d = internal[2 * v + c] - system.load[2 * v + c];
      r2 += d * d;
      f2 += system.load[2 * v + c] * system.load[2 * v + c];
      m2 += magnitude[2 * v + c] * magnitude[2 * v + c];
    }
  }
  const double scale = std::max(f2, m2);
  return scale > 0.0 ? std::sqrt(r2 / scale) : 0.0;
}

} // namespace psfem
