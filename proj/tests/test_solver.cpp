#include "psfem/bench.hpp"
#include "psfem/solver.hpp"

#include <gtest/gtest.h>

using namespace psfem;

namespace {

const auto kZero = [](const Point &) { return Eigen::Vector2d::Zero().eval(); };

} // namespace

TEST(Solver, PatchTestOnIrregularMesh) {
  for (double nu : {0.3, 0.4999}) {
    const auto m = Material::from_young_poisson(1500, nu);
    auto mesh = example_mesh(1);
    for (int level = 0; level < 3; ++level) {
      const auto r = patch_test(mesh, m, gauss_rule(2));
      EXPECT_LT(r.displacement_error, 1e-9);
      EXPECT_LT(r.stress_error, 1e-9 * (2 * m.mu + m.lambda));
      EXPECT_LT(r.equilibrium_residual, 1e-9);
      mesh = refine_bisection(mesh);
    }
  }
}

TEST(Solver, GlobalMatrixSymmetricAndEnergyConsistent) {
  const auto mesh = refine_bisection(example_mesh(1));
  const auto m = Material::from_young_poisson(1500, 0.3);
  const auto rule = gauss_rule(2);
  const auto sys = assemble(mesh, m, kZero, rule);
  const Eigen::MatrixXd K(sys.K);
  EXPECT_LT((K - K.transpose()).norm(), 1e-12 * K.norm());

  Eigen::VectorXd u(K.rows());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = std::sin(0.7 * i + 0.3);
  double energy = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &em = sys.elements[k];
    const Vector5d beta = element_stress_from_displacement(em, gather(mesh, u, k));
    energy += beta.dot(em.H * beta);
  }
  EXPECT_NEAR(u.dot(K * u), energy, 1e-10 * energy);
}

TEST(Solver, ZeroDataGivesZeroSolution) {
  const auto mesh = refine_bisection(example_mesh(2));
  const auto m = Material::from_young_poisson(1500, 0.3);
  const auto rule = gauss_rule(2);
  const auto sys = assemble(mesh, m, kZero, rule);
  const auto sol = solve_dirichlet(sys, mesh, m, kZero);
  EXPECT_EQ(sol.u.norm(), 0.0);
  for (const auto &b : sol.beta) EXPECT_EQ(b.norm(), 0.0);
}

TEST(Solver, EquilibriumAndTraceShift) {
  const auto m = Material::from_young_poisson(1500, 0.49);
  const auto p = make_problem(1, m);
  const auto mesh = refine_bisection(refine_bisection(p.initial_mesh));
  const auto rule = gauss_rule(4);
  const auto sys = assemble(mesh, m, p.exact.f, rule);
  auto sol = solve_dirichlet(sys, mesh, m, p.exact.u);
  EXPECT_LT(sol.relative_residual, 1e-12);
  EXPECT_LT(equilibrium_residual(sys, sol), 1e-10);

  const Eigen::VectorXd u_before = sol.u;
  const double c = normalize_mean_trace(sol, rule, 0.25);
  EXPECT_NEAR(mean_trace_integral(sol, rule), 0.25, 1e-10 * std::max(1.0, std::abs(c)));
  // A constant hydrostatic shift stays in equilibrium with the same u_h.
  EXPECT_LT(equilibrium_residual(sys, sol), 1e-10);
  EXPECT_EQ((sol.u - u_before).norm(), 0.0);
}

TEST(Solver, BoundaryValuesImposed) {
  const auto mesh = refine_bisection(example_mesh(1));
  const auto m = Material::from_young_poisson(1500, 0.3);
  const auto g = [](const Point &p) { return Eigen::Vector2d(p.x() * p.y(), 1 - p.x()); };
  const auto sys = assemble(mesh, m, kZero, gauss_rule(2));
  const auto sol = solve_dirichlet(sys, mesh, m, g);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    if (!mesh.boundary_vertex()[i]) continue;
    const auto gv = g(mesh.vertices()[i]);
    EXPECT_DOUBLE_EQ(sol.u[2 * i], gv.x());
    EXPECT_DOUBLE_EQ(sol.u[2 * i + 1], gv.y());
  }
}
