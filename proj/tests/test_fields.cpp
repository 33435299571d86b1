#include "psfem/bench.hpp"
#include "psfem/fields.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace psfem;

namespace {

struct Solved {
  QuadMesh mesh;
  AssembledSystem sys;
  HybridSolution sol;
};

Solved solve(const ManufacturedProblem &p, const Material &m, const QuadMesh &mesh,
             const GaussRule &rule) {
  Solved s{mesh, {}, {}};
  s.sys = assemble(s.mesh, m, p.exact.f, rule);
  s.sol = solve_dirichlet(s.sys, s.mesh, m, p.exact.u);
  return s;
}

} // namespace

// a(sigma - sigma^I, tau) = 0 for every tau in the element's stress space.
TEST(Fields, ProjectionOrthogonality) {
  const auto m = Material::from_young_poisson(1500, 0.3);
  const auto p = make_problem(1, m);
  const auto mesh = refine_bisection(p.initial_mesh);
  const auto rule = gauss_rule(4);
  const auto beta = project_sigma(mesh, m, p.exact, rule);
  const Eigen::Matrix3d M = weighted_compliance(m);
  double smax = 0.0;
  for (const auto &v : mesh.vertices()) {
    const auto s = p.exact.sigma(v);
    smax = std::max({smax, std::abs(s.t11), std::abs(s.t22), std::abs(s.t12)});
  }
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &g = mesh.element(k);
    for (int col = 0; col < 5; ++col) {
      const double r = integrate_on_element(
          g,
          [&](const Point &x, double xi, double eta) {
            const auto s = p.exact.sigma(x);
            const auto sh = stress_at(g, beta[k], xi, eta);
            const Eigen::Vector3d d(s.t11 - sh.t11, s.t22 - sh.t22, s.t12 - sh.t12);
            return (2 * m.mu) * d.dot(M * stress_mode_eval(g, xi, eta).col(col));
          },
          rule);
      EXPECT_LT(std::abs(r), 1e-9 * g.area() * smax) << k << ' ' << col;
    }
    // Consequence used by the stress recovery: equal cell means.
    for (int c = 0; c < 3; ++c) {
      const double exact_mean = integrate_on_element(
          g,
          [&](const Point &x, double, double) {
            const auto s = p.exact.sigma(x);
            return c == 0 ? s.t11 : c == 1 ? s.t22 : s.t12;
          },
          rule);
      EXPECT_NEAR(element_stress_moments(g, beta[k], rule)[c], exact_mean,
                  1e-9 * g.area() * smax);
    }
  }
}

TEST(Fields, LinearSolutionHasNoSuperclosenessError) {
  const auto m = Material::from_young_poisson(1500, 0.3);
  ExactSolution ex;
  ex.u = [](const Point &x) { return Eigen::Vector2d(0.1 * x.x() + 0.2 * x.y(), 0.3 * x.x() - 0.1 * x.y()); };
  ex.grad_u = [](const Point &) {
    Mat2 g;
    g << 0.1, 0.2, 0.3, -0.1;
    return g;
  };
  ex.sigma = [m](const Point &) { return stiffness_apply(m, SymTensor2{0.1, -0.1, 0.25}); };
  ex.f = [](const Point &) { return Eigen::Vector2d::Zero().eval(); };
  const auto mesh = refine_bisection(example_mesh(1));
  const auto rule = gauss_rule(3);
  const auto sys = assemble(mesh, m, ex.f, rule);
  const auto sol = solve_dirichlet(sys, mesh, m, ex.u);
  const auto r = error_report(sol, ex, rule);
  EXPECT_LT(r.rel_theta_u(), 1e-10);
  EXPECT_LT(r.rel_theta_sigma(), 1e-10);
  EXPECT_LT(r.rel_e_u(), 1e-10);
  EXPECT_LT(r.rel_e_sigma(), 1e-10);
  EXPECT_LT(r.interp_sigma / r.norm_sigma, 1e-12);
}

TEST(Fields, InterpolantAndGradient) {
  const auto mesh = refine_bisection(example_mesh(1));
  ExactSolution ex;
  ex.u = [](const Point &x) { return Eigen::Vector2d(2 * x.x() - x.y(), x.x() + 3 * x.y()); };
  const auto uI = interp_u(mesh, ex);
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const Mat2 g = displacement_gradient(mesh, uI, k, 0.3, -0.2);
    EXPECT_NEAR(g(0, 0), 2, 1e-12);
    EXPECT_NEAR(g(0, 1), -1, 1e-12);
    EXPECT_NEAR(g(1, 0), 1, 1e-12);
    EXPECT_NEAR(g(1, 1), 3, 1e-12);
  }
}

// Superclose quantities drop by about four per bisection, errors by two.
TEST(Fields, ConvergenceRates) {
  const auto m = Material::from_young_poisson(1500, 0.3);
  const auto p = make_problem(1, m);
  const auto rule = gauss_rule(4);
  auto mesh = refine_bisection(refine_bisection(p.initial_mesh));
  std::vector<ErrorReport> reps;
  for (int level = 0; level < 3; ++level) {
    auto s = solve(p, m, mesh, rule);
    double target = 0.0;
    for (const auto &g : s.mesh.geometry())
      target += integrate_on_element(
          g, [&](const Point &x, double, double) { return p.exact.sigma(x).trace(); }, rule);
    normalize_mean_trace(s.sol, rule, target);
    reps.push_back(error_report(s.sol, p.exact, rule));
    mesh = refine_bisection(mesh);
  }
  for (int i = 1; i < 3; ++i) {
    EXPECT_NEAR(std::log2(reps[i - 1].theta_u / reps[i].theta_u), 2.0, 0.15);
    EXPECT_NEAR(std::log2(reps[i - 1].theta_sigma / reps[i].theta_sigma), 2.0, 0.15);
    EXPECT_NEAR(std::log2(reps[i - 1].e_u / reps[i].e_u), 1.0, 0.05);
    EXPECT_NEAR(std::log2(reps[i - 1].e_sigma / reps[i].e_sigma), 1.0, 0.05);
  }
}
