#include "psfem/bench.hpp"

#include "psfem/errors.hpp"
#include "psfem/solver.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace psfem {

namespace {

constexpr double pi = std::numbers::pi;

std::string mesh_label(int nx, int ny) { return std::to_string(nx) + "x" + std::to_string(ny); }

} // namespace

QuadMesh example_mesh(int which) {
  if (which == 1) {
    // 0:(0,0) 1:(0.4,0) 2:(1,0) 3:(0,0.3) 4:(0.5,0.5) 5:(1,0.6) 6:(0,1) 7:(0.3,1) 8:(1,1)
    std::vector<Point> v = {{0.0, 0.0}, {0.4, 0.0}, {1.0, 0.0}, {0.0, 0.3}, {0.5, 0.5},
                            {1.0, 0.6}, {0.0, 1.0}, {0.3, 1.0}, {1.0, 1.0}};
    std::vector<std::array<int, 4>> q = {{0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}};
    return QuadMesh(std::move(v), std::move(q));
  }
  if (which == 2) {
    const std::array<double, 6> bottom = {0.0, 1.0, 2.0, 4.0, 7.0, 10.0};
    const std::array<double, 6> top = {0.0, 2.0, 4.0, 5.0, 6.0, 10.0};
    std::vector<Point> v;
    for (double x : bottom) v.emplace_back(x, -1.0);
    for (double x : top) v.emplace_back(x, 1.0);
    std::vector<std::array<int, 4>> q;
    for (int i = 0; i < 5; ++i) q.push_back({i, i + 1, 6 + i + 1, 6 + i});
    return QuadMesh(std::move(v), std::move(q));
  }
  throw InputError("unknown example " + std::to_string(which) + " (expected 1 or 2)");
}

ExactSolution trigonometric_solution(const Material &m) {
  const double nu = m.nu, E = m.E;
  ExactSolution ex;
  ex.u = [nu](const Point &p) {
    const double x = p.x(), y = p.y();
    return Eigen::Vector2d(
        (1 + nu) * std::cos(pi * x) * std::sin(pi * y) - 2 * (1 - nu * nu) * x * y,
        -(1 + nu) * std::sin(pi * x) * std::cos(pi * y) + (1 - nu * nu) * x * x +
            nu * (1 + nu) * (y * y - 1));
  };
  ex.grad_u = [nu](const Point &p) {
    const double x = p.x(), y = p.y();
    const double ss = std::sin(pi * x) * std::sin(pi * y);
    const double cc = std::cos(pi * x) * std::cos(pi * y);
    Mat2 g;
    g << -(1 + nu) * pi * ss - 2 * (1 - nu * nu) * y, (1 + nu) * pi * cc - 2 * (1 - nu * nu) * x,
        -(1 + nu) * pi * cc + 2 * (1 - nu * nu) * x, (1 + nu) * pi * ss + 2 * nu * (1 + nu) * y;
    return g;
  };
  ex.sigma = [E](const Point &p) {
    const double ss = std::sin(pi * p.x()) * std::sin(pi * p.y());
    return SymTensor2{E * (-pi * ss - 2 * p.y()), E * pi * ss, 0.0};
  };
  ex.f = [E](const Point &p) {
    const double x = p.x(), y = p.y();
    return Eigen::Vector2d(E * pi * pi * std::cos(pi * x) * std::sin(pi * y),
                           -E * pi * pi * std::sin(pi * x) * std::cos(pi * y));
  };
  return ex;
}

ManufacturedProblem make_problem(int which, const Material &m) {
  ManufacturedProblem p;
  p.which = which;
  p.initial_mesh = example_mesh(which);
  p.exact = trigonometric_solution(m);
  if (which == 1) {
    p.label = "Example 1: unit square, 2x2 irregular mesh";
    p.domain = {0.0, 1.0, 0.0, 1.0};
    p.nx0 = 2;
    p.ny0 = 2;
  } else {
    p.label = "Example 2: [0,10]x[-1,1], 5x1 irregular mesh";
    p.domain = {0.0, 10.0, -1.0, 1.0};
    p.nx0 = 5;
    p.ny0 = 1;
  }
  return p;
}

SelfCheck self_check(const ManufacturedProblem &p, const Material &m, int samples,
                     unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(p.domain[0], p.domain[1]);
  std::uniform_real_distribution<double> uy(p.domain[2], p.domain[3]);
  const auto &ex = p.exact;
  // Fourth-order central differences: a larger step keeps roundoff small
  // enough to survive the lambda amplification in C eps near nu = 1/2.
  const double d = 1e-3;
  const auto diff = [d](const auto &f, const Point &x, const Point &dir) {
    using V = decltype(f(x));
    const V a = f(x + d * dir), b = f(x - d * dir), c = f(x + 2 * d * dir), e = f(x - 2 * d * dir);
    return V((8.0 * (a - b) - (c - e)) / (12.0 * d));
  };
  const auto sigma_vec = [&ex](const Point &x) {
    const SymTensor2 s = ex.sigma(x);
    return Eigen::Vector3d(s.t11, s.t22, s.t12);
  };
  const double sigma_scale = m.E * pi; // stress amplitude
  const double force_scale = m.E * pi * pi;
  const Point ex_dir(1.0, 0.0), ey_dir(0.0, 1.0);
  SelfCheck out;
  for (int sample = 0; sample < samples; ++sample) {
    const Point x(ux(rng), uy(rng));
    const Eigen::Vector3d dsx = diff(sigma_vec, x, ex_dir), dsy = diff(sigma_vec, x, ey_dir);
    const double div1 = dsx[0] + dsy[2];
    const double div2 = dsx[2] + dsy[1];
    const Eigen::Vector2d f = ex.f(x);
    out.equilibrium =
        std::max(out.equilibrium, std::hypot(div1 + f.x(), div2 + f.y()) / force_scale);

    const Eigen::Vector2d dudx = diff(ex.u, x, ex_dir);
    const Eigen::Vector2d dudy = diff(ex.u, x, ey_dir);
    const SymTensor2 eps{dudx.x(), dudy.y(), 0.5 * (dudy.x() + dudx.y())};
    const SymTensor2 s_fd = stiffness_apply(m, eps);
    const SymTensor2 s = ex.sigma(x);
    const SymTensor2 ds{s.t11 - s_fd.t11, s.t22 - s_fd.t22, s.t12 - s_fd.t12};
    out.constitutive = std::max(out.constitutive, std::sqrt(contract(ds, ds)) / sigma_scale);

    Mat2 g_fd;
    g_fd << dudx.x(), dudy.x(), dudx.y(), dudy.y();
    out.constitutive =
        std::max(out.constitutive, (ex.grad_u(x) - g_fd).norm() / (pi * (1 + m.nu)));
  }
  return out;
}

PatchTestResult patch_test(const QuadMesh &mesh, const Material &m, const GaussRule &rule) {
  const auto u = [](const Point &p) {
    return Eigen::Vector2d((p.x() + 2 * p.y()) / 10.0, (3 * p.x() - p.y()) / 10.0);
  };
  const SymTensor2 exact = stiffness_apply(m, SymTensor2{0.1, -0.1, 0.25});
  const auto sys = assemble(mesh, m, {}, rule);
  const auto sol = solve_dirichlet(sys, mesh, m, u);
  PatchTestResult r;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Eigen::Vector2d e = u(mesh.vertices()[v]);
    r.displacement_error = std::max(
        r.displacement_error, std::max(std::abs(sol.u[2 * v] - e.x()), std::abs(sol.u[2 * v + 1] - e.y())));
  }
  for (const auto &b : sol.beta) {
    const double err = std::max({std::abs(b[0] - exact.t11), std::abs(b[1] - exact.t22),
                                 std::abs(b[2] - exact.t12), std::abs(b[3]), std::abs(b[4])});
    r.stress_error = std::max(r.stress_error, err);
  }
  r.equilibrium_residual = equilibrium_residual(sys, sol);
  return r;
}

double fitted_order(const std::vector<double> &values, int last) {
  const std::size_t n = values.size();
  const std::size_t start = (last > 0 && static_cast<std::size_t>(last) < n) ? n - last : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t i = start; i < n; ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log2(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1;
  }
  const double denom = count * sxx - sx * sx;
  if (count < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -(count * sxy - sx * sy) / denom;
}

OrderSet compute_orders(const std::vector<LevelResult> &levels) {
  OrderSet o;
  const std::size_t n = levels.size();
  for (int c = 0; c < 6; ++c) {
    std::vector<double> col;
    for (const auto &l : levels) col.push_back(l.columns()[c]);
    o.regression[c] = fitted_order(col);
    if (n >= 2) {
      o.last_ratio[c] = std::log2(col[n - 2] / col[n - 1]);
      o.endpoint[c] = std::log2(col[0] / col[n - 1]) / static_cast<double>(n - 1);
    } else {
      o.last_ratio[c] = o.endpoint[c] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return o;
}

LevelResult run_level(const ManufacturedProblem &p, const Material &m, const QuadMesh &mesh,
                      const GaussRule &rule, int level, int nx, int ny) {
  LevelResult r;
  r.level = level;
  r.nx = nx;
  r.ny = ny;
  r.label = mesh_label(nx, ny);
  r.h_max = mesh.h_max();
  r.quality = quality_report(mesh);

  const auto sys = assemble(mesh, m, p.exact.f, rule);
  auto sol = solve_dirichlet(sys, mesh, m, p.exact.u);
  double trace_target = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k)
    trace_target += integrate_on_element(
        mesh.element(k), [&](const Point &x, double, double) { return p.exact.sigma(x).trace(); },
        rule);
  normalize_mean_trace(sol, rule, trace_target);
  const auto uI = interp_u(mesh, p.exact);
  const auto betaI = project_sigma(mesh, m, p.exact, rule, sys.elements);
  r.errors = error_report(sol, p.exact, rule, uI, betaI);

  const auto grad = recover_gradient(mesh, sol.u);
  const auto stress = recover_stress(mesh, sol, rule);
  r.est = estimators(sol, grad, stress, rule);
  r.recovery = recovery_errors(mesh, p.exact, grad, stress, rule);
  return r;
}

ConvergenceTable run_ladder(int which, const Material &m, int levels, const GaussRule &rule,
                            int first_refinement) {
  if (levels < 2) throw InputError("run_ladder: need at least two levels");
  const ManufacturedProblem p = make_problem(which, m);
  ConvergenceTable t;
  t.example = which;
  t.nu = m.nu;
  t.E = m.E;
  t.gauss_n = rule.n;

  QuadMesh mesh = p.initial_mesh;
  int nx = p.nx0, ny = p.ny0;
  for (int r = 0; r < first_refinement; ++r) {
    mesh = refine_bisection(mesh);
    nx *= 2;
    ny *= 2;
  }
  for (int level = 0; level < levels; ++level) {
    if (level > 0) {
      mesh = refine_bisection(mesh);
      nx *= 2;
      ny *= 2;
    }
    t.levels.push_back(run_level(p, m, mesh, rule, level, nx, ny));
  }
  t.orders = compute_orders(t.levels);
  return t;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream &os, const ConvergenceTable &t) {
  os << "level,label,h_max,theta_u,e_u,eta_u,theta_s,e_s,eta_s\n";
  for (const auto &l : t.levels) {
    os << l.level << ',' << l.label << ',' << shortest(l.h_max);
    for (double v : l.columns()) os << ',' << shortest(v);
    os << '\n';
  }
  const auto row = [&](const char *name, const std::array<double, 6> &vals) {
    os << name << ",order,";
    for (double v : vals) os << ',' << shortest(v);
    os << '\n';
  };
  row("order_fit", t.orders.endpoint);
  row("order_last", t.orders.last_ratio);
}

void write_json(std::ostream &os, const ConvergenceTable &t) {
  using nlohmann::json;
  json j;
  j["example"] = t.example;
  j["nu"] = t.nu;
  j["E"] = t.E;
  j["gauss_n"] = t.gauss_n;
  json rows = json::array();
  for (const auto &l : t.levels) {
    json r;
    r["level"] = l.level;
    r["label"] = l.label;
    r["h_max"] = l.h_max;
    const auto cols = l.columns();
    for (int c = 0; c < 6; ++c) r[kColumnNames[c]] = cols[c];
    r["recovery_error_gradient"] = l.recovery.gradient / l.errors.norm_u;
    r["recovery_error_stress"] = l.recovery.stress / l.errors.norm_sigma;
    json q;
    q["varrho"] = l.quality.varrho;
    q["varrho_above_two"] = l.quality.varrho_above_two;
    q["max_d_K"] = l.quality.d_K.empty()
                       ? 0.0
                       : *std::max_element(l.quality.d_K.begin(), l.quality.d_K.end());
    q["mc2_max_deviation"] = l.quality.mc2_max_deviation;
    q["jamet_ratio"] = l.quality.jamet_ratio;
    q["min_jacobian_margin"] = l.quality.min_jacobian_margin;
    r["mesh_quality"] = q;
    rows.push_back(r);
  }
  j["levels"] = rows;
  const auto orders = [&](const std::array<double, 6> &vals) {
    json o;
    for (int c = 0; c < 6; ++c) o[kColumnNames[c]] = vals[c];
    return o;
  };
  j["orders"] = {{"endpoint", orders(t.orders.endpoint)},
                 {"regression", orders(t.orders.regression)},
                 {"last_ratio", orders(t.orders.last_ratio)}};
  os << j.dump(2) << '\n';
}

void write_pretty(std::ostream &os, const ConvergenceTable &t) {
  static const std::array<const char *, 6> names = {"theta_u", "e_u", "eta_u",
                                                    "theta_s", "e_s", "eta_s"};
  std::ostringstream out;
  out << "Example " << t.example << ", nu = " << t.nu << ", E = " << t.E << '\n';
  out << std::left << std::setw(10) << "error";
  for (const auto &l : t.levels) out << std::right << std::setw(10) << l.label;
  out << std::setw(8) << "order" << '\n';
  out << std::fixed;
  for (int c = 0; c < 6; ++c) {
    out << std::left << std::setw(10) << names[c] << std::right;
    for (const auto &l : t.levels) out << std::setw(10) << std::setprecision(4) << l.columns()[c];
    out << std::setw(8) << std::setprecision(2) << t.orders.endpoint[c] << '\n';
  }
  os << out.str();
}

} // namespace psfem
