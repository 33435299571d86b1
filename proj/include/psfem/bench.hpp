#pragma once

#include "psfem/fields.hpp"
#include "psfem/material.hpp"
#include "psfem/mesh.hpp"
#include "psfem/quadrature.hpp"
#include "psfem/recovery.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace psfem {

/// Initial meshes of the two benchmark problems: the 2x2 irregular mesh of
/// the unit square (which = 1) and the 5x1 irregular mesh of [0,10]x[-1,1]
/// (which = 2).
QuadMesh example_mesh(int which);

/// Smooth plane-strain solution shared by both benchmarks:
///   u = (1+nu) cos(pi x) sin(pi y) - 2 (1-nu^2) x y,
///   v = -(1+nu) sin(pi x) cos(pi y) + (1-nu^2) x^2 + nu (1+nu) (y^2 - 1),
/// with sigma = E [[-pi s - 2y, 0], [0, pi s]], s = sin(pi x) sin(pi y).
ExactSolution trigonometric_solution(const Material &m);

struct ManufacturedProblem {
  int which = 1;
  std::string label;
  std::array<double, 4> domain{}; // x0, x1, y0, y1
  ExactSolution exact;
  QuadMesh initial_mesh;
  int nx0 = 1, ny0 = 1; // element counts of the initial mesh
};

ManufacturedProblem make_problem(int which, const Material &m);

/// Maximum relative finite-difference mismatch of -div sigma = f and
/// sigma = C eps(u) at `samples` pseudo-random points of the domain.
struct SelfCheck {
  double equilibrium = 0.0;
  double constitutive = 0.0;
};
SelfCheck self_check(const ManufacturedProblem &p, const Material &m, int samples = 100,
                     unsigned seed = 12345);

/// Linear-field patch test on a given mesh of the unit square.
struct PatchTestResult {
  double displacement_error = 0.0; // max nodal |u_h - u|
  double stress_error = 0.0;       // max |beta - exact| over elements
  double equilibrium_residual = 0.0;
};
PatchTestResult patch_test(const QuadMesh &mesh, const Material &m, const GaussRule &rule);

struct LevelResult {
  int level = 0;
  std::string label;
  int nx = 0, ny = 0;
  double h_max = 0.0;
  ErrorReport errors;
  Estimators est;
  RecoveryErrors recovery;
  MeshQualityReport quality;

  double theta_u() const { return errors.rel_theta_u(); }
  double e_u() const { return errors.rel_e_u(); }
  double eta_u() const { return est.eta_u / errors.norm_u; }
  double theta_s() const { return errors.rel_theta_sigma(); }
  double e_s() const { return errors.rel_e_sigma(); }
  double eta_s() const { return est.eta_sigma / errors.norm_sigma; }
  std::array<double, 6> columns() const {
    return {theta_u(), e_u(), eta_u(), theta_s(), e_s(), eta_s()};
  }
};

inline constexpr std::array<const char *, 6> kColumnNames = {"theta_u", "e_u", "eta_u",
                                                             "theta_s", "e_s", "eta_s"};

/// Convergence orders with h halving per level.
struct OrderSet {
  std::array<double, 6> regression{}; // least squares over all levels
  std::array<double, 6> last_ratio{}; // log2(e_{n-1} / e_n)
  std::array<double, 6> endpoint{};   // log2(e_0 / e_{n-1}) / (n - 1)
};

struct ConvergenceTable {
  int example = 1;
  double nu = 0.0;
  double E = 0.0;
  int gauss_n = 4;
  std::vector<LevelResult> levels;
  OrderSet orders;
};

/// Least-squares order of values against level index (h halves per level),
/// using the last `last` entries (all when last <= 0).
double fitted_order(const std::vector<double> &values, int last = 0);

OrderSet compute_orders(const std::vector<LevelResult> &levels);

/// Solves, recovers and measures a single mesh.
LevelResult run_level(const ManufacturedProblem &p, const Material &m, const QuadMesh &mesh,
                      const GaussRule &rule, int level, int nx, int ny);

/// `first_refinement` bisections of the initial mesh give the first level;
/// each further level bisects once more.
ConvergenceTable run_ladder(int which, const Material &m, int levels, const GaussRule &rule,
                            int first_refinement = 2);

void write_csv(std::ostream &os, const ConvergenceTable &t);
void write_json(std::ostream &os, const ConvergenceTable &t);
/// Human-readable layout with four decimals.
void write_pretty(std::ostream &os, const ConvergenceTable &t);

/// Shortest decimal that round-trips to the same double.
std::string shortest(double v);

} // namespace psfem
