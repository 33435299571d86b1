// Command-line driver: convergence ladders, mesh diagnostics, self-checks.

#include "psfem/bench.hpp"
#include "psfem/errors.hpp"
#include "psfem/mesh.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

namespace {

int report_error(const std::string &kind, const std::string &message, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

void print_quality(std::ostream &os, const psfem::QuadMesh &mesh,
                   const psfem::MeshQualityReport &q) {
  const auto max_of = [](const std::vector<double> &v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  const auto min_of = [](const std::vector<double> &v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  };
  os << "vertices " << mesh.num_vertices() << '\n'
     << "elements " << mesh.num_elements() << '\n'
     << "interior_vertices " << mesh.num_interior_vertices() << '\n'
     << "h_max " << psfem::shortest(max_of(q.h_K)) << '\n'
     << "rho_min " << psfem::shortest(min_of(q.rho_K)) << '\n'
     << "varrho " << psfem::shortest(q.varrho) << '\n'
     << "varrho_above_two " << (q.varrho_above_two ? "true" : "false") << '\n'
     << "d_K_max " << psfem::shortest(max_of(q.d_K)) << '\n'
     << "mc2_max_deviation " << psfem::shortest(q.mc2_max_deviation) << '\n'
     << "jamet_ratio " << psfem::shortest(q.jamet_ratio) << '\n'
     << "min_jacobian_margin " << psfem::shortest(q.min_jacobian_margin) << '\n';
  if (q.alpha_fit) os << "alpha_fit " << psfem::shortest(*q.alpha_fit) << '\n';
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Pian-Sumihara hybrid stress solver with recovery-based error estimation"};
  app.require_subcommand(1);

  int example = 1, levels = 5, gauss_n = 4, first_refinement = 2;
  double nu = 0.3, E = 1500.0;
  std::string out_path, format = "csv";
  auto *run = app.add_subcommand("run", "run a convergence ladder on a benchmark problem");
  run->add_option("--example", example, "benchmark problem")->check(CLI::IsMember({1, 2}));
  run->add_option("--nu", nu, "Poisson ratio");
  run->add_option("--E", E, "Young's modulus");
  run->add_option("--levels", levels, "number of refinement levels")->check(CLI::Range(2, 12));
  run->add_option("--gauss-n", gauss_n, "Gauss points per direction")->check(CLI::Range(1, 10));
  run->add_option("--first-refinement", first_refinement,
                  "bisections of the initial mesh before the first level")
      ->check(CLI::Range(0, 10));
  run->add_option("--out", out_path, "output file (stdout when omitted)");
  run->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  std::string mesh_file;
  int info_example = 0, refine = 0;
  auto *info = app.add_subcommand("mesh-info", "print mesh quality metrics");
  info->add_option("file", mesh_file, "mesh file in quadmesh format");
  info->add_option("--example", info_example, "use a benchmark initial mesh")
      ->check(CLI::IsMember({1, 2}));
  info->add_option("--refine", refine, "bisection refinements to apply")->check(CLI::Range(0, 10));
  std::string write_path;
  info->add_option("--write", write_path, "write the (refined) mesh to this file");

  double verify_nu = 0.3;
  auto *verify = app.add_subcommand("verify", "manufactured-solution self-checks and patch test");
  verify->add_option("--nu", verify_nu, "Poisson ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (*run) {
      const auto m = psfem::Material::from_young_poisson(E, nu);
      const auto table =
          psfem::run_ladder(example, m, levels, psfem::gauss_rule(gauss_n), first_refinement);
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) return report_error("io", "cannot open '" + out_path + "'", 1);
      }
      std::ostream &os = out_path.empty() ? std::cout : file;
      if (format == "json")
        psfem::write_json(os, table);
      else if (format == "table")
        psfem::write_pretty(os, table);
      else
        psfem::write_csv(os, table);
      return 0;
    }

    if (*info) {
      if (mesh_file.empty() == (info_example == 0))
        return report_error("usage", "give either a mesh file or --example N", 2);
      std::vector<psfem::QuadMesh> ladder;
      ladder.push_back(mesh_file.empty() ? psfem::example_mesh(info_example)
                                         : psfem::read_mesh_file(mesh_file));
      for (int r = 0; r < refine; ++r) ladder.push_back(psfem::refine_bisection(ladder.back()));
      auto q = psfem::quality_report(ladder.back());
      if (ladder.size() >= 3) {
        // The first bisection still carries the initial mesh's distortion.
        q.alpha_fit = psfem::fit_distortion_exponent(
            std::span<const psfem::QuadMesh>(ladder).subspan(1));
      }
      print_quality(std::cout, ladder.back(), q);
      if (!write_path.empty()) {
        std::ofstream f(write_path);
        if (!f) return report_error("io", "cannot open '" + write_path + "'", 1);
        psfem::write_mesh(f, ladder.back());
      }
      return 0;
    }

    if (*verify) {
      const auto m = psfem::Material::from_young_poisson(1500.0, verify_nu);
      const auto rule = psfem::gauss_rule(4);
      bool ok = true;
      for (int which : {1, 2}) {
        const auto p = psfem::make_problem(which, m);
        const auto sc = psfem::self_check(p, m);
        const bool pass = sc.equilibrium <= 1e-6 && sc.constitutive <= 1e-6;
        ok = ok && pass;
        std::cout << "self_check example " << which << " equilibrium "
                  << psfem::shortest(sc.equilibrium) << " constitutive "
                  << psfem::shortest(sc.constitutive) << (pass ? " PASS" : " FAIL") << '\n';
      }
      psfem::QuadMesh mesh = psfem::example_mesh(1);
      for (int level = 0; level < 3; ++level) {
        const auto pt = psfem::patch_test(mesh, m, rule);
        const bool pass = pt.displacement_error <= 1e-9 && pt.stress_error <= 1e-9 * m.E &&
                          pt.equilibrium_residual <= 1e-9;
        ok = ok && pass;
        std::cout << "patch_test " << mesh.num_elements() << " elements displacement "
                  << psfem::shortest(pt.displacement_error) << " stress "
                  << psfem::shortest(pt.stress_error) << " equilibrium "
                  << psfem::shortest(pt.equilibrium_residual) << (pass ? " PASS" : " FAIL")
                  << '\n';
        mesh = psfem::refine_bisection(mesh);
      }
      return ok ? 0 : 1;
    }
  } catch (const psfem::InputError &e) {
    return report_error("input", e.what(), 2);
  } catch (const psfem::GeometryError &e) {
    return report_error("geometry", e.what(), 1);
  } catch (const psfem::UnsupportedMeshError &e) {
    return report_error("unsupported_mesh", e.what(), 1);
  } catch (const psfem::NumericError &e) {
    return report_error("numeric", e.what(), 1);
  } catch (const std::exception &e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
