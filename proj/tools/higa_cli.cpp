// higa: adaptive hierarchical-spline Poisson benchmarks from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "higa/axioms.hpp"
#include "higa/driver.hpp"
#include "higa/mesh_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct RunOptions {
  std::string problem = "square";
  int degree = 2;
  double theta = -1.0;
  std::string mode = "adaptive";
  std::string marking = "linear";
  long max_dofs = 30000;
  int max_steps = 30;
  long max_elements = 0;
  double eta_tol = 0.0;
  int assembly_extra = 0;
  int estimator_extra = 1;
  std::string solver = "auto";
  int gmres_max_iterations = 20000;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--problem", o.problem, "square, lshape or quarter-ring")->capture_default_str();
  cmd->add_option("--degree", o.degree, "spline degree in both directions")->capture_default_str();
  cmd->add_option("--theta", o.theta, "bulk parameter in (0,1]; default depends on the problem");
  cmd->add_option("--mode", o.mode, "adaptive or uniform")->capture_default_str();
  cmd->add_option("--marking", o.marking, "bulk criterion: linear or squared indicator sums")->capture_default_str();
  cmd->add_option("--max-dofs", o.max_dofs, "stop once the space has this many unknowns")->capture_default_str();
  cmd->add_option("--max-steps", o.max_steps, "stop after this many solves")->capture_default_str();
  cmd->add_option("--max-elements", o.max_elements, "stop once the mesh has this many elements (0: off)")
      ->capture_default_str();
  cmd->add_option("--eta-tol", o.eta_tol, "stop once the estimator drops below this value")->capture_default_str();
  cmd->add_option("--assembly-extra-points", o.assembly_extra, "Gauss points beyond p+1 in assembly")
      ->capture_default_str();
  cmd->add_option("--estimator-extra-points", o.estimator_extra, "Gauss points beyond p+1 in the estimator")
      ->capture_default_str();
  cmd->add_option("--solver", o.solver, "auto (direct, GMRES fallback) or gmres")->capture_default_str();
  cmd->add_option("--gmres-max-iterations", o.gmres_max_iterations, "GMRES iteration budget")->capture_default_str();
}

higa::RunConfig to_config(const RunOptions& o) {
  higa::RunConfig c;
  c.problem = o.problem;
  c.degree = o.degree;
  if (o.theta >= 0.0) c.theta = o.theta;
  c.mode = higa::parse_mode(o.mode);
  c.marking = higa::parse_marking(o.marking);
  c.stop.max_dofs = o.max_dofs;
  c.stop.max_steps = o.max_steps;
  c.stop.max_elements = o.max_elements;
  c.stop.eta_tol = o.eta_tol;
  c.assembly_extra_points = o.assembly_extra;
  c.estimator_extra_points = o.estimator_extra;
  if (o.solver == "gmres") c.solver.direct_limit = 0;
  else if (o.solver != "auto") throw higa::ConfigError("solver: expected auto or gmres, got '" + o.solver + "'");
  c.solver.gmres.max_iterations = o.gmres_max_iterations;
  return c;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw higa::ConfigError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw higa::ConfigError("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw higa::ConfigError("cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int cmd_run(const RunOptions& o, const std::string& out_path, bool quiet) {
  const higa::RunConfig config = to_config(o);
  higa::validate(config);
  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw higa::ConfigError("out: cannot open '" + out_path + "' for writing");
    csv = &file;
  }
  *csv << higa::history_csv_header() << '\n';
  const auto result = higa::run(config, [&](const higa::AdaptiveState& s) {
    *csv << higa::history_csv_row(s.row) << '\n';
    csv->flush();
    if (!quiet && !out_path.empty()) {
      std::fprintf(stderr, "step %d: %ld elements, %ld dofs, eta %.4e\n", s.row.step, s.row.n_elements, s.row.n_dofs,
                   s.row.estimator);
    }
  });
  std::cout << higa::rate_summary(result.history) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive isogeometric analysis with hierarchical splines"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::string run_out;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "adaptive or uniform benchmark run; writes the convergence CSV");
  add_run_options(run, run_opts);
  run->add_option("--out", run_out, "CSV output path (default: standard output)");
  run->add_flag("--quiet", quiet, "no per-step progress on standard error");

  higa::AxiomOptions ax;
  auto* axioms = app.add_subcommand("verify-axioms", "randomized mesh and basis property suite");
  axioms->add_option("--scenarios", ax.scenarios, "number of refinement scenarios")->capture_default_str();
  axioms->add_option("--seed", ax.seed, "random seed")->capture_default_str();
  axioms->add_option("--max-elements", ax.max_elements, "mesh size per scenario")->capture_default_str();

  RunOptions mesh_opts;
  mesh_opts.max_steps = 8;
  std::string mesh_out, mesh_in;
  auto* dump_mesh = app.add_subcommand("dump-mesh", "write the mesh of the last step of a run as text");
  add_run_options(dump_mesh, mesh_opts);
  dump_mesh->add_option("--in", mesh_in, "read a mesh file instead of running (round trip)");
  dump_mesh->add_option("--out", mesh_out, "output path (default: standard output)");

  RunOptions sys_opts;
  sys_opts.max_steps = 1;
  std::string sys_mesh, sys_matrix, sys_rhs;
  auto* dump_system = app.add_subcommand("dump-system", "write the Galerkin matrix and load vector (Matrix Market)");
  add_run_options(dump_system, sys_opts);
  dump_system->add_option("--mesh", sys_mesh, "mesh file to assemble on (default: last mesh of the run)");
  dump_system->add_option("--matrix", sys_matrix, "matrix output path")->required();
  dump_system->add_option("--rhs", sys_rhs, "load vector output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, run_out, quiet);
    if (*axioms) {
      const auto report = higa::verify_axioms(ax);
      std::cout << report.to_text();
      return report.ok() ? 0 : 1;
    }
    if (*dump_mesh) {
      std::string text;
      if (!mesh_in.empty()) {
        text = higa::mesh_to_text(higa::mesh_from_text(read_file(mesh_in)));
      } else {
        text = higa::mesh_to_text(higa::run(to_config(mesh_opts)).final_mesh);
      }
      if (mesh_out.empty()) std::cout << text;
      else write_file(mesh_out, text);
      return 0;
    }
    if (*dump_system) {
      const higa::RunConfig config = to_config(sys_opts);
      higa::validate(config);
      const higa::Benchmark bench = higa::problem_library(config.problem, config.degree);
      const higa::HierarchicalMesh mesh = sys_mesh.empty() ? higa::run(config).final_mesh
                                                           : higa::mesh_from_text(read_file(sys_mesh));
      if (!(mesh.knots0() == bench.knots0)) throw higa::ConfigError("mesh: level-0 knots do not match the problem");
      const higa::HierSpace space(mesh, higa::boundary_basis(mesh));
      higa::AssemblyOptions aopts;
      aopts.extra_points = config.assembly_extra_points;
      const auto sys = higa::assemble(space, bench.geometry, bench.problem, aopts);
      write_file(sys_matrix, higa::to_matrix_market(sys.matrix));
      if (!sys_rhs.empty()) write_file(sys_rhs, higa::to_matrix_market(sys.rhs));
      std::cout << sys.matrix.rows << " unknowns, " << sys.matrix.val.size() << " nonzeros\n";
      return 0;
    }
  } catch (const higa::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const higa::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const higa::InvalidInput& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const higa::AssemblyError& e) {
    std::cerr << "assembly error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
