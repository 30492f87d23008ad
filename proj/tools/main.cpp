#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyinv/bench.hpp"
#include "polyinv/errors.hpp"
#include "polyinv/oracle.hpp"
#include "polyinv/plot.hpp"
#include "polyinv/problem.hpp"
#include "polyinv/report.hpp"
#include "polyinv/version.hpp"

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitError = 2;

Eigen::VectorXd parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    values.push_back(std::stod(item));
  }
  Eigen::VectorXd x(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) x(i) = values[i];
  return x;
}

int cmd_verify(const std::string& path, const polyinv::RunFlags& flags,
               const std::string& plot_path, const std::string& report_path) {
  polyinv::Problem problem = polyinv::load_problem(path);
  polyinv::Report report = polyinv::run_verify(problem, flags, path);

  std::cout << polyinv::report_to_text(report);

  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw polyinv::Error("cannot write " + report_path);
    out << polyinv::report_to_json(report);
  }
  if (!plot_path.empty()) {
    polyinv::plot_regions(problem.safe_set, problem.obstacles, report.regions,
                          report.verdict, plot_path);
  }
  return polyinv::report_exit_code(report);
}

int cmd_bench(const std::string& mode, const std::string& spec_path,
              const std::string& out_path) {
  polyinv::BenchSpec spec = polyinv::load_bench_spec(spec_path);
  spec.mode = polyinv::parse_bench_mode(mode);
  polyinv::BenchResult result = polyinv::run_bench(spec);
  std::cout << polyinv::bench_table(result);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw polyinv::Error("cannot write " + out_path);
    out << polyinv::bench_to_json(result);
  }
  return kExitSafe;
}

int cmd_simulate(const std::string& path, const std::string& x0_text,
                 double horizon, double step, const std::string& csv_path) {
  polyinv::Problem problem = polyinv::load_problem(path);
  Eigen::VectorXd x0 = parse_point(x0_text);
  polyinv::Trajectory traj =
      polyinv::simulate(problem.system, problem.network, x0, horizon, step,
                        problem.safe_set, problem.obstacles);

  const Eigen::VectorXd& final_state = traj.states.back();
  std::cout << "steps:       " << traj.times.size() - 1 << "\n";
  std::cout << "final time:  " << traj.times.back() << "\n";
  std::cout << "final state:";
  for (int i = 0; i < final_state.size(); ++i) std::cout << ' ' << final_state(i);
  std::cout << "\n";
  switch (traj.exit_event.kind) {
    case polyinv::ExitKind::None:
      std::cout << "event:       none\n";
      break;
    case polyinv::ExitKind::LeftSafeSet:
      std::cout << "event:       left safe set via face "
                << traj.exit_event.face_row << " at t=" << traj.exit_event.time
                << "\n";
      break;
    case polyinv::ExitKind::EnteredObstacle:
      std::cout << "event:       entered obstacle " << traj.exit_event.obstacle
                << " at t=" << traj.exit_event.time << "\n";
      break;
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw polyinv::Error("cannot write " + csv_path);
    out << "t";
    for (int i = 0; i < x0.size(); ++i) out << ",x" << i;
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      out << traj.times[k];
      for (int i = 0; i < traj.states[k].size(); ++i)
        out << ',' << traj.states[k](i);
      out << "\n";
    }
  }
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive-invariance verification of polytopic safe sets for "
               "linear systems under piecewise-affine neural feedback"};
  app.set_version_flag("--version", std::string(polyinv::kToolName) + " " +
                                        polyinv::kToolVersion);
  app.require_subcommand(1);

  // verify
  std::string problem_path, plot_path, report_path;
  polyinv::RunFlags flags;
  bool flag_prune = false, flag_no_prune = false, flag_early = false;
  int threads = 0;
  unsigned seed = 0;
  bool seed_set = false;
  auto* verify = app.add_subcommand("verify", "Decide invariance of a problem");
  verify->add_option("problem", problem_path, "Problem file")->required();
  verify->add_flag("--prune", flag_prune, "Prune interior regions (default)");
  verify->add_flag("--no-prune", flag_no_prune, "Keep interior regions");
  verify->add_flag("--early-exit", flag_early, "Stop at the first violation");
  verify->add_option("--plot", plot_path, "Write an SVG of the segmentation");
  verify->add_option("--report", report_path, "Write a JSON report");
  verify->add_option("--threads", threads, "Worker thread cap (0 = all cores)");
  verify->add_option("--seed", seed, "Seed for probe sampling")
      ->each([&](const std::string&) { seed_set = true; });

  // bench
  std::string bench_mode, bench_spec, bench_out;
  auto* bench = app.add_subcommand("bench", "Scalability sweep over seeded "
                                            "random networks");
  bench->add_option("--mode", bench_mode, "width | depth | dimension")
      ->required();
  bench->add_option("--spec", bench_spec, "Bench spec file")->required();
  bench->add_option("--out", bench_out, "Write rows as JSON");

  // simulate
  std::string sim_problem, sim_x0, sim_csv;
  double sim_horizon = 10.0, sim_step = 1e-3;
  auto* simulate = app.add_subcommand(
      "simulate", "Integrate the closed loop from a given state");
  simulate->add_option("problem", sim_problem, "Problem file")->required();
  simulate->add_option("--x0", sim_x0, "Initial state, comma separated")
      ->required();
  simulate->add_option("--horizon", sim_horizon, "Time horizon");
  simulate->add_option("--step", sim_step, "Integration step");
  simulate->add_option("--csv", sim_csv, "Write the trajectory as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      if (flag_prune && flag_no_prune) {
        std::cerr << "error: --prune and --no-prune conflict\n";
        return kExitError;
      }
      if (flag_prune) flags.prune = true;
      if (flag_no_prune) flags.prune = false;
      if (flag_early) flags.early_exit = true;
      if (seed_set) flags.seed = seed;
      flags.threads = threads;
      return cmd_verify(problem_path, flags, plot_path, report_path);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_mode, bench_spec, bench_out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_problem, sim_x0, sim_horizon, sim_step, sim_csv);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
