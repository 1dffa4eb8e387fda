// Command-line front end: run a JSON scenario or one of the canned demos.

#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "edem/errors.hpp"
#include "edem/scenario.hpp"

namespace {

std::string read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw edem::ConfigError("cannot read " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report(const edem::RunSummary& s, const std::string& dir)
{
  std::cout << "steps " << s.steps << "  dt " << s.dt << "  t_end " << s.t_end << '\n'
            << "energy  H0 " << s.initial_energy.total << "  H " << s.final_energy.total << "  max|H-H0| "
            << s.max_energy_deviation << "  max|U| " << s.max_abs_potential << '\n'
            << "momentum drift  linear " << s.linear_momentum_drift << "  angular " << s.angular_momentum_drift
            << '\n'
            << "max CFL margin " << s.max_cfl_margin << "  max rotation iterations " << s.max_rotation_iterations
            << '\n'
            << "outputs in " << dir << "  (" << s.wall_time << " s)\n";
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Discrete-element elastodynamics with a RATTLE integrator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  long steps = -1;
  double dt = 0.0;
  int threads = 0;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--steps", steps, "Override the number of steps");
  app.add_option("--dt", dt, "Override the time step");
  app.add_option("--threads", threads, "Worker threads (default: OpenMP runtime)")->check(CLI::NonNegativeNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario described by a JSON file");
  run->add_option("config", config_path, "Scenario JSON")->required();

  std::string demo_name;
  bool print_only = false;
  auto* demo = app.add_subcommand("demo", "Run a canned scenario");
  demo->add_option("name", demo_name, "Scenario name")
      ->required()
      ->check(CLI::IsMember(edem::demo_names()));
  demo->add_flag("--print", print_only, "Print the scenario JSON and exit");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) {
    omp_set_num_threads(threads);
  }
  try {
    std::string text;
    if (*run) {
      text = read_file(config_path);
    } else {
      text = edem::demo_config(demo_name);
      if (print_only) {
        std::cout << text << '\n';
        return 0;
      }
    }
    const edem::ScenarioConfig config = edem::parse_config(text);
    edem::RunOptions options;
    if (!out_dir.empty()) {
      options.out_dir = out_dir;
    }
    if (steps >= 0) {
      options.n_steps = steps;
    }
    if (dt > 0.0) {
      options.dt = dt;
    }
    const edem::RunSummary summary = edem::run_scenario(config, options);
    report(summary, options.out_dir.value_or(config.output.directory));
  } catch (const edem::StepFailure& e) {
    std::cerr << "step " << e.step << " failed: " << e.what() << '\n';
    return 3;
  } catch (const edem::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
