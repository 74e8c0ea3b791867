// Command-line driver: run, converge, dump-matrices.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "hartree/config.hpp"
#include "hartree/errors.hpp"
#include "hartree/harness.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNonContraction = 3, kIoError = 4 };

std::filesystem::path output_for(const hartree::ProblemSpec& spec, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  return hartree::resolve_output_directory(spec);
}

int do_run(const std::string& config, const std::string& output) {
  const auto spec = hartree::load_config(config);
  const auto summary = hartree::run(spec, output_for(spec, output));
  std::printf("steps %zu  mass %.15g -> %.15g (max rel drift %.3e)  energy %.15g -> %.15g (max rel drift %.3e)\n",
              summary.steps, summary.initial_mass, summary.final_mass, summary.max_relative_mass_drift,
              summary.initial_energy, summary.final_energy, summary.max_relative_energy_drift);
  std::printf("fixed-point iterations %zu, output in %s\n", summary.total_iterations,
              summary.output_directory.string().c_str());
  return kOk;
}

int do_converge(const std::string& config, int levels, const std::string& mode_name, const std::string& output) {
  const auto spec = hartree::load_config(config);
  const auto mode = hartree::parse_refinement_mode(mode_name);
  const auto report = hartree::converge(spec, levels, mode);
  std::printf("%s, reference: %s\n", hartree::to_string(mode),
              report.closed_form_reference ? "closed form" : "finest level");
  std::printf("%14s %14s %16s %10s\n", "h", "tau", "max L2 error", "order");
  for (const auto& row : report.rows) {
    std::printf("%14.6e %14.6e %16.8e ", row.h, row.tau, row.max_l2_error);
    if (row.observed_order)
      std::printf("%10.4f\n", *row.observed_order);
    else
      std::printf("%10s\n", "n/a");
  }
  const auto dir = output_for(spec, output);
  std::filesystem::create_directories(dir);
  hartree::write_convergence_csv(report, dir / "convergence.csv");
  return kOk;
}

int do_dump(const std::string& config, const std::string& output) {
  const auto spec = hartree::load_config(config);
  const auto dir = output_for(spec, output);
  hartree::dump_matrices(spec, dir);
  std::printf("wrote mass.txt, stiffness.txt, potential.txt to %s\n", dir.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-element Crank-Nicolson solver for the nonlocal Hartree equation on a square"};
  app.require_subcommand(1);

  std::string config;
  std::string output;
  int levels = 3;
  std::string mode = "refine-both";

  auto* run_cmd = app.add_subcommand("run", "evolve a configuration and write diagnostics");
  run_cmd->add_option("config", config, "configuration file")->required();
  run_cmd->add_option("-o,--output", output, "output directory (overrides [output] directory)");

  auto* conv_cmd = app.add_subcommand("converge", "convergence sweep over successive refinements");
  conv_cmd->add_option("config", config, "configuration file")->required();
  conv_cmd->add_option("--levels", levels, "number of refinement levels")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--mode", mode, "refine-both | refine-tau-only | refine-h-only");
  conv_cmd->add_option("-o,--output", output, "output directory (overrides [output] directory)");

  auto* dump_cmd = app.add_subcommand("dump-matrices", "write mass, stiffness and potential matrices");
  dump_cmd->add_option("config", config, "configuration file")->required();
  dump_cmd->add_option("-o,--output", output, "output directory (overrides [output] directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return do_run(config, output);
    if (*conv_cmd) return do_converge(config, levels, mode, output);
    if (*dump_cmd) return do_dump(config, output);
  } catch (const hartree::NonContraction& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonContraction;
  } catch (const hartree::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const hartree::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const hartree::SpecificationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
