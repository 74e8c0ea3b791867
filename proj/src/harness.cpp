#include "hartree/harness.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hartree/assembly.hpp"
#include "hartree/errors.hpp"
#include "hartree/observables.hpp"

namespace hartree {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(bytes, 4);
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(bytes, 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char bytes[4];
  if (!is.read(reinterpret_cast<char*>(bytes), 4)) throw IoError("truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw IoError("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

std::string snapshot_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.bin", step);
  return buf;
}

std::optional<double> observed_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0) || coarse == fine) return std::nullopt;
  const double order = std::log2(coarse / fine);
  return std::isfinite(order) ? std::optional<double>(order) : std::nullopt;
}

}  // namespace

std::filesystem::path resolve_output_directory(const ProblemSpec& spec) {
  std::filesystem::path dir(spec.output_directory);
  if (const char* root = std::getenv(kOutputRootVariable); root && *root && dir.is_relative()) {
    return std::filesystem::path(root) / dir;
  }
  return dir;
}

GalerkinSystem build_system(const ProblemSpec& spec) {
  const Mesh mesh = spec.mesh();
  const double d = spec.side_length;
  const PotentialSpec potential = spec.potential;
  RealStencilOperator y = assemble_potential(mesh, [&](double x, double yy) { return potential.evaluate(x, yy, d); });
  return GalerkinSystem(mesh, assemble_mass(mesh), assemble_stiffness(mesh), std::move(y),
                        NonlocalContext(mesh, spec.kernel, spec.coupling));
}

StateVector initial_state(const ProblemSpec& spec, const GalerkinSystem& system) {
  const Field psi0 = spec.initial.field(spec.side_length);
  if (spec.projection == InitialProjection::ritz) return ritz_project(psi0, system.mesh(), system.stiffness());
  return interpolate(psi0, system.mesh());
}

FixedPointConfig fixed_point_for(const ProblemSpec& spec, double initial_mass) {
  FixedPointConfig fp = spec.fixed_point;
  const double scale = initial_mass > 0.0 ? std::sqrt(initial_mass) : 1.0;
  fp.tolerance = spec.relative_tolerance * scale;
  return fp;
}

void write_snapshot(std::ostream& os, const Mesh& mesh, double time, const StateVector& z) {
  if (z.size() != static_cast<Eigen::Index>(mesh.dofs())) throw std::invalid_argument("state does not match mesh");
  os.write("HFEM", 4);
  put_u32(os, kSnapshotVersion);
  put_u32(os, static_cast<std::uint32_t>(mesh.interior_per_side()));
  put_f64(os, mesh.spacing());
  put_f64(os, time);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    put_f64(os, z(i).real());
    put_f64(os, z(i).imag());
  }
  if (!os) throw IoError("failed writing snapshot");
}

void write_snapshot(const std::filesystem::path& path, const Mesh& mesh, double time, const StateVector& z) {
  auto os = open_output(path);
  write_snapshot(os, mesh, time, z);
}

SnapshotFile read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "HFEM") throw IoError("not a snapshot file (bad magic)");
  const std::uint32_t version = get_u32(is);
  if (version != kSnapshotVersion) throw IoError("unsupported snapshot version " + std::to_string(version));
  SnapshotFile out;
  out.interior_per_side = get_u32(is);
  out.spacing = get_f64(is);
  out.time = get_f64(is);
  const auto n = static_cast<Eigen::Index>(out.interior_per_side) * out.interior_per_side;
  out.state.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    out.state(i) = {re, im};
  }
  return out;
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot '" + path.string() + "'");
  return read_snapshot(is);
}

RunSummary run(const ProblemSpec& spec) { return run(spec, resolve_output_directory(spec)); }

RunSummary run(const ProblemSpec& spec, const std::filesystem::path& output_directory) {
  GalerkinSystem system = build_system(spec);
  const Mesh& mesh = system.mesh();
  const StateVector z0 = initial_state(spec, system);
  const double m0 = mass(z0, system.mass());
  const FixedPointConfig fp = fixed_point_for(spec, m0);
  const TimeGrid grid = spec.time_grid();

  const auto estimate = estimate_contraction(system, m0);
  const double guard = estimate.guard(grid.step_size());
  if (guard > 1.0) {
    std::cerr << "warning: contraction guard alpha_hat*(M^1/2+1)*tau = " << guard
              << " exceeds 1; relying on the runtime divergence check\n";
  }

  ensure_directory(output_directory);
  auto csv = open_output(output_directory / "diagnostics.csv");
  csv << "t,mass,energy,fp_iters,fp_residual\n";

  RunSummary summary;
  summary.output_directory = output_directory;
  summary.guard_value = guard;
  EvolveOptions options;
  options.contraction = estimate;
  options.observer = [&](std::size_t n, double t, const StateVector& z, const StepDiagnostics& d) {
    csv << format_double(t) << ',' << format_double(d.mass) << ',' << format_double(d.energy) << ','
        << d.iterations << ',' << format_double(d.residual) << '\n';
    if (!csv) throw IoError("failed writing diagnostics.csv");
    if (n == 0) {
      summary.initial_mass = d.mass;
      summary.initial_energy = d.energy;
    }
    const double mass_scale = std::abs(summary.initial_mass) > 0.0 ? std::abs(summary.initial_mass) : 1.0;
    const double energy_scale = std::abs(summary.initial_energy) > 0.0 ? std::abs(summary.initial_energy) : 1.0;
    summary.max_relative_mass_drift =
        std::max(summary.max_relative_mass_drift, std::abs(d.mass - summary.initial_mass) / mass_scale);
    summary.max_relative_energy_drift =
        std::max(summary.max_relative_energy_drift, std::abs(d.energy - summary.initial_energy) / energy_scale);
    summary.total_iterations += d.iterations;
    summary.final_mass = d.mass;
    summary.final_energy = d.energy;
    summary.steps = n;
    if (spec.snapshot_stride > 0 && n % spec.snapshot_stride == 0) {
      write_snapshot(output_directory / snapshot_name(n), mesh, t, z);
    }
  };
  evolve(z0, system, spec.scheme, grid, fp, options);
  csv.close();

  auto out = open_output(output_directory / "summary.txt");
  out << "scheme " << to_string(spec.scheme) << '\n'
      << "interior_nodes_per_side " << mesh.interior_per_side() << '\n'
      << "h " << format_double(mesh.spacing()) << '\n'
      << "tau " << format_double(grid.step_size()) << '\n'
      << "steps " << summary.steps << '\n'
      << "initial_mass " << format_double(summary.initial_mass) << '\n'
      << "final_mass " << format_double(summary.final_mass) << '\n'
      << "max_relative_mass_drift " << format_double(summary.max_relative_mass_drift) << '\n'
      << "initial_energy " << format_double(summary.initial_energy) << '\n'
      << "final_energy " << format_double(summary.final_energy) << '\n'
      << "max_relative_energy_drift " << format_double(summary.max_relative_energy_drift) << '\n'
      << "fixed_point_iterations " << summary.total_iterations << '\n'
      << "contraction_guard " << format_double(guard) << '\n';
  if (!out) throw IoError("failed writing summary.txt");
  return summary;
}

RefinementMode parse_refinement_mode(const std::string& name) {
  if (name == "refine-both") return RefinementMode::refine_both;
  if (name == "refine-tau-only") return RefinementMode::refine_tau_only;
  if (name == "refine-h-only") return RefinementMode::refine_h_only;
  throw ConfigError("unknown refinement mode '" + name + "' (expected refine-both, refine-tau-only or refine-h-only)");
}

const char* to_string(RefinementMode mode) {
  switch (mode) {
    case RefinementMode::refine_both:
      return "refine-both";
    case RefinementMode::refine_tau_only:
      return "refine-tau-only";
    case RefinementMode::refine_h_only:
      return "refine-h-only";
  }
  return "?";
}

ProblemSpec refined_spec(const ProblemSpec& base, RefinementMode mode, int level) {
  ProblemSpec spec = base;
  const std::size_t factor = std::size_t{1} << level;
  if (mode != RefinementMode::refine_tau_only) {
    spec.nodes_per_side = static_cast<int>((base.nodes_per_side - 1) * factor + 1);
  }
  if (mode != RefinementMode::refine_h_only) spec.steps = base.steps * factor;
  return spec;
}

ConvergenceReport converge(const ProblemSpec& base, int levels, RefinementMode mode) {
  ConvergenceReport report;
  report.mode = mode;
  const auto exact = base.exact_solution();
  report.closed_form_reference = exact.has_value();
  if (levels < 1 || (!exact && levels < 3)) {
    throw ConfigError("convergence sweep needs at least " + std::string(exact ? "1 level" : "3 levels") +
                      " (self-convergence uses the finest level as reference)");
  }

  auto add_row = [&](const ProblemSpec& spec, double error) {
    ConvergenceRow row;
    row.h = spec.mesh().spacing();
    row.tau = spec.time_grid().step_size();
    row.max_l2_error = error;
    if (!report.rows.empty()) row.observed_order = observed_order(report.rows.back().max_l2_error, error);
    report.rows.push_back(row);
  };

  if (exact) {
    for (int k = 0; k < levels; ++k) {
      const ProblemSpec spec = refined_spec(base, mode, k);
      GalerkinSystem system = build_system(spec);
      const StateVector z0 = initial_state(spec, system);
      const StateVector samples = sample_at_quadrature(exact->profile, system.mesh());
      double worst = 0.0;
      EvolveOptions options;
      options.observer = [&](std::size_t, double t, const StateVector& z, const StepDiagnostics&) {
        worst = std::max(worst, l2_error(z, samples, exact->phase(t), system.mesh()));
      };
      evolve(z0, system, spec.scheme, spec.time_grid(), fixed_point_for(spec, mass(z0, system.mass())), options);
      add_row(spec, worst);
    }
    return report;
  }

  const ProblemSpec finest = refined_spec(base, mode, levels - 1);
  const ProblemSpec second = refined_spec(base, mode, levels - 2);
  const std::size_t stride = second.steps == 0 ? 1 : finest.steps / second.steps;
  GalerkinSystem fine_system = build_system(finest);
  const StateVector fine_z0 = initial_state(finest, fine_system);
  EvolveOptions fine_options;
  fine_options.snapshot_stride = std::max<std::size_t>(stride, 1);
  const Trajectory reference = evolve(fine_z0, fine_system, finest.scheme, finest.time_grid(),
                                      fixed_point_for(finest, mass(fine_z0, fine_system.mass())), fine_options);
  const Mesh fine_mesh = fine_system.mesh();

  for (int k = 0; k < levels - 1; ++k) {
    const ProblemSpec spec = refined_spec(base, mode, k);
    GalerkinSystem system = build_system(spec);
    const StateVector z0 = initial_state(spec, system);
    const std::size_t ratio = spec.steps == 0 ? 0 : finest.steps / spec.steps;
    double worst = 0.0;
    EvolveOptions options;
    options.observer = [&](std::size_t n, double, const StateVector& z, const StepDiagnostics&) {
      const std::size_t index = n * ratio / fine_options.snapshot_stride;
      const auto& ref = reference.snapshots.at(index);
      worst = std::max(worst, l2_error(z, system.mesh(), ref.state, fine_mesh));
    };
    evolve(z0, system, spec.scheme, spec.time_grid(), fixed_point_for(spec, mass(z0, system.mass())), options);
    add_row(spec, worst);
  }
  return report;
}

void write_convergence_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  auto os = open_output(path);
  os << "h,tau,max_l2_error,observed_order\n";
  for (const auto& row : report.rows) {
    os << format_double(row.h) << ',' << format_double(row.tau) << ',' << format_double(row.max_l2_error) << ','
       << (row.observed_order ? format_double(*row.observed_order) : std::string("n/a")) << '\n';
  }
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

void dump_matrices(const ProblemSpec& spec, const std::filesystem::path& output_directory) {
  const GalerkinSystem system = build_system(spec);
  ensure_directory(output_directory);
  const std::pair<const char*, const RealStencilOperator*> items[] = {
      {"mass.txt", &system.mass()}, {"stiffness.txt", &system.stiffness()}, {"potential.txt", &system.potential()}};
  for (const auto& [name, op] : items) {
    auto os = open_output(output_directory / name);
    op->write_coordinates(os);
    if (!os) throw IoError(std::string("failed writing ") + name);
  }
}

}  // namespace hartree
