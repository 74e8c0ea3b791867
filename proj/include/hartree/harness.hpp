#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hartree/config.hpp"
#include "hartree/steppers.hpp"

namespace hartree {

/// Environment variable that, when set, is prepended to relative output directories.
inline constexpr const char* kOutputRootVariable = "HARTREE_OUTPUT_ROOT";

/// Resolves the output directory of a spec, honouring kOutputRootVariable.
std::filesystem::path resolve_output_directory(const ProblemSpec& spec);

/// Operators, nonlocal context and factorized mass matrix for a spec.
GalerkinSystem build_system(const ProblemSpec& spec);

/// psi_{0h}: nodal interpolant or Ritz projection of psi_0, per spec.projection.
StateVector initial_state(const ProblemSpec& spec, const GalerkinSystem& system);

/// The spec's fixed-point settings with the absolute tolerance scaled by sqrt(M[z0]).
FixedPointConfig fixed_point_for(const ProblemSpec& spec, double initial_mass);

/// Snapshot layout, little-endian: "HFEM", u32 version, u32 m, f64 h, f64 t,
/// then m*m (re, im) f64 pairs in node_index order.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotFile {
  std::uint32_t interior_per_side = 0;
  double spacing = 0.0;
  double time = 0.0;
  StateVector state;
};

void write_snapshot(const std::filesystem::path& path, const Mesh& mesh, double time, const StateVector& z);
void write_snapshot(std::ostream& os, const Mesh& mesh, double time, const StateVector& z);
SnapshotFile read_snapshot(const std::filesystem::path& path);
SnapshotFile read_snapshot(std::istream& is);

struct RunSummary {
  std::size_t steps = 0;
  double initial_mass = 0.0;
  double initial_energy = 0.0;
  double final_mass = 0.0;
  double final_energy = 0.0;
  /// max_n |X_n - X_0| / |X_0|.
  double max_relative_mass_drift = 0.0;
  double max_relative_energy_drift = 0.0;
  std::size_t total_iterations = 0;
  double guard_value = 0.0;
  std::filesystem::path output_directory;
};

/// Evolves the spec and writes diagnostics.csv (t, mass, energy, fp_iters,
/// fp_residual), snapshot_NNNNNN.bin every snapshot_stride steps and summary.txt.
RunSummary run(const ProblemSpec& spec, const std::filesystem::path& output_directory);
RunSummary run(const ProblemSpec& spec);

enum class RefinementMode { refine_both, refine_tau_only, refine_h_only };

RefinementMode parse_refinement_mode(const std::string& name);
const char* to_string(RefinementMode mode);

struct ConvergenceRow {
  double h = 0.0;
  double tau = 0.0;
  double max_l2_error = 0.0;
  /// log2(e_{k-1} / e_k); empty for the first row or when undefined.
  std::optional<double> observed_order;
};

struct ConvergenceReport {
  RefinementMode mode = RefinementMode::refine_both;
  bool closed_form_reference = false;
  std::vector<ConvergenceRow> rows;
};

/// The spec refined `level` times under the given mode.
ProblemSpec refined_spec(const ProblemSpec& base, RefinementMode mode, int level);

/// Convergence sweep over `levels` refinements. With a closed-form solution
/// (v = 0, lambda = 0, eigenmode) every level is measured against it;
/// otherwise the finest level is the reference and is not reported.
ConvergenceReport converge(const ProblemSpec& base, int levels, RefinementMode mode);

void write_convergence_csv(const ConvergenceReport& report, const std::filesystem::path& path);

/// Writes mass.txt, stiffness.txt and potential.txt in coordinate format.
void dump_matrices(const ProblemSpec& spec, const std::filesystem::path& output_directory);

}  // namespace hartree
