#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>

#include "hartree/nonlocal.hpp"
#include "hartree/observables.hpp"
#include "hartree/steppers.hpp"

namespace hartree {

/// External potential v.
struct PotentialSpec {
  enum class Family { none, harmonic, gaussian_well };

  Family family = Family::none;
  /// harmonic: v = (k/2) |x - c|^2 times a smooth cutoff of width `margin`.
  double strength = 0.0;
  double margin = 0.0;
  /// gaussian_well: v = -depth * exp(-|x - c|^2 / (2 sigma^2)).
  double depth = 0.0;
  double sigma = 1.0;

  /// c is the centre of the square.
  double evaluate(double x, double y, double side_length) const;
};

/// Initial condition psi_0.
struct InitialSpec {
  enum class Family { eigenmode, gaussian_packet };

  Family family = Family::eigenmode;
  double amplitude = 1.0;
  /// eigenmode: amplitude * sin(p pi x / D) sin(q pi y / D).
  int p = 1;
  int q = 1;
  /// gaussian_packet: amplitude * exp(-|x - c|^2 / (2 width^2)) exp(i k.x).
  double center_x = 0.5;
  double center_y = 0.5;
  double width = 0.1;
  double momentum_x = 0.0;
  double momentum_y = 0.0;

  Field field(double side_length) const;
};

enum class InitialProjection { interpolation, ritz };

/// psi(x, t) = profile(x) exp(-i frequency t).
struct ExactSolution {
  Field profile;
  double frequency = 0.0;

  std::complex<double> phase(double t) const;
  Field at(double t) const;
};

struct ProblemSpec {
  double side_length = 1.0;
  int nodes_per_side = 0;
  double horizon = 0.0;
  std::size_t steps = 0;
  SchemeKind scheme = SchemeKind::coherent;
  PotentialSpec potential;
  KernelSpec kernel;
  CouplingField coupling;
  InitialSpec initial;
  InitialProjection projection = InitialProjection::interpolation;
  /// The absolute fixed-point tolerance is relative_tolerance * sqrt(M[psi_0h]).
  double relative_tolerance = 1e-13;
  FixedPointConfig fixed_point;
  std::size_t snapshot_stride = 0;
  std::string output_directory = "output";

  Mesh mesh() const { return Mesh(side_length, nodes_per_side); }
  TimeGrid time_grid() const { return {horizon, steps}; }

  /// Closed-form solution when v = 0, lambda = 0 and psi_0 is an eigenmode.
  std::optional<ExactSolution> exact_solution() const;
};

/// Parses the bracketed key = value format. Unknown sections and keys, keys
/// that do not belong to the selected family, duplicates and missing required
/// keys are all ConfigError; parse errors carry the line number.
ProblemSpec parse_config(std::istream& in, const std::string& source = "<config>");
ProblemSpec load_config(const std::filesystem::path& path);

}  // namespace hartree
