#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "hartree/assembly.hpp"
#include "hartree/mesh.hpp"
#include "hartree/stencil_operator.hpp"

namespace hartree {

/// Even interaction kernel V.
struct KernelSpec {
  enum class Family { gaussian, smoothed_indicator, table };

  Family family = Family::gaussian;
  double amplitude = 1.0;
  /// gaussian: V = amplitude * exp(-|x|^2 / (2 sigma^2)).
  double sigma = 1.0;
  /// smoothed_indicator: V = amplitude * (1 - tanh((|x| - radius) / width)) / 2.
  double radius = 1.0;
  double width = 0.1;
  /// table: samples in lattice units, row-major over (dx, dy) in
  /// [-table_radius, table_radius]^2 with dx fastest; zero outside.
  int table_radius = 0;
  std::vector<double> table;

  static KernelSpec gaussian(double sigma, double amplitude = 1.0);
  static KernelSpec smoothed_indicator(double radius, double width, double amplitude = 1.0);
  static KernelSpec from_table(int radius, std::vector<double> values);

  /// Continuous value V(x, y); not available for tables.
  double evaluate(double x, double y) const;

  /// Samples V(d*h) for lattice differences d in [-(L-1), L-1]^2, stored at
  /// (dx + L - 1, dy + L - 1). Throws SpecificationError when the samples are
  /// not even or not finite.
  Eigen::MatrixXd samples(double h, int lattice_side) const;

  /// sup |V| over the sampled lattice.
  double max_abs(double h, int lattice_side) const;
};

/// Throws SpecificationError unless samples(i, j) == samples(-i, -j) for the
/// centred (2L-1) x (2L-1) table.
void validate_even(const Eigen::MatrixXd& samples);

/// Smooth cutoff on the square: 0 within `margin` of the boundary, 1 beyond
/// 2*margin, C-infinity in between.
double smooth_plateau(double x, double y, double margin, double side_length);

/// Real coupling lambda(x).
struct CouplingField {
  enum class Family { constant, plateau };

  Family family = Family::constant;
  double value = 0.0;
  /// plateau only: lambda vanishes within `margin` of the boundary and equals
  /// `value` beyond 2*margin, with a smooth transition in between.
  double margin = 0.0;
  double side_length = 1.0;

  static CouplingField constant(double value);
  static CouplingField plateau(double value, double margin, double side_length);

  double evaluate(double x, double y) const;
  bool is_zero() const { return value == 0.0; }
  double max_abs() const { return std::abs(value); }
};

/// Linear convolution w_i = h^2 * sum_j V(x_i - x_j) rho_j on an L x L lattice
/// (index i1 + i2*L), by zero-padded FFT or by direct summation.
///
/// Owns its FFT plans; one instance per worker.
class Convolver {
 public:
  Convolver(const Eigen::MatrixXd& kernel_samples, double h);

  int lattice_side() const { return side_; }
  int fft_size() const { return padded_; }

  RealVector convolve(const RealVector& density);
  RealVector convolve_direct(const RealVector& density) const;

 private:
  int side_;
  int padded_;
  double weight_;
  Eigen::MatrixXd kernel_;
  std::vector<std::complex<double>> kernel_spectrum_;
  Eigen::FFT<double> fft_;
  std::vector<std::complex<double>> work_;
  std::vector<std::complex<double>> line_in_;
  std::vector<std::complex<double>> line_out_;

  void transform(std::vector<std::complex<double>>& data, bool inverse);
};

/// Smallest integer >= n whose only prime factors are 2, 3 and 5.
int fft_friendly_size(int n);

/// Everything needed to evaluate the nonlocal term lambda * g_V[|psi|^2] * psi
/// on a given mesh.
///
/// The density enters through the hat-weighted lattice moments
/// s_c = (phi_c, |psi_h|^2) on the full node lattice, boundary nodes included.
/// The effective potential u_c = lambda(x_c) * sum_d V(x_c - x_d) s_d is then
/// interpolated bilinearly. For constant lambda the form
/// (psi_a, lambda g_V[|psi_b|^2] psi_a) = lambda s_a^T K s_b is symmetric in
/// (a, b), exactly as in the continuum.
class NonlocalContext {
 public:
  NonlocalContext(const Mesh& mesh, const KernelSpec& kernel, const CouplingField& coupling);

  const Mesh& mesh() const { return mesh_; }
  const KernelSpec& kernel() const { return kernel_; }
  const CouplingField& coupling() const { return coupling_; }
  bool active() const { return active_; }
  double kernel_max_abs() const { return kernel_max_; }
  double coupling_max_abs() const { return coupling_max_; }
  const RealVector& coupling_samples() const { return lambda_; }

  /// s_c = (phi_c, |psi_h|^2) for every lattice node c.
  RealVector density_moments(const StateVector& z) const;

  /// u = lambda * (V * density) on the lattice, from moments s.
  RealVector effective_potential(const RealVector& moments);

  /// r_i = (phi_i, u psi_h) with u bilinear from its lattice values.
  StateVector apply_potential(const RealVector& lattice_potential, const StateVector& z) const;

  Convolver& convolver() { return *convolver_; }

 private:
  Mesh mesh_;
  KernelSpec kernel_;
  CouplingField coupling_;
  bool active_;
  double kernel_max_;
  double coupling_max_;
  RealVector lambda_;
  ElementTripleTensor tensor_;
  std::unique_ptr<Convolver> convolver_;
};

/// Nodal trapezoidal convolution of an interior density: w_i = h^2 sum_j
/// V(x_i - x_j) rho_j over the m x m interior lattice.
RealVector convolve(const KernelSpec& kernel, const Mesh& mesh, const RealVector& density);

/// Galerkin load r_i ~ (phi_i, lambda g_V[|psi_h|^2] psi_h).
StateVector nonlinear_load(const StateVector& z, NonlocalContext& context);

/// Load with the density given by lattice moments, e.g. an average of two states.
StateVector nonlinear_load(const StateVector& z, const RealVector& moments, NonlocalContext& context);

/// (1/2) Re z^H r(z).
double nonlinear_energy(const StateVector& z, NonlocalContext& context);

/// (psi_a, lambda g_V[|psi_b|^2] psi_a), complex as computed. For even V and
/// constant lambda it is real and symmetric under a <-> b.
std::complex<double> interaction_form(const StateVector& a, const StateVector& b, NonlocalContext& context);

}  // namespace hartree
