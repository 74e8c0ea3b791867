#pragma once

#include <array>
#include <complex>
#include <functional>

#include "hartree/mesh.hpp"
#include "hartree/nonlocal.hpp"
#include "hartree/stencil_operator.hpp"

namespace hartree {

/// A (possibly complex) field on the closed square, with its gradient where known.
struct Field {
  using Value = std::function<std::complex<double>(double, double)>;
  using Gradient = std::function<std::array<std::complex<double>, 2>(double, double)>;

  Value value;
  Gradient gradient;
};

/// M[z] = z^H A z.
double mass(const StateVector& z, const RealStencilOperator& mass_matrix);

/// H[z] = z^H B z + z^H Y z + (1/2) Re z^H r(z).
double energy(const StateVector& z, const RealStencilOperator& stiffness, const RealStencilOperator& potential,
              NonlocalContext& nonlocal);

/// Nodal interpolant; boundary values are dropped.
StateVector interpolate(const Field& field, const Mesh& mesh);

/// The finite element function with coefficients z, as a Field.
Field fem_field(const Mesh& mesh, const StateVector& z);

/// Ritz projection: solves B z = [(grad phi_i, grad psi)]_i with the load
/// integrated by Gauss quadrature per element. Needs field.gradient.
StateVector ritz_project(const Field& field, const Mesh& mesh, const RealStencilOperator& stiffness,
                         int quadrature_points = 4);

/// ||psi_h - psi||_{L^2} against a closed-form field, Gauss quadrature per element.
double l2_error(const StateVector& z, const Field& reference, const Mesh& mesh, int quadrature_points = 4);

/// Field values at every element's Gauss points (element-major, then qy, qx),
/// so a time-separable reference can be reused across steps.
StateVector sample_at_quadrature(const Field& field, const Mesh& mesh, int quadrature_points = 4);

/// ||psi_h - factor * psi||_{L^2} with psi given by sample_at_quadrature.
double l2_error(const StateVector& z, const StateVector& reference_samples, std::complex<double> factor,
                const Mesh& mesh, int quadrature_points = 4);

/// ||psi_a - psi_b||_{L^2} for two states on the same mesh.
double l2_error(const StateVector& a, const StateVector& b, const RealStencilOperator& mass_matrix);

/// Samples a fine-mesh state at the nodes it shares with a coarse mesh.
/// The fine spacing must divide the coarse one on the same square.
StateVector restrict_to_coarse(const StateVector& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh);

/// ||psi_coarse - psi_fine||_{L^2}, measured on the coarse mesh after restricting
/// the fine state to coincident nodes.
double l2_error(const StateVector& coarse, const Mesh& coarse_mesh, const StateVector& fine, const Mesh& fine_mesh);

/// ||grad(psi_a - psi_b)||_{L^2}.
double h1_seminorm_error(const StateVector& a, const StateVector& b, const RealStencilOperator& stiffness);

struct NormReport {
  double l2_error = 0.0;
  double h1_seminorm_error = 0.0;
  double time = 0.0;
};

NormReport compare_states(const StateVector& a, const StateVector& b, const RealStencilOperator& mass_matrix,
                          const RealStencilOperator& stiffness, double time);

}  // namespace hartree
