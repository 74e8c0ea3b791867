#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

#include "hartree/errors.hpp"
#include "hartree/mesh.hpp"
#include "hartree/stencil_operator.hpp"

namespace hartree {

/// Mass matrix A_ij = (phi_i, phi_j).
RealStencilOperator assemble_mass(const Mesh& mesh);

/// Stiffness matrix B_ij = (grad phi_i, grad phi_j).
RealStencilOperator assemble_stiffness(const Mesh& mesh);

/// Potential matrix Y_ij = (phi_i, v phi_j) with a bilinear-interpolated
/// coefficient given by its values on the full (n x n) node lattice,
/// lattice index i1 + i2*n. The 2x2 Gauss rule integrates it exactly.
RealStencilOperator assemble_nodal_potential(const Mesh& mesh, const RealVector& lattice_values);

/// Exact element integrals T[a][b][c] = int_elem N_a N_b N_c over an element of
/// side h, corner order as bilinear_shape.
using ElementTripleTensor = std::array<std::array<std::array<double, 4>, 4>, 4>;
ElementTripleTensor element_triple_tensor(double h);

namespace detail {

template <typename T>
double require_real_sample(const T& value, double x, double y) {
  double re = 0.0;
  if constexpr (std::is_arithmetic_v<T>) {
    re = static_cast<double>(value);
  } else {
    const std::complex<double> c(value);
    if (c.imag() != 0.0) {
      throw SpecificationError("potential must be real-valued; sample at (" + std::to_string(x) +
                               ", " + std::to_string(y) + ") has imaginary part " +
                               std::to_string(c.imag()));
    }
    re = c.real();
  }
  if (!std::isfinite(re)) {
    throw SpecificationError("potential sample at (" + std::to_string(x) + ", " + std::to_string(y) +
                             ") is not finite");
  }
  return re;
}

}  // namespace detail

/// Potential matrix Y_ij = (phi_i, v phi_j) for a real field v(x, y), by 2x2
/// Gauss quadrature per element. Complex-valued callables are accepted but
/// must have zero imaginary part.
template <typename Field>
RealStencilOperator assemble_potential(const Mesh& mesh, Field&& v) {
  const int ne = mesh.elements_per_side();
  const double h = mesh.spacing();
  const auto& rule = gauss_legendre(2);
  RealStencilOperator out(mesh.interior_per_side());
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      const auto dofs = element_dofs(mesh, e1, e2);
      std::array<std::array<double, 4>, 4> local{};
      for (std::size_t qy = 0; qy < rule.points.size(); ++qy) {
        for (std::size_t qx = 0; qx < rule.points.size(); ++qx) {
          const double s = rule.points[qx];
          const double t = rule.points[qy];
          const double x = (e1 + s) * h;
          const double y = (e2 + t) * h;
          const double w = rule.weights[qx] * rule.weights[qy] * h * h;
          const double vq = detail::require_real_sample(v(x, y), x, y);
          const double wv = w * vq;
          const auto shape = bilinear_shape(s, t);
          for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) local[a][b] += wv * (shape[a] * shape[b]);
          }
        }
      }
      for (int a = 0; a < 4; ++a) {
        if (dofs[a] < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (dofs[b] < 0) continue;
          out.add(static_cast<std::size_t>(dofs[a]), static_cast<std::size_t>(dofs[b]), local[a][b]);
        }
      }
    }
  }
  return out;
}

}  // namespace hartree
