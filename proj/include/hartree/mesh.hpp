#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hartree {

/// Uniform lattice on the square (0,D)^2.
///
/// The closed square is split into (n-1)^2 congruent elements of side
/// h = D/(n-1). Boundary nodes carry no degrees of freedom; the m = n-2
/// interior nodes per side are numbered j = m1 + m2*m.
class Mesh {
 public:
  Mesh(double side_length, int nodes_per_side)
      : side_length_(side_length), n_(nodes_per_side) {
    if (!(side_length > 0.0) || !std::isfinite(side_length)) {
      throw std::invalid_argument("mesh side length must be positive and finite");
    }
    if (nodes_per_side < 3) {
      throw std::invalid_argument("mesh needs at least 3 nodes per side, got " +
                                  std::to_string(nodes_per_side));
    }
    h_ = side_length_ / static_cast<double>(n_ - 1);
  }

  double side_length() const { return side_length_; }
  /// Nodes per side, boundary included.
  int nodes_per_side() const { return n_; }
  /// Interior nodes per side.
  int interior_per_side() const { return n_ - 2; }
  int elements_per_side() const { return n_ - 1; }
  double spacing() const { return h_; }
  std::size_t dofs() const {
    const auto m = static_cast<std::size_t>(n_ - 2);
    return m * m;
  }

  /// Coordinates of interior node (m1, m2).
  std::array<double, 2> node_position(int m1, int m2) const {
    return {(m1 + 1) * h_, (m2 + 1) * h_};
  }
  std::array<double, 2> dof_position(std::size_t j) const;

  /// Coordinates of lattice node (i1, i2), 0 <= i1, i2 < n (boundary included).
  std::array<double, 2> lattice_position(int i1, int i2) const { return {i1 * h_, i2 * h_}; }

  bool operator==(const Mesh&) const = default;

 private:
  double side_length_;
  int n_;
  double h_;
};

/// Flat DOF index of interior lattice coordinate (m1, m2) on an m x m lattice.
std::size_t node_index(int m1, int m2, int m);

/// Inverse of node_index.
std::pair<int, int> node_coordinates(std::size_t j, int m);

/// 1D hat centred at 0 with half-width 1.
inline double hat(double s) {
  const double a = std::abs(s);
  return a < 1.0 ? 1.0 - a : 0.0;
}

/// Reference basis function on its support [0,2h]^2, written piecewise.
double reference_basis(double h, double x, double y);

/// Value of the basis function of DOF j at (x, y); zero outside its support.
double basis_eval(const Mesh& mesh, std::size_t j, double x, double y);

/// Gauss-Legendre rule on [0,1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0,1]; exact for polynomials of degree 2n-1.
const QuadratureRule& gauss_legendre(int n);

/// Bilinear shape functions on the unit square, corners ordered
/// (0,0), (1,0), (0,1), (1,1).
inline std::array<double, 4> bilinear_shape(double s, double t) {
  return {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
}

/// Gradients of bilinear_shape in unit-square coordinates.
inline std::array<std::array<double, 2>, 4> bilinear_shape_gradient(double s, double t) {
  return {{{-(1 - t), -(1 - s)}, {(1 - t), -s}, {-t, (1 - s)}, {t, s}}};
}

/// Element (e1, e2) spans [e1 h, (e1+1) h] x [e2 h, (e2+1) h]. Returns the DOF
/// index of each corner, or -1 for boundary corners. Corner order matches
/// bilinear_shape.
std::array<long, 4> element_dofs(const Mesh& mesh, int e1, int e2);

/// Full-lattice index (boundary included) of each element corner.
std::array<std::size_t, 4> element_lattice_nodes(const Mesh& mesh, int e1, int e2);

/// Full-lattice index of interior DOF j.
std::size_t lattice_index_of_dof(const Mesh& mesh, std::size_t j);

}  // namespace hartree
