#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "hartree/mesh.hpp"

namespace hartree {

template <typename Scalar>
using StateVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
/// Coefficients z of psi_h = sum_j z_j phi_j.
using StateVector = StateVectorT<double>;
using RealVector = Eigen::VectorXd;

namespace detail {
template <typename T>
struct real_of {
  using type = T;
};
template <typename T>
struct real_of<std::complex<T>> {
  using type = T;
};
template <typename T>
inline T conj_if_complex(const T& v) {
  return v;
}
template <typename T>
inline std::complex<T> conj_if_complex(const std::complex<T>& v) {
  return std::conj(v);
}
}  // namespace detail

/// Hermitian operator on the interior DOFs of a uniform lattice with a
/// 9-point stencil (self plus the eight lattice neighbours).
///
/// Row j stores nine coefficients, addressed by lattice offset (dx, dy) in
/// {-1,0,1}^2; the flat column is j + dx + dy*m. Neighbours that fall off the
/// interior lattice are never read.
template <typename Scalar>
class StencilOperator {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 9, Eigen::RowMajor>;

  StencilOperator() = default;
  explicit StencilOperator(int interior_per_side)
      : m_(interior_per_side),
        coeffs_(Coefficients::Zero(static_cast<Eigen::Index>(interior_per_side) * interior_per_side, 9)) {
    if (interior_per_side < 1) throw std::invalid_argument("stencil operator needs m >= 1");
  }

  int side() const { return m_; }
  std::size_t dimension() const { return static_cast<std::size_t>(coeffs_.rows()); }

  static constexpr int slot(int dx, int dy) { return (dx + 1) + 3 * (dy + 1); }

  Scalar coefficient(std::size_t row, int dx, int dy) const { return coeffs_(row, slot(dx, dy)); }
  Scalar& coefficient(std::size_t row, int dx, int dy) { return coeffs_(row, slot(dx, dy)); }
  const Coefficients& coefficients() const { return coeffs_; }

  /// Entry (i, j); zero when j is not a stencil neighbour of i.
  Scalar entry(std::size_t i, std::size_t j) const {
    const auto [dx, dy] = offset(i, j);
    if (dx < -1 || dx > 1 || dy < -1 || dy > 1) return Scalar(0);
    return coeffs_(i, slot(dx, dy));
  }

  /// Accumulates into entry (i, j). The pair must be stencil neighbours.
  void add(std::size_t i, std::size_t j, Scalar value) {
    const auto [dx, dy] = offset(i, j);
    if (dx < -1 || dx > 1 || dy < -1 || dy > 1) {
      throw std::out_of_range("entry outside the 9-point stencil");
    }
    coeffs_(i, slot(dx, dy)) += value;
  }

  /// y = Op * x for any conforming vector expression.
  template <typename Derived>
  auto apply(const Eigen::MatrixBase<Derived>& x) const {
    using Out = typename Eigen::ScalarBinaryOpTraits<Scalar, typename Derived::Scalar>::ReturnType;
    Eigen::Matrix<Out, Eigen::Dynamic, 1> y(x.size());
    apply_into(x, y);
    return y;
  }

  template <typename Derived, typename OutDerived>
  void apply_into(const Eigen::MatrixBase<Derived>& x, Eigen::MatrixBase<OutDerived>& y) const {
    using Out = typename OutDerived::Scalar;
    if (static_cast<std::size_t>(x.size()) != dimension()) {
      throw std::invalid_argument("stencil operator dimension mismatch");
    }
    const int m = m_;
    for (int m2 = 0; m2 < m; ++m2) {
      const int dy_lo = m2 > 0 ? -1 : 0;
      const int dy_hi = m2 < m - 1 ? 1 : 0;
      for (int m1 = 0; m1 < m; ++m1) {
        const int dx_lo = m1 > 0 ? -1 : 0;
        const int dx_hi = m1 < m - 1 ? 1 : 0;
        const Eigen::Index row = m1 + static_cast<Eigen::Index>(m2) * m;
        Out acc(0);
        for (int dy = dy_lo; dy <= dy_hi; ++dy) {
          for (int dx = dx_lo; dx <= dx_hi; ++dx) {
            acc += coeffs_(row, slot(dx, dy)) * x(row + dx + static_cast<Eigen::Index>(dy) * m);
          }
        }
        y(row) = acc;
      }
    }
  }

  /// Hermitian form x^H Op x, real part.
  template <typename Derived>
  double quadratic_form(const Eigen::MatrixBase<Derived>& x) const {
    return std::real(x.dot(apply(x)));
  }

  bool is_hermitian(double tolerance = 0.0) const {
    const int m = m_;
    for (std::size_t i = 0; i < dimension(); ++i) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const auto [m1, m2] = node_coordinates(i, m);
          if (m1 + dx < 0 || m1 + dx >= m || m2 + dy < 0 || m2 + dy >= m) continue;
          const std::size_t j = i + dx + static_cast<std::ptrdiff_t>(dy) * m;
          const Scalar a = coefficient(i, dx, dy);
          const Scalar b = detail::conj_if_complex(coefficient(j, -dx, -dy));
          if (std::abs(a - b) > tolerance) return false;
        }
      }
    }
    return true;
  }

  Eigen::SparseMatrix<Scalar> to_sparse() const {
    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(dimension() * 9);
    const int m = m_;
    for (int m2 = 0; m2 < m; ++m2) {
      for (int m1 = 0; m1 < m; ++m1) {
        const Eigen::Index row = m1 + static_cast<Eigen::Index>(m2) * m;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (m1 + dx < 0 || m1 + dx >= m || m2 + dy < 0 || m2 + dy >= m) continue;
            const Scalar v = coeffs_(row, slot(dx, dy));
            if (v != Scalar(0)) triplets.emplace_back(row, row + dx + static_cast<Eigen::Index>(dy) * m, v);
          }
        }
      }
    }
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::SparseMatrix<Scalar> out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
    return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(to_sparse());
  }

  StencilOperator& operator+=(const StencilOperator& other) {
    if (other.m_ != m_) throw std::invalid_argument("stencil operators on different lattices");
    coeffs_ += other.coeffs_;
    return *this;
  }
  friend StencilOperator operator+(StencilOperator a, const StencilOperator& b) { return a += b; }

  StencilOperator& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }
  friend StencilOperator operator*(Scalar s, StencilOperator a) { return a *= s; }

  /// Coordinate text dump, one "row col real imag" line per stored nonzero.
  void write_coordinates(std::ostream& os) const {
    const auto sparse = to_sparse();
    const auto old_precision = os.precision(17);
    for (int k = 0; k < sparse.outerSize(); ++k) {
      for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(sparse, k); it; ++it) {
        const std::complex<double> v(it.value());
        os << it.row() << ' ' << it.col() << ' ' << v.real() << ' ' << v.imag() << '\n';
      }
    }
    os.precision(old_precision);
  }

 private:
  std::pair<int, int> offset(std::size_t i, std::size_t j) const {
    const auto [i1, i2] = node_coordinates(i, m_);
    const auto [j1, j2] = node_coordinates(j, m_);
    return {j1 - i1, j2 - i2};
  }

  int m_ = 0;
  Coefficients coeffs_;
};

using RealStencilOperator = StencilOperator<double>;

}  // namespace hartree
