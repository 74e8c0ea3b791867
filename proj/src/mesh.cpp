#include "hartree/mesh.hpp"

#include <numbers>

namespace hartree {

namespace {

constexpr int kMaxGaussPoints = 20;

QuadratureRule build_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; store in increasing order.
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace

std::array<double, 2> Mesh::dof_position(std::size_t j) const {
  const auto [m1, m2] = node_coordinates(j, interior_per_side());
  return node_position(m1, m2);
}

std::size_t node_index(int m1, int m2, int m) {
  if (m <= 0 || m1 < 0 || m2 < 0 || m1 >= m || m2 >= m) {
    throw std::out_of_range("lattice coordinate (" + std::to_string(m1) + ", " +
                            std::to_string(m2) + ") outside 0.." + std::to_string(m - 1));
  }
  return static_cast<std::size_t>(m1) + static_cast<std::size_t>(m2) * static_cast<std::size_t>(m);
}

std::pair<int, int> node_coordinates(std::size_t j, int m) {
  const auto mm = static_cast<std::size_t>(m);
  if (m <= 0 || j >= mm * mm) {
    throw std::out_of_range("DOF index " + std::to_string(j) + " outside lattice of side " +
                            std::to_string(m));
  }
  return {static_cast<int>(j % mm), static_cast<int>(j / mm)};
}

double reference_basis(double h, double x, double y) {
  if (x < 0.0 || y < 0.0 || x > 2 * h || y > 2 * h) return 0.0;
  const double inv = 1.0 / (h * h);
  if (x <= h && y <= h) return inv * x * y;
  if (x >= h && y <= h) return inv * (2 * h - x) * y;
  if (x >= h && y >= h) return inv * (2 * h - x) * (2 * h - y);
  return inv * x * (2 * h - y);
}

double basis_eval(const Mesh& mesh, std::size_t j, double x, double y) {
  const auto [xj, yj] = mesh.dof_position(j);
  const double h = mesh.spacing();
  return hat((x - xj) / h) * hat((y - yj) / h);
}

const QuadratureRule& gauss_legendre(int n) {
  static const std::vector<QuadratureRule> rules = [] {
    std::vector<QuadratureRule> r;
    r.reserve(kMaxGaussPoints);
    for (int k = 1; k <= kMaxGaussPoints; ++k) r.push_back(build_gauss_legendre(k));
    return r;
  }();
  if (n < 1 || n > kMaxGaussPoints) {
    throw std::out_of_range("Gauss-Legendre rule with " + std::to_string(n) +
                            " points not available");
  }
  return rules[n - 1];
}

std::array<long, 4> element_dofs(const Mesh& mesh, int e1, int e2) {
  const int m = mesh.interior_per_side();
  std::array<long, 4> dofs{};
  for (int c = 0; c < 4; ++c) {
    // Lattice coordinates of the corner, interior coordinates are shifted by one.
    const int i1 = e1 + (c & 1) - 1;
    const int i2 = e2 + (c >> 1) - 1;
    dofs[c] = (i1 >= 0 && i2 >= 0 && i1 < m && i2 < m) ? static_cast<long>(i1 + i2 * m) : -1;
  }
  return dofs;
}

std::array<std::size_t, 4> element_lattice_nodes(const Mesh& mesh, int e1, int e2) {
  const auto n = static_cast<std::size_t>(mesh.nodes_per_side());
  std::array<std::size_t, 4> nodes{};
  for (int c = 0; c < 4; ++c) {
    nodes[c] = static_cast<std::size_t>(e1 + (c & 1)) + static_cast<std::size_t>(e2 + (c >> 1)) * n;
  }
  return nodes;
}

std::size_t lattice_index_of_dof(const Mesh& mesh, std::size_t j) {
  const auto [m1, m2] = node_coordinates(j, mesh.interior_per_side());
  return static_cast<std::size_t>(m1 + 1) +
         static_cast<std::size_t>(m2 + 1) * static_cast<std::size_t>(mesh.nodes_per_side());
}

}  // namespace hartree
