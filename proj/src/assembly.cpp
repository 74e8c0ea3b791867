#include "hartree/assembly.hpp"

#include <stdexcept>

namespace hartree {

namespace {

// 1D element integrals on [0,1] with L0 = 1-s, L1 = s.
constexpr double kMass1[2][2] = {{1.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 3.0}};
constexpr double kStiff1[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
// int_0^1 L_a L_b L_c
constexpr double kTriple1[2][2][2] = {{{1.0 / 4.0, 1.0 / 12.0}, {1.0 / 12.0, 1.0 / 12.0}},
                                      {{1.0 / 12.0, 1.0 / 12.0}, {1.0 / 12.0, 1.0 / 4.0}}};

template <typename Local>
void scatter(const Mesh& mesh, RealStencilOperator& out, Local&& local_of_element) {
  const int ne = mesh.elements_per_side();
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      const auto dofs = element_dofs(mesh, e1, e2);
      const auto local = local_of_element(e1, e2);
      for (int a = 0; a < 4; ++a) {
        if (dofs[a] < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (dofs[b] < 0) continue;
          out.add(static_cast<std::size_t>(dofs[a]), static_cast<std::size_t>(dofs[b]), local[a][b]);
        }
      }
    }
  }
}

using Local = std::array<std::array<double, 4>, 4>;

}  // namespace

RealStencilOperator assemble_mass(const Mesh& mesh) {
  const double h2 = mesh.spacing() * mesh.spacing();
  Local local{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) local[a][b] = h2 * kMass1[a & 1][b & 1] * kMass1[a >> 1][b >> 1];
  }
  RealStencilOperator out(mesh.interior_per_side());
  scatter(mesh, out, [&](int, int) { return local; });
  return out;
}

RealStencilOperator assemble_stiffness(const Mesh& mesh) {
  // The h factors of the gradient and the element area cancel in 2D.
  Local local{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      local[a][b] = kStiff1[a & 1][b & 1] * kMass1[a >> 1][b >> 1] +
                    kMass1[a & 1][b & 1] * kStiff1[a >> 1][b >> 1];
    }
  }
  RealStencilOperator out(mesh.interior_per_side());
  scatter(mesh, out, [&](int, int) { return local; });
  return out;
}

ElementTripleTensor element_triple_tensor(double h) {
  ElementTripleTensor t{};
  const double h2 = h * h;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        t[a][b][c] = h2 * kTriple1[a & 1][b & 1][c & 1] * kTriple1[a >> 1][b >> 1][c >> 1];
      }
    }
  }
  return t;
}

RealStencilOperator assemble_nodal_potential(const Mesh& mesh, const RealVector& lattice_values) {
  const auto n = static_cast<Eigen::Index>(mesh.nodes_per_side());
  if (lattice_values.size() != n * n) {
    throw std::invalid_argument("nodal potential needs one value per lattice node");
  }
  const auto tensor = element_triple_tensor(mesh.spacing());
  RealStencilOperator out(mesh.interior_per_side());
  scatter(mesh, out, [&](int e1, int e2) {
    const auto nodes = element_lattice_nodes(mesh, e1, e2);
    Local local{};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        double acc = 0.0;
        for (int c = 0; c < 4; ++c) acc += tensor[a][b][c] * lattice_values(static_cast<Eigen::Index>(nodes[c]));
        local[a][b] = acc;
      }
    }
    return local;
  });
  return out;
}

}  // namespace hartree
