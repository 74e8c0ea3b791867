#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <complex>

#include "hartree/assembly.hpp"

using namespace hartree;

namespace {

/// (phi_i, v phi_j) by an n-point tensor Gauss rule per element, from basis_eval.
template <typename V>
double quadrature_entry(const Mesh& mesh, std::size_t i, std::size_t j, V v, int n = 5) {
  const auto& rule = gauss_legendre(n);
  const double h = mesh.spacing();
  double acc = 0.0;
  for (int e2 = 0; e2 < mesh.elements_per_side(); ++e2) {
    for (int e1 = 0; e1 < mesh.elements_per_side(); ++e1) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double x = (e1 + rule.points[a]) * h;
          const double y = (e2 + rule.points[b]) * h;
          acc += rule.weights[a] * rule.weights[b] * h * h * basis_eval(mesh, i, x, y) * v(x, y) *
                 basis_eval(mesh, j, x, y);
        }
      }
    }
  }
  return acc;
}

}  // namespace

TEST(Assembly, MassEntries) {
  const Mesh mesh(1.3, 8);
  const double h = mesh.spacing();
  const auto a = assemble_mass(mesh);
  const std::size_t c = node_index(2, 3, 6);
  EXPECT_NEAR(a.entry(c, c), 4 * h * h / 9, 1e-16);
  EXPECT_NEAR(a.entry(c, node_index(3, 3, 6)), h * h / 9, 1e-16);
  EXPECT_NEAR(a.entry(c, node_index(2, 2, 6)), h * h / 9, 1e-16);
  EXPECT_NEAR(a.entry(c, node_index(3, 4, 6)), h * h / 36, 1e-16);
  EXPECT_NEAR(a.entry(c, node_index(1, 2, 6)), h * h / 36, 1e-16);
  EXPECT_EQ(a.entry(c, node_index(4, 3, 6)), 0.0);
}

TEST(Assembly, MassMatchesQuadratureOfBasis) {
  const Mesh mesh(1.0, 6);
  const auto a = assemble_mass(mesh);
  for (std::size_t i = 0; i < mesh.dofs(); ++i) {
    for (std::size_t j = 0; j < mesh.dofs(); ++j) {
      EXPECT_NEAR(a.entry(i, j), quadrature_entry(mesh, i, j, [](double, double) { return 1.0; }), 1e-15);
    }
  }
}

TEST(Assembly, StiffnessEntriesAreScaleFree) {
  for (double d : {1.0, 7.5}) {
    const Mesh mesh(d, 7);
    const auto b = assemble_stiffness(mesh);
    const std::size_t c = node_index(2, 2, 5);
    EXPECT_NEAR(b.entry(c, c), 8.0 / 3.0, 1e-15);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        EXPECT_NEAR(b.entry(c, node_index(2 + dx, 2 + dy, 5)), -1.0 / 3.0, 1e-15);
      }
    }
    double row = 0.0;
    for (std::size_t j = 0; j < mesh.dofs(); ++j) row += b.entry(c, j);
    EXPECT_NEAR(row, 0.0, 1e-15);
  }
}

TEST(Assembly, SymmetricPositiveDefinite) {
  const Mesh mesh(1.0, 7);
  for (const auto& op : {assemble_mass(mesh), assemble_stiffness(mesh)}) {
    EXPECT_TRUE(op.is_hermitian());
    const Eigen::MatrixXd dense = op.to_dense();
    EXPECT_EQ((dense - dense.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Assembly, UnitPotentialIsMass) {
  const Mesh mesh(2.0, 9);
  const auto y = assemble_potential(mesh, [](double, double) { return 1.0; });
  const auto a = assemble_mass(mesh);
  EXPECT_LT((y.to_dense() - a.to_dense()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembly, LinearPotentialMatchesQuadrature) {
  const Mesh mesh(1.0, 6);
  auto v = [](double x, double y) { return x + 0.5 * y; };
  const auto y = assemble_potential(mesh, v);
  EXPECT_TRUE(y.is_hermitian());
  for (std::size_t i = 0; i < mesh.dofs(); ++i) {
    for (std::size_t j = 0; j < mesh.dofs(); ++j) {
      EXPECT_NEAR(y.entry(i, j), quadrature_entry(mesh, i, j, v), 1e-12);
    }
  }
}

TEST(Assembly, NodalPotentialOfConstantIsScaledMass) {
  const Mesh mesh(1.0, 6);
  const RealVector values = RealVector::Constant(36, 2.5);
  const auto y = assemble_nodal_potential(mesh, values);
  EXPECT_LT((y.to_dense() - 2.5 * assemble_mass(mesh).to_dense()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembly, ComplexPotentialRejected) {
  const Mesh mesh(1.0, 5);
  EXPECT_THROW(assemble_potential(mesh, [](double x, double) { return std::complex<double>(x, 1e-3); }),
               SpecificationError);
  EXPECT_NO_THROW(assemble_potential(mesh, [](double x, double) { return std::complex<double>(x, 0.0); }));
  EXPECT_THROW(assemble_potential(mesh, [](double, double) { return std::nan(""); }), SpecificationError);
}

TEST(Assembly, TripleTensorIntegratesProducts) {
  const double h = 0.4;
  const auto t = element_triple_tensor(h);
  const auto& rule = gauss_legendre(3);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        double q = 0.0;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const auto n = bilinear_shape(rule.points[i], rule.points[j]);
            q += rule.weights[i] * rule.weights[j] * h * h * n[a] * n[b] * n[c];
          }
        }
        EXPECT_NEAR(t[a][b][c], q, 1e-16);
      }
    }
  }
}

TEST(StencilOperator, SparseAndDenseAgree) {
  const Mesh mesh(1.0, 6);
  const auto b = assemble_stiffness(mesh);
  StateVector x = StateVector::Random(mesh.dofs());
  const StateVector y1 = b.apply(x);
  const StateVector y2 = b.to_sparse().cast<std::complex<double>>() * x;
  EXPECT_LT((y1 - y2).norm(), 1e-14);
  EXPECT_THROW(RealStencilOperator(4).add(0, 2, 1.0), std::out_of_range);
}
