#include "hartree/observables.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hartree {

namespace {

using Complex = std::complex<double>;

std::array<Complex, 4> element_values(const Mesh& mesh, const StateVector& z, int e1, int e2) {
  const auto dofs = element_dofs(mesh, e1, e2);
  std::array<Complex, 4> out{};
  for (int a = 0; a < 4; ++a) out[a] = dofs[a] >= 0 ? z(dofs[a]) : Complex{};
  return out;
}

StateVector solve_real_spd(const RealStencilOperator& op, const StateVector& rhs) {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor(op.to_sparse());
  if (factor.info() != Eigen::Success) throw std::runtime_error("matrix is not positive definite");
  const Eigen::VectorXd re = factor.solve(rhs.real());
  const Eigen::VectorXd im = factor.solve(rhs.imag());
  StateVector out(rhs.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

double mass(const StateVector& z, const RealStencilOperator& mass_matrix) {
  return mass_matrix.quadratic_form(z);
}

double energy(const StateVector& z, const RealStencilOperator& stiffness, const RealStencilOperator& potential,
              NonlocalContext& nonlocal) {
  return stiffness.quadratic_form(z) + potential.quadratic_form(z) + nonlinear_energy(z, nonlocal);
}

StateVector interpolate(const Field& field, const Mesh& mesh) {
  StateVector z(static_cast<Eigen::Index>(mesh.dofs()));
  for (std::size_t j = 0; j < mesh.dofs(); ++j) {
    const auto [x, y] = mesh.dof_position(j);
    z(static_cast<Eigen::Index>(j)) = field.value(x, y);
  }
  return z;
}

Field fem_field(const Mesh& mesh, const StateVector& z) {
  if (z.size() != static_cast<Eigen::Index>(mesh.dofs())) {
    throw std::invalid_argument("state dimension does not match the mesh");
  }
  const double h = mesh.spacing();
  const int ne = mesh.elements_per_side();
  auto locate = [h, ne](double x, double y) {
    const int e1 = std::clamp(static_cast<int>(std::floor(x / h)), 0, ne - 1);
    const int e2 = std::clamp(static_cast<int>(std::floor(y / h)), 0, ne - 1);
    return std::array<int, 2>{e1, e2};
  };
  Field f;
  f.value = [mesh, z, h, locate](double x, double y) {
    const auto [e1, e2] = locate(x, y);
    const auto zl = element_values(mesh, z, e1, e2);
    const auto shape = bilinear_shape(x / h - e1, y / h - e2);
    Complex v{};
    for (int a = 0; a < 4; ++a) v += zl[a] * shape[a];
    return v;
  };
  f.gradient = [mesh, z, h, locate](double x, double y) {
    const auto [e1, e2] = locate(x, y);
    const auto zl = element_values(mesh, z, e1, e2);
    const auto grad = bilinear_shape_gradient(x / h - e1, y / h - e2);
    std::array<Complex, 2> g{};
    for (int a = 0; a < 4; ++a) {
      g[0] += zl[a] * grad[a][0] / h;
      g[1] += zl[a] * grad[a][1] / h;
    }
    return g;
  };
  return f;
}

StateVector ritz_project(const Field& field, const Mesh& mesh, const RealStencilOperator& stiffness,
                         int quadrature_points) {
  if (!field.gradient) throw std::invalid_argument("Ritz projection needs the field gradient");
  const auto& rule = gauss_legendre(quadrature_points);
  const double h = mesh.spacing();
  const int ne = mesh.elements_per_side();
  StateVector load = StateVector::Zero(static_cast<Eigen::Index>(mesh.dofs()));
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      const auto dofs = element_dofs(mesh, e1, e2);
      for (std::size_t qy = 0; qy < rule.points.size(); ++qy) {
        for (std::size_t qx = 0; qx < rule.points.size(); ++qx) {
          const double s = rule.points[qx];
          const double t = rule.points[qy];
          // Area weight h^2 times the 1/h of the shape gradient.
          const double w = rule.weights[qx] * rule.weights[qy] * h;
          const auto g = field.gradient((e1 + s) * h, (e2 + t) * h);
          const auto grad = bilinear_shape_gradient(s, t);
          for (int a = 0; a < 4; ++a) {
            if (dofs[a] < 0) continue;
            load(dofs[a]) += w * (grad[a][0] * g[0] + grad[a][1] * g[1]);
          }
        }
      }
    }
  }
  return solve_real_spd(stiffness, load);
}

double l2_error(const StateVector& z, const Field& reference, const Mesh& mesh, int quadrature_points) {
  return l2_error(z, sample_at_quadrature(reference, mesh, quadrature_points), Complex(1.0), mesh, quadrature_points);
}

StateVector sample_at_quadrature(const Field& field, const Mesh& mesh, int quadrature_points) {
  const auto& rule = gauss_legendre(quadrature_points);
  const double h = mesh.spacing();
  const int ne = mesh.elements_per_side();
  const auto nq = static_cast<Eigen::Index>(rule.points.size());
  StateVector out(static_cast<Eigen::Index>(ne) * ne * nq * nq);
  Eigen::Index k = 0;
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      for (Eigen::Index qy = 0; qy < nq; ++qy) {
        for (Eigen::Index qx = 0; qx < nq; ++qx) {
          out(k++) = field.value((e1 + rule.points[qx]) * h, (e2 + rule.points[qy]) * h);
        }
      }
    }
  }
  return out;
}

double l2_error(const StateVector& z, const StateVector& reference_samples, Complex factor, const Mesh& mesh,
                int quadrature_points) {
  if (z.size() != static_cast<Eigen::Index>(mesh.dofs())) {
    throw std::invalid_argument("state dimension does not match the mesh");
  }
  const auto& rule = gauss_legendre(quadrature_points);
  const auto nq = rule.points.size();
  const int ne = mesh.elements_per_side();
  if (reference_samples.size() != static_cast<Eigen::Index>(ne) * ne * static_cast<Eigen::Index>(nq * nq)) {
    throw std::invalid_argument("reference samples do not match the mesh and quadrature");
  }
  std::vector<std::array<double, 4>> shapes;
  std::vector<double> weights;
  for (std::size_t qy = 0; qy < nq; ++qy) {
    for (std::size_t qx = 0; qx < nq; ++qx) {
      shapes.push_back(bilinear_shape(rule.points[qx], rule.points[qy]));
      weights.push_back(rule.weights[qx] * rule.weights[qy]);
    }
  }
  const double h = mesh.spacing();
  double acc = 0.0;
  Eigen::Index k = 0;
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      const auto zl = element_values(mesh, z, e1, e2);
      for (std::size_t p = 0; p < shapes.size(); ++p) {
        Complex v{};
        for (int a = 0; a < 4; ++a) v += zl[a] * shapes[p][a];
        acc += weights[p] * std::norm(v - factor * reference_samples(k++));
      }
    }
  }
  return std::sqrt(acc * h * h);
}

double l2_error(const StateVector& a, const StateVector& b, const RealStencilOperator& mass_matrix) {
  if (a.size() != b.size()) throw std::invalid_argument("states of different dimension");
  const StateVector d = a - b;
  return std::sqrt(std::max(0.0, mass_matrix.quadratic_form(d)));
}

StateVector restrict_to_coarse(const StateVector& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh) {
  const int fine_cells = fine_mesh.elements_per_side();
  const int coarse_cells = coarse_mesh.elements_per_side();
  const bool same_square = std::abs(fine_mesh.side_length() - coarse_mesh.side_length()) <=
                           1e-12 * coarse_mesh.side_length();
  if (!same_square || fine_cells % coarse_cells != 0) {
    throw std::invalid_argument("meshes have no coincident node lattice (" + std::to_string(coarse_cells) +
                                " vs " + std::to_string(fine_cells) + " cells per side)");
  }
  if (fine.size() != static_cast<Eigen::Index>(fine_mesh.dofs())) {
    throw std::invalid_argument("state dimension does not match the fine mesh");
  }
  const int ratio = fine_cells / coarse_cells;
  const int mc = coarse_mesh.interior_per_side();
  const int mf = fine_mesh.interior_per_side();
  StateVector out(static_cast<Eigen::Index>(coarse_mesh.dofs()));
  for (int c2 = 0; c2 < mc; ++c2) {
    for (int c1 = 0; c1 < mc; ++c1) {
      const int f1 = (c1 + 1) * ratio - 1;
      const int f2 = (c2 + 1) * ratio - 1;
      out(static_cast<Eigen::Index>(node_index(c1, c2, mc))) = fine(static_cast<Eigen::Index>(node_index(f1, f2, mf)));
    }
  }
  return out;
}

double l2_error(const StateVector& coarse, const Mesh& coarse_mesh, const StateVector& fine, const Mesh& fine_mesh) {
  const StateVector restricted = restrict_to_coarse(fine, fine_mesh, coarse_mesh);
  if (coarse.size() != restricted.size()) throw std::invalid_argument("state dimension does not match the mesh");
  return l2_error(coarse, restricted, assemble_mass(coarse_mesh));
}

double h1_seminorm_error(const StateVector& a, const StateVector& b, const RealStencilOperator& stiffness) {
  if (a.size() != b.size()) throw std::invalid_argument("states of different dimension");
  const StateVector d = a - b;
  return std::sqrt(std::max(0.0, stiffness.quadratic_form(d)));
}

NormReport compare_states(const StateVector& a, const StateVector& b, const RealStencilOperator& mass_matrix,
                          const RealStencilOperator& stiffness, double time) {
  return {l2_error(a, b, mass_matrix), h1_seminorm_error(a, b, stiffness), time};
}

}  // namespace hartree
