#include "hartree/steppers.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hartree/assembly.hpp"
#include "hartree/errors.hpp"
#include "hartree/observables.hpp"

namespace hartree {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

}  // namespace

GalerkinSystem::GalerkinSystem(const Mesh& mesh, RealStencilOperator mass, RealStencilOperator stiffness,
                               RealStencilOperator potential, NonlocalContext nonlocal)
    : mesh_(mesh),
      mass_(std::move(mass)),
      stiffness_(std::move(stiffness)),
      potential_(std::move(potential)),
      linear_(stiffness_ + potential_),
      nonlocal_(std::move(nonlocal)) {
  const auto n = mesh.dofs();
  if (mass_.dimension() != n || stiffness_.dimension() != n || potential_.dimension() != n) {
    throw std::invalid_argument("operator dimensions do not match the mesh");
  }
  if (mass_.coefficients() == assemble_mass(mesh).coefficients()) {
    // A = h^2 (T x T) with T = tridiag(1/6, 2/3, 1/6).
    const int m = mesh.interior_per_side();
    line_lower_ = Eigen::VectorXd::Zero(m);
    line_pivot_.resize(m);
    line_pivot_(0) = 2.0 / 3.0;
    for (int i = 1; i < m; ++i) {
      line_lower_(i) = (1.0 / 6.0) / line_pivot_(i - 1);
      line_pivot_(i) = 2.0 / 3.0 - line_lower_(i) / 6.0;
    }
    return;
  }
  auto factor = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(mass_.to_sparse());
  if (factor->info() != Eigen::Success) throw std::runtime_error("mass matrix factorization failed");
  mass_factor_ = std::move(factor);
}

StateVector GalerkinSystem::solve_mass(const StateVector& rhs) const {
  StateVector out(rhs.size());
  if (line_pivot_.size() > 0) {
    // vec(X) = A^{-1} vec(R)  <=>  X = T^{-1} R T^{-1} / h^2, column-major in node_index order.
    const Eigen::Index m = mesh_.interior_per_side();
    Eigen::Map<Eigen::MatrixXcd> x(out.data(), m, m);
    x = Eigen::Map<const Eigen::MatrixXcd>(rhs.data(), m, m) / (mesh_.spacing() * mesh_.spacing());
    for (Eigen::Index i = 1; i < m; ++i) x.row(i) -= line_lower_(i) * x.row(i - 1);
    x = line_pivot_.cwiseInverse().asDiagonal() * x;
    for (Eigen::Index i = m - 2; i >= 0; --i) x.row(i) -= line_lower_(i + 1) * x.row(i + 1);
    for (Eigen::Index j = 1; j < m; ++j) x.col(j) -= line_lower_(j) * x.col(j - 1);
    x = x * line_pivot_.cwiseInverse().asDiagonal();
    for (Eigen::Index j = m - 2; j >= 0; --j) x.col(j) -= line_lower_(j + 1) * x.col(j + 1);
    return out;
  }
  out.real() = mass_factor_->solve(rhs.real());
  out.imag() = mass_factor_->solve(rhs.imag());
  return out;
}

const char* to_string(SchemeKind kind) {
  return kind == SchemeKind::coherent ? "coherent" : "incoherent";
}

StepResult step(SchemeKind scheme, const StateVector& previous, GalerkinSystem& system, double tau,
                const FixedPointConfig& fp, std::size_t step_index, const std::optional<StateVector>& guess) {
  if (!(fp.tolerance > 0.0) || fp.max_iterations < 2) {
    throw std::invalid_argument("fixed-point config needs tolerance > 0 and at least 2 iterations");
  }
  if (previous.size() != static_cast<Eigen::Index>(system.mesh().dofs())) {
    throw std::invalid_argument("state dimension does not match the system");
  }
  const auto start = std::chrono::steady_clock::now();
  auto& nonlocal = system.nonlocal();
  const bool nonlinear = nonlocal.active();
  const Complex half_step = -kI * (0.5 * tau);

  RealVector previous_moments;
  if (nonlinear && scheme == SchemeKind::incoherent) previous_moments = nonlocal.density_moments(previous);

  auto force = [&](const StateVector& mid) -> StateVector {
    StateVector f = system.linear_part().apply(mid);
    if (!nonlinear) return f;
    if (scheme == SchemeKind::coherent) {
      f += nonlinear_load(mid, nonlocal);
    } else {
      const StateVector next = 2.0 * mid - previous;
      const RealVector moments = 0.5 * (nonlocal.density_moments(next) + previous_moments);
      f += nonlinear_load(mid, moments, nonlocal);
    }
    return f;
  };

  StateVector mid = guess.value_or(previous);
  StepDiagnostics diag;
  double last = 0.0;
  int growing = 0;
  bool converged = false;
  for (std::size_t k = 1; k <= fp.max_iterations; ++k) {
    StateVector updated = previous + half_step * system.solve_mass(force(mid));
    const StateVector diff = updated - mid;
    const double residual = std::sqrt(std::max(0.0, system.mass().quadratic_form(diff)));
    mid = std::move(updated);
    diag.iterations = k;
    diag.residual = residual;
    if (k > 1 && last > 0.0) diag.contraction_ratio = residual / last;
    if (residual <= fp.tolerance) {
      converged = true;
      break;
    }
    if (k > 1 && residual > fp.guard_ratio * last) {
      if (++growing >= 3) break;
    } else {
      growing = 0;
    }
    last = residual;
  }
  if (!converged) {
    const double m0 = mass(previous, system.mass());
    const auto estimate = estimate_contraction(system, m0);
    std::ostringstream os;
    os << "fixed-point iteration did not contract at step " << step_index << " after " << diag.iterations
       << " iterations (residual " << diag.residual << ", empirical ratio " << diag.contraction_ratio
       << "); guard alpha_hat*(M^1/2+1)*tau = " << estimate.guard(tau)
       << " should be <= 1, reduce the time step";
    throw NonContraction(os.str(), step_index, diag.contraction_ratio, estimate.guard(tau));
  }

  StepResult result;
  result.next = 2.0 * mid - previous;
  diag.mass = mass(result.next, system.mass());
  diag.energy = energy(result.next, system.stiffness(), system.potential(), nonlocal);
  diag.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.diagnostics = diag;
  return result;
}

StepResult step_coherent(const StateVector& previous, GalerkinSystem& system, double tau,
                         const FixedPointConfig& fp) {
  return step(SchemeKind::coherent, previous, system, tau, fp);
}

StepResult step_incoherent(const StateVector& previous, GalerkinSystem& system, double tau,
                           const FixedPointConfig& fp) {
  return step(SchemeKind::incoherent, previous, system, tau, fp);
}

double ContractionEstimate::guard(double tau) const {
  return alpha * (std::sqrt(std::max(mass, 0.0)) + 1.0) * std::abs(tau);
}

ContractionEstimate estimate_contraction(GalerkinSystem& system, double mass_value, int power_iterations) {
  ContractionEstimate est;
  est.mass = mass_value;
  const auto n = static_cast<Eigen::Index>(system.mesh().dofs());
  // Fixed seed keeps reruns bit-identical.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = dist(rng);
  double rho = 0.0;
  for (int k = 0; k < power_iterations; ++k) {
    const double norm = std::sqrt(system.mass().quadratic_form(x));
    if (norm == 0.0) break;
    x /= norm;
    const Eigen::VectorXd hx = system.linear_part().apply(x);
    rho = std::abs(x.dot(hx));
    x = system.solve_mass(hx.cast<Complex>()).real();
  }
  est.spectral_radius = rho;
  const auto& nonlocal = system.nonlocal();
  const double nl = nonlocal.active() ? nonlocal.coupling_max_abs() * nonlocal.kernel_max_abs() : 0.0;
  const double ball = std::sqrt(std::max(mass_value, 0.0)) + 1.0;
  est.alpha = rho + 4.0 * nl * ball * ball;
  return est;
}

Trajectory evolve(const StateVector& z0, GalerkinSystem& system, SchemeKind scheme, const TimeGrid& grid,
                  const FixedPointConfig& fp, const EvolveOptions& options) {
  Trajectory traj;
  const double tau = grid.step_size();
  const std::size_t steps = tau == 0.0 ? 0 : grid.steps;

  StepDiagnostics initial;
  initial.mass = mass(z0, system.mass());
  initial.energy = energy(z0, system.stiffness(), system.potential(), system.nonlocal());
  traj.times.push_back(0.0);
  traj.diagnostics.push_back(initial);
  traj.contraction = options.contraction ? *options.contraction : estimate_contraction(system, initial.mass);
  if (options.snapshot_stride > 0) traj.snapshots.push_back({0, 0.0, z0});
  if (options.observer) options.observer(0, 0.0, z0, initial);

  StateVector current = z0;
  StateVector before;
  for (std::size_t n = 1; n <= steps; ++n) {
    std::optional<StateVector> guess;
    if (fp.extrapolate_guess && n > 1) guess = 0.5 * (3.0 * current - before);
    StepResult result = step(scheme, current, system, tau, fp, n, guess);
    before = std::move(current);
    current = std::move(result.next);
    const double t = grid.time(n);
    traj.times.push_back(t);
    traj.diagnostics.push_back(result.diagnostics);
    if (options.snapshot_stride > 0 && n % options.snapshot_stride == 0) traj.snapshots.push_back({n, t, current});
    if (options.observer) options.observer(n, t, current, result.diagnostics);
  }
  traj.final_state = std::move(current);
  return traj;
}

}  // namespace hartree
