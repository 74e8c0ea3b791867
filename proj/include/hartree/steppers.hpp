#pragma once

#include <Eigen/SparseCholesky>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hartree/mesh.hpp"
#include "hartree/nonlocal.hpp"
#include "hartree/stencil_operator.hpp"

namespace hartree {

/// The constant Galerkin operators plus the nonlocal term on one mesh.
///
/// The mass matrix is factorized once at construction: when it is the Q1 mass
/// matrix A = h^2 (T x T) the solve runs as two sweeps of the 1D factor T,
/// otherwise a sparse Cholesky factor is used. The nonlocal context carries FFT
/// workspace, so a system advances one trajectory at a time.
class GalerkinSystem {
 public:
  GalerkinSystem(const Mesh& mesh, RealStencilOperator mass, RealStencilOperator stiffness,
                 RealStencilOperator potential, NonlocalContext nonlocal);

  const Mesh& mesh() const { return mesh_; }
  const RealStencilOperator& mass() const { return mass_; }
  const RealStencilOperator& stiffness() const { return stiffness_; }
  const RealStencilOperator& potential() const { return potential_; }
  /// B + Y.
  const RealStencilOperator& linear_part() const { return linear_; }
  NonlocalContext& nonlocal() { return nonlocal_; }
  const NonlocalContext& nonlocal() const { return nonlocal_; }

  /// A^{-1} rhs.
  StateVector solve_mass(const StateVector& rhs) const;

 private:
  Mesh mesh_;
  RealStencilOperator mass_;
  RealStencilOperator stiffness_;
  RealStencilOperator potential_;
  RealStencilOperator linear_;
  NonlocalContext nonlocal_;
  std::shared_ptr<const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> mass_factor_;
  /// T = L diag(d) L^T with unit lower-bidiagonal L (subdiagonal l), filled
  /// when A is tensor-product; empty otherwise.
  Eigen::VectorXd line_lower_;
  Eigen::VectorXd line_pivot_;
};

enum class SchemeKind { coherent, incoherent };

const char* to_string(SchemeKind kind);

/// tau = T/N, t_n = n*tau for n = 0..N.
struct TimeGrid {
  double horizon = 0.0;
  std::size_t steps = 0;

  double step_size() const { return steps == 0 ? 0.0 : horizon / static_cast<double>(steps); }
  double time(std::size_t n) const { return static_cast<double>(n) * step_size(); }
};

struct FixedPointConfig {
  /// Stop once the A-norm of the difference of successive iterates is <= tolerance.
  double tolerance = 1e-13;
  std::size_t max_iterations = 500;
  /// An iteration counts as growing when residual_k > guard_ratio * residual_{k-1};
  /// three consecutive growing iterations abort the step.
  double guard_ratio = 1.0;
  /// Start from the extrapolated midpoint (3 z_{n-1} - z_{n-2}) / 2 instead of z_{n-1}.
  bool extrapolate_guess = false;
};

struct StepDiagnostics {
  std::size_t iterations = 0;
  double residual = 0.0;
  /// Ratio of the last two iterate differences (0 when fewer than two).
  double contraction_ratio = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double wall_seconds = 0.0;
};

struct StepResult {
  StateVector next;
  StepDiagnostics diagnostics;
};

/// One step of either scheme. Solves for the midpoint m = (z_n + z_{n-1})/2 by
///   m <- z_{n-1} - (i tau / 2) A^{-1} [ (B + Y) m + r(m) ]
/// and returns z_n = 2m - z_{n-1}. The coherent scheme evaluates the
/// nonlocal density at m, the incoherent one averages the densities of
/// z_n = 2m - z_{n-1} and z_{n-1}. Throws NonContraction.
StepResult step(SchemeKind scheme, const StateVector& previous, GalerkinSystem& system, double tau,
                const FixedPointConfig& fp, std::size_t step_index = 0,
                const std::optional<StateVector>& guess = std::nullopt);

StepResult step_coherent(const StateVector& previous, GalerkinSystem& system, double tau,
                         const FixedPointConfig& fp);
StepResult step_incoherent(const StateVector& previous, GalerkinSystem& system, double tau,
                           const FixedPointConfig& fp);

/// Computable stand-in for the contraction constant:
///   alpha_hat = rho(A^{-1}(B+Y)) + 4 |lambda|_inf |V|_inf (M^{1/2} + 1)^2.
struct ContractionEstimate {
  double spectral_radius = 0.0;
  double alpha = 0.0;
  double mass = 0.0;

  /// alpha_hat * (M^{1/2} + 1) * |tau|; contraction is guaranteed when <= 1.
  double guard(double tau) const;
};

ContractionEstimate estimate_contraction(GalerkinSystem& system, double mass, int power_iterations = 60);

struct Snapshot {
  std::size_t step = 0;
  double time = 0.0;
  StateVector state;
};

using StepObserver =
    std::function<void(std::size_t n, double t, const StateVector& z, const StepDiagnostics& diagnostics)>;

struct EvolveOptions {
  /// Keep every k-th state (0 keeps none besides the final one).
  std::size_t snapshot_stride = 0;
  StepObserver observer;
  /// Reused instead of re-estimating when the caller already has it.
  std::optional<ContractionEstimate> contraction;
};

struct Trajectory {
  std::vector<double> times;
  /// One entry per time level, the first describing the initial state.
  std::vector<StepDiagnostics> diagnostics;
  std::vector<Snapshot> snapshots;
  StateVector final_state;
  ContractionEstimate contraction;
};

/// Advances z0 over the time grid. N = 0 (or T = 0) returns z0 untouched.
/// NonContraction carries the index of the failing step.
Trajectory evolve(const StateVector& z0, GalerkinSystem& system, SchemeKind scheme, const TimeGrid& grid,
                  const FixedPointConfig& fp, const EvolveOptions& options = {});

}  // namespace hartree
