#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hartree {

/// Problem data that violates a model requirement (non-real potential, odd kernel, ...).
class SpecificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The per-step fixed-point iteration failed to contract; the caller has to
/// reduce the time step.
class NonContraction : public std::runtime_error {
 public:
  NonContraction(const std::string& what, std::size_t step, double ratio, double guard)
      : std::runtime_error(what), step_(step), ratio_(ratio), guard_(guard) {}

  /// Index n of the step being solved (1-based, 0 if unknown).
  std::size_t step() const { return step_; }
  /// Last empirical contraction ratio of successive iterate differences.
  double empirical_ratio() const { return ratio_; }
  /// Value of alpha_hat * (M^{1/2} + 1) * tau; contraction is guaranteed when <= 1.
  double guard_value() const { return guard_; }

 private:
  std::size_t step_;
  double ratio_;
  double guard_;
};

}  // namespace hartree
