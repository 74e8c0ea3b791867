#include "hartree/nonlocal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

double smooth_transition(double t) {
  // C-infinity step: 0 for t <= 0, 1 for t >= 1.
  auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double a = f(t);
  const double b = f(1.0 - t);
  return a / (a + b);
}

}  // namespace

KernelSpec KernelSpec::gaussian(double sigma, double amplitude) {
  if (!(sigma > 0.0)) throw SpecificationError("gaussian kernel needs sigma > 0");
  KernelSpec k;
  k.family = Family::gaussian;
  k.sigma = sigma;
  k.amplitude = amplitude;
  return k;
}

KernelSpec KernelSpec::smoothed_indicator(double radius, double width, double amplitude) {
  if (!(radius > 0.0) || !(width > 0.0)) {
    throw SpecificationError("smoothed-indicator kernel needs radius > 0 and width > 0");
  }
  KernelSpec k;
  k.family = Family::smoothed_indicator;
  k.radius = radius;
  k.width = width;
  k.amplitude = amplitude;
  return k;
}

KernelSpec KernelSpec::from_table(int radius, std::vector<double> values) {
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  if (radius < 0 || values.size() != side * side) {
    throw SpecificationError("kernel table with radius " + std::to_string(radius) + " needs " +
                             std::to_string(side * side) + " values, got " + std::to_string(values.size()));
  }
  KernelSpec k;
  k.family = Family::table;
  k.table_radius = radius;
  k.table = std::move(values);
  Eigen::MatrixXd centred(side, side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) centred(i, j) = k.table[i + j * side];
  }
  validate_even(centred);
  return k;
}

double KernelSpec::evaluate(double x, double y) const {
  const double r2 = x * x + y * y;
  switch (family) {
    case Family::gaussian:
      return amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
    case Family::smoothed_indicator:
      return amplitude * 0.5 * (1.0 - std::tanh((std::sqrt(r2) - radius) / width));
    case Family::table:
      break;
  }
  throw SpecificationError("tabulated kernels have no continuous evaluation");
}

Eigen::MatrixXd KernelSpec::samples(double h, int lattice_side) const {
  const int span = 2 * lattice_side - 1;
  const int c = lattice_side - 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(span, span);
  for (int dy = -c; dy <= c; ++dy) {
    for (int dx = -c; dx <= c; ++dx) {
      double v = 0.0;
      if (family == Family::table) {
        if (std::abs(dx) <= table_radius && std::abs(dy) <= table_radius) {
          const int side = 2 * table_radius + 1;
          v = table[static_cast<std::size_t>((dx + table_radius) + (dy + table_radius) * side)];
        }
      } else {
        v = evaluate(dx * h, dy * h);
      }
      out(dx + c, dy + c) = v;
    }
  }
  validate_even(out);
  return out;
}

double KernelSpec::max_abs(double h, int lattice_side) const {
  return samples(h, lattice_side).cwiseAbs().maxCoeff();
}

void validate_even(const Eigen::MatrixXd& samples) {
  const Eigen::Index span = samples.rows();
  if (samples.cols() != span || span % 2 == 0) {
    throw SpecificationError("kernel samples must form a centred square table of odd size");
  }
  for (Eigen::Index j = 0; j < span; ++j) {
    for (Eigen::Index i = 0; i < span; ++i) {
      const double a = samples(i, j);
      if (!std::isfinite(a)) throw SpecificationError("kernel samples must be finite");
      if (a != samples(span - 1 - i, span - 1 - j)) {
        const Eigen::Index c = span / 2;
        throw SpecificationError("kernel must be even, V(-x) = V(x); sample at offset (" +
                                 std::to_string(i - c) + ", " + std::to_string(j - c) +
                                 ") differs from its mirror image");
      }
    }
  }
}

CouplingField CouplingField::constant(double value) {
  if (!std::isfinite(value)) throw SpecificationError("coupling must be finite");
  CouplingField c;
  c.family = Family::constant;
  c.value = value;
  return c;
}

CouplingField CouplingField::plateau(double value, double margin, double side_length) {
  if (!std::isfinite(value)) throw SpecificationError("coupling must be finite");
  if (!(margin > 0.0) || !(2.0 * margin < 0.5 * side_length)) {
    throw SpecificationError("plateau coupling needs 0 < margin < side_length / 4");
  }
  CouplingField c;
  c.family = Family::plateau;
  c.value = value;
  c.margin = margin;
  c.side_length = side_length;
  return c;
}

double smooth_plateau(double x, double y, double margin, double side_length) {
  auto profile = [&](double s) {
    const double d = std::min(s, side_length - s);
    return smooth_transition((d - margin) / margin);
  };
  return profile(x) * profile(y);
}

double CouplingField::evaluate(double x, double y) const {
  if (family == Family::constant) return value;
  return value * smooth_plateau(x, y, margin, side_length);
}

int fft_friendly_size(int n) {
  for (int p = std::max(n, 1);; ++p) {
    int r = p;
    for (int f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return p;
  }
}

Convolver::Convolver(const Eigen::MatrixXd& kernel_samples, double h)
    : side_(static_cast<int>((kernel_samples.rows() + 1) / 2)),
      padded_(fft_friendly_size(static_cast<int>(kernel_samples.rows()))),
      weight_(h * h),
      kernel_(kernel_samples) {
  validate_even(kernel_samples);
  const int c = side_ - 1;
  const auto p = static_cast<std::size_t>(padded_);
  kernel_spectrum_.assign(p * p, {0.0, 0.0});
  // Wrap negative offsets so that the circular convolution of size P >= 2L-1
  // reproduces the linear one on the first L x L entries.
  for (int dy = -c; dy <= c; ++dy) {
    for (int dx = -c; dx <= c; ++dx) {
      const auto ix = static_cast<std::size_t>((dx + padded_) % padded_);
      const auto iy = static_cast<std::size_t>((dy + padded_) % padded_);
      kernel_spectrum_[ix + iy * p] = kernel_(dx + c, dy + c);
    }
  }
  line_in_.resize(p);
  line_out_.resize(p);
  transform(kernel_spectrum_, false);
}

void Convolver::transform(std::vector<std::complex<double>>& data, bool inverse) {
  const auto p = static_cast<std::size_t>(padded_);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < p; ++i) line_in_[i] = data[i + j * p];
    inverse ? fft_.inv(line_out_, line_in_) : fft_.fwd(line_out_, line_in_);
    for (std::size_t i = 0; i < p; ++i) data[i + j * p] = line_out_[i];
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) line_in_[j] = data[i + j * p];
    inverse ? fft_.inv(line_out_, line_in_) : fft_.fwd(line_out_, line_in_);
    for (std::size_t j = 0; j < p; ++j) data[i + j * p] = line_out_[j];
  }
}

RealVector Convolver::convolve(const RealVector& density) {
  const auto l = static_cast<std::size_t>(side_);
  if (static_cast<std::size_t>(density.size()) != l * l) {
    throw std::invalid_argument("density has " + std::to_string(density.size()) +
                                " entries, lattice needs " + std::to_string(l * l));
  }
  const auto p = static_cast<std::size_t>(padded_);
  work_.assign(p * p, {0.0, 0.0});
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < l; ++i) work_[i + j * p] = density(static_cast<Eigen::Index>(i + j * l));
  }
  transform(work_, false);
  for (std::size_t k = 0; k < p * p; ++k) work_[k] *= kernel_spectrum_[k];
  transform(work_, true);
  RealVector out(density.size());
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < l; ++i) out(static_cast<Eigen::Index>(i + j * l)) = weight_ * work_[i + j * p].real();
  }
  return out;
}

RealVector Convolver::convolve_direct(const RealVector& density) const {
  const int l = side_;
  if (density.size() != static_cast<Eigen::Index>(l) * l) {
    throw std::invalid_argument("density has " + std::to_string(density.size()) +
                                " entries, lattice needs " + std::to_string(l * l));
  }
  const int c = l - 1;
  RealVector out = RealVector::Zero(density.size());
  for (int i2 = 0; i2 < l; ++i2) {
    for (int i1 = 0; i1 < l; ++i1) {
      double acc = 0.0;
      for (int j2 = 0; j2 < l; ++j2) {
        for (int j1 = 0; j1 < l; ++j1) acc += kernel_(i1 - j1 + c, i2 - j2 + c) * density(j1 + j2 * l);
      }
      out(i1 + i2 * l) = weight_ * acc;
    }
  }
  return out;
}

NonlocalContext::NonlocalContext(const Mesh& mesh, const KernelSpec& kernel, const CouplingField& coupling)
    : mesh_(mesh),
      kernel_(kernel),
      coupling_(coupling),
      active_(!coupling.is_zero()),
      kernel_max_(0.0),
      coupling_max_(coupling.max_abs()),
      tensor_(element_triple_tensor(mesh.spacing())) {
  const int n = mesh.nodes_per_side();
  const auto samples = kernel.samples(mesh.spacing(), n);
  kernel_max_ = samples.cwiseAbs().maxCoeff();
  if (kernel_max_ == 0.0) active_ = false;
  lambda_.resize(static_cast<Eigen::Index>(n) * n);
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      const auto [x, y] = mesh.lattice_position(i1, i2);
      lambda_(i1 + static_cast<Eigen::Index>(i2) * n) = coupling.evaluate(x, y);
    }
  }
  if (active_) convolver_ = std::make_unique<Convolver>(samples, mesh.spacing());
}

RealVector NonlocalContext::density_moments(const StateVector& z) const {
  if (z.size() != static_cast<Eigen::Index>(mesh_.dofs())) {
    throw std::invalid_argument("state dimension does not match the mesh");
  }
  const int n = mesh_.nodes_per_side();
  const int ne = mesh_.elements_per_side();
  RealVector s = RealVector::Zero(static_cast<Eigen::Index>(n) * n);
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      const auto dofs = element_dofs(mesh_, e1, e2);
      const auto nodes = element_lattice_nodes(mesh_, e1, e2);
      std::array<std::complex<double>, 4> zl{};
      for (int a = 0; a < 4; ++a) zl[a] = dofs[a] >= 0 ? z(dofs[a]) : std::complex<double>{};
      // Hermitian 4x4 products conj(z_a) z_b, real part of the symmetric sum.
      std::array<std::array<double, 4>, 4> prod{};
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) prod[a][b] = std::real(std::conj(zl[a]) * zl[b]);
      }
      for (int c = 0; c < 4; ++c) {
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) acc += tensor_[a][b][c] * prod[a][b];
        }
        s(static_cast<Eigen::Index>(nodes[c])) += acc;
      }
    }
  }
  return s;
}

RealVector NonlocalContext::effective_potential(const RealVector& moments) {
  const auto n = static_cast<Eigen::Index>(mesh_.nodes_per_side());
  if (moments.size() != n * n) throw std::invalid_argument("moments must cover the full lattice");
  if (!active_) return RealVector::Zero(moments.size());
  const double h2 = mesh_.spacing() * mesh_.spacing();
  // Moments are h^2-weighted densities; the convolver applies the h^2 back.
  return lambda_.cwiseProduct(convolver_->convolve(moments / h2));
}

StateVector NonlocalContext::apply_potential(const RealVector& lattice_potential, const StateVector& z) const {
  const int ne = mesh_.elements_per_side();
  StateVector r = StateVector::Zero(z.size());
  for (int e2 = 0; e2 < ne; ++e2) {
    for (int e1 = 0; e1 < ne; ++e1) {
      const auto dofs = element_dofs(mesh_, e1, e2);
      const auto nodes = element_lattice_nodes(mesh_, e1, e2);
      std::array<std::complex<double>, 4> zl{};
      std::array<double, 4> ul{};
      for (int a = 0; a < 4; ++a) {
        zl[a] = dofs[a] >= 0 ? z(dofs[a]) : std::complex<double>{};
        ul[a] = lattice_potential(static_cast<Eigen::Index>(nodes[a]));
      }
      for (int a = 0; a < 4; ++a) {
        if (dofs[a] < 0) continue;
        std::complex<double> acc{};
        for (int b = 0; b < 4; ++b) {
          double coeff = 0.0;
          for (int c = 0; c < 4; ++c) coeff += tensor_[a][b][c] * ul[c];
          acc += coeff * zl[b];
        }
        r(dofs[a]) += acc;
      }
    }
  }
  return r;
}

RealVector convolve(const KernelSpec& kernel, const Mesh& mesh, const RealVector& density) {
  const int m = mesh.interior_per_side();
  if (density.size() != static_cast<Eigen::Index>(mesh.dofs())) {
    throw std::invalid_argument("density has " + std::to_string(density.size()) + " entries, mesh has " +
                                std::to_string(mesh.dofs()) + " interior nodes");
  }
  Convolver conv(kernel.samples(mesh.spacing(), m), mesh.spacing());
  return conv.convolve(density);
}

StateVector nonlinear_load(const StateVector& z, NonlocalContext& context) {
  if (!context.active()) return StateVector::Zero(z.size());
  return nonlinear_load(z, context.density_moments(z), context);
}

StateVector nonlinear_load(const StateVector& z, const RealVector& moments, NonlocalContext& context) {
  if (!context.active()) return StateVector::Zero(z.size());
  return context.apply_potential(context.effective_potential(moments), z);
}

double nonlinear_energy(const StateVector& z, NonlocalContext& context) {
  if (!context.active()) return 0.0;
  return 0.5 * std::real(z.dot(nonlinear_load(z, context)));
}

std::complex<double> interaction_form(const StateVector& a, const StateVector& b, NonlocalContext& context) {
  if (!context.active()) return {};
  return a.dot(context.apply_potential(context.effective_potential(context.density_moments(b)), a));
}

}  // namespace hartree
