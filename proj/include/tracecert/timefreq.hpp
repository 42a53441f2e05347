#pragma once

// Sampled time-frequency layer on a periodic grid: STFT, discrete
// modulation norms, canonical tight Gabor windows, a Wilson orthonormal
// family and the realization of the Hartley eigenfunctions h_{n,k} in it.
//
// Inner products carry the grid measure: <f, g> = step * sum f conj(g).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "tracecert/bases.hpp"
#include "tracecert/block_operator.hpp"
#include "tracecert/error.hpp"

namespace tracecert {

inline constexpr double kDefaultPeriod = 16.0;
inline constexpr long kDefaultSamples = 512;

struct SampleGrid {
  double period = kDefaultPeriod;
  long samples = kDefaultSamples;

  double step() const { return period / static_cast<double>(samples); }

  /// Periodic coordinate of sample j, in (-period/2, period/2].
  double x(long j) const {
    return (j <= samples / 2 ? static_cast<double>(j) : static_cast<double>(j - samples)) * step();
  }

  void validate() const {
    if (samples < 4 || samples % 4 != 0) {
      throw ParameterError("grid sample count must be a positive multiple of 4, got " + std::to_string(samples));
    }
    if (!std::isfinite(period) || period < 8.0) {
      throw ParameterError("grid period must be >= 8, got " + std::to_string(period));
    }
  }

  friend bool operator==(const SampleGrid&, const SampleGrid&) = default;
};

struct SampledFunction {
  SampleGrid grid;
  Eigen::VectorXcd values;

  /// <*this, other> = step * sum values * conj(other.values).
  std::complex<double> inner(const SampledFunction& other) const {
    return grid.step() * other.values.dot(values);
  }

  double norm() const { return std::sqrt(grid.step()) * values.norm(); }
};

namespace detail {

inline void require_same_grid(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid) || f.values.size() != g.values.size()) {
    throw UsageError("sampled functions live on different grids");
  }
}

inline long wrap(long j, long n) { return ((j % n) + n) % n; }

inline long as_sample_count(double value, const char* what) {
  const double rounded = std::round(value);
  if (rounded < 1.0 || std::abs(value - rounded) > 1e-9 * std::max(1.0, std::abs(value))) {
    throw UsageError(std::string(what) + " is not a positive whole number of samples (" + std::to_string(value) + ")");
  }
  return static_cast<long>(rounded);
}

}  // namespace detail

inline SampledFunction normalized(SampledFunction f) {
  const double nrm = f.norm();
  if (nrm == 0.0) throw DomainError("cannot normalize the zero function");
  f.values /= nrm;
  return f;
}

/// Periodized exp(-pi x^2), unit norm.
inline SampledFunction sample_gaussian(const SampleGrid& grid) {
  grid.validate();
  SampledFunction g{grid, Eigen::VectorXcd(grid.samples)};
  for (long j = 0; j < grid.samples; ++j) {
    double v = 0.0;
    for (int r = -2; r <= 2; ++r) {
      const double t = grid.x(j) - r * grid.period;
      v += std::exp(-std::numbers::pi * t * t);
    }
    g.values(j) = v;
  }
  return normalized(std::move(g));
}

/// Largest contribution of the periodic images r != 0 relative to the peak
/// of the unperiodized Gaussian.
inline double gaussian_periodization_correction(const SampleGrid& grid) {
  grid.validate();
  double worst = 0.0;
  for (long j = 0; j < grid.samples; ++j) {
    double images = 0.0;
    for (int r = -2; r <= 2; ++r) {
      if (r == 0) continue;
      const double t = grid.x(j) - r * grid.period;
      images += std::exp(-std::numbers::pi * t * t);
    }
    worst = std::max(worst, images);
  }
  return worst;
}

/// V_g f(x_j, omega_m) for every time sample j (rows) and every frequency
/// bin m (columns), omega_m = m / period aliased to (-L/2, L/2] / period.
struct StftMatrix {
  SampleGrid grid;
  Eigen::MatrixXcd coefficients;

  /// Area element dx * domega = step / period = 1 / L.
  double cell_area() const { return grid.step() / grid.period; }

  double frequency(long m) const {
    return (m <= grid.samples / 2 ? static_cast<double>(m) : static_cast<double>(m - grid.samples)) / grid.period;
  }

  /// Riemann sum of |V|^2 over the time-frequency plane.
  double energy() const { return cell_area() * coefficients.squaredNorm(); }
};

inline StftMatrix stft(const SampledFunction& f, const SampledFunction& g) {
  detail::require_same_grid(f, g);
  const long n = f.grid.samples;
  const double step = f.grid.step();
  Eigen::FFT<double> fft;
  StftMatrix out{f.grid, Eigen::MatrixXcd(n, n)};
  Eigen::VectorXcd windowed(n);
  Eigen::VectorXcd spectrum(n);
  for (long j = 0; j < n; ++j) {
    for (long t = 0; t < n; ++t) windowed(t) = f.values(t) * std::conj(g.values(detail::wrap(t - j, n)));
    fft.fwd(spectrum, windowed);
    out.coefficients.row(j) = step * spectrum.transpose();
  }
  return out;
}

/// (iint |V_g f|^p dx domega)^(1/p) for p in {1, 2}.
inline double mp_norm_stft(const SampledFunction& f, const SampledFunction& g, int p) {
  if (p != 1 && p != 2) throw ParameterError("modulation norm exponent must be 1 or 2, got " + std::to_string(p));
  const StftMatrix v = stft(f, g);
  if (p == 2) return std::sqrt(v.energy());
  return v.cell_area() * v.coefficients.cwiseAbs().sum();
}

/// Time step a and frequency step b of a Gabor lattice aZ x bZ.
struct GaborLattice {
  double a = 0.5;
  double b = 1.0;
};

namespace detail {

struct LatticeSamples {
  long time_shift = 0;    // a / step
  long time_count = 0;    // period / a
  long freq_period = 0;   // (1/b) / step, also the number of distinct modulations
};

inline LatticeSamples lattice_samples(const SampleGrid& grid, const GaborLattice& lattice) {
  grid.validate();
  if (!(lattice.a > 0.0) || !(lattice.b > 0.0)) throw ParameterError("lattice steps must be positive");
  LatticeSamples s;
  s.time_shift = as_sample_count(lattice.a / grid.step(), "lattice step a");
  s.time_count = as_sample_count(grid.period / lattice.a, "period / a");
  s.freq_period = as_sample_count(1.0 / (lattice.b * grid.step()), "1/b");
  as_sample_count(grid.period * lattice.b, "period * b");
  return s;
}

}  // namespace detail

/// Dense Gabor frame operator S = sum_{r,q} <., g_{r,q}> g_{r,q} with
/// g_{r,q} = M_{qb} T_{ra} g. Uses the Walnut form
/// S(x,y) = (1/b) sum_r g(x - ra) conj(g(y - ra)) when x - y is in (1/b)Z.
inline Eigen::MatrixXcd frame_operator(const SampledFunction& g, const GaborLattice& lattice) {
  const auto ls = detail::lattice_samples(g.grid, lattice);
  const long n = g.grid.samples;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (long x = 0; x < n; ++x) {
    for (long y = x % ls.freq_period; y < n; y += ls.freq_period) {
      std::complex<double> acc = 0.0;
      for (long r = 0; r < ls.time_count; ++r) {
        const long shift = r * ls.time_shift;
        acc += g.values(detail::wrap(x - shift, n)) * std::conj(g.values(detail::wrap(y - shift, n)));
      }
      s(x, y) = acc / lattice.b;
    }
  }
  return s;
}

/// max |S / A - I| with A = ||g||^2 / (ab), the bound a tight frame must have.
inline double frame_deviation(const SampledFunction& g, const GaborLattice& lattice) {
  const Eigen::MatrixXcd s = frame_operator(g, lattice);
  const double bound = g.norm() * g.norm() / (lattice.a * lattice.b);
  return (s / bound - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

/// Canonical tight window S^(-1/2) g, rescaled to unit norm (its frame bound
/// is then 1/(ab)). A window that is already tight and unit norm comes back
/// unchanged.
inline SampledFunction tight_window(const SampledFunction& g, const GaborLattice& lattice) {
  const Eigen::MatrixXcd s = frame_operator(g, lattice);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on the Gabor frame operator");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  if (ev.minCoeff() < 1e-10 * ev.maxCoeff()) {
    throw NumericalError("Gabor frame operator is numerically singular (min/max eigenvalue " +
                         std::to_string(ev.minCoeff() / ev.maxCoeff()) + ")");
  }
  const Eigen::MatrixXcd& u = solver.eigenvectors();
  const Eigen::VectorXd inv_sqrt = ev.cwiseSqrt().cwiseInverse();
  SampledFunction out{g.grid, u * (inv_sqrt.asDiagonal() * (u.adjoint() * g.values))};
  return normalized(std::move(out));
}

/// Wilson label (l, m): m = 0 is T_l g; m >= 1 is
/// sqrt(2) g(x - l/2) cos(2 pi m x) for l + m even, sin for l + m odd.
struct WilsonLabel {
  long l = 0;
  long m = 0;
};

/// Labels ordered by m + |l|, then lexicographically in (l, m), skipping
/// labels that alias on the periodic grid and the Nyquist row.
inline std::vector<WilsonLabel> wilson_labels(const SampleGrid& grid, const GaborLattice& lattice, long count) {
  const auto ls = detail::lattice_samples(grid, lattice);
  const long half_period_units = static_cast<long>(std::lround(grid.period / 2.0));  // integer translates
  const long max_m = ls.freq_period / 2 - 1;
  std::vector<WilsonLabel> out;
  for (long shell = 0; static_cast<long>(out.size()) < count; ++shell) {
    if (shell > 2 * half_period_units + max_m) {
      throw UsageError("grid supports fewer than " + std::to_string(count) + " Wilson members");
    }
    for (long l = -shell; l <= shell && static_cast<long>(out.size()) < count; ++l) {
      const long m = shell - std::abs(l);
      const bool valid = m == 0 ? (-half_period_units < l && l <= half_period_units)
                                : (m <= max_m && -2 * half_period_units < l && l <= 2 * half_period_units);
      if (valid) out.push_back({l, m});
    }
  }
  return out;
}

/// Orthonormal Wilson members w_1..w_M stored as the columns of `basis`.
struct WilsonFamily {
  SampledFunction window;
  GaborLattice lattice;
  std::vector<WilsonLabel> labels;
  Eigen::MatrixXcd basis;

  long size() const { return static_cast<long>(labels.size()); }

  /// w_index, 1-based.
  SampledFunction member(long index) const {
    if (index < 1 || index > size()) {
      throw DomainError("Wilson index " + std::to_string(index) + " outside 1.." + std::to_string(size()));
    }
    return {window.grid, basis.col(index - 1)};
  }

  Eigen::MatrixXcd gram() const { return window.grid.step() * basis.adjoint() * basis; }

  double gram_deviation() const {
    return (gram() - Eigen::MatrixXcd::Identity(size(), size())).cwiseAbs().maxCoeff();
  }

  /// <f, w_n> for n = 1..M.
  Eigen::VectorXcd coefficients(const SampledFunction& f) const {
    detail::require_same_grid(f, window);
    return window.grid.step() * basis.adjoint() * f.values;
  }
};

inline SampledFunction wilson_member(const SampledFunction& window, const GaborLattice& lattice, WilsonLabel label) {
  const auto ls = detail::lattice_samples(window.grid, lattice);
  const SampleGrid& grid = window.grid;
  const long n = grid.samples;
  SampledFunction w{grid, Eigen::VectorXcd(n)};
  if (label.m == 0) {
    const long shift = 2 * label.l * ls.time_shift;  // translate by l = 2a l
    for (long j = 0; j < n; ++j) w.values(j) = window.values(detail::wrap(j - shift, n));
    return w;
  }
  const long shift = label.l * ls.time_shift;  // translate by l/2
  const bool even = ((label.l + label.m) % 2 + 2) % 2 == 0;
  for (long j = 0; j < n; ++j) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(label.m) * grid.x(j);
    const double carrier = even ? std::cos(phase) : std::sin(phase);
    w.values(j) = std::numbers::sqrt2 * carrier * window.values(detail::wrap(j - shift, n));
  }
  return w;
}

/// Builds `count` members for the lattice a = 1/2, b = 1. The window must be
/// tight for that lattice (frame deviation <= 1e-8) and count <= L/2.
inline WilsonFamily wilson_family(const SampledFunction& window, long count) {
  const GaborLattice lattice{0.5, 1.0};
  window.grid.validate();
  if (count < 1 || count > window.grid.samples / 2) {
    throw UsageError("Wilson family size must be in 1.." + std::to_string(window.grid.samples / 2) + ", got " +
                     std::to_string(count));
  }
  const double dev = frame_deviation(window, lattice);
  if (dev > 1e-8) {
    throw UsageError("window is not tight for a=1/2, b=1 (frame deviation " + std::to_string(dev) + ")");
  }
  WilsonFamily fam{window, lattice, wilson_labels(window.grid, lattice, count), {}};
  fam.basis.resize(window.grid.samples, count);
  for (long i = 0; i < count; ++i) fam.basis.col(i) = wilson_member(window, lattice, fam.labels[static_cast<std::size_t>(i)]).values;
  return fam;
}

/// h_{n,k} = sum_l hartley_vector(n,k)[l] w_{n(n-1)/2 + l + 1}.
inline SampledFunction build_h_nk(const WilsonFamily& family, long n, long k) {
  detail::require_index(n, k);
  const long needed = operator_dimension(n);
  if (family.size() < needed) {
    throw UsageError("h_{" + std::to_string(n) + "," + std::to_string(k) + "} needs " + std::to_string(needed) +
                     " Wilson members, family has " + std::to_string(family.size()));
  }
  const Eigen::VectorXd coeffs = std::get<Eigen::VectorXd>(hartley_vector(n, k).entries);
  SampledFunction h{family.window.grid, Eigen::VectorXcd::Zero(family.window.grid.samples)};
  for (long l = 0; l < n; ++l) h.values += coeffs(l) * family.basis.col(global_index(n, l) - 1);
  return h;
}

/// sum_n |<f, w_n>| over the family. f must lie in the span of the family
/// up to a relative residual of 1e-6.
inline double m1_coefficient_norm(const SampledFunction& f, const WilsonFamily& family) {
  const Eigen::VectorXcd c = family.coefficients(f);
  const double fnorm = f.norm();
  const Eigen::VectorXcd residual = f.values - family.basis * c;
  const double res = std::sqrt(f.grid.step()) * residual.norm() / (fnorm > 0.0 ? fnorm : 1.0);
  if (res > 1e-6) {
    throw DomainError("function is not in the span of the Wilson family (relative residual " + std::to_string(res) + ")");
  }
  return c.cwiseAbs().sum();
}

/// Coefficients <k, W_{m,n}> of a kernel in the tensor Wilson basis
/// W_{m,n}(x,y) = w_m(x) conj(w_n(y)).
struct KernelMatrix {
  Eigen::MatrixXcd coefficients;

  double abs_sum() const { return coefficients.cwiseAbs().sum(); }
};

/// Kernel k(x,y) = sum lambda h_{n,k}(x) conj(h_{n,k}(y)) over the given
/// eigen-specs, expanded over w_1..w_D with D the largest global index used.
inline KernelMatrix kernel_expand(const std::vector<EigenSpec>& specs, const WilsonFamily& family) {
  if (specs.empty()) throw UsageError("kernel_expand needs at least one eigen-spec");
  long dim = 0;
  for (const auto& s : specs) dim = std::max(dim, operator_dimension(s.n));
  if (family.size() < dim) {
    throw UsageError("kernel needs " + std::to_string(dim) + " Wilson members, family has " + std::to_string(family.size()));
  }
  const long n = family.window.grid.samples;
  const double step = family.window.grid.step();
  Eigen::MatrixXcd kernel = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& s : specs) {
    const SampledFunction h = build_h_nk(family, s.n, s.k);
    kernel.noalias() += s.lambda * h.values * h.values.adjoint();
  }
  const Eigen::MatrixXcd w = family.basis.leftCols(dim);
  return {step * step * (w.adjoint() * kernel * w)};
}

}  // namespace tracecert
