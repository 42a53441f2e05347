#pragma once

// Block orthonormal families of C^n and R^n (Fourier and Hartley) and the
// coordinate l1 norm taken against the standard basis.

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tracecert/error.hpp"

namespace tracecert {

enum class BasisKind { fourier, hartley };

inline std::string_view to_string(BasisKind kind) {
  return kind == BasisKind::fourier ? "fourier" : "hartley";
}

inline BasisKind parse_basis_kind(std::string_view text) {
  if (text == "fourier") return BasisKind::fourier;
  if (text == "hartley") return BasisKind::hartley;
  throw ParameterError("unknown basis kind '" + std::string(text) + "' (expected fourier or hartley)");
}

namespace detail {

inline void require_block_size(long n) {
  if (n < 1) throw ParameterError("block size must be >= 1, got " + std::to_string(n));
}

inline void require_index(long n, long k) {
  require_block_size(n);
  if (k < 0 || k >= n) {
    throw DomainError("index out of range: (n,k)=(" + std::to_string(n) + "," + std::to_string(k) +
                      "), need 0 <= k < n");
  }
}

// 2*pi*k*l/n with k*l reduced modulo n in integer arithmetic first.
inline double block_angle(long n, long k, long l) {
  const long long r = (static_cast<long long>(k) * l) % n;
  return 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
}

inline double hartley_cas(long n, long k, long l) {
  const double x = block_angle(n, k, l);
  return std::cos(x) + std::sin(x);
}

}  // namespace detail

/// One member e_{n,k} (complex) or h_{n,k} (real) of a block family.
struct BasisVector {
  long n = 1;
  long k = 0;
  BasisKind kind = BasisKind::fourier;
  std::variant<Eigen::VectorXd, Eigen::VectorXcd> entries;

  long size() const {
    return std::visit([](const auto& v) { return static_cast<long>(v.size()); }, entries);
  }
};

/// Column k is e_{n,k}: entry l equals exp(-2 pi i k l / n) / sqrt(n).
inline Eigen::MatrixXcd fourier_matrix(long n) {
  detail::require_block_size(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd m(n, n);
  for (long k = 0; k < n; ++k) {
    for (long l = 0; l < n; ++l) {
      const double x = detail::block_angle(n, k, l);
      m(l, k) = std::complex<double>(scale * std::cos(x), -scale * std::sin(x));
    }
  }
  return m;
}

/// Column k is h_{n,k}: entry l equals (cos + sin)(2 pi k l / n) / sqrt(n).
inline Eigen::MatrixXd hartley_matrix(long n) {
  detail::require_block_size(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd m(n, n);
  for (long k = 0; k < n; ++k) {
    for (long l = 0; l < n; ++l) m(l, k) = scale * detail::hartley_cas(n, k, l);
  }
  return m;
}

/// Calls fn with the basis matrix of the requested kind (MatrixXcd or
/// MatrixXd) and returns its result.
template <class Fn>
decltype(auto) visit_basis_matrix(long n, BasisKind kind, Fn&& fn) {
  if (kind == BasisKind::fourier) return fn(fourier_matrix(n));
  return fn(hartley_matrix(n));
}

inline BasisVector fourier_vector(long n, long k) {
  detail::require_index(n, k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::VectorXcd v(n);
  for (long l = 0; l < n; ++l) {
    const double x = detail::block_angle(n, k, l);
    v(l) = std::complex<double>(scale * std::cos(x), -scale * std::sin(x));
  }
  return {n, k, BasisKind::fourier, std::move(v)};
}

inline BasisVector hartley_vector(long n, long k) {
  detail::require_index(n, k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::VectorXd v(n);
  for (long l = 0; l < n; ++l) v(l) = scale * detail::hartley_cas(n, k, l);
  return {n, k, BasisKind::hartley, std::move(v)};
}

inline BasisVector basis_vector(long n, long k, BasisKind kind) {
  return kind == BasisKind::fourier ? fourier_vector(n, k) : hartley_vector(n, k);
}

/// Sum of absolute coordinates against the standard basis.
template <class Derived>
double l1_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().sum();
}

inline double l1_norm(const BasisVector& v) {
  return std::visit([](const auto& e) { return l1_norm(e); }, v.entries);
}

/// The multiset {k*l mod n : l} is gcd(k,n) copies of the multiples of
/// gcd(k,n), so the Hartley l1 norm depends on (n, gcd(k,n)) only. Costs
/// O(n / gcd) instead of O(n); used by the long partial-sum series.
inline double hartley_l1_norm(long n, long k) {
  detail::require_index(n, k);
  const long d = std::gcd(k, n);  // gcd(0, n) = n
  double sum = 0.0;
  for (long j = 0; j < n / d; ++j) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(j * d) / static_cast<double>(n);
    sum += std::abs(std::cos(x) + std::sin(x));
  }
  return static_cast<double>(d) * sum / std::sqrt(static_cast<double>(n));
}

/// Every Fourier entry has modulus 1/sqrt(n), so the l1 norm is sqrt(n).
inline double fourier_l1_norm(long n, long k) {
  detail::require_index(n, k);
  return std::sqrt(static_cast<double>(n));
}

inline double block_l1_norm(long n, long k, BasisKind kind) {
  return kind == BasisKind::fourier ? fourier_l1_norm(n, k) : hartley_l1_norm(n, k);
}

/// max over (k,k') of |<v_k, v_k'> - delta_{kk'}|.
inline double check_orthonormal(long n, BasisKind kind) {
  return visit_basis_matrix(n, kind, [n](const auto& v) {
    using Mat = std::decay_t<decltype(v)>;
    Mat gram = Mat::Zero(n, n);
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(v.adjoint());
    gram.template triangularView<Eigen::StrictlyUpper>() = gram.adjoint();
    return (gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  });
}

/// Max-entry deviation of sum_k v_k v_k^* from the identity.
inline double resolution_of_identity(long n, BasisKind kind) {
  return visit_basis_matrix(n, kind, [n](const auto& v) {
    using Mat = std::decay_t<decltype(v)>;
    Mat sum = Mat::Zero(n, n);
    sum.template selfadjointView<Eigen::Lower>().rankUpdate(v);
    sum.template triangularView<Eigen::StrictlyUpper>() = sum.adjoint();
    return (sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  });
}

struct L1Report {
  long n = 1;
  long k = 0;
  BasisKind kind = BasisKind::fourier;
  double l1_value = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool within_bounds = false;
};

/// Absolute tolerance for l1 comparisons; l1 values grow like sqrt(n).
inline double l1_tolerance(long n) { return 1e-10 * std::sqrt(static_cast<double>(n)); }

inline L1Report make_l1_report(long n, long k, BasisKind kind, double l1_value) {
  const double root_n = std::sqrt(static_cast<double>(n));
  L1Report r;
  r.n = n;
  r.k = k;
  r.kind = kind;
  r.l1_value = l1_value;
  r.lower_bound = kind == BasisKind::fourier ? root_n : std::sqrt(static_cast<double>(n) / 2.0);
  r.upper_bound = root_n;
  const double tol = l1_tolerance(n);
  r.within_bounds = r.lower_bound - tol <= l1_value && l1_value <= r.upper_bound + tol;
  return r;
}

/// Reports for every 1 <= n <= n_max, 0 <= k < n, Fourier first then
/// Hartley within each n. The l1 values are measured from materialized
/// vectors.
inline std::vector<L1Report> l1_bounds_report(long n_max) {
  detail::require_block_size(n_max);
  std::vector<L1Report> out;
  out.reserve(static_cast<std::size_t>(n_max * (n_max + 1)));
  for (long n = 1; n <= n_max; ++n) {
    for (BasisKind kind : {BasisKind::fourier, BasisKind::hartley}) {
      visit_basis_matrix(n, kind, [&](const auto& v) {
        for (long k = 0; k < n; ++k) out.push_back(make_l1_report(n, k, kind, l1_norm(v.col(k))));
        return 0;
      });
    }
  }
  return out;
}

}  // namespace tracecert
