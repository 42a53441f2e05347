#pragma once

// Type-A / Type-B partial sums, the explicit Type-B decomposition
// T_n = n^-3 I_n + n^-(3+p) sum_k k v_{n,k} v_{n,k}^*, log-slope fits and
// the counterexample certificate.
//
// Every series is summed from its largest index down (smallest terms
// first) in double precision.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tracecert/bases.hpp"
#include "tracecert/block_operator.hpp"
#include "tracecert/error.hpp"

namespace tracecert {

enum class SeriesLabel { trace, type_a, type_b };

inline std::string_view to_string(SeriesLabel label) {
  switch (label) {
    case SeriesLabel::trace: return "trace";
    case SeriesLabel::type_a: return "type_a";
    case SeriesLabel::type_b: return "type_b";
  }
  return "?";
}

struct SeriesPoint {
  long n = 1;
  double value = 0.0;
};

struct PartialSumSeries {
  SeriesLabel label = SeriesLabel::trace;
  double p = kDefaultP;
  BasisKind kind = BasisKind::fourier;
  std::vector<SeriesPoint> points;

  bool strictly_increasing() const {
    return std::adjacent_find(points.begin(), points.end(), [](const SeriesPoint& a, const SeriesPoint& b) {
             return !(b.n > a.n && b.value > a.value);
           }) == points.end();
  }
};

/// Sums terms[N-1], ..., terms[0].
inline double sum_smallest_first(std::span<const double> terms) {
  double sum = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) sum += *it;
  return sum;
}

inline double harmonic_number(long n) {
  detail::require_block_size(n);
  double sum = 0.0;
  for (long j = n; j >= 1; --j) sum += 1.0 / static_cast<double>(j);
  return sum;
}

/// (n + n(n-1)/(2 n^p)) / n^3: the trace of block n.
inline double trace_block_term(long n, double p) {
  const double nd = static_cast<double>(n);
  return (nd + nd * (nd - 1.0) / (2.0 * std::pow(nd, p))) / (nd * nd * nd);
}

/// 1/n^2 + (n-1)/(2 n^(1+p)).
inline double type_b_block_term(long n, double p) {
  const double nd = static_cast<double>(n);
  return 1.0 / (nd * nd) + (nd - 1.0) / (2.0 * std::pow(nd, 1.0 + p));
}

namespace detail {

// Squared l1 norms of v_{n,0..n-1}. Fourier norms are exactly sqrt(n); the
// Hartley ones depend on gcd(k,n) only and are cached per divisor.
inline std::vector<double> squared_l1_norms(long n, BasisKind kind) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (kind == BasisKind::fourier) {
    std::fill(out.begin(), out.end(), static_cast<double>(n));
    return out;
  }
  std::vector<double> by_gcd(static_cast<std::size_t>(n + 1), -1.0);
  for (long k = 0; k < n; ++k) {
    double& cached = by_gcd[static_cast<std::size_t>(std::gcd(k, n))];
    if (cached < 0.0) {
      const double l1 = hartley_l1_norm(n, k);
      cached = l1 * l1;
    }
    out[static_cast<std::size_t>(k)] = cached;
  }
  return out;
}

}  // namespace detail

/// sum_k lambda_{n,k} |||v_{n,k}|||^2 for block n.
inline double type_a_block_term(long n, double p, BasisKind kind) {
  const std::vector<double> sq = detail::squared_l1_norms(n, kind);
  double sum = 0.0;
  for (long k = n - 1; k >= 0; --k) sum += eigenvalue(n, k, p) * sq[static_cast<std::size_t>(k)];
  return sum;
}

/// 1/n^2 + sum_k k / n^(3+p) |||v_{n,k}|||^2: the l1-weighted cost of the
/// Type-B split of block n. Equals type_b_block_term for the Fourier family;
/// never exceeds it for Hartley since |||h_{n,k}|||^2 <= n.
inline double type_b_weighted_block_term(long n, double p, BasisKind kind) {
  const std::vector<double> sq = detail::squared_l1_norms(n, kind);
  const double nd = static_cast<double>(n);
  const double scale = 1.0 / std::pow(nd, 3.0 + p);
  double sum = 0.0;
  for (long k = n - 1; k >= 1; --k) sum += static_cast<double>(k) * scale * sq[static_cast<std::size_t>(k)];
  return sum + 1.0 / (nd * nd);
}

/// Upper bound on sum_{m > n} of the Type-B summand:
/// sum 1/m^2 <= 1/n and sum (m-1)/(2 m^(1+p)) < int_n^inf x^-p / 2.
/// At most 2/n once p >= 2. Also bounds the trace tail, whose summands are
/// smaller.
inline double type_b_tail_bound(long n, double p) {
  require_p(p);
  detail::require_block_size(n);
  const double nd = static_cast<double>(n);
  return 1.0 / nd + std::pow(nd, 1.0 - p) / (2.0 * (p - 1.0));
}

/// Per-block summands for n = 1..n_max.
inline std::vector<double> block_terms(SeriesLabel label, long n_max, double p, BasisKind kind) {
  require_p(p);
  detail::require_block_size(n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max));
  for (long n = 1; n <= n_max; ++n) {
    double term = 0.0;
    switch (label) {
      case SeriesLabel::trace: term = trace_block_term(n, p); break;
      case SeriesLabel::type_a: term = type_a_block_term(n, p, kind); break;
      case SeriesLabel::type_b: term = type_b_block_term(n, p); break;
    }
    out[static_cast<std::size_t>(n - 1)] = term;
  }
  return out;
}

inline double type_a_partial_sum(long n_max, double p, BasisKind kind) {
  return sum_smallest_first(block_terms(SeriesLabel::type_a, n_max, p, kind));
}

inline double type_b_partial_sum(long n_max, double p) {
  return sum_smallest_first(block_terms(SeriesLabel::type_b, n_max, p, BasisKind::fourier));
}

/// sum_n type_b_weighted_block_term(n) for n <= n_max.
inline double type_b_weighted_sum(long n_max, double p, BasisKind kind) {
  require_p(p);
  detail::require_block_size(n_max);
  double sum = 0.0;
  for (long n = n_max; n >= 1; --n) sum += type_b_weighted_block_term(n, p, kind);
  return sum;
}

/// Integers in [lo, hi], `per_decade` per factor of ten, deduplicated, both
/// endpoints included.
inline std::vector<long> log_spaced(long lo, long hi, int per_decade = 25) {
  if (lo < 1 || hi < lo) {
    throw UsageError("log_spaced needs 1 <= lo <= hi, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  std::vector<long> out{lo};
  const double span = std::log10(static_cast<double>(hi) / static_cast<double>(lo));
  const long steps = static_cast<long>(std::ceil(span * per_decade));
  for (long i = 1; i <= steps; ++i) {
    const double x = static_cast<double>(lo) * std::pow(10.0, span * static_cast<double>(i) / static_cast<double>(steps));
    const long n = std::clamp(static_cast<long>(std::llround(x)), lo, hi);
    if (n > out.back()) out.push_back(n);
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

/// Evaluates the partial sums at the given N values (ascending).
inline PartialSumSeries partial_sum_series(SeriesLabel label, std::span<const long> ns, double p, BasisKind kind) {
  if (ns.empty()) throw UsageError("series needs at least one N");
  PartialSumSeries s{label, p, kind, {}};
  const std::vector<double> terms = block_terms(label, *std::max_element(ns.begin(), ns.end()), p, kind);
  for (long n : ns) {
    s.points.push_back({n, sum_smallest_first(std::span<const double>(terms).first(static_cast<std::size_t>(n)))});
  }
  return s;
}

/// The vectors of the Type-B split of block n: n^-3/2 delta_l for l = 1..n,
/// then sqrt(k / n^(3+p)) v_{n,k} for k = 1..n-1 (the zero k = 0 term is
/// dropped). Real for Hartley, complex for Fourier.
struct TypeBDecomposition {
  long n = 1;
  double p = kDefaultP;
  BasisKind kind = BasisKind::fourier;
  std::variant<std::vector<Eigen::VectorXd>, std::vector<Eigen::VectorXcd>> vectors;

  std::size_t size() const {
    return std::visit([](const auto& vs) { return vs.size(); }, vectors);
  }

  /// sum_v v v^*.
  Eigen::MatrixXcd reconstruct() const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    std::visit(
        [&](const auto& vs) {
          for (const auto& v : vs) {
            const Eigen::VectorXcd c = v.template cast<std::complex<double>>();
            out.noalias() += c * c.adjoint();
          }
        },
        vectors);
    return out;
  }

  /// sum_v |||v|||^2.
  double weighted_l1_sum() const {
    return std::visit(
        [](const auto& vs) {
          double sum = 0.0;
          for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
            const double l1 = l1_norm(*it);
            sum += l1 * l1;
          }
          return sum;
        },
        vectors);
  }
};

inline TypeBDecomposition type_b_decomposition(long n, double p, BasisKind kind) {
  require_p(p);
  detail::require_block_size(n);
  const double nd = static_cast<double>(n);
  const double identity_scale = std::pow(nd, -1.5);
  TypeBDecomposition out;
  out.n = n;
  out.p = p;
  out.kind = kind;
  visit_basis_matrix(n, kind, [&](const auto& basis) {
    using Vec = Eigen::Matrix<typename std::decay_t<decltype(basis)>::Scalar, Eigen::Dynamic, 1>;
    std::vector<Vec> vs;
    vs.reserve(static_cast<std::size_t>(2 * n - 1));
    for (long l = 0; l < n; ++l) {
      Vec v = Vec::Zero(n);
      v(l) = identity_scale;
      vs.push_back(std::move(v));
    }
    for (long k = 1; k < n; ++k) {
      vs.push_back(Vec(std::sqrt(static_cast<double>(k) / std::pow(nd, 3.0 + p)) * basis.col(k)));
    }
    out.vectors = std::move(vs);
    return 0;
  });
  return out;
}

struct DivergenceFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

/// Least squares of S(N) against ln N. Needs >= 10 points spanning at
/// least a factor of ten in N. r^2 is reported as 1 for a series with no
/// variance.
inline DivergenceFit divergence_fit(const PartialSumSeries& series) {
  const auto& pts = series.points;
  if (pts.size() < 10) {
    throw UsageError("divergence_fit needs >= 10 points, got " + std::to_string(pts.size()));
  }
  const long lo = pts.front().n;
  const long hi = pts.back().n;
  if (hi < 10 * lo) {
    throw UsageError("divergence_fit needs N2 >= 10 N1, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const double m = static_cast<double>(pts.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& pt : pts) {
    mean_x += std::log(static_cast<double>(pt.n));
    mean_y += pt.value;
  }
  mean_x /= m;
  mean_y /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& pt : pts) {
    const double dx = std::log(static_cast<double>(pt.n)) - mean_x;
    const double dy = pt.value - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  DivergenceFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (const auto& pt : pts) {
      const double r = pt.value - (fit.intercept + fit.slope * std::log(static_cast<double>(pt.n)));
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

/// Thresholds the certificate applies. They are artifact choices and are
/// serialized with every certificate.
struct CertificateCriteria {
  /// Guaranteed asymptotic ratio |||v_{n,k}|||^2 / n: 1 for Fourier, 1/2 for
  /// Hartley.
  double lower_bound_factor = 1.0;
  double slope_threshold = 0.9;
  double harmonic_slack = 1e-9;
  /// Fit window is [max(1, N / fit_window_divisor), N].
  long fit_window_divisor = 20;
  /// Minimum N at which the log-slope fit is attempted.
  long min_fit_n = 10;
};

inline CertificateCriteria default_criteria(BasisKind kind) {
  CertificateCriteria c;
  c.lower_bound_factor = kind == BasisKind::fourier ? 1.0 : 0.5;
  c.slope_threshold = 0.9 * c.lower_bound_factor;
  return c;
}

struct CounterexampleCertificate {
  double p = kDefaultP;
  long n_max = 1;
  BasisKind kind = BasisKind::fourier;
  CertificateCriteria criteria;

  double trace_value = 0.0;
  double trace_tail_increment = 0.0;
  double type_b_value = 0.0;
  double type_b_tail_bound = 0.0;
  double type_b_tail_increment = 0.0;
  double type_a_value = 0.0;
  double type_a_lower_bound = 0.0;
  bool fit_performed = false;
  long fit_lo = 0;
  long fit_hi = 0;
  DivergenceFit fit;

  bool trace_finite_evidence = false;
  bool type_b_convergent_evidence = false;
  bool type_a_divergent_evidence = false;

  bool all_evidence() const {
    return trace_finite_evidence && type_b_convergent_evidence && type_a_divergent_evidence;
  }
};

/// Convergence evidence for trace and Type-B: the increment
/// S(N) - S(ceil(N/2)) stays below type_b_tail_bound(ceil(N/2)). Divergence
/// evidence for Type-A: S_A(N) dominates factor * H_N and its log-slope over
/// the fit window reaches the threshold.
inline CounterexampleCertificate make_certificate(long n_max, double p, BasisKind kind) {
  require_p(p);
  detail::require_block_size(n_max);
  CounterexampleCertificate c;
  c.p = p;
  c.n_max = n_max;
  c.kind = kind;
  c.criteria = default_criteria(kind);

  const long half = (n_max + 1) / 2;
  const double half_tail_bound = type_b_tail_bound(half, p);

  const std::vector<double> trace_terms = block_terms(SeriesLabel::trace, n_max, p, kind);
  c.trace_value = sum_smallest_first(trace_terms);
  c.trace_tail_increment = c.trace_value - sum_smallest_first(std::span<const double>(trace_terms).first(half));

  std::vector<double> type_b_terms(static_cast<std::size_t>(n_max));
  for (long n = 1; n <= n_max; ++n) type_b_terms[static_cast<std::size_t>(n - 1)] = type_b_weighted_block_term(n, p, kind);
  c.type_b_value = sum_smallest_first(type_b_terms);
  c.type_b_tail_bound = type_b_tail_bound(n_max, p);
  c.type_b_tail_increment = c.type_b_value - sum_smallest_first(std::span<const double>(type_b_terms).first(half));

  const std::vector<double> type_a_terms = block_terms(SeriesLabel::type_a, n_max, p, kind);
  c.type_a_value = sum_smallest_first(type_a_terms);
  c.type_a_lower_bound = c.criteria.lower_bound_factor * harmonic_number(n_max);

  c.trace_finite_evidence = std::isfinite(c.trace_value) && c.trace_tail_increment <= half_tail_bound;
  c.type_b_convergent_evidence = std::isfinite(c.type_b_value) && c.type_b_tail_increment <= half_tail_bound;

  bool slope_ok = true;
  if (n_max >= c.criteria.min_fit_n) {
    c.fit_lo = std::max(1L, n_max / c.criteria.fit_window_divisor);
    c.fit_hi = n_max;
    PartialSumSeries s{SeriesLabel::type_a, p, kind, {}};
    for (long n : log_spaced(c.fit_lo, c.fit_hi)) {
      s.points.push_back({n, sum_smallest_first(std::span<const double>(type_a_terms).first(static_cast<std::size_t>(n)))});
    }
    c.fit = divergence_fit(s);
    c.fit_performed = true;
    slope_ok = c.fit.slope >= c.criteria.slope_threshold;
  }
  c.type_a_divergent_evidence =
      c.type_a_value >= c.type_a_lower_bound - c.criteria.harmonic_slack && slope_ok;
  return c;
}

}  // namespace tracecert
