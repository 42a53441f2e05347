#pragma once

// The truncated block-diagonal operator T = T_1 + ... + T_N (direct sum),
// T_n = sum_k lambda_{n,k} v_{n,k} v_{n,k}^*, with
// lambda_{n,k} = (1 + k / n^p) / n^3.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tracecert/bases.hpp"
#include "tracecert/error.hpp"

namespace tracecert {

inline constexpr double kDefaultP = 2.0;
/// N = 200 gives D = 200 * 201 / 2 = 20100.
inline constexpr long kDefaultDimensionCap = 20100;

inline void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw ParameterError("p must satisfy p > 1, got " + std::to_string(p));
  }
}

/// lambda_{n,k} = (1 + k / n^p) / n^3.
inline double eigenvalue(long n, long k, double p) {
  require_p(p);
  detail::require_index(n, k);
  const double nd = static_cast<double>(n);
  return (1.0 + static_cast<double>(k) / std::pow(nd, p)) / (nd * nd * nd);
}

struct EigenSpec {
  long n = 1;
  long k = 0;
  double p = kDefaultP;
  double lambda = 1.0;
};

/// All (n,k) with n <= n_max, block by block.
inline std::vector<EigenSpec> eigen_specs(long n_max, double p) {
  require_p(p);
  detail::require_block_size(n_max);
  std::vector<EigenSpec> out;
  for (long n = 1; n <= n_max; ++n) {
    for (long k = 0; k < n; ++k) out.push_back({n, k, p, eigenvalue(n, k, p)});
  }
  return out;
}

/// 1-based global coordinate of local coordinate l (0-based) of block n.
inline long global_index(long n, long l) {
  detail::require_index(n, l);
  return n * (n - 1) / 2 + l + 1;
}

struct BlockCoordinate {
  long n = 1;
  long l = 0;
};

/// Inverse of global_index.
inline BlockCoordinate block_coordinate(long global) {
  if (global < 1) throw DomainError("global index must be >= 1, got " + std::to_string(global));
  long n = static_cast<long>((std::sqrt(8.0 * static_cast<double>(global)) - 1.0) / 2.0);
  while (n * (n + 1) / 2 < global) ++n;
  while (n > 1 && (n - 1) * n / 2 >= global) --n;
  return {n, global - n * (n - 1) / 2 - 1};
}

struct Block {
  long n = 1;
  double p = kDefaultP;
  BasisKind kind = BasisKind::fourier;
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> matrix;

  double trace() const {
    return std::visit([](const auto& m) { return std::real(m.trace()); }, matrix);
  }

  double max_abs_entry() const {
    return std::visit([](const auto& m) { return m.cwiseAbs().maxCoeff(); }, matrix);
  }

  double abs_entry_sum() const {
    return std::visit([](const auto& m) { return m.cwiseAbs().sum(); }, matrix);
  }

  double hermitian_deviation() const {
    return std::visit([](const auto& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); },
                      matrix);
  }

  Eigen::MatrixXcd as_complex() const {
    return std::visit([](const auto& m) -> Eigen::MatrixXcd { return m.template cast<std::complex<double>>(); },
                      matrix);
  }
};

inline Block build_block(long n, double p, BasisKind kind) {
  require_p(p);
  Eigen::VectorXd lambdas(n);
  for (long k = 0; k < n; ++k) lambdas(k) = eigenvalue(n, k, p);
  Block b;
  b.n = n;
  b.p = p;
  b.kind = kind;
  visit_basis_matrix(n, kind, [&](const auto& v) {
    using Mat = std::decay_t<decltype(v)>;
    Mat m = v * lambdas.asDiagonal() * v.adjoint();
    // symmetrize the rounding
    b.matrix = Mat((m + m.adjoint()) / 2.0);
    return 0;
  });
  return b;
}

/// Dimension cap for materialized operators; OPSPEC_DIM_CAP overrides it.
inline long dimension_cap() {
  if (const char* env = std::getenv("OPSPEC_DIM_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw ParameterError(std::string("OPSPEC_DIM_CAP must be a positive integer, got '") + env + "'");
    }
    return cap;
  }
  return kDefaultDimensionCap;
}

inline long operator_dimension(long n_max) { return n_max * (n_max + 1) / 2; }

/// Blocks are kept separately; the global matrix only exists on request.
class TruncatedOperator {
 public:
  TruncatedOperator(long n_max, double p, BasisKind kind, std::vector<Block> blocks)
      : n_max_(n_max), p_(p), kind_(kind), blocks_(std::move(blocks)) {}

  long n_max() const { return n_max_; }
  double p() const { return p_; }
  BasisKind kind() const { return kind_; }
  long dimension() const { return operator_dimension(n_max_); }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(long n) const { return blocks_.at(static_cast<std::size_t>(n - 1)); }

  /// Dense D x D matrix of coefficients c_{ij} in the standard basis.
  Eigen::MatrixXcd materialize(long cap) const {
    const long dim = dimension();
    if (dim > cap) {
      throw ResourceError("materializing needs dimension " + std::to_string(dim) + ", cap is " +
                          std::to_string(cap));
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (const Block& b : blocks_) {
      const long first = global_index(b.n, 0) - 1;
      out.block(first, first, b.n, b.n) = b.as_complex();
    }
    return out;
  }

  Eigen::MatrixXcd materialize() const { return materialize(dimension_cap()); }

 private:
  long n_max_;
  double p_;
  BasisKind kind_;
  std::vector<Block> blocks_;
};

inline TruncatedOperator assemble(long n_max, double p, BasisKind kind, long cap) {
  require_p(p);
  detail::require_block_size(n_max);
  const long dim = operator_dimension(n_max);
  if (dim > cap) {
    throw ResourceError("N_max=" + std::to_string(n_max) + " needs dimension " + std::to_string(dim) +
                        ", cap is " + std::to_string(cap));
  }
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n_max));
  for (long n = 1; n <= n_max; ++n) blocks.push_back(build_block(n, p, kind));
  return {n_max, p, kind, std::move(blocks)};
}

inline TruncatedOperator assemble(long n_max, double p, BasisKind kind) {
  return assemble(n_max, p, kind, dimension_cap());
}

/// Sum of the block diagonals, smallest blocks (largest n) first.
inline double trace_matrix(const TruncatedOperator& op) {
  double sum = 0.0;
  for (auto it = op.blocks().rbegin(); it != op.blocks().rend(); ++it) sum += it->trace();
  return sum;
}

/// sum_{n <= N} (n + n(n-1) / (2 n^p)) / n^3, summed from n = N down.
inline double trace_closed_form(long n_max, double p) {
  require_p(p);
  detail::require_block_size(n_max);
  double sum = 0.0;
  for (long n = n_max; n >= 1; --n) {
    const double nd = static_cast<double>(n);
    sum += (nd + nd * (nd - 1.0) / (2.0 * std::pow(nd, p))) / (nd * nd * nd);
  }
  return sum;
}

/// sum |c_ij| over all coefficients; dominates the trace norm.
inline double coefficient_l1_sum(const TruncatedOperator& op) {
  double sum = 0.0;
  for (auto it = op.blocks().rbegin(); it != op.blocks().rend(); ++it) sum += it->abs_entry_sum();
  return sum;
}

/// Eigenvalues ascending; column i of vectors belongs to values(i).
struct BlockSpectrum {
  Eigen::VectorXd values;
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> vectors;
};

inline BlockSpectrum eigendecompose_block(const Block& b) {
  return std::visit(
      [&](const auto& m) -> BlockSpectrum {
        using Mat = std::decay_t<decltype(m)>;
        Eigen::SelfAdjointEigenSolver<Mat> solver(m);
        if (solver.info() != Eigen::Success) {
          throw NumericalError("eigensolver failed on block n=" + std::to_string(b.n) + " (" +
                               std::string(to_string(b.kind)) + ", p=" + std::to_string(b.p) + ")");
        }
        return {solver.eigenvalues(), Mat(solver.eigenvectors())};
      },
      b.matrix);
}

/// Comparison of a computed spectrum against lambda_{n,k} and v_{n,k}.
/// Overlaps are |<computed, expected>|, which ignores phase and sign.
struct SpectrumCheck {
  long n = 1;
  double eigenvalue_error = 0.0;
  double min_overlap = 1.0;
  long worst_overlap_k = 0;
  double min_eigenvalue = 0.0;
  bool psd = true;
};

inline SpectrumCheck check_block_spectrum(const Block& b) {
  const BlockSpectrum spec = eigendecompose_block(b);
  SpectrumCheck out;
  out.n = b.n;
  // lambda_{n,k} increases with k, so the ascending order is k = 0..n-1.
  for (long k = 0; k < b.n; ++k) {
    out.eigenvalue_error = std::max(out.eigenvalue_error, std::abs(spec.values(k) - eigenvalue(b.n, k, b.p)));
  }
  visit_basis_matrix(b.n, b.kind, [&](const auto& expected) {
    std::visit(
        [&](const auto& computed) {
          for (long k = 0; k < b.n; ++k) {
            using C = std::complex<double>;
            const double overlap =
                std::abs(expected.col(k).template cast<C>().dot(computed.col(k).template cast<C>()));
            if (overlap < out.min_overlap) {
              out.min_overlap = overlap;
              out.worst_overlap_k = k;
            }
          }
        },
        spec.vectors);
    return 0;
  });
  out.min_eigenvalue = spec.values.minCoeff();
  const double nd = static_cast<double>(b.n);
  out.psd = out.min_eigenvalue >= -1e-12 * (2.0 / (nd * nd * nd));
  return out;
}

struct EigenvalueCollision {
  long n1 = 0;
  long k1 = 0;
  long n2 = 0;
  long k2 = 0;
  double gap = 0.0;
};

/// All pairs (n,k) != (n',k') with |lambda - lambda'| < 1e-15 * max lambda.
/// An empty result certifies simple eigenvalues at this truncation.
inline std::vector<EigenvalueCollision> eigenvalue_distinctness(long n_max, double p) {
  std::vector<EigenSpec> specs = eigen_specs(n_max, p);
  std::sort(specs.begin(), specs.end(),
            [](const EigenSpec& a, const EigenSpec& b) { return a.lambda < b.lambda; });
  const double threshold = 1e-15 * specs.back().lambda;
  std::vector<EigenvalueCollision> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i + 1; j < specs.size() && specs[j].lambda - specs[i].lambda < threshold; ++j) {
      out.push_back({specs[i].n, specs[i].k, specs[j].n, specs[j].k, specs[j].lambda - specs[i].lambda});
    }
  }
  return out;
}

}  // namespace tracecert
