#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tracecert/diagnostics.hpp"

using namespace tracecert;

TEST(HarmonicNumber, Values) {
  EXPECT_DOUBLE_EQ(harmonic_number(1), 1.0);
  EXPECT_NEAR(harmonic_number(4), 25.0 / 12.0, 1e-15);
  EXPECT_NEAR(harmonic_number(100), oracle::harmonic(100), 1e-14);
  EXPECT_NEAR(harmonic_number(100), 5.187378, 1e-6);
  EXPECT_THROW(harmonic_number(0), ParameterError);
}

TEST(TypeA, Examples) {
  EXPECT_DOUBLE_EQ(type_a_partial_sum(1, 2.0, BasisKind::fourier), 1.0);
  EXPECT_NEAR(type_a_partial_sum(2, 2.0, BasisKind::fourier), 1.5625, 1e-15);
  EXPECT_GE(type_a_partial_sum(100, 2.0, BasisKind::fourier), oracle::harmonic(100));
  EXPECT_THROW(type_a_partial_sum(5, 1.0, BasisKind::fourier), ParameterError);
}

TEST(TypeA, FourierMatchesClosedForm) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (long big_n : {1L, 10L, 300L}) {
      long double closed = 0.0L;
      for (long n = 1; n <= big_n; ++n) {
        const long double nd = n;
        closed += (nd + nd * (nd - 1) / (2 * std::pow(nd, static_cast<long double>(p)))) / (nd * nd);
      }
      EXPECT_NEAR(type_a_partial_sum(big_n, p, BasisKind::fourier), static_cast<double>(closed), 1e-13 * static_cast<double>(closed));
    }
  }
}

TEST(TypeA, HartleyUsesMeasuredNorms) {
  // direct summation with termwise l1 norms
  for (long big_n : {1L, 7L, 40L}) {
    long double direct = 0.0L;
    for (long n = 1; n <= big_n; ++n) {
      for (long k = 0; k < n; ++k) {
        const double l1 = oracle::hartley_l1(n, k);
        const long double nd = n;
        direct += (1.0L + k / std::pow(nd, 1.2L)) / (nd * nd * nd) * l1 * l1;
      }
    }
    EXPECT_NEAR(type_a_partial_sum(big_n, 1.2, BasisKind::hartley), static_cast<double>(direct), 1e-12 * static_cast<double>(direct));
  }
}

TEST(TypeA, Domination) {
  const std::vector<double> f = block_terms(SeriesLabel::type_a, 2000, 2.0, BasisKind::fourier);
  const std::vector<double> h = block_terms(SeriesLabel::type_a, 2000, 2.0, BasisKind::hartley);
  for (long n = 1; n <= 2000; ++n) {
    // termwise: n^-1 <= fourier term, (2n)^-1 <= hartley term
    ASSERT_GE(f[n - 1], 1.0 / n);
    ASSERT_GE(h[n - 1], 0.5 / n);
  }
  for (long big_n : {1L, 10L, 500L, 2000L}) {
    const auto sub = [&](const std::vector<double>& t) { return sum_smallest_first(std::span(t).first(big_n)); };
    EXPECT_GE(sub(f), harmonic_number(big_n));
    EXPECT_GE(sub(h), 0.5 * harmonic_number(big_n));
  }
}

TEST(TypeB, Examples) {
  EXPECT_DOUBLE_EQ(type_b_partial_sum(1, 2.0), 1.0);
  EXPECT_NEAR(type_b_partial_sum(2, 2.0), 1.3125, 1e-15);
  const double limit = oracle::type_b_limit_p2();
  EXPECT_NEAR(limit, 1.866372, 1e-6);
  const double s = type_b_partial_sum(10000, 2.0);
  EXPECT_NEAR(s, oracle::type_b_sum(10000, 2.0), 1e-12 * s);
  EXPECT_NEAR(s, limit, 1e-3);
  EXPECT_THROW(type_b_partial_sum(3, 0.9), ParameterError);
}

TEST(TypeB, TailContractAtPTwo) {
  const std::vector<double> t = block_terms(SeriesLabel::type_b, 20000, 2.0, BasisKind::fourier);
  for (long n = 1; n <= 10000; n += (n < 200 ? 1 : 37)) {
    const double inc = sum_smallest_first(std::span(t).first(2 * n)) - sum_smallest_first(std::span(t).first(n));
    ASSERT_LE(inc, 2.0 / n) << n;
  }
}

TEST(TypeB, TailBoundHoldsForAllP) {
  for (double p : {1.2, 1.5, 2.0, 3.0}) {
    const std::vector<double> t = block_terms(SeriesLabel::type_b, 20000, p, BasisKind::fourier);
    for (long n : {1L, 3L, 10L, 100L, 1000L, 10000L}) {
      const double inc = sum_smallest_first(std::span(t).first(2 * n)) - sum_smallest_first(std::span(t).first(n));
      EXPECT_LE(inc, type_b_tail_bound(n, p)) << "p=" << p << " n=" << n;
    }
    if (p >= 2.0) {
      EXPECT_LE(type_b_tail_bound(50, p), 2.0 / 50);
    }
  }
}

TEST(Series, MonotoneAndConsistent) {
  const std::vector<long> ns = log_spaced(1, 3000);
  EXPECT_EQ(ns.front(), 1);
  EXPECT_EQ(ns.back(), 3000);
  EXPECT_TRUE(std::is_sorted(ns.begin(), ns.end()));
  for (SeriesLabel label : {SeriesLabel::trace, SeriesLabel::type_a, SeriesLabel::type_b}) {
    for (BasisKind kind : {BasisKind::fourier, BasisKind::hartley}) {
      const PartialSumSeries s = partial_sum_series(label, ns, 1.5, kind);
      EXPECT_TRUE(s.strictly_increasing()) << to_string(label);
    }
  }
  const PartialSumSeries tr = partial_sum_series(SeriesLabel::trace, ns, 2.0, BasisKind::fourier);
  for (const auto& pt : tr.points) EXPECT_NEAR(pt.value, trace_closed_form(pt.n, 2.0), 1e-15 * pt.value);
}

TEST(LogSpaced, Spacing) {
  EXPECT_EQ(log_spaced(1, 1), std::vector<long>{1});
  const auto decade = log_spaced(100, 1000);
  EXPECT_GE(decade.size(), 20u);
  EXPECT_LE(decade.size(), 26u);
  EXPECT_THROW(log_spaced(0, 10), UsageError);
}

TEST(TypeBDecomposition, Examples) {
  const TypeBDecomposition one = type_b_decomposition(1, 2.0, BasisKind::fourier);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(std::abs(one.reconstruct()(0, 0) - 1.0), 0.0, 1e-16);

  const TypeBDecomposition two = type_b_decomposition(2, 2.0, BasisKind::fourier);
  ASSERT_EQ(two.size(), 3u);
  const auto& vs = std::get<std::vector<Eigen::VectorXcd>>(two.vectors);
  const double s8 = 1.0 / std::sqrt(8.0);
  EXPECT_NEAR(std::abs(vs[0](0) - s8), 0.0, 1e-16);
  EXPECT_EQ(vs[0](1), std::complex<double>(0.0));
  EXPECT_NEAR(std::abs(vs[1](1) - s8), 0.0, 1e-16);
  // (1/sqrt 32) e_{2,1} = (1/sqrt 32)(1, -1)/sqrt 2
  EXPECT_NEAR(std::abs(vs[2](0) - 1.0 / 8.0), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(vs[2](1) + 1.0 / 8.0), 0.0, 1e-16);
}

TEST(TypeBDecomposition, RebuildsBlocks) {
  for (BasisKind kind : {BasisKind::fourier, BasisKind::hartley}) {
    for (long n : {1L, 2L, 8L, 31L, 64L}) {
      const TypeBDecomposition d = type_b_decomposition(n, 2.0, kind);
      EXPECT_EQ(d.size(), static_cast<std::size_t>(2 * n - 1));
      EXPECT_LE((d.reconstruct() - build_block(n, 2.0, kind).as_complex()).cwiseAbs().maxCoeff(), 1e-12) << n;
    }
  }
}

TEST(TypeBDecomposition, WeightedSumMatchesBookkeeping) {
  long double total = 0.0L;
  for (long n = 1; n <= 40; ++n) {
    const TypeBDecomposition d = type_b_decomposition(n, 1.5, BasisKind::fourier);
    const double closed = type_b_block_term(n, 1.5);
    EXPECT_NEAR(d.weighted_l1_sum(), closed, 1e-12 * closed);
    EXPECT_NEAR(type_b_weighted_block_term(n, 1.5, BasisKind::fourier), closed, 1e-12 * closed);
    total += d.weighted_l1_sum();

    const TypeBDecomposition h = type_b_decomposition(n, 1.5, BasisKind::hartley);
    EXPECT_NEAR(h.weighted_l1_sum(), type_b_weighted_block_term(n, 1.5, BasisKind::hartley), 1e-12 * closed);
    EXPECT_LE(h.weighted_l1_sum(), closed * (1 + 1e-12));
  }
  EXPECT_NEAR(static_cast<double>(total), type_b_partial_sum(40, 1.5), 1e-12 * type_b_partial_sum(40, 1.5));
}

TEST(DivergenceFit, ConstantSeries) {
  PartialSumSeries s{SeriesLabel::trace, 2.0, BasisKind::fourier, {}};
  for (long n : log_spaced(10, 1000)) s.points.push_back({n, 3.0});
  const DivergenceFit fit = divergence_fit(s);
  EXPECT_NEAR(fit.slope, 0.0, 1e-15);
  EXPECT_NEAR(fit.intercept, 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(fit.r_squared, 1.0);
}

TEST(DivergenceFit, TypeAAndTraceSlopes) {
  const std::vector<long> ns = log_spaced(100, 2000);
  const PartialSumSeries a = partial_sum_series(SeriesLabel::type_a, ns, 2.0, BasisKind::fourier);
  const DivergenceFit fa = divergence_fit(a);

  std::vector<double> x, y;
  for (const auto& pt : a.points) {
    x.push_back(std::log(static_cast<double>(pt.n)));
    y.push_back(pt.value);
  }
  EXPECT_NEAR(fa.slope, oracle::ols_slope(x, y), 1e-10);
  EXPECT_GE(fa.slope, 0.95);
  EXPECT_LE(fa.slope, 1.05);
  EXPECT_GT(fa.r_squared, 0.999);

  const DivergenceFit ft = divergence_fit(partial_sum_series(SeriesLabel::trace, ns, 2.0, BasisKind::fourier));
  EXPECT_GE(ft.slope, -0.01);
  EXPECT_LE(ft.slope, 0.01);
}

TEST(DivergenceFit, UsageErrors) {
  PartialSumSeries few{SeriesLabel::type_a, 2.0, BasisKind::fourier, {}};
  for (long n = 1; n <= 9; ++n) few.points.push_back({n, static_cast<double>(n)});
  EXPECT_THROW(divergence_fit(few), UsageError);

  PartialSumSeries narrow{SeriesLabel::type_a, 2.0, BasisKind::fourier, {}};
  for (long n = 100; n < 120; ++n) narrow.points.push_back({n, static_cast<double>(n)});
  EXPECT_THROW(divergence_fit(narrow), UsageError);
}

TEST(Certificate, TrivialTruncation) {
  const CounterexampleCertificate c = make_certificate(1, 2.0, BasisKind::fourier);
  EXPECT_DOUBLE_EQ(c.trace_value, 1.0);
  EXPECT_DOUBLE_EQ(c.type_a_value, 1.0);
  EXPECT_DOUBLE_EQ(c.type_b_value, 1.0);
  EXPECT_DOUBLE_EQ(c.type_a_lower_bound, 1.0);
  EXPECT_FALSE(c.fit_performed);
  EXPECT_TRUE(c.all_evidence());
}

TEST(Certificate, FourierP2) {
  const CounterexampleCertificate c = make_certificate(2000, 2.0, BasisKind::fourier);
  EXPECT_TRUE(c.trace_finite_evidence);
  EXPECT_TRUE(c.type_b_convergent_evidence);
  EXPECT_TRUE(c.type_a_divergent_evidence);
  EXPECT_EQ(c.fit_lo, 100);
  EXPECT_EQ(c.fit_hi, 2000);
  EXPECT_GE(c.type_a_value, c.type_a_lower_bound);
  EXPECT_NEAR(c.type_a_lower_bound, oracle::harmonic(2000), 1e-12);
  EXPECT_NEAR(c.type_b_value, oracle::type_b_sum(2000, 2.0), 1e-12);
  EXPECT_NEAR(c.trace_value, oracle::trace_sum(2000, 2.0), 1e-12);
  EXPECT_LE(c.type_b_tail_bound, 2.0 / 2000);
  EXPECT_GE(c.type_b_tail_bound, 0.0);
}

TEST(Certificate, HartleyP12) {
  const CounterexampleCertificate c = make_certificate(2000, 1.2, BasisKind::hartley);
  EXPECT_TRUE(c.all_evidence());
  EXPECT_GE(c.type_a_value, 0.5 * harmonic_number(2000));
  EXPECT_NEAR(c.type_a_lower_bound, 0.5 * harmonic_number(2000), 1e-12);
}

TEST(Certificate, HartleyP2MeetsHalfHarmonicBound) {
  const CounterexampleCertificate c = make_certificate(2000, 2.0, BasisKind::hartley);
  EXPECT_TRUE(c.all_evidence());
  // asymptotic slope is the mean squared Hartley l1 ratio, below 1
  EXPECT_LT(c.fit.slope, 0.9);
  EXPECT_GE(c.fit.slope, c.criteria.slope_threshold);
}
