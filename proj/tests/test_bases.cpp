#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tracecert/bases.hpp"

using namespace tracecert;
using cd = std::complex<double>;

namespace {

const Eigen::VectorXcd& complex_entries(const BasisVector& v) { return std::get<Eigen::VectorXcd>(v.entries); }
const Eigen::VectorXd& real_entries(const BasisVector& v) { return std::get<Eigen::VectorXd>(v.entries); }

}  // namespace

TEST(FourierVector, SmallCases) {
  EXPECT_NEAR(std::abs(complex_entries(fourier_vector(1, 0))(0) - cd(1.0, 0.0)), 0.0, 1e-15);

  const auto v21 = complex_entries(fourier_vector(2, 1));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(v21(0) - cd(r, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v21(1) - cd(-r, 0.0)), 0.0, 1e-15);

  const auto v41 = complex_entries(fourier_vector(4, 1));
  const cd expected[] = {{0.5, 0.0}, {0.0, -0.5}, {-0.5, 0.0}, {0.0, 0.5}};
  for (int l = 0; l < 4; ++l) EXPECT_NEAR(std::abs(v41(l) - expected[l]), 0.0, 1e-15) << "l=" << l;
}

TEST(FourierVector, MatchesDirectEvaluation) {
  for (long n : {3L, 7L, 64L, 255L}) {
    for (long k : {0L, 1L, n / 2, n - 1}) {
      const auto v = complex_entries(fourier_vector(n, k));
      ASSERT_EQ(v.size(), n);
      for (long l = 0; l < n; ++l) {
        EXPECT_NEAR(std::abs(v(l) - oracle::fourier_entry(n, k, l)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(v(l)), 1.0 / std::sqrt(static_cast<double>(n)), 1e-15);
      }
    }
  }
}

TEST(HartleyVector, SmallCases) {
  EXPECT_DOUBLE_EQ(real_entries(hartley_vector(1, 0))(0), 1.0);

  const auto v21 = real_entries(hartley_vector(2, 1));
  EXPECT_NEAR(v21(0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(v21(1), -1.0 / std::sqrt(2.0), 1e-15);

  const auto v41 = real_entries(hartley_vector(4, 1));
  const double expected[] = {0.5, 0.5, -0.5, -0.5};
  for (int l = 0; l < 4; ++l) EXPECT_NEAR(v41(l), expected[l], 1e-15);
}

TEST(HartleyVector, MatchesDirectEvaluationAndShiftedCosineForm) {
  for (long n : {5L, 16L, 101L}) {
    for (long k = 0; k < n; k += 3) {
      const auto v = real_entries(hartley_vector(n, k));
      for (long l = 0; l < n; ++l) {
        EXPECT_NEAR(v(l), oracle::hartley_entry(n, k, l), 1e-14);
        const double x = 2.0 * std::numbers::pi * static_cast<double>(k * l) / static_cast<double>(n);
        EXPECT_NEAR(v(l), std::sqrt(2.0 / n) * std::cos(x - std::numbers::pi / 4), 1e-12);
      }
    }
  }
}

TEST(BasisVector, KZeroIsConstantForBothKinds) {
  for (long n : {1L, 4L, 9L}) {
    const double c = 1.0 / std::sqrt(static_cast<double>(n));
    EXPECT_NEAR((complex_entries(fourier_vector(n, 0)) - Eigen::VectorXcd::Constant(n, c)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    EXPECT_NEAR((real_entries(hartley_vector(n, 0)) - Eigen::VectorXd::Constant(n, c)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
}

TEST(BasisVector, IndexOutOfRangeIsDomainError) {
  EXPECT_THROW(fourier_vector(4, 4), DomainError);
  EXPECT_THROW(hartley_vector(4, -1), DomainError);
  EXPECT_THROW(hartley_l1_norm(3, 3), DomainError);
  EXPECT_THROW(fourier_vector(0, 0), ParameterError);
  try {
    fourier_vector(5, 7);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(n,k)=(5,7)"), std::string::npos);
  }
}

TEST(BasisKind, ParsesNames) {
  EXPECT_EQ(parse_basis_kind("fourier"), BasisKind::fourier);
  EXPECT_EQ(parse_basis_kind("hartley"), BasisKind::hartley);
  EXPECT_THROW(parse_basis_kind("haar"), ParameterError);
}

TEST(L1Norm, Examples) {
  EXPECT_NEAR(l1_norm(fourier_vector(9, 4)), 3.0, 3.0 * 1e-12);
  EXPECT_NEAR(l1_norm(hartley_vector(4, 1)), 2.0, 1e-14);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(7);
  unit(3) = 1.0;
  EXPECT_DOUBLE_EQ(l1_norm(unit), 1.0);
}

TEST(L1Norm, FastHartleyRouteMatchesTermwiseSum) {
  for (long n = 1; n <= 96; ++n) {
    for (long k = 0; k < n; ++k) {
      ASSERT_NEAR(hartley_l1_norm(n, k), oracle::hartley_l1(n, k), 1e-12 * std::sqrt(n)) << n << "," << k;
      ASSERT_NEAR(hartley_l1_norm(n, k), l1_norm(hartley_vector(n, k)), 1e-12 * std::sqrt(n));
    }
  }
}

TEST(L1Norm, HartleyInvariantUnderReflection) {
  // S_n is closed under x -> -x (mod 2 pi)
  for (long n = 2; n <= 128; ++n) {
    for (long k = 1; k < n; ++k) {
      ASSERT_NEAR(l1_norm(hartley_vector(n, k)), l1_norm(hartley_vector(n, n - k)), 1e-12 * std::sqrt(n));
    }
  }
}

TEST(L1Norm, FourierIsRootNRandomized) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> pick_n(1, 512);
  for (int trial = 0; trial < 200; ++trial) {
    const long n = pick_n(rng);
    const long k = std::uniform_int_distribution<long>(0, n - 1)(rng);
    const double root = std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(l1_norm(fourier_vector(n, k)), root, 1e-12 * root) << n << "," << k;
  }
}

TEST(Orthonormality, Examples) {
  EXPECT_EQ(check_orthonormal(1, BasisKind::fourier), 0.0);
  EXPECT_LE(check_orthonormal(8, BasisKind::hartley), 1e-10);
  EXPECT_LE(check_orthonormal(64, BasisKind::fourier), 1e-10);
}

TEST(Orthonormality, ExplicitHartleyGram8) {
  double worst = 0.0;
  for (long k = 0; k < 8; ++k) {
    for (long kk = 0; kk < 8; ++kk) {
      double dot = 0.0;
      for (long l = 0; l < 8; ++l) dot += oracle::hartley_entry(8, k, l) * oracle::hartley_entry(8, kk, l);
      worst = std::max(worst, std::abs(dot - (k == kk ? 1.0 : 0.0)));
    }
  }
  EXPECT_LE(worst, 1e-14);
  EXPECT_NEAR(check_orthonormal(8, BasisKind::hartley), worst, 1e-14);
}

TEST(Orthonormality, RandomBlockSizesUpTo512) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> pick_n(1, 512);
  for (int trial = 0; trial < 12; ++trial) {
    const long n = pick_n(rng);
    EXPECT_LE(check_orthonormal(n, BasisKind::fourier), 1e-10) << n;
    EXPECT_LE(check_orthonormal(n, BasisKind::hartley), 1e-10) << n;
  }
}

TEST(ResolutionOfIdentity, Examples) {
  EXPECT_EQ(resolution_of_identity(1, BasisKind::hartley), 0.0);
  EXPECT_LE(resolution_of_identity(5, BasisKind::fourier), 1e-12);
  EXPECT_LE(resolution_of_identity(16, BasisKind::hartley), 1e-11);
}

TEST(ResolutionOfIdentity, ExplicitFourier5) {
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(5, 5);
  for (long k = 0; k < 5; ++k) {
    for (long i = 0; i < 5; ++i) {
      for (long j = 0; j < 5; ++j) sum(i, j) += oracle::fourier_entry(5, k, i) * std::conj(oracle::fourier_entry(5, k, j));
    }
  }
  EXPECT_LE((sum - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(L1Bounds, Report) {
  const auto one = l1_bounds_report(1);
  ASSERT_EQ(one.size(), 2u);
  for (const auto& r : one) {
    EXPECT_DOUBLE_EQ(r.l1_value, 1.0);
    EXPECT_TRUE(r.within_bounds);
  }

  const auto reports = l1_bounds_report(48);
  ASSERT_EQ(reports.size(), static_cast<std::size_t>(48 * 49));
  for (const auto& r : reports) {
    ASSERT_TRUE(r.within_bounds) << to_string(r.kind) << " (" << r.n << "," << r.k << ")";
    if (r.kind == BasisKind::fourier) {
      ASSERT_NEAR(r.l1_value, std::sqrt(r.n), 1e-12 * std::sqrt(r.n));
    }
    if (r.kind == BasisKind::hartley && r.n == 4 && r.k == 1) {
      EXPECT_NEAR(r.l1_value, 2.0, 1e-14);
      EXPECT_NEAR(r.lower_bound, std::sqrt(2.0), 1e-15);
      EXPECT_NEAR(r.upper_bound, 2.0, 1e-15);
    }
    if (r.kind == BasisKind::hartley && r.n == 3 && r.k == 1) {
      const double a = 2.0 * std::numbers::pi / 3.0;
      const double expected =
          (1.0 + std::abs(std::cos(a) + std::sin(a)) + std::abs(std::cos(2 * a) + std::sin(2 * a))) / std::sqrt(3.0);
      EXPECT_NEAR(r.l1_value, expected, 1e-14);
      EXPECT_GE(r.l1_value, std::sqrt(1.5));
      EXPECT_LE(r.l1_value, std::sqrt(3.0));
    }
  }
}

TEST(L1Bounds, ReportFlagsOutOfBoundValues) {
  EXPECT_FALSE(make_l1_report(16, 1, BasisKind::hartley, 2.0).within_bounds);  // below sqrt(8)
  EXPECT_FALSE(make_l1_report(16, 1, BasisKind::hartley, 4.001).within_bounds);
  EXPECT_TRUE(make_l1_report(16, 1, BasisKind::hartley, 4.0 + 1e-11).within_bounds);
}

TEST(PointwiseInequality, AbsSinPlusAbsCosBetweenOneAndRootTwo) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 10000; ++i) {
    const double x = angle(rng);
    const double s = std::abs(std::sin(x)) + std::abs(std::cos(x));
    ASSERT_GE(s, 1.0 - 1e-12) << x;
    ASSERT_LE(s, std::sqrt(2.0) + 1e-12) << x;
  }
}
