#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "surveyqe/errors.hpp"
#include "surveyqe/statistics.hpp"

#ifdef SURVEYQE_HAVE_BOOST_MATH
#include <boost/math/special_functions/beta.hpp>
#endif

using namespace surveyqe;

// Reference values from scipy.stats.ttest_rel (fixtures/oracles/ttest_reference.py).
TEST(PairedTTest, MatchesExternalReferenceSmall) {
  const std::vector<double> a{0.5, 0.6, 0.7, 0.8};
  const std::vector<double> b{0.4, 0.5, 0.65, 0.7};
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, 6.9999999999999885, 1e-6);
  EXPECT_NEAR(r.p_two_sided, 0.005986255697707127, 1e-6);
  EXPECT_EQ(r.dof, 3u);
}

TEST(PairedTTest, MatchesExternalReferenceTenTopics) {
  const std::vector<double> a{0.1502, 0.2, 0.05, 0.3, 0.41, 0.0, 0.25, 0.33, 0.12, 0.18};
  const std::vector<double> b{0.1965, 0.25, 0.1, 0.28, 0.5, 0.1, 0.3, 0.31, 0.2, 0.2};
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, -3.4090316737989617, 1e-6);
  EXPECT_NEAR(r.p_two_sided, 0.0077615063281103736, 1e-6);
  EXPECT_EQ(r.dof, 9u);
}

TEST(PairedTTest, IdenticalInputs) {
  const std::vector<double> a{0.1, 0.4, 0.4, 0.9};
  const auto r = paired_t_test(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_EQ(r.p_two_sided, 1.0);
}

TEST(PairedTTest, SymmetricDifferencesGiveZero) {
  const std::vector<double> a{1.0, 0.0, 0.0};
  const std::vector<double> b{0.0, 0.0, 1.0};
  const auto r = paired_t_test(a, b);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_NEAR(r.p_two_sided, 1.0, 1e-12);
}

TEST(PairedTTest, ConstantNonZeroDifference) {
  const std::vector<double> a{1.5, 2.5, 3.5};
  const std::vector<double> b{1.0, 2.0, 3.0};
  const auto r = paired_t_test(a, b);
  EXPECT_TRUE(std::isinf(r.t));
  EXPECT_GT(r.t, 0.0);
  EXPECT_EQ(r.p_two_sided, 0.0);
}

TEST(PairedTTest, RejectsBadShapes) {
  const std::vector<double> three{1, 2, 3}, two{1, 2}, one{1};
  EXPECT_THROW(paired_t_test(three, two), ValidationError);
  EXPECT_THROW(paired_t_test(one, one), ValidationError);
}

TEST(PairedTTestProperty, SwappingArgumentsNegatesT) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(5 + i % 20), b(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      a[j] = u(rng);
      b[j] = u(rng);
    }
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    EXPECT_NEAR(ab.t, -ba.t, 1e-12);
    EXPECT_NEAR(ab.p_two_sided, ba.p_two_sided, 1e-12);
    EXPECT_GE(ab.p_two_sided, 0.0);
    EXPECT_LE(ab.p_two_sided, 1.0);
  }
}

TEST(StudentT, KnownCriticalValues) {
  // Two-sided 5% critical values from standard t tables.
  EXPECT_NEAR(student_t_two_sided_p(12.706204736, 1), 0.05, 1e-8);
  EXPECT_NEAR(student_t_two_sided_p(2.262157163, 9), 0.05, 1e-8);
  EXPECT_NEAR(student_t_two_sided_p(1.983971519, 100), 0.05, 1e-8);
}

TEST(IncompleteBeta, ClosedForms) {
  // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1 - x)^b.
  for (double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(regularized_incomplete_beta(3.5, 1.0, x), std::pow(x, 3.5), 1e-13);
    EXPECT_NEAR(regularized_incomplete_beta(1.0, 2.5, x), 1.0 - std::pow(1.0 - x, 2.5), 1e-13);
    // I_x(1/2, 1/2) = (2/pi) asin(sqrt(x)).
    EXPECT_NEAR(regularized_incomplete_beta(0.5, 0.5, x), 2.0 / M_PI * std::asin(std::sqrt(x)), 1e-13);
  }
  EXPECT_THROW(regularized_incomplete_beta(0.0, 1.0, 0.5), ValidationError);
  EXPECT_THROW(regularized_incomplete_beta(1.0, 1.0, 1.5), ValidationError);
}

#ifdef SURVEYQE_HAVE_BOOST_MATH
TEST(IncompleteBeta, AgreesWithBoostMath) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> x(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double dof = 1.0 + static_cast<double>(rng() % 120);
    const double xv = x(rng);
    EXPECT_NEAR(regularized_incomplete_beta(dof / 2.0, 0.5, xv), boost::math::ibeta(dof / 2.0, 0.5, xv),
                1e-12)
        << dof << " " << xv;
  }
}
#endif
