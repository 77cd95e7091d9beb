#include "surveyqe/statistics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "surveyqe/errors.hpp"

namespace surveyqe {
namespace {

// Continued fraction for I_x(a, b) by the modified Lentz method; converges
// quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError(fmt::format("incomplete beta needs a, b > 0 (got {}, {})", a, b));
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError(fmt::format("incomplete beta needs 0 <= x <= 1 (got {})", x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError(fmt::format("paired t-test needs equal lengths ({} vs {})", a.size(), b.size()));
  }
  const auto m = a.size();
  if (m < 2) throw ValidationError("paired t-test needs at least two pairs");

  double sum = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = a[i] - b[i];
    sum += d;
    all_zero = all_zero && d == 0.0;
  }
  TTestResult result;
  result.dof = m - 1;
  if (all_zero) return result;

  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dev = (a[i] - b[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (sd == 0.0) {
    result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
    result.p_two_sided = 0.0;
    return result;
  }
  result.t = mean / (sd / std::sqrt(static_cast<double>(m)));
  result.p_two_sided = student_t_two_sided_p(result.t, static_cast<double>(result.dof));
  return result;
}

}  // namespace surveyqe
