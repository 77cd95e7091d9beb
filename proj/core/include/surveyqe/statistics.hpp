#pragma once

#include <cstddef>
#include <span>

namespace surveyqe {

struct TTestResult {
  double t = 0.0;
  std::size_t dof = 0;
  double p_two_sided = 1.0;
};

// Paired two-sided t-test on a[i] - b[i]. Identical samples give t = 0 and
// p = 1; constant non-zero differences give t = +-infinity and p = 0.
// Throws ValidationError on a length mismatch or fewer than two pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with dof degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace surveyqe
