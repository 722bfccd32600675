#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace lsc {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pairwise (cascade) summation. Fixed recursion order makes the result
/// independent of how callers partition the work.
double pairwise_sum(std::span<const double> values);

/// Standard normal CDF and its complement, accurate in both tails.
inline double normal_cdf(double w) { return 0.5 * std::erfc(-w / std::sqrt(2.0)); }
inline double normal_sf(double w) { return 0.5 * std::erfc(w / std::sqrt(2.0)); }

double normal_quantile(double p);
/// Student-t CDF with `df` degrees of freedom (df > 0).
double student_t_cdf(double w, double df);
double student_t_quantile(double p, double df);
/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double df);
/// Regularized incomplete gamma functions P(a, x), Q(a, x) and inverse of Q.
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double gamma_q_inv(double a, double q);
double log_beta(double a, double b);

}  // namespace lsc
