#include "logsymcure/numeric.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace lsc {
namespace {

// Boost promotes double to long double internally by default, which is slow
// and buys nothing at the tolerances used here.
using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double, Policy>(), p);
}

double student_t_cdf(double w, double df) {
  return boost::math::cdf(boost::math::students_t_distribution<double, Policy>(df), w);
}

double student_t_quantile(double p, double df) {
  return boost::math::quantile(boost::math::students_t_distribution<double, Policy>(df), p);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x, Policy());
}

double gamma_p(double a, double x) { return boost::math::gamma_p(a, x, Policy()); }
double gamma_q(double a, double x) { return boost::math::gamma_q(a, x, Policy()); }
double gamma_q_inv(double a, double q) { return boost::math::gamma_q_inv(a, q, Policy()); }

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace lsc
