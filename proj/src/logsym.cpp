#include "logsymcure/logsym.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "logsymcure/numeric.hpp"

namespace lsc {

namespace detail {

// Type I log-logistic: f0(w) = c e^{-w^2} / (1 + e^{-w^2})^2 has no closed-form
// CDF. log S0 is tabulated on [0, kTableEnd] from panel-wise Gauss-Kronrod
// integrals accumulated from the right, and evaluated by cubic Hermite
// interpolation using the exact slope -f0/S0. Beyond kTableEnd the factor
// (1 + e^{-w^2})^{-2} equals 1 in double precision, so the tail is c*sqrt(pi)/2*erfc(w).
struct LogisticITable {
  static constexpr double kTableEnd = 12.0;
  static constexpr int kPanels = 3072;
  static constexpr double kStep = kTableEnd / kPanels;

  double c = 0.0;
  std::vector<double> log_s;
  std::vector<double> slope;

  static double kernel(double w) {
    const double e = std::exp(-w * w);
    return e / ((1.0 + e) * (1.0 + e));
  }

  static double tail_integral(double w) {
    return 0.5 * std::sqrt(std::numbers::pi) * std::erfc(w);
  }

  LogisticITable() {
    using boost::math::quadrature::gauss_kronrod;
    std::vector<double> upper(kPanels + 1);
    upper[kPanels] = tail_integral(kTableEnd);
    for (int i = kPanels - 1; i >= 0; --i) {
      const double a = i * kStep;
      upper[i] = upper[i + 1] + gauss_kronrod<double, 21>::integrate(kernel, a, a + kStep, 0);
    }
    c = 1.0 / (2.0 * upper[0]);
    log_s.resize(kPanels + 1);
    slope.resize(kPanels + 1);
    for (int i = 0; i <= kPanels; ++i) {
      log_s[i] = std::log(c * upper[i]);
      slope[i] = -kernel(i * kStep) / upper[i];
    }
    log_s[0] = std::log(0.5);
  }

  /// log S0(w) for w >= 0.
  double log_sf(double w) const {
    if (w >= kTableEnd) return std::log(c * tail_integral(w));
    const double x = w / kStep;
    const int i = std::min(static_cast<int>(x), kPanels - 1);
    const double t = x - i;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * log_s[i] + h10 * kStep * slope[i] + h01 * log_s[i + 1] + h11 * kStep * slope[i + 1];
  }

  /// w >= 0 with S0(w) = q, q in (0, 0.5].
  double inverse_sf(double q) const {
    const double target = std::log(q);
    double lo = 0.0;
    double hi = 1.0;
    while (log_sf(hi) > target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (log_sf(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace detail

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

const std::shared_ptr<const detail::LogisticITable>& logistic_i_table() {
  static const auto table = std::make_shared<const detail::LogisticITable>();
  return table;
}

// log cosh(s) for s >= 0 without overflow.
double log_cosh(double s) { return s + std::log1p(std::exp(-2.0 * s)) - std::numbers::ln2; }

}  // namespace

double loglogistic1_constant() { return logistic_i_table()->c; }

std::string_view to_string(Family family) {
  switch (family) {
    case Family::LogNormal: return "lognormal";
    case Family::LogTStudent: return "logt";
    case Family::BirnbaumSaunders: return "bs";
    case Family::LogLogisticI: return "loglog1";
    case Family::LogLogisticII: return "loglog2";
    case Family::LogPowerExponential: return "lpe";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : {Family::LogNormal, Family::LogTStudent, Family::BirnbaumSaunders, Family::LogLogisticI,
                   Family::LogLogisticII, Family::LogPowerExponential}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

bool family_has_extra(Family family) {
  return family == Family::LogTStudent || family == Family::BirnbaumSaunders ||
         family == Family::LogPowerExponential;
}

DensityGenerator::DensityGenerator(Family family, std::optional<double> extra)
    : family_(family), extra_(extra) {
  const std::string name(to_string(family));
  if (!family_has_extra(family)) {
    if (extra) throw DomainError(name + " takes no extra parameter");
  } else if (!extra || !std::isfinite(*extra)) {
    throw DomainError(name + " requires an extra parameter");
  }
  switch (family) {
    case Family::LogNormal:
      log_norm_ = -kLogSqrt2Pi;
      break;
    case Family::LogTStudent: {
      const double nu = *extra;
      if (!(nu > 0.0)) throw DomainError("logt requires nu > 0");
      log_norm_ = -0.5 * std::log(nu) - log_beta(0.5, 0.5 * nu);
      break;
    }
    case Family::BirnbaumSaunders: {
      const double alpha = *extra;
      if (!(alpha > 0.0)) throw DomainError("bs requires alpha > 0");
      log_norm_ = -kLogSqrt2Pi + std::log(2.0 / alpha);
      break;
    }
    case Family::LogLogisticI:
      table_ = logistic_i_table();
      log_norm_ = std::log(table_->c);
      break;
    case Family::LogLogisticII:
      log_norm_ = 0.0;
      break;
    case Family::LogPowerExponential: {
      const double k = *extra;
      if (!(k > -1.0 && k <= 1.0)) throw DomainError("lpe requires -1 < k <= 1");
      const double a = 0.5 * (1.0 + k);
      log_norm_ = -(std::lgamma(1.0 + a) + (1.0 + a) * std::numbers::ln2);
      break;
    }
  }
}

std::string DensityGenerator::label() const {
  std::string out(to_string(family_));
  if (extra_) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "(%g)", *extra_);
    out += buf;
  }
  return out;
}

double DensityGenerator::log_g(double u) const {
  if (!(u >= 0.0)) throw DomainError("g(u) requires u >= 0");
  switch (family_) {
    case Family::LogNormal:
      return log_norm_ - 0.5 * u;
    case Family::LogTStudent: {
      const double nu = *extra_;
      return log_norm_ - 0.5 * (nu + 1.0) * std::log1p(u / nu);
    }
    case Family::BirnbaumSaunders: {
      const double alpha = *extra_;
      const double s = std::sqrt(u);
      const double sh = std::sinh(s);
      return log_norm_ - 2.0 / (alpha * alpha) * sh * sh + log_cosh(s);
    }
    case Family::LogLogisticI:
      return log_norm_ - u - 2.0 * std::log1p(std::exp(-u));
    case Family::LogLogisticII: {
      const double s = std::sqrt(u);
      return -s - 2.0 * std::log1p(std::exp(-s));
    }
    case Family::LogPowerExponential:
      return log_norm_ - 0.5 * std::pow(u, 1.0 / (1.0 + *extra_));
  }
  return kNaN;
}

double DensityGenerator::g(double u) const { return std::exp(log_g(u)); }

double DensityGenerator::log_g_prime(double u) const {
  if (!(u >= 0.0)) throw DomainError("log_g_prime(u) requires u >= 0");
  switch (family_) {
    case Family::LogNormal:
      return -0.5;
    case Family::LogTStudent: {
      const double nu = *extra_;
      return -0.5 * (nu + 1.0) / (nu + u);
    }
    case Family::BirnbaumSaunders: {
      const double a2 = *extra_ * *extra_;
      if (u == 0.0) return 0.5 - 2.0 / a2;
      const double s = std::sqrt(u);
      return (std::tanh(s) - 2.0 / a2 * std::sinh(2.0 * s)) / (2.0 * s);
    }
    case Family::LogLogisticI:
      return -std::tanh(0.5 * u);
    case Family::LogLogisticII: {
      if (u == 0.0) return -0.25;
      const double s = std::sqrt(u);
      return -std::tanh(0.5 * s) / (2.0 * s);
    }
    case Family::LogPowerExponential: {
      const double k = *extra_;
      if (k == 0.0) return -0.5;
      if (u == 0.0) {
        if (k < 0.0) return 0.0;
        throw DomainError("log_g_prime is unbounded at u = 0 for lpe with k > 0");
      }
      return -0.5 / (1.0 + k) * std::pow(u, -k / (1.0 + k));
    }
  }
  return kNaN;
}

double DensityGenerator::sf0(double w) const {
  switch (family_) {
    case Family::LogNormal:
      return normal_sf(w);
    case Family::LogTStudent:
      return student_t_cdf(-w, *extra_);
    case Family::BirnbaumSaunders:
      return normal_sf(2.0 / *extra_ * std::sinh(w));
    case Family::LogLogisticI: {
      if (w >= 0.0) return std::exp(table_->log_sf(w));
      return 1.0 - std::exp(table_->log_sf(-w));
    }
    case Family::LogLogisticII:
      return 1.0 / (1.0 + std::exp(w));
    case Family::LogPowerExponential: {
      const double a = 0.5 * (1.0 + *extra_);
      const double half_q = 0.5 * gamma_q(a, 0.5 * std::pow(std::fabs(w), 1.0 / a));
      return w >= 0.0 ? half_q : 1.0 - half_q;
    }
  }
  return kNaN;
}

double DensityGenerator::quantile0(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile requires 0 < p < 1");
  switch (family_) {
    case Family::LogNormal:
      return normal_quantile(p);
    case Family::LogTStudent:
      return student_t_quantile(p, *extra_);
    case Family::BirnbaumSaunders:
      return std::asinh(0.5 * *extra_ * normal_quantile(p));
    case Family::LogLogisticI: {
      if (p == 0.5) return 0.0;
      return p > 0.5 ? table_->inverse_sf(1.0 - p) : -table_->inverse_sf(p);
    }
    case Family::LogLogisticII:
      return std::log(p / (1.0 - p));
    case Family::LogPowerExponential: {
      if (p == 0.5) return 0.0;
      const double a = 0.5 * (1.0 + *extra_);
      const double q = p > 0.5 ? 1.0 - p : p;
      const double w = std::pow(2.0 * gamma_q_inv(a, 2.0 * q), a);
      return p > 0.5 ? w : -w;
    }
  }
  return kNaN;
}

double DensityGenerator::sample0(Rng& rng) const {
  switch (family_) {
    case Family::LogNormal:
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    case Family::LogTStudent:
      return std::student_t_distribution<double>(*extra_)(rng);
    case Family::BirnbaumSaunders:
      return std::asinh(0.5 * *extra_ * std::normal_distribution<double>(0.0, 1.0)(rng));
    case Family::LogLogisticI: {
      const double u = uniform_open(rng);
      return u > 0.5 ? table_->inverse_sf(1.0 - u) : -table_->inverse_sf(u);
    }
    case Family::LogLogisticII: {
      const double u = uniform_open(rng);
      return std::log(u) - std::log1p(-u);
    }
    case Family::LogPowerExponential: {
      // |W|^{1/a} / 2 is Gamma(a, 1) with a = (1 + k) / 2.
      const double a = 0.5 * (1.0 + *extra_);
      const double magnitude = std::pow(2.0 * std::gamma_distribution<double>(a, 1.0)(rng), a);
      return uniform_open(rng) < 0.5 ? -magnitude : magnitude;
    }
  }
  return kNaN;
}

LogSymmetricDist::LogSymmetricDist(DensityGenerator kernel, double eta, double phi)
    : kernel_(std::move(kernel)), eta_(eta), phi_(phi) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive");
  if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("phi must be positive");
  log_eta_ = std::log(eta);
  sqrt_phi_ = std::sqrt(phi);
}

double LogSymmetricDist::standardize(double z) const {
  if (!(z > 0.0)) throw DomainError("z must be positive");
  return (std::log(z) - log_eta_) / sqrt_phi_;
}

double LogSymmetricDist::log_density(double z) const {
  const double w = standardize(z);
  return kernel_.log_g(w * w) - std::log(z) - 0.5 * std::log(phi_);
}

double LogSymmetricDist::density(double z) const { return std::exp(log_density(z)); }

double LogSymmetricDist::cdf(double z) const { return kernel_.cdf0(standardize(z)); }

double LogSymmetricDist::survival(double z) const { return kernel_.sf0(standardize(z)); }

double LogSymmetricDist::quantile(double p) const {
  return std::exp(log_eta_ + sqrt_phi_ * kernel_.quantile0(p));
}

double LogSymmetricDist::sample(Rng& rng) const {
  return std::exp(log_eta_ + sqrt_phi_ * kernel_.sample0(rng));
}

std::vector<double> LogSymmetricDist::sample(Rng& rng, std::size_t count) const {
  std::vector<double> out(count);
  for (auto& z : out) z = sample(rng);
  return out;
}

}  // namespace lsc
