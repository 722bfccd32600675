#include "logsymcure/cure.hpp"

#include <algorithm>
#include <cmath>

#include "logsymcure/numeric.hpp"

namespace lsc {

std::string_view to_string(Incidence incidence) {
  switch (incidence) {
    case Incidence::Bernoulli: return "bernoulli";
    case Incidence::Poisson: return "poisson";
    case Incidence::Geometric: return "geometric";
  }
  return "unknown";
}

std::string_view to_string(Link link) { return link == Link::Logistic ? "logistic" : "log"; }

std::optional<Incidence> parse_incidence(std::string_view name) {
  for (Incidence i : {Incidence::Bernoulli, Incidence::Poisson, Incidence::Geometric}) {
    if (to_string(i) == name) return i;
  }
  return std::nullopt;
}

std::optional<Link> parse_link(std::string_view name) {
  if (name == "logistic") return Link::Logistic;
  if (name == "log" || name == "logarithmic") return Link::Logarithmic;
  return std::nullopt;
}

Link default_link(Incidence incidence) {
  return incidence == Incidence::Poisson ? Link::Logarithmic : Link::Logistic;
}

IncidenceModel::IncidenceModel(Incidence family, std::optional<Link> link)
    : family_(family), link_(link.value_or(default_link(family))) {
  if (link_ == Link::Logarithmic && family_ != Incidence::Poisson) {
    throw DomainError(std::string("the log link can leave (0,1) and is not allowed with ") +
                      std::string(to_string(family_)));
  }
}

double IncidenceModel::inverse_link(double eta) const {
  if (link_ == Link::Logarithmic) return std::exp(std::min(eta, 700.0));
  const double theta = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
  return std::clamp(theta, kThetaClamp, 1.0 - kThetaClamp);
}

double IncidenceModel::apply_link(std::span<const double> beta, std::span<const double> x) const {
  if (beta.size() != x.size()) throw DomainError("beta and x dimensions differ");
  double eta = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) eta += beta[j] * x[j];
  return inverse_link(eta);
}

double IncidenceModel::link_derivative(double theta) const {
  return link_ == Link::Logarithmic ? theta : theta * (1.0 - theta);
}

bool IncidenceModel::admissible(double theta) const {
  if (family_ == Incidence::Poisson) return theta > 0.0 && std::isfinite(theta);
  return theta > 0.0 && theta < 1.0;
}

double IncidenceModel::cure_fraction(double theta) const {
  if (!admissible(theta)) throw RangeError("theta outside the admissible range for " + std::string(to_string(family_)));
  return family_ == Incidence::Poisson ? std::exp(-theta) : theta;
}

WeibullLatency::WeibullLatency(double shape_, double scale_) : shape(shape_), scale(scale_) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("Weibull shape and scale must be positive");
}

double WeibullLatency::log_density(double t) const {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const double l = std::log(t / scale);
  return std::log(shape / scale) + (shape - 1.0) * l - std::exp(shape * l);
}

double WeibullLatency::density(double t) const { return std::exp(log_density(t)); }

double WeibullLatency::cdf(double t) const {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  return -std::expm1(-std::pow(t / scale, shape));
}

double WeibullLatency::survival(double t) const {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  return std::exp(-std::pow(t / scale, shape));
}

double WeibullLatency::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile requires 0 < p < 1");
  return scale * std::pow(-std::log1p(-p), 1.0 / shape);
}

double WeibullLatency::sample(Rng& rng) const {
  return scale * std::pow(-std::log(uniform_open(rng)), 1.0 / shape);
}

std::string LatencyFamily::name() const {
  return is_weibull() ? "weibull" : std::string(to_string(kernel().family()));
}

std::optional<double> LatencyFamily::extra() const {
  return is_weibull() ? std::nullopt : kernel().extra();
}

std::string LatencyFamily::label() const { return is_weibull() ? "weibull" : kernel().label(); }

std::pair<std::string, std::string> LatencyFamily::parameter_names() const {
  if (is_weibull()) return {"scale", "shape"};
  return {"eta", "phi"};
}

LatencyTerms LatencyFamily::terms(double y, double a, double b) const {
  if (!(y > 0.0)) throw DomainError("observed time must be positive");
  LatencyTerms t{};
  if (is_weibull()) {
    const double l = std::log(y) - std::log(a);
    const double z = std::exp(b * l);
    t.log_f = std::log(b) - std::log(a) + (b - 1.0) * l - z;
    t.sf = std::exp(-z);
    t.cdf = -std::expm1(-z);
    t.dlogf_da = b / a * (z - 1.0);
    t.dlogf_db = 1.0 / b + l - z * l;
    t.dcdf_da = -t.sf * b * z / a;
    t.dcdf_db = t.sf * z * l;
    return t;
  }
  const DensityGenerator& k = kernel();
  const double sqrt_phi = std::sqrt(b);
  const double w = (std::log(y) - std::log(a)) / sqrt_phi;
  const double w2 = w * w;
  // Exact ties y == eta give w = 0, where some generators have singular slopes.
  const double gp = k.log_g_prime(std::max(w2, 1e-300));
  const double lg = k.log_g(w2);
  const double f0 = std::exp(lg);
  t.log_f = lg - std::log(y) - 0.5 * std::log(b);
  t.cdf = k.cdf0(w);
  t.sf = k.sf0(w);
  t.dlogf_da = gp * (-2.0 * w / (a * sqrt_phi));
  t.dlogf_db = gp * (-w2 / b) - 0.5 / b;
  t.dcdf_da = -f0 / (a * sqrt_phi);
  t.dcdf_db = -f0 * w / (2.0 * b);
  return t;
}

double LatencyFamily::log_density(double t, double a, double b) const {
  if (is_weibull()) return WeibullLatency(b, a).log_density(t);
  return LogSymmetricDist(kernel(), a, b).log_density(t);
}

double LatencyFamily::cdf(double t, double a, double b) const {
  if (is_weibull()) return WeibullLatency(b, a).cdf(t);
  return LogSymmetricDist(kernel(), a, b).cdf(t);
}

double LatencyFamily::survival(double t, double a, double b) const {
  if (is_weibull()) return WeibullLatency(b, a).survival(t);
  return LogSymmetricDist(kernel(), a, b).survival(t);
}

double LatencyFamily::sample(Rng& rng, double a, double b) const {
  if (is_weibull()) return WeibullLatency(b, a).sample(rng);
  return std::exp(std::log(a) + std::sqrt(b) * kernel().sample0(rng));
}

LatencyFamily make_latency(std::string_view name, std::optional<double> extra) {
  if (name == "weibull") {
    if (extra) throw DomainError("weibull takes no extra parameter");
    return LatencyFamily::weibull();
  }
  const auto family = parse_family(name);
  if (!family) throw DomainError("unknown latency '" + std::string(name) + "'");
  return LatencyFamily::log_symmetric(DensityGenerator(*family, extra));
}

CureModel::CureModel(IncidenceModel incidence, const LogSymmetricDist& latency)
    : CureModel(incidence, LatencyFamily::log_symmetric(latency.kernel()), latency.eta(), latency.phi()) {}

CureModel::CureModel(IncidenceModel incidence, const WeibullLatency& latency)
    : CureModel(incidence, LatencyFamily::weibull(), latency.scale, latency.shape) {}

CureModel::CureModel(IncidenceModel incidence, LatencyFamily latency, double a, double b)
    : incidence_(incidence), latency_(std::move(latency)), a_(a), b_(b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("latency parameters must be positive");
}

void CureModel::check(double theta, double t) const {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const bool ok = incidence_.family() == Incidence::Poisson ? theta >= 0.0
                  : incidence_.family() == Incidence::Bernoulli ? (theta >= 0.0 && theta <= 1.0)
                                                                : (theta > 0.0 && theta <= 1.0);
  if (!ok) throw RangeError("theta outside the admissible range");
}

double CureModel::survival_p(double theta, double t) const {
  check(theta, t);
  switch (incidence_.family()) {
    case Incidence::Bernoulli:
      return theta + (1.0 - theta) * latency_.survival(t, a_, b_);
    case Incidence::Poisson:
      return std::exp(-theta * latency_.cdf(t, a_, b_));
    case Incidence::Geometric:
      return theta / (theta + (1.0 - theta) * latency_.cdf(t, a_, b_));
  }
  return kNaN;
}

double CureModel::subdensity_p(double theta, double t) const {
  check(theta, t);
  const double f = std::exp(latency_.log_density(t, a_, b_));
  switch (incidence_.family()) {
    case Incidence::Bernoulli:
      return (1.0 - theta) * f;
    case Incidence::Poisson:
      return theta * f * std::exp(-theta * latency_.cdf(t, a_, b_));
    case Incidence::Geometric: {
      const double d = theta + (1.0 - theta) * latency_.cdf(t, a_, b_);
      return theta * (1.0 - theta) * f / (d * d);
    }
  }
  return kNaN;
}

double CureModel::subhazard_p(double theta, double t) const {
  return subdensity_p(theta, t) / survival_p(theta, t);
}

}  // namespace lsc
