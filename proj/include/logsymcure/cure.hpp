#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "logsymcure/logsym.hpp"

namespace lsc {

class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Distribution of the latent number of competing causes M.
enum class Incidence { Bernoulli, Poisson, Geometric };
enum class Link { Logistic, Logarithmic };

std::string_view to_string(Incidence incidence);
std::string_view to_string(Link link);
std::optional<Incidence> parse_incidence(std::string_view name);
/// Accepts "logistic" and "log".
std::optional<Link> parse_link(std::string_view name);
Link default_link(Incidence incidence);

class IncidenceModel {
 public:
  /// Rejects links that can leave the family's theta range
  /// (Logarithmic with Bernoulli or Geometric).
  explicit IncidenceModel(Incidence family, std::optional<Link> link = std::nullopt);

  Incidence family() const noexcept { return family_; }
  Link link() const noexcept { return link_; }

  /// theta = q(x'beta); x carries the intercept column.
  double apply_link(std::span<const double> beta, std::span<const double> x) const;
  double inverse_link(double linear_predictor) const;
  /// d theta / d(linear predictor), evaluated at theta.
  double link_derivative(double theta) const;
  /// p_theta(0).
  double cure_fraction(double theta) const;
  bool admissible(double theta) const;

 private:
  Incidence family_;
  Link link_;
};

/// Logistic link output is clamped to this band so the log-likelihood stays finite.
inline constexpr double kThetaClamp = 1e-12;

/// Comparison baseline outside the log-symmetric class.
struct WeibullLatency {
  double shape;
  double scale;

  WeibullLatency(double shape, double scale);
  double density(double t) const;
  double log_density(double t) const;
  double cdf(double t) const;
  double survival(double t) const;
  double quantile(double p) const;
  double sample(Rng& rng) const;
};

/// Per-observation latency quantities needed by the likelihood and its score.
/// (a, b) are (eta, phi) for log-symmetric kernels and (scale, shape) for Weibull.
struct LatencyTerms {
  double log_f;
  double cdf;
  double sf;
  double dlogf_da;
  double dlogf_db;
  double dcdf_da;
  double dcdf_db;
};

/// A latency family with its two positive parameters left free.
class LatencyFamily {
 public:
  static LatencyFamily log_symmetric(DensityGenerator kernel) { return LatencyFamily(std::move(kernel)); }
  static LatencyFamily weibull() { return LatencyFamily(std::monostate{}); }

  bool is_weibull() const noexcept { return std::holds_alternative<std::monostate>(kind_); }
  /// Precondition: !is_weibull().
  const DensityGenerator& kernel() const { return std::get<DensityGenerator>(kind_); }
  /// "weibull", "lognormal", "logt", ... without the extra parameter.
  std::string name() const;
  std::optional<double> extra() const;
  std::string label() const;
  /// Names of the two latency parameters in reports.
  std::pair<std::string, std::string> parameter_names() const;

  LatencyTerms terms(double y, double a, double b) const;
  double log_density(double t, double a, double b) const;
  double cdf(double t, double a, double b) const;
  double survival(double t, double a, double b) const;
  double sample(Rng& rng, double a, double b) const;

 private:
  explicit LatencyFamily(std::variant<std::monostate, DensityGenerator> kind) : kind_(std::move(kind)) {}
  std::variant<std::monostate, DensityGenerator> kind_;
};

/// Builds a latency family from CLI-style names ("weibull", "lognormal", "logt", ...).
LatencyFamily make_latency(std::string_view name, std::optional<double> extra);

/// Incidence model combined with a fully parameterized latency.
class CureModel {
 public:
  CureModel(IncidenceModel incidence, const LogSymmetricDist& latency);
  CureModel(IncidenceModel incidence, const WeibullLatency& latency);
  CureModel(IncidenceModel incidence, LatencyFamily latency, double a, double b);

  const IncidenceModel& incidence() const noexcept { return incidence_; }
  const LatencyFamily& latency() const noexcept { return latency_; }

  double survival_p(double theta, double t) const;
  double subdensity_p(double theta, double t) const;
  /// Always f_p / S_p.
  double subhazard_p(double theta, double t) const;

 private:
  void check(double theta, double t) const;

  IncidenceModel incidence_;
  LatencyFamily latency_;
  double a_;
  double b_;
};

}  // namespace lsc
