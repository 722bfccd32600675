#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "logsymcure/rng.hpp"

namespace lsc {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Log-symmetric families. Each one is fully determined by its density
/// generating function g(u), u >= 0, normalized so that the standard symmetric
/// density is f0(w) = g(w^2).
enum class Family {
  LogNormal,
  LogTStudent,          // extra = nu > 0
  BirnbaumSaunders,     // extra = alpha > 0
  LogLogisticI,
  LogLogisticII,
  LogPowerExponential,  // extra = k in (-1, 1]
};

std::string_view to_string(Family family);
/// Accepts the short CLI names: lognormal, logt, bs, loglog1, loglog2, lpe.
std::optional<Family> parse_family(std::string_view name);
bool family_has_extra(Family family);

namespace detail {
struct LogisticITable;
}

/// Normalizing constant c of the type I log-logistic generator, obtained by
/// quadrature when first requested.
double loglogistic1_constant();

class DensityGenerator {
 public:
  /// Throws DomainError when `extra` is missing, superfluous or out of range.
  explicit DensityGenerator(Family family, std::optional<double> extra = std::nullopt);

  Family family() const noexcept { return family_; }
  std::optional<double> extra() const noexcept { return extra_; }
  /// e.g. "lognormal", "logt(8)", "bs(1.5)".
  std::string label() const;

  double g(double u) const;
  double log_g(double u) const;
  /// d/du log g(u). At u = 0 the one-sided limit is returned when it is
  /// finite; a DomainError is raised when it is not (LPE with k > 0).
  double log_g_prime(double u) const;

  /// Standard symmetric density, CDF, survival and quantile.
  double pdf0(double w) const { return g(w * w); }
  double cdf0(double w) const { return sf0(-w); }
  double sf0(double w) const;
  double quantile0(double p) const;
  double sample0(Rng& rng) const;

 private:
  Family family_;
  std::optional<double> extra_;
  double log_norm_ = 0.0;
  std::shared_ptr<const detail::LogisticITable> table_;
};

/// Z = exp(log(eta) + sqrt(phi) * W) with W standard symmetric.
class LogSymmetricDist {
 public:
  LogSymmetricDist(DensityGenerator kernel, double eta, double phi);

  const DensityGenerator& kernel() const noexcept { return kernel_; }
  double eta() const noexcept { return eta_; }
  double phi() const noexcept { return phi_; }

  /// z~ = log[(z / eta)^(1/sqrt(phi))].
  double standardize(double z) const;
  double density(double z) const;
  double log_density(double z) const;
  double cdf(double z) const;
  double survival(double z) const;
  double quantile(double p) const;
  double sample(Rng& rng) const;
  std::vector<double> sample(Rng& rng, std::size_t count) const;

 private:
  DensityGenerator kernel_;
  double eta_;
  double phi_;
  double log_eta_;
  double sqrt_phi_;
};

}  // namespace lsc
