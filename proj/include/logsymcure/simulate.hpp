#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logsymcure/inference.hpp"
#include "logsymcure/rng.hpp"

namespace lsc {

/// One generated covariate. Categorical variables with L levels contribute
/// L - 1 indicator columns (level 0 is the baseline).
struct CovariateSpec {
  enum class Kind { Uniform, Bernoulli, Normal, Categorical };
  std::string name;
  Kind kind = Kind::Uniform;
  /// Uniform bounds, Bernoulli probability in a, normal mean/sd in (a, b).
  double a = 0.0;
  double b = 1.0;
  std::vector<double> probabilities;

  std::size_t n_columns() const { return kind == Kind::Categorical ? probabilities.size() - 1 : 1; }
  std::vector<std::string> column_names() const;
};

/// Parses "x1=uniform;x2=bernoulli(0.5);x3=uniform". Also understands
/// uniform(a,b), normal(mu,sd) and categorical(p0,p1,...). Throws DomainError.
std::vector<CovariateSpec> parse_design(std::string_view text);
inline constexpr const char* kDefaultDesign = "x1=uniform;x2=bernoulli(0.5);x3=uniform";

/// Coefficients of the three-covariate promotion design giving a population
/// cure fraction near 10% or 30%.
Eigen::VectorXd reference_beta(int cure_percent);

struct SimConfig {
  std::size_t n = 100;
  IncidenceModel incidence{Incidence::Poisson};
  LatencyFamily latency = LatencyFamily::log_symmetric(DensityGenerator(Family::LogNormal));
  double eta = 5.0;
  double phi = 1.0;
  Eigen::VectorXd beta;
  /// Censoring proportion among susceptibles.
  double target_cp = 0.15;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::vector<CovariateSpec> covariates;

  ModelSpec model() const { return {incidence, latency}; }
  ParamVector truth() const { return {beta, eta, phi}; }
  /// Throws DomainError on inconsistent settings.
  void validate() const;
};

struct SimulatedData {
  SurvivalDataset data;
  std::vector<int> m;
  std::vector<bool> cured;
  /// +inf for cured subjects.
  std::vector<double> event_time;
  std::vector<double> theta;
};

/// Right-censoring bound u with C ~ Uniform[0, u].
SimulatedData generate_dataset(const SimConfig& config, double censor_bound, Rng& rng);

/// Bisection on u over a pilot of 20000 susceptible subjects drawn from the
/// config's seed, so the pilot censoring proportion among susceptibles is
/// within 0.005 of target_cp. Throws DomainError when the target is out of
/// range or unreachable for u <= 1e6 eta.
double calibrate_censoring(const SimConfig& config);

struct ReplicateRecord {
  int replicate = 0;
  bool ok = false;
  Eigen::VectorXd estimate;
  Eigen::VectorXd se;
  double cured_fraction = 0.0;
  double censored_fraction = 0.0;
  double susceptible_censored_fraction = 0.0;
  std::string error;
};

struct ParameterSummary {
  std::string name;
  double truth;
  double mean;
  double relative_bias;
  /// sqrt(mean(((estimate - truth) / truth)^2)).
  double root_relative_mse;
  /// Sample standard deviation; 0 with a single usable replicate.
  double se;
};

struct SimSummary {
  std::vector<ParameterSummary> parameters;
  std::size_t n = 0;
  int replicates = 0;
  int failures = 0;
  double censor_bound = 0.0;
  double realized_cf = 0.0;
  double realized_cp = 0.0;
  double realized_cp_total = 0.0;
};

struct EstimatorOutcome {
  ParamVector estimate;
  Eigen::VectorXd se;
  bool converged = false;
};
using Estimator = std::function<EstimatorOutcome(const SimulatedData&, std::uint64_t replicate_seed)>;

/// Maximum likelihood under the generating model.
Estimator mle_estimator(const SimConfig& config, const FitOptions& options);

struct StudyResult {
  SimSummary summary;
  std::vector<ReplicateRecord> records;
};

/// Replicate r draws from stream r of the master seed, so results do not
/// depend on `threads`. Failed or non-converged replicates are excluded and
/// counted; more than half failing throws FitError.
StudyResult run_study(const SimConfig& config, const Estimator& estimator, int threads = 1,
                      std::optional<double> censor_bound = std::nullopt);

SimSummary summarize(const SimConfig& config, const std::vector<ReplicateRecord>& records, double censor_bound);

}  // namespace lsc
