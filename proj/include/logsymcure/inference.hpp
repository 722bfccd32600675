#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logsymcure/likelihood.hpp"
#include "logsymcure/numeric.hpp"
#include "logsymcure/optim.hpp"

namespace lsc {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  OptimConfig optim;
  /// Workers for the independent starts; results do not depend on it.
  int threads = 1;
};

struct FitResult {
  ModelSpec model;
  std::vector<std::string> covariate_names;
  ParamVector estimate;
  /// NaN entries when the observed information is not positive definite.
  Eigen::VectorXd se;
  Eigen::MatrixXd vcov;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t n = 0;
  std::size_t n_events = 0;
  bool converged = false;
  bool information_pd = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  int start_index = 0;

  /// beta_0..beta_p, eta, phi; extras are fixed and not counted.
  std::size_t n_parameters() const { return static_cast<std::size_t>(estimate.beta.size()) + 2; }
  /// "(Intercept)", covariate names, then the latency parameter names.
  std::vector<std::string> parameter_names() const;
};

/// Multi-start maximum likelihood. Throws DataError without events and
/// FitError when no start reaches a finite log-likelihood.
FitResult fit(const SurvivalDataset& data, const ModelSpec& model, const FitOptions& options = {});

/// Refits from explicit starting values (natural scale).
FitResult fit_from(const SurvivalDataset& data, const ModelSpec& model, const std::vector<ParamVector>& starts,
                   const FitOptions& options = {});

/// Fills se, vcov, information_pd and the criteria for an estimate.
void finalize_fit(FitResult& result, const SurvivalDataset& data);

struct Interval {
  double lower;
  double upper;
};
/// Wald interval estimate -/+ z se for parameter index j.
Interval wald_interval(const FitResult& fit, std::size_t j, double level = 0.95);

struct LrTest {
  double statistic;
  int df;
  double p_value;
};
/// Throws DomainError unless `reduced` is nested in `full`: same model,
/// covariates a subset, same sample, strictly fewer parameters.
LrTest lr_test(const FitResult& full, const FitResult& reduced);

struct Candidate {
  Incidence incidence;
  std::optional<Link> link;
  std::string latency;
  std::optional<double> extra;

  ModelSpec spec() const;
};

/// Candidate grids shipped with the library: "paper-table8" (alias
/// "standard") crosses the three incidences with Weibull, log-normal,
/// log-t (nu = 2, 4, 6, 8) and Birnbaum-Saunders (alpha = 1.2, 2, 2.8, 3.6).
std::vector<Candidate> builtin_grid(std::string_view name);

enum class Criterion { Aic, Bic };

struct SelectionRow {
  Candidate candidate;
  std::string label;
  std::size_t n_parameters = 0;
  double loglik = kNaN;
  double aic = kNaN;
  double bic = kNaN;
  bool converged = false;
  std::string error;
};

/// Fits every candidate (concurrently when threads != 1) and returns the rows
/// ranked by `criterion`; failures sort last and keep their message.
std::vector<SelectionRow> select(const SurvivalDataset& data, const std::vector<Candidate>& grid,
                                 Criterion criterion = Criterion::Aic, const FitOptions& options = {},
                                 int threads = 1);
void rank(std::vector<SelectionRow>& rows, Criterion criterion);

/// Cure fraction for a covariate profile x (intercept included).
double cure_fraction_by_profile(const FitResult& fit, const Eigen::VectorXd& x);
double cure_fraction_by_profile(const IncidenceModel& incidence, const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& x);

/// Fitted population survival at `times`, averaged over the rows of `design`
/// (intercept column included).
std::vector<double> fitted_survival(const FitResult& fit, const Eigen::MatrixXd& design,
                                    const std::vector<double>& times);

}  // namespace lsc
