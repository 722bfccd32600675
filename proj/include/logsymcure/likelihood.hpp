#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logsymcure/cure.hpp"

namespace lsc {

class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Right-censored observations with an incidence design matrix whose first
/// column is the intercept.
class SurvivalDataset {
 public:
  SurvivalDataset() = default;
  /// `covariates` is n x p without the intercept; names has p entries.
  /// Throws DataError on length mismatch, non-positive times, status outside
  /// {0, 1} or a rank-deficient design.
  SurvivalDataset(std::vector<double> time, std::vector<int> status, const Eigen::MatrixXd& covariates,
                  std::vector<std::string> names);
  /// Intercept-only design.
  SurvivalDataset(std::vector<double> time, std::vector<int> status);

  std::size_t size() const noexcept { return time_.size(); }
  std::size_t n_events() const noexcept { return n_events_; }
  /// Number of incidence coefficients, p + 1.
  std::size_t n_coefficients() const noexcept { return static_cast<std::size_t>(design_.cols()); }

  const std::vector<double>& time() const noexcept { return time_; }
  const std::vector<int>& status() const noexcept { return status_; }
  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const std::vector<std::string>& covariate_names() const noexcept { return names_; }
  /// Covariates without the intercept column.
  Eigen::MatrixXd covariates() const { return design_.rightCols(design_.cols() - 1); }

 private:
  std::vector<double> time_;
  std::vector<int> status_;
  Eigen::MatrixXd design_;
  std::vector<std::string> names_;
  std::size_t n_events_ = 0;
};

/// lambda = (beta, eta, phi); for a Weibull latency the (eta, phi) slots hold
/// (scale, shape).
struct ParamVector {
  Eigen::VectorXd beta;
  double eta = 1.0;
  double phi = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(beta.size()) + 2; }
  Eigen::VectorXd flatten() const;
  static ParamVector unflatten(const Eigen::VectorXd& v);
};

struct ModelSpec {
  IncidenceModel incidence;
  LatencyFamily latency;

  /// "bernoulli/logt(8)/logistic".
  std::string label() const;
};

/// Marginal log-likelihood. Returns the lowest finite double when any term
/// is -inf or not a number.
double loglik(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda);

/// Per-observation log-likelihood contributions.
Eigen::VectorXd loglik_terms(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda);

/// Analytic score (d loglik / d beta_0..beta_p, d/d eta, d/d phi), assembled
/// from the family blocks:
///   U_beta = sum_i b_i x_i,   U_a = sum_i [delta_i dlogf/da + c_i dF/da]
/// with b_i the theta-derivative composed with the link and c_i the
/// coefficient of the latency CDF in the family's log-likelihood term.
Eigen::VectorXd score(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda);

/// Central finite-difference gradient of loglik; the fallback used to gate
/// the analytic score.
Eigen::VectorXd numeric_score(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda);

/// Central-difference Jacobian of a vector function; step per coordinate is
/// max(rel_step * |x_j|, abs_floor).
Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                 const Eigen::VectorXd& x, double rel_step = 1e-5, double abs_floor = 1e-8);

struct ObservedInformation {
  Eigen::MatrixXd matrix;
  bool positive_definite = false;
  Eigen::VectorXd eigenvalues;
};

/// -d^2 loglik / d lambda d lambda', from the Jacobian of the analytic score,
/// symmetrized.
ObservedInformation observed_information(const ModelSpec& model, const SurvivalDataset& data,
                                         const ParamVector& lambda);
ObservedInformation information_from_gradient(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                                              const Eigen::VectorXd& x);

}  // namespace lsc
