#include "logsymcure/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logsymcure/numeric.hpp"

namespace lsc {

SurvivalDataset::SurvivalDataset(std::vector<double> time, std::vector<int> status,
                                 const Eigen::MatrixXd& covariates, std::vector<std::string> names)
    : time_(std::move(time)), status_(std::move(status)), names_(std::move(names)) {
  const auto n = time_.size();
  if (status_.size() != n) throw DataError("time and status lengths differ");
  if (covariates.cols() > 0 && static_cast<std::size_t>(covariates.rows()) != n) {
    throw DataError("covariate rows differ from number of times");
  }
  if (static_cast<std::size_t>(covariates.cols()) != names_.size()) throw DataError("covariate names do not match columns");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(time_[i] > 0.0) || !std::isfinite(time_[i])) throw DataError("observed times must be positive and finite");
    if (status_[i] != 0 && status_[i] != 1) throw DataError("status must be 0 or 1");
    n_events_ += static_cast<std::size_t>(status_[i]);
  }
  design_.resize(static_cast<Eigen::Index>(n), covariates.cols() + 1);
  design_.col(0).setOnes();
  if (covariates.cols() > 0) design_.rightCols(covariates.cols()) = covariates;
  if (!design_.allFinite()) throw DataError("covariates must be finite");
  if (n > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_);
    if (qr.rank() < design_.cols()) throw DataError("design matrix is not of full column rank");
  }
}

SurvivalDataset::SurvivalDataset(std::vector<double> time, std::vector<int> status)
    : SurvivalDataset(std::move(time), std::move(status), Eigen::MatrixXd(), {}) {}

Eigen::VectorXd ParamVector::flatten() const {
  Eigen::VectorXd v(beta.size() + 2);
  v.head(beta.size()) = beta;
  v(beta.size()) = eta;
  v(beta.size() + 1) = phi;
  return v;
}

ParamVector ParamVector::unflatten(const Eigen::VectorXd& v) {
  ParamVector p;
  p.beta = v.head(v.size() - 2);
  p.eta = v(v.size() - 2);
  p.phi = v(v.size() - 1);
  return p;
}

std::string ModelSpec::label() const {
  return std::string(to_string(incidence.family())) + "/" + latency.label() + "/" +
         std::string(to_string(incidence.link()));
}

namespace {

struct Contribution {
  double ll;
  double beta_factor;  // d ll_i / d(x_i' beta)
  double cdf_factor;   // d ll_i / d F(y_i)
};

// One observation's log-likelihood term and the family-specific factors of the
// score. theta is already on the family's scale.
Contribution contribution(const IncidenceModel& inc, int delta, double theta, const LatencyTerms& t) {
  Contribution c{};
  const bool event = delta == 1;
  switch (inc.family()) {
    case Incidence::Bernoulli: {
      const double d = theta + (1.0 - theta) * t.sf;
      if (event) {
        c.ll = std::log1p(-theta) + t.log_f;
        c.beta_factor = -theta;
        c.cdf_factor = 0.0;
      } else {
        c.ll = std::log(d);
        c.beta_factor = t.cdf * theta * (1.0 - theta) / d;
        c.cdf_factor = -(1.0 - theta) / d;
      }
      break;
    }
    case Incidence::Poisson: {
      c.ll = (event ? std::log(theta) + t.log_f : 0.0) - theta * t.cdf;
      const double per_log_link = delta - theta * t.cdf;
      c.beta_factor = inc.link() == Link::Logarithmic ? per_log_link : per_log_link * (1.0 - theta);
      c.cdf_factor = -theta;
      break;
    }
    case Incidence::Geometric: {
      const double d = theta + (1.0 - theta) * t.cdf;
      if (event) {
        c.ll = std::log(theta) + std::log1p(-theta) + t.log_f - 2.0 * std::log(d);
      } else {
        c.ll = std::log(theta) - std::log(d);
      }
      c.beta_factor = delta * (1.0 - 2.0 * theta) + (1 - delta) * (1.0 - theta) -
                      (1 + delta) * t.sf * theta * (1.0 - theta) / d;
      c.cdf_factor = -(1 + delta) * (1.0 - theta) / d;
      break;
    }
  }
  return c;
}

void check_lambda(const SurvivalDataset& data, const ParamVector& lambda) {
  if (static_cast<std::size_t>(lambda.beta.size()) != data.n_coefficients()) {
    throw DomainError("beta length does not match the design");
  }
  if (!(lambda.eta > 0.0) || !(lambda.phi > 0.0)) throw DomainError("eta and phi must be positive");
}

constexpr double kLowest = std::numeric_limits<double>::lowest();

}  // namespace

Eigen::VectorXd loglik_terms(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda) {
  check_lambda(data, lambda);
  const Eigen::VectorXd linear = data.design() * lambda.beta;
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double theta = model.incidence.inverse_link(linear(k));
    const LatencyTerms t = model.latency.terms(data.time()[i], lambda.eta, lambda.phi);
    out(k) = contribution(model.incidence, data.status()[i], theta, t).ll;
  }
  return out;
}

double loglik(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda) {
  if (!(lambda.eta > 0.0) || !(lambda.phi > 0.0) || !std::isfinite(lambda.eta) || !std::isfinite(lambda.phi)) {
    return kLowest;
  }
  const Eigen::VectorXd terms = loglik_terms(model, data, lambda);
  if (!terms.allFinite()) return kLowest;
  const double total = pairwise_sum({terms.data(), static_cast<std::size_t>(terms.size())});
  return std::isfinite(total) ? total : kLowest;
}

Eigen::VectorXd score(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda) {
  check_lambda(data, lambda);
  const auto n = data.size();
  const Eigen::VectorXd linear = data.design() * lambda.beta;
  Eigen::VectorXd beta_factor(static_cast<Eigen::Index>(n));
  std::vector<double> u_a(n), u_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const int delta = data.status()[i];
    const double theta = model.incidence.inverse_link(linear(k));
    const LatencyTerms t = model.latency.terms(data.time()[i], lambda.eta, lambda.phi);
    const Contribution c = contribution(model.incidence, delta, theta, t);
    beta_factor(k) = c.beta_factor;
    u_a[i] = delta * t.dlogf_da + c.cdf_factor * t.dcdf_da;
    u_b[i] = delta * t.dlogf_db + c.cdf_factor * t.dcdf_db;
  }
  Eigen::VectorXd u(lambda.size());
  u.head(lambda.beta.size()) = data.design().transpose() * beta_factor;
  u(lambda.beta.size()) = pairwise_sum(u_a);
  u(lambda.beta.size() + 1) = pairwise_sum(u_b);
  return u;
}

Eigen::VectorXd numeric_score(const ModelSpec& model, const SurvivalDataset& data, const ParamVector& lambda) {
  const Eigen::VectorXd x = lambda.flatten();
  Eigen::VectorXd grad(x.size());
  auto f = [&](const Eigen::VectorXd& v) { return loglik(model, data, ParamVector::unflatten(v)); };
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    // Five-point stencil: truncation error O(h^4).
    const double h = 1e-4 * std::max(std::fabs(x(j)), 1e-2);
    Eigen::VectorXd p = x;
    auto at = [&](double offset) {
      p(j) = x(j) + offset;
      return f(p);
    };
    grad(j) = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return grad;
}

Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                 const Eigen::VectorXd& x, double rel_step, double abs_floor) {
  const Eigen::VectorXd f0 = fn(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = std::max(rel_step * std::fabs(x(j)), abs_floor);
    Eigen::VectorXd p = x;
    p(j) = x(j) + h;
    const Eigen::VectorXd up = fn(p);
    p(j) = x(j) - h;
    const Eigen::VectorXd down = fn(p);
    jac.col(j) = (up - down) / (2.0 * h);
  }
  return jac;
}

ObservedInformation information_from_gradient(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd hess = numeric_jacobian(grad, x);
  ObservedInformation info;
  info.matrix = -0.5 * (hess + hess.transpose());
  if (!info.matrix.allFinite()) {
    info.eigenvalues = Eigen::VectorXd::Constant(x.size(), kNaN);
    return info;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info.matrix, Eigen::EigenvaluesOnly);
  info.eigenvalues = eig.eigenvalues();
  info.positive_definite = eig.info() == Eigen::Success && info.eigenvalues.minCoeff() > 0.0;
  return info;
}

ObservedInformation observed_information(const ModelSpec& model, const SurvivalDataset& data,
                                         const ParamVector& lambda) {
  return information_from_gradient(
      [&](const Eigen::VectorXd& v) { return score(model, data, ParamVector::unflatten(v)); }, lambda.flatten());
}

}  // namespace lsc
