#include "logsymcure/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "logsymcure/parallel.hpp"

namespace lsc {

std::vector<std::string> FitResult::parameter_names() const {
  std::vector<std::string> names{"(Intercept)"};
  names.insert(names.end(), covariate_names.begin(), covariate_names.end());
  const auto [a, b] = model.latency.parameter_names();
  names.push_back(a);
  names.push_back(b);
  return names;
}

void finalize_fit(FitResult& result, const SurvivalDataset& data) {
  const auto k = static_cast<Eigen::Index>(result.n_parameters());
  result.n = data.size();
  result.n_events = data.n_events();
  result.aic = -2.0 * result.loglik + 2.0 * static_cast<double>(k);
  result.bic = -2.0 * result.loglik + static_cast<double>(k) * std::log(static_cast<double>(data.size()));

  result.vcov = Eigen::MatrixXd::Constant(k, k, kNaN);
  result.se = Eigen::VectorXd::Constant(k, kNaN);
  result.information_pd = false;
  ObservedInformation info;
  try {
    info = observed_information(result.model, data, result.estimate);
  } catch (const std::exception&) {
    return;
  }
  if (!info.positive_definite) return;
  Eigen::LLT<Eigen::MatrixXd> llt(info.matrix);
  if (llt.info() != Eigen::Success) return;
  result.vcov = llt.solve(Eigen::MatrixXd::Identity(k, k));
  result.se = result.vcov.diagonal().cwiseSqrt();
  result.information_pd = result.se.allFinite();
}

FitResult fit_from(const SurvivalDataset& data, const ModelSpec& model, const std::vector<ParamVector>& starts,
                   const FitOptions& options) {
  if (data.n_events() == 0) throw DataError("no events: the latency distribution is not identifiable");
  if (starts.empty()) throw DomainError("at least one start is required");

  const Objective objective = [&](const Eigen::VectorXd& v) { return loglik(model, data, from_unconstrained(v)); };
  const Gradient gradient = [&](const Eigen::VectorXd& v) {
    const ParamVector l = from_unconstrained(v);
    return unconstrained_gradient(score(model, data, l), l);
  };

  std::vector<OptimResult> runs(starts.size());
  parallel_for(starts.size(), options.threads, [&](std::size_t s) {
    runs[s] = maximize(objective, gradient, to_unconstrained(starts[s]), options.optim);
    runs[s].start_index = static_cast<int>(s);
  });

  // Best converged start when there is one, otherwise the best finite one.
  const OptimResult* best = nullptr;
  auto better = [](const OptimResult& a, const OptimResult* b) {
    if (!b) return true;
    if (a.converged != b->converged) return a.converged;
    return a.value > b->value;
  };
  for (const auto& r : runs) {
    if (r.value == std::numeric_limits<double>::lowest() || !std::isfinite(r.value)) continue;
    if (better(r, best)) best = &r;
  }
  if (!best) throw FitError("no start reached a finite log-likelihood for " + model.label());

  FitResult result{model, data.covariate_names(), from_unconstrained(best->x), {}, {}};
  result.loglik = best->value;
  result.converged = best->converged;
  result.iterations = best->iterations;
  result.gradient_norm = best->gradient_norm;
  result.start_index = best->start_index;
  finalize_fit(result, data);
  return result;
}

FitResult fit(const SurvivalDataset& data, const ModelSpec& model, const FitOptions& options) {
  if (data.n_events() == 0) throw DataError("no events: the latency distribution is not identifiable");
  return fit_from(data, model, default_starts(data, model, options.optim.n_starts, options.optim.seed), options);
}

Interval wald_interval(const FitResult& fit, std::size_t j, double level) {
  if (j >= fit.n_parameters()) throw DomainError("parameter index out of range");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0, 1)");
  const double z = normal_quantile(0.5 + level / 2.0);
  const double est = fit.estimate.flatten()(static_cast<Eigen::Index>(j));
  const double se = fit.se(static_cast<Eigen::Index>(j));
  return {est - z * se, est + z * se};
}

LrTest lr_test(const FitResult& full, const FitResult& reduced) {
  if (full.model.label() != reduced.model.label()) throw DomainError("models differ in incidence, latency or link");
  if (full.n != reduced.n || full.n_events != reduced.n_events) throw DomainError("fits use different samples");
  const std::set<std::string> names(full.covariate_names.begin(), full.covariate_names.end());
  for (const auto& c : reduced.covariate_names) {
    if (!names.count(c)) throw DomainError("covariate '" + c + "' of the reduced model is not in the full model");
  }
  const int df = static_cast<int>(full.n_parameters()) - static_cast<int>(reduced.n_parameters());
  if (df <= 0) throw DomainError("the reduced model must have fewer parameters");
  const double stat = std::max(0.0, 2.0 * (full.loglik - reduced.loglik));
  return {stat, df, chi_square_sf(stat, df)};
}

ModelSpec Candidate::spec() const { return {IncidenceModel(incidence, link), make_latency(latency, extra)}; }

std::vector<Candidate> builtin_grid(std::string_view name) {
  if (name != "paper-table8" && name != "standard") throw DomainError("unknown grid '" + std::string(name) + "'");
  std::vector<Candidate> grid;
  for (Incidence inc : {Incidence::Bernoulli, Incidence::Poisson, Incidence::Geometric}) {
    grid.push_back({inc, std::nullopt, "weibull", std::nullopt});
    grid.push_back({inc, std::nullopt, "lognormal", std::nullopt});
    for (double nu : {2.0, 4.0, 6.0, 8.0}) grid.push_back({inc, std::nullopt, "logt", nu});
    for (double alpha : {1.2, 2.0, 2.8, 3.6}) grid.push_back({inc, std::nullopt, "bs", alpha});
  }
  return grid;
}

void rank(std::vector<SelectionRow>& rows, Criterion criterion) {
  auto key = [criterion](const SelectionRow& r) { return criterion == Criterion::Aic ? r.aic : r.bic; };
  std::stable_sort(rows.begin(), rows.end(), [&](const SelectionRow& a, const SelectionRow& b) {
    const double ka = key(a), kb = key(b);
    const bool fa = std::isfinite(ka), fb = std::isfinite(kb);
    if (fa != fb) return fa;
    if (fa && ka != kb) return ka < kb;
    if (a.n_parameters != b.n_parameters) return a.n_parameters < b.n_parameters;
    return a.label < b.label;
  });
}

std::vector<SelectionRow> select(const SurvivalDataset& data, const std::vector<Candidate>& grid, Criterion criterion,
                                 const FitOptions& options, int threads) {
  if (grid.empty()) throw DomainError("empty candidate grid");
  std::vector<SelectionRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    SelectionRow& row = rows[i];
    row.candidate = grid[i];
    row.n_parameters = data.n_coefficients() + 2;
    try {
      const ModelSpec spec = grid[i].spec();
      row.label = spec.label();
      const FitResult f = fit(data, spec, options);
      row.loglik = f.loglik;
      row.aic = f.aic;
      row.bic = f.bic;
      row.converged = f.converged;
    } catch (const std::exception& e) {
      if (row.label.empty()) row.label = std::string(to_string(grid[i].incidence)) + "/" + grid[i].latency;
      row.error = e.what();
    }
  });
  rank(rows, criterion);
  return rows;
}

double cure_fraction_by_profile(const IncidenceModel& incidence, const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& x) {
  if (beta.size() != x.size()) throw DomainError("profile length does not match the number of coefficients");
  return incidence.cure_fraction(incidence.apply_link({beta.data(), static_cast<std::size_t>(beta.size())},
                                                      {x.data(), static_cast<std::size_t>(x.size())}));
}

double cure_fraction_by_profile(const FitResult& fit, const Eigen::VectorXd& x) {
  return cure_fraction_by_profile(fit.model.incidence, fit.estimate.beta, x);
}

std::vector<double> fitted_survival(const FitResult& fit, const Eigen::MatrixXd& design,
                                    const std::vector<double>& times) {
  if (design.cols() != fit.estimate.beta.size()) throw DomainError("design width does not match the fit");
  if (design.rows() == 0) throw DomainError("empty design");
  const CureModel model(fit.model.incidence, fit.model.latency, fit.estimate.eta, fit.estimate.phi);
  const Eigen::VectorXd theta = (design * fit.estimate.beta).unaryExpr([&](double lin) {
    return fit.model.incidence.inverse_link(lin);
  });
  std::vector<double> out;
  out.reserve(times.size());
  std::vector<double> terms(static_cast<std::size_t>(design.rows()));
  for (double t : times) {
    for (Eigen::Index i = 0; i < design.rows(); ++i) terms[static_cast<std::size_t>(i)] = model.survival_p(theta(i), t);
    out.push_back(pairwise_sum(terms) / static_cast<double>(terms.size()));
  }
  return out;
}

}  // namespace lsc
