#include "logsymcure/report.hpp"

#include <cmath>

namespace lsc {
namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double read_number(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

Json to_json(const ModelSpec& model) {
  Json j;
  j["incidence"] = to_string(model.incidence.family());
  j["link"] = to_string(model.incidence.link());
  j["latency"] = model.latency.name();
  const auto extra = model.latency.extra();
  j["extra"] = extra ? Json(*extra) : Json(nullptr);
  j["label"] = model.label();
  return j;
}

ModelSpec model_from_json(const Json& j) {
  const auto inc = parse_incidence(j.at("incidence").get<std::string>());
  const auto link = parse_link(j.at("link").get<std::string>());
  if (!inc || !link) throw DataError("unknown incidence or link in report");
  std::optional<double> extra;
  if (j.contains("extra") && !j.at("extra").is_null()) extra = j.at("extra").get<double>();
  return {IncidenceModel(*inc, *link), make_latency(j.at("latency").get<std::string>(), extra)};
}

Json to_json(const FitResult& fit) {
  Json j;
  j["model"] = to_json(fit.model);
  j["covariates"] = fit.covariate_names;
  const auto names = fit.parameter_names();
  const Eigen::VectorXd est = fit.estimate.flatten();
  Json params = Json::array();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto idx = static_cast<Eigen::Index>(k);
    params.push_back({{"name", names[k]}, {"estimate", number(est(idx))}, {"se", number(fit.se(idx))}});
  }
  j["parameters"] = params;
  Json vcov = Json::array();
  for (Eigen::Index r = 0; r < fit.vcov.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < fit.vcov.cols(); ++c) row.push_back(number(fit.vcov(r, c)));
    vcov.push_back(row);
  }
  j["vcov"] = vcov;
  j["loglik"] = number(fit.loglik);
  j["aic"] = number(fit.aic);
  j["bic"] = number(fit.bic);
  j["n"] = fit.n;
  j["n_events"] = fit.n_events;
  j["n_parameters"] = fit.n_parameters();
  j["converged"] = fit.converged;
  j["information_pd"] = fit.information_pd;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = number(fit.gradient_norm);
  j["start_index"] = fit.start_index;
  return j;
}

FitResult fit_from_json(const Json& j) {
  try {
    FitResult f{model_from_json(j.at("model")), j.at("covariates").get<std::vector<std::string>>(), {}, {}, {}};
    const Json& params = j.at("parameters");
    const auto k = static_cast<Eigen::Index>(params.size());
    if (k != static_cast<Eigen::Index>(f.covariate_names.size()) + 3) throw DataError("parameter count mismatch");
    Eigen::VectorXd est(k);
    f.se.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      est(i) = read_number(params[static_cast<std::size_t>(i)].at("estimate"));
      f.se(i) = read_number(params[static_cast<std::size_t>(i)].at("se"));
    }
    f.estimate = ParamVector::unflatten(est);
    f.vcov.resize(k, k);
    const Json& vcov = j.at("vcov");
    if (static_cast<Eigen::Index>(vcov.size()) != k) throw DataError("vcov has the wrong shape");
    for (Eigen::Index r = 0; r < k; ++r) {
      const Json& row = vcov[static_cast<std::size_t>(r)];
      if (static_cast<Eigen::Index>(row.size()) != k) throw DataError("vcov has the wrong shape");
      for (Eigen::Index c = 0; c < k; ++c) f.vcov(r, c) = read_number(row[static_cast<std::size_t>(c)]);
    }
    f.loglik = read_number(j.at("loglik"));
    f.aic = read_number(j.at("aic"));
    f.bic = read_number(j.at("bic"));
    f.n = j.at("n").get<std::size_t>();
    f.n_events = j.at("n_events").get<std::size_t>();
    f.converged = j.at("converged").get<bool>();
    f.information_pd = j.at("information_pd").get<bool>();
    f.iterations = j.at("iterations").get<int>();
    f.gradient_norm = read_number(j.at("gradient_norm"));
    f.start_index = j.at("start_index").get<int>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed fit report: ") + e.what());
  } catch (const DomainError& e) {
    throw DataError(std::string("malformed fit report: ") + e.what());
  }
}

Json to_json(const std::vector<SelectionRow>& rows) {
  Json out = Json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    Json j;
    j["rank"] = r + 1;
    j["incidence"] = to_string(row.candidate.incidence);
    j["link"] = to_string(row.candidate.link.value_or(default_link(row.candidate.incidence)));
    j["latency"] = row.candidate.latency;
    j["extra"] = row.candidate.extra ? Json(*row.candidate.extra) : Json(nullptr);
    j["label"] = row.label;
    j["n_parameters"] = row.n_parameters;
    j["loglik"] = number(row.loglik);
    j["aic"] = number(row.aic);
    j["bic"] = number(row.bic);
    j["converged"] = row.converged;
    j["error"] = row.error.empty() ? Json(nullptr) : Json(row.error);
    out.push_back(j);
  }
  return out;
}

Json to_json(const SimSummary& s) {
  Json j;
  j["n"] = s.n;
  j["replicates"] = s.replicates;
  j["failures"] = s.failures;
  j["censor_bound"] = number(s.censor_bound);
  j["realized_cf"] = number(s.realized_cf);
  j["realized_cp"] = number(s.realized_cp);
  j["realized_cp_total"] = number(s.realized_cp_total);
  Json params = Json::array();
  for (const auto& p : s.parameters) {
    params.push_back({{"name", p.name},
                      {"truth", number(p.truth)},
                      {"mean", number(p.mean)},
                      {"rb", number(p.relative_bias)},
                      {"root_rmse", number(p.root_relative_mse)},
                      {"se", number(p.se)}});
  }
  j["parameters"] = params;
  return j;
}

Json to_json(const KaplanMeier& km) {
  Json j;
  j["plateau"] = km.plateau();
  j["time"] = km.time;
  j["survival"] = km.survival;
  j["n_risk"] = km.n_risk;
  j["n_event"] = km.n_event;
  return j;
}

}  // namespace lsc
