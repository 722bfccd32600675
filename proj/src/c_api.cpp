#include "logsymcure/logsymcure.h"

#include <cstring>
#include <map>
#include <sstream>
#include <string>

#include "logsymcure/demo.hpp"
#include "logsymcure/io.hpp"
#include "logsymcure/report.hpp"

struct lsc_table {
  lsc::CsvTable table;
};

struct lsc_fit {
  lsc::FitResult fit;
};

namespace {

thread_local std::string g_last_error;

lsc_status fail(lsc_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Maps library exceptions onto status codes.
template <class F>
lsc_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return LSC_OK;
  } catch (const lsc::DataError& e) {
    return fail(LSC_ERROR_INPUT, e.what());
  } catch (const lsc::FitError& e) {
    return fail(LSC_ERROR_FIT, e.what());
  } catch (const lsc::DomainError& e) {
    return fail(LSC_ERROR_ARGUMENT, e.what());
  } catch (const lsc::RangeError& e) {
    return fail(LSC_ERROR_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LSC_ERROR_ARGUMENT, std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(LSC_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(LSC_ERROR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw lsc::DomainError(std::string(what) + " must not be NULL");
}

std::optional<std::vector<std::string>> covariate_selection(const char* covariates) {
  if (!covariates) return std::nullopt;
  return lsc::parse_covariate_list(covariates);
}

lsc::FitOptions fit_options(const lsc_fit_options* options) {
  lsc::FitOptions out;
  if (!options) return out;
  if (options->max_iterations < 1 || !(options->gradient_tolerance > 0.0) || !(options->step_tolerance > 0.0) ||
      options->n_starts < 1) {
    throw lsc::DomainError("iteration limit, tolerances and starts must be positive");
  }
  out.optim.max_iterations = options->max_iterations;
  out.optim.gradient_tolerance = options->gradient_tolerance;
  out.optim.step_tolerance = options->step_tolerance;
  out.optim.n_starts = options->n_starts;
  out.optim.seed = options->seed;
  out.threads = options->threads;
  return out;
}

lsc::ModelSpec model_spec(const lsc_model* model) {
  require(model, "model");
  require(model->incidence, "model->incidence");
  require(model->latency, "model->latency");
  const auto inc = lsc::parse_incidence(model->incidence);
  if (!inc) throw lsc::DomainError(std::string("unknown incidence '") + model->incidence + "'");
  std::optional<lsc::Link> link;
  if (model->link) {
    link = lsc::parse_link(model->link);
    if (!link) throw lsc::DomainError(std::string("unknown link '") + model->link + "'");
  }
  std::optional<double> extra;
  if (model->has_extra) extra = model->extra;
  return {lsc::IncidenceModel(*inc, link), lsc::make_latency(model->latency, extra)};
}

lsc::Json candidate_json(const lsc::Candidate& c) {
  lsc::Json j;
  j["incidence"] = lsc::to_string(c.incidence);
  j["link"] = lsc::to_string(c.link.value_or(lsc::default_link(c.incidence)));
  j["latency"] = c.latency;
  j["extra"] = c.extra ? lsc::Json(*c.extra) : lsc::Json(nullptr);
  return j;
}

lsc::Candidate candidate_from_json(const lsc::Json& j) {
  lsc::Candidate c;
  const auto inc = lsc::parse_incidence(j.at("incidence").get<std::string>());
  if (!inc) throw lsc::DomainError("unknown incidence in grid");
  c.incidence = *inc;
  if (j.contains("link") && !j.at("link").is_null()) {
    c.link = lsc::parse_link(j.at("link").get<std::string>());
    if (!c.link) throw lsc::DomainError("unknown link in grid");
  }
  c.latency = j.at("latency").get<std::string>();
  if (j.contains("extra") && !j.at("extra").is_null()) c.extra = j.at("extra").get<double>();
  c.spec();  // validates names and the extra parameter
  return c;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

extern "C" {

const char* lsc_version(void) { return "0.1.0"; }

const char* lsc_last_error(void) { return g_last_error.c_str(); }

void lsc_string_free(char* s) { std::free(s); }

void lsc_fit_options_init(lsc_fit_options* options) {
  if (!options) return;
  const lsc::OptimConfig d;
  options->max_iterations = d.max_iterations;
  options->gradient_tolerance = d.gradient_tolerance;
  options->step_tolerance = d.step_tolerance;
  options->n_starts = d.n_starts;
  options->seed = d.seed;
  options->threads = 1;
}

lsc_status lsc_table_read_csv(const char* path, lsc_table** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new lsc_table{lsc::read_csv_file(path)};
  });
}

lsc_status lsc_table_parse_csv(const char* text, lsc_table** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    std::istringstream in(text);
    *out = new lsc_table{lsc::read_csv(in)};
  });
}

lsc_status lsc_table_demo(uint64_t seed, lsc_table** out) {
  return guard([&] {
    require(out, "out");
    *out = new lsc_table{lsc::demo_table(seed)};
  });
}

lsc_status lsc_table_write_csv(const lsc_table* table, const char* path, const char* comment) {
  return guard([&] {
    require(table, "table");
    require(path, "path");
    std::vector<std::string> lines;
    if (comment) {
      std::istringstream in(comment);
      for (std::string line; std::getline(in, line);) lines.push_back(line);
    }
    lsc::write_csv_file(path, table->table, lines);
  });
}

size_t lsc_table_rows(const lsc_table* table) { return table ? table->table.rows() : 0; }

lsc_status lsc_table_describe(const lsc_table* table, char** json) {
  return guard([&] {
    require(table, "table");
    require(json, "json");
    const auto data = lsc::to_dataset(table->table, std::vector<std::string>{});
    lsc::Json j;
    j["columns"] = table->table.columns;
    j["n"] = data.size();
    j["events"] = data.n_events();
    j["censored_fraction"] =
        1.0 - static_cast<double>(data.n_events()) / static_cast<double>(data.size());
    *json = duplicate(j.dump());
  });
}

void lsc_table_free(lsc_table* table) { delete table; }

lsc_status lsc_fit_model(const lsc_table* table, const char* covariates, const lsc_model* model,
                         const lsc_fit_options* options, lsc_fit** out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    const auto data = lsc::to_dataset(table->table, covariate_selection(covariates));
    *out = new lsc_fit{lsc::fit(data, model_spec(model), fit_options(options))};
  });
}

lsc_status lsc_fit_to_json(const lsc_fit* fit, char** json) {
  return guard([&] {
    require(fit, "fit");
    require(json, "json");
    *json = duplicate(lsc::to_json(fit->fit).dump());
  });
}

lsc_status lsc_fit_from_json(const char* json, lsc_fit** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    lsc::Json j;
    try {
      j = lsc::Json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw lsc::DataError(std::string("fit report is not valid JSON: ") + e.what());
    }
    if (j.contains("fit")) j = j.at("fit");
    *out = new lsc_fit{lsc::fit_from_json(j)};
  });
}

lsc_status lsc_fit_loglik(const lsc_fit* fit, double* out) {
  return guard([&] {
    require(fit, "fit");
    require(out, "out");
    *out = fit->fit.loglik;
  });
}

lsc_status lsc_fit_cure_fraction(const lsc_fit* fit, const double* x, size_t length, double* out) {
  return guard([&] {
    require(fit, "fit");
    require(x, "x");
    require(out, "out");
    *out = lsc::cure_fraction_by_profile(fit->fit, Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(length)));
  });
}

lsc_status lsc_lr_test(const lsc_fit* full, const lsc_fit* reduced, double* statistic, int* df, double* p_value) {
  return guard([&] {
    require(full, "full");
    require(reduced, "reduced");
    const lsc::LrTest t = lsc::lr_test(full->fit, reduced->fit);
    if (statistic) *statistic = t.statistic;
    if (df) *df = t.df;
    if (p_value) *p_value = t.p_value;
  });
}

void lsc_fit_free(lsc_fit* fit) { delete fit; }

lsc_status lsc_cure_profiles(const lsc_table* table, const lsc_fit* fit, char** json) {
  return guard([&] {
    require(table, "table");
    require(fit, "fit");
    require(json, "json");
    const auto& t = table->table;
    const auto& names = fit->fit.covariate_names;
    std::vector<const std::vector<double>*> cols;
    for (const auto& name : names) {
      if (!t.find(name)) throw lsc::DataError("fit uses covariate '" + name + "' which the data lacks");
      cols.push_back(&t.column(name));
    }
    lsc::Json arr = lsc::Json::array();
    std::map<std::vector<double>, std::size_t> profiles;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      std::vector<double> key;
      for (const auto* c : cols) {
        const double v = (*c)[i];
        if (v != 0.0 && v != 1.0) {
          *json = duplicate(arr.dump());
          return;
        }
        key.push_back(v);
      }
      ++profiles[key];
    }
    for (const auto& [key, size] : profiles) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(key.size() + 1));
      x(0) = 1.0;
      for (std::size_t j = 0; j < key.size(); ++j) x(static_cast<Eigen::Index>(j + 1)) = key[j];
      lsc::Json profile = lsc::Json::object();
      for (std::size_t j = 0; j < key.size(); ++j) profile[names[j]] = static_cast<int>(key[j]);
      arr.push_back({{"profile", profile}, {"size", size}, {"cure_fraction", lsc::cure_fraction_by_profile(fit->fit, x)}});
    }
    *json = duplicate(arr.dump());
  });
}

lsc_status lsc_grid_builtin(const char* name, char** json) {
  return guard([&] {
    require(name, "name");
    require(json, "json");
    lsc::Json arr = lsc::Json::array();
    for (const auto& c : lsc::builtin_grid(name)) arr.push_back(candidate_json(c));
    *json = duplicate(arr.dump());
  });
}

lsc_status lsc_grid_parse(const char* text, char** json) {
  return guard([&] {
    require(text, "text");
    require(json, "json");
    lsc::Json arr = lsc::Json::array();
    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      std::vector<std::string> fields;
      std::istringstream ls(line);
      for (std::string f; std::getline(ls, f, ',');) fields.push_back(trim(f));
      if (fields.size() < 2 || fields.size() > 3) {
        throw lsc::DataError("grid line " + std::to_string(line_no) + ": expected incidence,latency[,extra]");
      }
      lsc::Json c{{"incidence", fields[0]}, {"latency", fields[1]}, {"extra", nullptr}};
      if (fields.size() == 3 && !fields[2].empty()) {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(fields[2], &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != fields[2].size()) throw lsc::DataError("grid line " + std::to_string(line_no) + ": bad extra");
        c["extra"] = v;
      }
      try {
        arr.push_back(candidate_json(candidate_from_json(c)));
      } catch (const lsc::DomainError& e) {
        throw lsc::DataError("grid line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (arr.empty()) throw lsc::DataError("grid has no candidates");
    *json = duplicate(arr.dump());
  });
}

lsc_status lsc_select(const lsc_table* table, const char* covariates, const char* grid_json, const char* criterion,
                      const lsc_fit_options* options, char** json) {
  return guard([&] {
    require(table, "table");
    require(grid_json, "grid_json");
    require(json, "json");
    const std::string crit = criterion ? criterion : "aic";
    if (crit != "aic" && crit != "bic") throw lsc::DomainError("criterion must be aic or bic");
    std::vector<lsc::Candidate> grid;
    for (const auto& c : lsc::Json::parse(grid_json)) grid.push_back(candidate_from_json(c));
    const auto data = lsc::to_dataset(table->table, covariate_selection(covariates));
    lsc::FitOptions fo = fit_options(options);
    const int threads = fo.threads;
    fo.threads = 1;
    const auto rows = lsc::select(data, grid, crit == "aic" ? lsc::Criterion::Aic : lsc::Criterion::Bic, fo, threads);
    *json = duplicate(lsc::to_json(rows).dump());
  });
}

lsc_status lsc_km(const lsc_table* table, const char* by, const lsc_fit* overlay, char** json) {
  return guard([&] {
    require(table, "table");
    require(json, "json");
    const auto& t = table->table;
    const auto data = lsc::to_dataset(t, std::vector<std::string>{});
    Eigen::MatrixXd design;
    if (overlay) {
      for (const auto& name : overlay->fit.covariate_names) {
        if (!t.find(name)) throw lsc::DataError("overlay fit uses covariate '" + name + "' which the data lacks");
      }
      design.resize(static_cast<Eigen::Index>(t.rows()),
                    static_cast<Eigen::Index>(overlay->fit.covariate_names.size() + 1));
      design.col(0).setOnes();
      for (std::size_t j = 0; j < overlay->fit.covariate_names.size(); ++j) {
        const auto& col = t.column(overlay->fit.covariate_names[j]);
        design.col(static_cast<Eigen::Index>(j + 1)) =
            Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
      }
    }
    std::vector<lsc::GroupedCurve> curves;
    std::vector<double> group(t.rows(), 0.0);
    if (by) {
      if (!t.find(by)) throw lsc::DataError(std::string("no column named '") + by + "'");
      group = t.column(by);
    }
    curves = lsc::kaplan_meier_by(data.time(), data.status(), group);

    lsc::Json out;
    out["by"] = by ? lsc::Json(by) : lsc::Json(nullptr);
    out["n"] = data.size();
    out["plateau"] = lsc::kaplan_meier(data).plateau();
    lsc::Json arr = lsc::Json::array();
    for (const auto& g : curves) {
      lsc::Json c = lsc::to_json(g.curve);
      c["level"] = by ? lsc::Json(g.level) : lsc::Json(nullptr);
      c["size"] = g.size;
      if (overlay) {
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < group.size(); ++i) {
          if (group[i] == g.level) rows.push_back(static_cast<Eigen::Index>(i));
        }
        c["fitted"] = lsc::fitted_survival(overlay->fit, design(rows, Eigen::all), g.curve.time);
      }
      arr.push_back(c);
    }
    out["curves"] = arr;
    *json = duplicate(out.dump());
  });
}

lsc_status lsc_simulate(const char* config_json, int threads, char** json) {
  return guard([&] {
    require(config_json, "config_json");
    require(json, "json");
    const lsc::Json j = lsc::Json::parse(config_json);
    lsc::SimConfig c;
    c.n = j.value("n", std::size_t{100});
    const auto inc = lsc::parse_incidence(j.value("incidence", std::string("poisson")));
    if (!inc) throw lsc::DomainError("unknown incidence");
    std::optional<lsc::Link> link;
    if (j.contains("link") && !j.at("link").is_null()) {
      link = lsc::parse_link(j.at("link").get<std::string>());
      if (!link) throw lsc::DomainError("unknown link");
    }
    c.incidence = lsc::IncidenceModel(*inc, link);
    std::optional<double> extra;
    if (j.contains("extra") && !j.at("extra").is_null()) extra = j.at("extra").get<double>();
    c.latency = lsc::make_latency(j.value("latency", std::string("lognormal")), extra);
    c.eta = j.value("eta", 5.0);
    c.phi = j.value("phi", 1.0);
    if (j.contains("beta") && !j.at("beta").is_null()) {
      const auto beta = j.at("beta").get<std::vector<double>>();
      c.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    } else {
      c.beta = lsc::reference_beta(j.at("cf").get<int>());
    }
    c.target_cp = j.at("cp").get<double>();
    c.replicates = j.value("replicates", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.covariates = lsc::parse_design(j.value("design", std::string(lsc::kDefaultDesign)));
    c.validate();

    lsc::FitOptions fo;
    fo.optim.n_starts = j.value("n_starts", fo.optim.n_starts);
    if (fo.optim.n_starts < 1) throw lsc::DomainError("n_starts must be positive");
    const auto study = lsc::run_study(c, lsc::mle_estimator(c, fo), threads);

    lsc::Json out;
    out["censor_bound"] = study.summary.censor_bound;
    out["summary"] = lsc::to_json(study.summary);
    lsc::Json records = lsc::Json::array();
    for (const auto& r : study.records) {
      lsc::Json rec;
      rec["replicate"] = r.replicate;
      rec["ok"] = r.ok;
      std::vector<lsc::Json> est, se;
      for (Eigen::Index k = 0; k < r.estimate.size(); ++k) {
        est.push_back(std::isfinite(r.estimate(k)) ? lsc::Json(r.estimate(k)) : lsc::Json(nullptr));
      }
      for (Eigen::Index k = 0; k < r.se.size(); ++k) {
        se.push_back(std::isfinite(r.se(k)) ? lsc::Json(r.se(k)) : lsc::Json(nullptr));
      }
      rec["estimate"] = est;
      rec["se"] = se;
      rec["cured_fraction"] = r.cured_fraction;
      rec["censored_fraction"] = r.censored_fraction;
      rec["error"] = r.error.empty() ? lsc::Json(nullptr) : lsc::Json(r.error);
      records.push_back(rec);
    }
    out["records"] = records;
    *json = duplicate(out.dump());
  });
}

}  // extern "C"
