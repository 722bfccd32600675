#include "common.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cli {

int exit_code(lsc_status status) {
  switch (status) {
    case LSC_OK: return kOk;
    case LSC_ERROR_ARGUMENT:
    case LSC_ERROR_INPUT: return kInputError;
    case LSC_ERROR_FIT: return kFitError;
    default: return kFailure;
  }
}

void check(lsc_status status) {
  if (status != LSC_OK) throw Error(exit_code(status), lsc_last_error());
}

std::string take(char* s) {
  std::string out(s ? s : "");
  lsc_string_free(s);
  return out;
}

Json take_json(char* s) { return Json::parse(take(s)); }

lsc_fit_options fit_options(const Common& common) {
  lsc_fit_options o;
  lsc_fit_options_init(&o);
  o.n_starts = common.starts;
  o.seed = common.seed;
  o.threads = common.threads;
  return o;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(kInputError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(kInputError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(kInputError, "write to '" + path + "' failed");
}

void read_table(const std::string& path, Table& table) { check(lsc_table_read_csv(path.c_str(), &table.handle)); }

std::string fixed(const Json& v, int digits) {
  if (!v.is_number()) return "-";
  const double x = v.get<double>();
  if (!std::isfinite(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

Report::Report(std::string command, const Common& common)
    : timing_(common.timing), start_(std::chrono::steady_clock::now()) {
  body_["schema_version"] = "1";
  body_["command"] = std::move(command);
  body_["seed"] = common.seed;
  body_["config"] = Json::object();
}

void Report::finish(const std::string& path) {
  if (timing_) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    body_["wall_seconds"] = elapsed.count();
  }
  if (!path.empty()) write_text(path, body_.dump(2) + "\n");
}

lsc_model make_model(const FitArgs& args) {
  lsc_model m{};
  m.incidence = args.incidence.c_str();
  m.latency = args.latency.c_str();
  m.link = args.link ? args.link->c_str() : nullptr;
  m.has_extra = args.extra.has_value();
  m.extra = args.extra.value_or(0.0);
  return m;
}

Json model_echo(const FitArgs& args) {
  Json j;
  j["incidence"] = args.incidence;
  j["latency"] = args.latency;
  j["extra"] = args.extra ? Json(*args.extra) : Json(nullptr);
  j["link"] = args.link ? Json(*args.link) : Json(nullptr);
  j["covariates"] = args.covariates ? Json(*args.covariates) : Json(nullptr);
  return j;
}

void print_fit(const Json& fit) {
  std::cout << "model: " << fit["model"]["label"].get<std::string>() << "\n";
  std::cout << "n = " << fit["n"].get<long>() << ", events = " << fit["n_events"].get<long>()
            << ", converged = " << (fit["converged"].get<bool>() ? "yes" : "no") << "\n\n";
  std::cout << pad("parameter", 16, true) << pad("estimate", 12) << pad("se", 12) << "\n";
  for (const auto& p : fit["parameters"]) {
    std::cout << pad(p["name"].get<std::string>(), 16, true) << pad(fixed(p["estimate"], 4), 12)
              << pad(fixed(p["se"], 4), 12) << "\n";
  }
  std::cout << "\n"
            << pad("loglik", 16, true) << pad(fixed(fit["loglik"], 3), 12) << "\n"
            << pad("AIC", 16, true) << pad(fixed(fit["aic"], 3), 12) << "\n"
            << pad("BIC", 16, true) << pad(fixed(fit["bic"], 3), 12) << "\n";
  if (!fit["information_pd"].get<bool>()) {
    std::cout << "warning: observed information is not positive definite; standard errors unavailable\n";
  }
}

void print_profiles(const Json& profiles) {
  if (profiles.empty()) return;
  std::cout << "\n" << pad("profile", 28, true) << pad("size", 6) << pad("cure %", 10) << "\n";
  for (const auto& p : profiles) {
    std::string label;
    for (const auto& [name, v] : p["profile"].items()) {
      if (!label.empty()) label += ",";
      label += name + "=" + std::to_string(v.get<int>());
    }
    if (label.empty()) label = "(all)";
    std::cout << pad(label, 28, true) << pad(std::to_string(p["size"].get<long>()), 6)
              << pad(fixed(Json(100.0 * p["cure_fraction"].get<double>()), 1), 10) << "\n";
  }
}

void print_selection(const Json& rows, const std::string& criterion) {
  double best_aic = INFINITY, best_bic = INFINITY;
  for (const auto& r : rows) {
    if (r["aic"].is_number()) best_aic = std::min(best_aic, r["aic"].get<double>());
    if (r["bic"].is_number()) best_bic = std::min(best_bic, r["bic"].get<double>());
  }
  std::cout << "ranked by " << criterion << "; * marks the minimum per criterion\n\n";
  std::cout << pad("rank", 5) << "  " << pad("incidence", 10, true) << pad("latency", 10, true) << pad("extra", 7)
            << pad("AIC", 13) << pad("BIC", 13) << "\n";
  for (const auto& r : rows) {
    auto mark = [](const Json& v, double best) {
      return std::string(v.is_number() && v.get<double>() == best ? "*" : " ");
    };
    std::cout << pad(std::to_string(r["rank"].get<int>()), 5) << "  "
              << pad(r["incidence"].get<std::string>(), 10, true) << pad(r["latency"].get<std::string>(), 10, true)
              << pad(r["extra"].is_null() ? "-" : fixed(r["extra"], 1), 7) << pad(fixed(r["aic"], 3), 12)
              << mark(r["aic"], best_aic) << pad(fixed(r["bic"], 3), 12) << mark(r["bic"], best_bic);
    if (!r["error"].is_null()) {
      std::cout << "  (" << r["error"].get<std::string>() << ")";
    } else if (!r["converged"].get<bool>()) {
      std::cout << "  (not converged)";
    }
    std::cout << "\n";
  }
}

}  // namespace cli
