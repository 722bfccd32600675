#include <charconv>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "common.hpp"

namespace cli {
namespace {

std::string shortest(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell(const Json& v) {
  if (v.is_null()) return "NA";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return shortest(v.get<double>());
}

std::string level_label(const Json& level) {
  if (level.is_null()) return "(all)";
  const double v = level.get<double>();
  return v == std::floor(v) ? std::to_string(static_cast<long long>(v)) : shortest(v);
}

Json run_select(const Table& table, const std::string& grid, const std::string& criterion, const char* covariates,
                const Common& common) {
  std::string grid_json;
  if (std::filesystem::is_regular_file(grid)) {
    char* out = nullptr;
    check(lsc_grid_parse(read_text(grid).c_str(), &out));
    grid_json = take(out);
  } else {
    char* out = nullptr;
    check(lsc_grid_builtin(grid.c_str(), &out));
    grid_json = take(out);
  }
  const lsc_fit_options options = fit_options(common);
  char* out = nullptr;
  check(lsc_select(table.handle, covariates, grid_json.c_str(), criterion.c_str(), &options, &out));
  return take_json(out);
}

Json fit_json(const Fit& fit) {
  char* out = nullptr;
  check(lsc_fit_to_json(fit.handle, &out));
  return take_json(out);
}

Json profiles_json(const Table& table, const Fit& fit) {
  char* out = nullptr;
  check(lsc_cure_profiles(table.handle, fit.handle, &out));
  return take_json(out);
}

Json describe(const Table& table) {
  char* out = nullptr;
  check(lsc_table_describe(table.handle, &out));
  return take_json(out);
}

Json km_json(const Table& table, const std::optional<std::string>& by, const Fit* overlay) {
  char* out = nullptr;
  check(lsc_km(table.handle, by ? by->c_str() : nullptr, overlay ? overlay->handle : nullptr, &out));
  return take_json(out);
}

std::string km_csv(const Json& km) {
  const bool overlay = !km["curves"].empty() && km["curves"][0].contains("fitted");
  std::ostringstream out;
  out << "group,time,survival,n_risk,n_event" << (overlay ? ",fitted" : "") << "\n";
  for (const auto& c : km["curves"]) {
    const std::string group = c["level"].is_null() ? "all" : level_label(c["level"]);
    for (std::size_t i = 0; i < c["time"].size(); ++i) {
      out << group << "," << cell(c["time"][i]) << "," << cell(c["survival"][i]) << "," << cell(c["n_risk"][i]) << ","
          << cell(c["n_event"][i]);
      if (overlay) out << "," << cell(c["fitted"][i]);
      out << "\n";
    }
  }
  return out.str();
}

void print_km(const Json& km) {
  std::cout << "overall plateau: " << fixed(km["plateau"], 4) << "\n\n";
  std::cout << pad("group", 8, true) << pad("size", 6) << pad("events", 8) << pad("plateau", 10);
  const bool overlay = !km["curves"].empty() && km["curves"][0].contains("fitted");
  if (overlay) std::cout << pad("fitted@end", 12);
  std::cout << "\n";
  for (const auto& c : km["curves"]) {
    long events = 0;
    for (const auto& e : c["n_event"]) events += e.get<long>();
    std::cout << pad(level_label(c["level"]), 8, true) << pad(std::to_string(c["size"].get<long>()), 6)
              << pad(std::to_string(events), 8) << pad(fixed(c["plateau"], 4), 10);
    if (overlay) std::cout << pad(c["fitted"].empty() ? "-" : fixed(c["fitted"].back(), 4), 12);
    std::cout << "\n";
  }
}

}  // namespace

int cmd_fit(const std::string& input, const FitArgs& args, const Common& common) {
  Report report("fit", common);
  report.config()["input"] = input;
  report.config()["model"] = model_echo(args);
  report.config()["starts"] = common.starts;

  Table table;
  read_table(input, table);
  const lsc_model model = make_model(args);
  const lsc_fit_options options = fit_options(common);
  Fit fit;
  check(lsc_fit_model(table.handle, args.covariates ? args.covariates->c_str() : nullptr, &model, &options,
                      &fit.handle));
  const Json fj = fit_json(fit);
  const Json profiles = profiles_json(table, fit);
  report.body()["data"] = describe(table);
  report.body()["fit"] = fj;
  report.body()["cure_profiles"] = profiles;
  report.finish(common.report);

  print_fit(fj);
  print_profiles(profiles);
  if (!fj["converged"].get<bool>()) {
    std::cerr << "error: optimizer did not converge (gradient norm " << fixed(fj["gradient_norm"], 6) << ")\n";
    return kFitError;
  }
  return kOk;
}

int cmd_select(const std::string& input, const std::string& grid, const std::string& criterion,
               const std::optional<std::string>& covariates, const Common& common) {
  Report report("select", common);
  report.config()["input"] = input;
  report.config()["grid"] = grid;
  report.config()["criterion"] = criterion;
  report.config()["covariates"] = covariates ? Json(*covariates) : Json(nullptr);
  report.config()["starts"] = common.starts;

  Table table;
  read_table(input, table);
  const Json rows = run_select(table, grid, criterion, covariates ? covariates->c_str() : nullptr, common);
  report.body()["data"] = describe(table);
  report.body()["candidates"] = rows;
  report.finish(common.report);
  print_selection(rows, criterion);
  return kOk;
}

int cmd_simulate(const SimArgs& args, const Common& common) {
  Json config;
  config["n"] = args.n;
  config["incidence"] = args.incidence;
  config["link"] = args.link ? Json(*args.link) : Json(nullptr);
  config["latency"] = args.latency;
  config["extra"] = args.extra ? Json(*args.extra) : Json(nullptr);
  config["eta"] = args.eta;
  config["phi"] = args.phi;
  if (args.beta) {
    std::vector<double> beta;
    std::istringstream in(*args.beta);
    for (std::string item; std::getline(in, item, ',');) {
      double v = 0.0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
        throw Error(kInputError, "--beta: '" + item + "' is not a number");
      }
      beta.push_back(v);
    }
    config["beta"] = beta;
    config["cf"] = args.cf ? Json(*args.cf) : Json(nullptr);
  } else {
    const int cf = args.cf.value_or(10);
    if (cf != 10 && cf != 30) throw Error(kInputError, "--cf must be 10 or 30 unless --beta is given");
    config["beta"] = nullptr;
    config["cf"] = cf;
  }
  if (!(args.cp > 0.0 && args.cp < 100.0)) throw Error(kInputError, "--cp must be a percentage in (0, 100)");
  config["cp"] = args.cp / 100.0;
  config["replicates"] = args.replicates;
  config["seed"] = common.seed;
  config["design"] = args.design ? *args.design : std::string("x1=uniform;x2=bernoulli(0.5);x3=uniform");
  config["n_starts"] = common.starts;

  Report report("simulate", common);
  report.config() = config;
  char* out = nullptr;
  check(lsc_simulate(config.dump().c_str(), common.threads, &out));
  const Json result = take_json(out);
  const Json& s = result["summary"];
  report.body()["summary"] = s;
  report.body()["records"] = result["records"];
  report.finish(common.report);

  if (!args.archive.empty()) {
    std::ostringstream csv;
    csv << "replicate,ok";
    for (const auto& p : s["parameters"]) csv << "," << p["name"].get<std::string>();
    csv << ",cured_fraction,censored_fraction\n";
    for (const auto& r : result["records"]) {
      csv << r["replicate"].dump() << "," << (r["ok"].get<bool>() ? 1 : 0);
      for (std::size_t k = 0; k < s["parameters"].size(); ++k) {
        csv << "," << (k < r["estimate"].size() ? cell(r["estimate"][k]) : std::string("NA"));
      }
      csv << "," << cell(r["cured_fraction"]) << "," << cell(r["censored_fraction"]) << "\n";
    }
    write_text(args.archive, csv.str());
  }

  std::cout << "n = " << s["n"].get<long>() << ", replicates = " << s["replicates"].get<long>()
            << ", failures = " << s["failures"].get<long>() << "\n";
  std::cout << "realized cure " << fixed(Json(100.0 * s["realized_cf"].get<double>()), 1) << "%, censoring among susceptibles "
            << fixed(Json(100.0 * s["realized_cp"].get<double>()), 1) << "%, overall censoring "
            << fixed(Json(100.0 * s["realized_cp_total"].get<double>()), 1) << "%\n\n";
  std::cout << pad("parameter", 12, true) << pad("truth", 9) << pad("mean", 9) << pad("RB", 9) << pad("sqrtRMSE", 10)
            << pad("se", 9) << "\n";
  for (const auto& p : s["parameters"]) {
    std::cout << pad(p["name"].get<std::string>(), 12, true) << pad(fixed(p["truth"], 3), 9)
              << pad(fixed(p["mean"], 3), 9) << pad(fixed(p["rb"], 3), 9) << pad(fixed(p["root_rmse"], 3), 10)
              << pad(fixed(p["se"], 3), 9) << "\n";
  }
  return kOk;
}

int cmd_km(const std::string& input, const std::optional<std::string>& by, const std::optional<std::string>& overlay,
           const std::string& csv, const Common& common) {
  Report report("km", common);
  report.config()["input"] = input;
  report.config()["by"] = by ? Json(*by) : Json(nullptr);
  report.config()["overlay"] = overlay ? Json(*overlay) : Json(nullptr);

  Table table;
  read_table(input, table);
  Fit fit;
  if (overlay) check(lsc_fit_from_json(read_text(*overlay).c_str(), &fit.handle));
  const Json km = km_json(table, by, overlay ? &fit : nullptr);
  report.body()["km"] = km;
  report.finish(common.report);
  if (!csv.empty()) write_text(csv, km_csv(km));
  print_km(km);
  return kOk;
}

int cmd_demo(const std::string& out_dir, const Common& common) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(kInputError, "cannot create '" + out_dir + "': " + ec.message());
  const fs::path dir(out_dir);
  Report report("demo", common);
  report.config()["starts"] = common.starts;

  Table table;
  check(lsc_table_demo(common.seed, &table.handle));
  const std::string comment = "synthetic cohort, not patient data; generated by lscure demo --seed " +
                              std::to_string(common.seed);
  check(lsc_table_write_csv(table.handle, (dir / "demo.csv").string().c_str(), comment.c_str()));
  const Json data = describe(table);
  report.body()["synthetic"] = true;
  report.body()["data"] = data;
  std::cout << "synthetic cohort: " << data["n"].get<long>() << " records, censored "
            << fixed(Json(100.0 * data["censored_fraction"].get<double>()), 1) << "%\n\n";

  // Latency and incidence choice without covariates.
  const Json rows = run_select(table, "paper-table8", "aic", "none", common);
  report.body()["selection"] = rows;
  print_selection(rows, "aic");

  const Json& best = rows.at(0);
  if (!best["error"].is_null()) throw Error(kFitError, "no candidate could be fitted");
  FitArgs args;
  args.incidence = best["incidence"].get<std::string>();
  args.latency = best["latency"].get<std::string>();
  args.link = best["link"].get<std::string>();
  if (!best["extra"].is_null()) args.extra = best["extra"].get<double>();
  const lsc_model model = make_model(args);
  const lsc_fit_options options = fit_options(common);

  Fit reduced, full;
  check(lsc_fit_model(table.handle, "none", &model, &options, &reduced.handle));
  check(lsc_fit_model(table.handle, "lc_mv,lc_pt", &model, &options, &full.handle));
  double stat = 0.0, p = 0.0;
  int df = 0;
  check(lsc_lr_test(full.handle, reduced.handle, &stat, &df, &p));
  const Json fj = fit_json(full);
  const Json profiles = profiles_json(table, full);
  report.body()["fit"] = fj;
  report.body()["lr_test"] = {{"covariates", "lc_mv,lc_pt"}, {"statistic", stat}, {"df", df}, {"p_value", p}};
  report.body()["cure_profiles"] = profiles;

  std::cout << "\n";
  print_fit(fj);
  std::cout << "\nlikelihood ratio for LC: " << fixed(Json(stat), 3) << " on " << df << " df, p = " << fixed(Json(p), 4)
            << "\n";
  print_profiles(profiles);

  Report fit_report("fit", common);
  fit_report.config()["input"] = "demo.csv";
  fit_report.config()["model"] = model_echo(args);
  fit_report.config()["model"]["covariates"] = "lc_mv,lc_pt";
  fit_report.config()["starts"] = common.starts;
  fit_report.body()["data"] = data;
  fit_report.body()["fit"] = fj;
  fit_report.body()["cure_profiles"] = profiles;
  fit_report.finish((dir / "fit.json").string());

  const Json km = km_json(table, std::string("LC"), &full);
  report.body()["km"] = km;
  write_text((dir / "km.csv").string(), km_csv(km));
  std::cout << "\n";
  print_km(km);

  report.finish((dir / "demo.json").string());
  if (!common.report.empty()) report.finish(common.report);
  return fj["converged"].get<bool>() ? kOk : kFitError;
}

}  // namespace cli
