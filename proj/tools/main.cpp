#include <iostream>

#include <CLI11.hpp>

#include "common.hpp"

namespace {

void add_common(CLI::App* cmd, cli::Common& common, bool fitting) {
  cmd->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--report", common.report, "Write the JSON run report to this path");
  cmd->add_flag("--timing", common.timing, "Record wall-clock time in the report");
  if (fitting) {
    cmd->add_option("--starts", common.starts, "Optimizer starting points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
}

void add_model(CLI::App* cmd, cli::FitArgs& args) {
  cmd->add_option("--incidence", args.incidence, "bernoulli, poisson or geometric")
      ->check(CLI::IsMember({"bernoulli", "poisson", "geometric"}))
      ->capture_default_str();
  cmd->add_option("--latency", args.latency, "lognormal, logt, bs, loglog1, loglog2, lpe or weibull")
      ->check(CLI::IsMember({"lognormal", "logt", "bs", "loglog1", "loglog2", "lpe", "weibull"}))
      ->capture_default_str();
  cmd->add_option("--extra", args.extra, "Extra shape parameter (nu, alpha or k)");
  cmd->add_option("--link", args.link, "logistic or log")->check(CLI::IsMember({"logistic", "log"}));
  cmd->add_option("--covariates", args.covariates, "Comma-separated covariate columns or 'none'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-symmetric cure rate models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lsc_version()));

  cli::Common common;
  std::string input;

  cli::FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit one cure model");
  fit->add_option("input", input, "CSV with time, status and covariate columns")->required();
  add_model(fit, fit_args);
  add_common(fit, common, true);

  std::string grid = "paper-table8", criterion = "aic";
  std::optional<std::string> select_covariates;
  auto* select = app.add_subcommand("select", "Rank a grid of models by AIC or BIC");
  select->add_option("input", input, "CSV input")->required();
  select->add_option("--grid", grid, "Built-in grid name or a file of incidence,latency[,extra] lines")
      ->capture_default_str();
  select->add_option("--criterion", criterion, "aic or bic")->check(CLI::IsMember({"aic", "bic"}))->capture_default_str();
  select->add_option("--covariates", select_covariates, "Comma-separated covariate columns or 'none'");
  add_common(select, common, true);

  cli::SimArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the maximum likelihood estimators");
  simulate->add_option("--n", sim.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--cp", sim.cp, "Censoring percentage among susceptibles")->capture_default_str();
  simulate->add_option("--cf", sim.cf, "Reference coefficients for 10 or 30 percent cure");
  simulate->add_option("--beta", sim.beta, "Comma-separated incidence coefficients");
  simulate->add_option("--replicates", sim.replicates, "Replicates")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--incidence", sim.incidence, "bernoulli, poisson or geometric")
      ->check(CLI::IsMember({"bernoulli", "poisson", "geometric"}))
      ->capture_default_str();
  simulate->add_option("--link", sim.link, "logistic or log")->check(CLI::IsMember({"logistic", "log"}));
  simulate->add_option("--latency", sim.latency, "Latency family")
      ->check(CLI::IsMember({"lognormal", "logt", "bs", "loglog1", "loglog2", "lpe", "weibull"}))
      ->capture_default_str();
  simulate->add_option("--extra", sim.extra, "Extra shape parameter");
  simulate->add_option("--eta", sim.eta, "True median")->capture_default_str();
  simulate->add_option("--phi", sim.phi, "True dispersion")->capture_default_str();
  simulate->add_option("--design", sim.design, "Covariate design, e.g. x1=uniform;x2=bernoulli(0.5)");
  simulate->add_option("--archive", sim.archive, "Write per-replicate estimates to this CSV");
  add_common(simulate, common, true);

  std::optional<std::string> by, overlay;
  std::string km_csv;
  auto* km = app.add_subcommand("km", "Kaplan-Meier curves with an optional fitted overlay");
  km->add_option("input", input, "CSV input")->required();
  km->add_option("--by", by, "Group by this column");
  km->add_option("--overlay", overlay, "JSON fit report whose population survival is added");
  km->add_option("--csv", km_csv, "Write the step functions to this CSV");
  add_common(km, common, false);

  std::string out_dir = "demo_out";
  auto* demo = app.add_subcommand("demo", "Synthetic cohort and the full select, fit, km pipeline");
  demo->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  add_common(demo, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }

  try {
    if (*fit) return cli::cmd_fit(input, fit_args, common);
    if (*select) return cli::cmd_select(input, grid, criterion, select_covariates, common);
    if (*simulate) return cli::cmd_simulate(sim, common);
    if (*km) return cli::cmd_km(input, by, overlay, km_csv, common);
    if (*demo) return cli::cmd_demo(out_dir, common);
  } catch (const cli::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kFailure;
  }
  return cli::kFailure;
}
