#include "logsymcure/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "logsymcure/parallel.hpp"

namespace lsc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DomainError("bad number '" + std::string(s) + "'");
  return v;
}

std::vector<double> parse_arguments(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_number(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

constexpr std::uint64_t kPilotStream = 0xC0FFEE5EEDULL;
constexpr std::size_t kPilotSize = 20000;

struct Subject {
  double theta;
  int m;
  double event_time;
};

void draw_covariates(const std::vector<CovariateSpec>& specs, Rng& rng, Eigen::Ref<Eigen::VectorXd> row) {
  Eigen::Index col = 0;
  for (const auto& c : specs) {
    switch (c.kind) {
      case CovariateSpec::Kind::Uniform:
        row(col++) = c.a + (c.b - c.a) * uniform_open(rng);
        break;
      case CovariateSpec::Kind::Bernoulli:
        row(col++) = uniform_open(rng) < c.a ? 1.0 : 0.0;
        break;
      case CovariateSpec::Kind::Normal:
        row(col++) = std::normal_distribution<double>(c.a, c.b)(rng);
        break;
      case CovariateSpec::Kind::Categorical: {
        const double u = uniform_open(rng);
        std::size_t level = 0;
        double cum = c.probabilities[0];
        while (level + 1 < c.probabilities.size() && u > cum) cum += c.probabilities[++level];
        for (std::size_t l = 1; l < c.probabilities.size(); ++l) row(col++) = level == l ? 1.0 : 0.0;
        break;
      }
    }
  }
}

Subject draw_subject(const SimConfig& config, double linear, Rng& rng) {
  Subject s{config.incidence.inverse_link(linear), 0, kInf};
  switch (config.incidence.family()) {
    case Incidence::Bernoulli:
      s.m = uniform_open(rng) < s.theta ? 0 : 1;
      break;
    case Incidence::Poisson:
      s.m = std::poisson_distribution<int>(s.theta)(rng);
      break;
    case Incidence::Geometric:
      s.m = std::geometric_distribution<int>(s.theta)(rng);
      break;
  }
  for (int j = 0; j < s.m; ++j) s.event_time = std::min(s.event_time, config.latency.sample(rng, config.eta, config.phi));
  return s;
}

}  // namespace

std::vector<std::string> CovariateSpec::column_names() const {
  if (kind != Kind::Categorical) return {name};
  std::vector<std::string> out;
  for (std::size_t l = 1; l < probabilities.size(); ++l) out.push_back(name + "_" + std::to_string(l));
  return out;
}

std::vector<CovariateSpec> parse_design(std::string_view text) {
  std::vector<CovariateSpec> out;
  text = trim(text);
  if (text.empty() || text == "none") return out;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const std::string_view item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw DomainError("covariate '" + std::string(item) + "' lacks '=kind'");
    CovariateSpec c;
    c.name = std::string(trim(item.substr(0, eq)));
    std::string_view kind = trim(item.substr(eq + 1));
    std::vector<double> args;
    if (const auto open = kind.find('('); open != std::string_view::npos) {
      if (kind.back() != ')') throw DomainError("unbalanced parentheses in '" + std::string(item) + "'");
      args = parse_arguments(kind.substr(open + 1, kind.size() - open - 2));
      kind = trim(kind.substr(0, open));
    }
    if (c.name.empty()) throw DomainError("empty covariate name");
    if (kind == "uniform") {
      c.kind = CovariateSpec::Kind::Uniform;
      if (args.size() == 2) {
        c.a = args[0];
        c.b = args[1];
      } else if (!args.empty()) {
        throw DomainError("uniform takes no or two arguments");
      }
      if (!(c.b > c.a)) throw DomainError("uniform requires a < b");
    } else if (kind == "bernoulli") {
      c.kind = CovariateSpec::Kind::Bernoulli;
      c.a = args.empty() ? 0.5 : args[0];
      if (args.size() > 1 || !(c.a > 0.0 && c.a < 1.0)) throw DomainError("bernoulli requires one p in (0, 1)");
    } else if (kind == "normal") {
      c.kind = CovariateSpec::Kind::Normal;
      c.a = args.size() > 0 ? args[0] : 0.0;
      c.b = args.size() > 1 ? args[1] : 1.0;
      if (args.size() > 2 || !(c.b > 0.0)) throw DomainError("normal requires mean and positive sd");
    } else if (kind == "categorical") {
      c.kind = CovariateSpec::Kind::Categorical;
      c.probabilities = args;
      const double total = std::accumulate(args.begin(), args.end(), 0.0);
      if (args.size() < 2 || std::fabs(total - 1.0) > 1e-9 ||
          std::any_of(args.begin(), args.end(), [](double p) { return !(p > 0.0); })) {
        throw DomainError("categorical requires at least two positive probabilities summing to 1");
      }
    } else {
      throw DomainError("unknown covariate kind '" + std::string(kind) + "'");
    }
    out.push_back(std::move(c));
  }
  return out;
}

Eigen::VectorXd reference_beta(int cure_percent) {
  if (cure_percent == 10) return Eigen::Vector4d(0.42, 0.25, 0.24, 0.34);
  if (cure_percent == 30) return Eigen::Vector4d(0.10, 0.05, 0.07, 0.03);
  throw DomainError("reference coefficients exist for cure fractions of 10 and 30 percent only");
}

void SimConfig::validate() const {
  if (n < 1) throw DomainError("n must be at least 1");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  if (!(eta > 0.0) || !(phi > 0.0)) throw DomainError("eta and phi must be positive");
  std::size_t cols = 1;
  for (const auto& c : covariates) cols += c.n_columns();
  if (static_cast<std::size_t>(beta.size()) != cols) {
    throw DomainError("beta has " + std::to_string(beta.size()) + " entries but the design has " +
                      std::to_string(cols) + " columns");
  }
  if (!(target_cp > 0.005 && target_cp < 1.0)) throw DomainError("target censoring must lie in (0.005, 1)");
}

SimulatedData generate_dataset(const SimConfig& config, double censor_bound, Rng& rng) {
  config.validate();
  if (!(censor_bound > 0.0)) throw DomainError("censoring bound must be positive");
  const auto n = config.n;
  const auto p = static_cast<Eigen::Index>(config.beta.size()) - 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
  std::vector<double> y(n);
  std::vector<int> delta(n);
  SimulatedData out{SurvivalDataset(), std::vector<int>(n), std::vector<bool>(n), std::vector<double>(n),
                    std::vector<double>(n)};
  Eigen::VectorXd row(p);
  for (std::size_t i = 0; i < n; ++i) {
    draw_covariates(config.covariates, rng, row);
    x.row(static_cast<Eigen::Index>(i)) = row.transpose();
    const double linear = config.beta(0) + row.dot(config.beta.tail(p));
    const Subject s = draw_subject(config, linear, rng);
    const double c = censor_bound * uniform_open(rng);
    out.m[i] = s.m;
    out.cured[i] = s.m == 0;
    out.event_time[i] = s.event_time;
    out.theta[i] = s.theta;
    delta[i] = s.event_time <= c ? 1 : 0;
    y[i] = delta[i] ? s.event_time : c;
  }
  std::vector<std::string> names;
  for (const auto& c : config.covariates) {
    const auto cols = c.column_names();
    names.insert(names.end(), cols.begin(), cols.end());
  }
  out.data = SurvivalDataset(std::move(y), std::move(delta), x, std::move(names));
  return out;
}

double calibrate_censoring(const SimConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, kPilotStream);
  const auto p = static_cast<Eigen::Index>(config.beta.size()) - 1;
  Eigen::VectorXd row(p);
  std::vector<double> times;
  times.reserve(kPilotSize);
  std::size_t draws = 0;
  while (times.size() < kPilotSize) {
    if (++draws > 1000 * kPilotSize) throw DomainError("too few susceptible subjects to calibrate censoring");
    draw_covariates(config.covariates, rng, row);
    const Subject s = draw_subject(config, config.beta(0) + row.dot(config.beta.tail(p)), rng);
    if (s.m > 0) times.push_back(s.event_time);
  }
  // With C ~ U[0, u], P(C < T | T) = min(T / u, 1): smooth and decreasing in u.
  auto censored = [&](double u) {
    std::vector<double> terms(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) terms[i] = std::min(times[i] / u, 1.0);
    return pairwise_sum(terms) / static_cast<double>(times.size());
  };
  double hi = 1e6 * config.eta;
  if (censored(hi) > config.target_cp + 0.005) throw DomainError("censoring target unreachable for u <= 1e6 eta");
  double lo = *std::min_element(times.begin(), times.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double cp = censored(mid);
    if (std::fabs(cp - config.target_cp) < 1e-6) return mid;
    (cp > config.target_cp ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

Estimator mle_estimator(const SimConfig& config, const FitOptions& options) {
  const ModelSpec model = config.model();
  return [model, options](const SimulatedData& sim, std::uint64_t replicate_seed) {
    FitOptions local = options;
    local.optim.seed = replicate_seed;
    const FitResult f = fit(sim.data, model, local);
    return EstimatorOutcome{f.estimate, f.se, f.converged};
  };
}

SimSummary summarize(const SimConfig& config, const std::vector<ReplicateRecord>& records, double censor_bound) {
  SimSummary s;
  s.n = config.n;
  s.replicates = static_cast<int>(records.size());
  s.censor_bound = censor_bound;
  const Eigen::VectorXd truth = config.truth().flatten();
  const auto k = truth.size();
  std::vector<std::vector<double>> est(static_cast<std::size_t>(k));
  std::vector<double> cf, cp, cpt;
  for (const auto& r : records) {
    cf.push_back(r.cured_fraction);
    cpt.push_back(r.censored_fraction);
    cp.push_back(r.susceptible_censored_fraction);
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    for (Eigen::Index j = 0; j < k; ++j) est[static_cast<std::size_t>(j)].push_back(r.estimate(j));
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? kNaN : pairwise_sum(v) / static_cast<double>(v.size());
  };
  s.realized_cf = mean(cf);
  s.realized_cp = mean(cp);
  s.realized_cp_total = mean(cpt);

  const auto [a_name, b_name] = config.latency.parameter_names();
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& v = est[static_cast<std::size_t>(j)];
    ParameterSummary ps;
    ps.name = j < k - 2 ? "beta" + std::to_string(j) : (j == k - 2 ? a_name : b_name);
    ps.truth = truth(j);
    ps.mean = mean(v);
    ps.relative_bias = (ps.mean - ps.truth) / ps.truth;
    std::vector<double> sq(v.size()), dev(v.size());
    for (std::size_t r = 0; r < v.size(); ++r) {
      const double rel = (v[r] - ps.truth) / ps.truth;
      sq[r] = rel * rel;
      dev[r] = (v[r] - ps.mean) * (v[r] - ps.mean);
    }
    ps.root_relative_mse = std::sqrt(mean(sq));
    ps.se = v.size() < 2 ? 0.0 : std::sqrt(pairwise_sum(dev) / static_cast<double>(v.size() - 1));
    s.parameters.push_back(ps);
  }
  return s;
}

StudyResult run_study(const SimConfig& config, const Estimator& estimator, int threads,
                      std::optional<double> censor_bound) {
  config.validate();
  const double u = censor_bound ? *censor_bound : calibrate_censoring(config);
  std::vector<ReplicateRecord> records(static_cast<std::size_t>(config.replicates));
  parallel_for(records.size(), threads, [&](std::size_t r) {
    ReplicateRecord& rec = records[r];
    rec.replicate = static_cast<int>(r);
    Rng rng = make_rng(config.seed, r);
    const SimulatedData sim = generate_dataset(config, u, rng);
    std::size_t cured = 0, censored = 0, susceptible_censored = 0;
    for (std::size_t i = 0; i < sim.data.size(); ++i) {
      cured += sim.cured[i];
      censored += sim.data.status()[i] == 0;
      susceptible_censored += !sim.cured[i] && sim.data.status()[i] == 0;
    }
    const double n = static_cast<double>(sim.data.size());
    rec.cured_fraction = static_cast<double>(cured) / n;
    rec.censored_fraction = static_cast<double>(censored) / n;
    rec.susceptible_censored_fraction =
        cured == sim.data.size() ? kNaN : static_cast<double>(susceptible_censored) / (n - static_cast<double>(cured));
    try {
      const EstimatorOutcome out = estimator(sim, derive_seed(config.seed, r + (1ULL << 40)));
      rec.estimate = out.estimate.flatten();
      rec.se = out.se;
      rec.ok = out.converged && rec.estimate.allFinite();
      if (!out.converged) rec.error = "not converged";
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });
  StudyResult result{summarize(config, records, u), std::move(records)};
  if (2 * result.summary.failures > result.summary.replicates) {
    throw FitError(std::to_string(result.summary.failures) + " of " + std::to_string(result.summary.replicates) +
                   " replicates failed");
  }
  return result;
}

}  // namespace lsc
