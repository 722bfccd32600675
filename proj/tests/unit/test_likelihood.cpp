#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "logsymcure/likelihood.hpp"
#include "logsymcure/rng.hpp"
#include "support.hpp"

using namespace lsc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SurvivalDataset random_dataset(std::uint64_t seed, std::size_t n) {
  Rng rng = make_rng(seed, 0);
  std::lognormal_distribution<double> times(1.0, 1.0);
  std::bernoulli_distribution event(0.6);
  std::uniform_real_distribution<double> unif;
  std::vector<double> t(n);
  std::vector<int> d(n);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = times(rng);
    d[i] = event(rng) ? 1 : 0;
    x(static_cast<Eigen::Index>(i), 0) = unif(rng);
    x(static_cast<Eigen::Index>(i), 1) = unif(rng) < 0.5 ? 1.0 : 0.0;
  }
  return SurvivalDataset(t, d, x, {"x1", "x2"});
}

ParamVector random_point(Rng& rng, bool is_weibull) {
  std::uniform_real_distribution<double> b(-1.0, 1.0), e(0.5, 5.0), p(0.3, 2.0);
  ParamVector l;
  l.beta = Eigen::Vector3d(b(rng), b(rng), b(rng));
  l.eta = e(rng);
  l.phi = is_weibull ? p(rng) + 0.3 : p(rng);
  return l;
}

std::vector<ModelSpec> all_models() {
  std::vector<LatencyFamily> lat;
  for (const auto& k : test::kernel_representatives()) lat.push_back(LatencyFamily::log_symmetric(k));
  lat.push_back(LatencyFamily::weibull());
  std::vector<ModelSpec> out;
  for (const auto& l : lat) {
    out.push_back({IncidenceModel(Incidence::Bernoulli), l});
    out.push_back({IncidenceModel(Incidence::Poisson), l});
    out.push_back({IncidenceModel(Incidence::Poisson, Link::Logistic), l});
    out.push_back({IncidenceModel(Incidence::Geometric), l});
  }
  return out;
}

const LatencyFamily kLogNormal = LatencyFamily::log_symmetric(DensityGenerator(Family::LogNormal));

}  // namespace

TEST_CASE("dataset validation", "[likelihood]") {
  CHECK_THROWS_AS(SurvivalDataset({1.0, 2.0}, {1}), DataError);
  CHECK_THROWS_AS(SurvivalDataset({1.0, 0.0}, {1, 0}), DataError);
  CHECK_THROWS_AS(SurvivalDataset({1.0, -3.0}, {1, 0}), DataError);
  CHECK_THROWS_AS(SurvivalDataset({1.0, 2.0}, {1, 2}), DataError);
  CHECK_THROWS_AS(SurvivalDataset({1.0, std::nan("")}, {1, 0}), DataError);
  Eigen::MatrixXd dup(3, 2);
  dup << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(SurvivalDataset({1.0, 2.0, 3.0}, {1, 0, 1}, dup, {"a", "b"}), DataError);
  Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(3, 1);
  CHECK_THROWS_AS(SurvivalDataset({1.0, 2.0, 3.0}, {1, 0, 1}, constant, {"a"}), DataError);
  const SurvivalDataset ok({1.0, 2.0, 3.0}, {1, 0, 1});
  CHECK(ok.n_events() == 2);
  CHECK(ok.n_coefficients() == 1);
  CHECK(ok.design().col(0).isOnes());
}

TEST_CASE("log-likelihood by hand", "[likelihood]") {
  const double y = 2.7;
  const ModelSpec mix{IncidenceModel(Incidence::Bernoulli), kLogNormal};
  ParamVector l{Eigen::VectorXd::Zero(1), y, 1.0};
  CHECK_THAT(loglik(mix, SurvivalDataset({y}, {1}), l),
             WithinAbs(std::log(0.5 / std::sqrt(2.0 * std::numbers::pi) / y), 1e-14));

  // Promotion, one event and one censored observation.
  const ModelSpec prom{IncidenceModel(Incidence::Poisson), kLogNormal};
  ParamVector p{Eigen::VectorXd::Constant(1, 0.3), 4.0, 0.8};
  const double theta = std::exp(0.3);
  auto log_fp = [&](double t) {
    const double w = (std::log(t) - std::log(4.0)) / std::sqrt(0.8);
    return std::log(theta) - 0.5 * w * w - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(t * std::sqrt(0.8)) -
           theta * 0.5 * std::erfc(-w / std::sqrt(2.0));
  };
  auto log_sp = [&](double t) {
    const double w = (std::log(t) - std::log(4.0)) / std::sqrt(0.8);
    return -theta * 0.5 * std::erfc(-w / std::sqrt(2.0));
  };
  CHECK_THAT(loglik(prom, SurvivalDataset({1.5, 6.0}, {1, 0}), p), WithinAbs(log_fp(1.5) + log_sp(6.0), 1e-12));
}

TEST_CASE("mixture with vanishing cure fraction is the ordinary censored likelihood", "[likelihood]") {
  // The gap is O(n theta); n = 20 keeps it well under the tolerance.
  const auto data = random_dataset(3, 20);
  const DensityGenerator t4(Family::LogTStudent, 4.0);
  const ModelSpec mix{IncidenceModel(Incidence::Bernoulli), LatencyFamily::log_symmetric(t4)};
  ParamVector l{Eigen::Vector3d(std::log(1e-10 / (1 - 1e-10)), 0.0, 0.0), 2.0, 0.7};
  const LogSymmetricDist dist(t4, 2.0, 0.7);
  double expected = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double t = data.time()[i];
    expected += data.status()[i] ? dist.log_density(t) : std::log(dist.survival(t));
  }
  CHECK_THAT(loglik(mix, data, l), WithinAbs(expected, 1e-8));
}

TEST_CASE("log-likelihood sentinel", "[likelihood]") {
  const ModelSpec mix{IncidenceModel(Incidence::Bernoulli), kLogNormal};
  const auto data = random_dataset(5, 20);
  ParamVector l{Eigen::Vector3d::Zero(), 1.0, 1.0};
  l.phi = 0.0;
  CHECK(loglik(mix, data, l) == std::numeric_limits<double>::lowest());
  for (double phi : {1e-6, 1e-200}) {
    l.phi = phi;
    CHECK(!std::isnan(loglik(mix, data, l)));
  }
  l.phi = 1.0;
  l.eta = std::numeric_limits<double>::infinity();
  CHECK(loglik(mix, data, l) == std::numeric_limits<double>::lowest());
}

TEST_CASE("analytic score matches the numerical gradient", "[likelihood][property]") {
  for (const auto& model : all_models()) {
    Rng rng = make_rng(11, std::hash<std::string>{}(model.label()));
    for (int point = 0; point < 5; ++point) {
      const auto data = random_dataset(100 + static_cast<std::uint64_t>(point), 100);
      const ParamVector l = random_point(rng, model.latency.is_weibull());
      const Eigen::VectorXd analytic = score(model, data, l);
      const Eigen::VectorXd numeric = numeric_score(model, data, l);
      for (Eigen::Index j = 0; j < analytic.size(); ++j) {
        INFO(model.label() << " point " << point << " coordinate " << j);
        CHECK(std::fabs(analytic(j) - numeric(j)) <= std::max(1e-5 * std::fabs(numeric(j)), 1e-7));
      }
    }
  }
}

TEST_CASE("mixture intercept score with all events", "[likelihood]") {
  const ModelSpec mix{IncidenceModel(Incidence::Bernoulli), kLogNormal};
  const SurvivalDataset data({0.5, 1.0, 4.0}, {1, 1, 1});
  ParamVector l{Eigen::VectorXd::Constant(1, 0.4), 1.3, 0.9};
  const double theta = 1.0 / (1.0 + std::exp(-0.4));
  CHECK_THAT(score(mix, data, l)(0), WithinAbs(-3.0 * theta, 1e-14));
}

// Score blocks written term by term, in the form they are usually quoted, to
// pin down two known misprints: the mixture U_phi lacks -sum(delta)/(2 phi) and
// the promotion U_eta carries the wrong sign on its second sum.
TEST_CASE("hand-written score blocks", "[likelihood][diagnostic]") {
  const auto data = random_dataset(21, 80);
  const DensityGenerator k(Family::BirnbaumSaunders, 1.5);
  const ParamVector l{Eigen::Vector3d(0.2, -0.4, 0.3), 2.2, 0.8};
  const Eigen::VectorXd lin = data.design() * l.beta;
  const double sp = std::sqrt(l.phi);

  struct Blocks {
    double u_eta = 0.0, u_phi = 0.0, dg_eta = 0.0, dg_phi = 0.0, n_events = 0.0;
  };
  auto accumulate = [&](Incidence inc) {
    Blocks b;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double w = (std::log(data.time()[i]) - std::log(l.eta)) / sp;
      const double d = data.status()[i];
      const double gp = k.log_g_prime(w * w);
      b.dg_eta += d * gp * (-2.0 * w / (l.eta * sp));
      b.dg_phi += d * gp * (-w * w / l.phi);
      b.n_events += d;
      const double f0 = k.pdf0(w), F0 = k.cdf0(w);
      const double lp = lin(static_cast<Eigen::Index>(i));
      if (inc == Incidence::Poisson) {
        const double th = std::exp(lp);
        b.u_eta += th * f0;
        b.u_phi += th * f0 * w;
      } else {
        const double th = 1.0 / (1.0 + std::exp(-lp));
        const double den = inc == Incidence::Bernoulli ? th + (1 - th) * (1 - F0) : th + (1 - th) * F0;
        const double mult = inc == Incidence::Bernoulli ? (1 - d) : (1 + d);
        b.u_eta += mult * (1 - th) * f0 / den;
        b.u_phi += mult * (1 - th) * f0 * w / den;
      }
    }
    return b;
  };
  const auto p = static_cast<Eigen::Index>(l.beta.size());
  const LatencyFamily lat = LatencyFamily::log_symmetric(k);

  const ModelSpec mix{IncidenceModel(Incidence::Bernoulli), lat};
  const Eigen::VectorXd mix_fd = numeric_score(mix, data, l);
  const Blocks m = accumulate(Incidence::Bernoulli);
  CHECK_THAT(m.dg_eta + m.u_eta / (l.eta * sp), WithinRel(mix_fd(p), 1e-6));
  const double mix_phi_printed = m.dg_phi + m.u_phi / (2 * l.phi);
  const double mix_phi_fixed = mix_phi_printed - m.n_events / (2 * l.phi);
  CHECK_THAT(mix_phi_fixed, WithinRel(mix_fd(p + 1), 1e-6));
  CHECK(std::fabs(mix_phi_printed - mix_fd(p + 1)) > 1.0);

  const ModelSpec prom{IncidenceModel(Incidence::Poisson), lat};
  const Eigen::VectorXd prom_fd = numeric_score(prom, data, l);
  const Blocks q = accumulate(Incidence::Poisson);
  const double prom_eta_printed = q.dg_eta - q.u_eta / (l.eta * sp);
  const double prom_eta_fixed = q.dg_eta + q.u_eta / (l.eta * sp);
  CHECK_THAT(prom_eta_fixed, WithinRel(prom_fd(p), 1e-6));
  CHECK(std::fabs(prom_eta_printed - prom_fd(p)) > 1.0);
  CHECK_THAT(q.dg_phi - q.n_events / (2 * l.phi) + q.u_phi / (2 * l.phi), WithinRel(prom_fd(p + 1), 1e-6));

  const ModelSpec geo{IncidenceModel(Incidence::Geometric), lat};
  const Eigen::VectorXd geo_fd = numeric_score(geo, data, l);
  const Blocks g = accumulate(Incidence::Geometric);
  CHECK_THAT(g.dg_eta + g.u_eta / (l.eta * sp), WithinRel(geo_fd(p), 1e-6));
  CHECK_THAT(g.dg_phi - g.n_events / (2 * l.phi) + g.u_phi / (2 * l.phi), WithinRel(geo_fd(p + 1), 1e-6));
}

TEST_CASE("observed information", "[likelihood]") {
  Eigen::Matrix3d a;
  a << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  const auto info = information_from_gradient([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -a * x; },
                                              Eigen::Vector3d(0.3, -1.0, 2.0));
  CHECK((info.matrix - Eigen::MatrixXd(a)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(info.positive_definite);

  const auto data = random_dataset(8, 50);
  const ModelSpec mix{IncidenceModel(Incidence::Bernoulli), kLogNormal};
  const ParamVector l{Eigen::Vector3d(0.1, 0.2, -0.3), 2.0, 1.0};
  const auto obs = observed_information(mix, data, l);
  CHECK(obs.matrix.rows() == 5);
  CHECK((obs.matrix - obs.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
}
