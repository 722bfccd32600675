#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "logsymcure/cure.hpp"
#include "support.hpp"

using namespace lsc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const IncidenceModel kMixture(Incidence::Bernoulli);
const IncidenceModel kPromotion(Incidence::Poisson);
const IncidenceModel kGeometric(Incidence::Geometric);

std::vector<LatencyFamily> latencies() {
  std::vector<LatencyFamily> out;
  for (const auto& k : test::kernel_representatives()) out.push_back(LatencyFamily::log_symmetric(k));
  out.push_back(LatencyFamily::weibull());
  return out;
}

// int_0^inf fp(t) dt on the log-time scale t = a exp(w).
double total_mass(const CureModel& model, double theta, double a) {
  auto integrand = [&](double w) {
    const double t = a * std::exp(w);
    if (!(t > 0.0) || !std::isfinite(t)) return 0.0;
    return model.subdensity_p(theta, t) * t;
  };
  return test::integrate_half_line(integrand) + test::integrate_half_line([&](double w) { return integrand(-w); });
}

}  // namespace

TEST_CASE("cure fraction by incidence", "[cure]") {
  CHECK_THAT(kPromotion.cure_fraction(std::log(10.0)), WithinAbs(0.1, 1e-15));
  CHECK(kMixture.cure_fraction(0.3) == 0.3);
  CHECK(kGeometric.cure_fraction(0.175) == 0.175);
  CHECK_THROWS_AS(kMixture.cure_fraction(1.2), RangeError);
  CHECK_THROWS_AS(kPromotion.cure_fraction(-0.1), RangeError);
  CHECK_THROWS_AS(kGeometric.cure_fraction(0.0), RangeError);
}

TEST_CASE("links", "[cure]") {
  const std::vector<double> zero{0.0, 0.0};
  const std::vector<double> one{1.0, 0.0};
  CHECK(kMixture.apply_link(zero, one) == 0.5);
  const std::vector<double> b10{0.42, 0.25, 0.24, 0.34};
  const std::vector<double> x0{1.0, 0.0, 0.0, 0.0};
  CHECK_THAT(kPromotion.apply_link(b10, x0), WithinAbs(std::exp(0.42), 1e-15));
  CHECK_THAT(kPromotion.apply_link(b10, x0), WithinAbs(1.522, 1e-3));
  const std::vector<double> leprosy{-1.551, -3.264, 3.063};
  const std::vector<double> pt{1.0, 0.0, 1.0};
  CHECK_THAT(kMixture.apply_link(leprosy, pt), WithinAbs(0.819, 1e-3));
  CHECK(kMixture.inverse_link(800.0) == 1.0 - kThetaClamp);
  CHECK(kMixture.inverse_link(-800.0) == kThetaClamp);
  CHECK(std::isfinite(kPromotion.inverse_link(1e4)));
  CHECK_THROWS_AS(kMixture.apply_link(zero, x0), DomainError);
  CHECK_THROWS_AS(IncidenceModel(Incidence::Bernoulli, Link::Logarithmic), DomainError);
  CHECK_THROWS_AS(IncidenceModel(Incidence::Geometric, Link::Logarithmic), DomainError);
  CHECK_NOTHROW(IncidenceModel(Incidence::Poisson, Link::Logistic));
  CHECK(kPromotion.link() == Link::Logarithmic);
  CHECK_THAT(kMixture.link_derivative(0.3), WithinAbs(0.21, 1e-15));
}

TEST_CASE("population survival at the median", "[cure]") {
  const LogSymmetricDist ln(DensityGenerator(Family::LogNormal), 5.0, 1.0);
  CHECK_THAT(CureModel(kMixture, ln).survival_p(0.3, 5.0), WithinAbs(0.65, 1e-15));
  CHECK_THAT(CureModel(kPromotion, ln).survival_p(std::log(10.0), 5.0), WithinAbs(std::pow(10.0, -0.5), 1e-15));
  CHECK_THAT(CureModel(kGeometric, ln).survival_p(0.5, 5.0), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THROWS_AS(CureModel(kMixture, ln).survival_p(0.3, 0.0), DomainError);
  CHECK_THROWS_AS(CureModel(kMixture, ln).survival_p(1.3, 1.0), RangeError);
}

TEST_CASE("sub-density and sub-hazard", "[cure]") {
  const LogSymmetricDist ln(DensityGenerator(Family::LogNormal), 5.0, 1.0);
  const CureModel mix(kMixture, ln);
  CHECK_THAT(mix.subdensity_p(0.3, 5.0), WithinAbs(0.05585, 1e-5));
  CHECK_THAT(mix.subhazard_p(0.3, 5.0), WithinAbs(0.08592, 1e-5));
  for (double t : {0.1, 5.0, 80.0}) CHECK(mix.subdensity_p(1.0, t) == 0.0);

  for (const auto& lat : latencies()) {
    for (const auto& inc : {kMixture, kPromotion, kGeometric}) {
      const CureModel m(inc, lat, 3.0, 0.8);
      for (double t : {0.5, 3.0, 20.0}) {
        CHECK_THAT(m.subhazard_p(0.4, t) * m.survival_p(0.4, t), WithinRel(m.subdensity_p(0.4, t), 1e-12));
      }
    }
  }
  // Promotion: the exponential factors cancel.
  const DensityGenerator t4(Family::LogTStudent, 4.0);
  const CureModel prom(kPromotion, LogSymmetricDist(t4, 2.0, 0.5));
  for (double t : {0.3, 2.0, 9.0}) {
    const double w = (std::log(t) - std::log(2.0)) / std::sqrt(0.5);
    CHECK_THAT(prom.subhazard_p(1.7, t), WithinRel(1.7 * t4.g(w * w) / (t * std::sqrt(0.5)), 1e-10));
  }
}

TEST_CASE("Weibull latency", "[cure]") {
  const WeibullLatency exp5(1.0, 5.0);
  CHECK_THAT(CureModel(kMixture, exp5).survival_p(0.3, 5.0), WithinAbs(0.3 + 0.7 * std::exp(-1.0), 1e-15));
  CHECK_THAT(CureModel(kMixture, exp5).survival_p(0.3, 5.0), WithinAbs(0.5575, 1e-4));
  const WeibullLatency w(1.7, 2.5);
  for (double t : {0.2, 2.5, 9.0}) {
    CHECK_THAT(CureModel(kMixture, w).survival_p(1e-12, t), WithinAbs(w.survival(t), 1e-11));
    CHECK_THAT(w.quantile(w.cdf(t)), WithinRel(t, 1e-12));
  }
  CHECK_THROWS_AS(WeibullLatency(0.0, 1.0), DomainError);
  CHECK_THAT(total_mass(CureModel(kPromotion, w), 0.9, 2.5), WithinAbs(1.0 - std::exp(-0.9), 1e-8));
}

TEST_CASE("mass balance", "[cure][property]") {
  for (const auto& lat : latencies()) {
    for (const auto& inc : {kMixture, kPromotion, kGeometric}) {
      for (double a : {0.5, 5.0}) {
        for (double b : {0.5, 1.5}) {
          for (double theta : {0.1, 0.6}) {
            const CureModel m(inc, lat, a, b);
            INFO(lat.label() << " " << to_string(inc.family()) << " a=" << a << " b=" << b << " theta=" << theta);
            CHECK_THAT(total_mass(m, theta, a), WithinAbs(1.0 - inc.cure_fraction(theta), 1e-7));
          }
        }
      }
    }
  }
}

TEST_CASE("improper limit", "[cure][property]") {
  for (const auto& lat : latencies()) {
    for (const auto& inc : {kMixture, kPromotion, kGeometric}) {
      const double eta = 4.0, phi = 0.9, theta = 0.35;
      const CureModel m(inc, lat, eta, phi);
      // Far enough out that the latency survival is negligible; the polynomial
      // tails of log-t need the point from the quantile rather than a fixed z~.
      double far = eta * std::exp(40.0 * std::sqrt(phi));
      if (!lat.is_weibull() && lat.kernel().family() == Family::LogTStudent) {
        far = eta * std::exp(std::sqrt(phi) * -lat.kernel().quantile0(1e-13));
      }
      INFO(lat.label() << " " << to_string(inc.family()));
      CHECK_THAT(m.survival_p(theta, far), WithinAbs(inc.cure_fraction(theta), 1e-10));
      CHECK_THAT(m.survival_p(theta, 1e-300), WithinAbs(1.0, 1e-10));
    }
  }
}

TEST_CASE("sub-density is minus the derivative of Sp", "[cure][property]") {
  for (const auto& lat : latencies()) {
    for (const auto& inc : {kMixture, kPromotion, kGeometric}) {
      const double eta = 3.0;
      const CureModel m(inc, lat, eta, 0.7);
      for (double t : {eta / 4.0, eta, 4.0 * eta}) {
        const double h = 1e-5 * t;
        const double fd = -(m.survival_p(0.4, t + h) - m.survival_p(0.4, t - h)) / (2.0 * h);
        INFO(lat.label() << " " << to_string(inc.family()) << " t=" << t);
        CHECK_THAT(fd, WithinRel(m.subdensity_p(0.4, t), 1e-6));
      }
    }
  }
}

TEST_CASE("Sp strictly decreasing on a log grid", "[cure][property]") {
  for (const auto& lat : latencies()) {
    for (const auto& inc : {kMixture, kPromotion, kGeometric}) {
      const CureModel m(inc, lat, 2.0, 0.6);
      double prev = 1.0;
      bool decreasing = true;
      for (int i = 0; i < 1000; ++i) {
        const double t = 2.0 * std::exp(-3.0 + 6.0 * i / 999.0);
        const double s = m.survival_p(0.3, t);
        // Strictness is only representable while both latency tails are above rounding.
        decreasing = decreasing && (lat.survival(t, 2.0, 0.6) > 1e-12 && lat.cdf(t, 2.0, 0.6) > 1e-12 ? s < prev : s <= prev);
        prev = s;
      }
      INFO(lat.label() << " " << to_string(inc.family()));
      CHECK(decreasing);
    }
  }
}

TEST_CASE("mixture nests the proper latency", "[cure][property]") {
  for (const auto& lat : latencies()) {
    const CureModel m(kMixture, lat, 2.0, 0.6);
    double sup = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double t = 2.0 * std::exp(-4.0 + 8.0 * i / 199.0);
      sup = std::max(sup, std::fabs(m.survival_p(1e-9, t) - lat.survival(t, 2.0, 0.6)));
    }
    CHECK(sup < 1e-6);
  }
}
