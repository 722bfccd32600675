#include "logsymcure/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "logsymcure/nonparam.hpp"
#include "logsymcure/numeric.hpp"
#include "logsymcure/rng.hpp"

namespace lsc {
namespace {

// Minimization form: f = -objective. Infeasible points map to +inf.
struct Problem {
  const Objective& objective;
  const Gradient& gradient;
  int evaluations = 0;

  double value(const Eigen::VectorXd& x) {
    ++evaluations;
    double v;
    try {
      v = objective(x);
    } catch (const std::exception&) {
      return kInf;
    }
    if (!std::isfinite(v) || v == std::numeric_limits<double>::lowest()) return kInf;
    return -v;
  }

  bool grad(const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    try {
      out = -gradient(x);
    } catch (const std::exception&) {
      return false;
    }
    return out.allFinite();
  }
};

struct LinePoint {
  double alpha = 0.0;
  double f = kInf;
  double slope = kNaN;
  Eigen::VectorXd g;
};

struct LineSearchResult {
  bool ok = false;
  LinePoint point;
};

double cubic_minimizer(const LinePoint& a, const LinePoint& b) {
  // Minimizer of the cubic interpolating f and slope at both ends.
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (!(disc >= 0.0)) return kNaN;
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  return b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
}

class WolfeSearch {
 public:
  WolfeSearch(Problem& problem, const Eigen::VectorXd& x, double f0, const Eigen::VectorXd& g0,
              const Eigen::VectorXd& direction, const OptimConfig& config)
      : problem_(problem), x_(x), p_(direction), config_(config) {
    origin_.alpha = 0.0;
    origin_.f = f0;
    origin_.g = g0;
    origin_.slope = g0.dot(direction);
  }

  LineSearchResult run(double alpha0) {
    LinePoint prev = origin_;
    double alpha = alpha0;
    for (int i = 0; i < 40; ++i) {
      LinePoint cur = probe(alpha);
      if (!armijo(cur) || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur);
      if (!with_slope(cur)) return zoom(prev, cur);
      if (curvature(cur)) return {true, cur};
      if (cur.slope >= 0.0) return zoom(cur, prev);
      best_ = cur;
      prev = cur;
      alpha *= 2.0;
    }
    return fallback();
  }

 private:
  LinePoint probe(double alpha) {
    LinePoint pt;
    pt.alpha = alpha;
    pt.f = problem_.value(x_ + alpha * p_);
    return pt;
  }

  bool with_slope(LinePoint& pt) {
    if (!std::isfinite(pt.f)) return false;
    if (!problem_.grad(x_ + pt.alpha * p_, pt.g)) return false;
    pt.slope = pt.g.dot(p_);
    return true;
  }

  bool armijo(const LinePoint& pt) const {
    return std::isfinite(pt.f) && pt.f <= origin_.f + config_.wolfe_c1 * pt.alpha * origin_.slope;
  }

  bool curvature(const LinePoint& pt) const {
    return std::fabs(pt.slope) <= -config_.wolfe_c2 * origin_.slope;
  }

  LineSearchResult zoom(LinePoint lo, LinePoint hi) {
    for (int j = 0; j < 60; ++j) {
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      const double width = right - left;
      if (width <= 1e-16 * std::max(1.0, right)) break;
      double trial = kNaN;
      if (std::isfinite(lo.f) && std::isfinite(hi.f) && std::isfinite(lo.slope) && std::isfinite(hi.slope)) {
        trial = cubic_minimizer(lo, hi);
      }
      if (!std::isfinite(trial) || trial < left + 0.1 * width || trial > right - 0.1 * width) {
        trial = 0.5 * (left + right);
      }
      LinePoint cur = probe(trial);
      if (!armijo(cur) || cur.f >= lo.f) {
        hi = cur;
        hi.slope = kNaN;
        if (std::isfinite(cur.f) && with_slope(cur)) hi = cur;
        continue;
      }
      if (!with_slope(cur)) {
        hi = cur;
        continue;
      }
      if (curvature(cur)) return {true, cur};
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = cur;
      if (lo.f < best_.f) best_ = lo;
    }
    return fallback();
  }

  // Sufficient decrease without the curvature condition is still progress.
  LineSearchResult fallback() const {
    if (best_.alpha > 0.0 && best_.f < origin_.f) return {true, best_};
    return {false, origin_};
  }

  Problem& problem_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  const OptimConfig& config_;
  LinePoint origin_;
  LinePoint best_;
};

}  // namespace

OptimResult maximize(const Objective& objective, const Gradient& gradient, const Eigen::VectorXd& start,
                     const OptimConfig& config) {
  Problem problem{objective, gradient};
  OptimResult result;
  result.x = start;
  const auto dim = start.size();

  double f = problem.value(start);
  Eigen::VectorXd g;
  if (!std::isfinite(f) || !problem.grad(start, g)) {
    result.value = std::numeric_limits<double>::lowest();
    result.gradient_norm = kInf;
    result.message = "objective or gradient not finite at start";
    result.evaluations = problem.evaluations;
    return result;
  }

  Eigen::VectorXd x = start;
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
  bool fresh_hessian = true;
  result.message = "iteration limit reached";
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance) {
      result.converged = true;
      result.message = "gradient tolerance reached";
      break;
    }
    Eigen::VectorXd p = -h_inv * g;
    if (!(p.dot(g) < 0.0)) {
      h_inv.setIdentity();
      fresh_hessian = true;
      p = -g;
    }
    const double alpha0 = std::min(1.0, config.max_step / p.lpNorm<Eigen::Infinity>());
    WolfeSearch search(problem, x, f, g, p, config);
    LineSearchResult ls = search.run(alpha0);
    if (!ls.ok) {
      if (!fresh_hessian) {
        h_inv.setIdentity();
        fresh_hessian = true;
        continue;
      }
      result.message = "line search failed";
      break;
    }
    LinePoint& pt = ls.point;
    if (pt.g.size() != dim && !problem.grad(x + pt.alpha * p, pt.g)) {
      result.message = "gradient not finite after step";
      break;
    }
    const Eigen::VectorXd s = pt.alpha * p;
    const Eigen::VectorXd y = pt.g - g;
    x += s;
    f = pt.f;
    g = pt.g;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) {
        h_inv *= sy / y.squaredNorm();
        fresh_hessian = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(dim, dim) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }
    if (s.lpNorm<Eigen::Infinity>() <= config.step_tolerance * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      result.converged = g.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance;
      result.message = result.converged ? "gradient tolerance reached" : "step tolerance reached";
      ++iter;
      break;
    }
  }
  result.x = x;
  result.value = -f;
  result.iterations = iter;
  result.gradient_norm = g.lpNorm<Eigen::Infinity>();
  result.evaluations = problem.evaluations;
  return result;
}

Eigen::VectorXd to_unconstrained(const ParamVector& lambda) {
  if (!(lambda.eta > 0.0) || !(lambda.phi > 0.0)) throw DomainError("eta and phi must be positive");
  Eigen::VectorXd v = lambda.flatten();
  v(v.size() - 2) = std::log(lambda.eta);
  v(v.size() - 1) = std::log(lambda.phi);
  return v;
}

ParamVector from_unconstrained(const Eigen::VectorXd& v) {
  ParamVector p = ParamVector::unflatten(v);
  p.eta = std::exp(p.eta);
  p.phi = std::exp(p.phi);
  return p;
}

Eigen::VectorXd unconstrained_gradient(const Eigen::VectorXd& natural_score, const ParamVector& lambda) {
  Eigen::VectorXd g = natural_score;
  g(g.size() - 2) *= lambda.eta;
  g(g.size() - 1) *= lambda.phi;
  return g;
}

double intercept_for_cure_fraction(const IncidenceModel& incidence, double cure_fraction) {
  const double cf = std::clamp(cure_fraction, 0.01, 0.99);
  auto logit = [](double p) { return std::log(p / (1.0 - p)); };
  if (incidence.family() != Incidence::Poisson) return logit(cf);
  const double theta = -std::log(cf);
  if (incidence.link() == Link::Logarithmic) return std::log(theta);
  return logit(std::clamp(theta, 0.01, 0.99));
}

std::vector<ParamVector> default_starts(const SurvivalDataset& data, const ModelSpec& model, int n_starts,
                                        std::uint64_t seed) {
  if (n_starts < 1) throw DomainError("n_starts must be at least 1");
  std::vector<double> event_times;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.status()[i] == 1) event_times.push_back(data.time()[i]);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };

  ParamVector base;
  base.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.n_coefficients()));
  if (event_times.empty()) {
    base.eta = data.size() ? median(data.time()) : 1.0;
    base.phi = 1.0;
  } else {
    base.eta = median(event_times);
    double log_var = 0.0;
    if (event_times.size() >= 2) {
      double mean = 0.0;
      for (double t : event_times) mean += std::log(t);
      mean /= static_cast<double>(event_times.size());
      for (double t : event_times) log_var += (std::log(t) - mean) * (std::log(t) - mean);
      log_var /= static_cast<double>(event_times.size() - 1);
    }
    if (model.latency.is_weibull()) {
      // Gumbel scale: sd(log T) = pi / (sqrt(6) * shape).
      base.phi = log_var > 0.0 ? 3.14159265358979 / std::sqrt(6.0 * log_var) : 1.0;
    } else {
      base.phi = log_var > 0.0 ? log_var : 1.0;
    }
    const KaplanMeier km = kaplan_meier(data);
    base.beta(0) = intercept_for_cure_fraction(model.incidence, km.plateau());
  }

  std::vector<ParamVector> starts{base};
  for (int s = 1; s < n_starts; ++s) {
    Rng rng = make_rng(seed, 0x5157ULL + static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    // Relative perturbations with a unit floor so zero entries still move.
    auto perturb = [&](double v) { return v + jitter(rng) * std::max(std::fabs(v), 1.0); };
    ParamVector p = base;
    p.eta = std::exp(perturb(std::log(base.eta)));
    p.phi = std::exp(perturb(std::log(base.phi)));
    p.beta(0) = perturb(base.beta(0));
    starts.push_back(std::move(p));
  }
  return starts;
}

}  // namespace lsc
