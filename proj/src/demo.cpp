#include "logsymcure/demo.hpp"

namespace lsc {
namespace {

constexpr double kLevelShare[] = {0.4, 0.2, 0.4};
constexpr double kTotalCensoring = 0.44;

}  // namespace

SimConfig demo_config(std::uint64_t seed) {
  SimConfig c;
  c.n = kDemoSize;
  c.incidence = IncidenceModel(Incidence::Bernoulli);
  c.latency = LatencyFamily::log_symmetric(DensityGenerator(Family::LogTStudent, 8.0));
  c.eta = 8.787;
  c.phi = 1.862;
  c.beta = Eigen::Vector4d(-1.551, 0.0, -3.264, 3.063);
  c.covariates = parse_design("gender=bernoulli(0.5);lc=categorical(0.4,0.2,0.4)");
  c.seed = seed;
  // cp_total = cp (1 - cf) + cf, with cf the level-weighted cure fraction.
  double cf = 0.0;
  for (int level = 0; level < 3; ++level) {
    const double lin = c.beta(0) + (level == 1 ? c.beta(2) : 0.0) + (level == 2 ? c.beta(3) : 0.0);
    cf += kLevelShare[level] * c.incidence.inverse_link(lin);
  }
  c.target_cp = (kTotalCensoring - cf) / (1.0 - cf);
  return c;
}

CsvTable demo_table(std::uint64_t seed) {
  const SimConfig config = demo_config(seed);
  Rng rng = make_rng(seed, 1);
  const SimulatedData sim = generate_dataset(config, calibrate_censoring(config), rng);
  const auto& x = sim.data.design();
  CsvTable t;
  t.columns = {"time", "status", "gender", "LC", "lc_mv", "lc_pt"};
  t.values.resize(t.columns.size());
  for (std::size_t i = 0; i < sim.data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    t.values[0].push_back(sim.data.time()[i]);
    t.values[1].push_back(sim.data.status()[i]);
    t.values[2].push_back(x(r, 1));
    t.values[3].push_back(x(r, 2) + 2.0 * x(r, 3));
    t.values[4].push_back(x(r, 2));
    t.values[5].push_back(x(r, 3));
  }
  return t;
}

}  // namespace lsc
