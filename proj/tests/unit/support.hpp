#pragma once

#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "logsymcure/logsym.hpp"

namespace lsc::test {

/// Every family with the extra-parameter grid used throughout the tests.
inline std::vector<DensityGenerator> kernel_grid() {
  std::vector<DensityGenerator> out{DensityGenerator(Family::LogNormal), DensityGenerator(Family::LogLogisticI),
                                    DensityGenerator(Family::LogLogisticII)};
  for (double nu : {2.0, 3.0, 4.0, 8.0}) out.emplace_back(Family::LogTStudent, nu);
  for (double alpha : {0.5, 1.5, 3.6}) out.emplace_back(Family::BirnbaumSaunders, alpha);
  for (double k : {-0.5, 0.0, 1.0}) out.emplace_back(Family::LogPowerExponential, k);
  return out;
}

/// One representative per family.
inline std::vector<DensityGenerator> kernel_representatives() {
  return {DensityGenerator(Family::LogNormal),          DensityGenerator(Family::LogTStudent, 4.0),
          DensityGenerator(Family::BirnbaumSaunders, 1.5), DensityGenerator(Family::LogLogisticI),
          DensityGenerator(Family::LogLogisticII),      DensityGenerator(Family::LogPowerExponential, 0.5)};
}

/// Integral over [0, inf) by Gauss-Kronrod on [0, split] plus exp-sinh beyond.
template <class F>
double integrate_half_line(F f, double split = 1.0) {
  const double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, split, 15, 1e-14);
  boost::math::quadrature::exp_sinh<double> tail;
  return head + tail.integrate(f, split, std::numeric_limits<double>::infinity(), 1e-14);
}

}  // namespace lsc::test
