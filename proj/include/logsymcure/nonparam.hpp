#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "logsymcure/likelihood.hpp"

namespace lsc {

/// Product-limit curve evaluated at the distinct event times.
struct KaplanMeier {
  std::vector<double> time;
  std::vector<double> survival;
  std::vector<std::size_t> n_risk;
  std::vector<std::size_t> n_event;

  bool empty() const noexcept { return time.empty(); }
  /// Estimate at the largest event time; 1 when there are no events.
  double plateau() const noexcept { return survival.empty() ? 1.0 : survival.back(); }
  /// Right-continuous step function value at t.
  double at(double t) const;
};

/// Events precede censorings at tied times.
KaplanMeier kaplan_meier(const std::vector<double>& time, const std::vector<int>& status);
KaplanMeier kaplan_meier(const SurvivalDataset& data);

struct GroupedCurve {
  double level;
  std::size_t size;
  KaplanMeier curve;
};

/// One curve per distinct value of covariate column `column` (0-based, excluding
/// the intercept), in ascending order of the value.
std::vector<GroupedCurve> kaplan_meier_by(const SurvivalDataset& data, std::size_t column);
std::vector<GroupedCurve> kaplan_meier_by(const std::vector<double>& time, const std::vector<int>& status,
                                          const std::vector<double>& group);

}  // namespace lsc
