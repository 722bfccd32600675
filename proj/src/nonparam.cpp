#include "logsymcure/nonparam.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace lsc {

double KaplanMeier::at(double t) const {
  const auto it = std::upper_bound(time.begin(), time.end(), t);
  if (it == time.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - time.begin()) - 1];
}

KaplanMeier kaplan_meier(const std::vector<double>& time, const std::vector<int>& status) {
  if (time.size() != status.size()) throw DataError("time and status lengths differ");
  std::vector<std::size_t> order(time.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (time[a] != time[b]) return time[a] < time[b];
    return status[a] > status[b];
  });

  KaplanMeier km;
  std::size_t at_risk = time.size();
  double s = 1.0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = time[order[i]];
    std::size_t events = 0, leaving = 0;
    for (; i < order.size() && time[order[i]] == t; ++i, ++leaving) events += status[order[i]] == 1;
    if (events > 0) {
      s *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      km.time.push_back(t);
      km.survival.push_back(s);
      km.n_risk.push_back(at_risk);
      km.n_event.push_back(events);
    }
    at_risk -= leaving;
  }
  return km;
}

KaplanMeier kaplan_meier(const SurvivalDataset& data) { return kaplan_meier(data.time(), data.status()); }

std::vector<GroupedCurve> kaplan_meier_by(const std::vector<double>& time, const std::vector<int>& status,
                                          const std::vector<double>& group) {
  if (group.size() != time.size()) throw DataError("group column length differs from the data");
  std::map<double, std::pair<std::vector<double>, std::vector<int>>> groups;
  for (std::size_t i = 0; i < time.size(); ++i) {
    auto& g = groups[group[i]];
    g.first.push_back(time[i]);
    g.second.push_back(status[i]);
  }
  std::vector<GroupedCurve> out;
  for (const auto& [level, g] : groups) out.push_back({level, g.first.size(), kaplan_meier(g.first, g.second)});
  return out;
}

std::vector<GroupedCurve> kaplan_meier_by(const SurvivalDataset& data, std::size_t column) {
  if (column + 1 >= data.n_coefficients()) throw DataError("grouping column out of range");
  const auto col = data.design().col(static_cast<Eigen::Index>(column + 1));
  return kaplan_meier_by(data.time(), data.status(), std::vector<double>(col.data(), col.data() + col.size()));
}

}  // namespace lsc
