#pragma once

#include <cstdint>

#include "logsymcure/io.hpp"
#include "logsymcure/simulate.hpp"

namespace lsc {

inline constexpr std::size_t kDemoSize = 263;

/// Synthetic leprosy-like cohort: log-t(8) latency (eta 8.787, phi 1.862),
/// standard mixture with logistic incidence and a three-level classification
/// (baseline MD, indicators lc_mv and lc_pt), plus a gender column with no
/// effect. Censoring is tuned for about 44% censored overall.
SimConfig demo_config(std::uint64_t seed);

/// Columns: time, status, gender, LC (0 = MD, 1 = MV, 2 = PT), lc_mv, lc_pt.
CsvTable demo_table(std::uint64_t seed);

}  // namespace lsc
