#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logsymcure/likelihood.hpp"

namespace lsc {

/// Numeric CSV with a header row; stored column by column.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;

  std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }
  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;
};

/// Comma separated, '.' decimal, header required. Lines starting with '#' and
/// blank lines are skipped. Throws DataError with the offending line number.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Shortest round-trip formatting of every value; comments are written first
/// as '# ' lines.
void write_csv(std::ostream& out, const CsvTable& table, const std::vector<std::string>& comments = {});
void write_csv_file(const std::string& path, const CsvTable& table, const std::vector<std::string>& comments = {});

/// "none" or an empty string gives no covariates; otherwise a comma list.
std::vector<std::string> parse_covariate_list(std::string_view text);

/// Requires "time" and "status" columns. Without a selection every other
/// column becomes a covariate.
SurvivalDataset to_dataset(const CsvTable& table, const std::optional<std::vector<std::string>>& covariates);
CsvTable to_table(const SurvivalDataset& data);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace lsc
