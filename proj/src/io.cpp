#include "logsymcure/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace lsc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) return out;
    line.remove_prefix(comma + 1);
  }
}

bool skip(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

std::optional<std::size_t> CsvTable::find(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return j;
  }
  return std::nullopt;
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
  const auto j = find(name);
  if (!j) throw DataError("no column named '" + std::string(name) + "'");
  return values[*j];
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (skip(line)) continue;
    const auto fields = split(line);
    if (!have_header) {
      std::set<std::string_view> seen;
      for (auto f : fields) {
        if (f.empty()) throw DataError("line " + std::to_string(line_no) + ": empty column name");
        if (!seen.insert(f).second) throw DataError("duplicate column '" + std::string(f) + "'");
        t.columns.emplace_back(f);
      }
      t.values.resize(t.columns.size());
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = 0.0;
      const auto f = fields[j];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw DataError("line " + std::to_string(line_no) + ": '" + std::string(f) + "' in column '" + t.columns[j] +
                        "' is not a number");
      }
      t.values[j].push_back(v);
    }
  }
  if (!have_header || t.rows() == 0) throw DataError("no records");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const CsvTable& table, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << format_double(table.values[j][i]);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table, const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(out, table, comments);
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<std::string> parse_covariate_list(std::string_view text) {
  text = trim(text);
  if (text.empty() || text == "none") return {};
  std::vector<std::string> out;
  for (auto f : split(text)) {
    if (f.empty()) throw DataError("empty name in covariate list");
    out.emplace_back(f);
  }
  return out;
}

SurvivalDataset to_dataset(const CsvTable& table, const std::optional<std::vector<std::string>>& covariates) {
  if (!table.find("time") || !table.find("status")) throw DataError("columns 'time' and 'status' are required");
  std::vector<std::string> names;
  if (covariates) {
    names = *covariates;
  } else {
    for (const auto& c : table.columns) {
      if (c != "time" && c != "status") names.push_back(c);
    }
  }
  const auto& status_col = table.column("status");
  std::vector<int> status(status_col.size());
  for (std::size_t i = 0; i < status.size(); ++i) {
    if (status_col[i] != 0.0 && status_col[i] != 1.0) {
      throw DataError("status must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
    status[i] = static_cast<int>(status_col[i]);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(table.rows()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == "time" || names[j] == "status") throw DataError("'" + names[j] + "' cannot be a covariate");
    const auto& col = table.column(names[j]);
    for (std::size_t i = 0; i < col.size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return SurvivalDataset(table.column("time"), std::move(status), x, names);
}

CsvTable to_table(const SurvivalDataset& data) {
  CsvTable t;
  t.columns = {"time", "status"};
  t.values.push_back(data.time());
  t.values.emplace_back(data.status().begin(), data.status().end());
  for (std::size_t j = 0; j < data.covariate_names().size(); ++j) {
    t.columns.push_back(data.covariate_names()[j]);
    const auto col = data.design().col(static_cast<Eigen::Index>(j + 1));
    t.values.emplace_back(col.data(), col.data() + col.size());
  }
  return t;
}

}  // namespace lsc
