#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "logsymcure/logsymcure.h"

namespace cli {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kFailure = 1, kInputError = 2, kFitError = 3 };

struct Error : std::runtime_error {
  Error(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

int exit_code(lsc_status status);
void check(lsc_status status);
// Takes ownership of a string returned by the library.
std::string take(char* s);
Json take_json(char* s);

struct Table {
  lsc_table* handle = nullptr;
  Table() = default;
  Table(const Table&) = delete;
  Table& operator=(const Table&) = delete;
  ~Table() { lsc_table_free(handle); }
};

struct Fit {
  lsc_fit* handle = nullptr;
  Fit() = default;
  Fit(const Fit&) = delete;
  Fit& operator=(const Fit&) = delete;
  ~Fit() { lsc_fit_free(handle); }
};

struct Common {
  int threads = 1;
  std::uint64_t seed = 20240601;
  int starts = 5;
  std::string report;
  bool timing = false;
};

lsc_fit_options fit_options(const Common& common);
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
void read_table(const std::string& path, Table& table);

// Fixed-point with `digits` decimals; "-" for missing values.
std::string fixed(const Json& v, int digits);
std::string pad(const std::string& s, std::size_t width, bool left = false);

class Report {
 public:
  Report(std::string command, const Common& common);
  Json& config() { return body_["config"]; }
  Json& body() { return body_; }
  // Writes the report when a path was given.
  void finish(const std::string& path);

 private:
  Json body_;
  bool timing_;
  std::chrono::steady_clock::time_point start_;
};

struct FitArgs {
  std::string incidence = "bernoulli";
  std::string latency = "lognormal";
  std::optional<double> extra;
  std::optional<std::string> link;
  std::optional<std::string> covariates;
};

lsc_model make_model(const FitArgs& args);
Json model_echo(const FitArgs& args);

void print_fit(const Json& fit);
void print_profiles(const Json& profiles);
void print_selection(const Json& rows, const std::string& criterion);

int cmd_fit(const std::string& input, const FitArgs& args, const Common& common);
int cmd_select(const std::string& input, const std::string& grid, const std::string& criterion,
               const std::optional<std::string>& covariates, const Common& common);

struct SimArgs {
  std::size_t n = 500;
  double cp = 15.0;
  std::optional<int> cf;
  std::optional<std::string> beta;
  int replicates = 200;
  std::string incidence = "poisson";
  std::optional<std::string> link;
  std::string latency = "lognormal";
  std::optional<double> extra;
  double eta = 5.0;
  double phi = 1.0;
  std::optional<std::string> design;
  std::string archive;
};
int cmd_simulate(const SimArgs& args, const Common& common);

int cmd_km(const std::string& input, const std::optional<std::string>& by, const std::optional<std::string>& overlay,
           const std::string& csv, const Common& common);
int cmd_demo(const std::string& out_dir, const Common& common);

}  // namespace cli
