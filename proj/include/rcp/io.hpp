#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcp/experiment.hpp"

namespace rcp::io {

inline constexpr int kSchemaVersion = 1;

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvData {
  Eigen::MatrixXd values;
  std::vector<std::string> header;  // empty when the file has none
  bool has_header = false;
};

// One column per component, optional header line, decimal-point floats.
// Ragged rows and non-numeric/non-finite cells raise CsvError naming the
// row and column. No missing-value support.
CsvData read_csv_matrix(std::istream& in, const std::string& name = "<stream>");
CsvData read_csv_file(const std::string& path);

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});
void write_csv_file(const std::string& path, const Eigen::MatrixXd& m,
                    const std::vector<std::string>& header = {});

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Section/key-value experiment configuration (grammar documented in the
// README); parse errors carry 1-based line numbers.
ExperimentConfig parse_experiment_config(std::istream& in, const std::string& name = "<stream>");
ExperimentConfig parse_experiment_config_file(const std::string& path);

// Parse a single method line such as "hcov level=0.8 bw=bandmulti".
MethodSpec parse_method_spec(const std::string& text);

std::string rate_table_csv(const RateTable& table);
std::string rate_table_json(const RateTable& table, const ExperimentConfig& cfg);
// (x, rate) series per method for external plotting.
std::string plot_series_csv(const RateTable& table, const std::string& method);

}  // namespace rcp::io
