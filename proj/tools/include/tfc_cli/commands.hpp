// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tfc_cli/config.hpp"

namespace tfc::cli {

/// Exit statuses of the commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// One solved benchmark case.
struct ResultRow {
  std::string suite;
  std::string problem;
  std::string case_name;
  int m = 0;
  int n = 0;
  int basis = 0;
  std::uint64_t seed = 0;
  std::optional<double> max_error;
  std::optional<double> mean_error;
  double max_residual = 0.0;
  int iterations = 0;
  bool converged = true;
  double wall_seconds = 0.0;
};

/// Benchmark rows in a fixed column order.
struct ResultTable {
  std::vector<ResultRow> rows;

  static const std::vector<std::string>& columns();
  /// CSV with a header line. Absent errors are empty cells.
  void write_csv(std::ostream& out, bool include_wall = true) const;
};

/// Appends, per (problem, m, n) among rows[begin..], a copy of the row with
/// the smallest max error, tagged with case "best".
void add_best_rows(ResultTable& table, const std::string& suite, std::size_t begin);

/// Row describing a single solve.
ResultRow make_row(const std::string& suite, const std::string& case_name,
                   int m, int n, std::uint64_t seed, const SolveReport& rep);

/// Solves the configured problem, splitting it when a split is declared.
SolveReport run_config(const ProblemConfig& config);

/// Structured report: results, test samples and the canonical config.
json report_to_json(const SolveReport& rep, const ProblemConfig& config);

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Parses "a..b" (inclusive) or a comma-separated list.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

/// Runs one benchmark suite. Throws ConfigError for an unknown suite.
ResultTable run_suite(const std::string& suite,
                      const std::vector<std::uint64_t>& seeds);

/// Plot CSV of a JSON report: dimension columns, then per variable its
/// value, and `<var>_true`, `<var>_error` when an exact solution exists.
void write_plotdata(const json& report, std::ostream& out);

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const std::string& format, std::ostream& err);
int cmd_bench(const std::string& suite, const std::string& out_path,
              const std::string& seeds, std::ostream& err);
int cmd_plotdata(const std::string& report_path, const std::string& out_path,
                 std::ostream& err);

}  // namespace tfc::cli
