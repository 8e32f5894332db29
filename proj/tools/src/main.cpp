// Distributed under the MIT License.
// See LICENSE for details.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tfc_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Constraint-embedding solver for differential equations"};
  app.require_subcommand(1);

  std::string config, out, format = "json";
  auto* solve = app.add_subcommand("solve", "Solve a problem described by a JSON config");
  solve->add_option("--config", config, "Problem config path")->required();
  solve->add_option("--out", out, "Report path")->required();
  solve->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string suite, seeds = "0";
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("--suite", suite, "Suite name")->required();
  bench->add_option("--out", out, "CSV output path")->required();
  bench->add_option("--seeds", seeds, "Seeds as a..b or a comma list");

  std::string report;
  auto* plot = app.add_subcommand("plotdata", "Write test-grid samples of a JSON report");
  plot->add_option("--report", report, "JSON report path")->required();
  plot->add_option("--out", out, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? tfc::cli::kExitOk : tfc::cli::kExitError;
  }

  if (*solve) return tfc::cli::cmd_solve(config, out, format, std::cerr);
  if (*bench) return tfc::cli::cmd_bench(suite, out, seeds, std::cerr);
  return tfc::cli::cmd_plotdata(report, out, std::cerr);
}
