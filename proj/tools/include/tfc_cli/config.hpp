// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "tfc/desolve.hpp"

namespace tfc::cli {

using json = nlohmann::json;

/// A parsed problem document: the problem, an optional domain split and
/// the default seed of random-feature bases.
struct ProblemConfig {
  DeProblem problem;
  std::optional<SplitSpec> split;
  std::uint64_t seed = 0;
};

/// Validates and converts a document. Throws ConfigError naming the
/// offending path (e.g. "variables[0].basis.degree") for unknown keys,
/// wrong types and invalid values; expression errors are forwarded.
ProblemConfig parse_config(const json& doc);

/// Reads and parses a JSON document from disk.
ProblemConfig load_config(const std::string& path);

/// Canonical document: every field explicit, expressions in their printed
/// form. parse_config(emit_config(c)) emits the same document again.
json emit_config(const ProblemConfig& config);

}  // namespace tfc::cli
