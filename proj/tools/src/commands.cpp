// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "tfc/errors.hpp"
#include "tfc/problems.hpp"

namespace tfc::cli {

namespace {

std::string format_number(double v) { return fmt::format("{:.6e}", v); }

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path, "cannot open output file");
  return out;
}

/// (n, m) pairs of the simple PDE tables, skipping n < m.
std::vector<std::pair<int, int>> simple_pde_pairs() {
  std::vector<std::pair<int, int>> out;
  for (int m = 5; m <= 25; m += 5) {
    for (int n = 5; n <= 30; n += 5) {
      if (n >= m) out.emplace_back(n, m);
    }
  }
  return out;
}

void suite_simple_pde(ResultTable& t, const std::string& suite, Method method) {
  const char* tag = method == Method::Tfc ? "tfc" : "spectral";
  for (const auto& [n, m] : simple_pde_pairs()) {
    t.rows.push_back(make_row(suite, tag, m, n, 0, solve(simple_pde_problem(n, m, method))));
  }
}

void suite_simple_pde_xtfc(ResultTable& t, const std::vector<std::uint64_t>& seeds) {
  const std::string suite = "simple-pde-xtfc";
  const std::size_t begin = t.rows.size();
  for (const auto& [n, m] : simple_pde_pairs()) {
    const int neurons = simple_pde_basis_size(m);
    for (std::uint64_t seed : seeds) {
      t.rows.push_back(make_row(suite, "xtfc", neurons, n, seed,
                                solve(simple_pde_problem(n, neurons, Method::Xtfc, seed))));
    }
  }
  add_best_rows(t, suite, begin);
}

void suite_wave2d(ResultTable& t) {
  for (int d = 3; d <= 18; d += 3) {
    t.rows.push_back(make_row("wave2d", "tfc", wave2d_basis_size(d), 11, 0,
                              solve(wave2d_problem(d, Method::Tfc))));
  }
}

void suite_wave2d_xtfc(ResultTable& t, const std::vector<std::uint64_t>& seeds) {
  const std::string suite = "wave2d-xtfc";
  const std::size_t begin = t.rows.size();
  for (int neurons : {12, 76, 212, 447, 650, 808, 1322}) {
    for (std::uint64_t seed : seeds) {
      t.rows.push_back(make_row(suite, "xtfc", neurons, 11, seed,
                                solve(wave2d_problem(neurons, Method::Xtfc, 11, seed))));
    }
  }
  add_best_rows(t, suite, begin);
}

void suite_convection_diffusion(ResultTable& t) {
  const std::string suite = "convection-diffusion";
  for (double pe : {1.0, 1e6}) {
    const DeProblem p = convection_diffusion_problem(pe);
    t.rows.push_back(make_row(suite, "whole", 190, 200, 0, solve(p)));
    t.rows.push_back(make_row(suite, "split", 190, 200, 0,
                              solve_split(p, convection_diffusion_split())));
  }
}

void suite_balloon(ResultTable& t) {
  for (const BalloonAtmosphere& atm : balloon_atmosphere()) {
    t.rows.push_back(make_row("balloon", std::to_string(atm.altitude_km) + "km", 40, 60,
                              0, solve(balloon_problem(atm.altitude_km))));
  }
}

}  // namespace

void add_best_rows(ResultTable& table, const std::string& suite, std::size_t begin) {
  std::vector<ResultRow> best;
  for (std::size_t i = begin; i < table.rows.size(); ++i) {
    const ResultRow& r = table.rows[i];
    auto it = std::find_if(best.begin(), best.end(), [&](const ResultRow& b) {
      return b.problem == r.problem && b.m == r.m && b.n == r.n;
    });
    const double err = r.max_error.value_or(std::numeric_limits<double>::infinity());
    if (it == best.end()) {
      best.push_back(r);
    } else if (err < it->max_error.value_or(std::numeric_limits<double>::infinity())) {
      *it = r;
    }
  }
  for (ResultRow& r : best) {
    r.suite = suite;
    r.case_name = "best";
    table.rows.push_back(r);
  }
}

const std::vector<std::string>& ResultTable::columns() {
  static const std::vector<std::string> cols{
      "suite",        "problem",    "case",       "m",          "n",
      "basis",        "seed",       "max_error",  "mean_error", "max_residual",
      "iterations",   "converged",  "wall_seconds"};
  return cols;
}

void ResultTable::write_csv(std::ostream& out, bool include_wall) const {
  const auto& cols = columns();
  const std::size_t ncols = include_wall ? cols.size() : cols.size() - 1;
  for (std::size_t i = 0; i < ncols; ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const ResultRow& r : rows) {
    out << r.suite << ',' << r.problem << ',' << r.case_name << ',' << r.m << ','
        << r.n << ',' << r.basis << ',' << r.seed << ',' << format_optional(r.max_error)
        << ',' << format_optional(r.mean_error) << ',' << format_number(r.max_residual)
        << ',' << r.iterations << ',' << (r.converged ? "true" : "false");
    if (include_wall) out << ',' << fmt::format("{:.3f}", r.wall_seconds);
    out << '\n';
  }
}

ResultRow make_row(const std::string& suite, const std::string& case_name, int m,
                   int n, std::uint64_t seed, const SolveReport& rep) {
  ResultRow r;
  r.suite = suite;
  r.problem = rep.problem_id;
  r.case_name = case_name;
  r.m = m;
  r.n = n;
  r.basis = rep.basis_size;
  r.seed = seed;
  r.max_error = rep.max_error;
  r.mean_error = rep.mean_error;
  r.max_residual = rep.max_residual;
  r.iterations = rep.iterations;
  r.converged = rep.converged;
  r.wall_seconds = rep.wall_seconds;
  return r;
}

SolveReport run_config(const ProblemConfig& config) {
  if (config.split) return solve_split(config.problem, *config.split);
  return solve(config.problem);
}

json report_to_json(const SolveReport& rep, const ProblemConfig& config) {
  json j;
  j["problem_id"] = rep.problem_id;
  j["converged"] = rep.converged;
  j["nonlinear"] = rep.nonlinear;
  j["iterations"] = rep.iterations;
  j["termination"] = rep.termination ? json(termination_name(*rep.termination))
                                     : json(nullptr);
  j["basis_size"] = rep.basis_size;
  j["training_points"] = rep.training_points;
  j["max_residual"] = rep.max_residual;
  j["mean_residual"] = rep.mean_residual;
  j["max_error"] = optional_json(rep.max_error);
  j["mean_error"] = optional_json(rep.mean_error);
  j["constraint_error"] = rep.constraint_error;
  j["wall_seconds"] = rep.wall_seconds;
  j["xi"] = json::object();
  for (std::size_t v = 0; v < rep.variables.size(); ++v) {
    j["xi"][rep.variables[v]] = vector_json(rep.xi[v]);
  }
  j["extras"] = json::object();
  for (const auto& [name, value] : rep.extras) j["extras"][name] = value;

  const TestSamples& ts = rep.samples;
  json s;
  s["dims"] = ts.dim_names;
  s["variables"] = ts.variables;
  s["points"] = json::array();
  for (Eigen::Index i = 0; i < ts.points.rows(); ++i) {
    s["points"].push_back(vector_json(ts.points.row(i).transpose()));
  }
  s["values"] = json::object();
  s["exact"] = json::object();
  for (std::size_t v = 0; v < ts.variables.size(); ++v) {
    s["values"][ts.variables[v]] = vector_json(ts.values[v]);
    s["exact"][ts.variables[v]] =
        ts.exact[v].size() ? vector_json(ts.exact[v]) : json(nullptr);
  }
  j["samples"] = s;
  j["config"] = emit_config(config);
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "simple-pde", "simple-pde-spectral", "simple-pde-xtfc", "wave1d",
      "wave2d",     "wave2d-xtfc",         "biharmonic-cart", "biharmonic-polar",
      "convection-diffusion", "balloon"};
  return names;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto to_seed = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("seeds", "invalid seed '" + s + "' in '" + text + "'");
    }
    return std::stoull(s);
  };
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = to_seed(text.substr(0, dots));
    const std::uint64_t hi = to_seed(text.substr(dots + 2));
    if (lo > hi) throw ConfigError("seeds", "empty range '" + text + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_seed(item));
  if (out.empty()) throw ConfigError("seeds", "no seeds given");
  return out;
}

ResultTable run_suite(const std::string& suite, const std::vector<std::uint64_t>& seeds) {
  ResultTable t;
  if (suite == "simple-pde") {
    suite_simple_pde(t, suite, Method::Tfc);
  } else if (suite == "simple-pde-spectral") {
    suite_simple_pde(t, suite, Method::Spectral);
  } else if (suite == "simple-pde-xtfc") {
    suite_simple_pde_xtfc(t, seeds);
  } else if (suite == "wave1d") {
    t.rows.push_back(make_row(suite, "tfc", 20, 30, 0, solve(wave1d_problem())));
  } else if (suite == "wave2d") {
    suite_wave2d(t);
  } else if (suite == "wave2d-xtfc") {
    suite_wave2d_xtfc(t, seeds);
  } else if (suite == "biharmonic-cart") {
    t.rows.push_back(make_row(suite, "tfc", 26, 20, 0, solve(biharmonic_cartesian_problem())));
  } else if (suite == "biharmonic-polar") {
    t.rows.push_back(make_row(suite, "tfc", 30, 30, 0, solve(biharmonic_polar_problem())));
  } else if (suite == "convection-diffusion") {
    suite_convection_diffusion(t);
  } else if (suite == "balloon") {
    suite_balloon(t);
  } else {
    std::string known;
    for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
    throw ConfigError("suite", "unknown suite '" + suite + "' (known: " + known + ")");
  }
  return t;
}

void write_plotdata(const json& report, std::ostream& out) {
  try {
    const json& s = report.at("samples");
    const auto dims = s.at("dims").get<std::vector<std::string>>();
    const json& points = s.at("points");
    const auto vars = s.at("variables").get<std::vector<std::string>>();
    std::vector<std::vector<double>> values, exact;
    for (const auto& v : vars) {
      values.push_back(s.at("values").at(v).get<std::vector<double>>());
      const json& e = s.at("exact").at(v);
      exact.push_back(e.is_null() ? std::vector<double>{} : e.get<std::vector<double>>());
    }
    std::string header;
    for (const auto& d : dims) header += (header.empty() ? "" : ",") + d;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      header += "," + vars[v];
      if (!exact[v].empty()) header += "," + vars[v] + "_true," + vars[v] + "_error";
    }
    out << header << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto p = points.at(i).get<std::vector<double>>();
      std::string line;
      for (std::size_t k = 0; k < p.size(); ++k) {
        line += (k ? "," : "") + fmt::format("{:.17g}", p[k]);
      }
      for (std::size_t v = 0; v < vars.size(); ++v) {
        const double u = values[v].at(i);
        line += "," + fmt::format("{:.17g}", u);
        if (!exact[v].empty()) {
          const double ut = exact[v].at(i);
          line += fmt::format(",{:.17g},{:.17g}", ut, std::abs(u - ut));
        }
      }
      out << line << '\n';
    }
  } catch (const json::exception& e) {
    throw ConfigError("report", std::string("malformed report: ") + e.what());
  }
}

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const std::string& format, std::ostream& err) {
  try {
    if (format != "json" && format != "csv") {
      throw ConfigError("format", "expected 'json' or 'csv', got '" + format + "'");
    }
    const ProblemConfig cfg = load_config(config_path);
    const SolveReport rep = run_config(cfg);
    std::ofstream out = open_output(out_path);
    if (format == "json") {
      out << report_to_json(rep, cfg).dump(2) << '\n';
    } else {
      ResultTable t;
      t.rows.push_back(make_row("solve", cfg.split ? "split" : "whole", 0, 0, cfg.seed, rep));
      t.write_csv(out);
    }
    if (!rep.converged) {
      err << "tfc: solver did not converge after " << rep.iterations << " iterations\n";
      return kExitNotConverged;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "tfc: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_bench(const std::string& suite, const std::string& out_path,
              const std::string& seeds, std::ostream& err) {
  try {
    const ResultTable t = run_suite(suite, parse_seeds(seeds));
    std::ofstream out = open_output(out_path);
    t.write_csv(out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "tfc: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_plotdata(const std::string& report_path, const std::string& out_path,
                 std::ostream& err) {
  try {
    std::ifstream in(report_path);
    if (!in) throw ConfigError(report_path, "cannot open report");
    json report;
    try {
      report = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(report_path, std::string("invalid JSON: ") + e.what());
    }
    std::ofstream out = open_output(out_path);
    write_plotdata(report, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "tfc: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace tfc::cli
