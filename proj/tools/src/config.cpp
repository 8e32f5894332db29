// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>

#include "tfc/errors.hpp"

namespace tfc::cli {

namespace {

/// A JSON value with its document path, for positioned errors.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(path_.empty() ? "(root)" : path_, message);
  }

  void expect_object(std::initializer_list<const char*> keys) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [k, v] : j_->items()) {
      bool known = false;
      for (const char* allowed : keys) known = known || k == allowed;
      if (!known) throw ConfigError(child_path(k), "unknown key '" + k + "'");
    }
  }

  bool has(const char* key) const { return j_->contains(key); }

  Node at(const char* key) const {
    if (!j_->contains(key)) {
      throw ConfigError(child_path(key), "missing required key");
    }
    return {(*j_)[key], child_path(key)};
  }

  std::optional<Node> opt(const char* key) const {
    if (!j_->contains(key) || (*j_)[key].is_null()) return std::nullopt;
    return Node((*j_)[key], child_path(key));
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  int integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    const auto v = j_->get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail("integer out of range");
    }
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer() const {
    if (!j_->is_number_integer() || j_->get<std::int64_t>() < 0) {
      fail("expected a non-negative integer");
    }
    return j_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  Expr expression() const {
    if (j_->is_number()) return Expr::number(number());
    const std::string text = string();
    try {
      return parse(text);
    } catch (const ParseError& e) {
      fail(std::string("invalid expression: ") + e.what());
    }
  }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) {
      out.emplace_back((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  std::vector<std::pair<std::string, Node>> entries() const {
    if (!j_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (const auto& [k, v] : j_->items()) out.emplace_back(k, Node(v, child_path(k)));
    return out;
  }

  std::vector<int> integers() const {
    std::vector<int> out;
    for (const Node& n : items()) out.push_back(n.integer());
    return out;
  }

  std::pair<double, double> interval() const {
    const std::vector<Node> v = items();
    if (v.size() != 2) fail("expected [lo, hi]");
    return {v[0].number(), v[1].number()};
  }

 private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* j_;
  std::string path_;
};

int dim_index(const std::vector<Dimension>& dims, const Node& n) {
  const std::string name = n.string();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].name == name) return static_cast<int>(i);
  }
  n.fail("unknown dimension '" + name + "'");
}

std::map<int, std::vector<int>> per_dim_lists(const std::vector<Dimension>& dims,
                                              const Node& n) {
  std::map<int, std::vector<int>> out;
  for (const auto& [name, list] : n.entries()) {
    int index = -1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i].name == name) index = static_cast<int>(i);
    }
    if (index < 0) list.fail("unknown dimension '" + name + "'");
    out[index] = list.integers();
  }
  return out;
}

/// {"coef": c, "point": a, "order": d} or {"coef": c, "integral": [a, b]}.
DimMode parse_mode(const Node& n, double& coef) {
  coef = n.has("coef") ? n.at("coef").number() : 1.0;
  if (n.has("point") == n.has("integral")) {
    n.fail("expected exactly one of 'point' or 'integral'");
  }
  if (n.has("point")) {
    const int d = n.has("order") ? n.at("order").integer() : 0;
    if (d < 0) n.at("order").fail("order must be non-negative");
    return DimMode::point(n.at("point").number(), d);
  }
  if (n.has("order")) n.at("order").fail("integral terms take no order");
  const auto [a, b] = n.at("integral").interval();
  return DimMode::integral(a, b);
}

Constraint parse_constraint(const std::vector<Dimension>& dims, const Node& n) {
  n.expect_object({"dim", "terms", "kappa", "foreign", "components"});
  Constraint c;
  c.dim = dim_index(dims, n.at("dim"));
  for (const Node& t : n.at("terms").items()) {
    t.expect_object({"coef", "point", "order", "integral"});
    OperatorTerm term;
    term.mode = parse_mode(t, term.coef);
    c.op.push_back(term);
  }
  if (c.op.empty()) n.at("terms").fail("a constraint needs at least one term");
  c.kappa = n.has("kappa") ? n.at("kappa").expression() : Expr::number(0.0);
  if (auto f = n.opt("foreign")) {
    for (const Node& item : f->items()) {
      item.expect_object({"dim", "integral"});
      ForeignIntegral fi;
      fi.dim = dim_index(dims, item.at("dim"));
      std::tie(fi.a, fi.b) = item.at("integral").interval();
      c.foreign.push_back(fi);
    }
  }
  if (auto comps = n.opt("components")) {
    for (const Node& item : comps->items()) {
      item.expect_object({"variable", "coef", "point", "order", "integral"});
      ComponentTerm ct;
      ct.variable = item.at("variable").string();
      ct.mode = parse_mode(item, ct.coef);
      c.components.push_back(ct);
    }
  }
  return c;
}

BasisSpec parse_basis(const std::vector<Dimension>& dims, const Node& n,
                      std::uint64_t default_seed) {
  n.expect_object({"kind", "family", "degree", "total_degree", "removal",
                   "neurons", "seed", "weights", "activation"});
  BasisSpec b;
  b.seed = default_seed;
  const std::string kind = n.has("kind") ? n.at("kind").string() : "polynomial";
  if (kind == "polynomial") {
    b.kind = BasisSpec::Kind::Polynomial;
  } else if (kind == "elm") {
    b.kind = BasisSpec::Kind::Elm;
  } else {
    n.at("kind").fail("expected 'polynomial' or 'elm'");
  }
  if (auto f = n.opt("family")) {
    try {
      b.family = family_from_name(f->string());
    } catch (const Error& e) {
      f->fail(e.what());
    }
  }
  if (auto d = n.opt("degree")) {
    b.degree = d->integer();
    if (b.degree < 0) d->fail("degree must be non-negative");
  }
  if (auto t = n.opt("total_degree")) b.total_degree = t->boolean();
  if (auto r = n.opt("removal")) b.removal = per_dim_lists(dims, *r);
  if (auto m = n.opt("neurons")) {
    b.neurons = m->integer();
    if (b.neurons < 1) m->fail("neurons must be positive");
  }
  if (auto s = n.opt("seed")) b.seed = s->unsigned_integer();
  if (auto w = n.opt("weights")) {
    std::tie(b.weight_lo, b.weight_hi) = w->interval();
    if (!(b.weight_lo < b.weight_hi)) w->fail("expected lo < hi");
  }
  if (auto a = n.opt("activation")) {
    try {
      b.activation = activation_from_name(a->string());
    } catch (const Error& e) {
      a->fail(e.what());
    }
  }
  if (b.kind == BasisSpec::Kind::Elm && b.neurons < 1) {
    n.fail("an elm basis needs 'neurons'");
  }
  return b;
}

GridSpec parse_grid(const Node& n, std::size_t ndims, GridKind default_kind) {
  n.expect_object({"points", "kind"});
  GridSpec g;
  g.kind = default_kind;
  g.points = n.at("points").integers();
  if (g.points.size() != ndims) {
    n.at("points").fail("expected one count per dimension");
  }
  for (int p : g.points) {
    if (p < 1) n.at("points").fail("point counts must be positive");
  }
  if (auto k = n.opt("kind")) {
    try {
      g.kind = grid_kind_from_name(k->string());
    } catch (const Error& e) {
      k->fail(e.what());
    }
  }
  return g;
}

SolverSettings parse_solver(const Node& n) {
  n.expect_object({"method", "tol", "max_iter", "force_nonlinear", "check_jacobian",
                   "scale_columns", "warm_start_iterations"});
  SolverSettings s;
  if (auto m = n.opt("method")) {
    try {
      s.method = lsq_method_from_name(m->string());
    } catch (const Error& e) {
      m->fail(e.what());
    }
  }
  if (auto t = n.opt("tol")) {
    s.tol = t->number();
    if (!(s.tol > 0.0)) t->fail("tol must be positive");
  }
  if (auto m = n.opt("max_iter")) {
    s.max_iter = m->integer();
    if (s.max_iter < 1) m->fail("max_iter must be at least 1");
  }
  if (auto f = n.opt("force_nonlinear")) s.force_nonlinear = f->boolean();
  if (auto c = n.opt("check_jacobian")) s.check_jacobian = c->boolean();
  if (auto c = n.opt("scale_columns")) s.scale_columns = c->boolean();
  if (auto w = n.opt("warm_start_iterations")) {
    s.warm_start_iterations = w->integer();
    if (s.warm_start_iterations < 0) w->fail("must be non-negative");
  }
  return s;
}

json emit_mode(const DimMode& m, double coef) {
  json j;
  j["coef"] = coef;
  if (m.kind == DimMode::Kind::Integral) {
    j["integral"] = {m.a, m.b};
  } else {
    j["point"] = m.a;
    j["order"] = m.d;
  }
  return j;
}

json emit_lists(const std::vector<Dimension>& dims,
                const std::map<int, std::vector<int>>& lists) {
  json j = json::object();
  for (const auto& [d, v] : lists) j[dims.at(d).name] = v;
  return j;
}

json emit_basis(const std::vector<Dimension>& dims, const BasisSpec& b) {
  json j;
  j["kind"] = b.kind == BasisSpec::Kind::Elm ? "elm" : "polynomial";
  j["family"] = family_name(b.family);
  j["degree"] = b.degree;
  j["total_degree"] = b.total_degree;
  j["removal"] = emit_lists(dims, b.removal);
  if (b.kind == BasisSpec::Kind::Elm) j["neurons"] = b.neurons;
  j["seed"] = b.seed;
  j["weights"] = {b.weight_lo, b.weight_hi};
  j["activation"] = activation_name(b.activation);
  return j;
}

json emit_grid(const GridSpec& g) {
  return {{"points", g.points}, {"kind", grid_kind_name(g.kind)}};
}

json emit_solver(const SolverSettings& s) {
  return {{"method", lsq_method_name(s.method)},
          {"tol", s.tol},
          {"max_iter", s.max_iter},
          {"force_nonlinear", s.force_nonlinear},
          {"check_jacobian", s.check_jacobian},
          {"scale_columns", s.scale_columns},
          {"warm_start_iterations", s.warm_start_iterations}};
}

}  // namespace

ProblemConfig parse_config(const json& doc) {
  const Node root(doc, "");
  root.expect_object({"id", "dimensions", "parameters", "variables", "residuals",
                      "extras", "train", "test", "solver", "spectral", "split",
                      "seed"});
  ProblemConfig cfg;
  DeProblem& p = cfg.problem;
  if (auto s = root.opt("seed")) cfg.seed = s->unsigned_integer();
  p.id = root.has("id") ? root.at("id").string() : "problem";

  for (const Node& d : root.at("dimensions").items()) {
    d.expect_object({"name", "interval"});
    Dimension dim;
    dim.name = d.at("name").string();
    std::tie(dim.lo, dim.hi) = d.at("interval").interval();
    p.dims.push_back(dim);
  }
  if (p.dims.empty()) root.at("dimensions").fail("at least one dimension is required");

  if (auto params = root.opt("parameters")) {
    for (const auto& [name, value] : params->entries()) p.parameters[name] = value.number();
  }

  for (const Node& v : root.at("variables").items()) {
    v.expect_object({"name", "constraints", "supports", "basis", "exact"});
    DeVariable var;
    var.name = v.at("name").string();
    if (auto cs = v.opt("constraints")) {
      for (const Node& c : cs->items()) var.constraints.push_back(parse_constraint(p.dims, c));
    }
    if (auto s = v.opt("supports")) var.supports = per_dim_lists(p.dims, *s);
    var.basis = v.has("basis") ? parse_basis(p.dims, v.at("basis"), cfg.seed) : BasisSpec{};
    if (!v.has("basis")) var.basis.seed = cfg.seed;
    if (auto e = v.opt("exact")) var.exact = e->expression();
    p.variables.push_back(std::move(var));
  }
  if (p.variables.empty()) root.at("variables").fail("at least one variable is required");

  for (const Node& r : root.at("residuals").items()) p.residuals.push_back(r.expression());
  if (p.residuals.empty()) root.at("residuals").fail("at least one residual is required");

  if (auto extras = root.opt("extras")) {
    for (const Node& e : extras->items()) {
      e.expect_object({"name", "initial", "bounds"});
      ExtraUnknown x;
      x.name = e.at("name").string();
      if (auto i = e.opt("initial")) x.initial = i->number();
      if (auto b = e.opt("bounds")) {
        const auto [lo, hi] = b->interval();
        if (lo > hi) b->fail("expected lo <= hi");
        x.bounds = Bounds{lo, hi};
      }
      p.extras.push_back(x);
    }
  }

  p.train = parse_grid(root.at("train"), p.dims.size(), GridKind::Cgl);
  if (auto t = root.opt("test")) {
    p.test = parse_grid(*t, p.dims.size(), GridKind::Uniform);
  } else {
    p.test = GridSpec{std::vector<int>(p.dims.size(), 100), GridKind::Uniform};
  }
  if (auto s = root.opt("solver")) p.solver = parse_solver(*s);
  if (auto s = root.opt("spectral")) p.spectral = s->boolean();

  if (auto s = root.opt("split")) {
    s->expect_object({"bounds", "xp0", "yp0", "dyp0", "points", "test_points",
                      "basis", "solver"});
    SplitSpec sp;
    if (auto b = s->opt("bounds")) {
      const auto [lo, hi] = b->interval();
      if (lo > hi) b->fail("expected lo <= hi");
      sp.bounds = Bounds{lo, hi};
    }
    if (auto x = s->opt("xp0")) sp.xp0 = x->number();
    if (auto y = s->opt("yp0")) sp.yp0 = y->number();
    if (auto d = s->opt("dyp0")) sp.dyp0 = d->number();
    if (auto n = s->opt("points")) sp.points = n->integer();
    if (auto n = s->opt("test_points")) sp.test_points = n->integer();
    if (sp.points < 1) s->at("points").fail("must be positive");
    if (sp.test_points < 1) s->at("test_points").fail("must be positive");
    sp.basis = s->has("basis") ? parse_basis(p.dims, s->at("basis"), cfg.seed)
                               : p.variables.front().basis;
    if (auto sv = s->opt("solver")) sp.solver = parse_solver(*sv);
    cfg.split = sp;
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json emit_config(const ProblemConfig& cfg) {
  const DeProblem& p = cfg.problem;
  json j;
  j["id"] = p.id;
  j["seed"] = cfg.seed;
  j["dimensions"] = json::array();
  for (const Dimension& d : p.dims) {
    j["dimensions"].push_back({{"name", d.name}, {"interval", {d.lo, d.hi}}});
  }
  j["parameters"] = json::object();
  for (const auto& [k, v] : p.parameters) j["parameters"][k] = v;
  j["variables"] = json::array();
  for (const DeVariable& v : p.variables) {
    json jv;
    jv["name"] = v.name;
    jv["constraints"] = json::array();
    for (const Constraint& c : v.constraints) {
      json jc;
      jc["dim"] = p.dims.at(c.dim).name;
      jc["terms"] = json::array();
      for (const OperatorTerm& t : c.op) jc["terms"].push_back(emit_mode(t.mode, t.coef));
      jc["kappa"] = c.kappa.str();
      jc["foreign"] = json::array();
      for (const ForeignIntegral& f : c.foreign) {
        jc["foreign"].push_back({{"dim", p.dims.at(f.dim).name}, {"integral", {f.a, f.b}}});
      }
      jc["components"] = json::array();
      for (const ComponentTerm& ct : c.components) {
        json jt = emit_mode(ct.mode, ct.coef);
        jt["variable"] = ct.variable;
        jc["components"].push_back(jt);
      }
      jv["constraints"].push_back(jc);
    }
    jv["supports"] = emit_lists(p.dims, v.supports);
    jv["basis"] = emit_basis(p.dims, v.basis);
    jv["exact"] = v.exact ? json(v.exact->str()) : json(nullptr);
    j["variables"].push_back(jv);
  }
  j["residuals"] = json::array();
  for (const Expr& r : p.residuals) j["residuals"].push_back(r.str());
  j["extras"] = json::array();
  for (const ExtraUnknown& e : p.extras) {
    json je{{"name", e.name}, {"initial", e.initial}};
    je["bounds"] = e.bounds ? json{e.bounds->lo, e.bounds->hi} : json(nullptr);
    j["extras"].push_back(je);
  }
  j["train"] = emit_grid(p.train);
  j["test"] = emit_grid(p.test);
  j["solver"] = emit_solver(p.solver);
  j["spectral"] = p.spectral;
  if (cfg.split) {
    const SplitSpec& s = *cfg.split;
    j["split"] = {{"bounds", {s.bounds.lo, s.bounds.hi}},
                  {"xp0", s.xp0},
                  {"yp0", s.yp0},
                  {"dyp0", s.dyp0},
                  {"points", s.points},
                  {"test_points", s.test_points},
                  {"basis", emit_basis(p.dims, s.basis)},
                  {"solver", emit_solver(s.solver)}};
  } else {
    j["split"] = nullptr;
  }
  return j;
}

}  // namespace tfc::cli
