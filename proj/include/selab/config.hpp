#pragma once

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "selab/expression.hpp"
#include "selab/homogenization.hpp"

namespace selab::config {

struct DomainConfig {
  int dim = 1;
  int cells = 64;
  bool operator==(const DomainConfig&) const = default;
};

struct CoefficientConfig {
  std::string kind = "constant";  // constant | layered | expression
  double value = 1.0;
  std::string expr;
  std::string profile;
  double epsilon = 0.125;
  std::string axis = "x";
  bool operator==(const CoefficientConfig&) const = default;
};

struct MeasurePart {
  std::string kind = "density";  // density | boundary_power | atom
  std::string expr = "1";
  double s = 0.5;
  double position = 0.5;
  double mass = 1.0;
  int quad_order = 5;
  bool operator==(const MeasurePart&) const = default;
};

struct MeasureConfig : MeasurePart {
  // kind == "sum": named parts from [measure.<name>] sections
  std::vector<std::pair<std::string, MeasurePart>> parts;
  bool operator==(const MeasureConfig&) const = default;
};

struct ProblemConfig {
  double lambda = 1.0;
  bool operator==(const ProblemConfig&) const = default;
};

struct SolverConfig {
  double epsilon0 = 1.0;
  double decay = 0.25;
  double epsilon_min = 1e-12;
  double newton_tol = 1e-11;
  int max_newton = 50;
  bool operator==(const SolverConfig&) const = default;
};

struct ExperimentBlock {
  std::string suite = "basic";
  std::vector<double> epsilons;
  std::string family = "decaying";  // none | decaying | oscillating
  int test_functions = 4;
  std::uint64_t seed = 42;
  bool operator==(const ExperimentBlock&) const = default;
};

struct ExperimentConfig {
  DomainConfig domain;
  CoefficientConfig coefficient;
  MeasureConfig measure;
  ProblemConfig problem;
  SolverConfig solver;
  ExperimentBlock experiment;
  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

struct Value {
  enum class Kind { number, string, array } kind = Kind::number;
  double number = 0.0;
  std::string string;
  std::vector<double> array;
};

using Section = std::map<std::string, Value>;
using Tree = std::map<std::string, Section>;

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline Value parse_value(const std::string& raw, int line_no) {
  Value v;
  if (raw.empty()) throw Error("config error: empty value at line " + std::to_string(line_no));
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw Error("config error: unterminated string at line " + std::to_string(line_no));
    v.kind = Value::Kind::string;
    v.string = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw Error("config error: unterminated array at line " + std::to_string(line_no));
    v.kind = Value::Kind::array;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        size_t used = 0;
        v.array.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error("config error: bad array entry '" + item + "' at line " +
                    std::to_string(line_no));
      }
    }
    return v;
  }
  try {
    size_t used = 0;
    v.number = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
  } catch (const std::exception&) {
    throw Error("config error: bad value '" + raw + "' at line " + std::to_string(line_no));
  }
  return v;
}

inline Tree parse_tree(const std::string& text) {
  Tree tree;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("config error: malformed section header at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw Error("config error: empty section name at line " + std::to_string(line_no));
      tree[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config error: expected key = value at line " + std::to_string(line_no));
    std::string key = trim(line.substr(0, eq));
    std::string raw = trim(line.substr(eq + 1));
    if (key.empty() || section.empty())
      throw Error("config error: key outside a section at line " + std::to_string(line_no));
    tree[section][key] = parse_value(raw, line_no);
  }
  return tree;
}

class Binder {
public:
  Binder(const Section& sec, std::string name) : sec_(sec), name_(std::move(name)) {}

  double number(const std::string& key, double fallback) {
    auto it = sec_.find(key);
    if (it == sec_.end()) return fallback;
    used_.push_back(key);
    if (it->second.kind != Value::Kind::number)
      throw Error("config error: " + name_ + "." + key + " must be a number");
    return it->second.number;
  }

  int integer(const std::string& key, int fallback) {
    double v = number(key, fallback);
    int i = static_cast<int>(v);
    if (i != v) throw Error("config error: " + name_ + "." + key + " must be an integer");
    return i;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    auto it = sec_.find(key);
    if (it == sec_.end()) return fallback;
    used_.push_back(key);
    if (it->second.kind != Value::Kind::string)
      throw Error("config error: " + name_ + "." + key + " must be a string");
    return it->second.string;
  }

  std::vector<double> array(const std::string& key, const std::vector<double>& fallback) {
    auto it = sec_.find(key);
    if (it == sec_.end()) return fallback;
    used_.push_back(key);
    if (it->second.kind != Value::Kind::array)
      throw Error("config error: " + name_ + "." + key + " must be an array");
    return it->second.array;
  }

  void finish() const {
    for (const auto& [key, value] : sec_) {
      bool known = false;
      for (const auto& u : used_)
        if (u == key) known = true;
      if (!known) throw Error("config error: unknown key " + name_ + "." + key);
    }
  }

private:
  const Section& sec_;
  std::string name_;
  std::vector<std::string> used_;
};

inline MeasurePart bind_measure_part(const Section& sec, const std::string& name) {
  Binder b(sec, name);
  MeasurePart part;
  part.kind = b.string("kind", part.kind);
  part.expr = b.string("expr", part.expr);
  part.s = b.number("s", part.s);
  part.position = b.number("position", part.position);
  part.mass = b.number("mass", part.mass);
  part.quad_order = b.integer("quad_order", part.quad_order);
  b.finish();
  if (part.kind != "density" && part.kind != "boundary_power" && part.kind != "atom")
    throw Error("config error: unknown measure kind '" + part.kind + "'");
  return part;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  detail::Tree tree = detail::parse_tree(text);
  ExperimentConfig cfg;
  static const detail::Section empty;
  auto section = [&](const std::string& name) -> const detail::Section& {
    auto it = tree.find(name);
    return it == tree.end() ? empty : it->second;
  };

  for (const auto& [name, sec] : tree) {
    if (name != "domain" && name != "coefficient" && name != "measure" && name != "problem" &&
        name != "solver" && name != "experiment" && name.rfind("measure.", 0) != 0)
      throw Error("config error: unknown section [" + name + "]");
  }

  {
    detail::Binder b(section("domain"), "domain");
    cfg.domain.dim = b.integer("dim", cfg.domain.dim);
    cfg.domain.cells = b.integer("cells", cfg.domain.cells);
    b.finish();
    if (cfg.domain.dim != 1 && cfg.domain.dim != 2)
      throw Error("config error: domain.dim must be 1 or 2");
  }
  {
    detail::Binder b(section("coefficient"), "coefficient");
    cfg.coefficient.kind = b.string("kind", cfg.coefficient.kind);
    cfg.coefficient.value = b.number("value", cfg.coefficient.value);
    cfg.coefficient.expr = b.string("expr", cfg.coefficient.expr);
    cfg.coefficient.profile = b.string("profile", cfg.coefficient.profile);
    cfg.coefficient.epsilon = b.number("epsilon", cfg.coefficient.epsilon);
    cfg.coefficient.axis = b.string("axis", cfg.coefficient.axis);
    b.finish();
    if (cfg.coefficient.kind != "constant" && cfg.coefficient.kind != "layered" &&
        cfg.coefficient.kind != "expression")
      throw Error("config error: unknown coefficient kind '" + cfg.coefficient.kind + "'");
    if (cfg.coefficient.axis != "x" && cfg.coefficient.axis != "y")
      throw Error("config error: coefficient.axis must be \"x\" or \"y\"");
  }
  {
    const detail::Section& sec = section("measure");
    detail::Binder probe(sec, "measure");
    std::string kind = probe.string("kind", "density");
    if (kind == "sum") {
      detail::Binder b(sec, "measure");
      cfg.measure.kind = b.string("kind", "sum");
      b.finish();
      for (const auto& [name, sub] : tree) {
        if (name.rfind("measure.", 0) != 0) continue;
        std::string part_name = name.substr(8);
        cfg.measure.parts.emplace_back(part_name, detail::bind_measure_part(sub, name));
      }
      if (cfg.measure.parts.empty())
        throw Error("config error: measure sum needs at least one [measure.<name>] part");
    } else {
      static_cast<MeasurePart&>(cfg.measure) = detail::bind_measure_part(sec, "measure");
      for (const auto& [name, sub] : tree)
        if (name.rfind("measure.", 0) == 0)
          throw Error("config error: [" + name + "] requires measure.kind = \"sum\"");
    }
  }
  {
    detail::Binder b(section("problem"), "problem");
    cfg.problem.lambda = b.number("lambda", cfg.problem.lambda);
    b.finish();
    if (!(cfg.problem.lambda >= 0.0 && cfg.problem.lambda <= 1.0))
      throw Error("out of scope regime");
  }
  {
    detail::Binder b(section("solver"), "solver");
    cfg.solver.epsilon0 = b.number("epsilon0", cfg.solver.epsilon0);
    cfg.solver.decay = b.number("decay", cfg.solver.decay);
    cfg.solver.epsilon_min = b.number("epsilon_min", cfg.solver.epsilon_min);
    cfg.solver.newton_tol = b.number("newton_tol", cfg.solver.newton_tol);
    cfg.solver.max_newton = b.integer("max_newton", cfg.solver.max_newton);
    b.finish();
    if (!(cfg.solver.decay > 0.0 && cfg.solver.decay < 1.0))
      throw Error("config error: solver.decay must lie in (0,1)");
    if (!(cfg.solver.epsilon_min < cfg.solver.epsilon0))
      throw Error("config error: solver.epsilon_min must be below epsilon0");
    if (!(cfg.solver.newton_tol > 0.0) || cfg.solver.max_newton < 1)
      throw Error("config error: invalid solver tolerances");
  }
  {
    detail::Binder b(section("experiment"), "experiment");
    cfg.experiment.suite = b.string("suite", cfg.experiment.suite);
    cfg.experiment.epsilons = b.array("epsilons", cfg.experiment.epsilons);
    cfg.experiment.family = b.string("family", cfg.experiment.family);
    cfg.experiment.test_functions = b.integer("test_functions", cfg.experiment.test_functions);
    double seed = b.number("seed", static_cast<double>(cfg.experiment.seed));
    cfg.experiment.seed = static_cast<std::uint64_t>(seed);
    b.finish();
    if (cfg.experiment.suite != "basic" && cfg.experiment.suite != "full")
      throw Error("config error: experiment.suite must be \"basic\" or \"full\"");
    if (cfg.experiment.family != "none" && cfg.experiment.family != "decaying" &&
        cfg.experiment.family != "oscillating")
      throw Error("config error: unknown measure family '" + cfg.experiment.family + "'");
    for (double e : cfg.experiment.epsilons)
      if (!(e > 0.0)) throw Error("config error: experiment.epsilons must be positive");
  }
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  using detail::format_number;
  std::ostringstream os;
  os << "[coefficient]\n";
  os << "axis = \"" << cfg.coefficient.axis << "\"\n";
  os << "epsilon = " << format_number(cfg.coefficient.epsilon) << "\n";
  os << "expr = \"" << cfg.coefficient.expr << "\"\n";
  os << "kind = \"" << cfg.coefficient.kind << "\"\n";
  os << "profile = \"" << cfg.coefficient.profile << "\"\n";
  os << "value = " << format_number(cfg.coefficient.value) << "\n";
  os << "\n[domain]\n";
  os << "cells = " << cfg.domain.cells << "\n";
  os << "dim = " << cfg.domain.dim << "\n";
  os << "\n[experiment]\n";
  os << "epsilons = [";
  for (size_t k = 0; k < cfg.experiment.epsilons.size(); ++k)
    os << (k ? ", " : "") << format_number(cfg.experiment.epsilons[k]);
  os << "]\n";
  os << "family = \"" << cfg.experiment.family << "\"\n";
  os << "seed = " << cfg.experiment.seed << "\n";
  os << "suite = \"" << cfg.experiment.suite << "\"\n";
  os << "test_functions = " << cfg.experiment.test_functions << "\n";
  auto emit_part = [&os](const MeasurePart& part) {
    os << "expr = \"" << part.expr << "\"\n";
    os << "kind = \"" << part.kind << "\"\n";
    os << "mass = " << format_number(part.mass) << "\n";
    os << "position = " << format_number(part.position) << "\n";
    os << "quad_order = " << part.quad_order << "\n";
    os << "s = " << format_number(part.s) << "\n";
  };
  os << "\n[measure]\n";
  if (cfg.measure.kind == "sum") {
    os << "kind = \"sum\"\n";
  } else {
    emit_part(cfg.measure);
  }
  for (const auto& [name, part] : cfg.measure.parts) {
    os << "\n[measure." << name << "]\n";
    emit_part(part);
  }
  os << "\n[problem]\n";
  os << "lambda = " << format_number(cfg.problem.lambda) << "\n";
  os << "\n[solver]\n";
  os << "decay = " << format_number(cfg.solver.decay) << "\n";
  os << "epsilon0 = " << format_number(cfg.solver.epsilon0) << "\n";
  os << "epsilon_min = " << format_number(cfg.solver.epsilon_min) << "\n";
  os << "max_newton = " << cfg.solver.max_newton << "\n";
  os << "newton_tol = " << format_number(cfg.solver.newton_tol) << "\n";
  return os.str();
}

inline grid::MeshPtr build_mesh(const DomainConfig& domain) {
  return domain.dim == 1 ? grid::build_interval_mesh(domain.cells)
                         : grid::build_square_mesh(domain.cells);
}

inline operators::CoefficientField build_coefficient(const CoefficientConfig& cfg,
                                                     const grid::MeshPtr& mesh) {
  if (cfg.kind == "constant") return operators::constant_coefficient(mesh, cfg.value);
  if (cfg.kind == "expression") {
    auto expr = expression::Expression::parse(cfg.expr);
    int dim = mesh->dim;
    return operators::scalar_coefficient(
        mesh, [expr, dim](double x, double y) { return expr.eval(x, y, dim); });
  }
  auto profile_expr = expression::Expression::parse(cfg.profile);
  auto profile = [profile_expr](double y) { return profile_expr.eval(y, y, 1); };
  int axis = cfg.axis == "x" ? 0 : 1;
  return homogenization::layered_coefficient(profile, cfg.epsilon, axis, mesh);
}

inline measures::DiscreteMeasure build_measure_part(const MeasurePart& part,
                                                    const grid::MeshPtr& mesh) {
  if (part.kind == "density") {
    auto expr = expression::Expression::parse(part.expr);
    int dim = mesh->dim;
    return measures::density_measure(
        mesh, [expr, dim](double x, double y) { return expr.eval(x, y, dim); }, part.quad_order);
  }
  if (part.kind == "boundary_power") return measures::boundary_power_density(mesh, part.s);
  return measures::atom_measure(mesh, part.position, part.mass);
}

inline measures::DiscreteMeasure build_measure(const MeasureConfig& cfg,
                                               const grid::MeshPtr& mesh) {
  if (cfg.kind != "sum") return build_measure_part(cfg, mesh);
  measures::DiscreteMeasure acc;
  bool first = true;
  for (const auto& [name, part] : cfg.parts) {
    auto m = build_measure_part(part, mesh);
    acc = first ? std::move(m) : measures::add(acc, m);
    first = false;
  }
  return acc;
}

}  // namespace selab::config
