#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "selab/verify.hpp"

namespace selab::cli {

using nlohmann::json;

// exit codes: 0 success, 1 config error, 2 solver failure, 3 verification failure
enum ExitCode { kOk = 0, kConfigError = 1, kSolverError = 2, kVerifyError = 3 };

namespace detail {

inline json finite_or_tag(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

inline config::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config error: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config::parse_config(ss.str());
}

inline singular::SolverOptions solver_options(const config::SolverConfig& cfg) {
  singular::SolverOptions opts;
  opts.epsilon0 = cfg.epsilon0;
  opts.decay = cfg.decay;
  opts.epsilon_min = cfg.epsilon_min;
  opts.newton_tol = cfg.newton_tol;
  opts.max_newton = cfg.max_newton;
  return opts;
}

struct Problem {
  grid::MeshPtr mesh;
  operators::CoefficientField A;
  measures::DiscreteMeasure sigma;
  double lambda = 0.0;
};

inline Problem build_problem(const config::ExperimentConfig& cfg) {
  Problem p;
  p.mesh = config::build_mesh(cfg.domain);
  p.A = config::build_coefficient(cfg.coefficient, p.mesh);
  p.sigma = config::build_measure(cfg.measure, p.mesh);
  p.lambda = cfg.problem.lambda;
  return p;
}

inline json report_to_json(const singular::SolveReport& report, double lambda) {
  json stages = json::array();
  for (const auto& s : report.stages)
    stages.push_back({{"epsilon", s.epsilon},
                      {"newton_steps", s.newton_steps},
                      {"residual", s.residual}});
  json bounds;
  if (report.has_bounds) {
    bounds = {{"energy_lower", finite_or_tag(report.bounds.energy_lower)},
              {"energy_upper", finite_or_tag(report.bounds.energy_upper)},
              {"h1", report.bounds.h1},
              {"energy_pass", report.bounds.energy_pass},
              {"pointwise_checked", report.bounds.pointwise_checked},
              {"pointwise_pass", report.bounds.pointwise_pass}};
  }
  return {{"converged", report.converged},
          {"stages", stages},
          {"h1_seminorm", report.h1_seminorm},
          {"energy_J", report.has_energy ? json(report.energy_J) : json()},
          {"bounds", bounds},
          {"lambda", lambda},
          {"cg_iterations", report.total_cg_iterations}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

inline int cmd_solve(const std::string& config_path, const std::string& out_dir, std::ostream& os,
                     std::ostream& err) {
  detail::Problem p;
  singular::SolverOptions opts;
  try {
    auto cfg = detail::load_config(config_path);
    p = detail::build_problem(cfg);
    opts = detail::solver_options(cfg.solver);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    auto [u, report] = singular::solve_singular(p.mesh, p.A, p.sigma, p.lambda, opts);
    if (p.lambda > 0.0 && p.lambda < 1.0 && p.A.is_symmetric()) {
      report.energy_J = singular::energy_J(u, p.A, p.sigma, p.lambda);
      report.has_energy = true;
    }
    report.bounds = singular::verify_bounds(u, p.A, p.sigma, p.lambda, p.A.alpha, p.A.beta);
    report.has_bounds = true;

    std::filesystem::create_directories(out_dir);
    std::ostringstream field;
    grid::write_field_csv(u, field);
    detail::write_text(std::filesystem::path(out_dir) / "solution.csv", field.str());
    detail::write_text(std::filesystem::path(out_dir) / "report.json",
                       detail::report_to_json(report, p.lambda).dump(2) + "\n");
    os << "converged in " << report.stages.size() << " stages, h1 seminorm "
       << report.h1_seminorm << "\n";
    return report.converged ? kOk : kSolverError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  }
}

inline int cmd_energy(const std::string& config_path, std::ostream& os, std::ostream& err) {
  try {
    auto cfg = detail::load_config(config_path);
    auto mesh = config::build_mesh(cfg.domain);
    auto sigma = config::build_measure(cfg.measure, mesh);
    auto report = potential::energy_report(sigma, cfg.problem.lambda);
    json j = {{"lambda", report.lambda},
              {"trace_norm", detail::finite_or_tag(report.trace_norm)},
              {"cov_energy", detail::finite_or_tag(report.cov_energy)},
              {"h_minus1", detail::finite_or_tag(report.h_minus1)},
              {"mass", detail::finite_or_tag(report.mass)}};
    os << j.dump(2) << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

inline int cmd_distance(const std::string& config_a, const std::string& config_b, std::ostream& os,
                        std::ostream& err) {
  try {
    auto cfg_a = detail::load_config(config_a);
    auto cfg_b = detail::load_config(config_b);
    if (!(cfg_a.domain == cfg_b.domain))
      throw Error("config error: distance requires identical domain blocks");
    auto mesh = config::build_mesh(cfg_a.domain);
    auto sigma = config::build_measure(cfg_a.measure, mesh);
    auto nu = config::build_measure(cfg_b.measure, mesh);
    double d = potential::d_lambda(sigma, nu, cfg_a.problem.lambda);
    json j = {{"d_lambda", d}};
    os << j.dump(2) << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

inline int cmd_homogenize(const std::string& config_path, const std::string& out_dir,
                          std::ostream& os, std::ostream& err) {
  homogenization::OscillatingFamily family;
  homogenization::FamilyKind kind;
  detail::Problem p;
  singular::SolverOptions opts;
  int n_test = 4;
  try {
    auto cfg = detail::load_config(config_path);
    if (cfg.coefficient.kind != "layered")
      throw Error("config error: homogenize requires coefficient.kind = \"layered\"");
    if (cfg.experiment.epsilons.empty())
      throw Error("config error: homogenize requires experiment.epsilons");
    p.mesh = config::build_mesh(cfg.domain);
    p.sigma = config::build_measure(cfg.measure, p.mesh);
    p.lambda = cfg.problem.lambda;
    auto profile_expr = expression::Expression::parse(cfg.coefficient.profile);
    family.profile = [profile_expr](double y) { return profile_expr.eval(y, y, 1); };
    family.axis = cfg.coefficient.axis == "x" ? 0 : 1;
    family.epsilons = cfg.experiment.epsilons;
    family.validate();
    for (double eps : family.epsilons)
      if (p.mesh->resolution() > eps / 16.0 * (1.0 + 1e-12))
        throw Error("mesh must resolve epsilon");
    kind = homogenization::family_kind_from_string(cfg.experiment.family);
    opts = detail::solver_options(cfg.solver);
    n_test = cfg.experiment.test_functions;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    auto table = homogenization::run_h_convergence(
        family, kind, p.sigma, p.lambda, homogenization::default_test_functions(p.mesh, n_test),
        p.mesh, opts);

    std::ostringstream csv;
    csv << "epsilon,l2_err";
    for (size_t j = 0; j < table.rows.front().pairs.size(); ++j) csv << ",pair_" << j + 1;
    csv << ",hminus1_rhs,d_lambda\n";
    char buf[64];
    auto put = [&](double v, char sep) {
      std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
      csv << buf;
    };
    std::vector<double> eps_list, l2s, rhss, dls;
    for (const auto& row : table.rows) {
      put(row.eps, ',');
      put(row.l2_err, ',');
      for (double pr : row.pairs) put(pr, ',');
      put(row.hminus1_rhs, ',');
      put(row.d_lambda, '\n');
      eps_list.push_back(row.eps);
      l2s.push_back(row.l2_err);
      rhss.push_back(row.hminus1_rhs);
      dls.push_back(row.d_lambda);
    }
    std::filesystem::create_directories(out_dir);
    detail::write_text(std::filesystem::path(out_dir) / "table.csv", csv.str());

    json rates = {{"l2_rate", homogenization::fitted_rate(eps_list, l2s)},
                  {"hminus1_rhs_rate", homogenization::fitted_rate(eps_list, rhss)},
                  {"d_lambda_rate", homogenization::fitted_rate(eps_list, dls)}};
    json a0 = p.mesh->dim == 1 ? json::array({table.a0[0]})
                               : json::array({table.a0[0], table.a0[1]});
    json summary = {{"a0", a0},
                    {"lambda", table.lambda},
                    {"mesh_h", table.mesh_h},
                    {"dlambda_nonvanishing", table.dlambda_nonvanishing},
                    {"rates", rates}};
    detail::write_text(std::filesystem::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    os << "wrote " << table.rows.size() << " rows to " << out_dir << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  }
}

inline int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& configs_dir,
                      std::ostream& os, std::ostream& err) {
  verify::Context ctx;
  ctx.seed = seed;
  ctx.configs_dir = configs_dir;
  try {
    return verify::run_suite(suite, ctx, os) ? kOk : kVerifyError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace selab::cli
