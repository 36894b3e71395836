#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "selab/cli.hpp"

using namespace selab;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_config(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "selab_cli_tests";
  fs::create_directories(dir);
  fs::path path = dir / name;
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("expression grammar") {
  using expression::Expression;
  CHECK(Expression::parse("1 + 2*3").eval(0, 0, 1) == 7.0);
  CHECK(Expression::parse("2^3^1").eval(0, 0, 1) == 8.0);
  CHECK(Expression::parse("-x^2").eval(3, 0, 1) == -9.0);
  CHECK(Expression::parse("sin(pi/2)").eval(0, 0, 1) == Catch::Approx(1.0));
  CHECK(Expression::parse("sqrt(x*y)").eval(2, 8, 2) == Catch::Approx(4.0));
  CHECK(Expression::parse("dist_boundary").eval(0.25, 0.4, 2) == Catch::Approx(0.25));
  CHECK(Expression::parse("dist_boundary^-1").eval(0.25, 0, 1) == Catch::Approx(4.0));
  CHECK(Expression::parse("(1+x)/(2-x)").eval(1, 0, 1) == Catch::Approx(2.0));
  CHECK_THROWS(Expression::parse("1 +"));
  CHECK_THROWS(Expression::parse("foo(2)"));
  CHECK_THROWS(Expression::parse("1 2"));
}

TEST_CASE("config parse and validation") {
  auto cfg = config::parse_config(
      "[domain]\ndim = 2\ncells = 8\n[problem]\nlambda = 0.25\n"
      "[measure]\nkind = \"density\"\nexpr = \"1 + x\"\n");
  CHECK(cfg.domain.dim == 2);
  CHECK(cfg.problem.lambda == 0.25);

  CHECK_THROWS_WITH(config::parse_config("[problem]\nlambda = 1.5\n"), "out of scope regime");
  CHECK_THROWS(config::parse_config("[domain]\ndim = 3\n"));
  CHECK_THROWS(config::parse_config("[domain]\nnope = 1\n"));
  CHECK_THROWS(config::parse_config("[nonsense]\na = 1\n"));
  CHECK_THROWS(config::parse_config("[measure]\nkind = \"weird\"\n"));
  CHECK_THROWS(config::parse_config("garbage line\n"));
}

TEST_CASE("config round-trip is the identity") {
  std::string text =
      "[domain]\ncells = 64\n[coefficient]\nkind = \"layered\"\nprofile = \"2 + sin(2*pi*y)\"\n"
      "epsilon = 0.125\n[measure]\nkind = \"sum\"\n"
      "[measure.a]\nkind = \"density\"\nexpr = \"1\"\n"
      "[measure.b]\nkind = \"atom\"\nposition = 0.25\nmass = 2\n"
      "[experiment]\nepsilons = [0.125, 0.0625]\nseed = 9\n";
  auto cfg = config::parse_config(text);
  auto canonical = config::serialize_config(cfg);
  auto cfg2 = config::parse_config(canonical);
  CHECK(cfg == cfg2);
  CHECK(config::serialize_config(cfg2) == canonical);
}

TEST_CASE("measures built from configs") {
  auto cfg = config::parse_config(
      "[domain]\ncells = 8\n[measure]\nkind = \"sum\"\n"
      "[measure.a]\nkind = \"density\"\nexpr = \"1\"\n"
      "[measure.b]\nkind = \"atom\"\nposition = 0.5\nmass = 2\n");
  auto mesh = config::build_mesh(cfg.domain);
  auto sigma = config::build_measure(cfg.measure, mesh);
  CHECK(sigma.mass == Catch::Approx(3.0).epsilon(1e-13));
  REQUIRE(sigma.atoms.size() == 1);

  auto bad = config::parse_config(
      "[domain]\ndim = 2\ncells = 4\n[measure]\nkind = \"atom\"\n");
  auto sq = config::build_mesh(bad.domain);
  CHECK_THROWS_WITH(config::build_measure(bad.measure, sq), "atoms charge capacity-null sets");
}

TEST_CASE("cmd_solve writes outputs and reports h1") {
  auto path = write_temp_config("sine.toml", slurp("configs/manufactured_sine.toml"));
  fs::path out = fs::temp_directory_path() / "selab_cli_tests" / "out_sine";
  std::ostringstream os, err;
  int code = cli::cmd_solve(path.string(), out.string(), os, err);
  REQUIRE(code == 0);
  auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["converged"].get<bool>());
  CHECK(report["h1_seminorm"].get<double>() ==
        Catch::Approx(M_PI / std::sqrt(2.0)).margin(1e-3));
  CHECK(fs::exists(out / "solution.csv"));

  // config errors exit with 1
  auto bad = write_temp_config("bad.toml", "[problem]\nlambda = 1.5\n");
  CHECK(cli::cmd_solve(bad.string(), out.string(), os, err) == 1);
  auto atom2d = write_temp_config(
      "atom2d.toml", "[domain]\ndim = 2\ncells = 4\n[measure]\nkind = \"atom\"\n");
  CHECK(cli::cmd_solve(atom2d.string(), out.string(), os, err) == 1);

  // solver failures exit with 2
  auto stall = write_temp_config("stall.toml",
                                 "[domain]\ncells = 64\n[measure]\nkind = \"density\"\n"
                                 "expr = \"1\"\n[problem]\nlambda = 1\n"
                                 "[solver]\nmax_newton = 1\n");
  CHECK(cli::cmd_solve(stall.string(), out.string(), os, err) == 2);
}

TEST_CASE("cmd_solve outputs are byte-identical across runs") {
  auto path = write_temp_config("sqrt.toml", slurp("configs/manufactured_sqrt.toml"));
  fs::path out1 = fs::temp_directory_path() / "selab_cli_tests" / "det1";
  fs::path out2 = fs::temp_directory_path() / "selab_cli_tests" / "det2";
  std::ostringstream os, err;
  REQUIRE(cli::cmd_solve(path.string(), out1.string(), os, err) == 0);
  REQUIRE(cli::cmd_solve(path.string(), out2.string(), os, err) == 0);
  CHECK(slurp(out1 / "solution.csv") == slurp(out2 / "solution.csv"));
  CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
}

TEST_CASE("cmd_energy values") {
  std::ostringstream err;

  auto dx1 = write_temp_config("dx1.toml",
                               "[domain]\ncells = 256\n[measure]\nkind = \"density\"\n"
                               "expr = \"1\"\n[problem]\nlambda = 1\n");
  std::ostringstream os1;
  REQUIRE(cli::cmd_energy(dx1.string(), os1, err) == 0);
  auto j1 = nlohmann::json::parse(os1.str());
  CHECK(j1["mass"].get<double>() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(j1["trace_norm"].get<double>() == Catch::Approx(1.0).margin(1e-6));

  auto dx0 = write_temp_config("dx0.toml",
                               "[domain]\ncells = 256\n[measure]\nkind = \"density\"\n"
                               "expr = \"1\"\n[problem]\nlambda = 0\n");
  std::ostringstream os2;
  REQUIRE(cli::cmd_energy(dx0.string(), os2, err) == 0);
  auto j2 = nlohmann::json::parse(os2.str());
  CHECK(j2["trace_norm"].get<double>() == Catch::Approx(0.288675).margin(1e-4));

  auto atom = write_temp_config("atom.toml", slurp("configs/atom_energy.toml"));
  std::ostringstream os3;
  REQUIRE(cli::cmd_energy(atom.string(), os3, err) == 0);
  auto j3 = nlohmann::json::parse(os3.str());
  CHECK(j3["trace_norm"].get<double>() == Catch::Approx(0.707107).margin(2e-3));

  // infinite mass serializes as a tag
  auto bp = write_temp_config("bp.toml",
                              "[domain]\ncells = 64\n[measure]\nkind = \"boundary_power\"\n"
                              "s = 1.2\n[problem]\nlambda = 0.5\n");
  std::ostringstream os4;
  REQUIRE(cli::cmd_energy(bp.string(), os4, err) == 0);
  auto j4 = nlohmann::json::parse(os4.str());
  CHECK(j4["mass"].is_string());
}

TEST_CASE("cmd_distance values") {
  std::ostringstream err;
  auto a = write_temp_config("da.toml",
                             "[domain]\ncells = 256\n[measure]\nkind = \"density\"\n"
                             "expr = \"1\"\n[problem]\nlambda = 1\n");
  auto b = write_temp_config("db.toml",
                             "[domain]\ncells = 256\n[measure]\nkind = \"density\"\n"
                             "expr = \"2\"\n[problem]\nlambda = 1\n");
  std::ostringstream os1;
  REQUIRE(cli::cmd_distance(a.string(), a.string(), os1, err) == 0);
  CHECK(nlohmann::json::parse(os1.str())["d_lambda"].get<double>() == 0.0);

  std::ostringstream os2;
  REQUIRE(cli::cmd_distance(a.string(), b.string(), os2, err) == 0);
  CHECK(nlohmann::json::parse(os2.str())["d_lambda"].get<double>() ==
        Catch::Approx(1.0).margin(1e-6));

  auto a0 = write_temp_config("da0.toml",
                              "[domain]\ncells = 256\n[measure]\nkind = \"density\"\n"
                              "expr = \"1\"\n[problem]\nlambda = 0\n");
  std::ostringstream os3;
  REQUIRE(cli::cmd_distance(a0.string(), b.string(), os3, err) == 0);
  CHECK(nlohmann::json::parse(os3.str())["d_lambda"].get<double>() ==
        Catch::Approx(0.288675).margin(1e-4));

  auto other = write_temp_config("dother.toml",
                                 "[domain]\ncells = 128\n[measure]\nkind = \"density\"\n"
                                 "expr = \"1\"\n");
  std::ostringstream os4;
  CHECK(cli::cmd_distance(a.string(), other.string(), os4, err) == 1);
}

TEST_CASE("cmd_homogenize writes a table") {
  auto path = write_temp_config("lam.toml", slurp("configs/laminate.toml"));
  fs::path out = fs::temp_directory_path() / "selab_cli_tests" / "homog";
  std::ostringstream os, err;
  REQUIRE(cli::cmd_homogenize(path.string(), out.string(), os, err) == 0);
  auto csv = slurp(out / "table.csv");
  CHECK(csv.rfind("epsilon,l2_err,pair_1,pair_2,pair_3,pair_4,hminus1_rhs,d_lambda\n", 0) == 0);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 3);  // header + two epsilons
  auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["a0"][0].get<double>() == Catch::Approx(std::sqrt(3.0)).epsilon(1e-9));

  // unresolved oscillation is a config error
  auto bad = write_temp_config("lam_bad.toml",
                               "[domain]\ncells = 32\n[coefficient]\nkind = \"layered\"\n"
                               "profile = \"2 + sin(2*pi*y)\"\n[measure]\nkind = \"density\"\n"
                               "expr = \"1\"\n[problem]\nlambda = 0.5\n"
                               "[experiment]\nepsilons = [0.125]\n");
  std::ostringstream os2;
  CHECK(cli::cmd_homogenize(bad.string(), out.string(), os2, err) == 1);
}

TEST_CASE("cmd_homogenize outputs are byte-identical across runs") {
  auto path = write_temp_config("lam_det.toml", slurp("configs/laminate.toml"));
  fs::path out1 = fs::temp_directory_path() / "selab_cli_tests" / "homog_det1";
  fs::path out2 = fs::temp_directory_path() / "selab_cli_tests" / "homog_det2";
  std::ostringstream os, err;
  REQUIRE(cli::cmd_homogenize(path.string(), out1.string(), os, err) == 0);
  REQUIRE(cli::cmd_homogenize(path.string(), out2.string(), os, err) == 0);
  CHECK(slurp(out1 / "table.csv") == slurp(out2 / "table.csv"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
}

TEST_CASE("cmd_verify rejects unknown suites") {
  std::ostringstream os, err;
  CHECK(cli::cmd_verify("nonsense", 42, "configs", os, err) == 1);
}
