#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "esml/config_io.hpp"
#include "esml/runner.hpp"

using namespace esml;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json default_config() {
  return json{
      {"version", 1},
      {"es",
       {{"d", 2},
        {"lambda", 2},
        {"n", {1.0, 0.0}},
        {"movement",
         {{"kind", "bivariate_gaussian"}, {"mean", {0.0, 0.0}}, {"cov", {{1.0, 0.0}, {0.0, 1.0}}}}},
        {"step", {{"kind", "constant"}, {"sigma", 1.0}}},
        {"x0", {-1.0, 0.0}},
        {"seed", 42}}},
      {"quadrature", {{"mc_samples", 200000}}},
      {"simulate", {{"T", 10}, {"replicas", 2}, {"log_x", false}}}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> violations_of(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const config_error& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& vs, const std::string& needle) {
  for (const auto& v : vs)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("valid config parses with a formatting-independent hash") {
  const auto doc = default_config();
  const auto a = parse_config_json(doc);
  const auto b = parse_config_json(json::parse(doc.dump(4)));
  REQUIRE(a.config_hash == b.config_hash);
  REQUIRE(a.es.lambda == 2);
  REQUIRE(a.es.seed == 42);
  REQUIRE(a.simulate.replicas == 2);
  REQUIRE(a.quadrature.mc_samples == 200000);
}

TEST_CASE("comments are allowed in config files") {
  const fs::path dir = fresh_dir("esml_cfg_comments");
  const fs::path file = dir / "cfg.json";
  std::ofstream(file) << "// annotated experiment\n" << default_config().dump(2) << "\n";
  const auto cfg = parse_config(file);
  REQUIRE(cfg.es.d == 2);
}

TEST_CASE("structural constraint on n is enforced") {
  auto doc = default_config();
  doc["es"]["d"] = 3;
  doc["es"]["n"] = {1.0, 1.0, 1.0};
  doc["es"]["x0"] = {-1.0, 0.0, 0.0};
  const auto vs = violations_of(doc);
  REQUIRE_FALSE(vs.empty());
  REQUIRE(mentions(vs, "constraint-normal-structure"));
}

TEST_CASE("all violations are reported at once") {
  auto doc = default_config();
  doc["es"]["lambda"] = 0;
  doc["es"]["step"]["sigma"] = -1.0;
  doc["es"]["x0"] = {1.0, 0.0};  // infeasible
  const auto vs = violations_of(doc);
  REQUIRE(vs.size() >= 3);
  REQUIRE(mentions(vs, "population-size"));
  REQUIRE(mentions(vs, "step-size"));
  REQUIRE(mentions(vs, "initial-feasibility"));
}

TEST_CASE("copula and marginal parameters are validated") {
  auto doc = default_config();
  doc["es"]["movement"] = {{"kind", "composed"},
                           {"marginal1", {{"family", "gaussian"}, {"stddev", -1.0}}},
                           {"marginal2", {{"family", "gaussian"}}},
                           {"copula", {{"kind", "gumbel"}, {"theta", 0.5}}}};
  const auto vs = violations_of(doc);
  REQUIRE(mentions(vs, "gumbel-theta"));
  REQUIRE(mentions(vs, "marginal-stddev"));
}

TEST_CASE("missing required fields are named") {
  auto doc = default_config();
  doc["es"].erase("seed");
  doc["es"].erase("n");
  const auto vs = violations_of(doc);
  REQUIRE(mentions(vs, "missing-field: es.seed"));
  REQUIRE(mentions(vs, "missing-field: es.n"));
}

TEST_CASE("lambda = 1 is simulable but rejected by analysis subcommands") {
  auto doc = default_config();
  doc["es"]["lambda"] = 1;
  const auto cfg = parse_config_json(doc);  // parses fine
  const fs::path dir = fresh_dir("esml_cli_lambda1");
  REQUIRE(cli::run_subcommand(cfg, "simulate", dir / "sim") == 0);
  REQUIRE(cli::run_subcommand(cfg, "drift", dir / "drift") == cli::kExitValidation);
  REQUIRE(cli::run_subcommand(cfg, "delta-inf", dir / "di") == cli::kExitValidation);
  try {
    require_analysis_lambda(cfg, "drift");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(mentions(e.violations(), "analysis-population"));
  }
}

TEST_CASE("simulate artifacts are deterministic and jobs-independent") {
  const auto cfg = parse_config_json(default_config());
  const fs::path d1 = fresh_dir("esml_cli_sim1");
  const fs::path d2 = fresh_dir("esml_cli_sim2");
  REQUIRE(cli::run_subcommand(cfg, "simulate", d1, 1) == 0);
  REQUIRE(cli::run_subcommand(cfg, "simulate", d2, 3) == 0);
  for (const char* name : {"trace_r0000.csv", "trace_r0001.csv", "simulate.json"}) {
    REQUIRE(fs::exists(d1 / name));
    REQUIRE(slurp(d1 / name) == slurp(d2 / name));
  }
  // no temp files left behind
  for (const auto& e : fs::directory_iterator(d1))
    REQUIRE(e.path().extension() != ".tmp");
  // header row present, hash embedded, exactly T data rows
  const std::string csv = slurp(d1 / "trace_r0000.csv");
  REQUIRE(csv.find("t,D,Sigma,i_t,j_total,n_dot_move") != std::string::npos);
  REQUIRE(csv.find("config_hash=" + to_hex(cfg.config_hash)) != std::string::npos);
  REQUIRE(csv.find("# stream=") != std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  int data_rows = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++data_rows;
  }
  REQUIRE(data_rows == 10);
}

TEST_CASE("diagnose produces a full report on a small run") {
  auto doc = default_config();
  doc["quadrature"]["mc_samples"] = 100000;
  doc["diagnose"] = {{"T", 120}, {"replicas", 1000}, {"alpha", 0.1}};
  doc["drift"] = {{"alpha_list", {0.1}}, {"delta_lo", 2.0}, {"delta_hi", 6.0},
                  {"delta_points", 3}};
  const auto cfg = parse_config_json(doc);
  const fs::path dir = fresh_dir("esml_cli_diagnose");
  REQUIRE(cli::run_subcommand(cfg, "diagnose", dir, 4) == 0);
  const auto rep = json::parse(slurp(dir / "diagnostics.json"));
  REQUIRE(rep["convergent"].get<bool>());
  REQUIRE(rep["beta"].is_number());
  REQUIRE(rep["delta_infinity"]["estimate"].get<double>() ==
          Catch::Approx(0.28209479177387814).margin(1e-6));
  REQUIRE(rep["drift_curve"].size() == 3);
  REQUIRE(rep["kernel_mass_error"].get<double>() < 1e-6);
  REQUIRE(rep["ks_stationarity"].get<double>() < 0.05);
  REQUIRE(rep["d_mean"].get<double>() > 0.0);
}

TEST_CASE("delta-inf artifact carries the expected estimate and provenance") {
  const auto cfg = parse_config_json(default_config());
  const fs::path dir = fresh_dir("esml_cli_dinf");
  REQUIRE(cli::run_subcommand(cfg, "delta-inf", dir) == 0);
  const auto doc = json::parse(slurp(dir / "delta_inf.json"));
  REQUIRE(std::fabs(doc["estimate"].get<double>() - 0.2820947917738781) < 1e-6);
  REQUIRE(doc["gain_limit"].get<double>() ==
          Catch::Approx(2.0 * doc["estimate"].get<double>()));
  REQUIRE(doc["provenance"]["config_hash"].get<std::string>() == to_hex(cfg.config_hash));
  REQUIRE(doc["provenance"]["subcommand"].get<std::string>() == "delta-inf");
}

TEST_CASE("validate-copula reports density checks and form deviations") {
  auto doc = default_config();
  doc["es"]["movement"] = {{"kind", "composed"},
                           {"marginal1", {{"family", "gaussian"}}},
                           {"marginal2", {{"family", "gaussian"}}},
                           {"copula", {{"kind", "gumbel"}, {"theta", 2.0}}}};
  doc["validate_copula"] = {{"grid_points", 9}, {"tau_samples", 50000}};
  const auto cfg = parse_config_json(doc);
  const fs::path dir = fresh_dir("esml_cli_copula");
  REQUIRE(cli::run_subcommand(cfg, "validate-copula", dir) == 0);
  const auto rep = json::parse(slurp(dir / "copula.json"));
  REQUIRE(std::fabs(rep["density_integral"].get<double>() - 1.0) < 1e-6);
  REQUIRE(rep["max_fd_rel_error"].get<double>() < 1e-4);
  REQUIRE(rep["monotonicity"]["pass"].get<bool>());
  REQUIRE(std::fabs(rep["tau_quadrature"].get<double>() - 0.5) < 1e-5);
  REQUIRE(std::fabs(rep["tau_empirical"].get<double>() - 0.5) < 0.02);
  // the alternative algebraic forms genuinely deviate from the chain-rule
  // density; the report carries the measured deviation instead of asserting
  REQUIRE(rep["psi_ratio_density_max_rel_dev"].get<double>() > 0.01);
  REQUIRE(rep["closed_form_density_max_rel_dev"].get<double>() > 0.01);
}

TEST_CASE("kernel subcommand writes total mass and continuity tables") {
  auto doc = default_config();
  doc["kernel"] = {{"delta_grid", {0.1, 1.0, 5.0}},
                   {"probe_delta", 1.0},
                   {"interval_lo", 0.0},
                   {"interval_hi", 1.0},
                   {"eps_list", {0.1, 0.01, 0.001, 0.0001}}};
  const auto cfg = parse_config_json(doc);
  const fs::path dir = fresh_dir("esml_cli_kernel");
  REQUIRE(cli::run_subcommand(cfg, "kernel", dir) == 0);
  const auto rep = json::parse(slurp(dir / "kernel.json"));
  REQUIRE(rep["kernel_mass_error"].get<double>() < 1e-6);
  REQUIRE(rep["continuity"].size() == 4);
}

TEST_CASE("unknown subcommand fails validation") {
  const auto cfg = parse_config_json(default_config());
  const fs::path dir = fresh_dir("esml_cli_unknown");
  REQUIRE(cli::run_subcommand(cfg, "frobnicate", dir) == cli::kExitValidation);
}
