#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "traceinv/traceinv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::path(TRACEINV_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + TRACEINV_CLI + "\" --out \"" + out.string() + "\" " + args + " > \"" +
                          (out / "stdout.txt").string() + "\" 2> \"" + (out / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, TraceOfIdentity) {
  const fs::path dir = scratch("trace_identity");
  write_text(dir / "eye.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n");
  ASSERT_EQ(run_cli("trace --matrix \"" + (dir / "eye.mtx").string() + "\" --t 0", dir), 0);
  const json j = load(dir / "trace.json");
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["value"].get<double>(), 3.0);
  EXPECT_EQ(j[0]["method"], "exact-cholesky");
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, TraceOfDiagonalCsv) {
  const fs::path dir = scratch("trace_diag");
  write_text(dir / "d.csv", "2,0\n0,4\n");
  ASSERT_EQ(run_cli("trace --matrix \"" + (dir / "d.csv").string() + "\" --t 0,1 --method cholesky,eigen", dir), 0);
  const json j = load(dir / "trace.json");
  ASSERT_EQ(j.size(), 4u);
  // 1/2 + 1/4, then 1/3 + 1/5
  EXPECT_NEAR(j[0]["value"].get<double>(), 0.75, 1e-15);
  EXPECT_NEAR(j[1]["value"].get<double>(), 1.0 / 3.0 + 0.2, 1e-15);
  EXPECT_NEAR(j[2]["value"].get<double>(), 0.75, 1e-14);
  EXPECT_NEAR(j[3]["value"].get<double>(), 1.0 / 3.0 + 0.2, 1e-14);
}

TEST(Cli, SlqAgreesWithCholeskyOnKernel) {
  const fs::path dir = scratch("trace_kernel");
  ASSERT_EQ(run_cli("trace --kernel 10,0.1 --t 0.01 --method cholesky,slq --nv 200 --seed 3", dir), 0);
  const json j = load(dir / "trace.json");
  ASSERT_EQ(j.size(), 2u);
  const double exact = j[0]["value"];
  const double est = j[1]["value"];
  const double se = j[1]["std_error"];
  EXPECT_GT(se, 0.0);
  EXPECT_LE(std::abs(est - exact), 3.0 * se);
  EXPECT_EQ(j[1]["n_v"], 200);
  EXPECT_EQ(j[1]["seed"], 3);
}

TEST(Cli, BoundSweepMatchesClosedForm) {
  const fs::path dir = scratch("interp_bound");
  ASSERT_EQ(run_cli("interpolate --kernel 6,0.1 --variant bound --sweep 1e-3,1e2,12,log", dir), 0);
  const json j = load(dir / "interpolant.json");
  const double tau0 = j["tau0"];
  const auto rows = read_csv(dir / "curve.csv");
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "tau_exact", "tau_interp", "rel_error"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][0]);
    const double v = std::stod(rows[i][2]);
    EXPECT_NEAR(v, tau0 / (1.0 + t * tau0), 1e-15 * tau0);
    // The upper bound never falls below tau.
    EXPECT_GE(v, std::stod(rows[i][1]) * (1.0 - 1e-14));
  }
}

TEST(Cli, RationalReproducesNodes) {
  const fs::path dir = scratch("interp_rational");
  ASSERT_EQ(run_cli("interpolate --kernel 8,0.1 --variant rational --nodes 0.01,0.1,1,10 --sweep 1e-4,1e3,20,log",
                    dir),
            0);
  const json j = load(dir / "interpolant.json");
  EXPECT_EQ(j["interpolant"]["variant"], "rational");
  ASSERT_EQ(j["nodes"].size(), 4u);
  for (const auto& n : j["nodes"]) EXPECT_LE(n["rel_error"].get<double>(), 1e-8);
  EXPECT_LT(j["sweep_max_rel_error"].get<double>(), 0.05);
  // CSV values carry 17 significant digits.
  const auto rows = read_csv(dir / "curve.csv");
  EXPECT_EQ(std::stod(rows[1][0]), 1e-4);
}

TEST(Cli, BasisOrderMismatchFails) {
  const fs::path dir = scratch("interp_mismatch");
  EXPECT_NE(run_cli("interpolate --kernel 4,0.1 --variant basis --p 3 --nodes 0.1,1", dir), 0);
  EXPECT_NE(slurp(dir / "stderr.txt").find("error:"), std::string::npos);
}

TEST(Cli, OrthoPrintsTable) {
  const fs::path dir = scratch("ortho");
  ASSERT_EQ(run_cli("ortho --p 9", dir), 0);
  const std::string out = slurp(dir / "stdout.txt");
  EXPECT_EQ(out, traceinv::format_table(traceinv::gram_schmidt(9)));
  EXPECT_NE(out.find("75582"), std::string::npos);
  const json j = load(dir / "ortho.json");
  EXPECT_EQ(j["rows"].size(), 9u);
}

TEST(Cli, OrthoRejectsBadOrder) {
  const fs::path dir = scratch("ortho_bad");
  EXPECT_NE(run_cli("ortho --p 0", dir), 0);
}

TEST(Cli, GcvExperimentTable) {
  const fs::path dir = scratch("gcv");
  ASSERT_EQ(run_cli("gcv-experiment --design 120,50,2 --p 0,1 --seed 1", dir), 0);
  const json j = load(dir / "gcv_table.json");
  ASSERT_EQ(j["rows"].size(), 2u);
  for (const char* key : {"algorithm", "interpolate", "interpolant_points", "N_tr", "N_tot", "T_tr", "T_tot",
                          "V_theta_star", "log10_theta_star", "theta_star", "error"}) {
    EXPECT_TRUE(j["rows"][0].contains(key)) << key;
  }
  EXPECT_EQ(j["rows"][0]["N_tr"], j["rows"][0]["N_tot"]);
  EXPECT_EQ(j["rows"][1]["N_tr"], 3);
  EXPECT_GE(j["rows"][1]["N_tot"].get<long>(), 40);
  EXPECT_EQ(j["rows"][0]["error"].get<double>(), 0.0);
  const auto rows = read_csv(dir / "gcv_curve.csv");
  ASSERT_GT(rows.size(), 300u);
  EXPECT_EQ(rows[0].size(), 6u);
  EXPECT_GE(j["local_minima_exact"].size(), 1u);
  const json manifest = load(dir / "manifest.json");
  EXPECT_EQ(manifest["subcommand"], "gcv-experiment");
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["config"]["design"]["seed"], 2);
}

TEST(Cli, GpExperimentCsv) {
  const fs::path dir = scratch("gp");
  ASSERT_EQ(run_cli("gp-experiment --kernel 8,0.1 --nodes 0.1 --nodes 0.01,0.1,1 --sweep 1e-3,1e2,15,log", dir), 0);
  const auto rows = read_csv(dir / "gp_curves.csv");
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "tau_exact", "tau_upper", "tau_lower", "rel_error_upper",
                                               "tau_p1", "rel_error_p1", "tau_p3", "rel_error_p3"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(std::stod(rows[i][3]), std::stod(rows[i][1]));
    EXPECT_GE(std::stod(rows[i][2]), std::stod(rows[i][1]));
  }
  EXPECT_TRUE(fs::exists(dir / "gp_summary.json"));
}

TEST(Cli, InequalitiesClean) {
  const fs::path dir = scratch("ineq");
  ASSERT_EQ(run_cli("check-inequalities --trials 20 --n 8 --harmonic-trials 50 --seed 5", dir), 0);
  const json j = load(dir / "inequalities.json");
  ASSERT_EQ(j.size(), 4u);
  for (const auto& c : j) EXPECT_EQ(c["violations"], 0);
}

TEST(Cli, BadInputExitsNonzero) {
  const fs::path dir = scratch("bad");
  write_text(dir / "bad.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 2 x\n");
  EXPECT_NE(run_cli("trace --matrix \"" + (dir / "bad.mtx").string() + "\"", dir), 0);
  EXPECT_NE(slurp(dir / "stderr.txt").find("bad.mtx:4:"), std::string::npos);
  EXPECT_NE(run_cli("trace", dir), 0);
  EXPECT_NE(run_cli("trace --kernel 4,0.1 --design 10,5,1", dir), 0);
  write_text(dir / "indef.csv", "1,2\n2,1\n");
  EXPECT_NE(run_cli("trace --matrix \"" + (dir / "indef.csv").string() + "\"", dir), 0);
}

TEST(Cli, Version) {
  const fs::path dir = scratch("version");
  EXPECT_EQ(run_cli("--version", dir), 0);
  EXPECT_NE(slurp(dir / "stdout.txt").find(TRACEINV_VERSION), std::string::npos);
}
