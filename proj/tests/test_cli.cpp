#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded unless `keep_err`.
Outcome cli(const std::string& args, bool keep_err = false) {
  const std::string cmd = std::string("\"") + JCGRAV_CLI_PATH + "\" " + args + (keep_err ? " 2>&1" : " 2>/dev/null");
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) o.out.append(buf.data(), n);
  const int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("jcgrav_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(f, line)) ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, BuiltinFig1WritesThreeInversionTables) {
  const auto dir = fresh_dir("fig1");
  const auto o = cli("run --builtin fig1 --quiet --out " + dir.string());
  ASSERT_EQ(o.code, 0);
  for (const char* qg : {"0", "5e+06", "1.5e+07"}) {
    const auto f = dir / ("inversion_ode_qg" + std::string(qg) + ".csv");
    ASSERT_TRUE(fs::exists(f)) << f;
    EXPECT_EQ(line_count(f), 2001u);  // header + 2000 rows
  }
  EXPECT_TRUE(fs::exists(dir / "run_metadata.txt"));
}

TEST(Cli, BuiltinFig3WritesThreeQGrids) {
  const auto dir = fresh_dir("fig3");
  const auto o = cli("run --builtin fig3 --quiet --out " + dir.string());
  ASSERT_EQ(o.code, 0);
  std::size_t grids = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("qgrid_", 0) == 0 && e.path().extension() == ".csv") {
      ++grids;
      EXPECT_EQ(line_count(e.path()), 201u * 201u + 1u);
      const auto txt = e.path().parent_path() / (e.path().stem().string() + ".txt");
      EXPECT_EQ(line_count(txt), 201u + 4u);
    }
  }
  EXPECT_EQ(grids, 3u);
}

TEST(Cli, ScenarioFileRoundTrip) {
  const auto dir = fresh_dir("file");
  const auto scen = dir / "s.txt";
  std::ofstream(scen) << "qg = 1e7\nt_end = 1\nn_samples = 11\nmomentum_nodes = 2\noutputs = entropy\n";
  const auto o = cli("run " + scen.string() + " --quiet --out " + dir.string());
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("entropy_ode_qg1e+07.csv"), std::string::npos);
  EXPECT_EQ(line_count(dir / "entropy_ode_qg1e+07.csv"), 12u);
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("codes");
  const auto bad = dir / "bad.txt";
  std::ofstream(bad) << "t_end = -1\n";
  EXPECT_EQ(cli("run " + bad.string() + " --out " + dir.string()).code, 1);
  const auto typo = dir / "typo.txt";
  std::ofstream(typo) << "lamda = 1\n";
  const auto t = cli("run " + typo.string() + " --out " + dir.string(), true);
  EXPECT_EQ(t.code, 1);
  EXPECT_NE(t.out.find("line 1, column 1"), std::string::npos);
  EXPECT_EQ(cli("run --builtin fig9 --out " + dir.string()).code, 1);

  const std::string missing = (dir / "nowhere").string();
  const auto m = cli("run --builtin fig1 --out " + missing, true);
  EXPECT_EQ(m.code, 3);
  EXPECT_NE(m.out.find(missing), std::string::npos);
  EXPECT_EQ(cli("run " + (dir / "absent.txt").string() + " --out " + dir.string()).code, 3);

  // Analytic coefficients with the restored coupling are not unitary enough for
  // the entropy: a numerical failure.
  const auto ana = dir / "ana.txt";
  std::ofstream(ana) << "backend = analytic\nqg = 0\nt_end = 25\nn_samples = 50\nmomentum_nodes = 2\n"
                        "outputs = entropy\n";
  EXPECT_EQ(cli("run " + ana.string() + " --quiet --out " + dir.string()).code, 2);
}

TEST(Cli, CrosscheckShortTime) {
  const auto dir = fresh_dir("cc");
  const auto report = dir / "report.txt";
  const auto o = cli("crosscheck --qg 0 --tmax 2 --tol 1e-10 --report " + report.string());
  ASSERT_EQ(o.code, 0);
  const auto pos = o.out.find("max_inversion_deviation = ");
  ASSERT_NE(pos, std::string::npos);
  const double dev = std::stod(o.out.substr(pos + 26));
  EXPECT_LT(dev, 0.1);
  EXPECT_NE(slurp(report).find("[crosscheck]"), std::string::npos);
  ASSERT_EQ(cli("crosscheck --qg 0 --tmax 2 --samples 5 --report " + report.string()).code, 0);
  const std::string twice = slurp(report);
  EXPECT_NE(twice.find("[crosscheck]"), twice.rfind("[crosscheck]"));
}

TEST(Cli, CrosscheckZeroCouplingAgrees) {
  const auto o = cli("crosscheck --qg 0 --tmax 2 --lambda 0 --samples 21");
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("max_inversion_deviation = 0\n"), std::string::npos) << o.out;
}

TEST(Cli, CrosscheckRejectsBadTolerance) {
  EXPECT_EQ(cli("crosscheck --tol 1e-3").code, 2);
}

TEST(Cli, AuditBranchesPrintsPinnedWinner) {
  const auto o = cli("audit-branches");
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("lattice_points = 75"), std::string::npos);
  EXPECT_NE(o.out.find("e_plus.matches_printed = false"), std::string::npos);
  EXPECT_NE(o.out.find("e_minus.matches_printed = false"), std::string::npos);
  const auto big = cli("audit-branches --qg 1e9");
  ASSERT_EQ(big.code, 0);
  auto best = [](const std::string& s, const std::string& key) {
    const auto p = s.find(key);
    return s.substr(p, s.find('\n', p) - p);
  };
  EXPECT_EQ(best(o.out, "e_plus.best ="), best(big.out, "e_plus.best ="));
  EXPECT_EQ(best(o.out, "e_minus.best ="), best(big.out, "e_minus.best ="));
  EXPECT_EQ(cli("audit-branches --qg 0").code, 2);
}

TEST(Cli, KeysAndVersion) {
  const auto k = cli("keys");
  EXPECT_EQ(k.code, 0);
  EXPECT_NE(k.out.find("ode.weight_scaled_tolerance"), std::string::npos);
  EXPECT_EQ(cli("--version").out, "1.0.0\n");
}

TEST(Cli, CrosscheckLongSweepRegression) {
  // Measured deviation of the restored-coupling analytic backend from the ODE
  // over lambda t <= 25 at qg = 0; frozen to catch silent changes.
  const auto o = cli("crosscheck --qg 0 --tmax 25");
  ASSERT_EQ(o.code, 0);
  const auto pos = o.out.find("max_inversion_deviation = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(o.out.substr(pos + 26)), 0.09000319552574243, 1e-6);
}
