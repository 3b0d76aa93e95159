// jcgrav: run scenarios, compare the two backends, audit the closed-form branches.
//
// Exit codes: 0 success, 1 scenario error, 2 numerical failure, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "jcgrav/crosscheck.hpp"
#include "jcgrav/run.hpp"

namespace {

using namespace jcgrav;

constexpr int kExitScenario = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read scenario file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Maps library errors onto exit codes, printing the message to stderr.
template <class F>
int guarded(const char* what, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "jcgrav " << what << ": scenario error: " << e.what() << "\n";
    return kExitScenario;
  } catch (const ValidationError& e) {
    std::cerr << "jcgrav " << what << ": scenario error: " << e.what() << "\n";
    return kExitScenario;
  } catch (const IoError& e) {
    std::cerr << "jcgrav " << what << ": I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NoVariantMatchError& e) {
    std::cerr << "jcgrav " << what << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "jcgrav " << what << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    std::cerr << "jcgrav " << what << ": numerical failure: out of memory\n";
    return kExitNumerical;
  }
}

void print_audit(std::ostream& os, const BranchAuditReport& r) {
  using detail::format_double;
  os << "lattice_points = " << r.points << "\n";
  for (int sign = 0; sign < 2; ++sign) {
    const auto& rows = sign == 0 ? r.plus : r.minus;
    const char* name = sign == 0 ? "e_plus" : "e_minus";
    for (std::size_t i = 0; i < rows.size(); ++i)
      os << name << ".variant." << i << " = " << describe(rows[i].variant) << " ; max_rel_residual "
         << format_double(rows[i].max_rel_residual) << "\n";
  }
  os << "e_plus.best = " << describe(r.best_plus) << "\n";
  os << "e_plus.best_residual = " << format_double(r.best_plus_residual) << "\n";
  os << "e_plus.matches_printed = " << (r.best_plus == kPrintedPlus ? "true" : "false") << "\n";
  os << "e_minus.best = " << describe(r.best_minus) << "\n";
  os << "e_minus.best_residual = " << format_double(r.best_minus_residual) << "\n";
  os << "e_minus.matches_printed = " << (r.best_minus == kPrintedMinus ? "true" : "false") << "\n";
  os << "e_plus.pinned = " << describe(kAuditedPlus) << "\n";
  os << "e_minus.pinned = " << describe(kAuditedMinus) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jaynes-Cummings dynamics of a two-level atom falling through a cavity field"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a scenario file or a builtin scenario and write its tables");
  std::string scenario_path, builtin, out_dir;
  std::size_t threads = default_thread_count();
  bool quiet = false;
  auto* path_opt = run->add_option("scenario", scenario_path, "Scenario file (key = value lines)");
  auto* builtin_opt = run->add_option("--builtin", builtin, "Builtin scenario: fig1, fig2 or fig3");
  path_opt->excludes(builtin_opt);
  run->add_option("--out", out_dir, "Existing output directory")->required();
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "No progress on stderr");

  // crosscheck
  auto* cc = app.add_subcommand("crosscheck", "Compare analytic and ODE backends over one sweep");
  CrosscheckOptions copt;
  double lambda_override = 0.0;
  std::string report_path;
  cc->add_option("--qg", copt.qg, "q*g in rad/s^2")->check(CLI::NonNegativeNumber);
  cc->add_option("--tmax", copt.tmax, "End of the sweep in lambda*t")->check(CLI::PositiveNumber);
  cc->add_option("--tol", copt.tol, "ODE tolerance");
  auto* lambda_opt = cc->add_option("--lambda", lambda_override, "Coupling override in rad/s");
  cc->add_option("--samples", copt.samples, "Sample count")->check(CLI::Range(2, 1000000));
  cc->add_option("--nodes", copt.momentum_nodes, "Momentum nodes")->check(CLI::Range(1, 400));
  cc->add_flag("--literal", copt.literal_paper_mode, "Analytic coefficients without the restored coupling power");
  cc->add_option("--report", report_path, "Append the summary to this file");

  // audit-branches
  auto* audit = app.add_subcommand("audit-branches", "Score every branch variant of the closed-form phase integrals");
  AuditLattice lattice;
  audit->add_option("--qg", lattice.qg, "q*g values of the lattice")->delimiter(',');
  audit->add_option("--lambda-t", lattice.lambda_t, "lambda*t values of the lattice")->delimiter(',');
  audit->add_option("--momenta", lattice.momenta, "Momentum values of the lattice")->delimiter(',');

  // keys
  auto* keys = app.add_subcommand("keys", "List scenario keys with units");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return guarded("run", [&] {
      if (scenario_path.empty() && builtin.empty()) throw ValidationError("run needs a scenario file or --builtin");
      const Scenario s = builtin.empty() ? parse_scenario(read_text(scenario_path)) : builtin_scenario(builtin);
      namespace fs = std::filesystem;
      std::error_code ec;
      if (!fs::is_directory(out_dir, ec)) throw IoError("output directory does not exist: " + out_dir);
      ProgressFn progress;
      if (!quiet) progress = [](const std::string& m) { std::cerr << "[jcgrav] " << m << std::endl; };
      const RunResult r = run_scenario(s, progress, threads);
      const auto files = write_outputs(r, out_dir);
      for (const auto& w : r.warnings) std::cerr << "[jcgrav] warning: " << w << "\n";
      for (const auto& f : files) std::cout << (fs::path(out_dir) / f).string() << "\n";
      return 0;
    });
  }
  if (*cc) {
    return guarded("crosscheck", [&] {
      if (*lambda_opt) copt.lambda = lambda_override;
      check_ode_tolerance(copt.tol);
      const auto rep = crosscheck(copt);
      const std::string text = to_text(rep);
      std::cout << text;
      if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::app | std::ios::binary);
        if (!f) throw IoError("cannot open report file: " + report_path);
        f << "[crosscheck]\n" << text << "\n";
        if (!f) throw IoError("failed writing report file: " + report_path);
      }
      return 0;
    });
  }
  if (*audit) {
    return guarded("audit-branches", [&] {
      try {
        print_audit(std::cout, audit_branches(PhysicalParams{}, lattice));
        return 0;
      } catch (const NoVariantMatchError& e) {
        print_audit(std::cout, e.report());
        throw;
      }
    });
  }
  if (*keys) {
    for (const auto& [k, unit] : scenario_keys()) std::cout << k << "\t" << unit << "\n";
    return 0;
  }
  return 0;
}
