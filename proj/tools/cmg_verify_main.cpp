// cmg-verify: scenario runner for the contact metric geometry engine.
//
// Exit codes: 0 all checks passed, 1 at least one check failed,
// 2 construction or usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cmg/cmg.hpp"

namespace {

using namespace cmg;

ReportFormat parse_format(const std::string& name) {
  if (name == "human") return ReportFormat::HumanTable;
  if (name == "jsonl") return ReportFormat::JsonLines;
  if (name == "csv") return ReportFormat::Csv;
  throw StructureError("unknown format '" + name + "' (expected human|jsonl|csv)");
}

std::optional<std::array<int, 3>> parse_grid(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::array<int, 3> dims{};
  char x1 = 0, x2 = 0;
  std::istringstream in(spec);
  if (!(in >> dims[0] >> x1 >> dims[1] >> x2 >> dims[2]) || x1 != 'x' || x2 != 'x')
    throw StructureError("bad --grid '" + spec + "' (expected AxBxC)");
  return dims;
}

struct CommonFlags {
  std::string grid;
  int random_n = 0;
  std::uint64_t seed = 7;
  bool seed_set = false;
  double tol = 0;
  bool tol_set = false;
  unsigned threads = 0;
  std::string format = "human";
  std::string out;
};

void attach_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--grid", f.grid, "sampling grid AxBxC (e.g. 8x8x16)");
  cmd->add_option("--random", f.random_n, "quasi-random sample count instead of a grid");
  cmd->add_option("--seed", f.seed, "seed for sampling and test vectors")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--tol", f.tol, "residual tolerance override")
      ->each([&f](const std::string&) { f.tol_set = true; });
  cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
  cmd->add_option("--format", f.format, "report format: human | jsonl | csv")
      ->check(CLI::IsMember({"human", "jsonl", "csv"}));
  cmd->add_option("--out", f.out, "write report to a file instead of stdout");
}

RunOptions to_options(const CommonFlags& f) {
  RunOptions opt;
  opt.grid = parse_grid(f.grid);
  if (f.random_n > 0) opt.random_n = f.random_n;
  if (f.seed_set) opt.seed = f.seed;
  if (f.tol_set) opt.tol = f.tol;
  opt.threads = f.threads;
  return opt;
}

int emit_all(const std::vector<CheckReport>& reports, const CommonFlags& flags) {
  ReportFormat format = parse_format(flags.format);
  std::ostringstream buffer;
  for (const auto& rep : reports) emit_report(rep, format, buffer);

  if (!flags.out.empty()) {
    std::ofstream out(flags.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output file '" << flags.out << "'\n";
      return 2;
    }
    out << buffer.str();
  } else {
    std::cout << buffer.str();
  }

  for (const auto& rep : reports)
    if (rep.verdict == "error") return 2;
  for (const auto& rep : reports)
    if (!rep.passed()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification engine for 3-dimensional contact metric geometry"};
  app.require_subcommand(1);

  // list-scenarios
  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "print the scenario registry");

  // check
  CLI::App* check_cmd = app.add_subcommand("check", "run one scenario");
  std::string scenario_name;
  std::string structure_file;
  std::string f_expr;
  std::string variant;
  double a_value = 0;
  bool a_set = false;
  CommonFlags check_flags;
  check_cmd->add_option("--scenario", scenario_name, "scenario name")->required();
  check_cmd->add_option("--structure", structure_file,
                        "structure-definition file replacing the built-in structure");
  check_cmd->add_option("--f", f_expr, "deformation profile f (expression in z)");
  check_cmd->add_option("--variant", variant, "g^f variant: paper-literal | derived | half-offdiag")
      ->check(CLI::IsMember({"paper-literal", "derived", "half-offdiag"}));
  check_cmd->add_option("--a", a_value, "homothety constant a > 0")
      ->each([&a_set](const std::string&) { a_set = true; });
  attach_common(check_cmd, check_flags);

  // run
  CLI::App* run_cmd = app.add_subcommand("run", "run the scenario suite");
  bool run_all = false;
  CommonFlags run_flags;
  run_cmd->add_flag("--all", run_all, "run every scenario in the registry");
  attach_common(run_cmd, run_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& sc : cmg::builtin_scenarios())
        std::cout << sc.name << "\n    " << sc.description << "\n";
      return 0;
    }

    if (check_cmd->parsed()) {
      auto rows = cmg::builtin_scenarios();
      Scenario sc = find_scenario(rows, scenario_name);
      if (!f_expr.empty()) sc.f_expr = f_expr;
      if (!variant.empty()) sc.variant = variant;
      if (a_set) {
        if (!(a_value > 0)) throw StructureError("--a must be positive");
        sc.a = a_value;
      }
      RunOptions opt = to_options(check_flags);

      CheckReport rep;
      if (!structure_file.empty()) {
        // the file substitutes the built-in structure for this scenario
        BuiltStructure bs{load_structure_file(structure_file), {}, {}};
        rep = run_scenario_on(sc, bs, opt);
        rep.note("structure_file", structure_file);
      } else {
        rep = run_scenario(sc, opt);
      }
      return emit_all({rep}, check_flags);
    }

    if (run_cmd->parsed()) {
      if (!run_all) {
        std::cerr << "error: run requires --all\n";
        return 2;
      }
      RunOptions opt = to_options(run_flags);
      std::vector<CheckReport> reports;
      for (const auto& sc : cmg::builtin_scenarios())
        reports.push_back(run_scenario_or_error(sc, opt));
      return emit_all(reports, run_flags);
    }
  } catch (const StructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
