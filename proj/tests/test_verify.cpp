#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmg/cmg.hpp"

using namespace cmg;

namespace {

std::string write_temp(const char* name, const std::string& content) {
  std::string path = std::string("/tmp/cmg_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("grid sampling excludes the periodic seam") {
  SampleDomain d;
  d.bounds = {{{0.0, M_PI}, {0.0, M_PI}, {0.0, M_PI}}};
  d.periods = {M_PI, M_PI, M_PI};
  d.grid_dims = {2, 2, 2};
  auto pts = sample_points(d);
  CHECK(pts.size() == 8);
  for (const auto& p : pts) {
    CHECK(p[2] < M_PI);
    CHECK(p[0] < M_PI);
  }

  // bounded axes include both endpoints
  SampleDomain b;
  b.bounds = {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  b.grid_dims = {3, 1, 2};
  auto q = sample_points(b);
  CHECK(q.size() == 6);
  CHECK(q.front()[0] == -1.0);
  CHECK(q.back()[0] == 1.0);
  CHECK(q.front()[1] == 0.0);  // single-point axis at the midpoint

  SampleDomain bad = d;
  bad.grid_dims = {0, 2, 2};
  CHECK_THROWS_AS(sample_points(bad), StructureError);
}

TEST_CASE("quasi-random sampling is a pure function of the seed") {
  SampleDomain d;
  d.bounds = {{{0.0, 2.0}, {0.0, 2.0}, {0.0, 2.0}}};
  auto a = sample_points(d, 100, 42);
  auto b = sample_points(d, 100, 42);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(a[i][k] == b[i][k]);

  // first point is a frozen function of seed 42
  auto c = sample_points(d, 1, 42);
  CHECK(c[0][0] == a[0][0]);
  for (int k = 0; k < 3; ++k) {
    CHECK(a[0][k] >= 0.0);
    CHECK(a[0][k] < 2.0);
  }

  auto e = sample_points(d, 100, 43);
  CHECK(a[0][0] != e[0][0]);
}

TEST_CASE("summary statistics are recomputable from the records") {
  CheckReport rep;
  rep.scenario = "demo";
  rep.tolerance = 1e-3;
  for (int i = 0; i < 10; ++i) {
    PointRecord rec;
    rec.point = {double(i), 0, 0};
    rec.residuals = {{"alpha", 1e-6 * i}, {"beta", 1e-7}};
    rec.trusted = i != 9;  // one untrusted point, excluded from the pool
    rep.points.push_back(rec);
  }
  rep.finalize_below_tolerance();
  auto s = rep.summary();
  CHECK(s.n_points == 10);
  CHECK(s.n_untrusted == 1);
  CHECK(s.max == doctest::Approx(8e-6));
  CHECK(rep.verdict == "pass");

  double pool_max = 0, pool_sum = 0;
  std::size_t n = 0;
  for (const auto& rec : rep.points) {
    if (!rec.trusted) continue;
    for (auto& [name, v] : rec.residuals) {
      pool_max = std::max(pool_max, std::abs(v));
      pool_sum += std::abs(v);
      ++n;
    }
  }
  CHECK(s.max == pool_max);
  CHECK(s.mean == doctest::Approx(pool_sum / n));
}

TEST_CASE("json-lines emission round-trips") {
  CheckReport rep;
  rep.scenario = "roundtrip";
  rep.tolerance = 1e-8;
  SplitMix64 rng(5);
  for (int i = 0; i < 25; ++i) {
    PointRecord rec;
    rec.point = rng.next_vec_sym();
    rec.residuals = {{"r1", std::abs(rng.next_sym()) * 1e-9},
                     {"r2", std::abs(rng.next_sym()) * 1e-10}};
    rep.points.push_back(rec);
  }
  rep.finalize_below_tolerance();

  std::ostringstream out;
  emit_report(rep, ReportFormat::JsonLines, out);
  std::istringstream in(out.str());
  std::string line;
  double max_seen = 0;
  double summary_max = -1;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    auto j = nlohmann::json::parse(line);
    if (j.contains("summary")) {
      summary_max = j["summary"]["max"].get<double>();
      CHECK(j["summary"]["scenario"] == "roundtrip");
      CHECK(j["summary"]["provenance"].contains("engine_version"));
    } else {
      CHECK(j["scenario"] == "roundtrip");
      for (auto& [k, v] : j["residuals"].items())
        max_seen = std::max(max_seen, std::abs(v.get<double>()));
      CHECK(j["pass"].get<bool>());
      CHECK(j["trusted"].get<bool>());
    }
  }
  CHECK(lines == 26);  // 25 points + summary
  CHECK(summary_max == max_seen);

  // identical emission twice
  std::ostringstream out2;
  emit_report(rep, ReportFormat::JsonLines, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("csv has exactly header plus one row per point") {
  CheckReport rep;
  rep.scenario = "csv";
  for (int i = 0; i < 7; ++i) {
    PointRecord rec;
    rec.point = {0.1 * i, 0, 0};
    rec.residuals = {{"only", 1e-12}};
    rep.points.push_back(rec);
  }
  rep.finalize_below_tolerance();
  std::ostringstream out;
  emit_report(rep, ReportFormat::Csv, out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  CHECK(line == "scenario,x,y,z,only,pass,trusted");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 7);
}

TEST_CASE("empty report emits summary only") {
  CheckReport rep;
  rep.scenario = "empty";
  rep.finalize_below_tolerance();
  std::ostringstream out;
  emit_report(rep, ReportFormat::JsonLines, out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1);
  CHECK(rep.verdict == "pass");
}

TEST_CASE("scenario registry") {
  auto rows = builtin_scenarios();
  CHECK(rows.size() > 50);

  // names are unique
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) CHECK(rows[i].name != rows[j].name);

  CHECK_THROWS_AS(find_scenario(rows, "no-such-scenario"), StructureError);
  const Scenario& sc = find_scenario(rows, "flat-torus-axioms");
  CHECK(sc.checks.size() == 2);
}

TEST_CASE("run_scenario produces a merged, deterministic report") {
  auto rows = builtin_scenarios();
  Scenario sc = find_scenario(rows, "flat-torus-axioms");
  RunOptions opt;
  opt.random_n = 40;

  CheckReport a = run_scenario(sc, opt);
  CHECK(a.verdict == "pass");
  CHECK(a.points.size() == 40);
  CHECK(!a.points.front().residuals.empty());

  std::ostringstream sa, sb;
  emit_report(a, ReportFormat::JsonLines, sa);
  CheckReport b = run_scenario(sc, opt);
  emit_report(b, ReportFormat::JsonLines, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("scenario construction failure yields an error verdict") {
  Scenario sc;
  sc.name = "broken";
  sc.structure = "gf";
  sc.f_expr = "2.0";  // violates the positivity bound
  sc.variant = "derived";
  sc.checks = {{"axioms"}};
  CheckReport rep = run_scenario_or_error(sc);
  CHECK(rep.verdict == "error");
  CHECK(!rep.passed());

  Scenario unknown;
  unknown.name = "unknown-structure";
  unknown.structure = "klein-bottle";
  unknown.checks = {{"axioms"}};
  CHECK(run_scenario_or_error(unknown).verdict == "error");
}

TEST_CASE("expected-fail scenarios pass only when the check fails") {
  auto rows = builtin_scenarios();
  // the paper-literal variant must fail the axioms at the f^4 scale;
  // the scenario encodes that expectation and therefore passes
  Scenario sc = find_scenario(rows, "gf-axioms-paper-literal-sin");
  RunOptions opt;
  opt.random_n = 60;
  CheckReport rep = run_scenario(sc, opt);
  CHECK(rep.verdict == "pass");
  bool saw_expected = false;
  for (auto& [k, v] : rep.provenance)
    if (k == "expected_verdict" && v == "fail") saw_expected = true;
  CHECK(saw_expected);
}

TEST_CASE("structure file loading") {
  // heisenberg structure written as a definition file, xi and phi derived
  std::string path = write_temp("heis.json", R"json({
    "eta": ["-0.5*y", "0", "0.5"],
    "g": [["0.25*(1+y^2)", "0", "-0.25*y"],
          ["0", "0.25", "0"],
          ["-0.25*y", "0", "0.25"]],
    "domain": {"bounds": [[-1,1],[-1,1],[-1,1]], "grid": [4,4,4]}
  })json");
  ContactStructure s = load_structure_file(path);
  CheckParams params;
  params.points = sample_points(s.domain, 40, 3);
  CheckReport ax = check_contact_axioms(s, params);
  CHECK(ax.passed());
  Evaluator ev({0.2, -0.3, 0.5});
  CHECK(norm(sub(ev(s.xi), Vec3{0, 0, 2})) < 1e-12);

  // supplied xi consistent with the derived Reeb field
  std::string path_xi = write_temp("heis_xi.json", R"json({
    "eta": ["-0.5*y", "0", "0.5"],
    "xi": ["0", "0", "2"],
    "g": [["0.25*(1+y^2)", "0", "-0.25*y"],
          ["0", "0.25", "0"],
          ["-0.25*y", "0", "0.25"]]
  })json");
  CHECK_NOTHROW(load_structure_file(path_xi));

  // inconsistent xi is a hard error
  std::string path_bad = write_temp("heis_badxi.json", R"json({
    "eta": ["-0.5*y", "0", "0.5"],
    "xi": ["0", "0", "1"],
    "g": [["0.25*(1+y^2)", "0", "-0.25*y"],
          ["0", "0.25", "0"],
          ["-0.25*y", "0", "0.25"]]
  })json");
  CHECK_THROWS_AS(load_structure_file(path_bad), StructureError);

  // asymmetric g is rejected
  std::string path_asym = write_temp("asym.json", R"json({
    "eta": ["-0.5*y", "0", "0.5"],
    "g": [["1", "x", "0"], ["0", "1", "0"], ["0", "0", "1"]]
  })json");
  CHECK_THROWS_AS(load_structure_file(path_asym), StructureError);

  // bad expression is rejected with a structure error
  std::string path_expr = write_temp("badexpr.json", R"json({
    "eta": ["-0.5*w", "0", "0.5"],
    "g": [["1","0","0"],["0","1","0"],["0","0","1"]]
  })json");
  CHECK_THROWS_AS(load_structure_file(path_expr), StructureError);

  CHECK_THROWS_AS(load_structure_file("/nonexistent/file.json"), StructureError);
}

TEST_CASE("evaluation errors surface through the parallel runner") {
  // a metric that degenerates inside the sampled box: the guarded solve
  // throws, the parallel runner rethrows, and the scenario layer reports
  // an error verdict instead of silent numbers
  std::string path = write_temp("degenerate.json", R"json({
    "eta": ["cos(2*z)", "sin(2*z)", "0"],
    "g": [["x","0","0"],["0","1","0"],["0","0","1"]],
    "domain": {"bounds": [[-1,1],[-1,1],[-1,1]], "grid": [5,3,3]}
  })json");
  ContactStructure s = load_structure_file(path);
  BuiltStructure bs{s, {}, {}};
  auto rows = builtin_scenarios();
  Scenario sc = find_scenario(rows, "universal-euclidean");  // bianchi + decomposition
  CHECK_THROWS_AS(run_scenario_on(sc, bs), DomainError);
}

TEST_CASE("file-backed structure runs through a scenario") {
  std::string path = write_temp("torus.json", R"json({
    "eta": ["cos(2*z)", "sin(2*z)", "0"],
    "g": [["1","0","0"],["0","1","0"],["0","0","1"]],
    "domain": {"bounds": [[0,3.141592653589793],[0,3.141592653589793],[0,3.141592653589793]],
               "periods": [3.141592653589793, 3.141592653589793, 3.141592653589793],
               "grid": [4,4,8]}
  })json");
  BuiltStructure bs{load_structure_file(path), {}, {}};
  auto rows = builtin_scenarios();
  Scenario sc = find_scenario(rows, "heisenberg-axioms");  // generic axiom row
  CheckReport rep = run_scenario_on(sc, bs);
  CHECK(rep.verdict == "pass");
}
