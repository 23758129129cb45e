#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cmg/linalg.hpp"
#include "cmg/version.hpp"

namespace cmg::verify {

// Residuals are kept as (name, value) lists rather than maps so emission
// order is exactly insertion order, independent of names.
struct PointRecord {
  Vec3 point{};
  std::vector<std::pair<std::string, double>> residuals;
  bool pass = true;
  bool trusted = true;

  double max_residual() const {
    double worst = 0;
    for (const auto& [name, v] : residuals) worst = std::max(worst, std::abs(v));
    return worst;
  }
};

struct ReportSummary {
  std::size_t n_points = 0;
  std::size_t n_untrusted = 0;
  double max = 0.0;
  double mean = 0.0;
  double p99 = 0.0;
  std::vector<std::pair<std::string, double>> max_by_name;
};

enum class ReportFormat { HumanTable, JsonLines, Csv };

struct CheckReport {
  std::string scenario;
  double tolerance = 1e-8;
  std::vector<PointRecord> points;
  std::string verdict = "pass";  // pass | fail | skipped | error
  std::vector<std::pair<std::string, std::string>> provenance;

  bool passed() const { return verdict == "pass" || verdict == "skipped"; }

  void note(std::string key, std::string value) {
    provenance.emplace_back(std::move(key), std::move(value));
  }

  // Statistics are pooled over residual values at trusted points and are
  // always recomputable from the per-point records.
  ReportSummary summary() const {
    ReportSummary s;
    s.n_points = points.size();
    std::vector<double> pool;
    for (const auto& rec : points) {
      if (!rec.trusted) {
        ++s.n_untrusted;
        continue;
      }
      for (std::size_t k = 0; k < rec.residuals.size(); ++k) {
        const auto& [name, v] = rec.residuals[k];
        double a = std::abs(v);
        pool.push_back(a);
        bool found = false;
        for (auto& [n, m] : s.max_by_name)
          if (n == name) {
            m = std::max(m, a);
            found = true;
          }
        if (!found) s.max_by_name.emplace_back(name, a);
      }
    }
    if (!pool.empty()) {
      double sum = 0;
      for (double v : pool) {
        s.max = std::max(s.max, v);
        sum += v;
      }
      s.mean = sum / static_cast<double>(pool.size());
      std::sort(pool.begin(), pool.end());
      std::size_t rank = static_cast<std::size_t>(
          std::ceil(0.99 * static_cast<double>(pool.size())));
      if (rank == 0) rank = 1;
      s.p99 = pool[rank - 1];
    }
    return s;
  }

  // default verdict rule: max trusted residual below tolerance
  void finalize_below_tolerance() {
    for (auto& rec : points) rec.pass = rec.max_residual() < tolerance;
    verdict = summary().max < tolerance ? "pass" : "fail";
  }

  // inverted rule for nonvanishing certificates: max trusted residual must
  // exceed a strictly positive floor
  void finalize_above_floor(double floor) {
    for (auto& rec : points) rec.pass = rec.max_residual() > floor;
    verdict = summary().max > floor ? "pass" : "fail";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", floor);
    note("verdict_mode", "max_above_floor");
    note("floor", buf);
  }
};

inline CheckReport error_report(const std::string& scenario, const std::string& message) {
  CheckReport r;
  r.scenario = scenario;
  r.verdict = "error";
  r.note("error", message);
  return r;
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json summary_json(const CheckReport& r) {
  const ReportSummary s = r.summary();
  nlohmann::ordered_json sj;
  sj["scenario"] = r.scenario;
  sj["verdict"] = r.verdict;
  sj["tolerance"] = r.tolerance;
  sj["n_points"] = s.n_points;
  sj["n_untrusted"] = s.n_untrusted;
  sj["max"] = s.max;
  sj["mean"] = s.mean;
  sj["p99"] = s.p99;
  nlohmann::ordered_json by_name = nlohmann::ordered_json::object();
  for (const auto& [name, v] : s.max_by_name) by_name[name] = v;
  sj["max_by_name"] = by_name;
  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  prov["engine_version"] = kEngineVersion;
  for (const auto& [k, v] : r.provenance) prov[k] = v;
  sj["provenance"] = prov;
  return sj;
}

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void emit_json_lines(const CheckReport& r, std::ostream& out) {
  for (const auto& rec : r.points) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["point"] = {rec.point[0], rec.point[1], rec.point[2]};
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& [name, v] : rec.residuals) res[name] = v;
    j["residuals"] = res;
    j["pass"] = rec.pass;
    j["trusted"] = rec.trusted;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json tail;
  tail["summary"] = detail::summary_json(r);
  out << tail.dump() << '\n';
}

inline void emit_csv(const CheckReport& r, std::ostream& out) {
  out << "scenario,x,y,z";
  if (!r.points.empty())
    for (const auto& [name, v] : r.points.front().residuals) out << ',' << name;
  out << ",pass,trusted\n";
  for (const auto& rec : r.points) {
    out << r.scenario << ',' << detail::csv_number(rec.point[0]) << ','
        << detail::csv_number(rec.point[1]) << ',' << detail::csv_number(rec.point[2]);
    for (const auto& [name, v] : rec.residuals) out << ',' << detail::csv_number(v);
    out << ',' << (rec.pass ? "true" : "false") << ',' << (rec.trusted ? "true" : "false")
        << '\n';
  }
}

inline void emit_human(const CheckReport& r, std::ostream& out) {
  const ReportSummary s = r.summary();
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %-7s points=%-5zu max=%-12.4g mean=%-12.4g p99=%-12.4g tol=%g",
                r.scenario.c_str(), r.verdict.c_str(), s.n_points, s.max, s.mean, s.p99,
                r.tolerance);
  out << line << '\n';
  for (const auto& [k, v] : r.provenance) out << "    " << k << ": " << v << '\n';
}

inline void emit_report(const CheckReport& r, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::JsonLines: emit_json_lines(r, out); break;
    case ReportFormat::Csv: emit_csv(r, out); break;
    case ReportFormat::HumanTable: emit_human(r, out); break;
  }
}

}  // namespace cmg::verify

namespace cmg {
using verify::CheckReport;
using verify::emit_report;
using verify::error_report;
using verify::PointRecord;
using verify::ReportFormat;
using verify::ReportSummary;
}  // namespace cmg
