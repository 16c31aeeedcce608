#include "bodt/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "bodt/baselines.hpp"
#include "bodt/io.hpp"
#include "bodt/planner.hpp"
#include "format.hpp"

namespace bodt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

auto row_key(const SweepRow& r) { return std::tuple(r.tb_b, static_cast<int>(r.approach), r.seed); }

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ModelError("report CSV: bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
  return buf;
}

std::string fixed(double v, int digits = 1) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

bool operator==(const SweepRow& a, const SweepRow& b) {
  const bool same_makespan = (std::isnan(a.makespan_s) && std::isnan(b.makespan_s)) ||
                             a.makespan_s == b.makespan_s;
  return a.tb_b == b.tb_b && a.approach == b.approach && a.seed == b.seed && same_makespan &&
         a.blocks == b.blocks && a.feasible == b.feasible;
}

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::kHeuristic:
      return "heuristic";
    case Approach::kCentralised:
      return "centralised";
    case Approach::kRoundRobin:
      return "round_robin";
  }
  return "unknown";
}

Approach parse_approach(std::string_view name) {
  for (Approach a : {Approach::kHeuristic, Approach::kCentralised, Approach::kRoundRobin}) {
    if (to_string(a) == name) return a;
  }
  throw ModelError("unknown approach '" + std::string(name) + "'");
}

std::vector<CellStats> SweepReport::cells() const {
  std::vector<CellStats> out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].tb_b == rows[i].tb_b && rows[j].approach == rows[i].approach) {
      ++j;
    }
    CellStats c{rows[i].tb_b, rows[i].approach};
    c.runs = j - i;
    std::vector<double> ms;
    double blocks = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      if (rows[k].feasible) ++c.feasible_runs;
      blocks += static_cast<double>(rows[k].blocks);
      if (!std::isnan(rows[k].makespan_s)) ms.push_back(rows[k].makespan_s);
    }
    c.mean_blocks = blocks / static_cast<double>(c.runs);
    if (ms.empty()) {
      c.mean_makespan = c.std_makespan = kNaN;
    } else {
      double sum = 0.0;
      for (double m : ms) sum += m;
      c.mean_makespan = sum / static_cast<double>(ms.size());
      double sq = 0.0;
      for (double m : ms) sq += (m - c.mean_makespan) * (m - c.mean_makespan);
      c.std_makespan = ms.size() > 1 ? std::sqrt(sq / static_cast<double>(ms.size() - 1)) : 0.0;
    }
    out.push_back(c);
    i = j;
  }
  return out;
}

std::optional<CellStats> SweepReport::cell(std::int64_t tb_b, Approach approach) const {
  for (const auto& c : cells()) {
    if (c.tb_b == tb_b && c.approach == approach) return c;
  }
  return std::nullopt;
}

std::optional<std::int64_t> SweepReport::min_feasible_tb_b(Approach approach) const {
  for (const auto& c : cells()) {
    if (c.approach == approach && c.feasible_runs == c.runs) return c.tb_b;
  }
  return std::nullopt;
}

SweepReport run_sweep(const Scenario& scenario, std::span<const std::int64_t> tb_values,
                      std::span<const Approach> approaches, const SimConfig& config,
                      int repetitions) {
  if (repetitions < 1) throw ModelError("repetitions must be >= 1");
  config.validate();
  SweepReport report;
  for (const std::int64_t tb : tb_values) {
    const Budget budget(tb);
    const PlanOutcome heuristic = find_plan(scenario, budget);
    const std::int64_t n_vms =
        heuristic.feasible() ? static_cast<std::int64_t>(heuristic.plan->vm_count()) : tb;

    for (const Approach a : approaches) {
      std::optional<Plan> plan;
      bool feasible = false;
      switch (a) {
        case Approach::kHeuristic:
          plan = heuristic.plan;
          feasible = heuristic.feasible();
          break;
        case Approach::kCentralised:
          plan = centralised_plan(scenario, n_vms).plan;
          break;
        case Approach::kRoundRobin:
          plan = round_robin_plan(scenario, n_vms).plan;
          break;
      }
      if (plan && a != Approach::kHeuristic) {
        feasible = plan_metrics(*plan, scenario).total_blocks <= tb;
      }
      for (int rep = 0; rep < repetitions; ++rep) {
        SweepRow row{tb, a, config.seed + static_cast<std::uint64_t>(rep), kNaN, 0, feasible};
        if (plan) {
          SimConfig c = config;
          c.seed = row.seed;
          const SimResult sim = simulate(*plan, scenario, c);
          row.makespan_s = sim.makespan;
          row.blocks = sim.total_blocks;
        }
        report.rows.push_back(row);
      }
    }
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const SweepRow& x, const SweepRow& y) { return row_key(x) < row_key(y); });
  return report;
}

std::string report_csv(const SweepReport& report) {
  std::ostringstream os;
  os << "tb_b,approach,seed,makespan_s,blocks,feasible\n";
  for (const auto& r : report.rows) {
    os << r.tb_b << ',' << to_string(r.approach) << ',' << r.seed << ','
       << detail::format_double(r.makespan_s) << ',' << r.blocks << ','
       << (r.feasible ? "true" : "false") << '\n';
  }
  return os.str();
}

SweepReport parse_report_csv(std::string_view csv) {
  SweepReport report;
  bool header = true;
  for (std::string_view line : split(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "tb_b,approach,seed,makespan_s,blocks,feasible") {
        throw ModelError("report CSV: unexpected header");
      }
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw ModelError("report CSV: expected 6 fields");
    SweepRow r;
    r.tb_b = parse_number<std::int64_t>(f[0], "tb_b");
    r.approach = parse_approach(f[1]);
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.makespan_s = f[3] == "nan" ? kNaN : parse_number<double>(f[3], "makespan_s");
    r.blocks = parse_number<std::int64_t>(f[4], "blocks");
    if (f[5] != "true" && f[5] != "false") throw ModelError("report CSV: bad feasible flag");
    r.feasible = f[5] == "true";
    report.rows.push_back(r);
  }
  return report;
}

std::optional<double> improvement(const SweepReport& report, std::int64_t tb_b, Approach baseline) {
  const auto h = report.cell(tb_b, Approach::kHeuristic);
  const auto b = report.cell(tb_b, baseline);
  if (!h || !b || std::isnan(h->mean_makespan) || std::isnan(b->mean_makespan) ||
      b->mean_makespan <= 0.0) {
    return std::nullopt;
  }
  return (b->mean_makespan - h->mean_makespan) / b->mean_makespan;
}

std::string report_text(const SweepReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%6s  %-12s %5s %9s %16s %14s %12s\n", "tb_b", "approach", "runs",
                "feasible", "mean_makespan_s", "std_makespan_s", "mean_blocks");
  os << line;
  const auto cells = report.cells();
  for (const auto& c : cells) {
    std::snprintf(line, sizeof line, "%6lld  %-12s %5zu %9zu %16s %14s %12s\n",
                  static_cast<long long>(c.tb_b), std::string(to_string(c.approach)).c_str(), c.runs,
                  c.feasible_runs, fixed(c.mean_makespan).c_str(), fixed(c.std_makespan).c_str(),
                  fixed(c.mean_blocks, 2).c_str());
    os << line;
  }

  os << "\nimprovement of heuristic (mean simulated makespan)\n";
  std::vector<std::int64_t> tbs;
  for (const auto& c : cells) {
    if (tbs.empty() || tbs.back() != c.tb_b) tbs.push_back(c.tb_b);
  }
  for (std::int64_t tb : tbs) {
    os << "  tb_b=" << tb;
    for (Approach b : {Approach::kCentralised, Approach::kRoundRobin}) {
      if (!report.cell(tb, b)) continue;
      const auto imp = improvement(report, tb, b);
      os << "  vs " << to_string(b) << ": " << (imp ? pct(*imp) : std::string("n/a"));
    }
    os << '\n';
  }

  os << "\nminimum feasible tb_b\n";
  for (Approach a : {Approach::kHeuristic, Approach::kCentralised, Approach::kRoundRobin}) {
    bool present = false;
    for (const auto& c : cells) present = present || c.approach == a;
    if (!present) continue;
    const auto m = report.min_feasible_tb_b(a);
    os << "  " << to_string(a) << ": " << (m ? std::to_string(*m) : std::string("none")) << '\n';
  }
  return os.str();
}

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::kCsv ? report_csv(report) : report_text(report));
}

}  // namespace bodt
