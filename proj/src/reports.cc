/*
 * Copyright 2026 The monoaudit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "monoaudit/reports.h"

#include <fstream>
#include <set>

#include "monoaudit/csv.h"
#include "monoaudit/errors.h"

namespace monoaudit {
namespace {

constexpr int kSummaryDecimals = 4;

std::string num(double v) { return format_exact(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "1" : "0"; }
std::string fixed(double v) { return format_fixed(v, kSummaryDecimals); }

nlohmann::json optional_fit(const std::optional<ExpFit>& fit) {
  return fit ? fit->to_json() : nlohmann::json(nullptr);
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError("missing column '" + name + "'", 1);
}

double number_at(const std::vector<std::string>& row, std::size_t c, std::size_t line) {
  const auto v = parse_double(row.at(c));
  if (!v) throw DataError("not a number: '" + row.at(c) + "'", line);
  return *v;
}

std::size_t count_at(const std::vector<std::string>& row, std::size_t c,
                     std::size_t line) {
  const auto v = parse_integer(row.at(c));
  if (!v || *v < 0) throw DataError("not a count: '" + row.at(c) + "'", line);
  return static_cast<std::size_t>(*v);
}

}  // namespace

void write_k_distribution(std::ostream& out, std::span<const KDistributionRow> rows) {
  write_csv_row(out, {"k", "count", "percent"});
  for (const auto& r : rows) {
    write_csv_row(out, {std::to_string(r.k) + (r.open_ended ? "+" : ""), num(r.count),
                        fixed(r.percent)});
  }
}

void write_position_stats(std::ostream& out, std::span<const GroupPositionStats> stats) {
  write_csv_row(out, {"position_id", "group", "n", "selected", "selection_rate",
                      "reference_group", "reference_n", "reference_selected",
                      "reference_rate", "impact_ratio", "z", "p_value", "degenerate",
                      "flag_practical", "flag_statistical", "flag_adverse_raw",
                      "flag_adverse_bh"});
  for (const auto& s : stats) {
    write_csv_row(out, {s.position_id, s.group, num(s.n), num(s.selected),
                        num(s.selection_rate), s.reference_group, num(s.reference_n),
                        num(s.reference_selected), num(s.reference_rate),
                        num(s.impact_ratio), num(s.z), num(s.p_value), flag(s.degenerate),
                        flag(s.flag_practical), flag(s.flag_statistical),
                        flag(s.flag_adverse_raw), flag(s.flag_adverse_bh)});
  }
}

std::vector<GroupPositionStats> read_position_stats(std::istream& in) {
  CsvReader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("empty position stats file");
  const std::vector<std::string> names = {
      "position_id",     "group",          "n",                "selected",
      "selection_rate",  "reference_group", "reference_n",     "reference_selected",
      "reference_rate",  "impact_ratio",   "z",                "p_value",
      "degenerate",      "flag_practical", "flag_statistical", "flag_adverse_raw",
      "flag_adverse_bh"};
  std::vector<std::size_t> c;
  for (const auto& name : names) c.push_back(column(*header, name));
  std::vector<GroupPositionStats> stats;
  while (auto row = reader.next()) {
    if (row->size() != header->size()) {
      throw DataError("wrong number of fields", reader.line());
    }
    const std::size_t line = reader.line();
    auto boolean = [&](std::size_t i) { return count_at(*row, c[i], line) != 0; };
    GroupPositionStats s;
    s.position_id = (*row)[c[0]];
    s.group = (*row)[c[1]];
    s.n = count_at(*row, c[2], line);
    s.selected = count_at(*row, c[3], line);
    s.selection_rate = number_at(*row, c[4], line);
    s.reference_group = (*row)[c[5]];
    s.reference_n = count_at(*row, c[6], line);
    s.reference_selected = count_at(*row, c[7], line);
    s.reference_rate = number_at(*row, c[8], line);
    s.impact_ratio = number_at(*row, c[9], line);
    s.z = number_at(*row, c[10], line);
    s.p_value = number_at(*row, c[11], line);
    s.degenerate = boolean(12);
    s.flag_practical = boolean(13);
    s.flag_statistical = boolean(14);
    s.flag_adverse_raw = boolean(15);
    s.flag_adverse_bh = boolean(16);
    stats.push_back(std::move(s));
  }
  return stats;
}

void write_soc_rollup(std::ostream& out, std::span<const SocRollupRow> rows) {
  write_csv_row(out, {"soc_group", "group", "impact_ratio", "positions", "n_adverse",
                      "pct_adverse", "pct_adverse_bh"});
  for (const auto& r : rows) {
    write_csv_row(out, {r.soc_group, r.group, fixed(r.impact_ratio), num(r.positions),
                        num(r.n_adverse), fixed(r.pct_adverse), fixed(r.pct_adverse_bh)});
  }
}

nlohmann::json impact_summary_json(const ImpactSummary& summary,
                                   std::span<const GroupPositionStats> stats,
                                   const AuditOptions& options) {
  nlohmann::json panel_a = nlohmann::json::array();
  nlohmann::json panel_b = nlohmann::json::array();
  for (const auto& g : summary.groups) {
    panel_a.push_back({{"group", g.group},
                       {"aggregate_selection_rate", g.aggregate_selection_rate},
                       {"aggregate_impact_ratio", g.aggregate_impact_ratio},
                       {"positions", g.positions},
                       {"biased_positions", g.biased_positions},
                       {"biased_positions_pct", g.biased_positions_pct}});
    panel_b.push_back({{"group", g.group},
                       {"applications_to_biased", g.applications_to_biased},
                       {"applications_total", g.applications_total},
                       {"applications_to_biased_pct", g.applications_to_biased_pct},
                       {"applicants_to_biased", g.applicants_to_biased},
                       {"applicants_total", g.applicants_total},
                       {"applicants_to_biased_pct", g.applicants_to_biased_pct},
                       {"shortfall", g.shortfall},
                       {"shortfall_pct", g.shortfall_pct}});
  }
  nlohmann::json pooled = nlohmann::json::array();
  for (const auto& p : summary.pooled) {
    pooled.push_back({{"group", p.group},
                      {"n", p.n},
                      {"selected", p.selected},
                      {"selection_rate", p.selection_rate},
                      {"reference_group", p.reference_group},
                      {"impact_ratio", p.impact_ratio},
                      {"z", p.z},
                      {"flag_adverse", p.flag_adverse}});
  }
  nlohmann::json flagged = nlohmann::json::array();
  std::set<std::string> positions;
  for (const auto& s : stats) {
    positions.insert(s.position_id);
    if (!s.flag_adverse_bh) continue;
    flagged.push_back({{"position_id", s.position_id},
                       {"group", s.group},
                       {"impact_ratio", s.impact_ratio},
                       {"z", s.z},
                       {"p_value", s.p_value}});
  }
  return {{"settings",
           {{"alpha", options.alpha},
            {"four_fifths", options.four_fifths},
            {"z_threshold", options.z_threshold},
            {"min_reporting", options.min_reporting},
            {"min_group_n", options.min_group_n}}},
          {"positions_audited", positions.size()},
          {"panel_a", panel_a},
          {"panel_b", panel_b},
          {"pooled_aggregate", pooled},
          {"flagged_positions", flagged}};
}

void write_distributions(std::ostream& out,
                         std::span<const OutcomeDistribution> distributions) {
  write_csv_row(out, {"k", "n_applicants", "t", "observed_count", "observed", "baseline"});
  for (const auto& d : distributions) {
    for (std::size_t t = 0; t <= d.k; ++t) {
      write_csv_row(out, {num(d.k), num(d.n_applicants), num(t),
                          num(d.observed_counts[t]), num(d.observed[t]),
                          num(d.baseline[t])});
    }
  }
}

void write_rejection_curve(std::ostream& out, const RejectionCurve& curve) {
  write_csv_row(out, {"k", "n_applicants", "observed", "baseline", "observed_fit",
                      "baseline_fit"});
  for (const auto& p : curve.points) {
    const double k = static_cast<double>(p.k);
    write_csv_row(out, {num(p.k), num(p.n_applicants), num(p.observed_rate),
                        num(p.baseline_rate),
                        curve.observed_fit ? num(curve.observed_fit->predict(k)) : "",
                        curve.baseline_fit ? num(curve.baseline_fit->predict(k)) : ""});
  }
}

void write_rejection_table(std::ostream& out, std::span<const RejectionPoint> points) {
  write_csv_row(out, {"k", "count", "baseline", "observed"});
  for (const auto& p : points) {
    write_csv_row(out, {num(p.k), num(p.n_applicants), fixed(p.baseline_rate),
                        fixed(p.observed_rate)});
  }
}

std::vector<RejectionPoint> read_rejection_table(std::istream& in) {
  CsvReader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("empty rejection table");
  const std::size_t ck = column(*header, "k");
  const std::size_t cn = column(*header, "count");
  const std::size_t cb = column(*header, "baseline");
  const std::size_t co = column(*header, "observed");
  auto rate = [&](std::string cell, std::size_t line) {
    double scale = 1.0;
    if (!cell.empty() && cell.back() == '%') {
      cell.pop_back();
      scale = 0.01;
    }
    const auto v = parse_double(cell);
    if (!v) throw DataError("not a rate: '" + cell + "'", line);
    const double r = *v * scale;
    if (!(r >= 0.0 && r <= 1.0)) throw DataError("rate outside [0,1]", line);
    return r;
  };
  std::vector<RejectionPoint> points;
  while (auto row = reader.next()) {
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != header->size()) {
      throw DataError("wrong number of fields", reader.line());
    }
    const std::size_t line = reader.line();
    // Published counts often carry thousands separators.
    std::string count = (*row)[cn];
    std::erase(count, ',');
    (*row)[cn] = count;
    RejectionPoint p;
    p.k = count_at(*row, ck, line);
    p.n_applicants = count_at(*row, cn, line);
    p.baseline_rate = rate((*row)[cb], line);
    p.observed_rate = rate((*row)[co], line);
    points.push_back(p);
  }
  return points;
}

nlohmann::json homogenization_json(const HomogenizationReport& report) {
  nlohmann::json per_k = nlohmann::json::array();
  for (std::size_t i = 0; i < report.distributions.size(); ++i) {
    const auto& d = report.distributions[i];
    const auto& g = report.distribution_gof[i];
    per_k.push_back({{"k", d.k},
                     {"n_applicants", d.n_applicants},
                     {"gof", g ? g->to_json() : nlohmann::json(nullptr)}});
  }
  return {{"per_k", per_k},
          {"joint", report.joint_gof ? report.joint_gof->to_json() : nlohmann::json(nullptr)},
          {"systemic_rejection", rejection_fit_json(report.curve, report.rejection_gof)},
          {"omitted_k", report.omitted_k}};
}

nlohmann::json rejection_fit_json(const RejectionCurve& curve,
                                  const std::optional<GofResult>& gof) {
  return {{"observed_fit", optional_fit(curve.observed_fit)},
          {"baseline_fit", optional_fit(curve.baseline_fit)},
          {"gof", gof ? gof->to_json() : nlohmann::json(nullptr)}};
}

SimulationFits fit_simulation(std::span<const SimulationResult> curve) {
  std::vector<double> ks, sim, base;
  for (const auto& r : curve) {
    ks.push_back(static_cast<double>(r.k));
    sim.push_back(r.systemic_rejection_mean);
    base.push_back(r.baseline_rate);
  }
  SimulationFits fits;
  try {
    fits.simulated = fit_exponential(ks, sim);
  } catch (const InsufficientData&) {
  }
  try {
    fits.baseline = fit_exponential(ks, base);
  } catch (const InsufficientData&) {
  }
  return fits;
}

void write_simulation_csv(std::ostream& out, std::span<const SimulationResult> curve,
                          const SimulationFits& fits) {
  write_csv_row(out, {"k", "n_retained", "simulated", "ci_low", "ci_high", "baseline",
                      "simulated_fit", "baseline_fit"});
  for (const auto& r : curve) {
    const double k = static_cast<double>(r.k);
    write_csv_row(out, {num(r.k), num(r.n_applicants_retained),
                        num(r.systemic_rejection_mean), num(r.ci_low), num(r.ci_high),
                        num(r.baseline_rate),
                        fits.simulated ? num(fits.simulated->predict(k)) : "",
                        fits.baseline ? num(fits.baseline->predict(k)) : ""});
  }
}

nlohmann::json simulation_json(std::span<const SimulationResult> curve) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : curve) out.push_back(r.to_json());
  return out;
}

nlohmann::json simulation_summary_json(std::span<const SimulationResult> curve,
                                       const SimulationFits& fits, double threshold) {
  auto crossing = [&](bool baseline) {
    const auto k = first_k_below(curve, threshold, baseline);
    return k ? nlohmann::json(*k) : nlohmann::json(nullptr);
  };
  return {{"threshold", threshold},
          {"first_k_below_simulated", crossing(false)},
          {"first_k_below_baseline", crossing(true)},
          {"simulated_fit", optional_fit(fits.simulated)},
          {"baseline_fit", optional_fit(fits.baseline)}};
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace monoaudit
