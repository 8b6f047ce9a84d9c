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

#include "monoaudit/adverse_impact.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "monoaudit/errors.h"
#include "monoaudit/stats.h"

namespace monoaudit {
namespace {

double ratio_or_one(double num, double den) { return den > 0.0 ? num / den : 1.0; }

double percent(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0
                    : 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

// round(n_g * selected_ref / n_ref) with halves rounded up, in integers.
std::uint64_t expected_at_reference(std::uint64_t n_g, std::uint64_t selected_ref,
                                    std::uint64_t n_ref) {
  return (2 * n_g * selected_ref + n_ref) / (2 * n_ref);
}

bool is_audited(const AuditOptions& options, const std::string& label) {
  return options.groups.empty() ||
         std::find(options.groups.begin(), options.groups.end(), label) !=
             options.groups.end();
}

void require_outcome(const ApplicationRecord& r) {
  if (!r.recommended) {
    throw DataError("application " + r.application_id + " is not binarized");
  }
}

}  // namespace

std::optional<std::string> GroupingAttribute::label_of(
    const ApplicationRecord& record) const {
  std::string label;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    auto v = field_value(record, columns[i]);
    if (!v || v->empty()) return std::nullopt;
    if (i > 0) label.push_back(' ');
    label += *v;
  }
  return label;
}

std::vector<std::string> position_filter(std::span<const ApplicationRecord> records,
                                         const GroupingAttribute& attribute,
                                         std::size_t min_reporting) {
  std::map<std::string, std::unordered_set<std::string>> reporting;
  for (const auto& r : records) {
    auto& applicants = reporting[r.position_id];
    if (attribute.label_of(r)) applicants.insert(r.applicant_id);
  }
  std::vector<std::string> eligible;
  for (const auto& [position, applicants] : reporting) {
    if (applicants.size() >= min_reporting) eligible.push_back(position);
  }
  return eligible;
}

std::string reference_group(std::span<const GroupCounts> groups,
                            std::size_t min_group_n) {
  const GroupCounts* best = nullptr;
  for (const auto& g : groups) {
    if (g.n == 0 || g.n < min_group_n) continue;
    if (best == nullptr) {
      best = &g;
      continue;
    }
    // Compare selected/n exactly by cross-multiplication.
    const auto lhs = static_cast<std::uint64_t>(g.selected) * best->n;
    const auto rhs = static_cast<std::uint64_t>(best->selected) * g.n;
    if (lhs > rhs || (lhs == rhs && (g.n > best->n ||
                                     (g.n == best->n && g.group < best->group)))) {
      best = &g;
    }
  }
  if (best == nullptr) throw InsufficientData("no group meets the minimum size");
  return best->group;
}

std::vector<GroupPositionStats> audit_positions(
    std::span<const ApplicationRecord> records, const AuditOptions& options) {
  const auto eligible_list =
      position_filter(records, options.attribute, options.min_reporting);
  const std::set<std::string> eligible(eligible_list.begin(), eligible_list.end());

  std::map<std::string, std::map<std::string, GroupCounts>> counts;
  for (const auto& r : records) {
    if (!eligible.contains(r.position_id)) continue;
    auto label = options.attribute.label_of(r);
    if (!label || !is_audited(options, *label)) continue;
    require_outcome(r);
    auto& c = counts[r.position_id][*label];
    c.group = *label;
    ++c.n;
    if (*r.recommended) ++c.selected;
  }

  std::vector<GroupPositionStats> out;
  for (const auto& [position, by_group] : counts) {
    std::vector<GroupCounts> groups;
    for (const auto& [label, c] : by_group) {
      if (c.n >= options.min_group_n) groups.push_back(c);
    }
    if (groups.empty()) continue;
    const std::string ref_label = reference_group(groups, options.min_group_n);
    const GroupCounts& ref = by_group.at(ref_label);

    for (const auto& g : groups) {
      GroupPositionStats s;
      s.position_id = position;
      s.group = g.group;
      s.n = g.n;
      s.selected = g.selected;
      s.selection_rate = g.rate();
      s.reference_group = ref.group;
      s.reference_n = ref.n;
      s.reference_selected = ref.selected;
      s.reference_rate = ref.rate();
      if (g.group == ref.group) {
        s.impact_ratio = 1.0;
      } else {
        s.impact_ratio = ratio_or_one(s.selection_rate, s.reference_rate);
        s.degenerate = s.reference_rate == 0.0;
        const auto z = pooled_z_test(s.selection_rate, s.n, s.reference_rate,
                                     s.reference_n);
        s.z = z.z;
        s.p_value = z.p_value_two_sided();
        s.degenerate = s.degenerate || z.degenerate;
      }
      s.flag_practical = s.impact_ratio < options.four_fifths;
      s.flag_statistical = std::abs(s.z) >= options.z_threshold;
      s.flag_adverse_raw = s.flag_practical && s.flag_statistical;
      out.push_back(std::move(s));
    }
  }

  std::map<std::string, std::vector<std::size_t>> family;
  for (std::size_t i = 0; i < out.size(); ++i) family[out[i].group].push_back(i);
  for (const auto& [group, rows] : family) {
    std::vector<double> p;
    p.reserve(rows.size());
    for (auto i : rows) p.push_back(out[i].p_value);
    const auto bh = benjamini_hochberg(p, options.alpha);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      auto& s = out[rows[j]];
      s.flag_adverse_bh = s.flag_adverse_raw && bh.rejected[j];
    }
  }
  return out;
}

std::size_t shortfall(std::span<const GroupPositionStats> stats,
                      std::string_view group, AdverseFlag which) {
  std::uint64_t total = 0;
  for (const auto& s : stats) {
    if (s.group != group || !s.flagged(which) || s.reference_n == 0) continue;
    const auto expected = expected_at_reference(s.n, s.reference_selected,
                                                s.reference_n);
    if (expected > s.selected) total += expected - s.selected;
  }
  return static_cast<std::size_t>(total);
}

ImpactSummary summarize(std::span<const GroupPositionStats> stats,
                        std::span<const ApplicationRecord> records,
                        const AuditOptions& options, AdverseFlag which) {
  ImpactSummary summary;

  struct Accum {
    std::size_t positions = 0;
    std::size_t n = 0;
    std::size_t selected = 0;
    double expected_at_ref = 0.0;
    std::size_t flagged_raw = 0;
    std::size_t flagged_bh = 0;
    std::size_t flagged = 0;
    std::set<std::string> biased_positions;
  };
  auto add = [which](Accum& a, const GroupPositionStats& s) {
    ++a.positions;
    a.n += s.n;
    a.selected += s.selected;
    a.expected_at_ref += static_cast<double>(s.n) * s.reference_rate;
    a.flagged_raw += s.flag_adverse_raw;
    a.flagged_bh += s.flag_adverse_bh;
    if (s.flagged(which)) {
      ++a.flagged;
      a.biased_positions.insert(s.position_id);
    }
  };

  std::map<std::string, Accum> by_group;
  for (const auto& s : stats) add(by_group[s.group], s);

  // Application and applicant exposure, over every record of the group.
  struct Exposure {
    std::size_t applications = 0;
    std::size_t applications_to_biased = 0;
    std::unordered_set<std::string> applicants;
    std::unordered_set<std::string> applicants_to_biased;
  };
  std::map<std::string, Exposure> exposure;
  for (const auto& r : records) {
    auto label = options.attribute.label_of(r);
    if (!label) continue;
    const auto it = by_group.find(*label);
    if (it == by_group.end()) continue;
    auto& e = exposure[*label];
    ++e.applications;
    e.applicants.insert(r.applicant_id);
    if (it->second.biased_positions.contains(r.position_id)) {
      ++e.applications_to_biased;
      e.applicants_to_biased.insert(r.applicant_id);
    }
  }

  for (const auto& [group, a] : by_group) {
    const auto& e = exposure[group];
    ImpactSummaryRow row;
    row.group = group;
    row.aggregate_selection_rate =
        a.n == 0 ? 0.0 : static_cast<double>(a.selected) / static_cast<double>(a.n);
    row.aggregate_impact_ratio =
        ratio_or_one(static_cast<double>(a.selected), a.expected_at_ref);
    row.positions = a.positions;
    row.biased_positions = a.flagged;
    row.biased_positions_pct = percent(a.flagged, a.positions);
    row.applications_total = e.applications;
    row.applications_to_biased = e.applications_to_biased;
    row.applications_to_biased_pct = percent(e.applications_to_biased, e.applications);
    row.applicants_total = e.applicants.size();
    row.applicants_to_biased = e.applicants_to_biased.size();
    row.applicants_to_biased_pct =
        percent(e.applicants_to_biased.size(), e.applicants.size());
    row.shortfall = shortfall(stats, group, which);
    row.shortfall_pct = percent(row.shortfall, e.applications);
    summary.groups.push_back(std::move(row));
  }

  // Pooled view across all audited positions.
  {
    std::set<std::string> audited_positions;
    for (const auto& s : stats) audited_positions.insert(s.position_id);
    std::map<std::string, GroupCounts> pooled;
    for (const auto& r : records) {
      if (!audited_positions.contains(r.position_id)) continue;
      auto label = options.attribute.label_of(r);
      if (!label || !by_group.contains(*label)) continue;
      require_outcome(r);
      auto& c = pooled[*label];
      c.group = *label;
      ++c.n;
      if (*r.recommended) ++c.selected;
    }
    std::vector<GroupCounts> groups;
    for (const auto& [label, c] : pooled) groups.push_back(c);
    if (!groups.empty()) {
      const std::string ref_label = reference_group(groups, 1);
      const GroupCounts& ref = pooled.at(ref_label);
      for (const auto& g : groups) {
        PooledAggregateRow row;
        row.group = g.group;
        row.n = g.n;
        row.selected = g.selected;
        row.selection_rate = g.rate();
        row.reference_group = ref_label;
        if (g.group != ref_label) {
          row.impact_ratio = ratio_or_one(g.rate(), ref.rate());
          row.z = pooled_z_test(g.rate(), g.n, ref.rate(), ref.n).z;
        }
        row.flag_adverse = row.impact_ratio < options.four_fifths &&
                           std::abs(row.z) >= options.z_threshold;
        summary.pooled.push_back(std::move(row));
      }
    }
  }

  // SOC rollups. A position's SOC label is the first one seen on its records.
  std::unordered_map<std::string, std::string> soc_of;
  for (const auto& r : records) {
    if (r.soc_major_group && !soc_of.contains(r.position_id)) {
      soc_of.emplace(r.position_id, *r.soc_major_group);
    }
  }
  std::map<std::tuple<int, std::string, std::string>, Accum> by_soc;
  for (const auto& s : stats) {
    const auto it = soc_of.find(s.position_id);
    if (it != soc_of.end()) {
      add(by_soc[{0, it->second, s.group}], s);
    } else {
      add(by_soc[{1, std::string(kNoSocCode), s.group}], s);
    }
    add(by_soc[{2, std::string(kAllSoc), s.group}], s);
  }
  for (const auto& [key, a] : by_soc) {
    SocRollupRow row;
    row.soc_group = std::get<1>(key);
    row.group = std::get<2>(key);
    row.impact_ratio = ratio_or_one(static_cast<double>(a.selected), a.expected_at_ref);
    row.positions = a.positions;
    row.n_adverse = a.flagged_raw;
    row.pct_adverse = percent(a.flagged_raw, a.positions);
    row.n_adverse_bh = a.flagged_bh;
    row.pct_adverse_bh = percent(a.flagged_bh, a.positions);
    summary.soc_rollup.push_back(std::move(row));
  }
  return summary;
}

}  // namespace monoaudit
