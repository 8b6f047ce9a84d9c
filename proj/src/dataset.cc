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

#include "monoaudit/dataset.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "monoaudit/csv.h"
#include "monoaudit/errors.h"

namespace monoaudit {
namespace {

using namespace std::chrono;

const std::vector<std::string>& required_columns() {
  static const std::vector<std::string> kRequired = {
      "application_id", "applicant_id", "position_id", "employer_id",
      "model_id",       "score",        "submitted_at"};
  return kRequired;
}

constexpr std::string_view kRecommendedColumn = "recommended";

std::optional<std::string> non_empty(std::string value) {
  if (value.empty()) return std::nullopt;
  return value;
}

bool parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len,
                     int* out) {
  if (pos + len > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
    value = value * 10 + (text[i] - '0');
  }
  *out = value;
  return true;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// FNV-1a over length-prefixed values, so ("ab","c") and ("a","bc") differ.
std::uint64_t hash_tuple(const std::vector<std::string>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (const auto& v : values) {
    std::uint64_t len = v.size();
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(len >> (8 * i)));
    for (char c : v) mix(static_cast<unsigned char>(c));
  }
  return h;
}

void check_column_available(std::span<const ApplicationRecord> records,
                            const std::string& column,
                            std::string_view purpose) {
  if (is_canonical_column(column) || column == kRecommendedColumn) return;
  for (const auto& r : records) {
    if (!r.extra.contains(column)) {
      throw ConfigError(std::string(purpose) + " references missing column '" +
                        column + "'");
    }
  }
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s;
  if (!parse_fixed_int(text, 0, 4, &y) || !parse_fixed_int(text, 5, 2, &mo) ||
      !parse_fixed_int(text, 8, 2, &d) || !parse_fixed_int(text, 11, 2, &h) ||
      !parse_fixed_int(text, 14, 2, &mi) || !parse_fixed_int(text, 17, 2, &s)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

const std::vector<std::string>& canonical_columns() {
  static const std::vector<std::string> kColumns = {
      "application_id", "applicant_id", "position_id", "employer_id",
      "model_id",       "score",        "submitted_at", "race",
      "gender",         "soc_major_group"};
  return kColumns;
}

bool is_canonical_column(std::string_view column) {
  const auto& cols = canonical_columns();
  return std::find(cols.begin(), cols.end(), column) != cols.end();
}

std::optional<std::string> field_value(const ApplicationRecord& r,
                                       std::string_view column) {
  if (column == "application_id") return r.application_id;
  if (column == "applicant_id") return r.applicant_id;
  if (column == "position_id") return r.position_id;
  if (column == "employer_id") return r.employer_id;
  if (column == "model_id") return r.model_id;
  if (column == "score") {
    if (!r.score) return std::nullopt;
    return format_exact(*r.score);
  }
  if (column == "submitted_at") return format_timestamp(r.submitted_at);
  if (column == "race") return r.race;
  if (column == "gender") return r.gender;
  if (column == "soc_major_group") return r.soc_major_group;
  if (column == kRecommendedColumn) {
    if (!r.recommended) return std::nullopt;
    return std::string(*r.recommended ? "1" : "0");
  }
  const auto it = r.extra.find(std::string(column));
  if (it == r.extra.end()) return std::nullopt;
  return it->second;
}

std::string ColumnMapping::source(std::string_view canonical) const {
  const auto it = columns.find(std::string(canonical));
  return it == columns.end() ? std::string(canonical) : it->second;
}

ColumnMapping ColumnMapping::from_json(const nlohmann::json& j) {
  ColumnMapping mapping;
  if (!j.is_object()) throw ConfigError("schema mapping must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!is_canonical_column(key) && key != kRecommendedColumn) {
      throw ConfigError("schema maps unknown field '" + key + "'");
    }
    if (!value.is_string()) {
      throw ConfigError("schema entry '" + key + "' must be a string");
    }
    mapping.columns[key] = value.get<std::string>();
  }
  return mapping;
}

std::vector<ApplicationRecord> parse_dataset(std::istream& in,
                                             const ColumnMapping& schema) {
  CsvReader reader(in);
  auto header = reader.next();
  if (!header || (header->size() == 1 && header->front().empty())) {
    throw DataError("empty file");
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if (!index.emplace((*header)[i], i).second) {
      throw DataError("duplicate header column '" + (*header)[i] + "'", 1);
    }
  }

  std::vector<std::string> missing;
  for (const auto& col : required_columns()) {
    if (!index.contains(schema.source(col))) missing.push_back(schema.source(col));
  }
  if (!missing.empty()) {
    std::string msg = "missing required column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg, 1);
  }

  auto column_of = [&](std::string_view canonical) -> std::optional<std::size_t> {
    const auto it = index.find(schema.source(canonical));
    if (it == index.end()) return std::nullopt;
    return it->second;
  };
  const std::size_t c_app = *column_of("application_id");
  const std::size_t c_applicant = *column_of("applicant_id");
  const std::size_t c_position = *column_of("position_id");
  const std::size_t c_employer = *column_of("employer_id");
  const std::size_t c_model = *column_of("model_id");
  const std::size_t c_score = *column_of("score");
  const std::size_t c_time = *column_of("submitted_at");
  const auto c_race = column_of("race");
  const auto c_gender = column_of("gender");
  const auto c_soc = column_of("soc_major_group");
  const auto c_rec = column_of(kRecommendedColumn);

  std::vector<bool> is_mapped(header->size(), false);
  for (auto c : {c_app, c_applicant, c_position, c_employer, c_model, c_score,
                 c_time}) {
    is_mapped[c] = true;
  }
  for (auto c : {c_race, c_gender, c_soc, c_rec}) {
    if (c) is_mapped[*c] = true;
  }

  std::vector<ApplicationRecord> records;
  while (auto row = reader.next()) {
    const std::size_t line = reader.line();
    if (row->size() == 1 && row->front().empty()) continue;  // blank line
    if (row->size() != header->size()) {
      throw DataError("expected " + std::to_string(header->size()) +
                          " fields, found " + std::to_string(row->size()),
                      line);
    }
    auto& f = *row;
    ApplicationRecord r;
    r.application_id = std::move(f[c_app]);
    r.applicant_id = std::move(f[c_applicant]);
    r.position_id = std::move(f[c_position]);
    r.employer_id = std::move(f[c_employer]);
    r.model_id = std::move(f[c_model]);
    if (r.applicant_id.empty()) throw DataError("empty applicant_id", line);
    if (r.position_id.empty()) throw DataError("empty position_id", line);

    r.score = parse_double(f[c_score]);
    if (r.score && !(*r.score >= 0.0 && *r.score <= 1.0)) {
      throw DataError("score " + f[c_score] + " outside [0,1]", line);
    }
    const auto ts = parse_timestamp(f[c_time]);
    if (!ts) {
      throw DataError("unparseable timestamp '" + f[c_time] + "'", line);
    }
    r.submitted_at = *ts;
    if (c_race) r.race = non_empty(std::move(f[*c_race]));
    if (c_gender) r.gender = non_empty(std::move(f[*c_gender]));
    if (c_soc) r.soc_major_group = non_empty(std::move(f[*c_soc]));
    if (c_rec && !f[*c_rec].empty()) {
      if (f[*c_rec] != "0" && f[*c_rec] != "1") {
        throw DataError("recommended must be 0 or 1", line);
      }
      r.recommended = f[*c_rec] == "1";
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!is_mapped[i]) r.extra.emplace((*header)[i], std::move(f[i]));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ApplicationRecord> load_dataset(const std::filesystem::path& path,
                                            const ColumnMapping& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return parse_dataset(in, schema);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out,
                   std::span<const ApplicationRecord> records) {
  std::set<std::string> extra_columns;
  bool any_outcome = false;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.extra) extra_columns.insert(k);
    any_outcome |= r.recommended.has_value();
  }
  std::vector<std::string> header = canonical_columns();
  header.insert(header.end(), extra_columns.begin(), extra_columns.end());
  if (any_outcome) header.emplace_back(kRecommendedColumn);
  write_csv_row(out, header);

  std::vector<std::string> row;
  for (const auto& r : records) {
    row.clear();
    for (const auto& col : header) row.push_back(field_value(r, col).value_or(""));
    write_csv_row(out, row);
  }
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const ApplicationRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_dataset(out, records);
}

nlohmann::json CleanReport::to_json() const {
  return {{"rows_in", rows_in},
          {"rows_out", rows_out},
          {"removed_test_models", removed_test_models},
          {"removed_unscored", removed_unscored},
          {"deduplicated", deduplicated},
          {"merged_employer_ids", merged_employer_ids}};
}

CleanResult clean(std::vector<ApplicationRecord> records,
                  const CleanOptions& options) {
  CleanReport report;
  report.rows_in = records.size();

  std::erase_if(records, [&](const ApplicationRecord& r) {
    if (options.test_model_ids.contains(r.model_id)) {
      ++report.removed_test_models;
      return true;
    }
    return false;
  });
  std::erase_if(records, [&](const ApplicationRecord& r) {
    if (!r.score) {
      ++report.removed_unscored;
      return true;
    }
    return false;
  });

  for (const auto& col : options.dedup_key) {
    check_column_available(records, col, "dedup key");
  }

  // Earliest submission wins; application_id breaks timestamp ties.
  using Key = std::vector<std::optional<std::string>>;
  std::vector<std::pair<Key, std::size_t>> keyed;
  keyed.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Key key;
    key.reserve(options.dedup_key.size());
    for (const auto& col : options.dedup_key) {
      key.push_back(field_value(records[i], col));
    }
    keyed.emplace_back(std::move(key), i);
  }
  auto earlier = [&](std::size_t a, std::size_t b) {
    return std::tie(records[a].submitted_at, records[a].application_id) <
           std::tie(records[b].submitted_at, records[b].application_id);
  };
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return earlier(a.second, b.second);
  });
  std::vector<std::size_t> kept;
  kept.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    kept.push_back(keyed[i].second);
  }
  report.deduplicated += records.size() - kept.size();

  std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].application_id != records[b].application_id) {
      return records[a].application_id < records[b].application_id;
    }
    return earlier(a, b);
  });
  std::vector<ApplicationRecord> out;
  out.reserve(kept.size());
  for (std::size_t idx : kept) {
    if (!out.empty() && out.back().application_id == records[idx].application_id) {
      ++report.deduplicated;
      continue;
    }
    out.push_back(std::move(records[idx]));
  }

  std::map<std::string, std::string> resolved;
  for (const auto& [from, to] : options.employer_merge_map) {
    if (from == to) continue;
    std::set<std::string> seen = {from};
    std::string target = to;
    while (true) {
      const auto it = options.employer_merge_map.find(target);
      if (it == options.employer_merge_map.end() || it->second == target) break;
      if (!seen.insert(target).second) {
        throw ConfigError("employer merge map cycle through '" + target + "'");
      }
      target = it->second;
    }
    if (target == from) {
      throw ConfigError("employer merge map cycle through '" + from + "'");
    }
    resolved.emplace(from, target);
  }
  for (auto& r : out) {
    const auto it = resolved.find(r.employer_id);
    if (it != resolved.end()) {
      r.employer_id = it->second;
      ++report.merged_employer_ids;
    }
  }

  report.rows_out = out.size();
  return {std::move(out), report};
}

std::vector<ApplicationRecord> binarize(std::vector<ApplicationRecord> records,
                                        double threshold) {
  for (auto& r : records) {
    if (!r.score) {
      throw DataError("application " + r.application_id + " has no score");
    }
    r.recommended = *r.score > threshold;
  }
  return records;
}

std::vector<ApplicationRecord> group_identities(
    std::vector<ApplicationRecord> records, const IdentityKey& key) {
  if (key.key_columns.empty()) throw ConfigError("identity key is empty");

  std::vector<std::size_t> bad_rows;
  std::string bad_column;
  std::vector<std::string> values;
  std::vector<std::string> new_ids(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    values.clear();
    for (const auto& col : key.key_columns) {
      auto v = field_value(records[i], col);
      if (!v) {
        if (bad_rows.empty()) bad_column = col;
        bad_rows.push_back(i);
        break;
      }
      values.push_back(std::move(*v));
    }
    if (values.size() == key.key_columns.size()) {
      new_ids[i] = "id-" + hex64(hash_tuple(values));
    }
  }
  if (!bad_rows.empty()) {
    std::string msg = "identity key column '" + bad_column +
                      "' missing on row(s):";
    for (std::size_t j = 0; j < bad_rows.size() && j < 20; ++j) {
      msg += " " + std::to_string(bad_rows[j] + 1);
    }
    if (bad_rows.size() > 20) msg += " ...";
    throw DataError(msg);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    r.extra.emplace(std::string(kOriginalApplicantColumn), r.applicant_id);
    r.applicant_id = std::move(new_ids[i]);
  }
  return records;
}

Cohorts stratify_by_k(std::span<const ApplicationRecord> records) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_applicant;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_applicant[records[i].applicant_id].push_back(i);
  }
  Cohorts cohorts;
  for (auto& [id, idx] : by_applicant) {
    const std::size_t k = idx.size();
    cohorts[k].push_back({id, std::move(idx)});
  }
  for (auto& [k, cohort] : cohorts) {
    std::sort(cohort.begin(), cohort.end(),
              [](const auto& a, const auto& b) {
                return a.applicant_id < b.applicant_id;
              });
  }
  return cohorts;
}

std::vector<KDistributionRow> k_distribution(const Cohorts& cohorts,
                                             std::size_t top_bucket) {
  std::size_t total = 0;
  for (const auto& [k, c] : cohorts) total += c.size();
  std::vector<KDistributionRow> rows;
  for (const auto& [k, c] : cohorts) {
    if (top_bucket > 0 && k >= top_bucket) {
      if (rows.empty() || !rows.back().open_ended) {
        rows.push_back({top_bucket, true, 0, 0.0});
      }
      rows.back().count += c.size();
    } else {
      rows.push_back({k, false, c.size(), 0.0});
    }
  }
  for (auto& row : rows) {
    row.percent = total == 0 ? 0.0 : 100.0 * static_cast<double>(row.count) /
                                         static_cast<double>(total);
  }
  return rows;
}

}  // namespace monoaudit
