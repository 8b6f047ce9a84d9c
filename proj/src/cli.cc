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

#include "monoaudit/cli.h"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "monoaudit/adverse_impact.h"
#include "monoaudit/config.h"
#include "monoaudit/counterfactual.h"
#include "monoaudit/csv.h"
#include "monoaudit/dataset.h"
#include "monoaudit/errors.h"
#include "monoaudit/homogenization.h"
#include "monoaudit/reports.h"
#include "monoaudit/synthgen.h"

namespace monoaudit {
namespace {

namespace fs = std::filesystem;

using Override = std::function<void(RunConfig&)>;

struct Invocation {
  fs::path config_path;
  std::vector<Override> overrides;
  fs::path input;
  fs::path outcomes;
  fs::path spec;
  fs::path table;
};

template <typename T, typename Apply>
CLI::Option* override_option(CLI::App* app, const std::string& name, Invocation& inv,
                             Apply apply, const std::string& help) {
  return app->add_option_function<T>(
      name,
      [&inv, apply](const T& value) {
        inv.overrides.push_back([apply, value](RunConfig& c) { apply(c, value); });
      },
      help);
}

void add_common(CLI::App* app, Invocation& inv) {
  app->add_option("--config", inv.config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  override_option<std::string>(
      app, "--out", inv, [](RunConfig& c, const std::string& v) { c.output_dir = v; },
      "Output directory (default: $" + std::string(kOutputDirEnv) + " or .)");
  override_option<std::uint64_t>(
      app, "--seed", inv, [](RunConfig& c, std::uint64_t v) { c.seed = v; }, "Seed");
}

void add_pipeline(CLI::App* app, Invocation& inv) {
  app->add_option("--input", inv.input, "Application records CSV")
      ->required()
      ->check(CLI::ExistingFile);
  override_option<double>(
      app, "--threshold", inv, [](RunConfig& c, double v) { c.threshold = v; },
      "Score threshold; recommended iff score > threshold (default 0.5)");
  override_option<std::vector<std::string>>(
      app, "--test-models", inv,
      [](RunConfig& c, const std::vector<std::string>& v) {
        c.test_models = {v.begin(), v.end()};
      },
      "Model ids to drop")
      ->delimiter(',');
  override_option<std::vector<std::string>>(
      app, "--dedup-key", inv,
      [](RunConfig& c, const std::vector<std::string>& v) { c.dedup_key = v; },
      "Columns identifying duplicate applications")
      ->delimiter(',');
  override_option<std::vector<std::string>>(
      app, "--identity-key", inv,
      [](RunConfig& c, const std::vector<std::string>& v) { c.identity_key = v; },
      "Columns identifying one applicant across resumes")
      ->delimiter(',');
}

void add_homogenization(CLI::App* app, Invocation& inv) {
  override_option<std::size_t>(
      app, "--k-min", inv, [](RunConfig& c, std::size_t v) { c.k_min = v; },
      "Smallest k");
  override_option<std::size_t>(
      app, "--k-max", inv, [](RunConfig& c, std::size_t v) { c.k_max = v; },
      "Largest k (0: all)");
  override_option<double>(
      app, "--min-expected", inv, [](RunConfig& c, double v) { c.min_expected = v; },
      "Minimum expected count per chi-square bin (default 5)");
}

RunConfig resolve(const Invocation& inv) {
  RunConfig config = inv.config_path.empty() ? RunConfig{} : RunConfig::load(inv.config_path);
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    config.output_dir = dir;
  }
  for (const auto& apply : inv.overrides) apply(config);
  config.validate();
  return config;
}

std::string to_csv(const auto& write, const auto& data) {
  std::ostringstream s;
  write(s, data);
  return s.str();
}

struct Prepared {
  std::vector<ApplicationRecord> records;
  CleanReport report;
};

Prepared prepare(const RunConfig& c, const fs::path& input) {
  auto cleaned = clean(load_dataset(input, c.schema), c.clean_options());
  auto records = binarize(std::move(cleaned.records), c.threshold);
  if (!c.identity_key.empty()) {
    records = group_identities(std::move(records), IdentityKey{c.identity_key});
  }
  if (records.empty()) throw InsufficientData("no records left after cleaning");
  return {std::move(records), cleaned.report};
}

int cmd_generate(const RunConfig& c, const Invocation& inv, bool seed_given,
                 std::ostream& out) {
  SyntheticSpec spec = load_spec(inv.spec);
  if (seed_given) spec.seed = c.seed;
  const SyntheticCorpus corpus = generate(spec);

  std::ostringstream data;
  write_dataset(data, corpus.records);
  write_file(c.output_dir / "dataset.csv", data.str());
  write_file(c.output_dir / "ground_truth.json", dump_json(corpus.truth.to_json()));
  if (!corpus.sim_scores.empty()) {
    std::ostringstream sim;
    write_sim_scores(sim, corpus.sim_scores);
    write_file(c.output_dir / "sim_outcomes.csv", sim.str());
  }

  CleanOptions options;
  options.test_model_ids = {corpus.truth.test_model_ids.begin(),
                            corpus.truth.test_model_ids.end()};
  auto cleaned = clean(corpus.records, options);
  const auto records = binarize(std::move(cleaned.records), c.threshold);
  std::map<std::string, PositionRate> by_model;
  std::size_t selected = 0;
  for (const auto& r : records) {
    auto& m = by_model[r.model_id];
    ++m.n;
    m.selected += *r.recommended ? 1 : 0;
    selected += *r.recommended ? 1 : 0;
  }
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& [_, m] : by_model) {
    lo = std::min(lo, m.rate());
    hi = std::max(hi, m.rate());
  }
  const auto& truth = corpus.truth;
  out << "rows: " << corpus.records.size() << "\n"
      << "applicants: " << spec.n_applicants << "\n"
      << "models: " << spec.n_models << ", positions: " << spec.n_positions
      << ", employers: " << spec.n_employers << "\n"
      << "selection rate: "
      << format_fixed(static_cast<double>(selected) / static_cast<double>(records.size()), 4)
      << " (per model " << format_fixed(lo, 4) << " to " << format_fixed(hi, 4) << ")\n"
      << "planted: duplicates " << truth.duplicate_ids.size() << ", test-model rows "
      << truth.test_model_rows << ", unscored " << truth.unscored_ids.size()
      << ", split identities " << truth.identity_groups.size() << ", all-reject "
      << truth.all_reject_applicants.size() << "\n"
      << "expected adverse (group, position) pairs: " << truth.planted_adverse.size()
      << "\n";
  if (!corpus.sim_scores.empty()) {
    out << "simulated outcomes: " << truth.sim_applicants.size() << " applicants x "
        << spec.n_models << " models\n";
  }
  return kExitOk;
}

int cmd_ingest(const RunConfig& c, const Invocation& inv, std::ostream& out) {
  const Prepared p = prepare(c, inv.input);
  std::ostringstream data;
  write_dataset(data, p.records);
  write_file(c.output_dir / "cleaned.csv", data.str());
  write_file(c.output_dir / "clean_report.json", dump_json(p.report.to_json()));
  const auto rows = k_distribution(stratify_by_k(p.records));
  write_file(c.output_dir / "k_distribution.csv",
             to_csv([](std::ostream& o, const auto& r) { write_k_distribution(o, r); }, rows));
  const auto& r = p.report;
  out << "rows in: " << r.rows_in << ", out: " << r.rows_out << "\n"
      << "removed test models: " << r.removed_test_models
      << ", unscored: " << r.removed_unscored << ", duplicates: " << r.deduplicated
      << ", employer ids merged: " << r.merged_employer_ids << "\n";
  std::size_t applicants = 0;
  for (const auto& row : rows) applicants += row.count;
  out << "applicants: " << applicants << "\n";
  return kExitOk;
}

int cmd_audit(const RunConfig& c, const Invocation& inv, std::ostream& out) {
  const Prepared p = prepare(c, inv.input);
  const AuditOptions options = c.audit_options();
  const auto stats = audit_positions(p.records, options);
  const auto summary = summarize(stats, p.records, options);
  write_file(c.output_dir / "position_stats.csv",
             to_csv([](std::ostream& o, const auto& s) { write_position_stats(o, s); }, stats));
  write_file(c.output_dir / "soc_rollup.csv",
             to_csv([](std::ostream& o, const auto& s) { write_soc_rollup(o, s); },
                    summary.soc_rollup));
  write_file(c.output_dir / "impact_summary.json",
             dump_json(impact_summary_json(summary, stats, options)));

  std::size_t flagged = 0;
  std::set<std::string> positions;
  for (const auto& s : stats) {
    positions.insert(s.position_id);
    flagged += s.flag_adverse_bh ? 1 : 0;
  }
  out << "positions audited: " << positions.size() << "\n";
  for (const auto& g : summary.groups) {
    out << g.group << ": aggregate impact ratio " << format_fixed(g.aggregate_impact_ratio, 3)
        << ", adverse positions " << g.biased_positions << "/" << g.positions
        << ", shortfall " << g.shortfall << "\n";
  }
  for (const auto& s : stats) {
    if (s.flag_adverse_bh) {
      out << "adverse impact: position " << s.position_id << ", group " << s.group
          << ", impact ratio " << format_fixed(s.impact_ratio, 3) << "\n";
    }
  }
  return flagged > 0 ? kExitAdverseImpact : kExitOk;
}

int cmd_homogenize(const RunConfig& c, const Invocation& inv, std::ostream& out,
                   std::ostream& err) {
  const Prepared p = prepare(c, inv.input);
  const auto report = analyze_homogenization(p.records, c.homogenization_options());
  for (std::size_t k : report.omitted_k) {
    err << "warning: k=" << k << " omitted (fewer than " << c.min_cohort
        << " applicants)\n";
  }
  write_file(c.output_dir / "distributions.csv",
             to_csv([](std::ostream& o, const auto& d) { write_distributions(o, d); },
                    report.distributions));
  write_file(c.output_dir / "rejection_curve.csv",
             to_csv([](std::ostream& o, const auto& r) { write_rejection_curve(o, r); },
                    report.curve));
  write_file(c.output_dir / "rejection_table.csv",
             to_csv([](std::ostream& o, const auto& r) { write_rejection_table(o, r); },
                    report.curve.points));
  write_file(c.output_dir / "gof.json", dump_json(homogenization_json(report)));

  out << "cohorts tested: " << report.distributions.size() << "\n";
  if (report.joint_gof) {
    out << "distribution chi2 " << format_fixed(report.joint_gof->chi2, 2) << " (dof "
        << report.joint_gof->dof << "), p " << format_fixed(report.joint_gof->p_value, 4)
        << "\n";
  }
  if (report.rejection_gof) {
    out << "systemic rejection chi2 " << format_fixed(report.rejection_gof->chi2, 2)
        << " (dof " << report.rejection_gof->dof << "), p "
        << format_fixed(report.rejection_gof->p_value, 4) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, const Invocation& inv, std::ostream& out,
                 std::ostream& err) {
  const Prepared p = prepare(c, inv.input);
  const SimOutcomeMatrix outcomes = load_sim_outcomes(inv.outcomes, c.threshold);
  const SimulationSetup setup = prepare_simulation(p.records, outcomes);
  if (setup.outcomes.rows() == 0) {
    throw InsufficientData("no applicant has a complete set of simulated outcomes");
  }
  if (setup.unknown_applicants > 0) {
    err << "warning: " << setup.unknown_applicants
        << " simulated applicants do not appear in the records\n";
  }
  const std::size_t k_max = c.k_max == 0 ? setup.outcomes.cols() : c.k_max;
  const auto curve =
      simulate_curve(setup.expanded, setup.outcomes, c.k_min, k_max, c.replicates, c.seed);
  if (curve.empty()) throw InsufficientData("no k in range has a non-empty cohort");
  const SimulationFits fits = fit_simulation(curve);
  FloorReport floor = exhaustive_recommendation_floor(outcomes);

  write_file(c.output_dir / "simulation.json", dump_json(simulation_json(curve)));
  write_file(c.output_dir / "simulation_summary.json",
             dump_json(simulation_summary_json(curve, fits, c.crossing)));
  std::ostringstream csv;
  write_simulation_csv(csv, curve, fits);
  write_file(c.output_dir / "simulation.csv", csv.str());
  write_file(c.output_dir / "floor.json", dump_json(floor.to_json()));

  out << "simulated applicants: " << setup.outcomes.rows() << " (excluded incomplete "
      << setup.excluded_incomplete << ")\n";
  auto crossing = [&](bool baseline) {
    const auto k = first_k_below(curve, c.crossing, baseline);
    return k ? std::to_string(*k) : std::string("none in range");
  };
  out << "first k below " << format_exact(c.crossing) << ": simulated " << crossing(false)
      << ", baseline " << crossing(true) << "\n";
  out << "minimum recommendations over all models: " << floor.min_recommendations << " of "
      << floor.n_models << " (applicants with none: " << floor.zero_floor_applicants
      << ")\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& c, const Invocation& inv, std::ostream& out) {
  std::ifstream in(inv.table, std::ios::binary);
  if (!in) throw DataError("cannot open " + inv.table.string());
  const auto points = read_rejection_table(in);
  if (points.empty()) throw InsufficientData("rejection table has no rows");
  const RejectionCurve curve = rejection_curve_from_points(points);
  const GofResult gof = compare_rejection_rates(curve.points, c.min_expected);
  write_file(c.output_dir / "fit.json", dump_json(rejection_fit_json(curve, gof)));
  write_file(c.output_dir / "rejection_table.csv",
             to_csv([](std::ostream& o, const auto& r) { write_rejection_table(o, r); },
                    curve.points));
  auto show = [&](const char* name, const std::optional<ExpFit>& fit) {
    if (!fit) {
      out << name << " fit: not enough positive rates\n";
      return;
    }
    out << name << " fit: decay " << format_fixed(fit->decay_rate, 4) << ", r2 "
        << format_fixed(fit->r_squared, 4) << "\n";
  };
  show("observed", curve.observed_fit);
  show("baseline", curve.baseline_fit);
  out << "chi2 " << format_fixed(gof.chi2, 2) << " (dof " << gof.dof << "), p "
      << format_fixed(gof.p_value, 4) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audit algorithmic hiring data for adverse impact and outcome homogenization"};
  app.name(args.empty() ? "monoaudit" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  Invocation inv;

  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic corpus");
  add_common(generate_cmd, inv);
  generate_cmd->add_option("--spec", inv.spec, "Synthetic spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  override_option<double>(
      generate_cmd, "--threshold", inv, [](RunConfig& c, double v) { c.threshold = v; },
      "Threshold for the printed selection rates");

  auto* ingest_cmd = app.add_subcommand("ingest", "Clean and binarize application records");
  add_common(ingest_cmd, inv);
  add_pipeline(ingest_cmd, inv);

  auto* audit_cmd = app.add_subcommand("audit", "Per-position adverse impact audit");
  add_common(audit_cmd, inv);
  add_pipeline(audit_cmd, inv);
  override_option<double>(
      audit_cmd, "--alpha", inv, [](RunConfig& c, double v) { c.alpha = v; },
      "FDR level for Benjamini-Hochberg (default 0.05)");
  override_option<double>(
      audit_cmd, "--four-fifths", inv, [](RunConfig& c, double v) { c.four_fifths = v; },
      "Impact ratio threshold (default 0.8)");
  override_option<std::size_t>(
      audit_cmd, "--min-reporting", inv,
      [](RunConfig& c, std::size_t v) { c.min_reporting = v; },
      "Applicants a position needs to be audited (default 30)");
  override_option<std::size_t>(
      audit_cmd, "--min-group-n", inv, [](RunConfig& c, std::size_t v) { c.min_group_n = v; },
      "Applications a group needs within a position (default 1)");
  override_option<std::vector<std::string>>(
      audit_cmd, "--groups", inv,
      [](RunConfig& c, const std::vector<std::string>& v) { c.groups = v; },
      "Groups to audit (default: all observed)")
      ->delimiter(',');
  override_option<std::vector<std::string>>(
      audit_cmd, "--group-attribute", inv,
      [](RunConfig& c, const std::vector<std::string>& v) { c.group_attribute = v; },
      "Column(s) defining the group (default race)")
      ->delimiter(',');

  auto* homogenize_cmd =
      app.add_subcommand("homogenize", "Observed vs baseline recommendation counts");
  add_common(homogenize_cmd, inv);
  add_pipeline(homogenize_cmd, inv);
  add_homogenization(homogenize_cmd, inv);
  override_option<std::size_t>(
      homogenize_cmd, "--min-cohort", inv, [](RunConfig& c, std::size_t v) { c.min_cohort = v; },
      "Applicants a k needs to be reported (default 50)");

  auto* simulate_cmd =
      app.add_subcommand("simulate", "Counterfactual connected-set simulation");
  add_common(simulate_cmd, inv);
  add_pipeline(simulate_cmd, inv);
  add_homogenization(simulate_cmd, inv);
  simulate_cmd->add_option("--outcomes", inv.outcomes, "Simulated outcomes CSV")
      ->required()
      ->check(CLI::ExistingFile);
  override_option<std::size_t>(
      simulate_cmd, "--replicates", inv, [](RunConfig& c, std::size_t v) { c.replicates = v; },
      "Replicates per k (default 100)");
  override_option<double>(
      simulate_cmd, "--crossing", inv, [](RunConfig& c, double v) { c.crossing = v; },
      "Rejection level whose first crossing is reported (default 0.001)");

  auto* fit_cmd = app.add_subcommand("fit", "Fit and test a published rejection table");
  add_common(fit_cmd, inv);
  fit_cmd->add_option("--table", inv.table, "CSV with k,count,baseline,observed")
      ->required()
      ->check(CLI::ExistingFile);
  override_option<double>(
      fit_cmd, "--min-expected", inv, [](RunConfig& c, double v) { c.min_expected = v; },
      "Minimum expected count per chi-square cell (default 5)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    const RunConfig config = resolve(inv);
    if (generate_cmd->parsed()) {
      const bool seed_given = generate_cmd->count("--seed") > 0;
      return cmd_generate(config, inv, seed_given, out);
    }
    if (ingest_cmd->parsed()) return cmd_ingest(config, inv, out);
    if (audit_cmd->parsed()) return cmd_audit(config, inv, out);
    if (homogenize_cmd->parsed()) return cmd_homogenize(config, inv, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(config, inv, out, err);
    if (fit_cmd->parsed()) return cmd_fit(config, inv, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace monoaudit
