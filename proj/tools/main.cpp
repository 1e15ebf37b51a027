// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qsd/qsd.hpp"

#ifndef QSD_FIXTURE_DIR
#define QSD_FIXTURE_DIR "fixtures"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitViolation = 2;

struct Global {
  std::uint64_t seed = 1;
  bool seed_given = false;
  double tol = qsd::tol::psd;
  bool tol_given = false;
  std::string out;
  std::int64_t cap = qsd::StrategyEnumerator::default_cap;
  bool timings = false;
  std::string fixtures = QSD_FIXTURE_DIR;
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

qsd::io::ScenarioFile load(const std::string& path, const Global& g) {
  return qsd::io::load_scenario_file(
      path, g.tol_given ? std::optional<double>(g.tol) : std::nullopt);
}

void emit(qsd::io::ResultTable& table, const Timer& timer, const Global& g,
          std::size_t sort_keys) {
  if (sort_keys > 0) table.sort_rows(sort_keys);
  if (g.timings) {
    table.header.push_back("wall_ms");
    const std::string ms = qsd::io::format_real(timer.ms());
    for (auto& row : table.rows) row.push_back(ms);
  }
  const std::string csv = table.to_csv();
  if (g.out.empty()) {
    std::cout << csv;
  } else {
    qsd::io::write_text_file(g.out, csv);
  }
}

std::string render_strategy(const qsd::DecisionStrategy& g) {
  std::string out;
  for (std::size_t i = 0; i < g.decisions.size(); ++i) {
    if (i > 0) out += ':';
    out += std::to_string(g.decisions[i]);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::string token;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',' || text[i] == ':') {
      if (token.empty()) {
        throw qsd::ValidationError(what + ": empty entry in '" + text + "'");
      }
      try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        out.push_back(v);
      } catch (const std::exception&) {
        throw qsd::ValidationError(what + ": '" + token + "' is not an integer");
      }
      token.clear();
    } else if (!std::isspace(static_cast<unsigned char>(text[i]))) {
      token += text[i];
    }
  }
  return out;
}

/// Records on the command line use 1-based outcome labels ("2,2" = second
/// outcome twice); internally outcomes are 0-based.
std::vector<int> parse_record(const std::string& text, int outcomes) {
  std::vector<int> record = parse_int_list(text, "record");
  for (int& y : record) {
    if (y < 1 || y > outcomes) {
      throw qsd::ValidationError("record: outcome " + std::to_string(y) +
                                 " outside 1.." + std::to_string(outcomes));
    }
    y -= 1;
  }
  return record;
}

double p_inconclusive(const qsd::Scenario& s, const qsd::Povm& e,
                      const qsd::DecisionStrategy& g) {
  double p = 0.0;
  for (int y = 0; y < e.outcomes(); ++y) {
    if (g.decisions[static_cast<std::size_t>(y)] == 0) {
      p += qsd::outcome_probability(s, e, y);
    }
  }
  return p;
}

std::string state_label(const qsd::io::ScenarioFile& f, int i) {
  if (i < static_cast<int>(f.labels.size())) return f.labels[static_cast<std::size_t>(i)];
  return "rho" + std::to_string(i + 1);
}

// --- evaluate -----------------------------------------------------------------

struct EvaluateArgs {
  std::string scenario;
  std::string povm;
  std::string utility = "p-success";
  std::string strategy;
  std::string mode = "auto";
};

int cmd_evaluate(const EvaluateArgs& a, const Global& g) {
  const Timer timer;
  const qsd::io::ScenarioFile f = load(a.scenario, g);
  const qsd::Povm& e = f.povm(a.povm);
  const qsd::UtilityFunction u = qsd::make_utility(a.utility);

  qsd::DecisionStrategy strategy;
  qsd::UtilityScore score{{}};
  std::string mode;
  if (!a.strategy.empty()) {
    strategy = qsd::DecisionStrategy{parse_int_list(a.strategy, "strategy")};
    qsd::require_valid_strategy(strategy, e.outcomes(), f.scenario.size());
    score = qsd::average_utility_fixed(f.scenario, e, u, strategy);
    mode = "fixed";
  } else {
    qsd::StrategyMode m = qsd::StrategyMode::Auto;
    if (a.mode == "enumerate") {
      m = qsd::StrategyMode::Enumerate;
    } else if (a.mode == "analytic") {
      m = qsd::StrategyMode::Analytic;
    } else if (a.mode != "auto") {
      throw qsd::ValidationError("mode: expected auto, enumerate, or analytic");
    }
    qsd::AveragedUtility res = qsd::average_utility(f.scenario, e, u, m, g.cap);
    strategy = std::move(res.strategy);
    score = std::move(res.score);
    mode = res.mode;
  }

  qsd::io::ResultTable table;
  table.header = {"scenario", "povm", "utility", "strategy", "mode"};
  for (int k = 0; k < u.arity; ++k) table.header.push_back("score_" + std::to_string(k + 1));
  table.header.push_back("p_inconclusive");
  std::vector<std::string> row = {f.id, a.povm, u.name, render_strategy(strategy), mode};
  for (int k = 0; k < u.arity; ++k) {
    row.push_back(qsd::io::format_real(score.components[static_cast<std::size_t>(k)]));
  }
  row.push_back(qsd::io::format_real(p_inconclusive(f.scenario, e, strategy)));
  table.add(std::move(row));
  emit(table, timer, g, 3);
  return kExitOk;
}

// --- optimize -----------------------------------------------------------------

struct OptimizeArgs {
  std::string scenario;
  std::string utility = "p-success";
  int outcomes = 2;
  int restarts = 8;
  int iterations = 400;
  double step = 0.25;
  double decay = 0.97;
  double slack = 1e-6;
  std::string povm_out;
};

int cmd_optimize(const OptimizeArgs& a, const Global& g) {
  const Timer timer;
  const qsd::io::ScenarioFile f = load(a.scenario, g);
  const qsd::UtilityFunction u = qsd::make_utility(a.utility);

  qsd::OptimizerConfig cfg;
  cfg.restarts = a.restarts;
  cfg.iterations = a.iterations;
  cfg.step = a.step;
  cfg.decay = a.decay;
  cfg.seed = g.seed_given ? g.seed : f.options.seed;
  cfg.outcomes = a.outcomes;
  cfg.stage_slack = a.slack;

  const qsd::OptimizeResult res = qsd::optimize_povm(f.scenario, u, cfg);
  if (!a.povm_out.empty()) {
    qsd::io::write_json_file(a.povm_out, qsd::io::povm_document(f, "optimized", res.povm));
  }

  qsd::io::ResultTable table;
  table.header = {"scenario", "povm", "utility", "strategy", "mode"};
  for (int k = 0; k < u.arity; ++k) table.header.push_back("score_" + std::to_string(k + 1));
  table.header.push_back("p_inconclusive");
  std::vector<std::string> row = {f.id, "optimized", u.name,
                                  render_strategy(res.best.strategy), res.best.mode};
  for (int k = 0; k < u.arity; ++k) {
    row.push_back(
        qsd::io::format_real(res.best.score.components[static_cast<std::size_t>(k)]));
  }
  row.push_back(qsd::io::format_real(p_inconclusive(f.scenario, res.povm, res.best.strategy)));
  table.add(std::move(row));
  emit(table, timer, g, 3);
  return kExitOk;
}

// --- monotone -----------------------------------------------------------------

struct MonotoneArgs {
  std::string utility = "p-success";
  int trials = 200;
  int dim_min = 2;
  int dim_max = 3;
  double violation_tol = qsd::tol::monotone_violation;
};

std::string join_components(const qsd::UtilityScore& s) {
  std::string out;
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    if (k > 0) out += ';';
    out += qsd::io::format_real(s.components[k]);
  }
  return out;
}

int cmd_monotone(const MonotoneArgs& a, const Global& g) {
  const Timer timer;
  const qsd::MeasurementObjective obj =
      a.utility == "anti-success"
          ? qsd::anti_success_objective()
          : qsd::objective_from_utility(qsd::make_utility(a.utility),
                                        qsd::StrategyMode::Auto, g.cap);
  const qsd::MonotoneReport report =
      qsd::monotonicity_fuzz(obj, a.dim_min, a.dim_max, a.trials, g.seed, a.violation_tol);

  qsd::io::ResultTable table;
  table.header = {"utility", "trial", "sub_seed", "score_before", "score_after", "magnitude"};
  for (const auto& v : report.violations) {
    table.add({report.objective, std::to_string(v.trial), std::to_string(v.sub_seed),
               join_components(v.score_before), join_components(v.score_after),
               qsd::io::format_real(v.magnitude)});
  }
  emit(table, timer, g, 1);
  std::cerr << report.objective << ": " << report.trials << " trials, "
            << report.violations.size() << " violations, max magnitude "
            << qsd::io::format_real(report.max_violation) << "\n";
  return report.violations.empty() ? kExitOk : kExitViolation;
}

// --- repeat -------------------------------------------------------------------

struct RepeatArgs {
  std::string scenario;
  int copies = 1;
  std::string record;
  bool search = false;
  int samples = 200;
  std::string povm;
};

void add_trajectory_rows(qsd::io::ResultTable& table, const std::vector<qsd::RealVector>& traj,
                         const std::vector<int>& record) {
  for (std::size_t step = 0; step < traj.size(); ++step) {
    std::vector<std::string> row;
    row.push_back(std::to_string(step));
    row.push_back(step == 0 ? "" : std::to_string(record[step - 1] + 1));
    for (Eigen::Index i = 0; i < traj[step].size(); ++i) {
      row.push_back(qsd::io::format_real(traj[step](i)));
    }
    table.add(std::move(row));
  }
}

int cmd_repeat(const RepeatArgs& a, const Global& g) {
  const Timer timer;
  const qsd::io::ScenarioFile f = load(a.scenario, g);
  if (f.povms.empty()) {
    throw qsd::ValidationError("'" + f.id + "' defines no measurements");
  }
  const qsd::Povm& e = a.povm.empty() ? f.povms.front().povm : f.povm(a.povm);
  const qsd::RepeatedScenario rs(f.scenario, a.copies);

  const std::optional<int> guess = qsd::guess_condition(f.scenario);
  const std::optional<bool> condition = qsd::repeated_condition(rs);
  if (!condition) {
    std::cerr << "guess condition never fires: no message dominates the prior mixture\n";
  } else {
    std::cerr << "guess " << state_label(f, *guess) << ": condition "
              << (*condition ? "holds" : "fails") << " at d=" << a.copies << "\n";
  }

  qsd::io::ResultTable table;
  table.header = {"step", "outcome"};
  for (int i = 0; i < f.scenario.size(); ++i) table.header.push_back("p_" + state_label(f, i));

  int exit_code = kExitOk;
  if (a.search) {
    const qsd::RepeatedCheck check =
        qsd::verify_repeated_proposition(rs, a.samples, g.seed_given ? g.seed : f.options.seed);
    if (check.witness_found) {
      std::string rendered;
      for (std::size_t i = 0; i < check.witness_record.size(); ++i) {
        if (i > 0) rendered += ',';
        rendered += std::to_string(check.witness_record[i] + 1);
      }
      std::cerr << "witness record " << rendered << " flips the posterior away from "
                << state_label(f, check.guess) << "\n";
      const std::vector<qsd::RealVector> traj =
          qsd::simulate_repeated(rs, *check.witness_povm, check.witness_record);
      add_trajectory_rows(table, traj, check.witness_record);
    } else {
      std::cerr << "no witness record found; guessing " << state_label(f, check.guess)
                << " is optimal for every record\n";
    }
    if (!check.consistent) {
      std::cerr << "inconsistent with the d-th-root dominance condition\n";
      exit_code = kExitViolation;
    }
  } else if (!a.record.empty()) {
    const std::vector<int> record = parse_record(a.record, e.outcomes());
    const std::vector<qsd::RealVector> traj = qsd::simulate_repeated(rs, e, record);
    add_trajectory_rows(table, traj, record);
    const qsd::RealVector& final_post = traj.back();
    Eigen::Index best = 0;
    final_post.maxCoeff(&best);
    std::cerr << "final posterior favours " << state_label(f, static_cast<int>(best));
    for (int i = 0; i < f.scenario.size(); ++i) {
      std::cerr << (i == 0 ? ": " : ", ") << "p(" << state_label(f, i)
                << ")=" << qsd::io::format_real(final_post(i));
    }
    std::cerr << "\n";
  } else {
    add_trajectory_rows(table, {f.scenario.priors()}, {});
  }
  emit(table, timer, g, 0);
  return exit_code;
}

// --- reproduce ------------------------------------------------------------------

struct ReproCheck {
  std::string name;
  double observed;
  double expected;
  double tolerance;
};

int report_checks(const std::vector<ReproCheck>& checks, const Timer& timer, const Global& g) {
  qsd::io::ResultTable table;
  table.header = {"check", "observed", "expected", "tolerance", "status"};
  bool all_pass = true;
  for (const auto& c : checks) {
    const bool pass = std::abs(c.observed - c.expected) <= c.tolerance;
    all_pass = all_pass && pass;
    table.add({c.name, qsd::io::format_real(c.observed), qsd::io::format_real(c.expected),
               qsd::io::format_real(c.tolerance), pass ? "pass" : "FAIL"});
    std::cerr << (pass ? "PASS " : "FAIL ") << c.name << ": observed "
              << qsd::io::format_real(c.observed) << ", expected "
              << qsd::io::format_real(c.expected) << " (tol "
              << qsd::io::format_real(c.tolerance) << ")\n";
  }
  emit(table, timer, g, 0);
  return all_pass ? kExitOk : kExitViolation;
}

int cmd_reproduce(const std::string& id, const Global& g) {
  const Timer timer;
  std::vector<ReproCheck> checks;
  if (id == "example1") {
    const qsd::io::ScenarioFile f = load(g.fixtures + "/example1.json", g);
    const qsd::UtilityFunction conf = qsd::make_utility("total-confidence");

    checks.push_back({"total_confidence_A",
                      qsd::average_utility(f.scenario, f.povm("A"), conf).score.components[0],
                      2.0, 1e-9});
    checks.push_back({"total_confidence_B",
                      qsd::average_utility(f.scenario, f.povm("B"), conf).score.components[0],
                      2.0, 1e-9});

    const double a1 = 1e-6;
    const qsd::Povm near_edge =
        qsd::fixtures::qutrit_family_a(a1, qsd::fixtures::qutrit_a2_max(a1));
    checks.push_back({"p_inconclusive_A_at_a1_1e-6",
                      qsd::outcome_probability(f.scenario, near_edge, 2), 0.75, 1e-3});
    checks.push_back({"p_inconclusive_B", qsd::outcome_probability(f.scenario, f.povm("B"), 2),
                      0.5, 1e-12});
  } else if (id == "fig1") {
    const qsd::io::ScenarioFile f = load(g.fixtures + "/fig1.json", g);
    const qsd::Povm& e = f.povm("projective");

    checks.push_back({"success_projective",
                      qsd::average_utility(f.scenario, e, qsd::make_utility("p-success"))
                          .score.components[0],
                      0.85, 1e-9});
    const std::optional<bool> d1 = qsd::repeated_condition(qsd::RepeatedScenario(f.scenario, 1));
    const std::optional<bool> d2 = qsd::repeated_condition(qsd::RepeatedScenario(f.scenario, 2));
    checks.push_back({"guess_condition_d1", d1 && *d1 ? 1.0 : 0.0, 1.0, 0.0});
    checks.push_back({"guess_condition_d2", d2 && *d2 ? 1.0 : 0.0, 0.0, 0.0});

    const std::vector<qsd::RealVector> traj =
        qsd::simulate_repeated(qsd::RepeatedScenario(f.scenario, 2), e, {1, 1});
    checks.push_back({"p_rho2_after_record_2_2", traj.back()(1), 0.6136, 1e-3});
    checks.push_back({"posterior_flip_record_2_2", traj.back()(1) > traj.back()(0) ? 1.0 : 0.0,
                      1.0, 0.0});
  } else {
    throw qsd::ValidationError("unknown reproduction id '" + id +
                               "'; expected example1 or fig1");
  }
  return report_checks(checks, timer, g);
}

// --- strategies -----------------------------------------------------------------

struct StrategiesArgs {
  std::string scenario;
  std::string povm;
  std::string utility = "p-success";
};

int cmd_strategies(const StrategiesArgs& a, const Global& g) {
  const Timer timer;
  const qsd::io::ScenarioFile f = load(a.scenario, g);
  const qsd::Povm& e = f.povm(a.povm);
  const qsd::UtilityFunction u = qsd::make_utility(a.utility);

  qsd::io::ResultTable table;
  table.header = {"scenario", "povm", "utility", "strategy"};
  for (int k = 0; k < u.arity; ++k) table.header.push_back("score_" + std::to_string(k + 1));

  qsd::StrategyEnumerator en(e.outcomes(), f.scenario.size(), true, g.cap);
  while (std::optional<qsd::DecisionStrategy> strat = en.next()) {
    const qsd::UtilityScore score = qsd::average_utility_fixed(f.scenario, e, u, *strat);
    std::vector<std::string> row = {f.id, a.povm, u.name, render_strategy(*strat)};
    for (int k = 0; k < u.arity; ++k) {
      row.push_back(qsd::io::format_real(score.components[static_cast<std::size_t>(k)]));
    }
    table.add(std::move(row));
  }
  emit(table, timer, g, 3);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum state discrimination workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  auto* seed_opt = app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  auto* tol_opt =
      app.add_option("--tol", g.tol, "PSD tolerance override for scenario files");
  app.add_option("--out", g.out, "write CSV to this path instead of stdout");
  app.add_option("--cap", g.cap, "strategy enumeration cap")->capture_default_str();
  app.add_flag("--timings", g.timings,
               "append a wall_ms column (sacrifices byte-identical output)");
  app.add_option("--fixtures", g.fixtures, "directory holding the bundled fixtures")
      ->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "average a utility over a measurement");
  evaluate->add_option("scenario", ev.scenario, "scenario file")->required();
  evaluate->add_option("--povm", ev.povm, "measurement name")->required();
  evaluate->add_option("--utility", ev.utility, "utility name or 'a+b' combination")
      ->capture_default_str();
  evaluate->add_option("--strategy", ev.strategy,
                       "fixed decision per outcome, e.g. 1:2:0 (0 = inconclusive)");
  evaluate->add_option("--mode", ev.mode, "auto | enumerate | analytic")
      ->capture_default_str();

  OptimizeArgs op;
  auto* optimize = app.add_subcommand("optimize", "search for the best measurement");
  optimize->add_option("scenario", op.scenario, "scenario file")->required();
  optimize->add_option("--utility", op.utility, "utility name or 'a+b' combination")
      ->capture_default_str();
  optimize->add_option("--outcomes", op.outcomes, "POVM elements")->capture_default_str();
  optimize->add_option("--restarts", op.restarts, "random restarts")->capture_default_str();
  optimize->add_option("--iterations", op.iterations, "iterations per stage")
      ->capture_default_str();
  optimize->add_option("--step", op.step, "initial perturbation size")->capture_default_str();
  optimize->add_option("--decay", op.decay, "step decay on rejection")->capture_default_str();
  optimize->add_option("--slack", op.slack, "stage floor slack for multi-component scores")
      ->capture_default_str();
  optimize->add_option("--povm-out", op.povm_out, "write the best POVM here (scenario-file encoding)");

  MonotoneArgs mo;
  auto* monotone = app.add_subcommand("monotone", "fuzz for post-processing monotonicity violations");
  monotone->add_option("--utility", mo.utility,
                       "utility name, 'a+b' combination, or anti-success (adversarial control)")
      ->capture_default_str();
  monotone->add_option("--trials", mo.trials, "fuzz trials")->capture_default_str();
  monotone->add_option("--dim-min", mo.dim_min, "smallest Hilbert-space dimension")
      ->capture_default_str();
  monotone->add_option("--dim-max", mo.dim_max, "largest Hilbert-space dimension")
      ->capture_default_str();
  monotone->add_option("--violation-tol", mo.violation_tol, "violation tolerance")
      ->capture_default_str();

  RepeatArgs rp;
  auto* repeat = app.add_subcommand("repeat", "repeated measurements of independent copies");
  repeat->add_option("scenario", rp.scenario, "scenario file")->required();
  repeat->add_option("-d,--copies", rp.copies, "number of copies")->capture_default_str();
  repeat->add_option("--record", rp.record, "observed outcomes, 1-based, e.g. 2,2");
  repeat->add_flag("--search", rp.search, "search for a posterior-flipping record");
  repeat->add_option("--samples", rp.samples, "random candidate POVMs for --search")
      ->capture_default_str();
  repeat->add_option("--povm", rp.povm, "measurement name (default: first in file)");

  std::string reproduce_id;
  auto* reproduce = app.add_subcommand("reproduce", "re-derive the bundled worked examples");
  reproduce->add_option("id", reproduce_id, "example1 | fig1")->required();

  StrategiesArgs st;
  auto* strategies = app.add_subcommand("strategies", "score every decision strategy");
  strategies->add_option("scenario", st.scenario, "scenario file")->required();
  strategies->add_option("--povm", st.povm, "measurement name")->required();
  strategies->add_option("--utility", st.utility, "utility name or 'a+b' combination")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  g.seed_given = seed_opt->count() > 0;
  g.tol_given = tol_opt->count() > 0;

  try {
    if (app.got_subcommand(evaluate)) return cmd_evaluate(ev, g);
    if (app.got_subcommand(optimize)) return cmd_optimize(op, g);
    if (app.got_subcommand(monotone)) return cmd_monotone(mo, g);
    if (app.got_subcommand(repeat)) return cmd_repeat(rp, g);
    if (app.got_subcommand(reproduce)) return cmd_reproduce(reproduce_id, g);
    if (app.got_subcommand(strategies)) return cmd_strategies(st, g);
  } catch (const qsd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
