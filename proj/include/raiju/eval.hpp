#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "raiju/agent.hpp"
#include "raiju/scenario.hpp"
#include "raiju/sim_env.hpp"
#include "raiju/trainer.hpp"

namespace raiju {

/// The six battery metrics. Counts are out of n_tests; averages are mean step
/// counts over successful tests and absent when there are none.
struct EvalReport {
  int n_tests = 0;
  int succ_pe = 0;
  int succ_gh = 0;
  int succ_lm = 0;
  int fail_lm = 0;
  std::optional<double> avg_pe;
  std::optional<double> avg_gh;

  bool operator==(const EvalReport&) const = default;
};

/// One goal episode of one test.
struct TestRecord {
  int test = 0;
  Goal goal = Goal::PrivEsc;
  bool success = false;
  int steps = 0;

  bool operator==(const TestRecord&) const = default;
};

struct BatteryOptions {
  int n_tests = 100;
  int step_cap = kStandaloneStepBudget;
  std::uint64_t seed = 0;
  RewardScheme reward = RewardScheme::RW20;
};

struct BatteryResult {
  EvalReport report;
  std::vector<TestRecord> tests;  // ordered by (test, goal)
};

/// Runs n_tests tests; each test plays a fresh PE, GH and LM episode with its
/// own copy of `prototype`, reseeded from (seed, test, goal). Tests run in
/// parallel; the result does not depend on the thread count.
BatteryResult run_battery(const Agent& prototype, const Scenario& scenario,
                          const BatteryOptions& options);

/// Recomputes the metrics from per-test records.
EvalReport summarize(const std::vector<TestRecord>& tests, int n_tests);

/// Header `test,goal,success,steps`.
void write_test_log_csv(std::ostream& out, const std::vector<TestRecord>& tests);

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::A2C;
  std::string scenario = "env1";
  RewardScheme reward = RewardScheme::RW20;
  int episodes = 2000;
  int step_cap = kComparisonStepBudget;
  int n_tests = 100;
  std::uint64_t seed = 0;
  bool greedy = true;
};

struct ExperimentRow {
  ExperimentSpec spec;
  EvalReport report;
};

/// Trains (except Random) and evaluates each spec in order. `base` supplies
/// the hyperparameters; episodes, reward and seed come from the spec.
std::vector<ExperimentRow> run_experiment_grid(const std::vector<ExperimentSpec>& specs,
                                               const TrainerConfig& base = {});

/// Builds the agent a spec evaluates: a trained policy, or uniform random.
std::unique_ptr<Agent> make_agent(Algorithm algorithm, const TrainResult* trained, bool greedy,
                                  std::uint64_t seed);

/// Header `algorithm,scenario,reward_scheme,episodes,metric,value`; absent
/// averages produce no row.
void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const ExperimentSpec& spec, const EvalReport& report);
void write_results_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

}  // namespace raiju
