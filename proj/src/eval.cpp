#include "raiju/eval.hpp"

#include <omp.h>

#include <array>
#include <exception>

#include "raiju/csv.hpp"
#include "raiju/errors.hpp"
#include "raiju/kernels.hpp"

namespace raiju {
namespace {

constexpr std::array<Goal, 3> kGoals = {Goal::PrivEsc, Goal::GatherHashdump, Goal::LateralMovement};

TestRecord play(SimEnv& env, Agent& agent, int test, Goal goal, std::uint64_t seed) {
  agent.reseed(seed);
  Observation obs = env.reset(goal, seed);
  TestRecord rec{test, goal, false, 0};
  while (true) {
    const StepOutcome out = env.step(agent.act(obs));
    ++rec.steps;
    obs = out.observation;
    if (out.done) {
      rec.success = out.info == StepInfo::GoalReached;
      return rec;
    }
  }
}

std::optional<double> mean_or_absent(long sum, int count) {
  if (count == 0) return std::nullopt;
  return static_cast<double>(sum) / count;
}

}  // namespace

BatteryResult run_battery(const Agent& prototype, const Scenario& scenario,
                          const BatteryOptions& options) {
  if (options.n_tests < 1) throw ContractViolation("n_tests must be positive");
  if (options.step_cap < 1) throw ContractViolation("step cap must be positive");
  validate(scenario);

  const int n = options.n_tests;
  std::vector<TestRecord> tests(static_cast<std::size_t>(n) * kGoals.size());
  std::exception_ptr failure;
  const int cap = kernels::thread_cap_from_env();
  const int threads = cap > 0 ? cap : omp_get_max_threads();

#pragma omp parallel num_threads(threads) if (n > 1)
  {
    SimEnv env(scenario, EnvOptions{Goal::PrivEsc, options.reward, options.step_cap});
    std::unique_ptr<Agent> agent = prototype.clone();
#pragma omp for schedule(dynamic)
    for (int t = 0; t < n; ++t) {
      try {
        for (std::size_t g = 0; g < kGoals.size(); ++g) {
          const std::uint64_t s = derive_seed(options.seed, static_cast<std::uint64_t>(t), g);
          tests[static_cast<std::size_t>(t) * kGoals.size() + g] = play(env, *agent, t, kGoals[g], s);
        }
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  return {summarize(tests, n), std::move(tests)};
}

EvalReport summarize(const std::vector<TestRecord>& tests, int n_tests) {
  EvalReport r;
  r.n_tests = n_tests;
  long pe_steps = 0;
  long gh_steps = 0;
  for (const TestRecord& t : tests) {
    switch (t.goal) {
      case Goal::PrivEsc:
        if (t.success) {
          ++r.succ_pe;
          pe_steps += t.steps;
        }
        break;
      case Goal::GatherHashdump:
        if (t.success) {
          ++r.succ_gh;
          gh_steps += t.steps;
        }
        break;
      case Goal::LateralMovement:
        if (t.success) {
          ++r.succ_lm;
        } else {
          ++r.fail_lm;
        }
        break;
    }
  }
  r.avg_pe = mean_or_absent(pe_steps, r.succ_pe);
  r.avg_gh = mean_or_absent(gh_steps, r.succ_gh);
  return r;
}

void write_test_log_csv(std::ostream& out, const std::vector<TestRecord>& tests) {
  out << "test,goal,success,steps\n";
  for (const TestRecord& t : tests) {
    out << t.test << ',' << to_string(t.goal) << ',' << (t.success ? 1 : 0) << ',' << t.steps << '\n';
  }
}

std::unique_ptr<Agent> make_agent(Algorithm algorithm, const TrainResult* trained, bool greedy,
                                  std::uint64_t seed) {
  if (algorithm == Algorithm::Random) return std::make_unique<RandomAgent>(seed);
  if (trained == nullptr) throw ContractViolation("a trained agent needs a training result");
  return std::make_unique<PolicyAgent>(trained->actor, greedy, seed);
}

std::vector<ExperimentRow> run_experiment_grid(const std::vector<ExperimentSpec>& specs,
                                               const TrainerConfig& base) {
  std::vector<ExperimentRow> rows;
  rows.reserve(specs.size());
  for (const ExperimentSpec& spec : specs) {
    if (spec.step_cap < 1) throw ContractViolation("step cap must be positive");
    const Scenario scenario = resolve_scenario(spec.scenario);
    TrainerConfig cfg = base;
    cfg.episodes = spec.episodes;
    cfg.reward_scheme = spec.reward;
    cfg.seed = spec.seed;

    std::optional<TrainResult> trained;
    if (spec.algorithm != Algorithm::Random) {
      SimEnv env = make_training_env(scenario, cfg);
      trained = train(env, spec.algorithm, cfg);
    }
    const auto agent = make_agent(spec.algorithm, trained ? &*trained : nullptr, spec.greedy, spec.seed);
    const BatteryOptions opts{spec.n_tests, spec.step_cap, derive_seed(spec.seed, 4), spec.reward};
    rows.push_back({spec, run_battery(*agent, scenario, opts).report});
  }
  return rows;
}

void write_results_header(std::ostream& out) {
  out << "algorithm,scenario,reward_scheme,episodes,metric,value\n";
}

void write_results_rows(std::ostream& out, const ExperimentSpec& spec, const EvalReport& report) {
  const std::string prefix = std::string(to_string(spec.algorithm)) + ',' + spec.scenario + ',' +
                             std::string(to_string(spec.reward)) + ',' + std::to_string(spec.episodes) + ',';
  out << prefix << "SUCC-PE," << report.succ_pe << '\n';
  out << prefix << "SUCC-GH," << report.succ_gh << '\n';
  out << prefix << "SUCC-LM," << report.succ_lm << '\n';
  if (report.avg_pe) out << prefix << "AVG-PE," << csv::format_double(*report.avg_pe) << '\n';
  if (report.avg_gh) out << prefix << "AVG-GH," << csv::format_double(*report.avg_gh) << '\n';
  out << prefix << "FAIL-LM," << report.fail_lm << '\n';
}

void write_results_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  write_results_header(out);
  for (const ExperimentRow& r : rows) write_results_rows(out, r.spec, r.report);
}

}  // namespace raiju
