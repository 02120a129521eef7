#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <omp.h>

#include "raiju/catalog.hpp"
#include "raiju/errors.hpp"
#include "raiju/eval.hpp"

using namespace raiju;

namespace {

const std::vector<int> kEnv1Chain = {7, kHashdumpWindows, kLateralSmbWindows, kLateralSmbWindows,
                                     7, kHashdumpWindows, kLateralSmbLinux};

BatteryOptions opts(int n, int cap, std::uint64_t seed = 1) {
  BatteryOptions o;
  o.n_tests = n;
  o.step_cap = cap;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("a scripted optimal agent gives the exact oracle report") {
    const BatteryResult r = run_battery(ScriptedAgent(kEnv1Chain), builtin_scenario("env1"), opts(10, 4000));
    CHECK(r.report.n_tests == 10);
    CHECK(r.report.succ_pe == 10);
    CHECK(r.report.succ_gh == 10);
    CHECK(r.report.succ_lm == 10);
    CHECK(r.report.fail_lm == 0);
    CHECK(r.report.avg_pe == 1.0);
    CHECK(r.report.avg_gh == 2.0);
    REQUIRE(r.tests.size() == 30);
    CHECK(r.tests[2].goal == Goal::LateralMovement);
    CHECK(r.tests[2].steps == 7);
  }

  TEST_CASE("an agent that only plays inapplicable actions never succeeds") {
    // 30 is a Linux module; env1's foothold is Windows.
    const BatteryResult r = run_battery(ScriptedAgent({30}), builtin_scenario("env1"), opts(5, 25));
    CHECK(r.report.succ_pe == 0);
    CHECK(r.report.succ_gh == 0);
    CHECK(r.report.succ_lm == 0);
    CHECK(r.report.fail_lm == 5);
    CHECK_FALSE(r.report.avg_pe.has_value());
    CHECK_FALSE(r.report.avg_gh.has_value());
    for (const TestRecord& t : r.tests) CHECK(t.steps == 25);
  }

  TEST_CASE("property: report accounting on random play") {
    for (const std::string& name : builtin_scenario_names()) {
      const BatteryResult r = run_battery(RandomAgent(), builtin_scenario(name), opts(30, 150, 9));
      const EvalReport& m = r.report;
      CHECK(m.succ_lm + m.fail_lm == m.n_tests);
      CHECK(m.succ_pe <= m.n_tests);
      CHECK(m.succ_gh <= m.n_tests);
      CHECK(m == summarize(r.tests, 30));
      for (const TestRecord& t : r.tests) {
        CHECK(t.steps >= 1);
        CHECK(t.steps <= 150);
        if (!t.success) CHECK(t.steps == 150);
      }
      if (m.avg_pe) {
        CHECK(*m.avg_pe >= 1.0);
        CHECK(*m.avg_pe <= 150.0);
      }
    }
  }

  TEST_CASE("battery is deterministic and independent of the thread count") {
    const Scenario s = builtin_scenario("env3");
    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    const BatteryResult one = run_battery(RandomAgent(), s, opts(24, 100, 4));
    omp_set_num_threads(4);
    const BatteryResult four = run_battery(RandomAgent(), s, opts(24, 100, 4));
    omp_set_num_threads(before);
    CHECK(one.tests == four.tests);
    CHECK(one.report == four.report);
    CHECK_FALSE(run_battery(RandomAgent(), s, opts(24, 100, 5)).tests == one.tests);
  }

  TEST_CASE("summarize on hand-made records") {
    const std::vector<TestRecord> t = {
        {0, Goal::PrivEsc, true, 4},          {0, Goal::GatherHashdump, false, 9},
        {0, Goal::LateralMovement, false, 9}, {1, Goal::PrivEsc, true, 2},
        {1, Goal::GatherHashdump, true, 5},   {1, Goal::LateralMovement, true, 8},
    };
    const EvalReport m = summarize(t, 2);
    CHECK(m.succ_pe == 2);
    CHECK(m.succ_gh == 1);
    CHECK(m.succ_lm == 1);
    CHECK(m.fail_lm == 1);
    CHECK(m.avg_pe == 3.0);
    CHECK(m.avg_gh == 5.0);
  }

  TEST_CASE("results and test-log CSV") {
    EvalReport m;
    m.n_tests = 2;
    m.succ_pe = 2;
    m.avg_pe = 3.0;
    m.fail_lm = 2;
    ExperimentSpec spec;
    std::ostringstream out;
    write_results_csv(out, {ExperimentRow{spec, m}});
    const std::string s = out.str();
    CHECK(s.rfind("algorithm,scenario,reward_scheme,episodes,metric,value\n", 0) == 0);
    CHECK(s.find("a2c,env1,rw20,2000,SUCC-PE,2\n") != std::string::npos);
    CHECK(s.find("AVG-PE,3") != std::string::npos);
    CHECK(s.find("AVG-GH") == std::string::npos);
    CHECK(s.find("FAIL-LM,2") != std::string::npos);

    std::ostringstream log;
    write_test_log_csv(log, {TestRecord{0, Goal::GatherHashdump, true, 5}});
    CHECK(log.str() == "test,goal,success,steps\n0,gh,1,5\n");
  }

  TEST_CASE("bad battery options are contract violations") {
    CHECK_THROWS_AS(run_battery(RandomAgent(), builtin_scenario("env1"), opts(0, 10)), ContractViolation);
    CHECK_THROWS_AS(run_battery(RandomAgent(), builtin_scenario("env1"), opts(3, 0)), ContractViolation);
  }

  TEST_CASE("a tiny grid runs end to end") {
    ExperimentSpec random;
    random.algorithm = Algorithm::Random;
    random.scenario = "env2";
    random.n_tests = 4;
    ExperimentSpec a2c = random;
    a2c.algorithm = Algorithm::A2C;
    a2c.episodes = 3;
    TrainerConfig base;
    base.hidden_units = 8;
    const auto rows = run_experiment_grid({random, a2c}, base);
    REQUIRE(rows.size() == 2);
    for (const ExperimentRow& r : rows) CHECK(r.report.n_tests == 4);
  }
}
