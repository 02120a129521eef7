#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raiju/catalog.hpp"
#include "raiju/checkpoint.hpp"
#include "raiju/csv.hpp"
#include "raiju/errors.hpp"
#include "raiju/eval.hpp"
#include "raiju/gradcheck.hpp"
#include "raiju/kernels.hpp"
#include "raiju/scenario.hpp"
#include "raiju/sim_env.hpp"
#include "raiju/trace.hpp"
#include "raiju/trainer.hpp"

namespace raiju::cli {
namespace {

using Clock = std::chrono::steady_clock;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f << text;
  f.flush();
  if (!f) throw IoError(path, "write failed");
}

// Wall-clock data lives next to the output so the output itself stays byte-stable.
void write_meta(const std::string& output, const std::string& command, Clock::time_point start) {
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream m;
  m << "command=" << command << '\n';
  m << "finished_utc=" << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << '\n';
  m << "elapsed_seconds=" << elapsed << '\n';
  m << "thread_cap=" << kernels::thread_cap_from_env() << '\n';
  write_text(output + ".meta", m.str());
}

const std::vector<std::string> kAlgos = {"a2c", "ppo"};
const std::vector<std::string> kAllAlgos = {"a2c", "ppo", "random"};
const std::vector<std::string> kRewards = {"rw1", "rw20"};
const std::vector<std::string> kGoals = {"pe", "gh", "lm"};

struct TrainFlags {
  std::string algo = "a2c";
  std::string reward = "rw20";
  std::string goal = "lm";
  std::string optimizer = "adam";
  std::string value_loss = "mse";
  std::string a2c_update = "episode";
  TrainerConfig cfg;
  CLI::Option* entropy = nullptr;
  CLI::Option* value_coef = nullptr;
  CLI::Option* ppo_entropy = nullptr;
  CLI::Option* epochs = nullptr;
  CLI::Option* optim = nullptr;
  CLI::Option* vloss = nullptr;
  CLI::Option* update = nullptr;
  CLI::Option* goal_opt = nullptr;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_goal) {
  cmd->add_option("--algo", f.algo, "a2c or ppo")->check(CLI::IsMember(kAlgos))->capture_default_str();
  cmd->add_option("--episodes", f.cfg.episodes, "training episodes")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--reward", f.reward, "rw1 or rw20")->check(CLI::IsMember(kRewards))->capture_default_str();
  if (with_goal) {
    f.goal_opt = cmd->add_option("--goal", f.goal, "training goal: pe, gh or lm")
                     ->check(CLI::IsMember(kGoals))
                     ->capture_default_str();
  }
  cmd->add_option("--cap", f.cfg.step_budget, "step budget per training episode")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--gamma", f.cfg.gamma)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--lr-actor", f.cfg.lr_actor)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr-critic", f.cfg.lr_critic)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--eps-clip", f.cfg.eps_clip)->check(CLI::PositiveNumber)->capture_default_str();
  f.entropy = cmd->add_option("--entropy-coef", f.cfg.entropy_coef, "A2C entropy weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  f.value_coef = cmd->add_option("--value-coef", f.cfg.value_coef, "PPO c1")->check(CLI::NonNegativeNumber)->capture_default_str();
  f.ppo_entropy = cmd->add_option("--ppo-entropy-coef", f.cfg.ppo_entropy_coef, "PPO c2")->check(CLI::NonNegativeNumber)->capture_default_str();
  f.epochs = cmd->add_option("--ppo-epochs", f.cfg.ppo_epochs)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--hidden", f.cfg.hidden_units, "hidden layer width")->check(CLI::PositiveNumber)->capture_default_str();
  f.optim = cmd->add_option("--optimizer", f.optimizer)->check(CLI::IsMember({"adam", "sgd"}))->capture_default_str();
  f.vloss = cmd->add_option("--value-loss", f.value_loss)->check(CLI::IsMember({"mse", "literal"}))->capture_default_str();
  f.update = cmd->add_option("--a2c-update", f.a2c_update, "episode or step")->check(CLI::IsMember({"episode", "step"}))->capture_default_str();
  cmd->add_flag("--normalize-advantages", f.cfg.normalize_advantages);
}

TrainerConfig finish_config(TrainFlags& f, std::uint64_t seed) {
  TrainerConfig cfg = f.cfg;
  cfg.reward_scheme = parse_reward_scheme(f.reward);
  cfg.goal = parse_goal(f.goal);
  cfg.optimizer.kind = nn::parse_optimizer(f.optimizer);
  cfg.value_loss = rl::parse_value_loss(f.value_loss);
  cfg.a2c_update = f.a2c_update == "step" ? A2cUpdate::PerStep : A2cUpdate::PerEpisode;
  cfg.seed = seed;
  return cfg;
}

void print_chosen_defaults(std::ostream& out, const TrainFlags& f, Algorithm algo) {
  const auto note = [&](const CLI::Option* opt, const std::string& what) {
    if (opt == nullptr || opt->count() == 0) out << "chosen default: " << what << '\n';
  };
  out << "chosen default: activation=tanh\n";
  note(f.optim, "optimizer=" + f.optimizer);
  if (algo == Algorithm::A2C) {
    note(f.entropy, "entropy_coef=" + csv::format_double(f.cfg.entropy_coef));
    note(f.update, "a2c_update=" + f.a2c_update);
  } else {
    note(f.value_coef, "value_coef=" + csv::format_double(f.cfg.value_coef));
    note(f.ppo_entropy, "ppo_entropy_coef=" + csv::format_double(f.cfg.ppo_entropy_coef));
    note(f.epochs, "ppo_epochs=" + std::to_string(f.cfg.ppo_epochs));
    note(f.vloss, "value_loss=" + f.value_loss);
  }
  note(f.goal_opt, "goal=" + f.goal);
}

std::string train_summary(Algorithm algo, const std::string& source, const TrainResult& r) {
  std::ostringstream s;
  s << "trained " << to_string(algo) << " on " << source << ": " << r.log.size() << " episodes, success rate "
    << csv::format_double(recent_success_rate(r.log, 100)) << " over the last "
    << std::min<std::size_t>(100, r.log.size()) << '\n';
  return s.str();
}

void print_report(std::ostream& out, const EvalReport& r) {
  const auto avg = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string("n/a"); };
  out << "SUCC-PE " << r.succ_pe << '/' << r.n_tests << '\n';
  out << "SUCC-GH " << r.succ_gh << '/' << r.n_tests << '\n';
  out << "SUCC-LM " << r.succ_lm << '/' << r.n_tests << '\n';
  out << "AVG-PE " << avg(r.avg_pe) << '\n';
  out << "AVG-GH " << avg(r.avg_gh) << '\n';
  out << "FAIL-LM " << r.fail_lm << '/' << r.n_tests << '\n';
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  for (std::string_view part : csv::split(text)) {
    if (!part.empty()) items.emplace_back(part);
  }
  return items;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulated post-exploitation RL agents (A2C / PPO) and experiment harness", "raiju"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string scenario = "env1";
  std::string output;
  std::string log_path;

  // train
  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "train an agent on a scenario");
  add_train_flags(train, train_flags, true);
  train->add_option("--scenario", scenario, "builtin name or config path")->capture_default_str();
  train->add_option("--seed", seed)->required();
  std::string ckpt_out = "checkpoint.bin";
  train->add_option("--out", ckpt_out, "checkpoint path")->capture_default_str();
  std::string train_log = "train_log.csv";
  train->add_option("--log", train_log, "per-episode log CSV")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "run the six-metric test battery");
  std::string checkpoint;
  std::string eval_algo;
  int tests = 100;
  int cap = kStandaloneStepBudget;
  bool sample = false;
  std::string eval_reward = "rw20";
  std::string results = "results.csv";
  eval->add_option("--checkpoint", checkpoint, "trained checkpoint");
  eval->add_option("--algo", eval_algo, "random for the baseline")->check(CLI::IsMember({"random"}));
  eval->add_option("--scenario", scenario)->capture_default_str();
  eval->add_option("--tests", tests)->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--cap", cap, "step cap per test episode")->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--reward", eval_reward)->check(CLI::IsMember(kRewards))->capture_default_str();
  eval->add_flag("--sample", sample, "sample actions instead of argmax");
  eval->add_option("--seed", seed)->required();
  eval->add_option("--out", results, "results CSV")->capture_default_str();
  eval->add_option("--test-log", log_path, "per-test log CSV");

  // grid
  auto* grid = app.add_subcommand("grid", "train and evaluate a grid of configurations");
  TrainFlags grid_flags;
  std::string grid_algos = "a2c,ppo,random";
  std::string grid_scenarios = "env1";
  std::string grid_rewards = "rw20";
  int grid_cap = kComparisonStepBudget;
  grid->add_option("--algos", grid_algos)->capture_default_str();
  grid->add_option("--scenarios", grid_scenarios)->capture_default_str();
  grid->add_option("--rewards", grid_rewards)->capture_default_str();
  grid->add_option("--episodes", grid_flags.cfg.episodes)->check(CLI::NonNegativeNumber)->capture_default_str();
  grid->add_option("--cap", grid_cap, "step cap per test episode")->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--tests", tests)->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--seed", seed)->capture_default_str();
  grid->add_option("--out", results)->capture_default_str();

  // record
  auto* rec = app.add_subcommand("record", "record agent-environment steps to a trace CSV");
  std::string agent_kind = "random";
  int rec_episodes = 100;
  std::string rec_goal = "lm";
  std::string rec_reward = "rw20";
  int rec_cap = kComparisonStepBudget;
  std::string trace_path = "trace.csv";
  rec->add_option("--scenario", scenario)->capture_default_str();
  rec->add_option("--agent", agent_kind, "random or policy")->check(CLI::IsMember({"random", "policy"}))->capture_default_str();
  rec->add_option("--checkpoint", checkpoint, "policy checkpoint for --agent policy");
  rec->add_option("--episodes", rec_episodes)->check(CLI::NonNegativeNumber)->capture_default_str();
  rec->add_option("--goal", rec_goal)->check(CLI::IsMember(kGoals))->capture_default_str();
  rec->add_option("--reward", rec_reward)->check(CLI::IsMember(kRewards))->capture_default_str();
  rec->add_option("--cap", rec_cap)->check(CLI::PositiveNumber)->capture_default_str();
  rec->add_option("--seed", seed)->capture_default_str();
  rec->add_option("--out", trace_path)->capture_default_str();

  // replay
  auto* replay = app.add_subcommand("replay", "train from a recorded trace");
  TrainFlags replay_flags;
  std::string replay_mode = "lookup";
  std::string replay_trace;
  add_train_flags(replay, replay_flags, false);
  replay->add_option("--trace", replay_trace)->required();
  replay->add_option("--mode", replay_mode, "lookup or strict")->check(CLI::IsMember({"lookup", "strict"}))->capture_default_str();
  replay->add_option("--seed", seed)->capture_default_str();
  replay->add_option("--out", ckpt_out)->capture_default_str();
  replay->add_option("--log", train_log)->capture_default_str();

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  GradcheckOptions gc_opts;
  gc->add_option("--seeds", gc_opts.seeds)->check(CLI::PositiveNumber)->capture_default_str();
  gc->add_option("--tolerance", gc_opts.tolerance)->check(CLI::PositiveNumber)->capture_default_str();
  gc->add_option("--seed", gc_opts.base_seed)->capture_default_str();
  gc->add_flag("--inject-fault", gc_opts.inject_fault, "perturb the analytic gradient (negative control)");

  // export
  auto* exp = app.add_subcommand("export", "write a scenario config or the action catalog");
  std::string export_scenario;
  bool export_catalog = false;
  auto* exp_sc = exp->add_option("--scenario", export_scenario, "builtin name");
  auto* exp_cat = exp->add_flag("--catalog", export_catalog, "action catalog CSV");
  exp_sc->excludes(exp_cat);
  exp->add_option("--out", output, "file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "raiju\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "see: raiju " << sub->get_name() << " --help\n";
    } else {
      err << "see: raiju --help\n";
    }
    return kExitUsage;
  }

  const auto start = Clock::now();
  try {
    if (*train) {
      const Algorithm algo = parse_algorithm(train_flags.algo);
      const TrainerConfig cfg = finish_config(train_flags, seed);
      print_chosen_defaults(out, train_flags, algo);
      const Scenario sc = resolve_scenario(scenario);
      SimEnv env = make_training_env(sc, cfg);
      const TrainResult r = raiju::train(env, algo, cfg);
      Checkpoint c = to_checkpoint(r, algo, sc.name);
      c.metadata["reward_scheme"] = std::string(to_string(cfg.reward_scheme));
      c.metadata["goal"] = std::string(to_string(cfg.goal));
      c.metadata["seed"] = std::to_string(seed);
      write_checkpoint(ckpt_out, c);
      std::ostringstream log;
      write_train_log_csv(log, r.log);
      write_text(train_log, log.str());
      write_meta(ckpt_out, "train", start);
      out << train_summary(algo, sc.name, r);
      return kExitOk;
    }

    if (*eval) {
      if (checkpoint.empty() == eval_algo.empty()) {
        err << "error: eval needs exactly one of --checkpoint or --algo random\n";
        return kExitUsage;
      }
      const Scenario sc = resolve_scenario(scenario);
      ExperimentSpec spec;
      spec.scenario = sc.name;
      spec.reward = parse_reward_scheme(eval_reward);
      std::unique_ptr<Agent> agent;
      if (!checkpoint.empty()) {
        const Checkpoint c = read_checkpoint(checkpoint);
        const auto it = c.metadata.find("algorithm");
        spec.algorithm = it == c.metadata.end() ? Algorithm::A2C : parse_algorithm(it->second);
        spec.episodes = static_cast<int>(c.episodes_trained);
        if (const auto rw = c.metadata.find("reward_scheme"); rw != c.metadata.end()) {
          spec.reward = parse_reward_scheme(rw->second);
        }
        agent = std::make_unique<PolicyAgent>(c.actor, !sample, seed);
      } else {
        spec.algorithm = Algorithm::Random;
        spec.episodes = 0;
        agent = std::make_unique<RandomAgent>(seed);
      }
      const BatteryResult b =
          run_battery(*agent, sc, BatteryOptions{tests, cap, seed, parse_reward_scheme(eval_reward)});
      std::ostringstream csv_out;
      write_results_header(csv_out);
      write_results_rows(csv_out, spec, b.report);
      write_text(results, csv_out.str());
      if (!log_path.empty()) {
        std::ostringstream tl;
        write_test_log_csv(tl, b.tests);
        write_text(log_path, tl.str());
      }
      write_meta(results, "eval", start);
      print_report(out, b.report);
      return kExitOk;
    }

    if (*grid) {
      std::vector<ExperimentSpec> specs;
      for (const std::string& a : split_list(grid_algos)) {
        for (const std::string& s : split_list(grid_scenarios)) {
          for (const std::string& w : split_list(grid_rewards)) {
            ExperimentSpec spec;
            spec.algorithm = parse_algorithm(a);
            spec.scenario = s;
            spec.reward = parse_reward_scheme(w);
            spec.episodes = spec.algorithm == Algorithm::Random ? 0 : grid_flags.cfg.episodes;
            spec.step_cap = grid_cap;
            spec.n_tests = tests;
            spec.seed = seed;
            specs.push_back(spec);
          }
        }
      }
      const auto rows = run_experiment_grid(specs, grid_flags.cfg);
      std::ostringstream csv_out;
      write_results_csv(csv_out, rows);
      write_text(results, csv_out.str());
      write_meta(results, "grid", start);
      for (const ExperimentRow& r : rows) {
        out << to_string(r.spec.algorithm) << ' ' << r.spec.scenario << ' ' << to_string(r.spec.reward) << '\n';
        print_report(out, r.report);
      }
      return kExitOk;
    }

    if (*rec) {
      const Scenario sc = resolve_scenario(scenario);
      SimEnv env(sc, EnvOptions{parse_goal(rec_goal), parse_reward_scheme(rec_reward), rec_cap});
      std::unique_ptr<Agent> agent;
      if (agent_kind == "policy") {
        if (checkpoint.empty()) {
          err << "error: --agent policy needs --checkpoint\n";
          return kExitUsage;
        }
        agent = std::make_unique<PolicyAgent>(read_checkpoint(checkpoint).actor, false, seed);
      } else {
        agent = std::make_unique<RandomAgent>(seed);
      }
      TraceWriter writer(trace_path);
      const auto rows = record(env, *agent, rec_episodes, seed, &writer);
      write_meta(trace_path, "record", start);
      out << "recorded " << rec_episodes << " episodes, " << rows.size() << " steps to " << trace_path << '\n';
      return kExitOk;
    }

    if (*replay) {
      const Algorithm algo = parse_algorithm(replay_flags.algo);
      const TrainerConfig cfg = finish_config(replay_flags, seed);
      print_chosen_defaults(out, replay_flags, algo);
      auto env = load_replay(replay_trace, parse_replay_mode(replay_mode), cfg.step_budget);
      const TrainResult r = raiju::train(*env, algo, cfg);
      Checkpoint c = to_checkpoint(r, algo, "trace:" + replay_trace);
      c.metadata["reward_scheme"] = std::string(to_string(cfg.reward_scheme));
      c.metadata["seed"] = std::to_string(seed);
      write_checkpoint(ckpt_out, c);
      std::ostringstream log;
      write_train_log_csv(log, r.log);
      write_text(train_log, log.str());
      write_meta(ckpt_out, "replay", start);
      out << train_summary(algo, replay_trace, r);
      return kExitOk;
    }

    if (*gc) {
      const GradcheckReport rep = run_gradcheck(gc_opts);
      for (const GradcheckTrial& t : rep.trials) {
        out << t.family << " seed=" << t.seed << " hidden=" << t.hidden << " coords=" << t.coordinates
            << " max_rel_err=" << std::scientific << std::setprecision(3) << t.max_rel_error << std::defaultfloat
            << '\n';
      }
      out << "trials=" << rep.trials.size() << " seeds=" << gc_opts.seeds << " max_rel_err=" << std::scientific
          << std::setprecision(3) << rep.max_rel_error << std::defaultfloat << " tolerance=" << gc_opts.tolerance
          << (rep.passed ? " PASS" : " FAIL") << '\n';
      return rep.passed ? kExitOk : kExitCheckFailed;
    }

    if (*exp) {
      if (export_scenario.empty() && !export_catalog) {
        err << "error: export needs --scenario or --catalog\n";
        return kExitUsage;
      }
      std::ostringstream text;
      if (export_catalog) {
        write_catalog_csv(text, catalog());
      } else {
        text << to_config_text(builtin_scenario(export_scenario));
      }
      if (output.empty()) {
        out << text.str();
      } else {
        write_text(output, text.str());
      }
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitUsage;
}

}  // namespace raiju::cli
