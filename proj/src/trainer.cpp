#include "raiju/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "raiju/agent.hpp"
#include "raiju/csv.hpp"
#include "raiju/errors.hpp"

namespace raiju {
namespace {

// Seed streams, so init / sampling / episode seeds never overlap.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kActionStream = 2;
constexpr std::uint64_t kEpisodeStream = 3;

struct Episode {
  rl::Batch batch;  // inputs, actions; returns/advantages filled after collection
  std::vector<double> rewards;
  std::vector<double> values;
};

void accumulate(EpisodeLog& log, const rl::LossTerms& terms, double weight) {
  log.actor_loss += terms.actor_loss * weight;
  log.critic_loss += terms.critic_loss * weight;
  log.entropy += terms.entropy * weight;
}

class Trainer {
 public:
  Trainer(Environment& env, Algorithm algorithm, const TrainerConfig& cfg)
      : env_(env), algorithm_(algorithm), cfg_(cfg), state_(initial_state(cfg)) {}

  TrainResult run() {
    state_.log.reserve(static_cast<std::size_t>(cfg_.episodes));
    for (int ep = 0; ep < cfg_.episodes; ++ep) state_.log.push_back(run_episode(ep));
    return std::move(state_);
  }

 private:
  struct Sample {
    int action;
    double log_prob;
    double value;
  };

  Sample choose(const std::array<double, kObsSize>& x) {
    const std::vector<double> logits = nn::actor_forward(state_.actor, x);
    const std::vector<double> probs = nn::softmax(logits);
    const int a = nn::sample_action(probs, state_.rng);
    const double log_prob = nn::log_softmax(logits)[static_cast<std::size_t>(a)];
    return {a, log_prob, nn::critic_forward(state_.critic, x)};
  }

  void apply(const rl::LossGradients& g) {
    nn::optimizer_step(state_.actor, g.actor, cfg_.lr_actor, state_.actor_opt, cfg_.optimizer);
    nn::optimizer_step(state_.critic, g.critic, cfg_.lr_critic, state_.critic_opt, cfg_.optimizer);
  }

  EpisodeLog run_episode(int ep) {
    EpisodeLog log;
    log.episode = ep;
    Observation obs = env_.reset(derive_seed(cfg_.seed, kEpisodeStream, static_cast<std::uint64_t>(ep)));
    Episode episode;
    int per_step_updates = 0;
    rl::LossTerms per_step_sum;

    while (true) {
      const auto x = obs.as_input();
      const Sample s = choose(x);
      const StepOutcome out = env_.step(s.action);
      ++log.steps;
      log.total_reward += out.reward;

      if (algorithm_ == Algorithm::A2C && cfg_.a2c_update == A2cUpdate::PerStep) {
        // One-step bootstrapped target.
        const double next_value =
            out.done ? 0.0 : nn::critic_forward(state_.critic, out.observation.as_input());
        rl::Batch b;
        b.inputs.assign(x.begin(), x.end());
        b.actions = {s.action};
        b.returns = {out.reward + cfg_.gamma * next_value};
        b.advantages = {b.returns[0] - s.value};
        const rl::LossGradients g = rl::a2c_gradients(b, state_.actor, state_.critic, cfg_.entropy_coef);
        apply(g);
        ++per_step_updates;
        per_step_sum.actor_loss += g.terms.actor_loss;
        per_step_sum.critic_loss += g.terms.critic_loss;
        per_step_sum.entropy += g.terms.entropy;
      } else {
        episode.batch.inputs.insert(episode.batch.inputs.end(), x.begin(), x.end());
        episode.batch.actions.push_back(s.action);
        episode.batch.log_prob_old.push_back(s.log_prob);
        episode.rewards.push_back(out.reward);
        episode.values.push_back(s.value);
      }
      obs = out.observation;
      if (out.done) {
        log.goal_reached = out.info == StepInfo::GoalReached;
        break;
      }
    }

    if (per_step_updates > 0) {
      accumulate(log, per_step_sum, 1.0 / per_step_updates);
      return log;
    }

    rl::Batch& b = episode.batch;
    b.returns = rl::discounted_returns(episode.rewards, cfg_.gamma);
    b.advantages = rl::advantages(b.returns, episode.values, cfg_.normalize_advantages);
    if (algorithm_ == Algorithm::A2C) {
      const rl::LossGradients g = rl::a2c_gradients(b, state_.actor, state_.critic, cfg_.entropy_coef);
      apply(g);
      accumulate(log, g.terms, 1.0);
    } else {
      const rl::PpoCoefficients coef{cfg_.eps_clip, cfg_.value_coef, cfg_.ppo_entropy_coef,
                                     cfg_.value_loss};
      for (int epoch = 0; epoch < cfg_.ppo_epochs; ++epoch) {
        const rl::LossGradients g = rl::ppo_gradients(b, state_.actor, state_.critic, coef);
        apply(g);
        accumulate(log, g.terms, 1.0 / cfg_.ppo_epochs);
      }
    }
    return log;
  }

  Environment& env_;
  Algorithm algorithm_;
  const TrainerConfig& cfg_;
  TrainResult state_;
};

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::A2C: return "a2c";
    case Algorithm::PPO: return "ppo";
    case Algorithm::Random: return "random";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "a2c") return Algorithm::A2C;
  if (text == "ppo") return Algorithm::PPO;
  if (text == "random") return Algorithm::Random;
  throw ParseError("algorithm", "expected a2c, ppo or random, got \"" + std::string(text) + "\"");
}

void TrainerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ContractViolation("gamma must lie in [0, 1]");
  if (!(eps_clip > 0.0)) throw ContractViolation("eps_clip must be positive");
  if (entropy_coef < 0.0 || value_coef < 0.0 || ppo_entropy_coef < 0.0) {
    throw ContractViolation("loss coefficients must be non-negative");
  }
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) throw ContractViolation("learning rates must be positive");
  if (ppo_epochs < 1) throw ContractViolation("ppo_epochs must be at least 1");
  if (episodes < 0) throw ContractViolation("episodes must be non-negative");
  if (step_budget < 1) throw ContractViolation("step_budget must be positive");
  if (hidden_units < 1) throw ContractViolation("hidden_units must be positive");
}

TrainResult initial_state(const TrainerConfig& cfg) {
  cfg.validate();
  TrainResult r;
  Rng init(derive_seed(cfg.seed, kInitStream));
  r.actor = nn::init_params(nn::actor_shape(cfg.hidden_units), init);
  r.critic = nn::init_params(nn::critic_shape(cfg.hidden_units), init);
  r.actor_opt = nn::OptimizerState::for_params(r.actor);
  r.critic_opt = nn::OptimizerState::for_params(r.critic);
  r.rng = Rng(derive_seed(cfg.seed, kActionStream));
  return r;
}

TrainResult train(Environment& env, Algorithm algorithm, const TrainerConfig& cfg) {
  if (algorithm == Algorithm::Random) throw ContractViolation("the random baseline has nothing to train");
  cfg.validate();
  return Trainer(env, algorithm, cfg).run();
}

SimEnv make_training_env(const Scenario& scenario, const TrainerConfig& cfg) {
  return SimEnv(scenario, EnvOptions{cfg.goal, cfg.reward_scheme, cfg.step_budget});
}

Checkpoint to_checkpoint(const TrainResult& result, Algorithm algorithm, std::string_view scenario) {
  Checkpoint c;
  c.metadata["algorithm"] = std::string(to_string(algorithm));
  c.metadata["scenario"] = std::string(scenario);
  c.episodes_trained = result.log.size();
  c.actor = result.actor;
  c.critic = result.critic;
  c.actor_opt = result.actor_opt;
  c.critic_opt = result.critic_opt;
  c.rng_state = result.rng.state();
  return c;
}

void write_train_log_csv(std::ostream& out, const std::vector<EpisodeLog>& log) {
  out << "episode,steps,total_reward,goal_reached,actor_loss,critic_loss,entropy\n";
  for (const EpisodeLog& e : log) {
    out << e.episode << ',' << e.steps << ',' << csv::format_double(e.total_reward) << ','
        << (e.goal_reached ? 1 : 0) << ',' << csv::format_double(e.actor_loss) << ','
        << csv::format_double(e.critic_loss) << ',' << csv::format_double(e.entropy) << '\n';
  }
}

double recent_success_rate(const std::vector<EpisodeLog>& log, int window) {
  if (log.empty() || window <= 0) return 0.0;
  const std::size_t n = std::min(log.size(), static_cast<std::size_t>(window));
  const auto hits = std::count_if(log.end() - static_cast<std::ptrdiff_t>(n), log.end(),
                                  [](const EpisodeLog& e) { return e.goal_reached; });
  return static_cast<double>(hits) / static_cast<double>(n);
}

// Agents live here as well; they share the network plumbing.

PolicyAgent::PolicyAgent(nn::ParamSet actor, bool greedy, std::uint64_t seed)
    : actor_(std::move(actor)), greedy_(greedy), rng_(seed) {
  if (actor_.shape.in != kObsSize || actor_.shape.out != kNumActions) {
    throw ValidationError("actor network maps " + std::to_string(actor_.shape.in) + " inputs to " +
                          std::to_string(actor_.shape.out) + " outputs; expected " +
                          std::to_string(kObsSize) + " -> " + std::to_string(kNumActions));
  }
}

int PolicyAgent::act(const Observation& obs) {
  const auto x = obs.as_input();
  const std::vector<double> logits = nn::actor_forward(actor_, x);
  if (greedy_) return nn::argmax(logits);
  return nn::sample_action(nn::softmax(logits), rng_);
}

int random_agent_action(Rng& rng, int n_actions) {
  if (n_actions <= 0) throw ContractViolation("random agent needs at least one action");
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(n_actions)));
}

int ScriptedAgent::act(const Observation&) {
  if (actions_.empty()) throw ContractViolation("scripted agent has no actions");
  const int a = actions_[std::min(next_, actions_.size() - 1)];
  ++next_;
  return a;
}

}  // namespace raiju
