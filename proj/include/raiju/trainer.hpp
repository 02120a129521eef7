#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "raiju/checkpoint.hpp"
#include "raiju/environment.hpp"
#include "raiju/nn.hpp"
#include "raiju/optimizer.hpp"
#include "raiju/rl.hpp"
#include "raiju/sim_env.hpp"

namespace raiju {

enum class Algorithm { A2C, PPO, Random };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

enum class A2cUpdate { PerEpisode, PerStep };

struct TrainerConfig {
  // Table values.
  double gamma = 0.99;
  double lr_actor = 0.0003;
  double lr_critic = 0.001;
  double eps_clip = 0.2;
  // Not given by the reference numbers; chosen defaults.
  double entropy_coef = 0.001;     // A2C beta
  double value_coef = 0.5;         // PPO c1
  double ppo_entropy_coef = 0.01;  // PPO c2
  int ppo_epochs = 4;
  int hidden_units = nn::kHiddenUnits;
  bool normalize_advantages = false;
  A2cUpdate a2c_update = A2cUpdate::PerEpisode;
  rl::ValueLoss value_loss = rl::ValueLoss::Mse;
  nn::OptimizerConfig optimizer{};
  // Run shape.
  int episodes = 2000;
  int step_budget = kComparisonStepBudget;
  RewardScheme reward_scheme = RewardScheme::RW20;
  Goal goal = Goal::LateralMovement;
  std::uint64_t seed = 0;

  /// Throws ContractViolation when a field is out of its domain.
  void validate() const;
};

struct EpisodeLog {
  int episode = 0;
  int steps = 0;
  double total_reward = 0.0;
  bool goal_reached = false;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;

  bool operator==(const EpisodeLog&) const = default;
};

struct TrainResult {
  nn::ParamSet actor;
  nn::ParamSet critic;
  nn::OptimizerState actor_opt;
  nn::OptimizerState critic_opt;
  Rng rng;
  std::vector<EpisodeLog> log;
};

/// Freshly initialized networks for a config (what `train` starts from).
TrainResult initial_state(const TrainerConfig& cfg);

/// Runs cfg.episodes episodes against `env`. A2C updates once per episode
/// from Monte-Carlo returns (or per step when configured); PPO collects one
/// episode then runs cfg.ppo_epochs passes over it. Deterministic in cfg.seed.
TrainResult train(Environment& env, Algorithm algorithm, const TrainerConfig& cfg);

/// Builds the simulator for a training run from cfg's goal, reward and budget.
SimEnv make_training_env(const Scenario& scenario, const TrainerConfig& cfg);

Checkpoint to_checkpoint(const TrainResult& result, Algorithm algorithm, std::string_view scenario);

/// Header `episode,steps,total_reward,goal_reached,actor_loss,critic_loss,entropy`.
void write_train_log_csv(std::ostream& out, const std::vector<EpisodeLog>& log);

/// Mean of goal_reached over the last `window` episodes.
double recent_success_rate(const std::vector<EpisodeLog>& log, int window);

}  // namespace raiju
