#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "raiju/environment.hpp"
#include "raiju/nn.hpp"

namespace raiju::rl {

/// returns[t] = sum_{i>=t} gamma^(i-t) r_i, by backward recursion.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

/// returns - values, optionally standardized to zero mean / unit variance.
std::vector<double> advantages(std::span<const double> returns, std::span<const double> values,
                               bool normalize = false);

/// min(ratio * adv, clip(ratio, 1 - eps, 1 + eps) * adv).
double ppo_clip_term(double ratio, double adv, double eps);

/// Value-loss form. `Mse` is mean (V - R)^2; `Literal` is the alternative
/// 0.5 * mean (V - (R - V))^2 kept for comparison runs.
enum class ValueLoss { Mse, Literal };

std::string_view to_string(ValueLoss v);
ValueLoss parse_value_loss(std::string_view text);

/// Update batch. Advantages and old log-probabilities are constants.
struct Batch {
  std::vector<double> inputs;  // size() x input width
  std::vector<int> actions;
  std::vector<double> returns;
  std::vector<double> advantages;
  std::vector<double> log_prob_old;  // PPO only

  int size() const { return static_cast<int>(actions.size()); }
  /// Throws ContractViolation on empty or inconsistent fields.
  void validate(int input_size, int n_actions) const;
};

struct LossTerms {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;  // mean policy entropy over the batch
  double total = 0.0;
};

struct LossGradients {
  LossTerms terms;
  nn::GradSet actor;
  nn::GradSet critic;
};

/// actor = mean -log pi(a|s) * adv; critic = mean (V(s) - R)^2;
/// total = actor + critic - beta * entropy.
LossTerms a2c_loss(const Batch& batch, const nn::ParamSet& actor, const nn::ParamSet& critic,
                   double beta);
LossGradients a2c_gradients(const Batch& batch, const nn::ParamSet& actor,
                            const nn::ParamSet& critic, double beta);

struct PpoCoefficients {
  double eps_clip = 0.2;
  double value_coef = 0.5;    // c1
  double entropy_coef = 0.01; // c2
  ValueLoss value_loss = ValueLoss::Mse;
};

/// The minimized quantity is -(L_clip - c1 * L_vf + c2 * S):
/// actor_loss = -mean clip term, critic_loss = L_vf, total = actor + c1 * critic - c2 * entropy.
LossTerms ppo_loss(const Batch& batch, const nn::ParamSet& actor, const nn::ParamSet& critic,
                   const PpoCoefficients& coef);
LossGradients ppo_gradients(const Batch& batch, const nn::ParamSet& actor,
                            const nn::ParamSet& critic, const PpoCoefficients& coef);

/// Probability ratios pi_new(a|s) / pi_old(a|s) for every batch entry.
std::vector<double> ppo_ratios(const Batch& batch, const nn::ParamSet& actor);

}  // namespace raiju::rl
