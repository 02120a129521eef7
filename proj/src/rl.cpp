#include "raiju/rl.hpp"

#include <algorithm>
#include <cmath>

#include "raiju/errors.hpp"

namespace raiju::rl {

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ContractViolation("gamma must lie in [0, 1]");
  std::vector<double> out(rewards.size());
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    running = rewards[t] + gamma * running;
    out[t] = running;
  }
  return out;
}

std::vector<double> advantages(std::span<const double> returns, std::span<const double> values,
                               bool normalize) {
  if (returns.size() != values.size()) {
    throw ContractViolation("advantages: returns and values differ in length");
  }
  std::vector<double> adv(returns.size());
  for (std::size_t t = 0; t < adv.size(); ++t) adv[t] = returns[t] - values[t];
  if (normalize && adv.size() > 1) {
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(adv.size()));
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }
  return adv;
}

double ppo_clip_term(double ratio, double adv, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * adv, clipped * adv);
}

std::string_view to_string(ValueLoss v) { return v == ValueLoss::Mse ? "mse" : "literal"; }

ValueLoss parse_value_loss(std::string_view text) {
  if (text == "mse") return ValueLoss::Mse;
  if (text == "literal") return ValueLoss::Literal;
  throw ParseError("value_loss", "expected mse or literal, got \"" + std::string(text) + "\"");
}

void Batch::validate(int input_size, int n_actions) const {
  const auto n = actions.size();
  if (n == 0) throw ContractViolation("empty update batch");
  if (inputs.size() != n * static_cast<std::size_t>(input_size) || returns.size() != n || advantages.size() != n) {
    throw ContractViolation("batch fields have inconsistent lengths");
  }
  if (!log_prob_old.empty() && log_prob_old.size() != n) {
    throw ContractViolation("batch log_prob_old has the wrong length");
  }
  for (int a : actions) {
    if (a < 0 || a >= n_actions) throw ContractViolation("batch action id outside the policy's range");
  }
}

namespace {

enum class Family { A2C, PPO };

struct Settings {
  Family family;
  double beta;  // entropy weight in the minimized loss
  double value_weight;
  double eps_clip;
  ValueLoss value_loss;
};

// Shared forward + (optionally) backward for both loss families.
LossTerms evaluate(const Batch& batch, const nn::ParamSet& actor, const nn::ParamSet& critic,
                   const Settings& cfg, LossGradients* grads) {
  batch.validate(actor.shape.in, actor.shape.out);
  if (critic.shape.in != actor.shape.in || critic.shape.out != 1) {
    throw ContractViolation("critic must map the actor's input to a single value");
  }
  if (cfg.family == Family::PPO && batch.log_prob_old.size() != batch.actions.size()) {
    throw ContractViolation("PPO batch needs log_prob_old for every transition");
  }
  const int n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const int n_out = actor.shape.out;

  const nn::ForwardCache policy = nn::forward(actor, batch.inputs, n);
  const nn::ForwardCache value = nn::forward(critic, batch.inputs, n);

  std::vector<double> d_logits(grads ? policy.output.size() : 0, 0.0);
  std::vector<double> d_value(grads ? static_cast<std::size_t>(n) : 0, 0.0);

  LossTerms terms;
  for (int t = 0; t < n; ++t) {
    const auto logits = std::span<const double>(policy.output).subspan(
        static_cast<std::size_t>(t) * n_out, static_cast<std::size_t>(n_out));
    const std::vector<double> logp = nn::log_softmax(logits);
    const int a = batch.actions[static_cast<std::size_t>(t)];
    const double adv = batch.advantages[static_cast<std::size_t>(t)];
    double h = 0.0;
    for (double lp : logp) h -= std::exp(lp) * lp;
    terms.entropy += h * inv_n;

    // d(actor term)/d log pi(a|s)
    double d_logpa = 0.0;
    if (cfg.family == Family::A2C) {
      terms.actor_loss += -logp[static_cast<std::size_t>(a)] * adv * inv_n;
      d_logpa = -adv * inv_n;
    } else {
      const double ratio = std::exp(logp[static_cast<std::size_t>(a)] -
                                    batch.log_prob_old[static_cast<std::size_t>(t)]);
      const double unclipped = ratio * adv;
      const double clipped = std::clamp(ratio, 1.0 - cfg.eps_clip, 1.0 + cfg.eps_clip) * adv;
      terms.actor_loss += -std::min(unclipped, clipped) * inv_n;
      if (unclipped <= clipped) d_logpa = -unclipped * inv_n;
    }

    const double v = value.output[static_cast<std::size_t>(t)];
    const double r = batch.returns[static_cast<std::size_t>(t)];
    double dv = 0.0;
    if (cfg.value_loss == ValueLoss::Mse) {
      terms.critic_loss += (v - r) * (v - r) * inv_n;
      dv = 2.0 * (v - r) * inv_n;
    } else {
      const double e = 2.0 * v - r;
      terms.critic_loss += 0.5 * e * e * inv_n;
      dv = 2.0 * e * inv_n;
    }

    if (grads) {
      double* dz = d_logits.data() + static_cast<std::size_t>(t) * n_out;
      for (int k = 0; k < n_out; ++k) {
        const double p = std::exp(logp[static_cast<std::size_t>(k)]);
        // log pi(a) = z_a - logsumexp(z)  =>  d/dz_k = [k == a] - p_k
        dz[k] = d_logpa * ((k == a ? 1.0 : 0.0) - p);
        // -beta * H  =>  beta * p_k * (log p_k + H)
        dz[k] += cfg.beta * p * (logp[static_cast<std::size_t>(k)] + h) * inv_n;
      }
      d_value[static_cast<std::size_t>(t)] = cfg.value_weight * dv;
    }
  }
  terms.total = terms.actor_loss + cfg.value_weight * terms.critic_loss - cfg.beta * terms.entropy;

  if (grads) {
    grads->actor = nn::backward(actor, policy, d_logits);
    grads->critic = nn::backward(critic, value, d_value);
    grads->terms = terms;
  }
  return terms;
}

Settings a2c_settings(double beta) { return {Family::A2C, beta, 1.0, 0.0, ValueLoss::Mse}; }

Settings ppo_settings(const PpoCoefficients& c) {
  if (c.eps_clip <= 0.0) throw ContractViolation("eps_clip must be positive");
  return {Family::PPO, c.entropy_coef, c.value_coef, c.eps_clip, c.value_loss};
}

}  // namespace

LossTerms a2c_loss(const Batch& batch, const nn::ParamSet& actor, const nn::ParamSet& critic,
                   double beta) {
  return evaluate(batch, actor, critic, a2c_settings(beta), nullptr);
}

LossGradients a2c_gradients(const Batch& batch, const nn::ParamSet& actor,
                            const nn::ParamSet& critic, double beta) {
  LossGradients g;
  evaluate(batch, actor, critic, a2c_settings(beta), &g);
  return g;
}

LossTerms ppo_loss(const Batch& batch, const nn::ParamSet& actor, const nn::ParamSet& critic,
                   const PpoCoefficients& coef) {
  return evaluate(batch, actor, critic, ppo_settings(coef), nullptr);
}

LossGradients ppo_gradients(const Batch& batch, const nn::ParamSet& actor,
                            const nn::ParamSet& critic, const PpoCoefficients& coef) {
  LossGradients g;
  evaluate(batch, actor, critic, ppo_settings(coef), &g);
  return g;
}

std::vector<double> ppo_ratios(const Batch& batch, const nn::ParamSet& actor) {
  batch.validate(actor.shape.in, actor.shape.out);
  if (batch.log_prob_old.size() != batch.actions.size()) {
    throw ContractViolation("ratios need log_prob_old for every transition");
  }
  const int n = batch.size();
  const nn::ForwardCache policy = nn::forward(actor, batch.inputs, n);
  std::vector<double> ratios(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const auto logits = std::span<const double>(policy.output).subspan(
        static_cast<std::size_t>(t) * actor.shape.out, static_cast<std::size_t>(actor.shape.out));
    const auto logp = nn::log_softmax(logits);
    ratios[static_cast<std::size_t>(t)] =
        std::exp(logp[static_cast<std::size_t>(batch.actions[static_cast<std::size_t>(t)])] -
                 batch.log_prob_old[static_cast<std::size_t>(t)]);
  }
  return ratios;
}

}  // namespace raiju::rl
