#include "raiju/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raiju/catalog.hpp"
#include "raiju/environment.hpp"
#include "raiju/errors.hpp"
#include "raiju/nn.hpp"
#include "raiju/rl.hpp"
#include "raiju/rng.hpp"

namespace raiju {
namespace {

constexpr double kErrorFloor = 1e-6;

rl::Batch random_batch(int n, Rng& rng) {
  rl::Batch b;
  b.inputs.resize(static_cast<std::size_t>(n) * kObsSize);
  // Observation-like values in {-1, 0, 1} plus a few larger counters.
  for (double& x : b.inputs) x = static_cast<double>(rng.below(3)) - 1.0;
  for (int t = 0; t < n; ++t) {
    b.inputs[static_cast<std::size_t>(t) * kObsSize + kObsNumPeers] = static_cast<double>(rng.below(5));
    b.actions.push_back(static_cast<int>(rng.below(kNumActions)));
    b.returns.push_back(rng.uniform() * 40.0 - 20.0);
    b.advantages.push_back(rng.uniform() * 4.0 - 2.0);
  }
  return b;
}

// Old log-probs chosen so every ratio sits in a random spot well away from the
// clip edges, where the objective is not differentiable.
void set_old_log_probs(rl::Batch& b, const nn::ParamSet& actor, double eps_clip, Rng& rng) {
  b.log_prob_old.assign(b.actions.size(), 0.0);
  const auto ratios = [&] {
    rl::Batch probe = b;
    return rl::ppo_ratios(probe, actor);  // log_prob_old = 0 gives pi(a|s)
  }();
  const double lo = 1.0 - eps_clip;
  const double hi = 1.0 + eps_clip;
  for (std::size_t t = 0; t < b.actions.size(); ++t) {
    double target = 1.0;
    do {
      target = 0.5 + rng.uniform();  // [0.5, 1.5)
    } while (std::abs(target - lo) < 0.02 || std::abs(target - hi) < 0.02);
    b.log_prob_old[t] = std::log(ratios[t]) - std::log(target);
  }
}

std::vector<std::size_t> pick_coordinates(std::size_t size, int count, Rng& rng) {
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (count <= 0 || static_cast<std::size_t>(count) >= size) return all;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
    std::swap(all[i], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

double compare(const nn::GradSet& analytic, const nn::GradSet& numeric,
               const std::vector<std::size_t>& coords) {
  double worst = 0.0;
  for (std::size_t i : coords) {
    const double a = analytic.flat(i);
    const double n = numeric.flat(i);
    const double denom = std::max({std::abs(a), std::abs(n), kErrorFloor});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

GradcheckTrial check_one(bool ppo, std::uint64_t seed, int hidden, int sampled,
                         const GradcheckOptions& opt) {
  Rng rng(seed);
  const nn::ParamSet actor = nn::init_params(nn::actor_shape(hidden), rng);
  const nn::ParamSet critic = nn::init_params(nn::critic_shape(hidden), rng);
  rl::Batch batch = random_batch(opt.batch, rng);

  rl::PpoCoefficients coef;
  coef.value_loss = (seed % 2 == 0) ? rl::ValueLoss::Mse : rl::ValueLoss::Literal;
  if (ppo) set_old_log_probs(batch, actor, coef.eps_clip, rng);
  const double beta = 0.01;

  rl::LossGradients g = ppo ? rl::ppo_gradients(batch, actor, critic, coef)
                            : rl::a2c_gradients(batch, actor, critic, beta);
  if (opt.inject_fault) {
    for (double& w : g.actor.w2) w *= 1.01;
  }

  const auto total = [&](const nn::ParamSet& a, const nn::ParamSet& c) {
    return ppo ? rl::ppo_loss(batch, a, c, coef).total : rl::a2c_loss(batch, a, c, beta).total;
  };
  const auto actor_coords = pick_coordinates(actor.size(), sampled, rng);
  const auto critic_coords = pick_coordinates(critic.size(), sampled, rng);
  const nn::GradSet num_actor = nn::finite_diff_grad(
      [&](const nn::ParamSet& p) { return total(p, critic); }, actor, opt.fd_eps, actor_coords,
      kernels::Exec::Parallel, nn::Stencil::Central4);
  const nn::GradSet num_critic = nn::finite_diff_grad(
      [&](const nn::ParamSet& p) { return total(actor, p); }, critic, opt.fd_eps, critic_coords,
      kernels::Exec::Parallel, nn::Stencil::Central4);

  GradcheckTrial trial;
  trial.family = ppo ? "ppo" : "a2c";
  trial.seed = seed;
  trial.hidden = hidden;
  trial.coordinates = actor_coords.size() + critic_coords.size();
  trial.max_rel_error = std::max(compare(g.actor, num_actor, actor_coords),
                                 compare(g.critic, num_critic, critic_coords));
  return trial;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& opt) {
  if (opt.seeds < 1) throw ContractViolation("gradcheck needs at least one seed");
  if (opt.batch < 1 || opt.small_hidden < 1) throw ContractViolation("gradcheck sizes must be positive");
  GradcheckReport report;
  for (int s = 0; s < opt.seeds; ++s) {
    const std::uint64_t seed = derive_seed(opt.base_seed, 5, static_cast<std::uint64_t>(s));
    for (bool ppo : {false, true}) {
      // Every coordinate of a narrow network, then a sample of the full-width one.
      report.trials.push_back(check_one(ppo, seed, opt.small_hidden, 0, opt));
      report.trials.push_back(check_one(ppo, seed, nn::kHiddenUnits, opt.sampled_coordinates, opt));
    }
  }
  for (const GradcheckTrial& t : report.trials) {
    report.max_rel_error = std::max(report.max_rel_error, t.max_rel_error);
  }
  report.passed = report.max_rel_error <= opt.tolerance;
  return report;
}

}  // namespace raiju
