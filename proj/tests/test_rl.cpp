#include <doctest.h>

#include <cmath>
#include <vector>

#include "raiju/agent.hpp"
#include "raiju/errors.hpp"
#include "raiju/nn.hpp"
#include "raiju/optimizer.hpp"
#include "raiju/rl.hpp"

using namespace raiju;
using doctest::Approx;

namespace {

// O(T^2) direct sum, the oracle for the backward recursion.
std::vector<double> direct_returns(const std::vector<double>& r, double gamma) {
  std::vector<double> out(r.size(), 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    double g = 1.0;
    for (std::size_t i = t; i < r.size(); ++i) {
      out[t] += g * r[i];
      g *= gamma;
    }
  }
  return out;
}

rl::Batch single(int action, double ret, double adv) {
  rl::Batch b;
  b.inputs.assign(kObsSize, 0.5);
  b.actions = {action};
  b.returns = {ret};
  b.advantages = {adv};
  return b;
}

double prob_of(const nn::ParamSet& actor, const rl::Batch& b, int a) {
  const auto logits = nn::actor_forward(actor, std::span<const double>(b.inputs).first(kObsSize));
  return nn::softmax(logits)[static_cast<std::size_t>(a)];
}

double entropy_at(const nn::ParamSet& actor, const rl::Batch& b) {
  const auto logits = nn::actor_forward(actor, std::span<const double>(b.inputs).first(kObsSize));
  return nn::policy_stats(logits, 0).entropy;
}

}  // namespace

TEST_SUITE("rl") {
  TEST_CASE("discounted returns examples") {
    const std::vector<double> r = {-1.0, -1.0, 20.0};
    const auto g = rl::discounted_returns(r, 0.99);
    CHECK(g[0] == Approx(17.612).epsilon(1e-12));
    CHECK(g[1] == Approx(18.8).epsilon(1e-12));
    CHECK(g[2] == 20.0);
    CHECK(rl::discounted_returns(r, 0.0) == r);
    const std::vector<double> ones = {1.0, 1.0, 1.0};
    CHECK(rl::discounted_returns(ones, 1.0) == std::vector<double>{3.0, 2.0, 1.0});
    CHECK(rl::discounted_returns(std::vector<double>{}, 0.5).empty());
    CHECK_THROWS_AS(rl::discounted_returns(r, 1.5), ContractViolation);
  }

  TEST_CASE("property: backward recursion equals the direct sum") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> r(1 + rng.below(200));
      for (double& x : r) x = rng.uniform() < 0.1 ? 20.0 : -1.0;
      for (double gamma : {0.0, 0.5, 0.99, 1.0}) {
        const auto fast = rl::discounted_returns(r, gamma);
        const auto slow = direct_returns(r, gamma);
        for (std::size_t t = 0; t < r.size(); ++t) CHECK(std::abs(fast[t] - slow[t]) <= 1e-9);
      }
    }
  }

  TEST_CASE("advantages") {
    const std::vector<double> v = {1.0, 2.0};
    CHECK(rl::advantages(v, v) == std::vector<double>{0.0, 0.0});
    CHECK(rl::advantages(std::vector<double>{2.0}, std::vector<double>{0.0}) == std::vector<double>{2.0});
    CHECK_THROWS_AS(rl::advantages(v, std::vector<double>{1.0}), ContractViolation);
    const auto n = rl::advantages(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{0.0, 0.0, 0.0}, true);
    CHECK(n[0] + n[1] + n[2] == Approx(0.0));
    CHECK(n[2] == Approx(std::sqrt(1.5)).epsilon(1e-6));

    Rng rng(3);
    std::vector<double> a(50), b(50);
    for (double& x : a) x = rng.uniform();
    for (double& x : b) x = rng.uniform();
    const auto d = rl::advantages(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(d[i] == a[i] - b[i]);
  }

  TEST_CASE("A2C loss on a uniform policy") {
    const nn::ParamSet actor = nn::ParamSet::zeros(nn::actor_shape(8));
    const nn::ParamSet critic = nn::ParamSet::zeros(nn::critic_shape(8));
    const rl::LossTerms t = rl::a2c_loss(single(5, 2.0, 2.0), actor, critic, 0.01);
    CHECK(t.actor_loss == Approx(9.19023970026918).epsilon(1e-12));
    CHECK(t.critic_loss == Approx(4.0).epsilon(1e-12));
    CHECK(t.entropy == Approx(std::log(99.0)).epsilon(1e-12));
    CHECK(t.total == Approx(13.144288501767834).epsilon(1e-12));
  }

  TEST_CASE("critic MSE gradient with V=0 and R=2 at zero weights") {
    const nn::ParamSet actor = nn::ParamSet::zeros(nn::actor_shape(8));
    const nn::ParamSet critic = nn::ParamSet::zeros(nn::critic_shape(8));
    const rl::LossGradients g = rl::a2c_gradients(single(0, 2.0, 0.0), actor, critic, 0.0);
    CHECK(g.critic.b2[0] == Approx(-4.0).epsilon(1e-12));
    // Zero advantage and no entropy weight: the actor gets no gradient.
    for (std::size_t i = 0; i < g.actor.size(); ++i) CHECK(g.actor.flat(i) == 0.0);
  }

  TEST_CASE("clip term examples") {
    CHECK(rl::ppo_clip_term(1.5, 1.0, 0.2) == Approx(1.2));
    CHECK(rl::ppo_clip_term(0.5, -1.0, 0.2) == Approx(-0.8));
    for (double adv : {-3.0, 0.0, 0.7, 12.0}) CHECK(rl::ppo_clip_term(1.0, adv, 0.2) == adv);
  }

  TEST_CASE("property: clip term is a pessimistic bound") {
    Rng rng(41);
    for (int i = 0; i < 20000; ++i) {
      const double ratio = 0.01 + 3.0 * rng.uniform();
      const double adv = 20.0 * rng.uniform() - 10.0;
      const double eps = 0.01 + 0.5 * rng.uniform();
      const double term = rl::ppo_clip_term(ratio, adv, eps);
      CHECK(term <= ratio * adv);
      if (ratio >= 1.0 - eps && ratio <= 1.0 + eps) CHECK(term == ratio * adv);
    }
  }

  TEST_CASE("PPO ratios are exactly one before any update") {
    Rng rng(12);
    const nn::ParamSet actor = nn::init_params(nn::actor_shape(16), rng);
    rl::Batch b;
    for (int t = 0; t < 6; ++t) {
      for (int i = 0; i < kObsSize; ++i) b.inputs.push_back(rng.uniform());
      b.actions.push_back(static_cast<int>(rng.below(99)));
      b.returns.push_back(1.0);
      b.advantages.push_back(0.5);
    }
    for (int t = 0; t < 6; ++t) {
      const auto logits = nn::actor_forward(actor, std::span<const double>(b.inputs).subspan(
                                                       static_cast<std::size_t>(t) * kObsSize, kObsSize));
      b.log_prob_old.push_back(nn::log_softmax(logits)[static_cast<std::size_t>(b.actions[static_cast<std::size_t>(t)])]);
    }
    for (double r : rl::ppo_ratios(b, actor)) CHECK(r == 1.0);
  }

  TEST_CASE("PPO needs old log-probabilities") {
    const nn::ParamSet actor = nn::ParamSet::zeros(nn::actor_shape(4));
    const nn::ParamSet critic = nn::ParamSet::zeros(nn::critic_shape(4));
    CHECK_THROWS_AS(rl::ppo_loss(single(0, 1.0, 1.0), actor, critic, {}), ContractViolation);
    rl::Batch bad = single(0, 1.0, 1.0);
    bad.actions = {120};
    CHECK_THROWS_AS(rl::a2c_loss(bad, actor, critic, 0.0), ContractViolation);
    CHECK_THROWS_AS(rl::a2c_loss(rl::Batch{}, actor, critic, 0.0), ContractViolation);
  }

  TEST_CASE("one update on a positive advantage raises that action's probability") {
    Rng rng(6);
    const nn::ParamSet actor0 = nn::init_params({kObsSize, 8, 2}, rng);
    const nn::ParamSet critic = nn::init_params({kObsSize, 8, 1}, rng);
    rl::Batch b = single(1, 1.0, 1.0);
    b.log_prob_old = {std::log(prob_of(actor0, b, 1))};
    for (bool ppo : {false, true}) {
      nn::ParamSet actor = actor0;
      const rl::LossGradients g = ppo ? rl::ppo_gradients(b, actor, critic, {})
                                      : rl::a2c_gradients(b, actor, critic, 0.01);
      nn::OptimizerState st = nn::OptimizerState::for_params(actor);
      nn::optimizer_step(actor, g.actor, 0.01, st, nn::OptimizerConfig{nn::OptimizerKind::Sgd});
      CHECK(prob_of(actor, b, 1) > prob_of(actor0, b, 1));
    }
  }

  TEST_CASE("larger entropy weight gives higher post-update entropy") {
    Rng rng(21);
    const nn::ParamSet actor0 = nn::init_params({kObsSize, 8, 5}, rng);
    const nn::ParamSet critic = nn::init_params({kObsSize, 8, 1}, rng);
    const rl::Batch b = single(2, 0.0, 0.3);
    const auto after = [&](double beta) {
      nn::ParamSet actor = actor0;
      const rl::LossGradients g = rl::a2c_gradients(b, actor, critic, beta);
      nn::OptimizerState st = nn::OptimizerState::for_params(actor);
      nn::optimizer_step(actor, g.actor, 0.05, st, nn::OptimizerConfig{nn::OptimizerKind::Sgd});
      return entropy_at(actor, b);
    };
    CHECK(after(0.5) > after(0.0));
    CHECK(after(0.0) < entropy_at(actor0, b));  // pure policy gradient sharpens
  }

  TEST_CASE("random agent is uniform, seeded, and handles one action") {
    Rng one(1);
    for (int i = 0; i < 10; ++i) CHECK(random_agent_action(one, 1) == 0);
    CHECK_THROWS_AS(random_agent_action(one, 0), ContractViolation);

    Rng rng(2025);
    const int n = 100000;
    std::vector<int> counts(99, 0);
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(random_agent_action(rng))];
    const double expected = n / 99.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 147.01);  // 98 degrees of freedom, alpha = 0.001

    RandomAgent a(4), b(4);
    const Observation obs{};
    for (int i = 0; i < 50; ++i) CHECK(a.act(obs) == b.act(obs));
  }

  TEST_CASE("value loss forms") {
    const nn::ParamSet actor = nn::ParamSet::zeros(nn::actor_shape(4));
    nn::ParamSet critic = nn::ParamSet::zeros(nn::critic_shape(4));
    critic.b2[0] = 1.0;  // V = 1 everywhere
    rl::Batch b = single(0, 3.0, 0.0);
    b.log_prob_old = {-std::log(99.0)};
    rl::PpoCoefficients mse;
    rl::PpoCoefficients literal;
    literal.value_loss = rl::ValueLoss::Literal;
    CHECK(rl::ppo_loss(b, actor, critic, mse).critic_loss == Approx(4.0));
    // 0.5 * (V - (R - V))^2 = 0.5 * (1 - 2)^2
    CHECK(rl::ppo_loss(b, actor, critic, literal).critic_loss == Approx(0.5));
    CHECK(rl::parse_value_loss("literal") == rl::ValueLoss::Literal);
    CHECK_THROWS_AS(rl::parse_value_loss("huber"), ParseError);
  }
}
