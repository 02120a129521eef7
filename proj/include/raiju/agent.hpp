#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "raiju/catalog.hpp"
#include "raiju/environment.hpp"
#include "raiju/nn.hpp"
#include "raiju/rng.hpp"

namespace raiju {

/// Anything that maps an observation to an action id.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual int act(const Observation& obs) = 0;
  /// Resets any internal randomness; a no-op for deterministic agents.
  virtual void reseed(std::uint64_t /*seed*/) {}
  virtual std::unique_ptr<Agent> clone() const = 0;
};

/// Acts with a trained actor network: argmax when greedy, else sampled.
class PolicyAgent final : public Agent {
 public:
  explicit PolicyAgent(nn::ParamSet actor, bool greedy = true, std::uint64_t seed = 0);
  int act(const Observation& obs) override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<PolicyAgent>(*this); }

  const nn::ParamSet& actor() const { return actor_; }

 private:
  nn::ParamSet actor_;
  bool greedy_;
  Rng rng_;
};

/// Uniform over the action space.
int random_agent_action(Rng& rng, int n_actions = kNumActions);

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed = 0, int n_actions = kNumActions)
      : rng_(seed), n_actions_(n_actions) {}
  int act(const Observation&) override { return random_agent_action(rng_, n_actions_); }
  void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RandomAgent>(*this); }

 private:
  Rng rng_;
  int n_actions_;
};

/// Plays a fixed action list, repeating the last entry when it runs out.
class ScriptedAgent final : public Agent {
 public:
  explicit ScriptedAgent(std::vector<int> actions) : actions_(std::move(actions)) {}
  int act(const Observation&) override;
  void reseed(std::uint64_t) override { next_ = 0; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<ScriptedAgent>(*this); }

 private:
  std::vector<int> actions_;
  std::size_t next_ = 0;
};

}  // namespace raiju
