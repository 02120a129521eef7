#pragma once

#include <memory>
#include <vector>

#include "raiju/environment.hpp"
#include "raiju/scenario.hpp"

namespace raiju {

inline constexpr int kStandaloneStepBudget = 4000;
inline constexpr int kComparisonStepBudget = 200;

struct EnvOptions {
  Goal goal = Goal::PrivEsc;
  RewardScheme reward = RewardScheme::RW20;
  int step_budget = kStandaloneStepBudget;
};

/// Runtime state of one host. Flags only ever go from false to true.
struct HostState {
  const HostSpec* spec = nullptr;
  bool compromised = false;
  bool elevated = false;  // SYSTEM on Windows, root on Linux
  bool hashdump_taken = false;
  bool smb_probed = false;
};

/// Pure encoding of the session host plus the peer under the cursor.
/// `hosts[0]` is the foothold, `hosts[1..]` the neighbors in scenario order.
Observation encode_observation(const std::vector<HostState>& hosts, int session_host, int cursor,
                               bool peer_platform_hidden);

/// Goal predicate over runtime state.
bool goal_holds(Goal goal, const std::vector<HostState>& hosts);

/// Simulated post-exploitation episode over a fixed scenario.
///
/// Transitions are deterministic: a privesc module works iff it targets the
/// session host's platform, is in that host's vulnerable set and the host is
/// not yet elevated; hashdump needs elevation; lateral SMB needs a hashdump on
/// the session host and an open port on the cursor peer. A successful lateral
/// move shifts the session to the new host. Any failed lateral attempt marks
/// the cursor peer probed and rotates the cursor to the next uncompromised
/// peer. The reset seed is recorded but the dynamics draw no randomness.
class SimEnv : public Environment {
 public:
  SimEnv(Scenario scenario, EnvOptions options);

  Observation reset(std::uint64_t seed) override;
  Observation reset(Goal goal, std::uint64_t seed);
  StepOutcome step(int action_id) override;

  Observation observe() const;

  const Scenario& scenario() const { return *scenario_; }
  const EnvOptions& options() const { return options_; }
  void set_options(const EnvOptions& options) { options_ = options; }

  const std::vector<HostState>& hosts() const { return hosts_; }
  int session_host() const { return session_; }
  int cursor() const { return cursor_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  std::uint64_t seed() const { return seed_; }

 private:
  HostState& peer(int index) { return hosts_[static_cast<std::size_t>(index) + 1]; }
  void advance_cursor();
  bool try_privesc(int action_id, bool& duplicate);
  bool try_hashdump(int action_id, bool& duplicate);
  bool try_lateral(int action_id, bool& duplicate);

  std::shared_ptr<const Scenario> scenario_;
  EnvOptions options_;
  std::vector<HostState> hosts_;
  int session_ = 0;
  int cursor_ = 0;
  int steps_ = 0;
  bool done_ = true;
  std::uint64_t seed_ = 0;
};

}  // namespace raiju
