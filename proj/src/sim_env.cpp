#include "raiju/sim_env.hpp"

#include <algorithm>

#include "raiju/errors.hpp"

namespace raiju {

std::string_view to_string(Goal g) {
  switch (g) {
    case Goal::PrivEsc: return "pe";
    case Goal::GatherHashdump: return "gh";
    case Goal::LateralMovement: return "lm";
  }
  return "unknown";
}

Goal parse_goal(std::string_view text) {
  if (text == "pe") return Goal::PrivEsc;
  if (text == "gh") return Goal::GatherHashdump;
  if (text == "lm") return Goal::LateralMovement;
  throw ParseError("goal", "expected pe, gh or lm, got \"" + std::string(text) + "\"");
}

std::string_view to_string(RewardScheme r) { return r == RewardScheme::RW1 ? "rw1" : "rw20"; }

RewardScheme parse_reward_scheme(std::string_view text) {
  if (text == "rw1") return RewardScheme::RW1;
  if (text == "rw20") return RewardScheme::RW20;
  throw ParseError("reward", "expected rw1 or rw20, got \"" + std::string(text) + "\"");
}

double success_reward(RewardScheme r) { return r == RewardScheme::RW1 ? 1.0 : 20.0; }

std::string_view to_string(StepInfo info) {
  switch (info) {
    case StepInfo::Progress: return "progress";
    case StepInfo::DuplicateSuccess: return "duplicate";
    case StepInfo::Failure: return "failure";
    case StepInfo::GoalReached: return "goal";
    case StepInfo::BudgetExhausted: return "budget";
  }
  return "unknown";
}

std::array<double, kObsSize> Observation::as_input() const {
  std::array<double, kObsSize> x{};
  for (int i = 0; i < kObsSize; ++i) x[i] = static_cast<double>((*this)[i]);
  return x;
}

bool is_valid(const Observation& obs) {
  auto ternary = [](int v) { return v >= -1 && v <= 1; };
  for (int i = kObsPlatform; i <= kObsLinuxKernelVul; ++i) {
    if (!ternary(obs[i])) return false;
  }
  if (obs[kObsHashdump] != 0 && obs[kObsHashdump] != 1) return false;
  if (!ternary(obs[kObsPeerPlatform])) return false;
  const int peers = obs[kObsNumPeers];
  if (peers < 0) return false;
  return obs[kObsPeerIndex] >= 0 && obs[kObsPeerIndex] <= std::max(peers - 1, 0);
}

Observation encode_observation(const std::vector<HostState>& hosts, int session_host, int cursor,
                               bool peer_platform_hidden) {
  Observation obs;
  obs.values.fill(-1);
  const HostState& h = hosts.at(static_cast<std::size_t>(session_host));
  const HostSpec& spec = *h.spec;
  // Table encodings: 0 means "yes" for the user flags, "enabled" for UAC.
  obs[kObsPlatform] = encode(spec.platform);
  if (spec.platform == Platform::Windows) {
    obs[kObsWinUac] = spec.uac_enabled ? 0 : 1;
    obs[kObsWinAdminGroup] = h.elevated ? 0 : 1;
    obs[kObsWinAdminUser] = h.elevated ? 0 : 1;
    obs[kObsWinSystemUser] = h.elevated ? 0 : 1;
  } else {
    obs[kObsLinuxRootUser] = h.elevated ? 0 : 1;
    obs[kObsLinuxKernelVul] = spec.kernel_vulnerable ? 1 : 0;
  }
  obs[kObsHashdump] = h.hashdump_taken ? 1 : 0;

  const int num_peers = static_cast<int>(hosts.size()) - 1;
  obs[kObsNumPeers] = num_peers;
  if (num_peers == 0) {
    obs[kObsPeerIndex] = 0;
    obs[kObsPeerPlatform] = -1;
    return obs;
  }
  obs[kObsPeerIndex] = cursor;
  const HostState& p = hosts.at(static_cast<std::size_t>(cursor) + 1);
  const bool visible = !peer_platform_hidden || p.smb_probed || p.compromised;
  obs[kObsPeerPlatform] = visible ? encode(p.spec->platform) : -1;
  return obs;
}

bool goal_holds(Goal goal, const std::vector<HostState>& hosts) {
  switch (goal) {
    case Goal::PrivEsc: return hosts.front().elevated;
    case Goal::GatherHashdump: return hosts.front().hashdump_taken;
    case Goal::LateralMovement:
      return std::all_of(hosts.begin() + 1, hosts.end(), [](const HostState& h) {
        return !h.spec->smb_open_truth || h.compromised;
      });
  }
  return false;
}

SimEnv::SimEnv(Scenario scenario, EnvOptions options)
    : scenario_(std::make_shared<const Scenario>(std::move(scenario))), options_(options) {
  validate(*scenario_);
  if (options_.step_budget <= 0) throw ContractViolation("step budget must be positive");
}

Observation SimEnv::reset(std::uint64_t seed) { return reset(options_.goal, seed); }

Observation SimEnv::reset(Goal goal, std::uint64_t seed) {
  options_.goal = goal;
  seed_ = seed;
  hosts_.clear();
  hosts_.push_back(HostState{&scenario_->foothold, true, false, false, false});
  for (const HostSpec& n : scenario_->neighbors) hosts_.push_back(HostState{&n});
  session_ = 0;
  cursor_ = 0;
  steps_ = 0;
  done_ = false;
  return observe();
}

Observation SimEnv::observe() const {
  return encode_observation(hosts_, session_, cursor_, scenario_->peer_platform_hidden);
}

void SimEnv::advance_cursor() {
  const int n = static_cast<int>(scenario_->neighbors.size());
  for (int k = 1; k <= n; ++k) {
    const int candidate = (cursor_ + k) % n;
    if (!peer(candidate).compromised) {
      cursor_ = candidate;
      return;
    }
  }
}

bool SimEnv::try_privesc(int action_id, bool& duplicate) {
  HostState& h = hosts_[static_cast<std::size_t>(session_)];
  const ActionSpec& spec = action_spec(action_id);
  if (!is_applicable(spec, HostView{h.spec->platform, h.elevated})) return false;
  if (!h.spec->vulnerable_to(action_id)) return false;
  if (h.elevated) {
    duplicate = true;
    return false;
  }
  h.elevated = true;
  return true;
}

bool SimEnv::try_hashdump(int action_id, bool& duplicate) {
  HostState& h = hosts_[static_cast<std::size_t>(session_)];
  if (!is_applicable(action_spec(action_id), HostView{h.spec->platform, h.elevated})) return false;
  if (h.hashdump_taken) {
    duplicate = true;
    return false;
  }
  h.hashdump_taken = true;
  return true;
}

bool SimEnv::try_lateral(int action_id, bool& duplicate) {
  if (scenario_->neighbors.empty()) return false;
  const HostState& source = hosts_[static_cast<std::size_t>(session_)];
  HostState& target = peer(cursor_);
  if (target.compromised) {
    duplicate = true;
    return false;
  }
  const bool ok = source.hashdump_taken && target.spec->smb_open_truth &&
                  action_spec(action_id).target_platform == target.spec->platform;
  if (!ok) {
    target.smb_probed = true;
    advance_cursor();
    return false;
  }
  target.compromised = true;
  session_ = cursor_ + 1;
  advance_cursor();
  return true;
}

StepOutcome SimEnv::step(int action_id) {
  if (done_) throw ContractViolation("step called on a finished episode (call reset first)");
  if (!valid_action_id(action_id)) {
    throw ContractViolation("action id " + std::to_string(action_id) + " outside [0, 98]");
  }

  bool duplicate = false;
  bool success = false;
  switch (action_spec(action_id).group) {
    case ActionGroup::WindowsPrivEsc:
    case ActionGroup::LinuxPrivEsc: success = try_privesc(action_id, duplicate); break;
    case ActionGroup::Hashdump: success = try_hashdump(action_id, duplicate); break;
    case ActionGroup::LateralSMB: success = try_lateral(action_id, duplicate); break;
  }
  ++steps_;

  StepOutcome out;
  out.success = success;
  out.reward = success ? success_reward(options_.reward) : kFailureReward;
  out.info = success ? StepInfo::Progress : (duplicate ? StepInfo::DuplicateSuccess : StepInfo::Failure);
  if (goal_holds(options_.goal, hosts_)) {
    out.info = StepInfo::GoalReached;
    done_ = true;
  } else if (steps_ >= options_.step_budget) {
    out.info = StepInfo::BudgetExhausted;
    done_ = true;
  }
  out.done = done_;
  out.observation = observe();
  return out;
}

}  // namespace raiju
