#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace raiju {

enum class Goal { PrivEsc, GatherHashdump, LateralMovement };

std::string_view to_string(Goal g);
Goal parse_goal(std::string_view text);

/// Reward paid for a first-time success; every other step pays -1.
enum class RewardScheme { RW1, RW20 };

std::string_view to_string(RewardScheme r);
RewardScheme parse_reward_scheme(std::string_view text);
double success_reward(RewardScheme r);
inline constexpr double kFailureReward = -1.0;

/// Positions in the 11-feature agent state.
enum ObsField : int {
  kObsPlatform = 0,
  kObsWinUac,
  kObsWinAdminGroup,
  kObsWinAdminUser,
  kObsWinSystemUser,
  kObsLinuxRootUser,
  kObsLinuxKernelVul,
  kObsHashdump,
  kObsNumPeers,
  kObsPeerIndex,
  kObsPeerPlatform,
};

inline constexpr int kObsSize = 11;

struct Observation {
  std::array<int, kObsSize> values{};

  int operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
  bool operator==(const Observation&) const = default;
  auto operator<=>(const Observation&) const = default;

  std::array<double, kObsSize> as_input() const;
};

/// Range checks on every feature (ternary flags, peer counters).
bool is_valid(const Observation& obs);

enum class StepInfo { Progress, DuplicateSuccess, Failure, GoalReached, BudgetExhausted };

std::string_view to_string(StepInfo info);

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  bool success = false;
  bool done = false;
  StepInfo info = StepInfo::Failure;

  bool operator==(const StepOutcome&) const = default;
};

/// Episodic reset/step contract shared by the simulator and trace replay.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepOutcome step(int action_id) = 0;
};

}  // namespace raiju
