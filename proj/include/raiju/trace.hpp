#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "raiju/agent.hpp"
#include "raiju/environment.hpp"

namespace raiju {

/// One environment step as stored on disk.
struct TraceRecord {
  int episode = 0;
  int step = 0;
  Observation obs;
  int action = 0;
  bool success = false;
  double reward = 0.0;
  bool done = false;
  Observation next_obs;

  bool operator==(const TraceRecord&) const = default;
};

inline constexpr int kTraceColumns = 2 + kObsSize + 1 + 1 + 1 + 1 + kObsSize;  // 28

/// `episode,step,o0..o10,action,success,reward,done,n0..n10`
std::string trace_header();
std::string format_trace_row(const TraceRecord& r);

/// Appends whole episodes to a CSV file; each episode is written and flushed
/// in one piece so a reader never sees half an episode.
class TraceWriter {
 public:
  explicit TraceWriter(std::string path);
  void write_episode(std::span<const TraceRecord> rows);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ostream> out_;
};

/// Runs `episodes` episodes of `agent` in `env` and streams every step to
/// `sink`. Episode e resets with derive_seed(seed, e) and reseeds the agent.
std::vector<TraceRecord> record(Environment& env, Agent& agent, int episodes, std::uint64_t seed,
                                TraceWriter* sink = nullptr);

/// Parses and validates a trace. ParseError carries "<source>:<line>".
std::vector<TraceRecord> parse_trace(std::istream& in, const std::string& source);
std::vector<TraceRecord> read_trace(const std::string& path);

enum class ReplayMode {
  Strict,  // actions must match the recording; divergence is a ContractViolation
  Lookup,  // (observation, action) looked up anywhere in the trace; unknown pairs fail
};

std::string_view to_string(ReplayMode m);
ReplayMode parse_replay_mode(std::string_view text);

/// Serves recorded transitions through the reset/step contract.
///
/// Strict mode walks the recorded episodes in order (reset moves to the next
/// episode, wrapping around). Lookup mode starts episodes from the recorded
/// start states in turn and answers each (observation, action) pair with the
/// first recorded outcome for it; pairs never recorded cost the failure
/// reward and leave the observation unchanged. Lookup episodes end on a
/// recorded goal step or after `step_budget` steps.
class ReplayEnv : public Environment {
 public:
  ReplayEnv(std::shared_ptr<const std::vector<TraceRecord>> rows, ReplayMode mode,
            int step_budget = 200);

  Observation reset(std::uint64_t seed) override;
  StepOutcome step(int action_id) override;

  int episode_count() const { return static_cast<int>(starts_.size()); }

 private:
  StepOutcome outcome_of(const TraceRecord& r) const;

  std::shared_ptr<const std::vector<TraceRecord>> rows_;
  ReplayMode mode_;
  int step_budget_;
  std::vector<std::size_t> starts_;  // first row of each episode
  std::map<std::pair<Observation, int>, std::size_t> lookup_;
  std::size_t next_episode_ = 0;
  std::size_t cursor_ = 0;  // strict: next row to serve
  Observation current_;
  int steps_ = 0;
  bool done_ = true;
};

std::unique_ptr<ReplayEnv> load_replay(const std::string& path, ReplayMode mode = ReplayMode::Strict,
                                       int step_budget = 200);

}  // namespace raiju
