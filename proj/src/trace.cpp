#include "raiju/trace.hpp"

#include <fstream>
#include <sstream>

#include "raiju/csv.hpp"
#include "raiju/errors.hpp"
#include "raiju/rng.hpp"

namespace raiju {
namespace {

void append_obs(std::string& line, const Observation& obs) {
  for (int i = 0; i < kObsSize; ++i) {
    line += ',';
    line += std::to_string(obs[i]);
  }
}

int field_int(std::string_view text, const std::string& where, const char* name) {
  long long v = 0;
  if (!csv::parse_int(text, v) || v < INT32_MIN || v > INT32_MAX) {
    throw ParseError(where, std::string(name) + " is not an integer: \"" + std::string(text) + "\"");
  }
  return static_cast<int>(v);
}

bool field_flag(std::string_view text, const std::string& where, const char* name) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw ParseError(where, std::string(name) + " must be 0 or 1, got \"" + std::string(text) + "\"");
}

}  // namespace

std::string trace_header() {
  std::string h = "episode,step";
  for (int i = 0; i < kObsSize; ++i) h += ",o" + std::to_string(i);
  h += ",action,success,reward,done";
  for (int i = 0; i < kObsSize; ++i) h += ",n" + std::to_string(i);
  return h;
}

std::string format_trace_row(const TraceRecord& r) {
  std::string line = std::to_string(r.episode) + ',' + std::to_string(r.step);
  append_obs(line, r.obs);
  line += ',' + std::to_string(r.action) + ',' + (r.success ? "1" : "0") + ',' +
          csv::format_double(r.reward) + ',' + (r.done ? "1" : "0");
  append_obs(line, r.next_obs);
  return line;
}

TraceWriter::TraceWriter(std::string path) : path_(std::move(path)) {
  auto f = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
  if (!*f) throw IoError(path_, "cannot open for writing");
  *f << trace_header() << '\n';
  f->flush();
  if (!*f) throw IoError(path_, "write failed");
  out_ = std::move(f);
}

void TraceWriter::write_episode(std::span<const TraceRecord> rows) {
  std::string chunk;
  for (const TraceRecord& r : rows) {
    chunk += format_trace_row(r);
    chunk += '\n';
  }
  out_->write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  out_->flush();
  if (!*out_) throw IoError(path_, "write failed");
}

std::vector<TraceRecord> record(Environment& env, Agent& agent, int episodes, std::uint64_t seed,
                                TraceWriter* sink) {
  if (episodes < 0) throw ContractViolation("episode count must be non-negative");
  std::vector<TraceRecord> all;
  std::vector<TraceRecord> rows;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(e));
    agent.reseed(s);
    Observation obs = env.reset(s);
    rows.clear();
    for (int t = 0;; ++t) {
      const int a = agent.act(obs);
      const StepOutcome out = env.step(a);
      rows.push_back({e, t, obs, a, out.success, out.reward, out.done, out.observation});
      obs = out.observation;
      if (out.done) break;
    }
    if (sink != nullptr) sink->write_episode(rows);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

std::vector<TraceRecord> parse_trace(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source + ":1", "empty trace");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != trace_header()) throw ParseError(source + ":1", "unexpected header");

  std::vector<TraceRecord> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.empty()) throw ParseError(where, "blank line");
    const auto f = csv::split(line);
    if (static_cast<int>(f.size()) != kTraceColumns) {
      throw ParseError(where, "expected " + std::to_string(kTraceColumns) + " fields, got " +
                                  std::to_string(f.size()));
    }
    TraceRecord r;
    std::size_t k = 0;
    r.episode = field_int(f[k++], where, "episode");
    r.step = field_int(f[k++], where, "step");
    for (int i = 0; i < kObsSize; ++i) r.obs[i] = field_int(f[k++], where, "observation");
    r.action = field_int(f[k++], where, "action");
    r.success = field_flag(f[k++], where, "success");
    if (!csv::parse_double(f[k++], r.reward)) throw ParseError(where, "reward is not a number");
    r.done = field_flag(f[k++], where, "done");
    for (int i = 0; i < kObsSize; ++i) r.next_obs[i] = field_int(f[k++], where, "next observation");

    if (!valid_action_id(r.action)) throw ParseError(where, "action id out of range");
    if (!is_valid(r.obs) || !is_valid(r.next_obs)) throw ParseError(where, "observation out of range");

    if (rows.empty()) {
      if (r.episode != 0 || r.step != 0) throw ParseError(where, "trace must start at episode 0, step 0");
    } else {
      const TraceRecord& p = rows.back();
      if (p.done) {
        if (r.episode != p.episode + 1 || r.step != 0) {
          throw ParseError(where, "expected episode " + std::to_string(p.episode + 1) + " step 0");
        }
      } else {
        if (r.episode != p.episode || r.step != p.step + 1) {
          throw ParseError(where, "expected episode " + std::to_string(p.episode) + " step " +
                                      std::to_string(p.step + 1));
        }
        if (r.obs != p.next_obs) throw ParseError(where, "observation does not continue the previous row");
      }
    }
    rows.push_back(r);
  }
  if (!rows.empty() && !rows.back().done) {
    throw ParseError(source + ":" + std::to_string(line_no), "last episode has no done row");
  }
  return rows;
}

std::vector<TraceRecord> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return parse_trace(in, path);
}

std::string_view to_string(ReplayMode m) {
  return m == ReplayMode::Strict ? "strict" : "lookup";
}

ReplayMode parse_replay_mode(std::string_view text) {
  if (text == "strict") return ReplayMode::Strict;
  if (text == "lookup") return ReplayMode::Lookup;
  throw ParseError("replay mode", "expected strict or lookup, got \"" + std::string(text) + "\"");
}

ReplayEnv::ReplayEnv(std::shared_ptr<const std::vector<TraceRecord>> rows, ReplayMode mode,
                     int step_budget)
    : rows_(std::move(rows)), mode_(mode), step_budget_(step_budget) {
  if (!rows_ || rows_->empty()) throw ContractViolation("replay needs at least one recorded step");
  if (step_budget_ < 1) throw ContractViolation("step budget must be positive");
  for (std::size_t i = 0; i < rows_->size(); ++i) {
    const TraceRecord& r = (*rows_)[i];
    if (r.step == 0) starts_.push_back(i);
    lookup_.try_emplace({r.obs, r.action}, i);
  }
}

StepOutcome ReplayEnv::outcome_of(const TraceRecord& r) const {
  StepOutcome o;
  o.observation = r.next_obs;
  o.reward = r.reward;
  o.success = r.success;
  o.done = r.done;
  if (r.done) {
    o.info = r.success ? StepInfo::GoalReached : StepInfo::BudgetExhausted;
  } else {
    o.info = r.success ? StepInfo::Progress : StepInfo::Failure;
  }
  return o;
}

Observation ReplayEnv::reset(std::uint64_t) {
  const std::size_t start = starts_[next_episode_ % starts_.size()];
  ++next_episode_;
  cursor_ = start;
  current_ = (*rows_)[start].obs;
  steps_ = 0;
  done_ = false;
  return current_;
}

StepOutcome ReplayEnv::step(int action_id) {
  if (done_) throw ContractViolation("step() called on a finished or unstarted replay episode");
  if (!valid_action_id(action_id)) throw ContractViolation("action id out of range");
  ++steps_;

  if (mode_ == ReplayMode::Strict) {
    const TraceRecord& r = (*rows_)[cursor_];
    if (r.action != action_id) {
      throw ContractViolation("replay diverged at episode " + std::to_string(r.episode) + " step " +
                              std::to_string(r.step) + ": recorded action " + std::to_string(r.action) +
                              ", got " + std::to_string(action_id));
    }
    ++cursor_;
    StepOutcome o = outcome_of(r);
    current_ = o.observation;
    done_ = o.done;
    return o;
  }

  StepOutcome o;
  const auto it = lookup_.find({current_, action_id});
  if (it == lookup_.end()) {
    o.observation = current_;
    o.reward = kFailureReward;
    o.info = StepInfo::Failure;
  } else {
    o = outcome_of((*rows_)[it->second]);
    // A recorded budget cut-off says nothing about this episode's budget.
    if (o.done && !o.success) {
      o.done = false;
      o.info = StepInfo::Failure;
    }
  }
  if (!o.done && steps_ >= step_budget_) {
    o.done = true;
    o.info = StepInfo::BudgetExhausted;
  }
  current_ = o.observation;
  done_ = o.done;
  return o;
}

std::unique_ptr<ReplayEnv> load_replay(const std::string& path, ReplayMode mode, int step_budget) {
  auto rows = std::make_shared<const std::vector<TraceRecord>>(read_trace(path));
  if (rows->empty()) throw ValidationError(path + ": trace holds no steps");
  return std::make_unique<ReplayEnv>(std::move(rows), mode, step_budget);
}

}  // namespace raiju
