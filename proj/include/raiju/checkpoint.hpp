#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "raiju/nn.hpp"
#include "raiju/optimizer.hpp"

namespace raiju {

/// Everything needed to act with, or resume training of, an actor-critic pair.
///
/// On-disk layout (little-endian):
///   "RAIJUCKP" | u32 version | u64 episodes_trained
///   | u32 n_meta  { str key, str value }*
///   | str rng_state | i64 actor_opt_step | i64 critic_opt_step
///   | u32 n_arrays { str name, u32 rank, u64 dims[rank], f64 data[] }*
/// where str is a u32 byte length followed by the bytes. Arrays are written in
/// a fixed order, so serialization is byte-stable.
struct Checkpoint {
  std::map<std::string, std::string> metadata;  // algorithm, scenario, ...
  std::uint64_t episodes_trained = 0;
  nn::ParamSet actor;
  nn::ParamSet critic;
  nn::OptimizerState actor_opt;
  nn::OptimizerState critic_opt;
  std::string rng_state;

  bool operator==(const Checkpoint&) const = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws ParseError on a malformed or truncated record.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace raiju
