#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "raiju/catalog.hpp"

namespace raiju {

/// Static description of one host, as read from a scenario config.
struct HostSpec {
  int host_id = 0;
  Platform platform = Platform::Windows;
  std::vector<int> vulnerable_actions;  // sorted, unique
  int smb_port_known = -1;              // 445 or -1 (agent-side knowledge)
  bool smb_open_truth = false;          // ground truth, hidden from the agent
  bool uac_enabled = false;             // Windows only
  bool kernel_vulnerable = false;       // Linux only

  bool vulnerable_to(int action_id) const;
  bool operator==(const HostSpec&) const = default;
};

/// Immutable topology: one foothold and its ordered neighbor list.
struct Scenario {
  std::string name;
  HostSpec foothold;
  std::vector<HostSpec> neighbors;
  bool peer_platform_hidden = false;

  int reachable_peer_count() const;
  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a JSON scenario config.
/// Throws ParseError naming the offending field, or ValidationError.
Scenario load_scenario(std::string_view config_text);
Scenario load_scenario_file(const std::string& path);

/// Throws ValidationError if any HostSpec invariant is broken.
void validate(const Scenario& scenario);

std::string to_config_text(const Scenario& scenario);

/// The four reference topologies: "env1" .. "env4".
Scenario builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(std::string_view name);

/// Builtin name or a path to a config file.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace raiju
