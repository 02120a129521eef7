#include "raiju/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "raiju/errors.hpp"

namespace raiju {
namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
  return *it;
}

bool read_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ParseError(path + "." + key, "expected boolean");
  return it->get<bool>();
}

HostSpec parse_host(const json& obj, const std::string& path, int host_id, bool is_neighbor) {
  if (!obj.is_object()) throw ParseError(path, "expected object");
  HostSpec host;
  host.host_id = host_id;

  const json& platform = require(obj, "platform", path);
  if (!platform.is_string()) throw ParseError(path + ".platform", "expected string");
  try {
    host.platform = parse_platform(platform.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(path + ".platform", e.detail());
  }

  if (auto it = obj.find("vulnerable_actions"); it != obj.end()) {
    if (!it->is_array()) throw ParseError(path + ".vulnerable_actions", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& v = (*it)[i];
      if (!v.is_number_integer()) {
        throw ParseError(path + ".vulnerable_actions[" + std::to_string(i) + "]", "expected integer");
      }
      host.vulnerable_actions.push_back(v.get<int>());
    }
    std::sort(host.vulnerable_actions.begin(), host.vulnerable_actions.end());
    host.vulnerable_actions.erase(
        std::unique(host.vulnerable_actions.begin(), host.vulnerable_actions.end()),
        host.vulnerable_actions.end());
  }

  if (is_neighbor) {
    const json& port = require(obj, "smb_port_known", path);
    if (!port.is_number_integer()) throw ParseError(path + ".smb_port_known", "expected integer");
    host.smb_port_known = port.get<int>();
    host.smb_open_truth = read_bool(obj, "smb_open_truth", path, host.smb_port_known == 445);
  }
  host.uac_enabled = read_bool(obj, "uac_enabled", path, false);
  host.kernel_vulnerable = read_bool(obj, "kernel_vulnerable", path, false);
  return host;
}

void validate_host(const HostSpec& host, const std::string& path) {
  for (int id : host.vulnerable_actions) {
    if (!valid_action_id(id)) {
      throw ValidationError(path + ".vulnerable_actions: id " + std::to_string(id) + " outside [0, 98]");
    }
    if (action_spec(id).target_platform != host.platform) {
      throw ValidationError(path + ".vulnerable_actions: id " + std::to_string(id) +
                            " targets " + std::string(to_string(action_spec(id).target_platform)) +
                            " but host is " + std::string(to_string(host.platform)));
    }
  }
  if (host.smb_port_known != 445 && host.smb_port_known != -1) {
    throw ValidationError(path + ".smb_port_known: must be 445 or -1, got " +
                          std::to_string(host.smb_port_known));
  }
  if (host.smb_port_known == 445 && !host.smb_open_truth) {
    throw ValidationError(path + ".smb_open_truth: must be true when smb_port_known is 445");
  }
  if (host.platform == Platform::Windows && host.kernel_vulnerable) {
    throw ValidationError(path + ".kernel_vulnerable: Linux-only field set on a Windows host");
  }
  if (host.platform == Platform::Linux && host.uac_enabled) {
    throw ValidationError(path + ".uac_enabled: Windows-only field set on a Linux host");
  }
}

json host_to_json(const HostSpec& host, bool is_neighbor) {
  json obj;
  obj["platform"] = std::string(to_string(host.platform));
  obj["vulnerable_actions"] = host.vulnerable_actions;
  if (is_neighbor) {
    obj["smb_port_known"] = host.smb_port_known;
    obj["smb_open_truth"] = host.smb_open_truth;
  }
  if (host.platform == Platform::Windows) {
    obj["uac_enabled"] = host.uac_enabled;
  } else {
    obj["kernel_vulnerable"] = host.kernel_vulnerable;
  }
  return obj;
}

HostSpec windows(std::vector<int> vulns, bool uac, int port = -1) {
  HostSpec h;
  h.platform = Platform::Windows;
  h.vulnerable_actions = std::move(vulns);
  h.uac_enabled = uac;
  h.smb_port_known = port;
  h.smb_open_truth = port == 445;
  return h;
}

HostSpec linux_host(std::vector<int> vulns, int port = -1) {
  HostSpec h;
  h.platform = Platform::Linux;
  h.vulnerable_actions = std::move(vulns);
  h.kernel_vulnerable = !h.vulnerable_actions.empty();
  h.smb_port_known = port;
  h.smb_open_truth = port == 445;
  return h;
}

constexpr int lin(int n) { return kFirstLinuxPrivEsc + n; }

Scenario assemble(std::string name, HostSpec foothold, std::vector<HostSpec> neighbors) {
  Scenario s;
  s.name = std::move(name);
  s.foothold = std::move(foothold);
  s.foothold.host_id = 0;
  s.neighbors = std::move(neighbors);
  for (std::size_t i = 0; i < s.neighbors.size(); ++i) s.neighbors[i].host_id = static_cast<int>(i) + 1;
  std::sort(s.foothold.vulnerable_actions.begin(), s.foothold.vulnerable_actions.end());
  for (HostSpec& n : s.neighbors) std::sort(n.vulnerable_actions.begin(), n.vulnerable_actions.end());
  return s;
}

}  // namespace

bool HostSpec::vulnerable_to(int action_id) const {
  return std::binary_search(vulnerable_actions.begin(), vulnerable_actions.end(), action_id);
}

int Scenario::reachable_peer_count() const {
  return static_cast<int>(std::count_if(neighbors.begin(), neighbors.end(),
                                        [](const HostSpec& h) { return h.smb_open_truth; }));
}

void validate(const Scenario& scenario) {
  validate_host(scenario.foothold, "foothold");
  for (std::size_t i = 0; i < scenario.neighbors.size(); ++i) {
    validate_host(scenario.neighbors[i], "neighbors[" + std::to_string(i) + "]");
  }
}

Scenario load_scenario(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ParseError("scenario", std::string("malformed JSON at byte ") + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw ParseError("scenario", "expected a JSON object");

  Scenario s;
  const json& name = require(doc, "name", "scenario");
  if (!name.is_string()) throw ParseError("scenario.name", "expected string");
  s.name = name.get<std::string>();
  s.peer_platform_hidden = read_bool(doc, "peer_platform_hidden", "scenario", false);

  s.foothold = parse_host(require(doc, "foothold", "scenario"), "scenario.foothold", 0, false);

  if (auto it = doc.find("neighbors"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("scenario.neighbors", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      s.neighbors.push_back(parse_host((*it)[i], "scenario.neighbors[" + std::to_string(i) + "]",
                                       static_cast<int>(i) + 1, true));
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open scenario config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string to_config_text(const Scenario& scenario) {
  json doc;
  doc["name"] = scenario.name;
  doc["peer_platform_hidden"] = scenario.peer_platform_hidden;
  doc["foothold"] = host_to_json(scenario.foothold, false);
  doc["neighbors"] = json::array();
  for (const HostSpec& n : scenario.neighbors) doc["neighbors"].push_back(host_to_json(n, true));
  return doc.dump(2) + "\n";
}

// Each foothold has exactly one working privesc module; same-platform
// neighbors share it plus one more, so a learned exploit transfers after
// lateral movement. Port -1 neighbors are closed in ground truth.
Scenario builtin_scenario(std::string_view name) {
  if (name == "env1") {
    return assemble("env1", windows({7}, true),
                    {linux_host({lin(18), lin(44)}, -1), windows({7, 14}, false, 445),
                     linux_host({lin(18), lin(44)}, 445), windows({7, 20}, true, -1)});
  }
  if (name == "env2") {
    return assemble("env2", windows({12}, false),
                    {linux_host({lin(29)}, -1), windows({12, 2}, true, 445)});
  }
  if (name == "env3") {
    return assemble("env3", linux_host({lin(7)}),
                    {windows({3}, true, -1), linux_host({lin(7), lin(61)}, 445),
                     windows({3, 16}, false, 445)});
  }
  if (name == "env4") {
    return assemble("env4", linux_host({lin(65)}),
                    {windows({19}, false, -1), windows({19, 9}, true, -1),
                     linux_host({lin(65), lin(33)}, 445)});
  }
  throw ValidationError("unknown builtin scenario \"" + std::string(name) + "\" (expected env1..env4)");
}

std::vector<std::string> builtin_scenario_names() { return {"env1", "env2", "env3", "env4"}; }

bool is_builtin_scenario(std::string_view name) {
  return name == "env1" || name == "env2" || name == "env3" || name == "env4";
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path);
  if (!std::filesystem::exists(name_or_path)) {
    throw IoError(name_or_path, "not a builtin scenario and no such file");
  }
  return load_scenario_file(name_or_path);
}

}  // namespace raiju
