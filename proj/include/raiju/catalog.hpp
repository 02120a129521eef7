#pragma once

#include <array>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace raiju {

enum class Platform { Windows, Linux };

std::string_view to_string(Platform p);
Platform parse_platform(std::string_view text);

/// Observation encoding: Windows 0, Linux 1.
constexpr int encode(Platform p) { return p == Platform::Windows ? 0 : 1; }

enum class ActionGroup { WindowsPrivEsc, LinuxPrivEsc, Hashdump, LateralSMB };

std::string_view to_string(ActionGroup g);

struct ActionSpec {
  int id = 0;
  ActionGroup group = ActionGroup::WindowsPrivEsc;
  Platform target_platform = Platform::Windows;
  bool requires_elevated = false;
  std::string_view label;
};

inline constexpr int kNumActions = 99;
inline constexpr int kNumWindowsPrivEsc = 23;
inline constexpr int kNumLinuxPrivEsc = 72;

// Fixed id layout.
inline constexpr int kFirstLinuxPrivEsc = kNumWindowsPrivEsc;                   // 23
inline constexpr int kHashdumpWindows = kFirstLinuxPrivEsc + kNumLinuxPrivEsc;  // 95
inline constexpr int kHashdumpLinux = kHashdumpWindows + 1;                     // 96
inline constexpr int kLateralSmbWindows = kHashdumpLinux + 1;                   // 97
inline constexpr int kLateralSmbLinux = kLateralSmbWindows + 1;                 // 98

using Catalog = std::array<ActionSpec, kNumActions>;

/// The canonical 99-slot action catalog. Built once; immutable.
const Catalog& catalog();

/// Builds a fresh copy of the catalog (identical to `catalog()`).
Catalog build_catalog();

const ActionSpec& action_spec(int id);

constexpr bool valid_action_id(int id) { return id >= 0 && id < kNumActions; }

/// Runtime facts about a session host needed for the static precheck.
struct HostView {
  Platform platform = Platform::Windows;
  bool elevated = false;
};

/// Platform and privilege precheck. A true result does not guarantee success.
bool is_applicable(const ActionSpec& spec, const HostView& host);

/// CSV dump: header `id,group,platform,requires_elevated,label`.
void write_catalog_csv(std::ostream& out, std::span<const ActionSpec> specs);

}  // namespace raiju
