#include "raiju/catalog.hpp"

#include "raiju/errors.hpp"

namespace raiju {
namespace {

// Labels are stored statically so ActionSpec can hold string_views.
constexpr auto kLabels = [] {
  std::array<std::array<char, 16>, kNumActions> out{};
  auto put = [&out](int id, std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) out[id][i] = text[i];
  };
  auto put_numbered = [&out](int id, std::string_view prefix, int n) {
    std::size_t i = 0;
    for (; i < prefix.size(); ++i) out[id][i] = prefix[i];
    out[id][i++] = static_cast<char>('0' + n / 10);
    out[id][i++] = static_cast<char>('0' + n % 10);
  };
  for (int i = 0; i < kNumWindowsPrivEsc; ++i) put_numbered(i, "win_pe_", i);
  for (int i = 0; i < kNumLinuxPrivEsc; ++i) put_numbered(kFirstLinuxPrivEsc + i, "lin_pe_", i);
  put(kHashdumpWindows, "hashdump_win");
  put(kHashdumpLinux, "hashdump_lin");
  put(kLateralSmbWindows, "smb_lm_win");
  put(kLateralSmbLinux, "smb_lm_lin");
  return out;
}();

}  // namespace

std::string_view to_string(Platform p) { return p == Platform::Windows ? "windows" : "linux"; }

Platform parse_platform(std::string_view text) {
  if (text == "windows") return Platform::Windows;
  if (text == "linux") return Platform::Linux;
  throw ParseError("platform", "expected \"windows\" or \"linux\", got \"" + std::string(text) + "\"");
}

std::string_view to_string(ActionGroup g) {
  switch (g) {
    case ActionGroup::WindowsPrivEsc: return "windows_privesc";
    case ActionGroup::LinuxPrivEsc: return "linux_privesc";
    case ActionGroup::Hashdump: return "hashdump";
    case ActionGroup::LateralSMB: return "lateral_smb";
  }
  return "unknown";
}

Catalog build_catalog() {
  Catalog specs{};
  for (int id = 0; id < kNumActions; ++id) {
    ActionSpec& s = specs[id];
    s.id = id;
    s.label = std::string_view(kLabels[id].data());
    if (id < kFirstLinuxPrivEsc) {
      s.group = ActionGroup::WindowsPrivEsc;
      s.target_platform = Platform::Windows;
    } else if (id < kHashdumpWindows) {
      s.group = ActionGroup::LinuxPrivEsc;
      s.target_platform = Platform::Linux;
    } else if (id < kLateralSmbWindows) {
      s.group = ActionGroup::Hashdump;
      s.target_platform = id == kHashdumpWindows ? Platform::Windows : Platform::Linux;
      s.requires_elevated = true;
    } else {
      s.group = ActionGroup::LateralSMB;
      s.target_platform = id == kLateralSmbWindows ? Platform::Windows : Platform::Linux;
    }
  }
  return specs;
}

const Catalog& catalog() {
  static const Catalog instance = build_catalog();
  return instance;
}

const ActionSpec& action_spec(int id) {
  if (!valid_action_id(id)) {
    throw ContractViolation("action id " + std::to_string(id) + " outside [0, 98]");
  }
  return catalog()[id];
}

bool is_applicable(const ActionSpec& spec, const HostView& host) {
  if (spec.target_platform != host.platform) return false;
  return !spec.requires_elevated || host.elevated;
}

void write_catalog_csv(std::ostream& out, std::span<const ActionSpec> specs) {
  out << "id,group,platform,requires_elevated,label\n";
  for (const ActionSpec& s : specs) {
    out << s.id << ',' << to_string(s.group) << ',' << to_string(s.target_platform) << ','
        << (s.requires_elevated ? 1 : 0) << ',' << s.label << '\n';
  }
}

}  // namespace raiju
