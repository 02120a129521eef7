#include <doctest.h>

#include <set>
#include <sstream>

#include "raiju/catalog.hpp"
#include "raiju/errors.hpp"
#include "test_util.hpp"

using namespace raiju;

TEST_SUITE("catalog") {
  TEST_CASE("catalog has 99 dense ids in the fixed layout") {
    const Catalog& c = catalog();
    REQUIRE(c.size() == 99);
    for (int i = 0; i < kNumActions; ++i) CHECK(c[static_cast<std::size_t>(i)].id == i);

    int win = 0, lin = 0, hash = 0, smb = 0;
    for (const ActionSpec& s : c) {
      switch (s.group) {
        case ActionGroup::WindowsPrivEsc: ++win; CHECK(s.id <= 22); break;
        case ActionGroup::LinuxPrivEsc: ++lin; CHECK((s.id >= 23 && s.id <= 94)); break;
        case ActionGroup::Hashdump: ++hash; CHECK((s.id == 95 || s.id == 96)); break;
        case ActionGroup::LateralSMB: ++smb; CHECK((s.id == 97 || s.id == 98)); break;
      }
    }
    CHECK(win == 23);
    CHECK(lin == 72);
    CHECK(hash == 2);
    CHECK(smb == 2);
    CHECK(win + lin + hash + smb == 99);
  }

  TEST_CASE("hashdump needs elevation, privesc does not") {
    for (const ActionSpec& s : catalog()) {
      if (s.group == ActionGroup::Hashdump) CHECK(s.requires_elevated);
      if (s.group == ActionGroup::WindowsPrivEsc || s.group == ActionGroup::LinuxPrivEsc) {
        CHECK_FALSE(s.requires_elevated);
      }
    }
    CHECK(action_spec(95).group == ActionGroup::Hashdump);
    CHECK(action_spec(95).target_platform == Platform::Windows);
    CHECK(action_spec(96).target_platform == Platform::Linux);
    CHECK(action_spec(97).target_platform == Platform::Windows);
    CHECK(action_spec(98).target_platform == Platform::Linux);
  }

  TEST_CASE("labels are unique and follow the synthetic naming") {
    std::set<std::string_view> labels;
    for (const ActionSpec& s : catalog()) labels.insert(s.label);
    CHECK(labels.size() == 99);
    CHECK(action_spec(0).label == "win_pe_00");
    CHECK(action_spec(22).label == "win_pe_22");
    CHECK(action_spec(23).label == "lin_pe_00");
    CHECK(action_spec(94).label == "lin_pe_71");
    CHECK(action_spec(95).label == "hashdump_win");
    CHECK(action_spec(98).label == "smb_lm_lin");
  }

  TEST_CASE("is_applicable checks platform and privilege") {
    CHECK_FALSE(is_applicable(action_spec(kFirstLinuxPrivEsc), HostView{Platform::Windows, false}));
    CHECK_FALSE(is_applicable(action_spec(kHashdumpWindows), HostView{Platform::Windows, false}));
    CHECK(is_applicable(action_spec(kHashdumpWindows), HostView{Platform::Windows, true}));
    CHECK(is_applicable(action_spec(0), HostView{Platform::Windows, false}));
    CHECK(is_applicable(action_spec(0), HostView{Platform::Windows, true}));
  }

  TEST_CASE("action_spec rejects out-of-range ids") {
    CHECK_THROWS_AS(action_spec(-1), ContractViolation);
    CHECK_THROWS_AS(action_spec(99), ContractViolation);
    CHECK_FALSE(valid_action_id(99));
    CHECK(valid_action_id(0));
  }

  TEST_CASE("build_catalog is identical to the shared catalog") {
    const Catalog fresh = build_catalog();
    for (int i = 0; i < kNumActions; ++i) {
      const ActionSpec& a = fresh[static_cast<std::size_t>(i)];
      const ActionSpec& b = catalog()[static_cast<std::size_t>(i)];
      CHECK(a.group == b.group);
      CHECK(a.target_platform == b.target_platform);
      CHECK(a.requires_elevated == b.requires_elevated);
      CHECK(a.label == b.label);
    }
  }

  TEST_CASE("catalog CSV matches the frozen golden file") {
    std::ostringstream out;
    write_catalog_csv(out, catalog());
    const std::string golden = testutil::slurp(std::string(RAIJU_TEST_DATA_DIR) + "/catalog.csv");
    REQUIRE_FALSE(golden.empty());
    CHECK(out.str() == golden);
  }

  TEST_CASE("platform text round-trips") {
    CHECK(parse_platform("windows") == Platform::Windows);
    CHECK(parse_platform(to_string(Platform::Linux)) == Platform::Linux);
    CHECK_THROWS(parse_platform("macos"));
    CHECK(encode(Platform::Windows) == 0);
    CHECK(encode(Platform::Linux) == 1);
  }
}
