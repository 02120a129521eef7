#include <doctest.h>

#include "raiju/errors.hpp"
#include "raiju/scenario.hpp"
#include "test_util.hpp"

using namespace raiju;

namespace {

const char* kTwoHost = R"({
  "name": "pair",
  "foothold": {"platform": "windows", "vulnerable_actions": [0], "uac_enabled": true},
  "neighbors": [
    {"platform": "linux", "smb_port_known": 445, "smb_open_truth": true,
     "vulnerable_actions": [23], "kernel_vulnerable": true}
  ]
})";

std::string with_port(int port) {
  return std::string(R"({"name":"x","foothold":{"platform":"windows","vulnerable_actions":[]},)") +
         R"("neighbors":[{"platform":"windows","smb_port_known":)" + std::to_string(port) +
         R"(,"smb_open_truth":false,"vulnerable_actions":[]}]})";
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("builtin topologies match the reference port layout") {
    const Scenario e1 = builtin_scenario("env1");
    CHECK(e1.foothold.platform == Platform::Windows);
    REQUIRE(e1.neighbors.size() == 4);
    CHECK(e1.neighbors[0].platform == Platform::Linux);
    CHECK(e1.neighbors[0].smb_port_known == -1);
    CHECK(e1.neighbors[1].platform == Platform::Windows);
    CHECK(e1.neighbors[1].smb_port_known == 445);
    CHECK(e1.neighbors[2].platform == Platform::Linux);
    CHECK(e1.neighbors[2].smb_port_known == 445);
    CHECK(e1.neighbors[3].platform == Platform::Windows);
    CHECK(e1.neighbors[3].smb_port_known == -1);
    CHECK(e1.reachable_peer_count() == 2);

    const Scenario e3 = builtin_scenario("env3");
    CHECK(e3.foothold.platform == Platform::Linux);
    REQUIRE(e3.neighbors.size() == 3);
    CHECK(e3.neighbors[0].platform == Platform::Windows);
    CHECK(e3.neighbors[0].smb_port_known == -1);
    CHECK(e3.neighbors[1].platform == Platform::Linux);
    CHECK(e3.neighbors[1].smb_port_known == 445);
    CHECK(e3.neighbors[2].platform == Platform::Windows);
    CHECK(e3.neighbors[2].smb_port_known == 445);

    CHECK(builtin_scenario("env2").neighbors.size() == 2);
    CHECK(builtin_scenario("env4").neighbors.size() == 3);
  }

  TEST_CASE("every builtin passes validation and closed ports are closed") {
    for (const std::string& name : builtin_scenario_names()) {
      const Scenario s = builtin_scenario(name);
      CHECK_NOTHROW(validate(s));
      CHECK(s.name == name);
      CHECK(s.foothold.vulnerable_actions.size() == 1);
      for (const HostSpec& n : s.neighbors) {
        CHECK(n.smb_open_truth == (n.smb_port_known == 445));
      }
    }
  }

  TEST_CASE("unknown builtin name is rejected") {
    CHECK_THROWS_AS(builtin_scenario("env9"), ValidationError);
    CHECK_FALSE(is_builtin_scenario("env9"));
  }

  TEST_CASE("config round-trips through text") {
    for (const std::string& name : builtin_scenario_names()) {
      const Scenario s = builtin_scenario(name);
      CHECK(load_scenario(to_config_text(s)) == s);
    }
    const Scenario pair = load_scenario(kTwoHost);
    CHECK(pair.neighbors.size() == 1);
    CHECK(pair.neighbors[0].kernel_vulnerable);
    CHECK(pair.foothold.uac_enabled);
  }

  TEST_CASE("shipped scenario files equal the builtins") {
    for (const std::string& name : builtin_scenario_names()) {
      const std::string path = std::string(RAIJU_SCENARIO_DIR) + "/" + name + ".json";
      CHECK(load_scenario_file(path) == builtin_scenario(name));
      CHECK(testutil::slurp(path) == to_config_text(builtin_scenario(name)));
    }
  }

  TEST_CASE("port outside {445, -1} is a validation error") {
    CHECK_THROWS_AS(load_scenario(with_port(80)), ValidationError);
    CHECK_NOTHROW(load_scenario(with_port(-1)));
  }

  TEST_CASE("malformed configs name the offending field") {
    try {
      load_scenario(R"({"name":"x","foothold":{"platform":"windows","vulnerable_actions":[]},
                        "neighbors":[{"platform":"windows","vulnerable_actions":[]},
                                     {"platform":"solaris","smb_port_known":-1,"vulnerable_actions":[]}]})");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.where().find("neighbors[") != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario("{not json"), ParseError);
    CHECK_THROWS_AS(load_scenario(R"({"name":"x"})"), ParseError);
    CHECK_THROWS_AS(load_scenario(R"([1,2])"), ParseError);
  }

  TEST_CASE("host invariants are enforced") {
    // Linux module on a Windows host.
    CHECK_THROWS_AS(load_scenario(R"({"name":"x","foothold":{"platform":"windows","vulnerable_actions":[30]}})"),
                    ValidationError);
    // Open port that is known but not actually open.
    CHECK_THROWS_AS(load_scenario(with_port(445)), ValidationError);
    CHECK_THROWS_AS(load_scenario(R"({"name":"x","foothold":{"platform":"windows","vulnerable_actions":[120]}})"),
                    ValidationError);
  }

  TEST_CASE("resolve_scenario takes names or paths") {
    testutil::TempDir dir("scenario");
    const std::string path = dir.file("pair.json");
    testutil::spit(path, kTwoHost);
    CHECK(resolve_scenario(path).name == "pair");
    CHECK(resolve_scenario("env2").name == "env2");
    CHECK_THROWS_AS(resolve_scenario(dir.file("missing.json")), IoError);
  }
}
