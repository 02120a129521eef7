#include <doctest.h>

#include <sstream>

#include "raiju/checkpoint.hpp"
#include "raiju/errors.hpp"
#include "raiju/trainer.hpp"
#include "test_util.hpp"

using namespace raiju;

namespace {

TrainerConfig small_config(std::uint64_t seed, int episodes) {
  TrainerConfig cfg;
  cfg.hidden_units = 16;
  cfg.episodes = episodes;
  cfg.step_budget = 50;
  cfg.seed = seed;
  return cfg;
}

TrainResult run(Algorithm algo, const TrainerConfig& cfg, const std::string& scenario = "env2") {
  SimEnv env = make_training_env(builtin_scenario(scenario), cfg);
  return train(env, algo, cfg);
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("zero episodes returns the initial networks") {
    for (Algorithm algo : {Algorithm::A2C, Algorithm::PPO}) {
      const TrainerConfig cfg = small_config(9, 0);
      const TrainResult r = run(algo, cfg);
      const TrainResult init = initial_state(cfg);
      CHECK(r.actor == init.actor);
      CHECK(r.critic == init.critic);
      CHECK(r.log.empty());
    }
  }

  TEST_CASE("training is deterministic in the seed") {
    for (Algorithm algo : {Algorithm::A2C, Algorithm::PPO}) {
      const TrainResult a = run(algo, small_config(5, 15));
      const TrainResult b = run(algo, small_config(5, 15));
      const TrainResult c = run(algo, small_config(6, 15));
      CHECK(serialize_checkpoint(to_checkpoint(a, algo, "env2")) ==
            serialize_checkpoint(to_checkpoint(b, algo, "env2")));
      CHECK(a.log == b.log);
      CHECK_FALSE(a.actor == c.actor);
    }
  }

  TEST_CASE("episode log is consistent with the budget") {
    const TrainResult r = run(Algorithm::A2C, small_config(3, 20));
    REQUIRE(r.log.size() == 20);
    for (std::size_t i = 0; i < r.log.size(); ++i) {
      const EpisodeLog& e = r.log[i];
      CHECK(e.episode == static_cast<int>(i));
      CHECK(e.steps >= 1);
      CHECK(e.steps <= 50);
      CHECK(e.actor_loss == e.actor_loss);
      if (!e.goal_reached) CHECK(e.steps == 50);
    }
    CHECK(r.actor.all_finite());
    CHECK(r.critic.all_finite());
    CHECK(recent_success_rate(r.log, 100) >= 0.0);
    CHECK(recent_success_rate(r.log, 100) <= 1.0);
  }

  TEST_CASE("train log CSV") {
    std::ostringstream out;
    write_train_log_csv(out, {EpisodeLog{0, 3, 18.0, true, 0.5, 1.0, 4.0}});
    CHECK(out.str().rfind("episode,steps,total_reward,goal_reached,actor_loss,critic_loss,entropy\n", 0) == 0);
    CHECK(out.str().find("\n0,3,18,1,") != std::string::npos);
  }

  TEST_CASE("bad hyperparameters are contract violations") {
    TrainerConfig cfg = small_config(1, 1);
    cfg.gamma = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = small_config(1, 1);
    cfg.lr_actor = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = small_config(1, 1);
    cfg.episodes = -1;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  }

  TEST_CASE("algorithm names") {
    CHECK(parse_algorithm("a2c") == Algorithm::A2C);
    CHECK(parse_algorithm("ppo") == Algorithm::PPO);
    CHECK(to_string(Algorithm::Random) == "random");
    CHECK_THROWS_AS(parse_algorithm("dqn"), ParseError);
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("serialization round-trips byte for byte") {
    const TrainResult r = run(Algorithm::PPO, small_config(2, 5));
    Checkpoint ck = to_checkpoint(r, Algorithm::PPO, "env2");
    ck.metadata["goal"] = "lm";
    const std::string bytes = serialize_checkpoint(ck);
    const Checkpoint back = deserialize_checkpoint(bytes);
    CHECK(back == ck);
    CHECK(serialize_checkpoint(back) == bytes);
    CHECK(back.metadata.at("algorithm") == "ppo");
    CHECK(back.episodes_trained == 5);

    testutil::TempDir dir("ckpt");
    write_checkpoint(dir.file("a.bin"), ck);
    CHECK(testutil::slurp(dir.file("a.bin")) == bytes);
    CHECK(read_checkpoint(dir.file("a.bin")) == ck);
  }

  TEST_CASE("every truncation is a parse error") {
    const Checkpoint ck = to_checkpoint(run(Algorithm::A2C, small_config(4, 2)), Algorithm::A2C, "env2");
    const std::string bytes = serialize_checkpoint(ck);
    for (std::size_t n = 0; n < bytes.size(); n += 1 + n / 16) {
      CHECK_THROWS_AS(deserialize_checkpoint(std::string_view(bytes).substr(0, n)), ParseError);
    }
    CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x"), ParseError);
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(deserialize_checkpoint(bad), ParseError);
  }

  TEST_CASE("missing file is an IO error") {
    testutil::TempDir dir("ckpt");
    CHECK_THROWS_AS(read_checkpoint(dir.file("nope.bin")), IoError);
  }
}
