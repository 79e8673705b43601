#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "marlab/gridworlds/cleanup.hpp"
#include "marlab/gridworlds/harvest.hpp"
#include "marlab/gridworlds/matrix_game.hpp"
#include "test_util.hpp"

using namespace marlab;
using namespace marlab::testutil;

namespace {

CleanupConfig cleanup_cfg(int n_agents = 2) {
  CleanupConfig c;
  c.n_agents = n_agents;
  c.window = 5;
  c.horizon = 200;
  c.waste_spawn_prob = 0.0;  // keep hand-built maps static
  c.apple_spawn_prob_max = 0.0;
  return c;
}

HarvestConfig harvest_cfg(int n_agents = 1) {
  HarvestConfig c;
  c.n_agents = n_agents;
  c.window = 5;
  c.horizon = 10000;
  return c;
}

}  // namespace

TEST_CASE("cleanup: walking onto an apple collects exactly +1") {
  CleanupEnv env(cleanup_cfg(), {
                                    "RRRRR",
                                    "0A.1.",
                                    ".....",
                                });
  env.reset(1);
  const Transition t = env.step({CleanupEnv::kRight, CleanupEnv::kStay});
  CHECK(t.extrinsic[0] == 1.0);
  CHECK(t.extrinsic[1] == 0.0);
  CHECK(env.last_events().apples_consumed == 1);
  CHECK(env.apple_count() == 0);
}

TEST_CASE("cleanup: punishment costs the shooter 1 and every hit agent 50") {
  // agent 0 faces up initially; agent 1 stands two cells above it
  CleanupEnv env(cleanup_cfg(), {
                                    "RRRRR",
                                    ".1...",
                                    ".....",
                                    ".0...",
                                });
  env.reset(1);
  const Transition t = env.step({CleanupEnv::kPunish, CleanupEnv::kStay});
  CHECK(t.extrinsic[0] == -1.0);
  CHECK(t.extrinsic[1] == -50.0);
  CHECK(env.last_events().punish_beams_fired == 1);
  CHECK(env.last_events().punish_hits == 1);
}

TEST_CASE("cleanup: all agents staying on an empty map earn nothing") {
  CleanupEnv env(cleanup_cfg(), {
                                    "RRRRR",
                                    "0...1",
                                    ".....",
                                });
  env.reset(1);
  for (int i = 0; i < 5; ++i) {
    const Transition t = env.step({CleanupEnv::kStay, CleanupEnv::kStay});
    CHECK(t.extrinsic.isZero(0.0));
  }
}

TEST_CASE("cleanup: contested apple goes to the lower agent id") {
  CleanupEnv env(cleanup_cfg(), {
                                    "RRRRR",
                                    "0A1..",
                                    ".....",
                                });
  env.reset(1);
  const Transition t = env.step({CleanupEnv::kRight, CleanupEnv::kLeft});
  CHECK(t.extrinsic[0] == 1.0);
  CHECK(t.extrinsic[1] == 0.0);
  CHECK(env.last_events().apples_consumed == 1);
  CHECK(env.agent_position(0) == std::make_pair(1, 1));
  CHECK(env.agent_position(1) == std::make_pair(2, 1));  // blocked
}

TEST_CASE("cleanup: clean beam clears waste in the facing ray") {
  CleanupConfig cfg = cleanup_cfg(1);
  CleanupEnv env(cfg, {
                          "WWWWW",
                          "WWWWW",
                          ".0...",
                          ".....",
                      });
  env.reset(1);
  const double before = env.waste_fraction();
  CHECK(before == 1.0);
  env.step({CleanupEnv::kClean});  // facing up initially
  CHECK(env.last_events().waste_cleaned == 2);
  CHECK(env.waste_fraction() == doctest::Approx(8.0 / 10.0));
}

TEST_CASE("cleanup: apple spawn probability is monotone in waste") {
  CleanupConfig cfg;
  cfg.waste_threshold = 0.4;
  cfg.apple_spawn_prob_max = 0.05;
  CleanupEnv env(cfg);
  CHECK(env.spawn_probability(0.0) == 0.05);
  CHECK(env.spawn_probability(0.4) == 0.0);
  CHECK(env.spawn_probability(0.9) == 0.0);
  RngStream rng(2);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.u01(), b = rng.u01();
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(env.spawn_probability(lo) >= env.spawn_probability(hi));
  }
}

TEST_CASE("cleanup: no apples appear while waste is above the threshold") {
  CleanupConfig cfg = cleanup_cfg();
  cfg.apple_spawn_prob_max = 1.0;
  cfg.waste_threshold = 0.4;
  CleanupEnv dirty(cfg, {
                            "WWWWW",
                            "0...1",
                            ".....",
                        });
  dirty.reset(3);
  dirty.step({CleanupEnv::kStay, CleanupEnv::kStay});
  CHECK(dirty.last_events().apples_spawned == 0);

  CleanupEnv clean(cfg, {
                            "RRRRR",
                            "0...1",
                            ".....",
                        });
  clean.reset(3);
  clean.step({CleanupEnv::kStay, CleanupEnv::kStay});
  // spawn probability is at its maximum of 1, every free orchard cell sprouts
  CHECK(clean.last_events().apples_spawned == 8);
}

TEST_CASE("harvest: an isolated apple never respawns once eaten") {
  HarvestEnv env(harvest_cfg(), {
                                    "0A...",
                                    ".....",
                                    ".....",
                                });
  env.reset(5);
  const Transition t = env.step({HarvestEnv::kRight});
  CHECK(t.extrinsic[0] == 1.0);
  CHECK(env.apple_count() == 0);
  JointAction away = {HarvestEnv::kDown};
  env.step(away);
  for (int i = 0; i < 300; ++i) {
    env.step({HarvestEnv::kStay});
    REQUIRE(env.apple_count() == 0);
  }
}

TEST_CASE("harvest: untouched orchard never shrinks") {
  HarvestEnv env(harvest_cfg(), {
                                    "0....",
                                    "..AA.",
                                    "..AA.",
                                    ".....",
                                });
  env.reset(5);
  int count = env.apple_count();
  for (int i = 0; i < 200; ++i) {
    env.step({HarvestEnv::kStay});
    REQUIRE(env.apple_count() >= count);
    count = env.apple_count();
  }
}

TEST_CASE("harvest: greedy sweeping kills the patch for good") {
  HarvestConfig cfg = harvest_cfg();
  cfg.regrowth_prob = {0.0, 0.001, 0.002, 0.004, 0.004,
                       0.004, 0.004, 0.004, 0.004};
  HarvestEnv env(cfg, {
                          "0AA..",
                          ".AA..",
                          ".....",
                      });
  env.reset(11);

  // chase the nearest apple until the orchard is bare
  bool depleted = false;
  double last_rewards = 0.0;
  for (int step = 0; step < 2000 && !depleted; ++step) {
    auto [ax, ay] = env.agent_position(0);
    Action a = HarvestEnv::kStay;
    int best = 1 << 20;
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 5; ++x) {
        if (env.cell(x, y) != Cell::apple) continue;
        const int dist = std::abs(x - ax) + std::abs(y - ay);
        if (dist < best) {
          best = dist;
          if (x < ax) a = HarvestEnv::kLeft;
          else if (x > ax) a = HarvestEnv::kRight;
          else if (y < ay) a = HarvestEnv::kUp;
          else if (y > ay) a = HarvestEnv::kDown;
        }
      }
    }
    last_rewards = env.step({a}).extrinsic.sum();
    depleted = env.apple_count() == 0;
  }
  CHECK(depleted);
  (void)last_rewards;
  for (int i = 0; i < 100; ++i) {
    const Transition t = env.step({HarvestEnv::kStay});
    REQUIRE(env.apple_count() == 0);
    REQUIRE(t.extrinsic.sum() == 0.0);
  }
}

TEST_CASE("harvest: neighbour counting and the default regrowth table") {
  HarvestEnv env(harvest_cfg(), {
                                    "0....",
                                    ".AA..",
                                    ".AA..",
                                    ".....",
                                });
  env.reset(1);
  CHECK(env.apple_neighbours(1, 1) == 3);
  CHECK(env.apple_neighbours(0, 0) == 1);
  CHECK(env.apple_neighbours(4, 3) == 0);

  const HarvestConfig defaults;
  CHECK(defaults.regrowth_prob[0] == 0.0);
  for (int i = 0; i + 1 < 9; ++i) {
    CHECK(defaults.regrowth_prob[i] <= defaults.regrowth_prob[i + 1]);
  }
}

TEST_CASE("harvest: per-step rewards decompose into logged events") {
  HarvestConfig cfg = harvest_cfg(2);
  cfg.horizon = 300;
  HarvestEnv env(cfg, {
                          "0AA..",
                          ".AA1.",
                          ".....",
                      });
  RngStream actions(99);
  env.reset(12);
  for (int i = 0; i < 300; ++i) {
    const Transition t =
        env.step(random_joint(actions, 2, HarvestEnv::kActions));
    const StepEvents& ev = env.last_events();
    const double expected = 1.0 * ev.apples_consumed -
                            1.0 * ev.punish_beams_fired -
                            50.0 * ev.punish_hits;
    REQUIRE(t.extrinsic.sum() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("matrix oracle: constant successor table gives all-ones intentions") {
  MatrixGameSpec spec;
  spec.n_actions = 3;
  spec.start = VectorXd::Zero(2);
  spec.payoff1 = MatrixXd::Zero(3, 3);
  spec.payoff2 = MatrixXd::Zero(3, 3);
  VectorXd same(2);
  same << 0.4, -0.2;
  spec.successor.assign(3, std::vector<VectorXd>(3, same));

  const MatrixXd d = matrix_game_oracle_intentions(spec, {1, 2});
  CHECK(d.isOnes(0.0));
}

TEST_CASE("matrix oracle: successor driven by one agent only") {
  // features depend only on agent 0's action
  MatrixGameSpec spec;
  spec.n_actions = 3;
  spec.start = VectorXd::Zero(1);
  spec.payoff1 = MatrixXd::Zero(3, 3);
  spec.payoff2 = MatrixXd::Zero(3, 3);
  spec.successor.resize(3);
  for (int a0 = 0; a0 < 3; ++a0) {
    VectorXd f(1);
    f << 1.0 + a0;  // distances from start: 1, 2, 3
    spec.successor[a0].assign(3, f);
  }

  const MatrixXd d = matrix_game_oracle_intentions(spec, {0, 1});
  // observer 0 about fellow 1: fellow's action is irrelevant, all losses
  // equal, neutral intention
  CHECK(d(0, 1) == 1.0);
  // observer 1 about fellow 0: actual loss 0.5*1^2, max alternative 0.5*3^2
  CHECK(d(1, 0) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  // hand-recomputed via the Eq.-3/Eq.-4 arithmetic
  const double l = 0.5 * 1.0 * 1.0;
  const double alt_max = 0.5 * 3.0 * 3.0;
  CHECK(d(1, 0) == doctest::Approx(l / alt_max).epsilon(1e-12));
}

TEST_CASE("matrix oracle: inclusive denominator caps intentions at one") {
  // actual action has the strictly largest impact
  MatrixGameSpec spec;
  spec.n_actions = 2;
  spec.start = VectorXd::Zero(1);
  spec.payoff1 = MatrixXd::Zero(2, 2);
  spec.payoff2 = MatrixXd::Zero(2, 2);
  spec.successor.resize(2);
  VectorXd big(1), smallv(1);
  big << 5.0;
  smallv << 1.0;
  // agent 1's action selects the feature: action 1 -> far from start
  spec.successor[0] = {smallv, big};
  spec.successor[1] = {smallv, big};

  IntentionRule inclusive;
  const MatrixXd d_inc = matrix_game_oracle_intentions(spec, {0, 1}, inclusive);
  CHECK(d_inc(0, 1) == 1.0);

  IntentionRule literal;
  literal.inclusive_denominator = false;
  const MatrixXd d_lit = matrix_game_oracle_intentions(spec, {0, 1}, literal);
  CHECK(d_lit(0, 1) == doctest::Approx(25.0).epsilon(1e-12));  // 12.5 / 0.5
}

TEST_CASE("matrix oracle: intentions are permutation covariant") {
  RngStream rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + rng.uniform_int(4);
    const MatrixGameSpec spec = MatrixGameSpec::random(m, 3, rng);

    // random permutations of each agent's action labels
    std::vector<int> p0(m), p1(m);
    for (int i = 0; i < m; ++i) p0[i] = p1[i] = i;
    for (int i = m - 1; i > 0; --i) {
      std::swap(p0[i], p0[rng.uniform_int(i + 1)]);
      std::swap(p1[i], p1[rng.uniform_int(i + 1)]);
    }
    MatrixGameSpec permuted = spec;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        permuted.successor[p0[a]][p1[b]] = spec.successor[a][b];
        permuted.payoff1(p0[a], p1[b]) = spec.payoff1(a, b);
        permuted.payoff2(p0[a], p1[b]) = spec.payoff2(a, b);
      }
    }
    const JointAction joint = {rng.uniform_int(m), rng.uniform_int(m)};
    const JointAction relabeled = {p0[joint[0]], p1[joint[1]]};
    const MatrixXd d = matrix_game_oracle_intentions(spec, joint);
    const MatrixXd dp = matrix_game_oracle_intentions(permuted, relabeled);
    REQUIRE((d - dp).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("matrix game spec validation") {
  RngStream rng(1);
  MatrixGameSpec spec = MatrixGameSpec::random(3, 2, rng);
  CHECK_NOTHROW(spec.validate());
  spec.successor[1][2] = VectorXd::Zero(5);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
