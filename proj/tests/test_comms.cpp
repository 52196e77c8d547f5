#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "subcdm/comms.hpp"
#include "subcdm/roles.hpp"

using namespace subcdm;

namespace {

std::vector<Vec2> random_positions(std::size_t n, std::uint64_t seed, double side = 8.0) {
  RngStream rng(seed);
  std::vector<Vec2> out(n);
  for (auto& p : out) p = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
  return out;
}

Message opinion_from(RobotId id, Opinion o) { return {id, 1, OpinionBroadcast{o, id}}; }

std::vector<RngStream> streams(std::size_t n, std::uint64_t seed) {
  std::vector<RngStream> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(seed, i, Purpose::Delivery);
  return out;
}

}  // namespace

TEST(Comms, RangeBoundary) {
  const std::vector<Vec2> near{{1.0, 1.0}, {1.99, 1.0}};
  EXPECT_EQ(neighbors(near, 0, 1.0), std::vector<std::size_t>{1});
  EXPECT_EQ(neighbors(near, 1, 1.0), std::vector<std::size_t>{0});
  const std::vector<Vec2> far{{1.0, 1.0}, {2.01, 1.0}};
  EXPECT_TRUE(neighbors(far, 0, 1.0).empty());
  EXPECT_TRUE(neighbors(far, 1, 1.0).empty());
}

TEST(Comms, GridIndexMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pos = random_positions(100, seed);
    const auto grid = NeighborIndex(pos, 8.0, 1.0).all();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      // All-pairs oracle written independently of the library.
      std::vector<std::size_t> expected;
      for (std::size_t j = 0; j < pos.size(); ++j) {
        const double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        if (j != i && std::sqrt(dx * dx + dy * dy) <= 1.0) expected.push_back(j);
      }
      ASSERT_EQ(grid[i], expected) << "seed " << seed << " robot " << i;
      ASSERT_EQ(neighbors(pos, i, 1.0), expected);
    }
  }
}

TEST(Comms, NeighborRelationIsSymmetric) {
  const auto pos = random_positions(150, 99);
  const auto adj = NeighborIndex(pos, 8.0, 1.0).all();
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j : adj[i]) EXPECT_NE(std::find(adj[j].begin(), adj[j].end(), i), adj[j].end());
}

TEST(Comms, IdealChannelIsNeighborExpansion) {
  const auto pos = random_positions(60, 3);
  const auto adj = NeighborIndex(pos, 8.0, 1.0).all();
  std::vector<std::vector<Message>> out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i % 3 != 0) out[i].push_back(opinion_from(static_cast<RobotId>(i), Opinion::White));
    if (i % 5 == 0) out[i].push_back(opinion_from(static_cast<RobotId>(i), Opinion::Black));
  }
  auto rngs = streams(pos.size(), 1);
  std::vector<std::vector<Message>> in;
  const std::vector<bool> faulty(pos.size(), false);
  const std::size_t delivered = deliver(out, adj, CommsConfig{}, faulty, 1, rngs, in);

  std::size_t expected_total = 0;
  for (std::size_t r = 0; r < pos.size(); ++r) {
    std::size_t expected = 0;
    for (std::size_t s = 0; s < pos.size(); ++s) {
      if (s != r && distance_sq(pos[r], pos[s]) <= 1.0) expected += out[s].size();
    }
    EXPECT_EQ(in[r].size(), expected);
    for (const Message& m : in[r]) EXPECT_LE(distance_sq(pos[r], pos[m.sender]), 1.0);
    expected_total += expected;
  }
  EXPECT_EQ(delivered, expected_total);
}

TEST(Comms, FaultySenderAndReceiverAreSilent) {
  const std::vector<Vec2> pos{{1.0, 1.0}, {1.5, 1.0}, {1.2, 1.3}};
  const auto adj = NeighborIndex(pos, 8.0, 1.0).all();
  std::vector<std::vector<Message>> out(3);
  for (RobotId i = 0; i < 3; ++i) out[i].push_back(opinion_from(i, Opinion::Black));
  const std::vector<bool> faulty{true, false, false};
  auto rngs = streams(3, 2);
  std::vector<std::vector<Message>> in;
  deliver(out, adj, CommsConfig{}, faulty, 1, rngs, in);
  EXPECT_TRUE(in[0].empty());
  for (std::size_t r = 1; r < 3; ++r) {
    for (const Message& m : in[r]) EXPECT_NE(m.sender, 0u);
    EXPECT_EQ(in[r].size(), 1u);
  }
}

TEST(Comms, DeliveryPeriodGatesTicks) {
  const std::vector<Vec2> pos{{1.0, 1.0}, {1.5, 1.0}};
  const auto adj = NeighborIndex(pos, 8.0, 1.0).all();
  std::vector<std::vector<Message>> out(2);
  out[0].push_back(opinion_from(0, Opinion::White));
  CommsConfig cfg;
  cfg.delivery_period = 5;
  auto rngs = streams(2, 3);
  std::vector<std::vector<Message>> in;
  const std::vector<bool> faulty(2, false);
  for (long t = 1; t <= 10; ++t) {
    const std::size_t n = deliver(out, adj, cfg, faulty, t, rngs, in);
    EXPECT_EQ(n, t % 5 == 0 ? 1u : 0u) << t;
  }
}

TEST(Comms, DropProbabilityHalf) {
  const std::vector<Vec2> pos{{1.0, 1.0}, {1.5, 1.0}};
  const auto adj = NeighborIndex(pos, 8.0, 1.0).all();
  std::vector<std::vector<Message>> out(2);
  out[0].push_back(opinion_from(0, Opinion::White));
  CommsConfig cfg;
  cfg.drop_probability = 0.5;
  auto rngs = streams(2, 4);
  std::vector<std::vector<Message>> in;
  const std::vector<bool> faulty(2, false);
  std::size_t got = 0;
  for (long t = 1; t <= 10000; ++t) got += deliver(out, adj, cfg, faulty, t, rngs, in);
  EXPECT_NEAR(static_cast<double>(got) / 10000.0, 0.5, 0.02);
}

TEST(Comms, ConfigValidation) {
  CommsConfig c;
  EXPECT_NO_THROW(c.validate());
  c.d_comm = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.delivery_period = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.drop_probability = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Faults, ZeroProbabilityNeverFaults) {
  RngStream rng(1);
  FaultState st;
  for (int t = 0; t < 10000; ++t) {
    fault_scheduler(st, t % 7 == 0, FaultParams{0.0, 10.0}, 0.1, rng);
    ASSERT_FALSE(st.faulty);
  }
}

TEST(Faults, CertainAndPermanent) {
  RngStream rng(2);
  FaultState st;
  const FaultParams p{1.0, std::numeric_limits<double>::infinity()};
  fault_scheduler(st, true, p, 0.1, rng);
  ASSERT_TRUE(st.faulty);
  for (int t = 0; t < 10000; ++t) {
    fault_scheduler(st, t % 3 == 0, p, 0.1, rng);
    ASSERT_TRUE(st.faulty);
  }
}

TEST(Faults, OnlyOneTrialPerExpiryAndFixedDuration) {
  RngStream rng(3);
  FaultState st;
  const FaultParams p{1.0, 10.0};
  fault_scheduler(st, true, p, 0.1, rng);
  ASSERT_TRUE(st.faulty);
  int faulty_ticks = 1;
  while (true) {
    fault_scheduler(st, true, p, 0.1, rng);
    if (!st.faulty) break;
    ++faulty_ticks;
  }
  EXPECT_EQ(faulty_ticks, 100);
  // Still the same pending expiry: no new trial until the role has been reassigned.
  fault_scheduler(st, true, p, 0.1, rng);
  EXPECT_FALSE(st.faulty);
  fault_scheduler(st, false, p, 0.1, rng);
  fault_scheduler(st, true, p, 0.1, rng);
  EXPECT_TRUE(st.faulty);
}

TEST(Faults, RenewalFaultyFraction) {
  // Role periods Exp(T) pause while faulty; each expiry is a trial with
  // probability p of a fault lasting D. Renewal reward: p D / (T + p D).
  const double p = 0.1, duration = 10.0, mean_role = 20.0, dt = 0.1;
  const std::size_t robots = 400;
  const long ticks = 40000;
  std::vector<RoleState> roles(robots);
  std::vector<FaultState> faults(robots);
  std::vector<RngStream> role_rng, fault_rng;
  for (std::size_t i = 0; i < robots; ++i) {
    role_rng.emplace_back(17, i, Purpose::Role);
    fault_rng.emplace_back(17, i, Purpose::Fault);
  }
  const long burn_in = 2000;
  double faulty_samples = 0.0;
  for (long t = 0; t < ticks; ++t) {
    for (std::size_t i = 0; i < robots; ++i) {
      fault_scheduler(faults[i], roles[i].expired(), FaultParams{p, duration}, dt, fault_rng[i]);
      if (faults[i].faulty) {
        if (t >= burn_in) faulty_samples += 1.0;
        continue;
      }
      maybe_reassign(roles[i], [] { return Membership::Member; }, Role::Idle, mean_role, dt,
                     role_rng[i]);
    }
  }
  const double observed = faulty_samples / (static_cast<double>(robots) * (ticks - burn_in));
  const double expected = p * duration / (mean_role + p * duration);
  EXPECT_NEAR(observed, expected, 0.004);
}
