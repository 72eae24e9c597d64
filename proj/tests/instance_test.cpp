#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace mapfoc;
using testsup::chain_net;

TEST_CASE("validate: minimal valid instance") {
  Network net = chain_net();
  Instance inst = testsup::make_instance(net, {{0, "a", "c", 0}}, 1);
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("validate: unreachable goal on a one-way layout") {
  Network oneway = build_network({"a", "b", "c", "d"}, {{"a", "b"}, {"c", "d"}, {"d", "b"}},
                                 {"a", "c"}, {"b", "d"}, 1);
  Instance unreach = testsup::make_instance(oneway, {{0, "a", "d", 0}}, 1);
  auto v = validate_instance(unreach);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].message.find("unreachable") != std::string::npos);
}

TEST_CASE("validate: order/destination mismatch and k") {
  Network net = testsup::diamond_net();
  Instance inst = testsup::make_instance(net, {{0, "a", "d", 0}}, 1);
  inst.agents[0].destination = net.index("b");  // disagrees with d(o0)
  auto v = validate_instance(inst);
  bool found = false;
  for (const auto& viol : v)
    if (viol.message.find("order/destination mismatch") != std::string::npos) found = true;
  CHECK(found);

  Instance inst2 = testsup::make_instance(net, {{0, "a", "d", 0}}, 1);
  inst2.service_time = 0;
  v = validate_instance(inst2);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].message.find("service_time") != std::string::npos);
}

TEST_CASE("generator: structural postconditions on the chain") {
  Network net = chain_net();
  GenConfig cfg;
  cfg.arrival_rate = 1;
  cfg.total_agents = 3;
  cfg.seed = 7;
  cfg.order_size_max = 2;
  Instance inst = generate_stream(net, cfg);
  REQUIRE(inst.num_agents() == 3);
  CHECK(validate_instance(inst).empty());
  for (int i = 0; i < 3; ++i) CHECK(inst.agents[static_cast<size_t>(i)].earliest_entry == i);
  // order blocks are consecutive and bounded by order_size_max
  for (const auto& o : inst.orders) {
    CHECK(o.agent_ids.size() <= 2);
    for (size_t j = 1; j < o.agent_ids.size(); ++j)
      CHECK(o.agent_ids[j] == o.agent_ids[j - 1] + 1);
  }
}

TEST_CASE("generator: balanced destination assignment") {
  // two destinations; orders of size 3 then 1: the second order goes to the
  // destination with count 0
  Network net = build_network({"a", "m", "x", "y"}, {{"a", "m"}, {"m", "x"}, {"m", "y"}}, {"a"},
                              {"x", "y"}, 4);
  GenConfig cfg;
  cfg.arrival_rate = 1;
  cfg.total_agents = 64;
  cfg.seed = 3;
  cfg.order_size_max = 4;
  Instance inst = generate_stream(net, cfg);
  CHECK(validate_instance(inst).empty());
  int64_t cx = 0, cy = 0;
  for (const auto& o : inst.orders)
    (o.destination == net.index("x") ? cx : cy) += static_cast<int64_t>(o.agent_ids.size());
  CHECK(std::abs(cx - cy) <= 4);  // max imbalance bounded by order_size_max

  // trace of the balanced rule: first order size s1 goes to x (lowest index
  // among zero counts), second goes to y whenever s1 > 0
  CHECK(inst.orders[0].destination < inst.orders[1].destination);
}

TEST_CASE("generator: lambda batches earliest entries") {
  Network net = chain_net();
  GenConfig cfg;
  cfg.arrival_rate = 3;
  cfg.total_agents = 6;
  cfg.seed = 11;
  Instance inst = generate_stream(net, cfg);
  std::vector<Time> tmins;
  for (const auto& a : inst.agents) tmins.push_back(a.earliest_entry);
  CHECK(tmins == std::vector<Time>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("generator: deterministic for a fixed seed") {
  Network net = testsup::medium_net();
  GenConfig cfg;
  cfg.arrival_rate = 1;
  cfg.total_agents = 50;
  cfg.seed = 99;
  Instance i1 = generate_stream(net, cfg);
  Instance i2 = generate_stream(net, cfg);
  CHECK(i1.dump() == i2.dump());
  cfg.seed = 100;
  CHECK(generate_stream(net, cfg).dump() != i1.dump());
}

TEST_CASE("generated instances always validate (property)") {
  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    Network net = testsup::random_layer_net(rng, 3 + static_cast<int>(rng.below(4)),
                                            2 + static_cast<int>(rng.below(4)));
    GenConfig cfg;
    cfg.arrival_rate = 1 + static_cast<int>(rng.below(3));
    cfg.total_agents = 1 + static_cast<int>(rng.below(40));
    cfg.seed = rng.next_u64();
    Instance inst = generate_stream(net, cfg);
    CHECK(validate_instance(inst).empty());
    // block structure: agents of one order occupy consecutive emission slots
    for (const auto& o : inst.orders) {
      CHECK(!o.agent_ids.empty());
      CHECK(o.agent_ids.size() <= static_cast<size_t>(net.exit_buffer_len));
      for (size_t j = 1; j < o.agent_ids.size(); ++j)
        CHECK(o.agent_ids[j] == o.agent_ids[j - 1] + 1);
    }
    // destination load balance
    std::vector<int64_t> counts(net.destinations.size(), 0);
    for (const auto& o : inst.orders) {
      size_t slot = 0;
      while (net.destinations[slot] != o.destination) ++slot;
      counts[slot] += static_cast<int64_t>(o.agent_ids.size());
    }
    int64_t mx = *std::max_element(counts.begin(), counts.end());
    int64_t mn = *std::min_element(counts.begin(), counts.end());
    CHECK(mx - mn <= net.exit_buffer_len);
  }
}

TEST_CASE("instance round-trips through json") {
  Network net = testsup::merge_net();
  GenConfig cfg;
  cfg.arrival_rate = 2;
  cfg.total_agents = 9;
  cfg.seed = 21;
  cfg.service_time = 4;
  Instance inst = generate_stream(net, cfg);
  Instance back = Instance::from_json(inst.to_json(), net);
  CHECK(back.dump() == inst.dump());
  CHECK(back.service_time == 4);
  CHECK(back.num_agents() == inst.num_agents());
}
