/*
 * Shared test fixtures and independent oracles. Everything here must stay
 * independent of the implementation paths it checks.
 */
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <mapfoc/mapfoc.hpp>

namespace testsup {

using namespace mapfoc;

inline std::string data_dir() { return MAPFOC_DATA_DIR; }

inline Network chain_net() {
  return build_network({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, {"a"}, {"c"}, 1);
}

inline Network chain_net_n(int len, int lbuf = 1) {
  std::vector<std::string> v;
  std::vector<std::pair<std::string, std::string>> e;
  for (int i = 0; i < len; ++i) {
    v.push_back("v" + std::to_string(i));
    if (i > 0) e.push_back({"v" + std::to_string(i - 1), "v" + std::to_string(i)});
  }
  return build_network(v, e, {"v0"}, {"v" + std::to_string(len - 1)}, lbuf);
}

inline Network merge_net() { return Network::load_file(data_dir() + "/maps/merge.json"); }
inline Network medium_net() { return Network::load_file(data_dir() + "/maps/medium.json"); }

inline Network diamond_net() {
  return build_network({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}},
                       {"a"}, {"d"}, 1);
}

// hand-assembled instance: one spec per agent as (order, entry, dest, t_min)
struct AgentRow {
  int order;
  std::string entry;
  std::string dest;
  Time t_min;
};

inline Instance make_instance(const Network& net, const std::vector<AgentRow>& rows, int k) {
  Instance inst;
  inst.net = &net;
  inst.service_time = k;
  int max_order = -1;
  for (const auto& r : rows) max_order = std::max(max_order, r.order);
  inst.orders.resize(static_cast<size_t>(max_order + 1));
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    AgentSpec a;
    a.id = static_cast<int>(i);
    a.order = r.order;
    a.entry = net.index(r.entry);
    a.destination = net.index(r.dest);
    a.earliest_entry = r.t_min;
    a.name = "a" + std::to_string(i);
    Order& o = inst.orders[static_cast<size_t>(r.order)];
    if (o.id < 0) {
      o.id = r.order;
      o.name = "o" + std::to_string(r.order);
      o.destination = a.destination;
    }
    o.agent_ids.push_back(a.id);
    inst.agents.push_back(a);
  }
  return inst;
}

// O(m^2) pairwise contiguity oracle over an arrival-ordered order-id list
inline bool contiguous_by_pairs(const std::vector<int>& order_seq) {
  const size_t m = order_seq.size();
  for (size_t p = 0; p < m; ++p)
    for (size_t r = p + 2; r < m; ++r)
      if (order_seq[p] == order_seq[r])
        for (size_t q = p + 1; q < r; ++q)
          if (order_seq[q] != order_seq[p]) return false;
  return true;
}

// brute force over entry times: best arrival of a lone agent on a chain of
// length d whose destination may not be occupied before gamma
inline Time best_arrival_on_chain(Time t_min, Time dist, Time gamma) {
  Time best = -1;
  for (Time entry = t_min; entry < t_min + gamma + dist + 5; ++entry) {
    Time arrive = entry + dist;
    if (arrive >= gamma) {
      best = (best < 0) ? arrive : std::min(best, arrive);
    }
  }
  return best;
}

// random strongly-entry-connected layered map for property tests
inline Network random_layer_net(Rng& rng, int layers, int width) {
  std::vector<std::string> verts;
  std::vector<std::pair<std::string, std::string>> edges;
  auto name = [](int l, int w) { return "L" + std::to_string(l) + "_" + std::to_string(w); };
  for (int l = 0; l < layers; ++l)
    for (int w = 0; w < width; ++w) verts.push_back(name(l, w));
  for (int l = 0; l + 1 < layers; ++l)
    for (int w = 0; w < width; ++w) {
      edges.push_back({name(l, w), name(l + 1, w)});  // guarantee reachability
      int extra = static_cast<int>(rng.below(static_cast<uint64_t>(width)));
      edges.push_back({name(l, w), name(l + 1, extra)});
    }
  std::vector<std::string> entries, dests;
  for (int w = 0; w < width; ++w) {
    entries.push_back(name(0, w));
    dests.push_back(name(layers - 1, w));
  }
  return build_network(verts, edges, entries, dests, 2);
}

inline Plan solve_vanilla(const Instance& inst, uint64_t seed = 0) {
  SnapshotState snap = make_root_snapshot(inst);
  RefineConfig cfg;
  cfg.variant = Variant::vanilla;
  cfg.seed = seed;
  return solve_snapshot(snap, nullptr, cfg).plan;
}

}  // namespace testsup
