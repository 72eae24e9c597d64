/*
 * Brute-force reference solvers for desk-scale verification only.
 *
 * optimal_makespan: layered breadth-first search over joint states
 * (location-or-OUT per agent, remaining service, and per-destination
 * contiguity tracking), exact on toy instances.
 *
 * exhaustive_pp: enumerates every total pending-order chain and every
 * within-order agent permutation, runs Level 1 on each, and returns the
 * best makespan — the target that neighborhood search tries to reach.
 *
 * Neither is ever invoked by the CLI solve path.
 */
#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "level1.hpp"
#include "snapshot.hpp"
#include "types.hpp"

namespace mapfoc {

struct OracleLimits {
  size_t max_agents = 5;
  size_t max_vertices = 14;
  Time max_horizon = 60;
  size_t max_states = 20'000'000;
};

namespace oracle_detail {

// agent codes: 0 = OUT, 1 = DONE, 2+v = on vertex v (not arrived),
// 2+V+d = serving with d occupancy steps left after this one
struct JointState {
  std::string bytes;  // agent codes then per-destination (last+1, started mask)
  bool operator==(const JointState& o) const { return bytes == o.bytes; }
};
struct JointHash {
  size_t operator()(const JointState& s) const { return std::hash<std::string>()(s.bytes); }
};

}  // namespace oracle_detail

// Exact minimum feasible makespan max(T_i + k), or throws limits_error.
inline Time optimal_makespan(const Instance& inst, const OracleLimits& limits = {}) {
  const Network& net = *inst.net;
  const size_t n = inst.num_agents();
  const size_t nv = net.num_vertices();
  const Time k = static_cast<Time>(inst.service_time);
  if (n == 0) return 0;
  if (n > limits.max_agents)
    throw limits_error("oracle: too many agents (" + std::to_string(n) + ")");
  if (nv > limits.max_vertices)
    throw limits_error("oracle: too many vertices (" + std::to_string(nv) + ")");
  if (inst.num_orders() > 8) throw limits_error("oracle: too many orders");

  const size_t nd = net.destinations.size();
  std::vector<int> dest_slot(nv, -1);
  for (size_t i = 0; i < nd; ++i)
    dest_slot[static_cast<size_t>(net.destinations[i])] = static_cast<int>(i);

  using oracle_detail::JointState;
  // While any entry gate (t >= t_min) is still closed, transitions depend on
  // the clock, so states carry a timestamp byte; afterwards the dynamics are
  // time-invariant and identical states may be merged across layers.
  Time gate = 0;
  for (const auto& a : inst.agents) gate = std::max(gate, a.earliest_entry);
  auto stamp = [&](Time t) -> char {
    return t < gate ? static_cast<char>((t + 2) & 0x7f) : static_cast<char>(0);
  };

  JointState init;
  init.bytes.assign(n + 2 * nd + 1, 0);  // all OUT; last-order byte 0 = none
  init.bytes.back() = stamp(-1);

  std::unordered_set<JointState, oracle_detail::JointHash> seen;
  std::vector<JointState> layer{init};
  seen.insert(init);
  size_t states_total = 1;

  // layer holds states at layer_time; the initial all-OUT state stands
  // for "before any entry", one step before t = 0
  for (Time layer_time = -1;; ++layer_time) {
    for (const auto& s : layer) {
      bool all_done = true;
      for (size_t a = 0; a < n; ++a)
        if (static_cast<uint8_t>(s.bytes[a]) != 1) { all_done = false; break; }
      if (all_done) return layer_time - 1;  // last occupancy one step earlier
    }
    const Time nt = layer_time + 1;
    if (nt > limits.max_horizon)
      throw limits_error("oracle: horizon limit " + std::to_string(limits.max_horizon) +
                         " exceeded");

    std::vector<JointState> next_layer;
    for (const auto& s : layer) {
      std::vector<Vertex> taken;  // vertices occupied at time nt
      JointState ns = s;
      ns.bytes.back() = stamp(nt);

      std::function<void(size_t)> recurse = [&](size_t a) {
        if (a == n) {
          if (seen.insert(ns).second) {
            next_layer.push_back(ns);
            if (++states_total > limits.max_states)
              throw limits_error("oracle: state limit exceeded");
          }
          return;
        }
        const AgentSpec& spec = inst.agents[a];
        uint8_t code = static_cast<uint8_t>(s.bytes[a]);
        auto vertex_free = [&](Vertex v) {
          return std::find(taken.begin(), taken.end(), v) == taken.end();
        };
        auto with_vertex = [&](Vertex v, uint8_t newcode, auto&& extra) {
          taken.push_back(v);
          ns.bytes[a] = static_cast<char>(newcode);
          extra();
          recurse(a + 1);
          ns.bytes[a] = static_cast<char>(code);
          taken.pop_back();
        };
        auto arrive = [&](Vertex g) {
          // contiguity legality: continues the last block or opens a new one
          size_t slot = static_cast<size_t>(dest_slot[static_cast<size_t>(g)]);
          char last = s.bytes[n + 2 * slot];
          char started = s.bytes[n + 2 * slot + 1];
          uint8_t ord = static_cast<uint8_t>(spec.order);
          bool legal = (static_cast<uint8_t>(last) == ord + 1) ||
                       !(static_cast<uint8_t>(started) & (1u << ord));
          if (!legal || !vertex_free(g)) return;
          with_vertex(g, static_cast<uint8_t>(2 + nv + static_cast<size_t>(k)), [&] {
            ns.bytes[n + 2 * slot] = static_cast<char>(ord + 1);
            ns.bytes[n + 2 * slot + 1] =
                static_cast<char>(static_cast<uint8_t>(started) | (1u << ord));
          });
          ns.bytes[n + 2 * slot] = last;
          ns.bytes[n + 2 * slot + 1] = started;
        };

        if (code == 1) {  // done stays done
          recurse(a + 1);
        } else if (code == 0) {  // outside: wait or enter
          recurse(a + 1);
          if (nt >= spec.earliest_entry && vertex_free(spec.entry))
            with_vertex(spec.entry, static_cast<uint8_t>(2 + spec.entry), [] {});
        } else if (code >= 2 + nv) {  // serving at the destination
          uint8_t dwell = static_cast<uint8_t>(code - 2 - nv);
          if (dwell == 0) {
            ns.bytes[a] = 1;  // vanish, frees the cell
            recurse(a + 1);
            ns.bytes[a] = static_cast<char>(code);
          } else if (vertex_free(spec.destination)) {
            // an earlier-indexed arrival claiming this cell kills the branch
            with_vertex(spec.destination, static_cast<uint8_t>(code - 1), [] {});
          }
        } else {  // en route
          Vertex v = static_cast<Vertex>(code - 2);
          if (vertex_free(v)) with_vertex(v, code, [] {});  // wait in place
          for (Vertex u : net.out[static_cast<size_t>(v)]) {
            if (u == spec.destination) {
              arrive(u);
            } else if (vertex_free(u)) {
              with_vertex(u, static_cast<uint8_t>(2 + u), [] {});
            }
          }
        }
      };
      recurse(0);
    }
    if (next_layer.empty())
      throw limits_error("oracle: search space exhausted without solution");
    layer = std::move(next_layer);
  }
}

struct ExhaustiveResult {
  Time best_makespan = 0;
  PrioritySpec best_spec;
};

// Minimum Level-1 makespan over every order chain and every within-order
// agent permutation (offline snapshot; everything pending).
inline ExhaustiveResult exhaustive_pp(const Instance& inst, size_t max_orders = 4,
                                      size_t max_agents = 6) {
  if (inst.num_orders() > max_orders)
    throw limits_error("exhaustive_pp: too many orders (" + std::to_string(inst.num_orders()) +
                       ")");
  if (inst.num_agents() > max_agents)
    throw limits_error("exhaustive_pp: too many agents (" + std::to_string(inst.num_agents()) +
                       ")");

  SnapshotState snap = make_root_snapshot(inst);
  Classification cls = classify(snap);
  Time horizon = horizon_bound(snap, cls);

  std::vector<int> chain(inst.num_orders());
  for (size_t i = 0; i < chain.size(); ++i) chain[i] = static_cast<int>(i);

  ExhaustiveResult best;
  bool first = true;
  std::sort(chain.begin(), chain.end());
  do {
    // odometer over per-order permutations
    std::vector<std::vector<int>> perms;
    for (const auto& o : inst.orders) {
      auto ids = o.agent_ids;
      std::sort(ids.begin(), ids.end());
      perms.push_back(ids);
    }
    std::function<void(size_t)> sweep = [&](size_t oi) {
      if (oi == perms.size()) {
        PrioritySpec spec;
        spec.pending_order_seq = chain;
        for (size_t o = 0; o < perms.size(); ++o) spec.agent_seq[static_cast<int>(o)] = perms[o];
        Level1Result res = level1_pp(snap, cls, spec, horizon);
        if (first || res.snapshot_makespan < best.best_makespan) {
          best.best_makespan = res.snapshot_makespan;
          best.best_spec = spec;
          first = false;
        }
        return;
      }
      std::vector<int>& p = perms[oi];
      std::sort(p.begin(), p.end());
      do {
        sweep(oi + 1);
      } while (std::next_permutation(p.begin(), p.end()));
    };
    sweep(0);
  } while (std::next_permutation(chain.begin(), chain.end()));
  return best;
}

}  // namespace mapfoc
