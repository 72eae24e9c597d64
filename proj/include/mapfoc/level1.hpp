/*
 * Level 1: prioritized planning with destination blocking.
 *
 * Agents are planned one by one along the total priority order; each
 * space-time A* search treats previously planned paths as moving
 * obstacles. Destination blocking forbids occupying the agent's
 * destination before Gamma_i, the release time of the last arrival among
 * higher-precedence orders sharing that destination, which is what makes
 * arrival sequences order-contiguous.
 *
 * Search state is (vertex-or-OUT, time). From OUT the agent may keep
 * waiting outside or enter at its entry vertex when free; cost is arrival
 * time; the heuristic is the reverse distance field of the destination.
 * Tie-breaking: equal f prefers larger g (deeper in time), then on-network
 * vertices over OUT, then lower vertex index, then insertion order, making
 * expansions fully deterministic.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "precedence.hpp"
#include "reservation.hpp"
#include "snapshot.hpp"
#include "types.hpp"

namespace mapfoc {

// raised when a single-agent search exhausts its horizon; the caller may
// retry the snapshot in hold-active mode
struct SearchFailure : Error {
  int agent;
  SearchFailure(int a, const std::string& msg) : Error(Error::Kind::internal, msg), agent(a) {}
};

// Gamma_i = max{T_j + k + 1 : g_j = g_i, o_j before o_i}; 0 if none.
// arrivals[j] is the planned arrival of agent j, -1 if not yet planned.
inline Time blocking_time(const Instance& inst, int agent,
                          const std::unordered_map<int, int>& order_pos,
                          const std::vector<int>& visible_agents,
                          const std::vector<Time>& arrivals) {
  const AgentSpec& me = inst.agents[static_cast<size_t>(agent)];
  auto my_pos = order_pos.find(me.order);
  Time gamma = 0;
  for (int j : visible_agents) {
    if (j == agent) continue;
    const AgentSpec& other = inst.agents[static_cast<size_t>(j)];
    if (other.destination != me.destination || other.order == me.order) continue;
    auto it = order_pos.find(other.order);
    if (it == order_pos.end()) continue;  // closed order: its block is history
    if (my_pos == order_pos.end() || it->second < my_pos->second) {
      if (arrivals[static_cast<size_t>(j)] < 0)
        throw internal_error("priority order violation: agent " + other.name +
                             " of higher-precedence order is unplanned while planning " + me.name);
      gamma = std::max(gamma, arrivals[static_cast<size_t>(j)] +
                                  static_cast<Time>(inst.service_time) + 1);
    }
  }
  return gamma;
}

// T-bar: search cutoff guaranteeing completeness of prioritized planning
inline Time horizon_bound(const SnapshotState& snap, const Classification& cls) {
  const Instance& inst = *snap.inst;
  Time c_act = snap.tau;
  for (int a : cls.active_agents) {
    Time t_prev = cls.prev_arrival[static_cast<size_t>(a)];
    if (t_prev >= 0)
      c_act = std::max(c_act, t_prev + static_cast<Time>(inst.service_time) + 1);
  }
  Time t_max = snap.tau;
  for (int a : cls.pending_agents)
    t_max = std::max(t_max, inst.agents[static_cast<size_t>(a)].earliest_entry);
  Time base = std::max({c_act, t_max, snap.tau});
  Time d = static_cast<Time>(inst.net->diameter_bound());
  return base + static_cast<Time>(cls.pending_agents.size()) *
                    (d + static_cast<Time>(inst.service_time) + 1);
}

namespace detail {

struct AStarNode {
  Time f;
  Time t;
  int32_t vkey;  // vertex index, INT32_MAX for OUT
  uint32_t seq;
  uint64_t key;
};
struct AStarNodeWorse {
  bool operator()(const AStarNode& a, const AStarNode& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.t != b.t) return a.t < b.t;        // prefer deeper in time
    if (a.vkey != b.vkey) return a.vkey > b.vkey;  // prefer on-network, lower index
    return a.seq > b.seq;
  }
};

inline uint64_t state_key(Vertex v, Time t) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(v + 1)) << 32) | static_cast<uint32_t>(t);
}
inline Vertex key_vertex(uint64_t k) { return static_cast<Vertex>(static_cast<int32_t>(k >> 32)) - 1; }
inline Time key_time(uint64_t k) { return static_cast<Time>(static_cast<uint32_t>(k)); }

}  // namespace detail

// Plans one agent against the reservation table. For active agents the
// executed prefix is copied from the previous plan and the search resumes
// from (location, tau); mid-service agents keep their forced path.
inline Path plan_one_agent(const SnapshotState& snap, const Classification& cls, int agent,
                           const ReservationTable& res, Time gamma, Time horizon) {
  const Instance& inst = *snap.inst;
  const AgentSpec& spec = inst.agents[static_cast<size_t>(agent)];
  const AgentPhase phase = cls.agent_phase[static_cast<size_t>(agent)];

  if (phase == AgentPhase::finished ||
      (phase == AgentPhase::active && cls.remaining_service[static_cast<size_t>(agent)] >= 0)) {
    // history or forced dwell-then-exit: the previous path is the path
    return *snap.prev_paths[static_cast<size_t>(agent)];
  }

  const DistField& h_field = inst.net->reverse_field(spec.destination);
  auto h_of = [&](Vertex v) { return h_field.at(v); };

  Vertex start_v;
  Time start_t;
  if (phase == AgentPhase::active) {
    start_v = cls.location[static_cast<size_t>(agent)];
    start_t = snap.tau;
    if (!h_field.reachable(start_v))
      throw internal_error("active agent " + spec.name + " cannot reach its destination");
  } else {
    Time floor = snap.previously_visible.size() > static_cast<size_t>(agent) &&
                         snap.previously_visible[static_cast<size_t>(agent)]
                     ? snap.tau + 1
                     : std::max(spec.earliest_entry, snap.tau);
    floor = std::max(floor, spec.earliest_entry);
    start_v = OUT;
    start_t = floor - 1;  // first possible entry is floor
    if (!h_field.reachable(spec.entry))
      throw usage_error("agent " + spec.name + ": destination unreachable from entry");
  }

  using detail::AStarNode;
  using detail::state_key;
  const Time k = static_cast<Time>(inst.service_time);
  const int32_t h_out = 1 + *h_of(spec.entry);

  std::priority_queue<AStarNode, std::vector<AStarNode>, detail::AStarNodeWorse> open;
  std::unordered_set<uint64_t> closed;
  std::unordered_map<uint64_t, uint64_t> parent;
  uint32_t seq = 0;

  auto f_of = [&](Vertex v, Time t) -> Time {
    int32_t h = (v == OUT) ? h_out : *h_of(v);
    return std::max(t + static_cast<Time>(h), gamma);
  };
  auto push = [&](Vertex v, Time t, uint64_t from) {
    if (t > horizon) return;
    uint64_t key = state_key(v, t);
    if (closed.count(key)) return;
    parent.emplace(key, from);  // first writer wins; refined on pop order
    open.push({f_of(v, t), t, v == OUT ? INT32_MAX : v, seq++, key});
  };

  uint64_t start_key = state_key(start_v, start_t);
  open.push({f_of(start_v, start_t), start_t, start_v == OUT ? INT32_MAX : start_v, seq++,
             start_key});
  parent.emplace(start_key, start_key);

  uint64_t goal_key = 0;
  bool found = false;
  size_t expansions = 0;
  const size_t expansion_cap = 50'000'000;

  while (!open.empty()) {
    AStarNode node = open.top();
    open.pop();
    if (closed.count(node.key)) continue;
    closed.insert(node.key);
    if (++expansions > expansion_cap)
      throw SearchFailure(agent, "expansion cap exceeded planning agent " + spec.name);

    Vertex v = detail::key_vertex(node.key);
    Time t = node.t;
    if (v == spec.destination) {
      goal_key = node.key;
      found = true;
      break;
    }

    Time nt = t + 1;
    if (nt > horizon) continue;
    auto try_arrive = [&](Time at) {
      if (at >= gamma && res.window_free(spec.destination, at, at + k))
        push(spec.destination, at, node.key);
    };
    if (v == OUT) {
      push(OUT, nt, node.key);
      // entries and destinations are disjoint, so entering is never arriving
      if (!res.occupied(spec.entry, nt)) push(spec.entry, nt, node.key);
    } else {
      if (!res.occupied(v, nt)) push(v, nt, node.key);
      for (Vertex u : inst.net->out[static_cast<size_t>(v)]) {
        if (u == spec.destination) {
          try_arrive(nt);
        } else if (!res.occupied(u, nt) && h_field.reachable(u)) {
          push(u, nt, node.key);
        }
      }
    }
  }

  if (!found)
    throw SearchFailure(agent, "horizon exhausted planning agent " + spec.name + " (tau=" +
                                   std::to_string(snap.tau) + ", gamma=" + std::to_string(gamma) +
                                   ", horizon=" + std::to_string(horizon) + ")");

  // walk back to the start state
  std::vector<Vertex> suffix;
  Time arrival = detail::key_time(goal_key);
  for (uint64_t k2 = goal_key; k2 != start_key;) {
    suffix.push_back(detail::key_vertex(k2));
    uint64_t p = parent.at(k2);
    if (p == k2) break;
    k2 = p;
  }
  std::reverse(suffix.begin(), suffix.end());

  Path path;
  path.agent = agent;
  path.arrival_time = arrival;
  if (phase == AgentPhase::active) {
    const Path& prev = *snap.prev_paths[static_cast<size_t>(agent)];
    path.entry_time = prev.entry_time;
    for (Time t = prev.entry_time; t <= snap.tau; ++t) path.locations.push_back(prev.at(t));
    path.locations.insert(path.locations.end(), suffix.begin(), suffix.end());
  } else {
    // drop leading OUT states; path starts at the chosen entry time
    size_t first_real = 0;
    while (first_real < suffix.size() && suffix[first_real] == OUT) ++first_real;
    path.entry_time = start_t + 1 + static_cast<Time>(first_real);
    path.locations.assign(suffix.begin() + static_cast<long>(first_real), suffix.end());
  }
  for (Time i = 0; i < k; ++i) path.locations.push_back(spec.destination);
  return path;
}

enum class Level1Mode {
  replan_active,  // active agents re-pathed from their current vertex
  hold_active,    // active agents keep previous suffixes verbatim
};

struct Level1Result {
  Plan plan;
  Time snapshot_makespan = 0;  // max over visible agents of T_i + k
};

inline Level1Result level1_pp(const SnapshotState& snap, const Classification& cls,
                              const PrioritySpec& spec, Time horizon,
                              Level1Mode mode = Level1Mode::replan_active) {
  const Instance& inst = *snap.inst;
  Level1Result out{Plan(&inst), 0};
  ReservationTable res(inst.net->num_vertices());
  std::vector<Time> arrivals(inst.num_agents(), -1);
  auto order_pos = spec.order_positions();

  auto commit = [&](int a, Path p) {
    arrivals[static_cast<size_t>(a)] = p.arrival_time;
    out.snapshot_makespan = std::max(out.snapshot_makespan, p.last_time());
    res.reserve_path(p);
    out.plan.paths[static_cast<size_t>(a)] = std::move(p);
  };

  // history and forced futures first: finished agents, then agents whose
  // future is fully determined (mid-service, or all actives in hold mode)
  for (int a : cls.finished_agents) commit(a, *snap.prev_paths[static_cast<size_t>(a)]);
  std::vector<int> agent_order = spec.agent_list();
  for (int a : agent_order) {
    if (cls.agent_phase[static_cast<size_t>(a)] != AgentPhase::active) continue;
    bool forced = cls.remaining_service[static_cast<size_t>(a)] >= 0 ||
                  mode == Level1Mode::hold_active;
    if (forced) commit(a, *snap.prev_paths[static_cast<size_t>(a)]);
  }

  for (int a : agent_order) {
    if (out.plan.paths[static_cast<size_t>(a)]) continue;  // already committed
    Time gamma = blocking_time(inst, a, order_pos, snap.visible_agents, arrivals);
    Path p = plan_one_agent(snap, cls, a, res, gamma, horizon);
    if (p.arrival_time < gamma)
      throw internal_error("destination blocking violated for agent " +
                           inst.agents[static_cast<size_t>(a)].name);
    commit(a, std::move(p));
  }
  return out;
}

}  // namespace mapfoc
