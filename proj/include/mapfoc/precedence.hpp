/*
 * Order-precedence and agent-priority construction (DOPP Levels 3 and 2).
 *
 * Order precedence: every active order precedes every pending order;
 * relative precedence among active orders is inherited from the previous
 * round; pending orders are chained by rho_o = min earliest entry over the
 * order's agents, ties broken uniformly at random.
 *
 * Agent priority: cross-order pairs follow the order precedence; pairs
 * inside active orders are inherited verbatim from the previous round
 * (single-window reveal guarantees they exist); pairs inside pending
 * orders are chained by earliest entry time with random tie-breaks.
 *
 * Both relations are stored as explicit pair sets and are total by
 * construction, so topological sorting yields a unique list. Closed
 * orders (all agents finished) are excluded from both relations; their
 * arrivals are history and constrain nothing.
 */
#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "rng.hpp"
#include "snapshot.hpp"
#include "types.hpp"

namespace mapfoc {

// Compact carrier of one full priority structure. The pair sets used by
// the spec-level operations are materialized from these sequences; the
// solver hot path works on the sequences directly.
struct PrioritySpec {
  std::vector<int> active_order_seq;   // precedence order among active orders
  std::vector<int> pending_order_seq;  // precedence chain among pending orders
  // per order id: its agents in priority order (visible, unfinished or
  // finished members of active/pending orders)
  std::unordered_map<int, std::vector<int>> agent_seq;

  std::vector<int> order_list() const {
    std::vector<int> all(active_order_seq);
    all.insert(all.end(), pending_order_seq.begin(), pending_order_seq.end());
    return all;
  }
  std::vector<int> agent_list() const {
    std::vector<int> out;
    for (int o : order_list()) {
      auto it = agent_seq.find(o);
      if (it != agent_seq.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
  }
  // position of each order in the total order, by order id
  std::unordered_map<int, int> order_positions() const {
    std::unordered_map<int, int> pos;
    int i = 0;
    for (int o : order_list()) pos[o] = i++;
    return pos;
  }
};

using PairSet = std::vector<std::pair<int, int>>;

struct PrecedenceState {
  PrioritySpec spec;
  PairSet order_pairs;          // full relation over active+pending orders
  PairSet agent_pairs;          // full relation over their agents
  std::vector<int> order_list;  // L_O (topological order)
  std::vector<int> agent_list;  // L_A (topological order)
};

// ---------------------------------------------------------------------------
// topological sort over an explicit pair set

struct TopoResult {
  std::vector<int> order;
  bool ok = false;
  std::vector<int> cycle_witness;  // nodes on a cycle when !ok
};

inline TopoResult topo_order(const PairSet& pairs, const std::vector<int>& universe) {
  std::unordered_map<int, int> slot;
  for (size_t i = 0; i < universe.size(); ++i) slot[universe[i]] = static_cast<int>(i);
  const size_t n = universe.size();
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const auto& [a, b] : pairs) {
    auto ia = slot.find(a), ib = slot.find(b);
    if (ia == slot.end() || ib == slot.end())
      throw usage_error("precedence pair references node outside the universe");
    succ[static_cast<size_t>(ia->second)].push_back(ib->second);
    ++indeg[static_cast<size_t>(ib->second)];
  }
  // Kahn with smallest-id tie-break; for total relations there is exactly
  // one source at every step, so the result is unique
  std::vector<int> ready;
  for (size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  TopoResult res;
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end(),
                               [&](int x, int y) { return universe[static_cast<size_t>(x)] <
                                                          universe[static_cast<size_t>(y)]; });
    int u = *it;
    ready.erase(it);
    res.order.push_back(universe[static_cast<size_t>(u)]);
    for (int v : succ[static_cast<size_t>(u)])
      if (--indeg[static_cast<size_t>(v)] == 0) ready.push_back(v);
  }
  if (res.order.size() == n) {
    res.ok = true;
  } else {
    for (size_t i = 0; i < n; ++i)
      if (indeg[i] > 0) res.cycle_witness.push_back(universe[i]);
  }
  return res;
}

inline std::vector<int> topo_order_or_throw(const PairSet& pairs, const std::vector<int>& universe,
                                            const std::string& what) {
  TopoResult r = topo_order(pairs, universe);
  if (!r.ok) {
    std::string msg = "cycle detected in " + what + "; witness nodes:";
    for (int v : r.cycle_witness) msg += " " + std::to_string(v);
    throw invariant_error(msg);
  }
  return r.order;
}

// ---------------------------------------------------------------------------
// pair materialization from sequences

inline PairSet order_pairs_of(const PrioritySpec& spec) {
  PairSet pairs;
  std::vector<int> all = spec.order_list();
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) pairs.emplace_back(all[i], all[j]);
  return pairs;
}

inline PairSet agent_pairs_of(const PrioritySpec& spec) {
  PairSet pairs;
  std::vector<int> agents = spec.agent_list();
  for (size_t i = 0; i < agents.size(); ++i)
    for (size_t j = i + 1; j < agents.size(); ++j) pairs.emplace_back(agents[i], agents[j]);
  return pairs;
}

// ---------------------------------------------------------------------------
// initialization

namespace detail {

// sort keys ascending; equal keys are permuted uniformly at random
template <typename Key>
inline void sort_with_random_ties(std::vector<int>& ids, const std::vector<Key>& key, Rng& rng) {
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    return key[static_cast<size_t>(a)] < key[static_cast<size_t>(b)];
  });
  size_t i = 0;
  while (i < ids.size()) {
    size_t j = i + 1;
    while (j < ids.size() &&
           key[static_cast<size_t>(ids[j])] == key[static_cast<size_t>(ids[i])])
      ++j;
    if (j - i > 1) {
      std::vector<int> group(ids.begin() + static_cast<long>(i), ids.begin() + static_cast<long>(j));
      rng.shuffle(group);
      std::copy(group.begin(), group.end(), ids.begin() + static_cast<long>(i));
    }
    i = j;
  }
}

}  // namespace detail

// Level 3 init. prev == nullptr stands for prec^{-1} = empty (round 0).
inline PrioritySpec init_order_precedence(const SnapshotState& snap, const Classification& cls,
                                          const PrioritySpec* prev, Rng& rng) {
  const Instance& inst = *snap.inst;
  PrioritySpec spec;

  // (ii) inherited relative precedence among active orders
  spec.active_order_seq = cls.active_orders;
  if (!spec.active_order_seq.empty()) {
    if (prev == nullptr)
      throw usage_error("active orders present but no previous precedence to inherit from");
    auto pos = prev->order_positions();
    for (int o : spec.active_order_seq)
      if (!pos.count(o))
        throw invariant_error("active order " + inst.orders[static_cast<size_t>(o)].name +
                              " missing from previous precedence (single-window reveal violated)");
    std::sort(spec.active_order_seq.begin(), spec.active_order_seq.end(),
              [&](int a, int b) { return pos.at(a) < pos.at(b); });
  }

  // (iii) pending orders chained by rho_o, random tie-breaks
  std::vector<Time> rho(inst.num_orders(), 0);
  for (int o : cls.pending_orders) {
    Time m = -1;
    for (int a : inst.orders[static_cast<size_t>(o)].agent_ids) {
      const AgentSpec& s = inst.agents[static_cast<size_t>(a)];
      if (m < 0 || s.earliest_entry < m) m = s.earliest_entry;
    }
    rho[static_cast<size_t>(o)] = m;
  }
  spec.pending_order_seq = cls.pending_orders;
  detail::sort_with_random_ties(spec.pending_order_seq, rho, rng);
  return spec;
}

// Level 2 init; fills spec.agent_seq per Eq. order-consistency + inheritance
// + earliest-entry chains.
inline void init_agent_priority(const SnapshotState& snap, const Classification& cls,
                                PrioritySpec& spec, const PrioritySpec* prev, Rng& rng) {
  const Instance& inst = *snap.inst;
  spec.agent_seq.clear();

  for (int o : spec.active_order_seq) {
    // inherited within-order pairs; all members were visible in r-1
    std::vector<int> members;
    for (int a : inst.orders[static_cast<size_t>(o)].agent_ids) members.push_back(a);
    if (prev == nullptr || !prev->agent_seq.count(o))
      throw invariant_error("active order " + inst.orders[static_cast<size_t>(o)].name +
                            " has no inherited agent priorities (single-window reveal violated)");
    const auto& prev_seq = prev->agent_seq.at(o);
    std::unordered_map<int, int> pos;
    for (size_t i = 0; i < prev_seq.size(); ++i) pos[prev_seq[i]] = static_cast<int>(i);
    for (int a : members)
      if (!pos.count(a))
        throw invariant_error("agent " + inst.agents[static_cast<size_t>(a)].name +
                              " of active order missing from previous round");
    std::sort(members.begin(), members.end(), [&](int a, int b) { return pos.at(a) < pos.at(b); });
    spec.agent_seq[o] = std::move(members);
  }

  for (int o : spec.pending_order_seq) {
    std::vector<int> members = inst.orders[static_cast<size_t>(o)].agent_ids;
    std::vector<Time> tmin(inst.num_agents(), 0);
    for (int a : members) tmin[static_cast<size_t>(a)] = inst.agents[static_cast<size_t>(a)].earliest_entry;
    detail::sort_with_random_ties(members, tmin, rng);
    spec.agent_seq[o] = std::move(members);
  }
}

// Build the full precedence state for a snapshot: sequences, materialized
// pair sets, and topologically sorted lists (asserting acyclicity).
inline PrecedenceState init_precedence(const SnapshotState& snap, const Classification& cls,
                                       const PrioritySpec* prev, Rng& rng) {
  PrecedenceState st;
  st.spec = init_order_precedence(snap, cls, prev, rng);
  init_agent_priority(snap, cls, st.spec, prev, rng);
  st.order_pairs = order_pairs_of(st.spec);
  st.agent_pairs = agent_pairs_of(st.spec);
  st.order_list = topo_order_or_throw(st.order_pairs, st.spec.order_list(), "order precedence");
  st.agent_list = topo_order_or_throw(st.agent_pairs, st.spec.agent_list(), "agent priority");
  return st;
}

}  // namespace mapfoc
