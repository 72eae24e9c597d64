/*
 * Replanning-time context: the executed prefix at tau_r, the visible
 * agent/order sets, and the active/pending/finished classification.
 *
 * Agent classification follows the previous plan's location at tau_r:
 * on the network = active, already departed = finished, otherwise
 * pending. An order is pending only while NONE of its agents has entered
 * the network; once its arrival block at the destination has begun, the
 * order stays in the active class until all of its agents are finished
 * (then it is closed and drops out of precedence entirely). An order
 * never moves from active back to pending: re-chaining an order whose
 * block already started would let another order's arrivals split that
 * block, breaking order-contiguity across rounds.
 */
#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "instance.hpp"
#include "plan.hpp"
#include "types.hpp"

namespace mapfoc {

enum class AgentPhase { pending, active, finished };
enum class OrderPhase { pending, active, closed };

struct SnapshotState {
  const Instance* inst = nullptr;
  Time tau = 0;
  std::vector<int> visible_agents;           // sorted ids, finished included
  std::vector<int> visible_orders;           // sorted ids
  std::vector<std::optional<Path>> prev_paths;  // by agent id; empty at r=0
  std::vector<char> previously_visible;      // by agent id; in A^{r-1}

  bool has_prev(int agent) const {
    return static_cast<size_t>(agent) < prev_paths.size() &&
           prev_paths[static_cast<size_t>(agent)].has_value();
  }
};

struct Classification {
  std::vector<AgentPhase> agent_phase;   // by agent id (meaningful for visible)
  std::vector<OrderPhase> order_phase;   // by order id
  std::vector<int> active_agents, pending_agents, finished_agents;
  std::vector<int> active_orders, pending_orders, closed_orders;
  std::vector<Vertex> location;          // at tau; OUT for pending/finished
  std::vector<Time> prev_arrival;        // T_i from previous plan, -1 if none
  std::vector<Time> remaining_service;   // dwell steps still owed at tau, -1 if n/a
};

// one-shot snapshot: everything visible, nothing executed
inline SnapshotState make_root_snapshot(const Instance& inst) {
  SnapshotState s;
  s.inst = &inst;
  s.tau = 0;
  for (const auto& a : inst.agents) s.visible_agents.push_back(a.id);
  for (const auto& o : inst.orders) s.visible_orders.push_back(o.id);
  s.prev_paths.assign(inst.num_agents(), std::nullopt);
  s.previously_visible.assign(inst.num_agents(), 0);
  return s;
}

inline Classification classify(const SnapshotState& snap) {
  const Instance& inst = *snap.inst;
  Classification c;
  c.agent_phase.assign(inst.num_agents(), AgentPhase::pending);
  c.order_phase.assign(inst.num_orders(), OrderPhase::pending);
  c.location.assign(inst.num_agents(), OUT);
  c.prev_arrival.assign(inst.num_agents(), -1);
  c.remaining_service.assign(inst.num_agents(), -1);

  std::vector<char> order_has_unfinished(inst.num_orders(), 0);
  std::vector<char> order_has_entered(inst.num_orders(), 0);
  std::vector<char> order_visible(inst.num_orders(), 0);
  for (int o : snap.visible_orders) order_visible[static_cast<size_t>(o)] = 1;

  for (int a : snap.visible_agents) {
    const AgentSpec& spec = inst.agents[static_cast<size_t>(a)];
    AgentPhase phase = AgentPhase::pending;
    if (snap.has_prev(a)) {
      const Path& p = *snap.prev_paths[static_cast<size_t>(a)];
      c.prev_arrival[static_cast<size_t>(a)] = p.arrival_time;
      if (p.last_time() < snap.tau) {
        phase = AgentPhase::finished;
        order_has_entered[static_cast<size_t>(spec.order)] = 1;
      } else if (p.at(snap.tau) != OUT) {
        phase = AgentPhase::active;
        c.location[static_cast<size_t>(a)] = p.at(snap.tau);
        order_has_entered[static_cast<size_t>(spec.order)] = 1;
        if (p.arrival_time >= 0 && p.arrival_time <= snap.tau)
          c.remaining_service[static_cast<size_t>(a)] = p.last_time() - snap.tau;
      }
    }
    c.agent_phase[static_cast<size_t>(a)] = phase;
    if (phase != AgentPhase::finished)
      order_has_unfinished[static_cast<size_t>(spec.order)] = 1;
    switch (phase) {
      case AgentPhase::active: c.active_agents.push_back(a); break;
      case AgentPhase::pending: c.pending_agents.push_back(a); break;
      case AgentPhase::finished: c.finished_agents.push_back(a); break;
    }
  }

  for (int o : snap.visible_orders) {
    OrderPhase phase;
    if (!order_has_unfinished[static_cast<size_t>(o)])
      phase = OrderPhase::closed;
    else if (order_has_entered[static_cast<size_t>(o)])
      phase = OrderPhase::active;
    else
      phase = OrderPhase::pending;
    c.order_phase[static_cast<size_t>(o)] = phase;
    switch (phase) {
      case OrderPhase::active: c.active_orders.push_back(o); break;
      case OrderPhase::pending: c.pending_orders.push_back(o); break;
      case OrderPhase::closed: c.closed_orders.push_back(o); break;
    }
  }
  return c;
}

}  // namespace mapfoc
