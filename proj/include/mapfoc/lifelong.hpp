/*
 * Online driver: windows the agent stream into rounds, builds snapshots
 * from executed prefixes, invokes a solver per round, and stitches the
 * global execution.
 *
 * Windows are cut on order boundaries so that all agents of one order are
 * revealed within a single replanning window; a window extends while the
 * next order's earliest entry does not exceed the current window's latest
 * (otherwise visibility at tau_{r+1} would leak a split order). tau_1 = 0
 * and tau_{r+1} is one past the latest earliest-entry of window r, the
 * smallest replanning time that makes every window-r agent visible
 * strictly before it.
 *
 * PIBT-AC is reactive and never looks ahead, so its lifelong execution
 * equals one continuous simulation of the full stream; the driver runs it
 * once and slices per-round metrics.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

#include "dopp.hpp"
#include "pibt_ac.hpp"
#include "plan.hpp"
#include "snapshot.hpp"

namespace mapfoc {

struct Window {
  Time tau;
  std::vector<int> new_agents;  // revealed this round, emission order
};

inline std::vector<Window> window_stream(const Instance& inst, int per_window_agents) {
  if (per_window_agents < 1) throw usage_error("per_window_agents must be >= 1");
  const size_t n = inst.num_agents();
  std::vector<Window> windows;
  if (n == 0) return windows;

  for (size_t i = 1; i < n; ++i) {
    if (inst.agents[i].earliest_entry < inst.agents[i - 1].earliest_entry)
      throw usage_error("window_stream: agents not sorted by earliest entry time");
    if (inst.agents[i].order != inst.agents[i - 1].order) {
      // orders must occupy contiguous emission ranges
      for (size_t j = i + 1; j < n; ++j)
        if (inst.agents[j].order == inst.agents[i - 1].order)
          throw usage_error("window_stream: order " +
                            inst.orders[static_cast<size_t>(inst.agents[i - 1].order)].name +
                            " is split across the stream");
    }
  }

  Time tau = 0;
  size_t i = 0;
  while (i < n) {
    size_t end = std::min(n, i + static_cast<size_t>(per_window_agents));
    // extend to the order boundary
    while (end < n && inst.agents[end].order == inst.agents[end - 1].order) ++end;
    // extend while the next order's earliest entry is already covered
    for (;;) {
      Time max_tmin = inst.agents[end - 1].earliest_entry;  // nondecreasing stream
      if (end >= n || inst.agents[end].earliest_entry > max_tmin) break;
      int next_order = inst.agents[end].order;
      while (end < n && inst.agents[end].order == next_order) ++end;
    }
    Window w;
    w.tau = tau;
    for (size_t j = i; j < end; ++j) w.new_agents.push_back(inst.agents[j].id);
    windows.push_back(std::move(w));
    tau = std::max(tau + 1, inst.agents[end - 1].earliest_entry + 1);
    i = end;
  }
  return windows;
}

struct ScenarioConfig {
  int rounds = 1;              // r_end; fewer windows = fewer rounds
  int per_window_agents = 100;
  RefineConfig solver;         // variant pibt_ac routes to the baseline
};

struct RoundMetrics {
  int round;        // 1-based
  Time tau;
  size_t visible;
  Time makespan;    // snapshot makespan over visible agents
  Time lower_bound;
  double normalized;
  double avg_utilization;  // over this round's newly planned agents
  int64_t runtime_ms;
};

struct LifelongResult {
  Plan global;
  std::vector<RoundMetrics> rounds;
  Time final_makespan = 0;
};

inline LifelongResult run_lifelong(const Instance& inst, const ScenarioConfig& sc) {
  if (sc.rounds < 1) throw usage_error("rounds must be >= 1");
  std::vector<Window> windows = window_stream(inst, sc.per_window_agents);
  const size_t r_end = std::min<size_t>(static_cast<size_t>(sc.rounds), windows.size());

  LifelongResult out;
  out.global = Plan(&inst);

  // one continuous run for the reactive baseline
  Plan pibt_plan(&inst);
  if (sc.solver.variant == Variant::pibt_ac) pibt_plan = pibt_ac_run(inst, sc.solver.seed);

  std::vector<char> visible(inst.num_agents(), 0);
  std::vector<char> was_visible(inst.num_agents(), 0);
  PrioritySpec carried;
  bool have_carried = false;

  for (size_t r = 0; r < r_end; ++r) {
    const Window& w = windows[r];
    for (int a : w.new_agents) visible[static_cast<size_t>(a)] = 1;

    SnapshotState snap;
    snap.inst = &inst;
    snap.tau = w.tau;
    snap.prev_paths = out.global.paths;
    snap.previously_visible.assign(inst.num_agents(), 0);
    for (size_t a = 0; a < inst.num_agents(); ++a) {
      if (visible[a]) snap.visible_agents.push_back(static_cast<int>(a));
      snap.previously_visible[a] = was_visible[a];
    }
    std::vector<char> order_seen(inst.num_orders(), 0);
    for (int a : snap.visible_agents) order_seen[static_cast<size_t>(inst.agents[static_cast<size_t>(a)].order)] = 1;
    for (size_t o = 0; o < inst.num_orders(); ++o)
      if (order_seen[o]) snap.visible_orders.push_back(static_cast<int>(o));

    auto t0 = std::chrono::steady_clock::now();
    Plan round_plan(&inst);
    Time round_makespan = 0;
    if (sc.solver.variant == Variant::pibt_ac) {
      for (int a : snap.visible_agents) {
        round_plan.paths[static_cast<size_t>(a)] = pibt_plan.paths[static_cast<size_t>(a)];
        round_makespan = std::max(round_makespan,
                                  pibt_plan.paths[static_cast<size_t>(a)]->last_time());
      }
    } else {
      RefineConfig cfg = sc.solver;
      cfg.seed = SplitMix64(sc.solver.seed ^ (0x5851f42d4c957f2dULL * (r + 1))).next();
      SolveResult res = solve_snapshot(snap, have_carried ? &carried : nullptr, cfg);
      round_plan = std::move(res.plan);
      round_makespan = res.makespan;
      carried = std::move(res.precedence.spec);
      have_carried = true;
    }
    auto runtime = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

    // executed prefixes are frozen; finished agents are never re-planned
    Plan prev_view(&inst);
    prev_view.paths = snap.prev_paths;
    if (auto div = check_prefix_consistency(prev_view, round_plan, w.tau))
      throw internal_error("lifelong round " + std::to_string(r + 1) +
                           ": prefix divergence for agent " +
                           inst.agents[static_cast<size_t>(div->agent)].name + " at t=" +
                           std::to_string(div->t));
    require_feasible(round_plan, "lifelong round " + std::to_string(r + 1));

    for (int a : snap.visible_agents)
      out.global.paths[static_cast<size_t>(a)] = round_plan.paths[static_cast<size_t>(a)];
    for (int a : w.new_agents) was_visible[static_cast<size_t>(a)] = 1;

    // lower bound over the visible set
    Time lb = 0;
    for (int a : snap.visible_agents) {
      const AgentSpec& s = inst.agents[static_cast<size_t>(a)];
      auto d = inst.net->reverse_field(s.destination).at(s.entry);
      lb = std::max(lb, s.earliest_entry + *d + static_cast<Time>(inst.service_time));
    }
    // destination utilization attributed to the round that planned the agent
    Plan chunk_plan(&inst);
    for (int a : w.new_agents)
      chunk_plan.paths[static_cast<size_t>(a)] = round_plan.paths[static_cast<size_t>(a)];
    Utilization util = utilization(chunk_plan);

    out.rounds.push_back({static_cast<int>(r + 1), w.tau, snap.visible_agents.size(),
                          round_makespan, lb,
                          static_cast<double>(round_makespan) / static_cast<double>(lb),
                          util.average, runtime});
    out.final_makespan = round_makespan;
  }

  require_feasible(out.global, "lifelong global execution");
  return out;
}

}  // namespace mapfoc
