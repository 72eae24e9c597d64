/*
 * PIBT with admission control: the reactive baseline.
 *
 * Per timestep: (1) admission — an agent outside the network with
 * t >= t_min may occupy its entry only if the cell is free and its order
 * holds (or acquires) the per-destination lock; a lock releases once every
 * agent of the holder order has entered and is within L_buf steps of the
 * destination (arrived or done counts as distance 0). (2) movement — one
 * PIBT round over on-network agents: each undecided agent, in dynamic
 * priority order (priority grows with time since entry), tries its best
 * outgoing move toward the goal by the reverse distance field, recursively
 * pushing lower-priority occupants; failure backtracks to the next-best
 * move or stays. (3) service — arrived agents dwell k steps, then vanish.
 *
 * Lock acquisition among competing orders: smallest min-t_min first, ties
 * by order id. Deterministic for a fixed (instance, seed).
 */
#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "level1.hpp"
#include "plan.hpp"
#include "rng.hpp"
#include "snapshot.hpp"

namespace mapfoc {

struct LivelockError : Error {
  Plan partial;
  LivelockError(std::string msg, Plan p)
      : Error(Error::Kind::limits, std::move(msg)), partial(std::move(p)) {}
};

inline Plan pibt_ac_run(const Instance& inst, uint64_t seed = 0) {
  const Network& net = *inst.net;
  const size_t n = inst.num_agents();
  Plan plan(&inst);
  if (n == 0) return plan;

  enum class St { outside, moving, serving, done };
  struct A {
    St st = St::outside;
    Vertex pos = OUT;
    Time entry = -1;
    Time arrival = -1;
    Time dwell_left = 0;
    std::vector<Vertex> traj;
    double tie = 0.0;
  };
  std::vector<A> ag(n);
  Rng rng(seed);
  for (auto& a : ag) a.tie = static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;

  // per-destination admission locks
  std::vector<int> lock_holder(net.num_vertices(), -1);  // order id or -1
  std::vector<Time> order_min_tmin(inst.num_orders(), 0);
  for (const auto& o : inst.orders) {
    Time m = -1;
    for (int i : o.agent_ids) {
      Time t = inst.agents[static_cast<size_t>(i)].earliest_entry;
      if (m < 0 || t < m) m = t;
    }
    order_min_tmin[static_cast<size_t>(o.id)] = m;
  }

  SnapshotState root = make_root_snapshot(inst);
  Classification root_cls = classify(root);
  const Time step_limit = 10 * std::max<Time>(horizon_bound(root, root_cls), 1);
  const Time k = static_cast<Time>(inst.service_time);

  std::vector<int> occupied_now(net.num_vertices(), -1);
  std::vector<int> occupied_next(net.num_vertices(), -1);
  std::vector<Vertex> next_pos(n, OUT);

  size_t done_count = 0;
  for (Time t = 0; done_count < n; ++t) {
    if (t > step_limit) {
      for (size_t i = 0; i < n; ++i)
        if (!ag[i].traj.empty()) {
          Path p;
          p.agent = static_cast<int>(i);
          p.entry_time = ag[i].entry;
          p.locations = ag[i].traj;
          p.arrival_time = ag[i].arrival;
          plan.paths[i] = std::move(p);
        }
      throw LivelockError("pibt_ac: step limit " + std::to_string(step_limit) +
                              " exceeded (livelock); plan-so-far attached",
                          std::move(plan));
    }

    // --- departures: dwell exhausted at t-1 means the cell frees now ------
    for (size_t i = 0; i < n; ++i) {
      A& a = ag[i];
      if (a.st == St::serving && a.dwell_left == 0) {
        a.st = St::done;
        ++done_count;
        Path p;
        p.agent = static_cast<int>(i);
        p.entry_time = a.entry;
        p.locations = std::move(a.traj);
        p.arrival_time = a.arrival;
        plan.paths[i] = std::move(p);
      }
    }
    if (done_count == n) break;

    // --- lock maintenance -------------------------------------------------
    for (Vertex g : net.destinations) {
      int holder = lock_holder[static_cast<size_t>(g)];
      if (holder < 0) continue;
      const DistField& field = net.reverse_field(g);
      bool releasable = true;
      for (int i : inst.orders[static_cast<size_t>(holder)].agent_ids) {
        const A& a = ag[static_cast<size_t>(i)];
        if (a.st == St::done || a.st == St::serving) continue;
        if (a.st == St::outside) { releasable = false; break; }
        auto d = field.at(a.pos);
        if (!d || *d > net.exit_buffer_len) { releasable = false; break; }
      }
      if (releasable) lock_holder[static_cast<size_t>(g)] = -1;
    }
    // acquisition: smallest min-t_min first, ties by order id
    {
      std::vector<int> waiting_orders;
      for (const auto& o : inst.orders) {
        if (lock_holder[static_cast<size_t>(o.destination)] >= 0) continue;
        for (int i : o.agent_ids) {
          const A& a = ag[static_cast<size_t>(i)];
          if (a.st == St::outside && t >= inst.agents[static_cast<size_t>(i)].earliest_entry) {
            waiting_orders.push_back(o.id);
            break;
          }
        }
      }
      std::sort(waiting_orders.begin(), waiting_orders.end(), [&](int x, int y) {
        Time tx = order_min_tmin[static_cast<size_t>(x)], ty = order_min_tmin[static_cast<size_t>(y)];
        if (tx != ty) return tx < ty;
        return x < y;
      });
      for (int o : waiting_orders) {
        Vertex g = inst.orders[static_cast<size_t>(o)].destination;
        if (lock_holder[static_cast<size_t>(g)] < 0) lock_holder[static_cast<size_t>(g)] = o;
      }
    }

    // --- admission (before movement; entering agents are obstacles) ------
    std::fill(occupied_next.begin(), occupied_next.end(), -1);
    std::fill(next_pos.begin(), next_pos.end(), OUT);
    std::vector<int> entering;
    {
      std::vector<int> eligible;
      for (size_t i = 0; i < n; ++i) {
        const AgentSpec& spec = inst.agents[i];
        if (ag[i].st == St::outside && t >= spec.earliest_entry &&
            lock_holder[static_cast<size_t>(spec.destination)] == spec.order)
          eligible.push_back(static_cast<int>(i));
      }
      std::sort(eligible.begin(), eligible.end(), [&](int x, int y) {
        Time tx = inst.agents[static_cast<size_t>(x)].earliest_entry;
        Time ty = inst.agents[static_cast<size_t>(y)].earliest_entry;
        if (tx != ty) return tx < ty;
        return x < y;
      });
      for (int i : eligible) {
        Vertex s = inst.agents[static_cast<size_t>(i)].entry;
        if (occupied_now[static_cast<size_t>(s)] < 0 && occupied_next[static_cast<size_t>(s)] < 0) {
          occupied_next[static_cast<size_t>(s)] = i;
          next_pos[static_cast<size_t>(i)] = s;
          entering.push_back(i);
        }
      }
    }

    // --- movement: one PIBT round over on-network agents ------------------
    std::vector<int> movers;
    for (size_t i = 0; i < n; ++i) {
      if (ag[i].st == St::serving) {  // immovable during service
        occupied_next[static_cast<size_t>(ag[i].pos)] = static_cast<int>(i);
        next_pos[i] = ag[i].pos;
      } else if (ag[i].st == St::moving) {
        movers.push_back(static_cast<int>(i));
      }
    }
    std::sort(movers.begin(), movers.end(), [&](int x, int y) {
      Time ex = t - ag[static_cast<size_t>(x)].entry, ey = t - ag[static_cast<size_t>(y)].entry;
      if (ex != ey) return ex > ey;
      if (ag[static_cast<size_t>(x)].tie != ag[static_cast<size_t>(y)].tie)
        return ag[static_cast<size_t>(x)].tie > ag[static_cast<size_t>(y)].tie;
      return x < y;
    });

    std::function<bool(int, int)> func_pibt = [&](int i, int pusher) -> bool {
      const AgentSpec& spec = inst.agents[static_cast<size_t>(i)];
      const DistField& field = net.reverse_field(spec.destination);
      Vertex v = ag[static_cast<size_t>(i)].pos;
      std::vector<Vertex> cand = net.out[static_cast<size_t>(v)];
      cand.push_back(v);
      std::sort(cand.begin(), cand.end(), [&](Vertex a, Vertex b) {
        auto da = field.at(a), db = field.at(b);
        int32_t xa = da ? *da : INT32_MAX, xb = db ? *db : INT32_MAX;
        if (xa != xb) return xa < xb;
        return a < b;
      });
      for (Vertex u : cand) {
        if (occupied_next[static_cast<size_t>(u)] >= 0) continue;
        if (pusher >= 0 && u == ag[static_cast<size_t>(pusher)].pos) continue;
        occupied_next[static_cast<size_t>(u)] = i;
        next_pos[static_cast<size_t>(i)] = u;
        int k2 = occupied_now[static_cast<size_t>(u)];
        if (k2 >= 0 && k2 != i && next_pos[static_cast<size_t>(k2)] == OUT &&
            ag[static_cast<size_t>(k2)].st == St::moving) {
          if (!func_pibt(k2, i)) {
            // k2 reserved its own cell while failing; try the next candidate
            if (occupied_next[static_cast<size_t>(u)] == i) {
              occupied_next[static_cast<size_t>(u)] = -1;
              next_pos[static_cast<size_t>(i)] = OUT;
            }
            continue;
          }
        }
        return true;
      }
      occupied_next[static_cast<size_t>(v)] = i;
      next_pos[static_cast<size_t>(i)] = v;
      return false;
    };
    for (int i : movers)
      if (next_pos[static_cast<size_t>(i)] == OUT) func_pibt(i, -1);

    // --- commit -----------------------------------------------------------
    std::fill(occupied_now.begin(), occupied_now.end(), -1);
    for (size_t i = 0; i < n; ++i) {
      A& a = ag[i];
      switch (a.st) {
        case St::outside:
          if (next_pos[i] != OUT) {  // admitted this step
            a.st = St::moving;
            a.pos = next_pos[i];
            a.entry = t;
            a.traj.push_back(a.pos);
            if (a.pos == inst.agents[i].destination)
              throw internal_error("pibt_ac: entry equals destination");
            occupied_now[static_cast<size_t>(a.pos)] = static_cast<int>(i);
          }
          break;
        case St::moving:
          a.pos = next_pos[i];
          a.traj.push_back(a.pos);
          occupied_now[static_cast<size_t>(a.pos)] = static_cast<int>(i);
          if (a.pos == inst.agents[i].destination) {
            a.st = St::serving;
            a.arrival = t;
            a.dwell_left = k;
          }
          break;
        case St::serving:
          a.dwell_left -= 1;
          a.traj.push_back(a.pos);
          occupied_now[static_cast<size_t>(a.pos)] = static_cast<int>(i);
          break;
        case St::done:
          break;
      }
    }
    (void)entering;
  }
  return plan;
}

}  // namespace mapfoc
