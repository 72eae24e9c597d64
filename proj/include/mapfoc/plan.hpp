/*
 * Time-indexed paths, the feasibility validators, and metrics.
 *
 * A Path stores only the occupied interval [t_i, T_i + k]; locations
 * outside it are implicitly OUT. Validity per agent: starts at its entry
 * at or after t_i^min, each step stays or follows a directed edge, the
 * first visit to the destination is the arrival, and the agent dwells
 * there exactly k steps before disappearing.
 *
 * Swap conflicts are not checked: on a one-way network without
 * antiparallel edges they cannot occur, so collision checking is
 * vertex-occupancy only.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "instance.hpp"
#include "types.hpp"

namespace mapfoc {

struct Path {
  int agent = -1;
  Time entry_time = 0;               // t_i
  std::vector<Vertex> locations;     // [t_i .. T_i + k]
  Time arrival_time = -1;            // T_i

  Vertex at(Time t) const {
    if (t < entry_time) return OUT;
    size_t idx = static_cast<size_t>(t - entry_time);
    if (idx >= locations.size()) return OUT;
    return locations[idx];
  }
  Time last_time() const { return entry_time + static_cast<Time>(locations.size()) - 1; }
  bool empty() const { return locations.empty(); }
};

struct Plan {
  const Instance* inst = nullptr;
  std::vector<std::optional<Path>> paths;  // by agent id

  explicit Plan(const Instance* instance = nullptr)
      : inst(instance), paths(instance ? instance->num_agents() : 0) {}

  bool complete() const {
    for (const auto& p : paths)
      if (!p) return false;
    return true;
  }
  Time horizon() const {
    Time h = 0;
    for (const auto& p : paths)
      if (p) h = std::max(h, p->last_time());
    return h;
  }

  nlohmann::json to_json() const;
  std::string dump() const { return to_json().dump(2) + "\n"; }
  static Plan from_json(const nlohmann::json& j, const Instance& inst);
  static Plan load_file(const std::string& path, const Instance& inst);
};

// ---------------------------------------------------------------------------
// validators

struct PathViolation {
  int agent;
  std::string message;
};

inline std::optional<PathViolation> check_valid(const Plan& plan, int agent) {
  const Instance& inst = *plan.inst;
  const AgentSpec& spec = inst.agents[static_cast<size_t>(agent)];
  const auto& maybe = plan.paths[static_cast<size_t>(agent)];
  if (!maybe) return PathViolation{agent, "agent has no path"};
  const Path& p = *maybe;
  auto fail = [&](const std::string& m) { return PathViolation{agent, m}; };

  if (p.locations.empty()) return fail("empty path");
  if (p.entry_time < spec.earliest_entry)
    return fail("entry before earliest entry time (t=" + std::to_string(p.entry_time) + " < " +
                std::to_string(spec.earliest_entry) + ")");
  if (p.locations.front() != spec.entry)
    return fail("path does not start at entry '" + inst.net->name(spec.entry) + "'");

  const Network& net = *inst.net;
  Time first_goal = -1;
  for (size_t i = 0; i < p.locations.size(); ++i) {
    Vertex v = p.locations[i];
    if (v < 0 || static_cast<size_t>(v) >= net.num_vertices())
      return fail("location out of range at step " + std::to_string(i));
    if (i > 0) {
      Vertex u = p.locations[i - 1];
      if (u != v) {
        const auto& nbrs = net.out[static_cast<size_t>(u)];
        if (!std::binary_search(nbrs.begin(), nbrs.end(), v))
          return fail("non-edge move '" + net.name(u) + "' -> '" + net.name(v) + "' at t=" +
                      std::to_string(p.entry_time + static_cast<Time>(i)));
      }
    }
    if (v == spec.destination && first_goal < 0)
      first_goal = p.entry_time + static_cast<Time>(i);
  }
  if (first_goal < 0) return fail("path never reaches destination");
  if (p.arrival_time != first_goal)
    return fail("stored arrival time " + std::to_string(p.arrival_time) +
                " != first destination visit " + std::to_string(first_goal));

  // service dwell of exactly k steps, then implicit disappearance
  Time expect_last = first_goal + static_cast<Time>(inst.service_time);
  if (p.last_time() != expect_last)
    return fail(p.last_time() < expect_last ? "service dwell shorter than k"
                                            : "path continues past service dwell");
  for (Time t = first_goal; t <= expect_last; ++t)
    if (p.at(t) != spec.destination) return fail("service dwell interrupted");
  return std::nullopt;
}

inline std::vector<PathViolation> check_all_valid(const Plan& plan) {
  std::vector<PathViolation> out;
  for (size_t a = 0; a < plan.paths.size(); ++a) {
    if (!plan.paths[a]) continue;
    if (auto v = check_valid(plan, static_cast<int>(a))) out.push_back(*v);
  }
  return out;
}

struct Collision {
  Time t;
  Vertex v;
  int agent_a, agent_b;
};

inline std::vector<Collision> check_collisions(const Plan& plan) {
  std::vector<Collision> out;
  std::unordered_map<uint64_t, int> cell;  // (v,t) -> agent
  cell.reserve(1024);
  for (size_t a = 0; a < plan.paths.size(); ++a) {
    if (!plan.paths[a]) continue;
    const Path& p = *plan.paths[a];
    for (size_t i = 0; i < p.locations.size(); ++i) {
      Time t = p.entry_time + static_cast<Time>(i);
      uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(p.locations[i])) << 32) |
                     static_cast<uint32_t>(t);
      auto [it, inserted] = cell.emplace(key, static_cast<int>(a));
      if (!inserted) out.push_back({t, p.locations[i], it->second, static_cast<int>(a)});
    }
  }
  return out;
}

struct ContiguityViolation {
  Vertex destination;
  int agent_p, agent_q, agent_r;  // arrival positions p < q < r with o_p == o_r != o_q
};

inline std::vector<ContiguityViolation> check_order_contiguity(const Plan& plan) {
  const Instance& inst = *plan.inst;
  std::map<Vertex, std::vector<std::pair<Time, int>>> arrivals;
  for (size_t a = 0; a < plan.paths.size(); ++a) {
    if (!plan.paths[a]) continue;
    arrivals[inst.agents[a].destination].push_back({plan.paths[a]->arrival_time,
                                                    static_cast<int>(a)});
  }
  std::vector<ContiguityViolation> out;
  for (auto& [g, seq] : arrivals) {
    std::sort(seq.begin(), seq.end());
    for (size_t i = 1; i < seq.size(); ++i)
      if (seq[i].first == seq[i - 1].first)
        throw internal_error("two arrivals at destination '" + inst.net->name(g) +
                             "' share timestep " + std::to_string(seq[i].first) +
                             " (upstream collision bug)");
    // scan for o_p == o_r != o_q: an order reappearing with a gap implies
    // the arrival just before the gap's end belongs to another order
    std::unordered_map<int, size_t> last_pos_of_order;
    for (size_t r = 0; r < seq.size(); ++r) {
      int ord = inst.agents[static_cast<size_t>(seq[r].second)].order;
      auto it = last_pos_of_order.find(ord);
      if (it != last_pos_of_order.end() && it->second + 1 < r)
        out.push_back({g, seq[it->second].second, seq[r - 1].second, seq[r].second});
      last_pos_of_order[ord] = r;
    }
  }
  return out;
}

struct PrefixDivergence {
  int agent;
  Time t;
};

// pi^r(t) == pi^{r-1}(t) for every previously planned agent and t <= tau
inline std::optional<PrefixDivergence> check_prefix_consistency(const Plan& prev,
                                                                const Plan& next, Time tau) {
  for (size_t a = 0; a < prev.paths.size(); ++a) {
    if (!prev.paths[a]) continue;  // not in A^{r-1}
    if (a >= next.paths.size() || !next.paths[a]) return PrefixDivergence{static_cast<int>(a), 0};
    const Path& p = *prev.paths[a];
    const Path& n = *next.paths[a];
    Time lo = std::min(p.entry_time, n.entry_time);
    for (Time t = std::min(lo, tau); t <= tau; ++t)
      if (p.at(t) != n.at(t)) return PrefixDivergence{static_cast<int>(a), t};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// metrics

inline Time makespan(const Plan& plan) {
  if (!plan.complete()) throw usage_error("makespan requires all agents planned");
  Time m = 0;
  for (const auto& p : plan.paths) m = std::max(m, p->last_time());
  return m;  // last_time == T_i + k for valid paths
}

// M_LB = max_i (t_i^min + dist(s_i, g_i) + k)
inline Time lower_bound(const Instance& inst) {
  Time lb = 0;
  for (const auto& a : inst.agents) {
    auto d = inst.net->reverse_field(a.destination).at(a.entry);
    if (!d) throw usage_error("lower_bound: unreachable goal for agent '" + a.name + "'");
    lb = std::max(lb, a.earliest_entry + *d + static_cast<Time>(inst.service_time));
  }
  return lb;
}

struct Utilization {
  std::map<Vertex, double> per_destination;  // U(g), destinations with >= 1 arrival
  std::vector<Vertex> absent;                // destinations never occupied
  double average = 0.0;                      // unweighted mean over measured
};

inline Utilization utilization(const Plan& plan) {
  const Instance& inst = *plan.inst;
  // x_g(t) = 1 iff some agent occupies g at t
  std::map<Vertex, std::map<Time, char>> occupied;
  for (const auto& mp : plan.paths) {
    if (!mp) continue;
    const Path& p = *mp;
    Vertex g = inst.agents[static_cast<size_t>(p.agent)].destination;
    for (size_t i = 0; i < p.locations.size(); ++i)
      if (p.locations[i] == g) occupied[g][p.entry_time + static_cast<Time>(i)] = 1;
  }
  Utilization u;
  double sum = 0.0;
  for (Vertex g : inst.net->destinations) {
    auto it = occupied.find(g);
    if (it == occupied.end() || it->second.empty()) {
      u.absent.push_back(g);
      continue;
    }
    Time ta = it->second.begin()->first;
    Time tb = it->second.rbegin()->first;
    double val = 100.0 * static_cast<double>(it->second.size()) /
                 static_cast<double>(tb - ta + 1);
    u.per_destination[g] = val;
    sum += val;
  }
  if (!u.per_destination.empty()) u.average = sum / static_cast<double>(u.per_destination.size());
  return u;
}

// relative makespan improvement (%); negative means a regression
inline double improvement(double m_vanilla, double m) {
  if (m_vanilla == 0.0) throw usage_error("improvement: division by zero (vanilla makespan 0)");
  return 100.0 * (m_vanilla - m) / m_vanilla;
}

// ---------------------------------------------------------------------------
// io

inline nlohmann::json Plan::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& mp : paths) {
    if (!mp) continue;
    const Path& p = *mp;
    nlohmann::json pj;
    pj["id"] = inst->agents[static_cast<size_t>(p.agent)].name;
    pj["entry_time"] = p.entry_time;
    nlohmann::json locs = nlohmann::json::array();
    for (Vertex v : p.locations) locs.push_back(inst->net->name(v));
    pj["locations"] = std::move(locs);
    arr.push_back(std::move(pj));
  }
  nlohmann::json j;
  j["agent_paths"] = std::move(arr);
  return j;
}

inline Plan Plan::from_json(const nlohmann::json& j, const Instance& inst) {
  Plan plan(&inst);
  std::unordered_map<std::string, int> by_name;
  for (const auto& a : inst.agents) by_name[a.name] = a.id;
  try {
    for (const auto& pj : j.at("agent_paths")) {
      auto it = by_name.find(pj.at("id").get<std::string>());
      if (it == by_name.end())
        throw parse_error("plan file: unknown agent '" + pj.at("id").get<std::string>() + "'");
      Path p;
      p.agent = it->second;
      p.entry_time = pj.at("entry_time").get<Time>();
      for (const auto& vj : pj.at("locations"))
        p.locations.push_back(inst.net->index(vj.get<std::string>()));
      Vertex g = inst.agents[static_cast<size_t>(p.agent)].destination;
      p.arrival_time = -1;
      for (size_t i = 0; i < p.locations.size(); ++i)
        if (p.locations[i] == g) {
          p.arrival_time = p.entry_time + static_cast<Time>(i);
          break;
        }
      plan.paths[static_cast<size_t>(p.agent)] = std::move(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("plan file: ") + e.what());
  }
  return plan;
}

inline Plan Plan::load_file(const std::string& path, const Instance& inst) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open plan file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("plan file: ") + e.what());
  }
  return from_json(j, inst);
}

// convenience: run the validity, collision, and contiguity checks; throws
// with a description on the first failure. Used as a post-solve assertion.
inline void require_feasible(const Plan& plan, const std::string& context) {
  auto bad = check_all_valid(plan);
  if (!bad.empty())
    throw internal_error(context + ": invalid path for agent " +
                         plan.inst->agents[static_cast<size_t>(bad[0].agent)].name + ": " +
                         bad[0].message);
  auto col = check_collisions(plan);
  if (!col.empty())
    throw internal_error(context + ": collision at t=" + std::to_string(col[0].t) + " vertex '" +
                         plan.inst->net->name(col[0].v) + "'");
  auto oc = check_order_contiguity(plan);
  if (!oc.empty())
    throw internal_error(context + ": order-contiguity violation at destination '" +
                         plan.inst->net->name(oc[0].destination) + "'");
}

}  // namespace mapfoc
