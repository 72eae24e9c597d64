/*
 * Agents, orders, instances, validation, and the stochastic order-stream
 * generator.
 *
 * Agents are emitted in order blocks: each order draws its size uniformly
 * from {1..order_size_max}, receives the destination with the minimum
 * cumulative assigned-agent count, and its agents get earliest entry times
 * at a fixed arrival rate (lambda agents per timestep, in emission order).
 * A fixed seed reproduces the instance byte for byte.
 */
#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "network.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace mapfoc {

struct AgentSpec {
  int id = -1;      // dense index == emission position
  int order = -1;   // dense order index
  Vertex entry = -1;
  Vertex destination = -1;
  Time earliest_entry = 0;  // t_i^min
  std::string name;
};

struct Order {
  int id = -1;  // dense index
  Vertex destination = -1;
  std::vector<int> agent_ids;
  std::string name;
};

struct Instance {
  const Network* net = nullptr;
  std::vector<AgentSpec> agents;  // emission sequence; agents[i].id == i
  std::vector<Order> orders;      // orders[o].id == o
  int service_time = 1;           // k

  size_t num_agents() const { return agents.size(); }
  size_t num_orders() const { return orders.size(); }

  nlohmann::json to_json() const;
  std::string dump() const { return to_json().dump(2) + "\n"; }
  static Instance from_json(const nlohmann::json& j, const Network& net);
  static Instance load_file(const std::string& path, const Network& net);
};

struct GenConfig {
  int arrival_rate = 1;    // lambda, agents per timestep
  int total_agents = 1;
  uint64_t seed = 0;
  int order_size_max = 0;  // 0 = use network.exit_buffer_len
  int service_time = 1;    // k carried into the produced instance
};

struct Violation {
  std::string subject;  // agent/order name
  std::string message;
};

// Returns every violation found; an empty list means the instance is valid.
inline std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  const Network& net = *inst.net;
  if (inst.service_time < 1)
    out.push_back({"instance", "service_time must be >= 1"});

  std::unordered_set<std::string> agent_names, order_names;
  for (const auto& o : inst.orders) {
    if (!order_names.insert(o.name).second)
      out.push_back({o.name, "duplicate order id"});
    if (o.agent_ids.empty()) out.push_back({o.name, "order has no agents"});
    std::unordered_set<int> seen;
    for (int a : o.agent_ids) {
      if (a < 0 || static_cast<size_t>(a) >= inst.agents.size()) {
        out.push_back({o.name, "order references unknown agent"});
        continue;
      }
      if (!seen.insert(a).second) out.push_back({o.name, "duplicate agent in order"});
      if (inst.agents[static_cast<size_t>(a)].order != o.id)
        out.push_back({o.name, "agent/order cross-reference mismatch"});
    }
  }
  for (const auto& a : inst.agents) {
    if (!agent_names.insert(a.name).second)
      out.push_back({a.name, "duplicate agent id"});
    if (a.order < 0 || static_cast<size_t>(a.order) >= inst.orders.size()) {
      out.push_back({a.name, "agent references unknown order"});
      continue;
    }
    const Order& o = inst.orders[static_cast<size_t>(a.order)];
    if (a.destination != o.destination)
      out.push_back({a.name, "order/destination mismatch: agent destination '" +
                                 net.name(a.destination) + "' != d(" + o.name + ") = '" +
                                 net.name(o.destination) + "'"});
    if (!net.is_entry[static_cast<size_t>(a.entry)])
      out.push_back({a.name, "entry '" + net.name(a.entry) + "' is not in the entry set"});
    if (!net.is_destination[static_cast<size_t>(a.destination)])
      out.push_back({a.name, "destination '" + net.name(a.destination) +
                                 "' is not in the destination set"});
    else if (!net.reverse_field(a.destination).reachable(a.entry))
      out.push_back({a.name, "unreachable: no directed path '" + net.name(a.entry) + "' -> '" +
                                 net.name(a.destination) + "'"});
    if (a.earliest_entry < 0) out.push_back({a.name, "negative earliest entry time"});
  }
  return out;
}

inline Instance generate_stream(const Network& net, const GenConfig& cfg) {
  if (cfg.arrival_rate < 1) throw usage_error("arrival_rate must be >= 1");
  if (cfg.total_agents < 1) throw usage_error("total_agents must be >= 1");
  if (cfg.service_time < 1) throw usage_error("service_time must be >= 1");
  const int size_max = cfg.order_size_max > 0 ? cfg.order_size_max : net.exit_buffer_len;

  Instance inst;
  inst.net = &net;
  inst.service_time = cfg.service_time;
  Rng rng(cfg.seed);

  // balanced destination assignment: minimum cumulative count, ties by
  // lowest vertex index
  std::vector<int64_t> dest_count(net.destinations.size(), 0);
  auto pick_destination = [&]() {
    size_t best = 0;
    for (size_t i = 1; i < dest_count.size(); ++i)
      if (dest_count[i] < dest_count[best]) best = i;
    return best;
  };

  // entries able to reach each destination, so generated instances always
  // validate even on maps that are not fully connected
  std::vector<std::vector<Vertex>> feasible_entries(net.destinations.size());
  for (size_t d = 0; d < net.destinations.size(); ++d) {
    const DistField& field = net.reverse_field(net.destinations[d]);
    for (Vertex s : net.entries)
      if (field.reachable(s)) feasible_entries[d].push_back(s);
    if (feasible_entries[d].empty())
      throw invariant_error("no entry can reach destination '" +
                            net.name(net.destinations[d]) + "'");
  }

  int emitted = 0;
  while (emitted < cfg.total_agents) {
    int lo = static_cast<int>(rng.between(1, size_max));
    lo = std::min(lo, cfg.total_agents - emitted);  // final order may be truncated
    size_t dslot = pick_destination();
    Vertex dest = net.destinations[dslot];
    dest_count[dslot] += lo;

    Order order;
    order.id = static_cast<int>(inst.orders.size());
    order.destination = dest;
    order.name = "o" + std::to_string(order.id);
    for (int j = 0; j < lo; ++j) {
      AgentSpec a;
      a.id = emitted;
      a.order = order.id;
      a.destination = dest;
      const auto& pool = feasible_entries[dslot];
      a.entry = pool[rng.below(pool.size())];
      a.earliest_entry = static_cast<Time>(emitted / cfg.arrival_rate);
      a.name = "a" + std::to_string(a.id);
      order.agent_ids.push_back(a.id);
      inst.agents.push_back(std::move(a));
      ++emitted;
    }
    inst.orders.push_back(std::move(order));
  }
  return inst;
}

inline nlohmann::json Instance::to_json() const {
  nlohmann::json j;
  j["service_time"] = service_time;
  nlohmann::json orders_j = nlohmann::json::array();
  for (const auto& o : orders) {
    nlohmann::json oj;
    oj["id"] = o.name;
    oj["destination"] = net->name(o.destination);
    nlohmann::json agents_j = nlohmann::json::array();
    for (int a : o.agent_ids) {
      const AgentSpec& s = agents[static_cast<size_t>(a)];
      agents_j.push_back({{"id", s.name},
                          {"entry", net->name(s.entry)},
                          {"t_min", s.earliest_entry}});
    }
    oj["agents"] = std::move(agents_j);
    orders_j.push_back(std::move(oj));
  }
  j["orders"] = std::move(orders_j);
  return j;
}

inline Instance Instance::from_json(const nlohmann::json& j, const Network& net) {
  Instance inst;
  inst.net = &net;
  try {
    if (!j.contains("service_time"))
      throw parse_error("instance file: missing field 'service_time'");
    inst.service_time = j.at("service_time").get<int>();
    if (!j.contains("orders")) throw parse_error("instance file: missing field 'orders'");
    for (const auto& oj : j.at("orders")) {
      Order o;
      o.id = static_cast<int>(inst.orders.size());
      o.name = oj.at("id").get<std::string>();
      o.destination = net.index(oj.at("destination").get<std::string>());
      for (const auto& aj : oj.at("agents")) {
        AgentSpec a;
        a.id = static_cast<int>(inst.agents.size());
        a.order = o.id;
        a.name = aj.at("id").get<std::string>();
        a.entry = net.index(aj.at("entry").get<std::string>());
        a.destination = o.destination;
        a.earliest_entry = aj.at("t_min").get<Time>();
        o.agent_ids.push_back(a.id);
        inst.agents.push_back(std::move(a));
      }
      inst.orders.push_back(std::move(o));
    }
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("instance file: ") + e.what());
  }
  return inst;
}

inline Instance Instance::load_file(const std::string& path, const Network& net) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("instance file: ") + e.what());
  }
  return from_json(j, net);
}

}  // namespace mapfoc
