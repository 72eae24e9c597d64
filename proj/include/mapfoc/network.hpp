/*
 * Directed conveyor-network model.
 *
 * Vertices are opaque string ids in files and dense indices in memory.
 * Every vertex is a unit-capacity cell; edges are one-way. Entry and
 * destination subsets are disjoint. Reverse distance fields (shortest
 * travel time to a destination) are precomputed for every destination at
 * construction; the Network is immutable afterwards and safe to share
 * across threads.
 */
#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "types.hpp"

namespace mapfoc {

// distance-to-goal field; unreachable is a distinguished value, never a
// plain integer that could leak into arithmetic
class DistField {
 public:
  DistField() = default;
  explicit DistField(std::vector<int32_t> raw) : raw_(std::move(raw)) {}
  std::optional<int32_t> at(Vertex v) const {
    int32_t d = raw_[static_cast<size_t>(v)];
    if (d < 0) return std::nullopt;
    return d;
  }
  bool reachable(Vertex v) const { return raw_[static_cast<size_t>(v)] >= 0; }
  size_t size() const { return raw_.size(); }

 private:
  std::vector<int32_t> raw_;  // -1 = unreachable
};

struct Network {
  std::vector<std::string> names;                    // index -> id, lexicographic
  std::unordered_map<std::string, Vertex> index_of;  // id -> index
  std::vector<std::vector<Vertex>> out;              // forward adjacency, sorted
  std::vector<std::vector<Vertex>> in;               // reverse adjacency, sorted
  std::vector<Vertex> entries;                       // sorted indices
  std::vector<Vertex> destinations;                  // sorted indices
  std::vector<char> is_entry;
  std::vector<char> is_destination;
  int exit_buffer_len = 1;  // L_buf, a scalar parameter (generator + PIBT-AC)
  size_t edge_count = 0;

  size_t num_vertices() const { return names.size(); }
  int diameter_bound() const { return static_cast<int>(num_vertices()) - 1; }  // D = |V|-1

  Vertex index(const std::string& id) const {
    auto it = index_of.find(id);
    if (it == index_of.end()) throw usage_error("unknown vertex id '" + id + "'");
    return it->second;
  }

  const std::string& name(Vertex v) const { return names[static_cast<size_t>(v)]; }

  // shortest travel time in edge steps, nullopt if no directed path
  std::optional<int32_t> travel_time(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    if (is_destination[static_cast<size_t>(v)]) return reverse_field(v).at(u);
    int32_t d = bfs_forward(u)[static_cast<size_t>(v)];
    if (d < 0) return std::nullopt;
    return d;
  }

  // distance of every vertex to destination g; precomputed and cached
  const DistField& reverse_field(Vertex g) const {
    check_vertex(g);
    if (!is_destination[static_cast<size_t>(g)])
      throw usage_error("vertex '" + name(g) + "' is not a destination");
    return rev_fields_[static_cast<size_t>(rev_slot_[static_cast<size_t>(g)])];
  }

  std::vector<int32_t> bfs_forward(Vertex src) const { return bfs(src, out); }

  static Network from_json(const nlohmann::json& j);
  static Network load_string(const std::string& text);
  static Network load_file(const std::string& path);
  nlohmann::json to_json() const;  // canonical: sorted vertices/edges
  std::string dump() const { return to_json().dump(2) + "\n"; }

 private:
  std::vector<DistField> rev_fields_;  // one per destination
  std::vector<int32_t> rev_slot_;      // vertex -> slot in rev_fields_, -1 otherwise

  void check_vertex(Vertex v) const {
    if (v < 0 || static_cast<size_t>(v) >= names.size())
      throw usage_error("vertex index out of range: " + std::to_string(v));
  }

  std::vector<int32_t> bfs(Vertex src, const std::vector<std::vector<Vertex>>& adj) const {
    std::vector<int32_t> dist(names.size(), -1);
    std::deque<Vertex> q;
    dist[static_cast<size_t>(src)] = 0;
    q.push_back(src);
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop_front();
      for (Vertex w : adj[static_cast<size_t>(u)]) {
        if (dist[static_cast<size_t>(w)] < 0) {
          dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(u)] + 1;
          q.push_back(w);
        }
      }
    }
    return dist;
  }

  friend Network build_network(std::vector<std::string> vertex_ids,
                               std::vector<std::pair<std::string, std::string>> edges,
                               std::vector<std::string> entry_ids,
                               std::vector<std::string> destination_ids, int exit_buffer_len);
};

// validates all invariants and produces the canonical in-memory form
inline Network build_network(std::vector<std::string> vertex_ids,
                             std::vector<std::pair<std::string, std::string>> edges,
                             std::vector<std::string> entry_ids,
                             std::vector<std::string> destination_ids, int exit_buffer_len) {
  Network net;
  std::sort(vertex_ids.begin(), vertex_ids.end());
  for (size_t i = 1; i < vertex_ids.size(); ++i)
    if (vertex_ids[i] == vertex_ids[i - 1])
      throw invariant_error("duplicate vertex id '" + vertex_ids[i] + "'");
  if (vertex_ids.empty()) throw invariant_error("map has no vertices");

  net.names = std::move(vertex_ids);
  for (size_t i = 0; i < net.names.size(); ++i)
    net.index_of.emplace(net.names[i], static_cast<Vertex>(i));

  const size_t n = net.names.size();
  net.out.assign(n, {});
  net.in.assign(n, {});
  net.is_entry.assign(n, 0);
  net.is_destination.assign(n, 0);

  auto idx = [&](const std::string& id, const char* what) {
    auto it = net.index_of.find(id);
    if (it == net.index_of.end())
      throw invariant_error(std::string(what) + " '" + id + "' is not a declared vertex");
    return it->second;
  };

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& [a, b] : edges) {
    Vertex u = idx(a, "edge endpoint");
    Vertex v = idx(b, "edge endpoint");
    if (u == v) throw invariant_error("self-loop at '" + a + "'");
    net.out[static_cast<size_t>(u)].push_back(v);
    net.in[static_cast<size_t>(v)].push_back(u);
  }
  net.edge_count = edges.size();
  for (auto& nbrs : net.out) std::sort(nbrs.begin(), nbrs.end());
  for (auto& nbrs : net.in) std::sort(nbrs.begin(), nbrs.end());

  if (entry_ids.empty()) throw invariant_error("entries must be nonempty");
  if (destination_ids.empty()) throw invariant_error("destinations must be nonempty");
  for (const auto& id : entry_ids) {
    Vertex v = idx(id, "entry");
    if (net.is_entry[static_cast<size_t>(v)]) throw invariant_error("duplicate entry '" + id + "'");
    net.is_entry[static_cast<size_t>(v)] = 1;
    net.entries.push_back(v);
  }
  for (const auto& id : destination_ids) {
    Vertex v = idx(id, "destination");
    if (net.is_entry[static_cast<size_t>(v)])
      throw invariant_error("entry/destination overlap: '" + id + "'");
    if (net.is_destination[static_cast<size_t>(v)])
      throw invariant_error("duplicate destination '" + id + "'");
    net.is_destination[static_cast<size_t>(v)] = 1;
    net.destinations.push_back(v);
  }
  std::sort(net.entries.begin(), net.entries.end());
  std::sort(net.destinations.begin(), net.destinations.end());

  if (exit_buffer_len < 1) throw invariant_error("exit_buffer_len must be >= 1");
  net.exit_buffer_len = exit_buffer_len;

  net.rev_slot_.assign(n, -1);
  for (size_t s = 0; s < net.destinations.size(); ++s) {
    Vertex g = net.destinations[s];
    net.rev_slot_[static_cast<size_t>(g)] = static_cast<int32_t>(s);
    net.rev_fields_.push_back(DistField(net.bfs(g, net.in)));
  }
  return net;
}

inline Network Network::from_json(const nlohmann::json& j) {
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw parse_error(std::string("map file: missing field '") + key + "'");
    return j.at(key);
  };
  try {
    std::vector<std::string> vertices = need("vertices").get<std::vector<std::string>>();
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : need("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw parse_error("map file: each edge must be a [u, v] pair");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    std::vector<std::string> entries = need("entries").get<std::vector<std::string>>();
    std::vector<std::string> destinations = need("destinations").get<std::vector<std::string>>();
    int lbuf = need("exit_buffer_len").get<int>();
    return build_network(std::move(vertices), std::move(edges), std::move(entries),
                         std::move(destinations), lbuf);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("map file: ") + e.what());
  }
}

inline Network Network::load_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("map file: ") + e.what());
  }
  return from_json(j);
}

inline Network Network::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open map file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_string(ss.str());
}

inline nlohmann::json Network::to_json() const {
  nlohmann::json j;
  j["vertices"] = names;  // already canonical (sorted, deduped)
  nlohmann::json edges = nlohmann::json::array();
  for (size_t u = 0; u < out.size(); ++u)
    for (Vertex v : out[u]) edges.push_back({names[u], names[static_cast<size_t>(v)]});
  // adjacency is sorted by index == lexicographic by name
  j["edges"] = std::move(edges);
  nlohmann::json ent = nlohmann::json::array(), dst = nlohmann::json::array();
  for (Vertex v : entries) ent.push_back(names[static_cast<size_t>(v)]);
  for (Vertex v : destinations) dst.push_back(names[static_cast<size_t>(v)]);
  j["entries"] = std::move(ent);
  j["destinations"] = std::move(dst);
  j["exit_buffer_len"] = exit_buffer_len;
  return j;
}

}  // namespace mapfoc
