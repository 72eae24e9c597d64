/*
 * Space-time reservation table: hash set keyed by (vertex, time) for O(1)
 * point lookups plus per-vertex sorted occupied-interval lists for the
 * service-dwell window query.
 */
#pragma once

#include <map>
#include <unordered_set>
#include <vector>

#include "plan.hpp"
#include "types.hpp"

namespace mapfoc {

class ReservationTable {
 public:
  explicit ReservationTable(size_t num_vertices) : intervals_(num_vertices) {}

  bool occupied(Vertex v, Time t) const { return cells_.count(key(v, t)) != 0; }

  // true iff no reservation on v in [a, b]
  bool window_free(Vertex v, Time a, Time b) const {
    const auto& ivs = intervals_[static_cast<size_t>(v)];
    auto it = ivs.upper_bound(b);  // first interval starting after b
    if (it == ivs.begin()) return true;
    --it;                          // last interval starting <= b
    return it->second < a;
  }

  void reserve_cell(Vertex v, Time t) {
    cells_.insert(key(v, t));
    add_interval(v, t, t);
  }

  void reserve_path(const Path& p) {
    Time t = p.entry_time;
    size_t i = 0;
    while (i < p.locations.size()) {
      size_t j = i;
      while (j + 1 < p.locations.size() && p.locations[j + 1] == p.locations[i]) ++j;
      for (size_t s = i; s <= j; ++s) cells_.insert(key(p.locations[i], t + static_cast<Time>(s - i)));
      add_interval(p.locations[i], t, t + static_cast<Time>(j - i));
      t += static_cast<Time>(j - i + 1);
      i = j + 1;
    }
  }

 private:
  static uint64_t key(Vertex v, Time t) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(v)) << 32) | static_cast<uint32_t>(t);
  }

  void add_interval(Vertex v, Time a, Time b) {
    auto& ivs = intervals_[static_cast<size_t>(v)];
    // merge with neighbors touching [a, b]
    auto it = ivs.upper_bound(a);
    if (it != ivs.begin()) {
      auto prev = std::prev(it);
      if (prev->second + 1 >= a) {
        a = prev->first;
        b = std::max(b, prev->second);
        it = ivs.erase(prev);
      }
    }
    while (it != ivs.end() && it->first <= b + 1) {
      b = std::max(b, it->second);
      it = ivs.erase(it);
    }
    ivs[a] = b;
  }

  std::unordered_set<uint64_t> cells_;
  std::vector<std::map<Time, Time>> intervals_;  // vertex -> {start -> end}, disjoint
};

}  // namespace mapfoc
