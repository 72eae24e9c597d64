/*
 * Neighborhood-search candidate generation.
 *
 * Level 3 permutes a contiguous window of the pending-order chain; the
 * active-order prefix and every inherited constraint stay untouched, and
 * each candidate's agent priorities are rebuilt deterministically (the
 * inherited and earliest-entry chains are unchanged), so the identity
 * permutation reproduces the incumbent exactly.
 *
 * Level 2 permutes the agent chain inside one pending order; cross-order
 * constraints are untouched.
 */
#pragma once

#include <vector>

#include "precedence.hpp"
#include "rng.hpp"

namespace mapfoc {

// K candidates from one randomly placed window over the pending orders;
// empty when fewer than two pending orders exist
inline std::vector<PrioritySpec> refine_level3(const PrioritySpec& incumbent, int window_w,
                                               int k_l3, Rng& rng) {
  std::vector<PrioritySpec> out;
  const size_t pend = incumbent.pending_order_seq.size();
  if (pend < 2) return out;
  const size_t w = std::min<size_t>(static_cast<size_t>(window_w), pend);
  const size_t start = static_cast<size_t>(rng.below(pend - w + 1));
  for (int c = 0; c < k_l3; ++c) {
    PrioritySpec cand = incumbent;
    std::vector<int> window(cand.pending_order_seq.begin() + static_cast<long>(start),
                            cand.pending_order_seq.begin() + static_cast<long>(start + w));
    rng.shuffle(window);
    std::copy(window.begin(), window.end(),
              cand.pending_order_seq.begin() + static_cast<long>(start));
    out.push_back(std::move(cand));
  }
  return out;
}

// K candidates permuting the agents of one pending order with >= 2 agents
inline std::vector<PrioritySpec> refine_level2(const PrioritySpec& incumbent, int k_l2, Rng& rng) {
  std::vector<PrioritySpec> out;
  std::vector<int> eligible;
  for (int o : incumbent.pending_order_seq) {
    auto it = incumbent.agent_seq.find(o);
    if (it != incumbent.agent_seq.end() && it->second.size() >= 2) eligible.push_back(o);
  }
  if (eligible.empty()) return out;
  int target = eligible[rng.below(eligible.size())];
  for (int c = 0; c < k_l2; ++c) {
    PrioritySpec cand = incumbent;
    rng.shuffle(cand.agent_seq[target]);
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace mapfoc
