/*
 * DOPP: anytime dual-ordering prioritized planning for one snapshot.
 *
 * Initialization builds order precedence (Level 3) and order-consistent
 * agent priorities (Level 2), then synthesizes a feasible plan by
 * prioritized planning (Level 1). Refinement repeatedly samples neighbor
 * priority structures, evaluates each by rerunning Level 1, and accepts
 * strict makespan improvements until the wall-clock budget expires.
 * Candidate evaluations inside a batch run concurrently; acceptance is a
 * deterministic reduction (minimum makespan, ties to the lowest candidate
 * index), so the accepted sequence does not depend on the worker count.
 *
 * If a single-agent search exhausts its horizon (re-pathing active agents
 * can, rarely, strand a lower-priority active agent), the pass is retried
 * with active agents holding their previous suffixes, which always
 * succeeds: held suffixes are mutually consistent and pending agents can
 * wait outside the network.
 */
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "level1.hpp"
#include "plan.hpp"
#include "precedence.hpp"
#include "refine.hpp"
#include "snapshot.hpp"

namespace mapfoc {

enum class Variant { vanilla, level3_ns, level2_ns, sequential_ns, nested_ns, pibt_ac };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::vanilla: return "vanilla";
    case Variant::level3_ns: return "level3_ns";
    case Variant::level2_ns: return "level2_ns";
    case Variant::sequential_ns: return "sequential_ns";
    case Variant::nested_ns: return "nested_ns";
    case Variant::pibt_ac: return "pibt_ac";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::vanilla, Variant::level3_ns, Variant::level2_ns,
                    Variant::sequential_ns, Variant::nested_ns, Variant::pibt_ac})
    if (s == variant_name(v)) return v;
  throw usage_error("unknown variant '" + s + "'");
}

struct RefineConfig {
  Variant variant = Variant::vanilla;
  int window_w = 7;               // W_L3
  int k_l3 = 10;                  // K_L3
  int k_l2 = 10;                  // K_L2
  int64_t budget_ms = 0;          // refinement wall-clock budget; 0 = vanilla
  int64_t inner_budget_ms = 1000; // per inner Level-2 call in nested NS
  double seq_split = 2.0 / 3.0;   // Level-3 share of the budget in sequential NS
  int workers = 1;
  uint64_t seed = 0;
  int max_batches = 0;            // optional deterministic cutoff; 0 = clock only
  bool validate_candidates = false;

  void check() const {
    if (window_w < 2) throw usage_error("window_w must be >= 2");
    if (k_l3 < 1 || k_l2 < 1) throw usage_error("k_l3 and k_l2 must be >= 1");
    if (budget_ms < 0) throw usage_error("budget_ms must be >= 0");
    if (workers < 1) throw usage_error("workers must be >= 1");
    if (seq_split <= 0.0 || seq_split >= 1.0) throw usage_error("seq_split must be in (0,1)");
  }
};

struct TracePoint {
  int64_t elapsed_ms;
  Time makespan;
};

struct SolveStats {
  size_t batches = 0;
  size_t candidates_evaluated = 0;
  size_t candidates_validated = 0;
  size_t hold_active_fallbacks = 0;
};

struct SolveResult {
  Plan plan;
  Time makespan = 0;
  PrecedenceState precedence;
  std::vector<TracePoint> trace;
  SolveStats stats;
};

namespace detail {

class WorkerPool {
 public:
  explicit WorkerPool(int workers) {
    for (int i = 1; i < workers; ++i)
      threads_.emplace_back([this] { worker_loop(); });
  }
  ~WorkerPool() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  // runs tasks[0..n) to completion; the calling thread participates
  void run(std::vector<std::function<void()>>& tasks) {
    {
      std::lock_guard lk(mu_);
      tasks_ = &tasks;
      next_ = 0;
      pending_ = tasks.size();
    }
    cv_.notify_all();
    drain();
    std::unique_lock lk(mu_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    tasks_ = nullptr;
  }

 private:
  void drain() {
    for (;;) {
      std::function<void()>* task = nullptr;
      {
        std::lock_guard lk(mu_);
        if (tasks_ == nullptr || next_ >= tasks_->size()) return;
        task = &(*tasks_)[next_++];
      }
      (*task)();
      std::lock_guard lk(mu_);
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }
  void worker_loop() {
    for (;;) {
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [this] {
          return stop_ || (tasks_ != nullptr && next_ < tasks_->size());
        });
        if (stop_) return;
      }
      drain();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  std::vector<std::thread> threads_;
  std::vector<std::function<void()>>* tasks_ = nullptr;
  size_t next_ = 0;
  size_t pending_ = 0;
  bool stop_ = false;
};

struct Evaluation {
  bool ok = false;
  bool used_fallback = false;
  Level1Result result;
};

inline Evaluation evaluate_spec(const SnapshotState& snap, const Classification& cls,
                                const PrioritySpec& spec, Time horizon, bool validate) {
  Evaluation ev;
  try {
    ev.result = level1_pp(snap, cls, spec, horizon, Level1Mode::replan_active);
    ev.ok = true;
  } catch (const SearchFailure&) {
    try {
      ev.result = level1_pp(snap, cls, spec, horizon, Level1Mode::hold_active);
      ev.ok = true;
      ev.used_fallback = true;
    } catch (const SearchFailure&) {
      ev.ok = false;
    }
  }
  if (ev.ok && validate) require_feasible(ev.result.plan, "candidate plan");
  return ev;
}

}  // namespace detail

inline SolveResult solve_snapshot(const SnapshotState& snap, const PrioritySpec* prev,
                                  const RefineConfig& cfg) {
  cfg.check();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
  };

  Classification cls = classify(snap);
  Rng rng(cfg.seed);
  PrecedenceState init = init_precedence(snap, cls, prev, rng);
  const Time horizon = horizon_bound(snap, cls);

  SolveResult out;
  detail::Evaluation first =
      detail::evaluate_spec(snap, cls, init.spec, horizon, cfg.validate_candidates);
  if (!first.ok)
    throw internal_error("level 1 failed on the initialization priorities");
  out.stats.candidates_evaluated = 1;
  if (cfg.validate_candidates) out.stats.candidates_validated = 1;
  if (first.used_fallback) out.stats.hold_active_fallbacks = 1;

  PrioritySpec incumbent_spec = init.spec;
  Level1Result incumbent = std::move(first.result);
  out.trace.push_back({elapsed_ms(), incumbent.snapshot_makespan});

  const auto deadline = start + std::chrono::milliseconds(cfg.budget_ms);
  auto interrupted = [&](std::chrono::steady_clock::time_point dl) {
    if (cfg.max_batches > 0 && out.stats.batches >= static_cast<size_t>(cfg.max_batches))
      return true;
    return clock::now() >= dl;
  };

  detail::WorkerPool pool(cfg.workers);

  // evaluate a batch concurrently; accept the best strict improvement
  auto run_batch = [&](const std::vector<PrioritySpec>& cands,
                       const std::vector<Rng>& inner_rngs,
                       std::chrono::steady_clock::time_point outer_dl) {
    if (cands.empty()) return;
    std::vector<detail::Evaluation> evals(cands.size());
    std::vector<PrioritySpec> refined(cands);
    std::vector<std::exception_ptr> errors(cands.size());
    std::vector<std::function<void()>> tasks;
    for (size_t i = 0; i < cands.size(); ++i) {
      tasks.push_back([&, i] {
        try {
        evals[i] = detail::evaluate_spec(snap, cls, cands[i], horizon, cfg.validate_candidates);
        if (cfg.variant == Variant::nested_ns && evals[i].ok) {
          // inner Level-2 refinement of this candidate
          Rng inner_rng = inner_rngs[i];
          auto inner_dl = std::min(outer_dl, clock::now() + std::chrono::milliseconds(
                                                                cfg.inner_budget_ms));
          while (clock::now() < inner_dl) {
            auto l2 = refine_level2(refined[i], cfg.k_l2, inner_rng);
            if (l2.empty()) break;
            bool improved = false;
            for (auto& c2 : l2) {
              auto e2 = detail::evaluate_spec(snap, cls, c2, horizon, cfg.validate_candidates);
              if (e2.ok && e2.result.snapshot_makespan < evals[i].result.snapshot_makespan) {
                evals[i] = std::move(e2);
                refined[i] = std::move(c2);
                improved = true;
              }
            }
            (void)improved;
          }
        }
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    pool.run(tasks);
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    size_t best = cands.size();
    for (size_t i = 0; i < cands.size(); ++i) {
      out.stats.candidates_evaluated += 1;
      if (!evals[i].ok) continue;
      if (evals[i].used_fallback) out.stats.hold_active_fallbacks += 1;
      if (cfg.validate_candidates) out.stats.candidates_validated += 1;
      if (evals[i].result.snapshot_makespan < incumbent.snapshot_makespan &&
          (best == cands.size() ||
           evals[i].result.snapshot_makespan < evals[best].result.snapshot_makespan))
        best = i;
    }
    if (best < cands.size()) {
      incumbent = std::move(evals[best].result);
      incumbent_spec = std::move(refined[best]);
      out.trace.push_back({elapsed_ms(), incumbent.snapshot_makespan});
    }
    out.stats.batches += 1;
  };

  auto level3_loop = [&](std::chrono::steady_clock::time_point dl) {
    while (!interrupted(dl)) {
      auto cands = refine_level3(incumbent_spec, cfg.window_w, cfg.k_l3, rng);
      if (cands.empty()) break;  // nothing to refine
      std::vector<Rng> inner;
      for (size_t i = 0; i < cands.size(); ++i)
        inner.push_back(rng.fork((out.stats.batches << 8) | i));
      run_batch(cands, inner, dl);
    }
  };
  auto level2_loop = [&](std::chrono::steady_clock::time_point dl) {
    while (!interrupted(dl)) {
      auto cands = refine_level2(incumbent_spec, cfg.k_l2, rng);
      if (cands.empty()) break;
      run_batch(cands, {}, dl);
    }
  };

  if (cfg.budget_ms > 0) {
    switch (cfg.variant) {
      case Variant::vanilla:
        break;
      case Variant::level3_ns:
        level3_loop(deadline);
        break;
      case Variant::level2_ns:
        level2_loop(deadline);
        break;
      case Variant::sequential_ns: {
        auto split = start + std::chrono::milliseconds(
                                 static_cast<int64_t>(cfg.seq_split *
                                                      static_cast<double>(cfg.budget_ms)));
        level3_loop(split);
        level2_loop(deadline);
        break;
      }
      case Variant::nested_ns:
        level3_loop(deadline);
        break;
      case Variant::pibt_ac:
        throw usage_error("pibt_ac is not a DOPP variant; use pibt_ac_run");
    }
  }

  out.trace.push_back({elapsed_ms(), incumbent.snapshot_makespan});
  out.plan = std::move(incumbent.plan);
  out.makespan = incumbent.snapshot_makespan;
  out.precedence.spec = incumbent_spec;
  out.precedence.order_pairs = order_pairs_of(incumbent_spec);
  out.precedence.agent_pairs = agent_pairs_of(incumbent_spec);
  out.precedence.order_list =
      topo_order_or_throw(out.precedence.order_pairs, incumbent_spec.order_list(), "order precedence");
  out.precedence.agent_list =
      topo_order_or_throw(out.precedence.agent_pairs, incumbent_spec.agent_list(), "agent priority");
  return out;
}

}  // namespace mapfoc
