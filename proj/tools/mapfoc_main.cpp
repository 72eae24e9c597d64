/*
 * mapfoc: command-line front end.
 *
 * Subcommands: generate, solve, simulate, validate, render, bench.
 * All outputs are files; stdout carries a single JSON summary line.
 * Exit codes: 0 success, 1 validation failure, 2 usage/IO error.
 */
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <mapfoc/mapfoc.hpp>

using namespace mapfoc;
using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw usage_error("cannot write file '" + path + "'");
  f << content;
}

int workers_default() {
  if (const char* env = std::getenv("MAPFOC_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

json metrics_json(const Plan& plan, Time ms, Time lb, const Utilization& util,
                  int64_t runtime_ms, const std::string& variant, uint64_t seed) {
  json u = json::object();
  for (const auto& [g, val] : util.per_destination) u[plan.inst->net->name(g)] = val;
  for (Vertex g : util.absent) u[plan.inst->net->name(g)] = nullptr;  // absent destinations
  return json{{"makespan", ms},
              {"lower_bound", lb},
              {"normalized", lb > 0 ? static_cast<double>(ms) / static_cast<double>(lb) : 0.0},
              {"utilization", u},
              {"avg_utilization", util.average},
              {"runtime_ms", runtime_ms},
              {"variant", variant},
              {"seed", seed}};
}

RefineConfig solver_from_json(const json& j) {
  RefineConfig cfg;
  if (j.contains("variant")) cfg.variant = parse_variant(j.at("variant").get<std::string>());
  if (j.contains("window_w")) cfg.window_w = j.at("window_w").get<int>();
  if (j.contains("k_l3")) cfg.k_l3 = j.at("k_l3").get<int>();
  if (j.contains("k_l2")) cfg.k_l2 = j.at("k_l2").get<int>();
  if (j.contains("budget_ms")) cfg.budget_ms = j.at("budget_ms").get<int64_t>();
  if (j.contains("inner_budget_ms")) cfg.inner_budget_ms = j.at("inner_budget_ms").get<int64_t>();
  if (j.contains("seq_split")) cfg.seq_split = j.at("seq_split").get<double>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("max_batches")) cfg.max_batches = j.at("max_batches").get<int>();
  return cfg;
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::string s = "elapsed_ms,makespan\n";
  for (const auto& p : trace)
    s += std::to_string(p.elapsed_ms) + "," + std::to_string(p.makespan) + "\n";
  return s;
}

int cmd_generate(const std::string& map_path, int agents, int lambda, uint64_t seed,
                 int order_size_max, int service_time, const std::string& out) {
  Network net = Network::load_file(map_path);
  GenConfig cfg;
  cfg.arrival_rate = lambda;
  cfg.total_agents = agents;
  cfg.seed = seed;
  cfg.order_size_max = order_size_max;
  cfg.service_time = service_time;
  Instance inst = generate_stream(net, cfg);
  auto violations = validate_instance(inst);
  if (!violations.empty()) throw internal_error("generated instance failed validation: " +
                                                violations[0].message);
  write_file(out, inst.dump());
  std::cout << json{{"cmd", "generate"},
                    {"agents", inst.num_agents()},
                    {"orders", inst.num_orders()},
                    {"out", out}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_solve(const std::string& map_path, const std::string& inst_path,
              const RefineConfig& cfg, const std::string& out_plan,
              const std::string& out_metrics, const std::string& out_trace) {
  Network net = Network::load_file(map_path);
  Instance inst = Instance::load_file(inst_path, net);
  auto violations = validate_instance(inst);
  if (!violations.empty())
    throw usage_error("instance invalid: " + violations[0].subject + ": " +
                      violations[0].message);

  auto t0 = std::chrono::steady_clock::now();
  Plan plan(&inst);
  std::vector<TracePoint> trace;
  Time ms = 0;
  if (cfg.variant == Variant::pibt_ac) {
    plan = pibt_ac_run(inst, cfg.seed);
    ms = inst.num_agents() ? makespan(plan) : 0;
  } else {
    SnapshotState snap = make_root_snapshot(inst);
    SolveResult res = solve_snapshot(snap, nullptr, cfg);
    plan = std::move(res.plan);
    ms = res.makespan;
    trace = std::move(res.trace);
  }
  int64_t runtime = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

  // never write a plan the validator would reject
  auto invalid = check_all_valid(plan);
  auto collisions = check_collisions(plan);
  auto contiguity = check_order_contiguity(plan);
  if (!invalid.empty() || !collisions.empty() || !contiguity.empty()) {
    std::cout << json{{"cmd", "solve"}, {"ok", false}, {"error", "validation failed"}}.dump()
              << "\n";
    return 1;
  }

  if (!out_plan.empty()) write_file(out_plan, plan.dump());
  if (!out_metrics.empty())
    write_file(out_metrics,
               metrics_json(plan, ms, lower_bound(inst), utilization(plan), runtime,
                            variant_name(cfg.variant), cfg.seed)
                       .dump(2) +
                   "\n");
  if (!out_trace.empty()) write_file(out_trace, trace_csv(trace));
  std::cout << json{{"cmd", "solve"},
                    {"ok", true},
                    {"variant", variant_name(cfg.variant)},
                    {"makespan", ms},
                    {"lower_bound", lower_bound(inst)},
                    {"runtime_ms", runtime}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
  std::ifstream f(scenario_path);
  if (!f) throw usage_error("cannot open scenario file '" + scenario_path + "'");
  json sj;
  try {
    sj = json::parse(std::string(std::istreambuf_iterator<char>(f), {}));
  } catch (const json::exception& e) {
    throw parse_error(std::string("scenario file: ") + e.what());
  }
  auto base = std::filesystem::path(scenario_path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_absolute() ? q.string() : (base / q).string();
  };
  Network net = Network::load_file(resolve(sj.at("map").get<std::string>()));
  Instance inst = Instance::load_file(resolve(sj.at("instance").get<std::string>()), net);
  ScenarioConfig sc;
  sc.rounds = sj.value("rounds", 1);
  sc.per_window_agents = sj.at("per_window_agents").get<int>();
  sc.solver = solver_from_json(sj.value("solver", json::object()));

  LifelongResult res = run_lifelong(inst, sc);

  std::filesystem::create_directories(out_dir);
  std::string csv = "round,tau,visible,makespan,lower_bound,normalized,avg_utilization,runtime_ms\n";
  char buf[256];
  for (const auto& r : res.rounds) {
    std::snprintf(buf, sizeof buf, "%d,%d,%zu,%d,%d,%.6f,%.4f,%lld\n", r.round, r.tau, r.visible,
                  r.makespan, r.lower_bound, r.normalized, r.avg_utilization,
                  static_cast<long long>(r.runtime_ms));
    csv += buf;
  }
  write_file(out_dir + "/rounds.csv", csv);
  write_file(out_dir + "/global_plan.json", res.global.dump());
  std::cout << json{{"cmd", "simulate"},
                    {"rounds", res.rounds.size()},
                    {"final_makespan", res.final_makespan},
                    {"out_dir", out_dir}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_validate(const std::string& map_path, const std::string& inst_path,
                 const std::string& plan_path, const std::string& prev_plan_path, Time tau) {
  Network net = Network::load_file(map_path);
  Instance inst = Instance::load_file(inst_path, net);
  Plan plan = Plan::load_file(plan_path, inst);

  json verdict;
  bool ok = true;
  auto invalid = check_all_valid(plan);
  verdict["path_violations"] = json::array();
  for (const auto& v : invalid) {
    verdict["path_violations"].push_back(
        {{"agent", inst.agents[static_cast<size_t>(v.agent)].name}, {"message", v.message}});
    ok = false;
  }
  auto collisions = check_collisions(plan);
  verdict["collisions"] = json::array();
  for (const auto& c : collisions) {
    verdict["collisions"].push_back({{"t", c.t},
                                     {"vertex", net.name(c.v)},
                                     {"agents", {inst.agents[static_cast<size_t>(c.agent_a)].name,
                                                 inst.agents[static_cast<size_t>(c.agent_b)].name}}});
    ok = false;
  }
  std::vector<ContiguityViolation> contiguity;
  try {
    contiguity = check_order_contiguity(plan);
  } catch (const Error& e) {
    verdict["contiguity_violations"] = json::array({{{"message", e.what()}}});
    ok = false;
  }
  if (!verdict.contains("contiguity_violations")) {
    verdict["contiguity_violations"] = json::array();
    for (const auto& v : contiguity) {
      verdict["contiguity_violations"].push_back(
          {{"destination", net.name(v.destination)},
           {"agents", {inst.agents[static_cast<size_t>(v.agent_p)].name,
                       inst.agents[static_cast<size_t>(v.agent_q)].name,
                       inst.agents[static_cast<size_t>(v.agent_r)].name}}});
      ok = false;
    }
  }
  if (!prev_plan_path.empty()) {
    Plan prev = Plan::load_file(prev_plan_path, inst);
    if (auto div = check_prefix_consistency(prev, plan, tau)) {
      verdict["prefix_divergence"] = {{"agent", inst.agents[static_cast<size_t>(div->agent)].name},
                                      {"t", div->t}};
      ok = false;
    } else {
      verdict["prefix_divergence"] = nullptr;
    }
  }
  verdict["cmd"] = "validate";
  verdict["ok"] = ok;
  std::cout << verdict.dump() << "\n";
  return ok ? 0 : 1;
}

int cmd_render(const std::string& map_path, const std::string& inst_path,
               const std::string& plan_path, const std::string& out) {
  Network net = Network::load_file(map_path);
  Instance inst = Instance::load_file(inst_path, net);
  Plan plan = Plan::load_file(plan_path, inst);
  std::string svg = render_svg(plan);  // refuses infeasible plans
  write_file(out, svg);
  std::cout << json{{"cmd", "render"}, {"out", out}}.dump() << "\n";
  return 0;
}

int cmd_bench(const std::string& map_path, int agents, int lambda, int service_time,
              int num_seeds, const std::vector<std::string>& variants, int64_t budget_ms,
              int workers, const std::string& out) {
  Network net = Network::load_file(map_path);
  std::string csv = "variant,seed,makespan,lower_bound,normalized,improvement_vs_vanilla,runtime_ms\n";
  char buf[256];
  for (int s = 0; s < num_seeds; ++s) {
    GenConfig gen;
    gen.arrival_rate = lambda;
    gen.total_agents = agents;
    gen.seed = static_cast<uint64_t>(s);
    gen.service_time = service_time;
    Instance inst = generate_stream(net, gen);
    Time lb = lower_bound(inst);

    Time vanilla_ms = 0;
    for (bool pass_vanilla : {true, false}) {
      for (const auto& vname : variants) {
        Variant v = parse_variant(vname);
        if (pass_vanilla != (v == Variant::vanilla)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Time ms;
        if (v == Variant::pibt_ac) {
          ms = makespan(pibt_ac_run(inst, static_cast<uint64_t>(s)));
        } else {
          RefineConfig cfg;
          cfg.variant = v;
          cfg.budget_ms = (v == Variant::vanilla) ? 0 : budget_ms;
          cfg.seed = static_cast<uint64_t>(s);
          cfg.workers = workers;
          SnapshotState snap = make_root_snapshot(inst);
          ms = solve_snapshot(snap, nullptr, cfg).makespan;
        }
        int64_t rt = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
        if (v == Variant::vanilla) vanilla_ms = ms;
        double impr = vanilla_ms > 0 ? improvement(vanilla_ms, ms) : 0.0;
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.6f,%.3f,%lld\n", vname.c_str(), s, ms, lb,
                      static_cast<double>(ms) / static_cast<double>(lb), impr,
                      static_cast<long long>(rt));
        csv += buf;
      }
    }
  }
  write_file(out, csv);
  std::cout << json{{"cmd", "bench"}, {"seeds", num_seeds}, {"out", out}}.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online MAPF with order-contiguity: DOPP planner and tooling"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a seeded order stream instance");
  std::string g_map, g_out;
  int g_agents = 100, g_lambda = 1, g_osm = 0, g_k = 1;
  uint64_t g_seed = 0;
  gen->add_option("--map", g_map, "map file")->required();
  gen->add_option("--agents", g_agents, "total agents")->required();
  gen->add_option("--lambda", g_lambda, "arrival rate (agents per timestep)");
  gen->add_option("--seed", g_seed, "rng seed");
  gen->add_option("--order-size-max", g_osm, "max order size (default: exit_buffer_len)");
  gen->add_option("--service-time", g_k, "service time k");
  gen->add_option("--out", g_out, "output instance file")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "one-shot snapshot solve");
  std::string s_map, s_inst, s_variant = "vanilla", s_plan, s_metrics, s_trace;
  RefineConfig s_cfg;
  s_cfg.workers = workers_default();
  solve->add_option("--map", s_map, "map file")->required();
  solve->add_option("--instance", s_inst, "instance file")->required();
  solve->add_option("--variant", s_variant,
                    "vanilla|level3_ns|level2_ns|sequential_ns|nested_ns|pibt_ac");
  solve->add_option("--budget-ms", s_cfg.budget_ms, "refinement budget (ms)");
  solve->add_option("--workers", s_cfg.workers, "parallel candidate evaluations");
  solve->add_option("--seed", s_cfg.seed, "rng seed");
  solve->add_option("--window-w", s_cfg.window_w, "Level-3 window size W_L3");
  solve->add_option("--k-l3", s_cfg.k_l3, "Level-3 candidates per batch K_L3");
  solve->add_option("--k-l2", s_cfg.k_l2, "Level-2 candidates per batch K_L2");
  solve->add_option("--inner-budget-ms", s_cfg.inner_budget_ms, "nested NS inner budget (ms)");
  solve->add_option("--seq-split", s_cfg.seq_split, "sequential NS Level-3 budget share");
  solve->add_option("--max-batches", s_cfg.max_batches,
                    "stop refinement after N batches (deterministic replication)");
  solve->add_option("--out-plan", s_plan, "plan output file");
  solve->add_option("--out-metrics", s_metrics, "metrics output file");
  solve->add_option("--out-trace", s_trace, "anytime trace CSV output");

  // simulate
  auto* sim = app.add_subcommand("simulate", "lifelong multi-round scenario");
  std::string m_scenario, m_outdir;
  sim->add_option("--scenario", m_scenario, "scenario JSON file")->required();
  sim->add_option("--out-dir", m_outdir, "output directory")->required();

  // validate
  auto* val = app.add_subcommand("validate", "check a plan against an instance");
  std::string v_map, v_inst, v_plan, v_prev;
  Time v_tau = 0;
  val->add_option("--map", v_map, "map file")->required();
  val->add_option("--instance", v_inst, "instance file")->required();
  val->add_option("--plan", v_plan, "plan file")->required();
  val->add_option("--prev-plan", v_prev, "previous plan for the prefix check");
  val->add_option("--tau", v_tau, "replanning time for the prefix check");

  // render
  auto* ren = app.add_subcommand("render", "emit an SVG space-time diagram");
  std::string r_map, r_inst, r_plan, r_out;
  ren->add_option("--map", r_map, "map file")->required();
  ren->add_option("--instance", r_inst, "instance file")->required();
  ren->add_option("--plan", r_plan, "plan file")->required();
  ren->add_option("--out", r_out, "output SVG file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "sweep variants over seeded instances");
  std::string b_map, b_out;
  int b_agents = 100, b_lambda = 1, b_k = 3, b_seeds = 5, b_workers = workers_default();
  int64_t b_budget = 1000;
  std::vector<std::string> b_variants = {"vanilla", "level3_ns", "pibt_ac"};
  bench->add_option("--map", b_map, "map file")->required();
  bench->add_option("--agents", b_agents, "agents per instance");
  bench->add_option("--lambda", b_lambda, "arrival rate");
  bench->add_option("--service-time", b_k, "service time k");
  bench->add_option("--seeds", b_seeds, "number of seeds");
  bench->add_option("--variants", b_variants, "variants to run")->delimiter(',');
  bench->add_option("--budget-ms", b_budget, "refinement budget per solve");
  bench->add_option("--workers", b_workers, "parallel candidate evaluations");
  bench->add_option("--out", b_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      if (g_lambda < 1 || g_agents < 1) throw usage_error("--lambda and --agents must be >= 1");
      return cmd_generate(g_map, g_agents, g_lambda, g_seed, g_osm, g_k, g_out);
    }
    if (solve->parsed()) {
      s_cfg.variant = parse_variant(s_variant);
      return cmd_solve(s_map, s_inst, s_cfg, s_plan, s_metrics, s_trace);
    }
    if (sim->parsed()) return cmd_simulate(m_scenario, m_outdir);
    if (val->parsed()) return cmd_validate(v_map, v_inst, v_plan, v_prev, v_tau);
    if (ren->parsed()) return cmd_render(r_map, r_inst, r_plan, r_out);
    if (bench->parsed())
      return cmd_bench(b_map, b_agents, b_lambda, b_k, b_seeds, b_variants, b_budget, b_workers,
                       b_out);
  } catch (const LivelockError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == Error::Kind::internal ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
