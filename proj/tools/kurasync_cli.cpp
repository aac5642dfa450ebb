// kurasync: batch front end for graph generation, expander profiles,
// synchronization certificates, gradient-flow simulation and sweeps.
//
// Exit status: 0 pass/success, 1 fail verdict, 2 error (including usage).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "kurasync/kurasync.hpp"

namespace ks = kurasync;
namespace fs = std::filesystem;
using ks::Json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double kSyncRho1 = 1.0 - 1e-6;

struct ExitCode {
  static constexpr int pass = 0;
  static constexpr int fail = 1;
  static constexpr int error = 2;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  double tol = ks::kDefaultSpectralTol;
  std::string graph_path;
  std::string gen_spec;
  std::optional<double> d_ref;
  unsigned threads = 1;
};

std::uint64_t require_seed(const Common& c, const std::string& why) {
  if (!c.seed) throw UsageError("--seed is required " + why);
  return *c.seed;
}

// ---------------------------------------------------------------------------
// Graph sources

struct LoadedGraph {
  ks::Graph graph;
  std::string source;                // "file:<path>" or "gen:<spec>"
  std::optional<double> model_d;     // model parameter for d_ref, if known
  bool stochastic = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::size_t parse_count(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + " in generator spec: " + s);
  }
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + " in generator spec: " + s);
  }
}

/// Generator specs:
///   <family>:N          family in cycle, path, complete, star, two_cliques_bridged
///   er:N:P              G(N, P)
///   er-gamma:N:GAMMA    G(N, GAMMA log N / N)
///   regular:N:D         random D-regular graph
LoadedGraph load_graph(const Common& c) {
  if (c.graph_path.empty() == c.gen_spec.empty()) {
    throw UsageError("exactly one of --graph and --gen is required");
  }
  LoadedGraph lg;
  if (!c.graph_path.empty()) {
    std::ifstream in(c.graph_path);
    if (!in) throw ks::InputError("cannot open graph file: " + c.graph_path);
    lg.graph = ks::read_edge_list(in);
    lg.source = "file:" + c.graph_path;
    return lg;
  }
  const auto parts = split(c.gen_spec, ':');
  lg.source = "gen:" + c.gen_spec;
  if (parts.empty()) throw UsageError("empty generator spec");
  const std::string& kind = parts[0];
  if (kind == "er" || kind == "er-gamma") {
    if (parts.size() != 3) throw UsageError(kind + " spec is " + kind + ":N:" + (kind == "er" ? "P" : "GAMMA"));
    const std::size_t n = parse_count(parts[1], "N");
    double p = parse_real(parts[2], kind == "er" ? "P" : "GAMMA");
    if (kind == "er-gamma") p = p * std::log(static_cast<double>(n)) / static_cast<double>(n);
    lg.graph = ks::gen_erdos_renyi(n, p, require_seed(c, "for random generators"));
    lg.model_d = p * static_cast<double>(n);
    lg.stochastic = true;
  } else if (kind == "regular") {
    if (parts.size() != 3) throw UsageError("regular spec is regular:N:D");
    const std::size_t n = parse_count(parts[1], "N");
    const std::size_t d = parse_count(parts[2], "D");
    lg.graph = ks::gen_random_regular(n, d, require_seed(c, "for random generators"));
    lg.model_d = static_cast<double>(d);
    lg.stochastic = true;
  } else {
    if (parts.size() != 2) throw UsageError("named spec is <family>:N");
    lg.graph = ks::gen_named(ks::parse_named_family(kind), parse_count(parts[1], "N"));
  }
  return lg;
}

struct DRef {
  double value;
  std::string choice;
};

DRef choose_d_ref(const Common& c, const LoadedGraph& lg) {
  if (c.d_ref) {
    if (!(*c.d_ref > 0.0)) throw UsageError("--d-ref must be positive");
    return {*c.d_ref, "user"};
  }
  if (lg.model_d && *lg.model_d > 0.0) return {*lg.model_d, "model_parameter"};
  const double avg = lg.graph.average_degree();
  if (!(avg > 0.0)) throw ks::InputError("graph has no edges; pass --d-ref explicitly");
  return {avg, "average_degree"};
}

bool is_regular(const ks::Graph& g) {
  const auto e = ks::degree_extrema(g);
  return e.min == e.max;
}

/// Widens a measured profile by its measurement tolerance so that every
/// certificate computed from it is valid for the exact profile.
ks::ExpanderProfile conservative(const ks::ExpanderProfile& p) {
  ks::ExpanderProfile q = p;
  q.alpha += p.tol;
  q.c_minus -= p.tol;
  q.c_plus += p.tol;
  return q;
}

// ---------------------------------------------------------------------------
// Output

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json echo_config(const CLI::App& sub) {
  Json cfg = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto& res = opt->results();
    cfg[opt->get_name()] = res.size() == 1 ? Json(res.front()) : Json(res);
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ks::InputError("cannot write " + path.string());
  out << text;
  if (!out) throw ks::InputError("write failed: " + path.string());
}

fs::path write_report(const Common& c, const CLI::App& sub, Json body, const Json& seeds) {
  Json report;
  report["command"] = sub.get_name();
  for (auto& [k, v] : body.items()) report[k] = v;
  report["provenance"] = Json{{"tool", "kurasync"},
                              {"version", kVersion},
                              {"config", echo_config(sub)},
                              {"seeds", seeds},
                              {"timestamp", utc_timestamp()}};
  const fs::path path = fs::path(c.out) / (sub.get_name() + ".json");
  write_text(path, report.dump(2) + "\n");
  return path;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Json graph_summary(const ks::Graph& g) {
  const auto e = ks::degree_extrema(g);
  return Json{{"n", g.num_vertices()},
              {"m", g.num_edges()},
              {"d_min", e.min},
              {"d_max", e.max},
              {"average_degree", ks::num(g.average_degree())},
              {"connected", g.is_connected()}};
}

ks::AmpMode parse_mode(const std::string& s) {
  if (s == "numeric") return ks::AmpMode::numeric;
  if (s == "paper-proof") return ks::AmpMode::paper_proof;
  throw UsageError("--mode must be paper-proof or numeric");
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_generate(const Common& c, const CLI::App& sub, const std::string& graph_out) {
  const auto lg = load_graph(c);
  const fs::path path = graph_out.empty() ? fs::path(c.out) / "graph.edges" : fs::path(graph_out);
  std::ostringstream text;
  ks::write_edge_list(text, lg.graph);
  write_text(path, text.str());
  Json seeds = lg.stochastic ? Json{{"generator", *c.seed}} : Json::object();
  write_report(c, sub, Json{{"source", lg.source}, {"graph", graph_summary(lg.graph)},
                            {"graph_file", path.string()}},
               seeds);
  std::cout << "generate: wrote " << path.string() << " (n=" << lg.graph.num_vertices()
            << ", m=" << lg.graph.num_edges() << ")\n";
  return ExitCode::pass;
}

int cmd_profile(const Common& c, const CLI::App& sub, std::size_t mixing_trials,
                bool mixing_entries) {
  const auto lg = load_graph(c);
  const auto d = choose_d_ref(c, lg);
  const auto prof = ks::expander_profile(lg.graph, d.value, c.tol, d.choice);
  const auto ext = ks::degree_extrema(lg.graph);
  const auto forced = ks::degree_bounds_from_profile(prof);
  const auto box = ks::degree_implies_profile(static_cast<double>(ext.min),
                                              static_cast<double>(ext.max), prof.alpha, d.value);
  Json body{{"source", lg.source},
            {"graph", graph_summary(lg.graph)},
            {"units", Json{{"alpha", "fraction of d_ref"},
                           {"c_minus", "fraction of d_ref"},
                           {"c_plus", "fraction of d_ref"},
                           {"tol", "absolute eigenvalue accuracy / d_ref"}}},
            {"profile", ks::to_json(prof)},
            {"degree_bounds_from_profile", Json{{"lower", ks::num(forced.lower)}, {"upper", ks::num(forced.upper)}}},
            {"degree_implied_box", Json{{"c_minus", ks::num(box.c_minus)}, {"c_plus", ks::num(box.c_plus)}}}};
  Json seeds = Json::object();
  if (lg.stochastic) seeds["generator"] = *c.seed;
  int status = ExitCode::pass;
  if (mixing_trials > 0) {
    const std::uint64_t seed = ks::derive_seed(require_seed(c, "for --mixing-trials"), 0);
    seeds["mixing"] = seed;
    const auto rep = ks::check_mixing_bounds(lg.graph, prof, mixing_trials, seed);
    body["mixing"] = ks::to_json(rep, mixing_entries);
    if (!rep.pass) status = ExitCode::fail;
  }
  body["verdict"] = status == ExitCode::pass ? "pass" : "fail";
  const auto path = write_report(c, sub, body, seeds);
  std::cout << "profile: alpha=" << prof.alpha << " c_minus=" << prof.c_minus
            << " c_plus=" << prof.c_plus << " (" << path.string() << ")\n";
  return status;
}

struct CertifyArgs {
  std::optional<double> alpha, c_minus, c_plus;
  bool regular = false;
  std::string schedule_path;
  std::string preset = "auto";
  std::string mode = "numeric";
};

ks::Schedule pick_schedule(const std::string& path, const std::string& preset,
                           const ks::ExpanderProfile& p) {
  if (!path.empty()) return ks::read_schedule(path);
  if (preset == "preset") return ks::preset_schedule();
  if (preset == "auto") return ks::proof_schedule(p);
  throw UsageError("--preset must be preset or auto");
}

int cmd_certify(const Common& c, const CLI::App& sub, const CertifyArgs& a) {
  const bool asserted = a.alpha || a.c_minus || a.c_plus;
  ks::ExpanderProfile used;
  Json body;
  Json seeds = Json::object();
  bool regular_mode = a.regular;
  if (asserted) {
    // With --regular, --alpha alone means the regular profile (alpha, -alpha, alpha).
    const bool regular_only = a.regular && a.alpha && !a.c_minus && !a.c_plus;
    if (!regular_only && !(a.alpha && a.c_minus && a.c_plus)) {
      throw UsageError("an asserted profile needs --alpha, --c-minus and --c-plus (or --alpha with --regular)");
    }
    if (!c.graph_path.empty() || !c.gen_spec.empty()) {
      throw UsageError("give either a graph or an asserted profile, not both");
    }
    used = ks::ExpanderProfile::asserted(0, c.d_ref.value_or(1.0), *a.alpha,
                                         regular_only ? -*a.alpha : *a.c_minus,
                                         regular_only ? *a.alpha : *a.c_plus);
    ks::validate_profile(used);
    body["profile"] = ks::to_json(used);
  } else {
    const auto lg = load_graph(c);
    const auto d = choose_d_ref(c, lg);
    const auto measured = ks::expander_profile(lg.graph, d.value, c.tol, d.choice);
    used = conservative(measured);
    regular_mode = regular_mode || (is_regular(lg.graph) &&
                                    d.value == static_cast<double>(ks::degree_extrema(lg.graph).max));
    if (lg.stochastic) seeds["generator"] = *c.seed;
    body["source"] = lg.source;
    body["graph"] = graph_summary(lg.graph);
    body["profile"] = ks::to_json(measured);
    body["certified_profile"] = ks::to_json(used);
    body["certified_profile_note"] = "measured values widened by tol on every side";
  }
  const auto cond = ks::theorem_condition(used);
  body["theorem_condition"] = ks::to_json(cond);

  const auto mode = parse_mode(a.mode);
  std::optional<ks::AmplificationTrace> trace;
  std::string amp_skip;
  if (used.usable() && used.alpha > 0.0) {
    const auto schedule = pick_schedule(a.schedule_path, a.preset, used);
    body["schedule"] = ks::to_json(schedule);
    trace = ks::amplification_run(used, schedule, mode, regular_mode);
    body["amplification"] = ks::to_json(*trace);
    std::ostringstream csv;
    ks::write_trace_csv(csv, *trace);
    write_text(fs::path(c.out) / "amplification_trace.csv", csv.str());
  } else {
    amp_skip = used.alpha > 0.0 ? "c_minus <= -1" : "alpha = 0";
    body["amplification"] = Json{{"skipped", amp_skip}};
  }
  body["regular_mode"] = regular_mode;
  const bool pass = cond.verdict == ks::Verdict::pass ||
                    (trace && trace->verdict == ks::Verdict::pass);
  body["verdict"] = pass ? "pass" : "fail";
  body["verdict_rule"] = "pass iff the closed-form condition or the amplification run passes";
  const auto path = write_report(c, sub, body, seeds);
  std::cout << "certify: " << (pass ? "pass" : "fail") << " (condition1=" << cond.condition1
            << ", condition2=" << cond.condition2;
  if (trace) std::cout << ", amplification=" << ks::to_string(trace->verdict);
  std::cout << ") " << path.string() << "\n";
  return pass ? ExitCode::pass : ExitCode::fail;
}

struct SimulateArgs {
  std::size_t runs = 10;
  double grad_tol = 1e-10;
  std::size_t step_cap = 1'000'000;
  std::size_t trace_run = 0;
  std::size_t trace_every = 1;
  bool expect_sync = false;
  bool classify = true;
};

int cmd_simulate(const Common& c, const CLI::App& sub, const SimulateArgs& a) {
  const auto lg = load_graph(c);
  const std::uint64_t seed = require_seed(c, "for simulate");
  if (a.runs == 0) throw UsageError("--runs must be positive");
  const ks::Graph& g = lg.graph;

  struct Run {
    std::uint64_t seed = 0;
    ks::FlowResult flow;
    std::optional<ks::EquilibriumReport> eq;
    std::size_t kernel_violations = 0;
    std::optional<bool> half_circle;
  };
  std::vector<Run> runs(a.runs);
  const bool connected = g.is_connected();
  parallel_for(a.runs, c.threads, [&](std::size_t i) {
    Run& r = runs[i];
    r.seed = ks::derive_seed(seed, i);
    ks::FlowOptions fo;
    fo.grad_tol = a.grad_tol;
    fo.step_cap = a.step_cap;
    fo.trace_every = i == a.trace_run ? a.trace_every : std::numeric_limits<std::size_t>::max();
    r.flow = ks::flow(g, ks::random_phase_state(g.num_vertices(), r.seed), fo);
    if (a.classify) {
      ks::ClassifyOptions co;
      co.grad_tol = std::max(a.grad_tol, 1e-10);
      r.eq = ks::classify_equilibrium(g, r.flow.final, co);
      if (r.eq->classification == ks::EquilibriumClass::stable) {
        const auto rotated = ks::rotate_to_real_rho1(r.flow.final);
        r.kernel_violations = ks::kernel_stability_violations(g, rotated).size();
        if (connected) r.half_circle = ks::half_circle_check(g, rotated);
      }
    }
  });

  Json rows = Json::array();
  std::size_t synced = 0, converged = 0, stable_unsynced = 0, kernel_bad = 0;
  Json classes = Json::object();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    const double rho1 = std::abs(ks::daido(r.flow.final, 1));
    const bool sync = rho1 > kSyncRho1;
    synced += sync;
    converged += r.flow.terminated == ks::FlowTermination::converged;
    Json row{{"run", i},
             {"seed", r.seed},
             {"terminated", ks::to_string(r.flow.terminated)},
             {"steps", r.flow.steps},
             {"time", ks::num(r.flow.energy_trace.back().time)},
             {"final_energy", ks::num(r.flow.energy_trace.back().energy)},
             {"rho1", ks::num(rho1)},
             {"synchronized", sync}};
    if (r.eq) {
      const auto cls = ks::to_string(r.eq->classification);
      classes[cls] = classes.value(cls, 0) + 1;
      row["equilibrium"] = ks::to_json(*r.eq);
      if (r.eq->classification == ks::EquilibriumClass::stable) {
        row["kernel_violations"] = r.kernel_violations;
        row["half_circle"] = r.half_circle ? Json(*r.half_circle) : Json(nullptr);
        kernel_bad += r.kernel_violations > 0;
        stable_unsynced += !sync;
      }
    }
    rows.push_back(std::move(row));
  }
  const double frac = static_cast<double>(synced) / static_cast<double>(a.runs);
  const bool fail = a.expect_sync && synced != a.runs;
  Json body{{"source", lg.source},
            {"graph", graph_summary(g)},
            {"sync_threshold_rho1", kSyncRho1},
            {"summary", Json{{"runs", a.runs},
                             {"converged", converged},
                             {"synchronized", synced},
                             {"synchronized_fraction", frac},
                             {"stable_not_synchronized", stable_unsynced},
                             {"stable_with_kernel_violations", kernel_bad},
                             {"classifications", classes}}},
            {"runs", rows}};
  if (a.expect_sync) body["verdict"] = fail ? "fail" : "pass";

  if (a.trace_run < runs.size()) {
    std::ostringstream csv;
    ks::write_flow_csv(csv, runs[a.trace_run].flow);
    write_text(fs::path(c.out) / "flow_trace.csv", csv.str());
  }
  Json seeds{{"base", seed}, {"per_run", "derive_seed(base, run)"}};
  if (lg.stochastic) seeds["generator"] = seed;
  const auto path = write_report(c, sub, body, seeds);
  std::cout << "simulate: " << synced << "/" << a.runs << " runs synchronized ("
            << path.string() << ")\n";
  return fail ? ExitCode::fail : ExitCode::pass;
}

struct ThresholdArgs {
  std::string schedule_path;
  std::string preset = "preset";
  std::string mode = "numeric";
  double lo = 0.05, hi = 0.12, search_tol = 1e-5;
};

int cmd_threshold(const Common& c, const CLI::App& sub, const ThresholdArgs& a) {
  const auto mode = parse_mode(a.mode);
  std::optional<ks::Schedule> fixed;
  if (!a.schedule_path.empty()) fixed = ks::read_schedule(a.schedule_path);
  if (a.schedule_path.empty() && a.preset != "preset" && a.preset != "auto") {
    throw UsageError("--preset must be preset or auto");
  }
  const ks::ScheduleFactory make = [&](const ks::ExpanderProfile& p) {
    return fixed ? *fixed : pick_schedule("", a.preset, p);
  };
  const double best = ks::max_alpha_regular(make, {a.lo, a.hi, a.search_tol}, mode);
  const auto prof = ks::ExpanderProfile::regular(best);
  const auto trace = ks::amplification_run(prof, make(prof), mode, true);
  std::ostringstream csv;
  ks::write_trace_csv(csv, trace);
  write_text(fs::path(c.out) / "amplification_trace.csv", csv.str());
  Json body{{"max_alpha", best},
            {"search", Json{{"lo", a.lo}, {"hi", a.hi}, {"tol", a.search_tol}}},
            {"mode", a.mode},
            {"schedule", ks::to_json(make(prof))},
            {"trace_at_max_alpha", ks::to_json(trace)},
            {"min_ramanujan_degree", ks::min_ramanujan_degree(best)}};
  const auto path = write_report(c, sub, body, Json::object());
  std::cout << "threshold: max_alpha=" << best << " (" << path.string() << ")\n";
  return ExitCode::pass;
}

struct ErArgs {
  double n = 0, gamma = 0, eps = 0;
  std::size_t samples = 0;
};

int cmd_er_predict(const Common& c, const CLI::App& sub, const ErArgs& a) {
  const auto pred = ks::er_prediction(a.n, a.gamma, a.eps);
  Json body{{"prediction", ks::to_json(pred)},
            {"raw_failure_expression", ks::num(ks::er_failure_expression(a.n, a.gamma, a.eps))},
            {"chernoff_degree_bound", ks::num(ks::chernoff_degree_bound(a.n, a.gamma, a.eps))},
            {"verdict", pred.verdict}};
  Json seeds = Json::object();
  if (a.samples > 0) {
    const std::uint64_t base = require_seed(c, "for --samples");
    const auto n = static_cast<std::size_t>(a.n);
    if (static_cast<double>(n) != a.n) throw UsageError("--samples needs an integer --n");
    std::vector<std::vector<std::string>> rows(a.samples);
    parallel_for(a.samples, c.threads, [&](std::size_t i) {
      const std::uint64_t s = ks::derive_seed(base, i);
      const auto g = ks::gen_erdos_renyi(n, pred.p, s);
      const auto prof = ks::expander_profile(g, pred.d_ref, c.tol, "model_parameter");
      const auto e = ks::degree_extrema(g);
      rows[i] = {std::to_string(s), ks::csv_num(prof.alpha), ks::csv_num(prof.c_minus),
                 ks::csv_num(prof.c_plus), std::to_string(e.min), std::to_string(e.max)};
    });
    std::ostringstream csv;
    ks::write_table_csv(csv, {"seed", "measured_alpha", "measured_c_minus", "measured_c_plus", "d_min", "d_max"},
                        rows);
    write_text(fs::path(c.out) / "er_samples.csv", csv.str());
    seeds = Json{{"base", base}, {"per_sample", "derive_seed(base, sample)"}};
  }
  const auto path = write_report(c, sub, body, seeds);
  std::cout << "er-predict: alpha_pred=" << pred.alpha_pred << "; " << pred.verdict << " ("
            << path.string() << ")\n";
  return ExitCode::pass;
}

struct SweepArgs {
  std::string kind = "gamma-roots";
  double from = 1.001, to = 10.0;
  std::size_t points = 200;
  bool log_spaced = false;
};

int cmd_sweep(const Common& c, const CLI::App& sub, const SweepArgs& a) {
  if (a.points < 2) throw UsageError("--points must be >= 2");
  if (!(a.from < a.to)) throw UsageError("--from must be below --to");
  if (a.log_spaced && !(a.from > 0.0)) throw UsageError("log spacing needs --from > 0");
  std::vector<double> xs(a.points);
  for (std::size_t i = 0; i < a.points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(a.points - 1);
    xs[i] = a.log_spaced ? std::exp(std::log(a.from) + t * (std::log(a.to) - std::log(a.from)))
                         : a.from + t * (a.to - a.from);
  }
  std::vector<std::string> header;
  std::function<std::vector<std::string>(double)> row;
  if (a.kind == "gamma-roots") {
    header = {"gamma", "c_minus", "c_plus", "h_residual_minus", "h_residual_plus"};
    row = [](double g) {
      const auto r = ks::gamma_roots(g);
      return std::vector<std::string>{ks::csv_num(g), ks::csv_num(r.c_minus), ks::csv_num(r.c_plus),
                                      ks::csv_num(ks::h_func(r.c_minus) - 1.0 / g),
                                      ks::csv_num(ks::h_func(r.c_plus) - 1.0 / g)};
    };
  } else if (a.kind == "theorem-condition") {
    header = {"alpha", "condition1", "condition2", "verdict"};
    row = [](double al) {
      const auto r = ks::theorem_condition(ks::ExpanderProfile::regular(al));
      return std::vector<std::string>{ks::csv_num(al), ks::csv_num(r.condition1),
                                      ks::csv_num(r.condition2), ks::to_string(r.verdict)};
    };
  } else if (a.kind == "order-bounds") {
    header = {"alpha", "a_general", "a_regular", "b_general", "b_regular"};
    row = [](double al) {
      auto cell = [&](bool reg, bool want_a) {
        try {
          const auto b = ks::order_param_bounds(al, reg);
          return ks::csv_num(want_a ? b.a : b.b);
        } catch (const ks::DomainError&) {
          return std::string("nan");
        }
      };
      return std::vector<std::string>{ks::csv_num(al), cell(false, true), cell(true, true),
                                      cell(false, false), cell(true, false)};
    };
  } else {
    throw UsageError("--kind must be gamma-roots, theorem-condition or order-bounds");
  }
  std::vector<std::vector<std::string>> rows(a.points);
  parallel_for(a.points, c.threads, [&](std::size_t i) { rows[i] = row(xs[i]); });
  std::ostringstream csv;
  ks::write_table_csv(csv, header, rows);
  const fs::path csv_path = fs::path(c.out) / "sweep.csv";
  write_text(csv_path, csv.str());
  const auto path = write_report(
      c, sub, Json{{"kind", a.kind}, {"points", a.points}, {"csv", csv_path.string()}, {"columns", header}},
      Json::object());
  std::cout << "sweep: " << a.points << " rows to " << csv_path.string() << " (" << path.string()
            << ")\n";
  return ExitCode::pass;
}

void add_common(CLI::App* sub, Common& c, bool graph, bool seed = true) {
  sub->add_option("--out", c.out, "Output directory for reports and CSV files")->capture_default_str();
  if (seed) sub->add_option("--seed", c.seed, "64-bit seed (required for stochastic work)");
  sub->add_option("--tol", c.tol, "Relative eigenvalue accuracy (absolute tol * d_ref)")
      ->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
  if (graph) {
    sub->add_option("--graph", c.graph_path, "Edge-list file ('n m' header, then 'u v' lines, u < v)");
    sub->add_option("--gen", c.gen_spec,
                    "Generator: <cycle|path|complete|star|two_cliques_bridged>:N, er:N:P, "
                    "er-gamma:N:GAMMA or regular:N:D");
    sub->add_option("--d-ref", c.d_ref,
                    "Reference degree (default: model parameter if known, else average degree)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronization certificates for the homogeneous Kuramoto model on graphs"};
  app.set_config("--config", "", "Key-value config file (TOML/INI); command-line flags win");
  app.require_subcommand(1);
  app.footer(
      "CSV outputs:\n"
      "  amplification_trace.csv  k, beta_k, mass_frac, step_kind, mass_unit (ratio c_k/c_0 or fraction of n)\n"
      "  flow_trace.csv           time, energy, grad_norm, rho1\n"
      "  er_samples.csv           seed, measured_alpha, measured_c_minus, measured_c_plus, d_min, d_max\n"
      "  sweep.csv                depends on --kind; header row names the columns\n"
      "Exit status: 0 pass/success, 1 fail verdict, 2 error.");

  Common common;
  std::string graph_out;
  std::size_t mixing_trials = 0;
  bool mixing_entries = false;
  CertifyArgs cert;
  SimulateArgs sim;
  ThresholdArgs thr;
  ErArgs er;
  SweepArgs sw;

  auto* gen = app.add_subcommand("generate", "Generate a graph and write it as an edge list");
  add_common(gen, common, true);
  gen->add_option("--output-graph", graph_out, "Edge-list path (default <out>/graph.edges)");

  auto* prof = app.add_subcommand("profile", "Measure the expander profile of a graph");
  add_common(prof, common, true);
  prof->add_option("--mixing-trials", mixing_trials, "Random sets for the mixing-bound check (0 = skip)");
  prof->add_flag("--mixing-entries", mixing_entries, "Include every mixing entry in the report");

  auto* cer = app.add_subcommand("certify", "Certify global synchronization of a graph or asserted profile");
  add_common(cer, common, true);
  cer->add_option("--alpha", cert.alpha, "Asserted alpha (with --c-minus, --c-plus, or alone with --regular)");
  cer->add_option("--c-minus", cert.c_minus, "Asserted c_minus");
  cer->add_option("--c-plus", cert.c_plus, "Asserted c_plus");
  cer->add_flag("--regular", cert.regular, "Use the regular-graph order-parameter recursion");
  cer->add_option("--schedule", cert.schedule_path, "JSON list of steps [{kind, eps[, rho]}]");
  cer->add_option("--preset", cert.preset, "Schedule when --schedule is absent: preset or auto")
      ->capture_default_str();
  cer->add_option("--mode", cert.mode, "paper-proof or numeric")->capture_default_str();

  auto* simc = app.add_subcommand("simulate", "Gradient flow from random initial phases");
  add_common(simc, common, true);
  simc->add_option("--runs", sim.runs, "Number of random starts")->capture_default_str();
  simc->add_option("--grad-tol", sim.grad_tol, "Convergence threshold on ||grad E||_inf")->capture_default_str();
  simc->add_option("--step-cap", sim.step_cap, "Maximum accepted steps per run")->capture_default_str();
  simc->add_option("--trace-run", sim.trace_run, "Run whose energy trace goes to flow_trace.csv")
      ->capture_default_str();
  simc->add_option("--trace-every", sim.trace_every, "Record every k-th step of the traced run")
      ->capture_default_str();
  simc->add_flag("--expect-sync", sim.expect_sync, "Fail unless every run synchronizes");
  simc->add_flag("!--no-classify", sim.classify, "Skip Hessian classification of final states");

  auto* th = app.add_subcommand("threshold", "Largest certified alpha for regular expanders");
  add_common(th, common, false, false);
  th->add_option("--schedule", thr.schedule_path, "JSON list of steps [{kind, eps[, rho]}]");
  th->add_option("--preset", thr.preset, "Schedule when --schedule is absent: preset or auto")
      ->capture_default_str();
  th->add_option("--mode", thr.mode, "paper-proof or numeric")->capture_default_str();
  th->add_option("--lo", thr.lo, "Bracket lower end")->capture_default_str();
  th->add_option("--hi", thr.hi, "Bracket upper end")->capture_default_str();
  th->add_option("--search-tol", thr.search_tol, "Bisection tolerance")->capture_default_str();

  auto* erc = app.add_subcommand("er-predict", "Closed-form profile prediction for G(n, gamma log n / n)");
  add_common(erc, common, false);
  erc->add_option("--n", er.n, "Vertex count")->required();
  erc->add_option("--gamma", er.gamma, "Density multiplier gamma")->required();
  erc->add_option("--eps", er.eps, "Perturbation eps")->required();
  erc->add_option("--samples", er.samples, "Monte Carlo graphs to measure (0 = none)");

  auto* swc = app.add_subcommand("sweep", "Tabulate a closed form over a parameter grid");
  add_common(swc, common, false, false);
  swc->add_option("--kind", sw.kind, "gamma-roots, theorem-condition or order-bounds")->capture_default_str();
  swc->add_option("--from", sw.from, "Grid start")->capture_default_str();
  swc->add_option("--to", sw.to, "Grid end")->capture_default_str();
  swc->add_option("--points", sw.points, "Grid points")->capture_default_str();
  swc->add_flag("--log-spaced", sw.log_spaced, "Geometric instead of linear spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCode::error;
  }

  try {
    if (*gen) return cmd_generate(common, *gen, graph_out);
    if (*prof) return cmd_profile(common, *prof, mixing_trials, mixing_entries);
    if (*cer) return cmd_certify(common, *cer, cert);
    if (*simc) return cmd_simulate(common, *simc, sim);
    if (*th) return cmd_threshold(common, *th, thr);
    if (*erc) return cmd_er_predict(common, *erc, er);
    if (*swc) return cmd_sweep(common, *swc, sw);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return ExitCode::error;
  } catch (const ks::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode::error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode::error;
  }
  return ExitCode::error;
}
