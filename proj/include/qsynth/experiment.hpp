#pragma once

// Batch experiment harness. Three modes:
//   random_targets        -- fresh Haar target per trial
//   fixed_target_multi_init -- one target, different initializations
//   layer_sweep           -- one target/init pair per trial, rerun at each
//                            depth in the layer list (paired comparisons)
//
// Trial seeds derive from the master seed: trial t uses
// target_seed = derive_seed(master, 2t) and init_seed =
// derive_seed(master, 2t + 1); fixed-target mode replaces the target seed
// with derive_seed(master, 0). Runs are independent, so trials execute on a
// worker pool and land in their slot of the result vector; outputs do not
// depend on the job count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qsynth/io.hpp"
#include "qsynth/optimizer.hpp"
#include "qsynth/params.hpp"
#include "qsynth/skeletons.hpp"

namespace qsynth {

enum class ExperimentMode { RandomTargets, FixedTargetMultiInit, LayerSweep };
enum class Topology { Full, Star, Line, CustomGraph };

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::RandomTargets;
  int n_qubits = 2;
  Topology topology = Topology::Full;
  std::string graph_file;       // CustomGraph only
  std::vector<int> layers;      // single entry unless layer_sweep
  int trials = 1;
  OptimizerConfig optimizer{};  // rng_seed is ignored; seeds derive per trial
  std::uint64_t master_seed = 0;
  std::string output_dir = ".";
};

// For full topology `layers` counts slot layers (the l of an l-layer
// decomposition); for star/line/custom it counts CNOT layers.
inline Skeleton make_skeleton(Topology topology, int n_qubits, int layers,
                              const std::string& graph_file = {}) {
  switch (topology) {
    case Topology::Full:
      return full_skeleton(n_qubits, layers);
    case Topology::Star: {
      std::vector<int> leaves(n_qubits - 1);
      for (int i = 0; i < n_qubits - 1; ++i) leaves[i] = i + 1;
      return star_skeleton(0, leaves, layers);
    }
    case Topology::Line:
      return line_skeleton(n_qubits, layers);
    case Topology::CustomGraph: {
      const nlohmann::json j = parse_json_file(graph_file);
      CouplingGraph g;
      g.n_qubits = detail::require_field(j, "n_qubits").get<int>();
      for (const nlohmann::json& e : detail::require_field(j, "edges"))
        g.edges.push_back(CnotPair{e[0].get<int>(), e[1].get<int>()});
      return graph_skeleton(g, layers);
    }
  }
  throw std::logic_error("make_skeleton: unknown topology");
}

inline int auto_layers(Topology topology, int n_qubits,
                       const std::string& graph_file = {}) {
  if (topology == Topology::Full) return required_layers(n_qubits);
  return required_layers_constrained(
      [&](int l) { return make_skeleton(topology, n_qubits, std::max(l, 1), graph_file); },
      n_qubits);
}

struct TrialResult {
  int trial = 0;
  int layers = 0;
  std::uint64_t target_seed = 0;
  std::uint64_t init_seed = 0;
  SynthesisResult synthesis;
};

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  double success_rate = 0.0;
  double median_sweeps = 0.0;
  double cost_q25 = 0.0, cost_q50 = 0.0, cost_q75 = 0.0;
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
  if (cfg.trials < 1)
    throw std::invalid_argument("run_experiment: trials must be >= 1");
  if (cfg.layers.empty())
    throw std::invalid_argument("run_experiment: layer list must not be empty");
  if (cfg.mode != ExperimentMode::LayerSweep && cfg.layers.size() != 1)
    throw std::invalid_argument(
        "run_experiment: only layer_sweep mode takes several layer counts");

  struct Job {
    int trial;
    int layers;
  };
  std::vector<Job> jobs_list;
  for (int t = 0; t < cfg.trials; ++t)
    for (int l : cfg.layers) jobs_list.push_back(Job{t, l});

  ExperimentSummary out;
  out.config = cfg;
  out.trials.resize(jobs_list.size());

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= static_cast<int>(jobs_list.size()) || failed.load()) return;
      const Job job = jobs_list[i];
      TrialResult& res = out.trials[i];
      res.trial = job.trial;
      res.layers = job.layers;
      res.target_seed =
          cfg.mode == ExperimentMode::FixedTargetMultiInit
              ? derive_seed(cfg.master_seed, 0)
              : derive_seed(cfg.master_seed, 2 * static_cast<std::uint64_t>(job.trial));
      res.init_seed = cfg.mode == ExperimentMode::FixedTargetMultiInit
                          ? derive_seed(cfg.master_seed,
                                        static_cast<std::uint64_t>(job.trial) + 1)
                          : derive_seed(cfg.master_seed,
                                        2 * static_cast<std::uint64_t>(job.trial) + 1);
      try {
        const Skeleton skeleton =
            make_skeleton(cfg.topology, cfg.n_qubits, job.layers, cfg.graph_file);
        Rng target_rng(res.target_seed);
        const ComplexMatrix target = haar_random_unitary(cfg.n_qubits, target_rng);
        OptimizerConfig ocfg = cfg.optimizer;
        ocfg.rng_seed = res.init_seed;
        res.synthesis = synthesize(target, skeleton, ocfg);
      } catch (const std::exception& e) {
        // record and keep going; a failed trial must not sink the batch
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
        res.synthesis.status = Status::SweepBudgetExhausted;
        res.synthesis.final_cost = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  const int pool_size = std::max(1, jobs);
  if (pool_size == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  int converged = 0;
  std::vector<double> sweeps, costs;
  for (const TrialResult& r : out.trials) {
    converged += r.synthesis.status == Status::Converged ? 1 : 0;
    sweeps.push_back(static_cast<double>(r.synthesis.sweeps_used));
    costs.push_back(r.synthesis.final_cost);
  }
  out.success_rate = static_cast<double>(converged) / out.trials.size();
  out.median_sweeps = detail::quantile(sweeps, 0.5);
  out.cost_q25 = detail::quantile(costs, 0.25);
  out.cost_q50 = detail::quantile(costs, 0.5);
  out.cost_q75 = detail::quantile(costs, 0.75);
  return out;
}

// --- JSON round trip for configs and summaries ---

inline std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::RandomTargets: return "random_targets";
    case ExperimentMode::FixedTargetMultiInit: return "fixed_target_multi_init";
    case ExperimentMode::LayerSweep: return "layer_sweep";
  }
  return "?";
}

inline std::string to_string(Topology t) {
  switch (t) {
    case Topology::Full: return "full";
    case Topology::Star: return "star";
    case Topology::Line: return "line";
    case Topology::CustomGraph: return "custom";
  }
  return "?";
}

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::Plateaued: return "plateaued";
    case Status::SweepBudgetExhausted: return "sweep_budget_exhausted";
  }
  return "?";
}

inline std::string to_string(Variant v) {
  return v == Variant::SvdSweep ? "svd" : "gradient";
}

inline nlohmann::json optimizer_to_json(const OptimizerConfig& c) {
  return nlohmann::json{{"convergence_threshold", c.convergence_threshold},
                        {"plateau_window", c.plateau_window},
                        {"plateau_rel_improvement", c.plateau_rel_improvement},
                        {"max_sweeps", c.max_sweeps},
                        {"variant", to_string(c.variant)},
                        {"learning_rate", c.learning_rate}};
}

inline OptimizerConfig optimizer_from_json(const nlohmann::json& j) {
  OptimizerConfig c;
  if (j.contains("convergence_threshold"))
    c.convergence_threshold = j["convergence_threshold"].get<double>();
  if (j.contains("plateau_window")) c.plateau_window = j["plateau_window"].get<int>();
  if (j.contains("plateau_rel_improvement"))
    c.plateau_rel_improvement = j["plateau_rel_improvement"].get<double>();
  if (j.contains("max_sweeps")) c.max_sweeps = j["max_sweeps"].get<int>();
  if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("variant")) {
    const std::string v = j["variant"].get<std::string>();
    if (v == "svd")
      c.variant = Variant::SvdSweep;
    else if (v == "gradient")
      c.variant = Variant::EulerGradient;
    else
      throw ParseError("field \"variant\" must be \"svd\" or \"gradient\"");
  }
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"mode", to_string(c.mode)},
                   {"n_qubits", c.n_qubits},
                   {"topology", to_string(c.topology)},
                   {"layers", c.layers},
                   {"trials", c.trials},
                   {"optimizer", optimizer_to_json(c.optimizer)},
                   {"master_seed", c.master_seed},
                   {"output_dir", c.output_dir}};
  if (!c.graph_file.empty()) j["graph_file"] = c.graph_file;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  const std::string mode = detail::require_field(j, "mode").get<std::string>();
  if (mode == "random_targets")
    c.mode = ExperimentMode::RandomTargets;
  else if (mode == "fixed_target_multi_init")
    c.mode = ExperimentMode::FixedTargetMultiInit;
  else if (mode == "layer_sweep")
    c.mode = ExperimentMode::LayerSweep;
  else
    throw ParseError("field \"mode\" has unknown value \"" + mode + "\"");
  c.n_qubits = detail::require_field(j, "n_qubits").get<int>();
  const std::string topo = detail::require_field(j, "topology").get<std::string>();
  if (topo == "full")
    c.topology = Topology::Full;
  else if (topo == "star")
    c.topology = Topology::Star;
  else if (topo == "line")
    c.topology = Topology::Line;
  else if (topo == "custom")
    c.topology = Topology::CustomGraph;
  else
    throw ParseError("field \"topology\" has unknown value \"" + topo + "\"");
  if (j.contains("graph_file")) c.graph_file = j["graph_file"].get<std::string>();
  const nlohmann::json& jl = detail::require_field(j, "layers");
  if (jl.is_number_integer())
    c.layers = {jl.get<int>()};
  else
    c.layers = jl.get<std::vector<int>>();
  if (c.layers.empty()) throw ParseError("field \"layers\" must not be empty");
  c.trials = detail::require_field(j, "trials").get<int>();
  if (c.trials < 1) throw ParseError("field \"trials\" must be >= 1");
  if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j["optimizer"]);
  c.master_seed = detail::require_field(j, "master_seed").get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  return c;
}

inline nlohmann::json summary_to_json(const ExperimentSummary& s) {
  nlohmann::json trials = nlohmann::json::array();
  for (const TrialResult& r : s.trials)
    trials.push_back(nlohmann::json{{"trial", r.trial},
                                    {"layers", r.layers},
                                    {"target_seed", r.target_seed},
                                    {"init_seed", r.init_seed},
                                    {"status", to_string(r.synthesis.status)},
                                    {"final_cost", r.synthesis.final_cost},
                                    {"sweeps_used", r.synthesis.sweeps_used}});
  return nlohmann::json{{"config", config_to_json(s.config)},
                        {"trials", std::move(trials)},
                        {"success_rate", s.success_rate},
                        {"median_sweeps", s.median_sweeps},
                        {"cost_quantiles",
                         nlohmann::json{{"q25", s.cost_q25},
                                        {"q50", s.cost_q50},
                                        {"q75", s.cost_q75}}}};
}

inline std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::string csv = "sweep,cost,wall_seconds\n";
  char buf[96];
  for (const TracePoint& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.6f\n", t.sweep, t.cost,
                  t.wall_seconds);
    csv += buf;
  }
  return csv;
}

}  // namespace qsynth
