// Command-line front end: skeleton generation, synthesis runs, batch
// experiments, parameter analysis, failure statistics and SVG plots.
//
// Exit codes for `synth`: 0 converged, 2 plateaued, 3 sweep budget
// exhausted, 1 usage or input errors.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsynth/qsynth.hpp"
#include "qsynth/svg.hpp"

namespace fs = std::filesystem;
using namespace qsynth;

namespace {

struct SkeletonFlags {
  int n = 0;
  std::string topology = "full";
  std::string layers = "auto";
  std::string graph_file;
  int cnots = 0;  // sequential topology
};

void add_skeleton_flags(CLI::App* cmd, SkeletonFlags& f) {
  cmd->add_option("--n", f.n, "number of qubits")->required();
  cmd->add_option("--topology", f.topology,
                  "full | star | line | custom | sequential")
      ->check(CLI::IsMember({"full", "star", "line", "custom", "sequential"}));
  cmd->add_option("--layers", f.layers,
                  "depth, or 'auto' for the smallest adequate depth "
                  "(slot layers for full topology, CNOT layers otherwise)");
  cmd->add_option("--graph", f.graph_file,
                  "coupling graph JSON {\"n_qubits\":..,\"edges\":[[a,b],..]} "
                  "(custom topology)");
  cmd->add_option("--cnots", f.cnots, "CNOT count (sequential topology)");
}

Topology topology_from_string(const std::string& s) {
  if (s == "full") return Topology::Full;
  if (s == "star") return Topology::Star;
  if (s == "line") return Topology::Line;
  if (s == "custom") return Topology::CustomGraph;
  throw CLI::ValidationError("--topology", "unknown topology " + s);
}

Skeleton build_skeleton(const SkeletonFlags& f, std::uint64_t seed) {
  if (f.topology == "sequential") {
    if (f.cnots < 1)
      throw CLI::ValidationError("--cnots", "sequential topology needs --cnots >= 1");
    Rng rng(seed);
    return sequential_random_skeleton(f.n, f.cnots, rng);
  }
  const Topology topo = topology_from_string(f.topology);
  int layers;
  if (f.layers == "auto") {
    if (topo == Topology::Full && f.n % 2 != 0)
      throw CLI::ValidationError(
          "--topology",
          "full topology pairs all qubits each layer (1-factorization needs "
          "an even qubit count); use star, line or custom");
    layers = auto_layers(topo, f.n, f.graph_file);
  } else {
    layers = std::stoi(f.layers);
  }
  return make_skeleton(topo, f.n, layers, f.graph_file);
}

ComplexMatrix load_target(const std::string& path, int expected_qubits) {
  const ComplexMatrix u = matrix_from_json(parse_json_file(path));
  const Eigen::Index want = Eigen::Index{1} << expected_qubits;
  if (u.rows() != want)
    throw std::runtime_error("target has dim " + std::to_string(u.rows()) +
                             ", skeleton needs " + std::to_string(want));
  const double err = unitarity_error(u);
  if (err > 1e-10)
    throw std::runtime_error("target is not unitary: max-abs(U^dag U - I) = " +
                             std::to_string(err));
  return u;
}

std::vector<SvgSeries> load_traces(const std::vector<std::string>& paths) {
  std::vector<SvgSeries> series;
  for (const std::string& path : paths) {
    SvgSeries s;
    s.label = fs::path(path).filename().string();
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.rfind("sweep", 0) == 0) continue;
      double x = 0, y = 0;
      if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) == 2) s.points.push_back({x, y});
    }
    if (s.points.empty())
      throw std::runtime_error("trace " + path + " has no data rows");
    series.push_back(std::move(s));
  }
  return series;
}

int status_exit_code(Status s) {
  switch (s) {
    case Status::Converged: return 0;
    case Status::Plateaued: return 2;
    case Status::SweepBudgetExhausted: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circuit synthesis for dense unitaries via sweeping descent"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::uint64_t seed = 12345;
  std::string output_dir = ".";
  int jobs = 1;
  bool quiet = false;
  app.add_option("--seed", seed, "master seed (default 12345)");
  app.add_option("--output-dir", output_dir, "directory for output files");
  app.add_option("--jobs", jobs, "worker threads for batch commands");
  app.add_flag("--quiet", quiet, "suppress progress output");

  // skeleton
  SkeletonFlags skel_flags;
  std::string skel_out;
  CLI::App* cmd_skeleton = app.add_subcommand("skeleton", "emit a circuit skeleton as JSON");
  add_skeleton_flags(cmd_skeleton, skel_flags);
  cmd_skeleton->add_option("-o,--out", skel_out, "output file (default stdout)");

  // synth
  SkeletonFlags synth_skel;
  std::string target_file;
  std::optional<std::uint64_t> haar_seed;
  bool emit_qasm = false;
  OptimizerConfig ocfg;
  std::string variant = "svd";
  CLI::App* cmd_synth = app.add_subcommand("synth", "synthesize one target unitary");
  add_skeleton_flags(cmd_synth, synth_skel);
  cmd_synth->add_option("--target", target_file, "target unitary JSON file");
  cmd_synth->add_option("--haar-seed", haar_seed, "draw a Haar-random target from this seed");
  cmd_synth->add_option("--variant", variant, "svd | gradient")
      ->check(CLI::IsMember({"svd", "gradient"}));
  cmd_synth->add_option("--threshold", ocfg.convergence_threshold, "convergence threshold on the cost");
  cmd_synth->add_option("--max-sweeps", ocfg.max_sweeps, "sweep budget");
  cmd_synth->add_option("--plateau-window", ocfg.plateau_window, "plateau detection window, sweeps");
  cmd_synth->add_option("--plateau-rel", ocfg.plateau_rel_improvement,
                        "relative improvement below which the window counts as flat");
  cmd_synth->add_option("--lr", ocfg.learning_rate, "learning rate (gradient variant)");
  cmd_synth->add_flag("--qasm", emit_qasm, "also write OpenQASM 2.0");

  // experiment
  std::string config_file;
  CLI::App* cmd_experiment = app.add_subcommand("experiment", "run a batch experiment from a config file");
  cmd_experiment->add_option("--config", config_file, "experiment config JSON")->required();

  // analyze
  SkeletonFlags an_skel;
  std::string an_circuit, an_method = "auto", an_out;
  CLI::App* cmd_analyze = app.add_subcommand("analyze", "effective-parameter report for a skeleton");
  cmd_analyze->add_option("--circuit", an_circuit, "circuit JSON file (overrides generator flags)");
  add_skeleton_flags(cmd_analyze, an_skel);
  cmd_analyze->get_option("--n")->required(false);
  cmd_analyze->add_option("--method", an_method, "auto | numeric | combinatorial")
      ->check(CLI::IsMember({"auto", "numeric", "combinatorial"}));
  cmd_analyze->add_option("-o,--out", an_out, "write the report as JSON");

  // failprob
  int fp_n = 3, fp_cnots = 14, fp_cnots_to = -1, fp_samples = 0;
  bool fp_exact = false;
  std::string fp_out;
  CLI::App* cmd_failprob = app.add_subcommand("failprob", "adequacy statistics of random sequential skeletons");
  cmd_failprob->add_option("--n", fp_n, "number of qubits")->required();
  cmd_failprob->add_option("--cnots", fp_cnots, "CNOT count (range start)")->required();
  cmd_failprob->add_option("--cnots-to", fp_cnots_to, "range end, inclusive");
  cmd_failprob->add_flag("--exact", fp_exact, "exact count by dynamic programming (n = 3 only)");
  cmd_failprob->add_option("--samples", fp_samples, "Monte-Carlo sample count");
  cmd_failprob->add_option("-o,--out", fp_out, "also write rows as CSV");

  // plot
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  bool plot_logx = false;
  CLI::App* cmd_plot = app.add_subcommand("plot", "render convergence traces as an SVG chart");
  cmd_plot->add_option("traces", plot_inputs, "trace CSV files")->required();
  cmd_plot->add_option("-o,--out", plot_out, "output SVG file")->required();
  cmd_plot->add_flag("--log-x", plot_logx, "log-scale the x axis");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_skeleton) {
      const Skeleton s = build_skeleton(skel_flags, seed);
      const ParamAssignment zeros(s.slot_count());
      const std::string text = circuit_to_json(s, zeros).dump(2) + "\n";
      if (skel_out.empty())
        std::cout << text;
      else
        write_text_file(skel_out, text);
      if (!quiet)
        std::cerr << "skeleton: n=" << s.n_qubits() << " cnot_layers="
                  << s.cnot_layers().size() << " s_layers=" << s.s_layer_count()
                  << " slots=" << s.slot_count() << "\n";
      return 0;
    }

    if (*cmd_synth) {
      const Skeleton s = build_skeleton(synth_skel, seed);
      ComplexMatrix target;
      nlohmann::json target_desc;
      if (!target_file.empty()) {
        target = load_target(target_file, s.n_qubits());
        target_desc = {{"file", target_file}};
      } else {
        const std::uint64_t hs = haar_seed.value_or(seed);
        Rng rng(hs);
        target = haar_random_unitary(s.n_qubits(), rng);
        target_desc = {{"haar_seed", hs}};
      }
      ocfg.variant = variant == "svd" ? Variant::SvdSweep : Variant::EulerGradient;
      ocfg.rng_seed = derive_seed(seed, 1);
      const SynthesisResult res = synthesize(target, s, ocfg);

      fs::create_directories(output_dir);
      const fs::path dir(output_dir);
      nlohmann::json result_json{
          {"status", to_string(res.status)},
          {"final_cost", res.final_cost},
          {"sweeps_used", res.sweeps_used},
          {"seed", res.seed},
          {"n_qubits", s.n_qubits()},
          {"s_layers", s.s_layer_count()},
          {"cnot_layers", s.cnot_layers().size()},
          {"target", target_desc},
          {"optimizer", optimizer_to_json(ocfg)}};
      write_text_file((dir / "result.json").string(), result_json.dump(2) + "\n");
      write_text_file((dir / "trace.csv").string(), trace_to_csv(res.trace));
      write_text_file((dir / "circuit.json").string(),
                      circuit_to_json(s, res.params).dump(2) + "\n");
      if (emit_qasm)
        write_text_file((dir / "circuit.qasm").string(), export_qasm(s, res.params));
      if (!quiet)
        std::cerr << "synth: " << to_string(res.status)
                  << " final_cost=" << res.final_cost
                  << " sweeps=" << res.sweeps_used << "\n";
      return status_exit_code(res.status);
    }

    if (*cmd_experiment) {
      ExperimentConfig cfg = config_from_json(parse_json_file(config_file));
      if (output_dir != ".") cfg.output_dir = output_dir;
      const auto t0 = std::chrono::steady_clock::now();
      const std::time_t started = std::time(nullptr);
      const ExperimentSummary summary = run_experiment(cfg, jobs);
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      fs::create_directories(cfg.output_dir);
      const fs::path dir(cfg.output_dir);
      write_text_file((dir / "summary.json").string(),
                      summary_to_json(summary).dump(2) + "\n");
      std::string csv = "trial,layers,target_seed,init_seed,status,final_cost,sweeps_used\n";
      for (const TrialResult& r : summary.trials) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%d,%llu,%llu,%s,%.17g,%d\n", r.trial,
                      r.layers, static_cast<unsigned long long>(r.target_seed),
                      static_cast<unsigned long long>(r.init_seed),
                      to_string(r.synthesis.status).c_str(), r.synthesis.final_cost,
                      r.synthesis.sweeps_used);
        csv += buf;
      }
      write_text_file((dir / "trials.csv").string(), csv);
      for (const TrialResult& r : summary.trials) {
        const std::string name =
            "trace_trial" + std::to_string(r.trial) + "_l" + std::to_string(r.layers) + ".csv";
        write_text_file((dir / name).string(), trace_to_csv(r.synthesis.trace));
      }
      // wall-clock facts live apart from the deterministic outputs
      write_text_file((dir / "metadata.json").string(),
                      nlohmann::json{{"started_at_unix", started},
                                     {"elapsed_seconds", elapsed},
                                     {"jobs", jobs}}.dump(2) + "\n");
      if (!quiet)
        std::cerr << "experiment: " << summary.trials.size() << " runs, success_rate="
                  << summary.success_rate << " median_sweeps=" << summary.median_sweeps
                  << " -> " << cfg.output_dir << "\n";
      return 0;
    }

    if (*cmd_analyze) {
      Skeleton s;
      if (!an_circuit.empty()) {
        s = circuit_from_json(parse_json_file(an_circuit)).first;
      } else if (an_skel.n > 0) {
        s = build_skeleton(an_skel, seed);
      } else {
        std::cerr << "analyze: pass --circuit or generator flags (--n ...)\n";
        return 1;
      }
      ParamReport rep;
      if (an_method == "combinatorial") {
        rep = effective_parameters_combinatorial(s);
      } else if (an_method == "numeric") {
        rep = effective_parameters_numeric(s);
      } else {
        JacobianOptions opt;
        if (3 * s.slot_count() <= opt.budget)
          rep = effective_parameters_numeric(s, opt);
        else
          rep = effective_parameters_combinatorial(s);
      }
      std::printf("n_qubits   : %d\n", s.n_qubits());
      std::printf("cnot_layers: %zu\n", s.cnot_layers().size());
      std::printf("s_layers   : %d\n", s.s_layer_count());
      std::printf("nominal    : %d\n", rep.nominal);
      std::printf("effective  : %d\n", rep.effective);
      std::printf("required   : %d\n", rep.required);
      std::printf("adequate   : %s\n", rep.adequate ? "yes" : "no");
      std::printf("method     : %s\n", rep.method == CountMethod::JacobianRank
                                           ? "jacobian-rank"
                                           : "combinatorial");
      if (!an_out.empty())
        write_text_file(
            an_out,
            nlohmann::json{{"n_qubits", s.n_qubits()},
                           {"cnot_layers", s.cnot_layers().size()},
                           {"s_layers", s.s_layer_count()},
                           {"nominal", rep.nominal},
                           {"effective", rep.effective},
                           {"required", rep.required},
                           {"adequate", rep.adequate},
                           {"method", rep.method == CountMethod::JacobianRank
                                          ? "jacobian-rank"
                                          : "combinatorial"}}.dump(2) + "\n");
      return rep.adequate ? 0 : 2;
    }

    if (*cmd_failprob) {
      if (fp_exact && fp_n != 3) {
        std::cerr << "failprob: --exact is available for n = 3 only; use --samples\n";
        return 1;
      }
      if (!fp_exact && fp_samples < 1) {
        std::cerr << "failprob: pass --exact (n = 3) or --samples K\n";
        return 1;
      }
      const int hi = fp_cnots_to < 0 ? fp_cnots : fp_cnots_to;
      std::string csv = fp_exact ? "n_cnots,adequate,total,rate\n"
                                 : "n_cnots,adequate,samples,rate,std_error\n";
      std::printf(fp_exact ? "%8s %16s %16s %9s\n" : "%8s %10s %10s %9s %9s\n",
                  "n_cnots", "adequate", fp_exact ? "total" : "samples", "rate",
                  fp_exact ? "" : "stderr");
      for (int N = fp_cnots; N <= hi; ++N) {
        char buf[160];
        if (fp_exact) {
          const SequenceCount c = count_adequate_sequences(fp_n, N);
          std::printf("%8d %16llu %16llu %8.3f%%\n", N,
                      static_cast<unsigned long long>(c.adequate),
                      static_cast<unsigned long long>(c.total), 100.0 * c.rate);
          std::snprintf(buf, sizeof buf, "%d,%llu,%llu,%.10g\n", N,
                        static_cast<unsigned long long>(c.adequate),
                        static_cast<unsigned long long>(c.total), c.rate);
        } else {
          Rng rng(derive_seed(seed, static_cast<std::uint64_t>(N)));
          MonteCarloOptions opt;
          opt.jobs = jobs;
          const MonteCarloRate r =
              success_rate_monte_carlo(fp_n, N, fp_samples, rng, opt);
          std::printf("%8d %10d %10d %8.2f%% %8.2f%%\n", N, r.adequate, r.samples,
                      100.0 * r.rate, 100.0 * r.std_error);
          std::snprintf(buf, sizeof buf, "%d,%d,%d,%.10g,%.10g\n", N, r.adequate,
                        r.samples, r.rate, r.std_error);
        }
        csv += buf;
      }
      if (!fp_out.empty()) write_text_file(fp_out, csv);
      return 0;
    }

    if (*cmd_plot) {
      SvgOptions opt;
      opt.log_x = plot_logx;
      write_text_file(plot_out, render_line_chart(load_traces(plot_inputs), opt));
      if (!quiet) std::cerr << "plot: wrote " << plot_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
