#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "promind/sim.hpp"
#include "promind/trace.hpp"

namespace fs = std::filesystem;
using namespace promind;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

fs::path ladder_csv_path(const fs::path& solution_path, std::size_t cycle) {
  fs::path p = solution_path;
  if (cycle == 0) return p.replace_extension(".csv");
  const std::string stem = p.stem().string() + "_" + std::to_string(cycle + 1);
  return p.replace_filename(stem + ".csv");
}

std::vector<Strategy> parse_strategy_list(const std::string& csv) {
  std::vector<Strategy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_strategy(item));
  }
  if (out.empty()) throw std::invalid_argument("no strategies given");
  return out;
}

void print_metrics(std::ostream& os, Strategy strategy, const EpisodeMetrics& m) {
  os << std::fixed << std::setprecision(3);
  os << "strategy      " << to_string(strategy) << "\n"
     << "completed     " << (m.completed ? "yes" : "no (timeout)") << "\n"
     << "duration      " << m.duration << " s\n"
     << "idle          " << m.idle_percent << " %\n"
     << "d_min         " << m.d_min << " m\n"
     << "v_mean        " << m.v_mean << " m/s\n"
     << "stops         " << m.stops << "\n"
     << "morph ticks   " << m.morphs << "\n"
     << "replans       " << m.replans << "\n"
     << "ticks         " << m.ticks << "\n";
  os << "cycles        ";
  for (std::size_t i = 0; i < m.cycle_durations.size(); ++i) {
    os << (i ? " " : "") << m.cycle_durations[i];
  }
  os << "\n";
}

int cmd_optimize(const std::string& scenario_path, bool has_seed, std::uint64_t seed,
                 const std::string& out_path) {
  Scenario sc = load_scenario(scenario_path);
  if (has_seed) sc.optimizer.seed = seed;
  const ScenarioSolution sol = optimize_scenario(sc);

  open_output(out_path) << solution_to_json(sol) << "\n";
  std::cout << std::fixed << std::setprecision(3);
  for (std::size_t c = 0; c < sol.cycles.size(); ++c) {
    const fs::path csv = ladder_csv_path(out_path, c);
    auto out = open_output(csv);
    write_ladder_csv(sol.cycles[c].ladder, out);
    const SolutionLadder& ladder = sol.cycles[c].ladder;
    std::cout << "cycle " << c + 1 << ": front " << sol.cycles[c].front.size()
              << " entries, ladder " << ladder.size() << ", duration "
              << ladder.at(ladder.size()).f_time / 6.0 << " .. " << ladder.at(1).f_time / 6.0
              << " s, ladder csv " << csv.string() << "\n";
  }
  std::cout << "solution " << out_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& trace_path,
                 const std::string& strategy_name, const std::string& ladder_path,
                 const std::string& out_dir) {
  const Scenario sc = load_scenario(scenario_path);
  const Trace trace = load_trace(trace_path);
  const Strategy strategy =
      strategy_name.empty() ? sc.strategy : parse_strategy(strategy_name);
  const ScenarioSolution sol =
      ladder_path.empty() ? optimize_scenario(sc) : load_solution(ladder_path);
  if (ladder_path.empty()) {
    std::cout << "no ladder given, optimized in process (seed " << sc.optimizer.seed
              << ")\n";
  }
  const EpisodeResult result = run_episode(sc, sol, trace, strategy);
  write_run_dir(result, out_dir);
  print_metrics(std::cout, strategy, result.metrics);
  std::cout << "run data " << out_dir << "\n";
  return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& traces_dir,
                const std::string& strategies_csv, const std::string& ladder_path,
                const std::string& out_path) {
  const Scenario sc = load_scenario(scenario_path);
  const std::vector<Strategy> strategies = parse_strategy_list(strategies_csv);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(traces_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".csv" || ext == ".jsonl" || ext == ".ndjson") files.push_back(entry.path());
  }
  // Directory iteration order is unspecified; sort for a stable table.
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no trace files in " + traces_dir);

  std::vector<Trace> traces;
  traces.reserve(files.size());
  for (const fs::path& f : files) traces.push_back(load_trace(f.string()));

  const ScenarioSolution sol =
      ladder_path.empty() ? optimize_scenario(sc) : load_solution(ladder_path);
  const auto summaries = compare_strategies(sc, sol, traces, strategies);

  auto out = open_output(out_path);
  if (fs::path(out_path).extension() == ".json") {
    out << compare_to_json(summaries) << "\n";
  } else {
    write_compare_csv(summaries, out);
  }
  write_compare_csv(summaries, std::cout);
  std::cout << "episodes " << files.size() << " per strategy, table " << out_path << "\n";
  return 0;
}

int cmd_gen_trace(const std::string& profile_name, double duration, std::uint64_t seed,
                  double sample_rate, double rr_baseline, const std::string& out_path) {
  TraceGenConfig cfg;
  cfg.sample_rate = sample_rate;
  cfg.rr_baseline = rr_baseline;
  const Trace trace =
      generate_trace(parse_trace_profile(profile_name), duration, seed, cfg);
  if (fs::path(out_path).has_parent_path()) {
    fs::create_directories(fs::path(out_path).parent_path());
  }
  save_trace(trace, out_path);
  std::cout << "trace " << out_path << ": " << trace.size() << " rows, "
            << std::fixed << std::setprecision(3) << trace.duration() << " s, "
            << trace.rr_count() << " RR samples\n";
  return 0;
}

int cmd_plot_data(const std::string& run_dir, const std::string& out_dir) {
  const RunData run = load_run_dir(run_dir);
  write_plot_data(run, out_dir);
  std::cout << "plot data " << out_dir << ": " << run.ticks.size() << " ticks, "
            << run.pacing.size() << " pacing windows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-aware trajectory pacing: optimize, simulate, and compare"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, traces_dir, ladder_path, out_path, run_dir;
  std::string strategy_name, strategies_csv = "promind,vs,emu,no-human";
  std::string profile_name;
  std::uint64_t seed = 1;
  double duration = 300.0, sample_rate = 50.0, rr_baseline = 0.85;

  CLI::App* optimize = app.add_subcommand(
      "optimize", "Build the time/jerk ladder for every cycle of a scenario");
  optimize->add_option("--scenario", scenario_path, "Scenario JSON")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* seed_opt =
      optimize->add_option("--seed", seed, "Override the scenario optimizer seed");
  optimize->add_option("--out", out_path, "Solution JSON output (ladder CSVs sit beside it)")
      ->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one episode of a scenario against a trace");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--trace", trace_path, "Human trace (CSV or JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--strategy", strategy_name,
                       "promind, vs, emu, fixed-min-time, fixed-min-jerk, no-human "
                       "(default: scenario strategy)");
  simulate->add_option("--ladder", ladder_path, "Solution JSON from optimize")
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", run_dir, "Run directory for episode artifacts")->required();

  CLI::App* compare = app.add_subcommand(
      "compare", "Aggregate fluency metrics for several strategies over a trace set");
  compare->add_option("--scenario", scenario_path, "Scenario JSON")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--traces", traces_dir, "Directory of trace files")
      ->required()
      ->check(CLI::ExistingDirectory);
  compare->add_option("--strategies", strategies_csv, "Comma-separated strategy list");
  compare->add_option("--ladder", ladder_path, "Solution JSON from optimize")
      ->check(CLI::ExistingFile);
  compare->add_option("--out", out_path, "Table output, .json for JSON, CSV otherwise")
      ->required();

  CLI::App* gen = app.add_subcommand("gen-trace", "Generate a synthetic human trace");
  gen->add_option("--profile", profile_name, "calm, intrusive, or stressed")->required();
  gen->add_option("--duration", duration, "Trace length in seconds");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--sample-rate", sample_rate, "Rows per second");
  gen->add_option("--rr-baseline", rr_baseline, "Resting RR interval in seconds");
  gen->add_option("--out", out_path, "Trace output (.csv, .jsonl, or .ndjson)")->required();

  CLI::App* plot = app.add_subcommand("plot-data", "Flatten a run directory for plotting");
  plot->add_option("--run", run_dir, "Run directory written by simulate")
      ->required()
      ->check(CLI::ExistingDirectory);
  plot->add_option("--out", out_path, "Output directory for tidy CSV files")->required();

  try {
    app.parse(argc, argv);
    if (optimize->parsed()) {
      return cmd_optimize(scenario_path, seed_opt->count() > 0, seed, out_path);
    }
    if (simulate->parsed()) {
      return cmd_simulate(scenario_path, trace_path, strategy_name, ladder_path, run_dir);
    }
    if (compare->parsed()) {
      return cmd_compare(scenario_path, traces_dir, strategies_csv, ladder_path, out_path);
    }
    if (gen->parsed()) {
      return cmd_gen_trace(profile_name, duration, seed, sample_rate, rr_baseline, out_path);
    }
    if (plot->parsed()) {
      return cmd_plot_data(run_dir, out_path);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
