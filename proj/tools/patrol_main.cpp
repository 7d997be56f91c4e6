// patrol: evaluate, optimize and stress Markov-chain patrol strategies.
//
//   patrol eval      --graph G --chain C --out metrics.json
//   patrol optimize  --graph G --objective return-entropy --out result.json
//   patrol intruder  --graph G --chain C1 --chain C2 --tau-range 1..12 --out dir
//
// --graph accepts a JSON file or a builtin: ring:N, grid:RxC, complete:N, sf.

#include "patrol/builders.hpp"
#include "patrol/graph.hpp"
#include "patrol/intruder.hpp"
#include "patrol/io.hpp"
#include "patrol/metrics.hpp"
#include "patrol/optimize.hpp"
#include "patrol/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitOptimization = 3;

struct GraphSource {
  patrol::WeightedDigraph graph;
  patrol::StationaryDistribution pi;
  std::string description;
};

GraphSource resolve_graph(const std::string& spec_str) {
  auto starts_with = [&](const char* prefix) { return spec_str.rfind(prefix, 0) == 0; };
  if (spec_str == "sf" || spec_str == "sf_crime_map") {
    auto built = patrol::sf_crime_map();
    return {std::move(built.graph), std::move(built.pi), "builtin:sf"};
  }
  if (starts_with("ring:")) {
    int n = std::stoi(spec_str.substr(5));
    auto built = patrol::ring_graph(n);
    return {std::move(built.graph), std::move(built.pi), spec_str};
  }
  if (starts_with("grid:")) {
    std::string dims = spec_str.substr(5);
    auto x = dims.find('x');
    if (x == std::string::npos) throw std::invalid_argument("grid spec must look like grid:RxC");
    int rows = std::stoi(dims.substr(0, x));
    int cols = std::stoi(dims.substr(x + 1));
    auto built = patrol::grid_graph(rows, cols);
    return {std::move(built.graph), std::move(built.pi), spec_str};
  }
  if (starts_with("complete:")) {
    int n = std::stoi(spec_str.substr(9));
    auto built = patrol::complete_graph(n);
    return {std::move(built.graph), std::move(built.pi), spec_str};
  }
  patrol::LoadedGraph loaded = patrol::load_graph(spec_str);
  if (loaded.weights_normalized)
    std::cerr << "warning: travel times shared a common factor " << loaded.removed_factor
              << "; weights were normalized\n";
  return {std::move(loaded.graph), std::move(loaded.pi), spec_str};
}

void write_manifest(const fs::path& out_path, const std::string& command, const json& inputs,
                    const json& config, std::uint64_t seed, double wall_time_s) {
  json manifest;
  manifest["command"] = command;
  manifest["inputs"] = inputs;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["version"] = patrol::kVersion;
  manifest["wall_time_s"] = wall_time_s;
  std::ofstream out(out_path);
  out << manifest.dump(2) << "\n";
}

int report_validation_failure(const patrol::ValidationReport& report) {
  std::cerr << "chain is not feasible for this graph/pi/eps:\n";
  for (const auto& v : report.violations)
    std::cerr << "  " << v.family << ": worst residual " << v.residual << " (" << v.detail
              << ")\n";
  return kExitValidation;
}

std::vector<int> parse_tau_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos)
    throw std::invalid_argument("tau range must look like a..b");
  int a = std::stoi(text.substr(0, dots));
  int b = std::stoi(text.substr(dots + 2));
  if (a < 1 || b < a) throw std::invalid_argument("tau range must satisfy 1 <= a <= b");
  std::vector<int> out;
  for (int t = a; t <= b; ++t) out.push_back(t);
  return out;
}

int run_eval(const std::string& graph_arg, const std::string& chain_arg, double eta_eval,
             double eps, bool bits, const std::string& out_arg, const std::string& dist_dir) {
  auto t0 = std::chrono::steady_clock::now();
  GraphSource src = resolve_graph(graph_arg);
  patrol::TransitionMatrix chain = patrol::load_chain(chain_arg);
  patrol::FeasibleSetSpec spec(src.graph, src.pi, eps);
  if (chain.size() != src.graph.node_count())
    throw std::invalid_argument("chain dimension does not match graph");
  patrol::ValidationReport report = patrol::validate_chain(chain, spec);
  if (!report.ok()) return report_validation_failure(report);

  patrol::ChainMetrics metrics = patrol::evaluate_all(chain, spec, eta_eval);
  json out = patrol::chain_metrics_to_json(metrics);
  std::ofstream f(out_arg);
  if (!f) throw std::runtime_error("cannot write " + out_arg);
  f << out.dump(2) << "\n";

  if (!dist_dir.empty()) {
    fs::create_directories(dist_dir);
    for (int i = 0; i < src.graph.node_count(); ++i) {
      patrol::ReturnTimeDistribution dist =
          patrol::return_time_distribution(chain, src.graph, i, metrics.N_eta);
      std::ofstream csv(fs::path(dist_dir) / ("node_" + std::to_string(i) + ".csv"));
      csv << patrol::to_csv(dist);
    }
  }

  const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
  const char* unit = bits ? "bits" : "nats";
  std::cout << "J        = " << metrics.J * scale << " " << unit << "\n"
            << "J_trunc  = " << metrics.J_trunc * scale << " " << unit << "\n"
            << "J_cond   = " << metrics.J_cond * scale << " " << unit << "\n"
            << "H_rate   = " << metrics.H_rate * scale << " " << unit << "/step\n"
            << "kemeny   = " << metrics.kemeny << " time units\n";

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_arg + ".manifest.json", "eval",
                 json{{"graph", graph_arg}, {"chain", chain_arg}},
                 json{{"eta_eval", eta_eval}, {"eps", eps}, {"bits", bits},
                      {"dist_out", dist_dir}},
                 0, wall);
  return kExitOk;
}

int run_optimize(const std::string& graph_arg, const std::string& objective_arg, double eta,
                 double eps, int starts, std::uint64_t seed, int max_iters, int threads,
                 const std::string& out_arg) {
  auto t0 = std::chrono::steady_clock::now();
  GraphSource src = resolve_graph(graph_arg);
  patrol::FeasibleSetSpec spec(src.graph, src.pi, eps);

  patrol::Objective objective;
  if (objective_arg == "return-entropy") objective = patrol::Objective::return_entropy;
  else if (objective_arg == "entropy-rate") objective = patrol::Objective::entropy_rate;
  else if (objective_arg == "min-kemeny") objective = patrol::Objective::min_kemeny;
  else throw std::invalid_argument("unknown objective: " + objective_arg);

  patrol::OptimizerConfig config;
  config.eta = eta;
  config.starts = starts;
  config.seed = seed;
  config.max_iters = max_iters;
  config.threads = threads;

  patrol::OptimizeResult result;
  try {
    result = patrol::optimize_chain(objective, spec, config);
  } catch (const std::exception& e) {
    std::cerr << "optimization failed: " << e.what() << "\n";
    return kExitOptimization;
  }

  const int n = result.chain.size();
  json out;
  out["n"] = n;
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flat.push_back(result.chain.p(i, j));
  out["chain"] = flat;
  out["objective"] = result.objective;
  out["trace"] = result.trace;
  out["converged"] = result.converged;
  out["start_index"] = result.start_index;
  out["seed"] = result.seed;
  std::ofstream f(out_arg);
  if (!f) throw std::runtime_error("cannot write " + out_arg);
  f << out.dump(2) << "\n";

  // Sibling chain file in the plain chain schema, directly usable by
  // `patrol eval --chain` and `patrol intruder --chain`.
  fs::path chain_path = fs::path(out_arg);
  chain_path.replace_extension(".chain.json");
  patrol::save_chain(chain_path.string(), result.chain);

  std::cout << "objective " << objective_arg << " = " << result.objective << " (start "
            << result.start_index << ", " << result.trace.size() << " accepted steps, "
            << (result.converged ? "converged" : "iteration cap") << ")\n"
            << "chain written to " << chain_path.string() << "\n";

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_arg + ".manifest.json", "optimize", json{{"graph", graph_arg}},
                 json{{"objective", objective_arg},
                      {"eta", eta},
                      {"eps", eps},
                      {"starts", starts},
                      {"max_iters", max_iters},
                      {"threads", threads}},
                 seed, wall);
  return kExitOk;
}

int run_intruder(const std::string& graph_arg, const std::vector<std::string>& chain_args,
                 const std::string& tau_range_arg, int tau_single, double delta, int plan_at,
                 double eps, const std::string& out_arg) {
  auto t0 = std::chrono::steady_clock::now();
  GraphSource src = resolve_graph(graph_arg);
  patrol::FeasibleSetSpec spec(src.graph, src.pi, eps);

  std::vector<int> taus;
  if (!tau_range_arg.empty()) taus = parse_tau_range(tau_range_arg);
  else taus = {tau_single};

  fs::path out_dir(out_arg);
  fs::create_directories(out_dir);

  for (const std::string& chain_arg : chain_args) {
    patrol::TransitionMatrix chain = patrol::load_chain(chain_arg);
    patrol::ValidationReport report = patrol::validate_chain(chain, spec);
    if (!report.ok()) {
      std::cerr << "chain " << chain_arg << ":\n";
      return report_validation_failure(report);
    }
    auto curve = patrol::capture_curve(chain, src.graph, src.pi, delta, taus);
    std::string stem = fs::path(chain_arg).stem().string();
    std::ofstream csv(out_dir / (stem + ".capture.csv"));
    csv << patrol::capture_curve_csv(curve);
    std::cout << stem << ": capture " << curve.front().second << " at tau " << curve.front().first
              << " .. " << curve.back().second << " at tau " << curve.back().first << "\n";

    if (plan_at >= 1) {
      patrol::AttackPlan plan =
          patrol::attack_plan(chain, src.graph, src.pi, patrol::IntruderParams(plan_at, delta));
      std::ofstream pj(out_dir / (stem + ".plan.json"));
      pj << patrol::attack_plan_to_json(plan).dump(2) << "\n";
    }
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_dir / "manifest.json", "intruder",
                 json{{"graph", graph_arg}, {"chains", chain_args}},
                 json{{"tau_range", tau_range_arg},
                      {"tau", tau_single},
                      {"delta", delta},
                      {"plan_at", plan_at},
                      {"eps", eps}},
                 0, wall);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-chain patrol strategies: return-time entropy optimization and evaluation"};
  app.require_subcommand(1);

  std::string graph_arg, chain_arg, out_arg, dist_dir, objective_arg = "return-entropy";
  std::vector<std::string> chain_args;
  std::string tau_range_arg;
  double eta = 0.1, eta_eval = 0.01, eps = 0.0, delta = 0.1;
  int starts = 5, max_iters = 500, threads = 0, tau = 4, plan_at = 0;
  std::uint64_t seed = 0;
  bool bits = false;

  CLI::App* eval = app.add_subcommand("eval", "evaluate metrics of a chain on a graph");
  eval->add_option("--graph", graph_arg, "graph file or builtin (ring:N, grid:RxC, complete:N, sf)")
      ->required();
  eval->add_option("--chain", chain_arg, "chain JSON file")->required();
  eval->add_option("--eta-eval", eta_eval, "evaluation truncation accuracy");
  eval->add_option("--eps", eps, "minimum edge probability");
  eval->add_flag("--bits", bits, "display entropies in bits (files stay in nats)");
  eval->add_option("--dist-out", dist_dir, "also write per-node return-time distribution CSVs here");
  eval->add_option("--out", out_arg, "output metrics JSON path")->required();

  CLI::App* optimize = app.add_subcommand("optimize", "optimize a chain for an objective");
  optimize->add_option("--graph", graph_arg, "graph file or builtin")->required();
  optimize
      ->add_option("--objective", objective_arg,
                   "return-entropy | entropy-rate | min-kemeny")
      ->check(CLI::IsMember({"return-entropy", "entropy-rate", "min-kemeny"}));
  optimize->add_option("--eta", eta, "optimization truncation accuracy");
  optimize->add_option("--eps", eps, "minimum edge probability");
  optimize->add_option("--starts", starts, "multi-start count");
  optimize->add_option("--seed", seed, "RNG seed");
  optimize->add_option("--max-iters", max_iters, "iteration cap per start");
  optimize->add_option("--threads", threads, "parallel starts (0 = hardware)");
  optimize->add_option("--out", out_arg, "output result JSON path")->required();

  CLI::App* intruder = app.add_subcommand("intruder", "capture curves against the rational intruder");
  intruder->add_option("--graph", graph_arg, "graph file or builtin")->required();
  intruder->add_option("--chain", chain_args, "chain JSON file (repeatable)")->required();
  intruder->add_option("--tau", tau, "single attack duration");
  intruder->add_option("--tau-range", tau_range_arg, "attack duration range a..b");
  intruder->add_option("--delta", delta, "degree of impatience");
  intruder->add_option("--plan-at", plan_at, "also write per-node attack plans at this tau");
  intruder->add_option("--eps", eps, "minimum edge probability");
  intruder->add_option("--out", out_arg, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (eval->parsed())
      return run_eval(graph_arg, chain_arg, eta_eval, eps, bits, out_arg, dist_dir);
    if (optimize->parsed())
      return run_optimize(graph_arg, objective_arg, eta, eps, starts, seed, max_iters, threads,
                          out_arg);
    if (intruder->parsed())
      return run_intruder(graph_arg, chain_args, tau_range_arg, tau, delta, plan_at, eps, out_arg);
  } catch (const patrol::OptimizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOptimization;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
