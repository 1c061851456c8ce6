// taxi: hierarchical crossbar-Ising TSP solver and benchmark harness.
//
// Subcommands:
//   solve    solve one TSPLIB instance, write a .tour file and a report
//   bench    sweep (cluster size, bits, seed) over an instance list, emit CSV
//   oracle   exact / heuristic reference solvers for small instances
//
// Exit codes: 0 ok, 2 input parse error, 3 solver error, 64 usage error.

#include <cstdint>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "taxi/taxi.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSolve = 3;
constexpr int kExitUsage = 64;

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw taxi::ParseError("cannot open file '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << content;
}

// name -> known optimal length, user-supplied ground truth
std::map<std::string, std::int64_t> load_registry(const std::string& path) {
  std::map<std::string, std::int64_t> reg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw taxi::ParseError(std::string("registry: ") + e.what(), 0);
  }
  for (auto it = j.begin(); it != j.end(); ++it) reg[it.key()] = it.value().get<std::int64_t>();
  return reg;
}

struct SolveArgs {
  std::string instance_path;
  int max_cluster_size = 12;
  int bits = 4;
  std::uint64_t seed = 1;
  int macros = 0;  // 0 = host parallelism
  double nonideal_eps = 0.0;
  bool step_per_update = false;
  std::string optima_path;
  std::string trace_path;
  std::string report_format = "json";
  bool deterministic = false;
  std::string tour_out;
};

struct SolveResult {
  taxi::Instance instance;
  taxi::Tour tour;
  taxi::SolveTrace trace;
  taxi::CostReport cost;
  std::optional<double> optimal_ratio;
  int macros_used = 1;
};

int effective_macros(int macros_flag) {
  if (macros_flag > 0) return macros_flag;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SolveResult run_solve(const SolveArgs& args) {
  SolveResult res;
  res.instance = taxi::parse_instance(read_file(args.instance_path));

  std::optional<std::int64_t> known_optimum;
  if (!args.optima_path.empty()) {
    const auto reg = load_registry(args.optima_path);
    if (auto it = reg.find(res.instance.name); it != reg.end()) known_optimum = it->second;
  }

  taxi::SolveOptions opt;
  opt.max_cluster_size = args.max_cluster_size;
  opt.bits = args.bits;
  opt.seed = args.seed;
  opt.max_parallel = effective_macros(args.macros);
  opt.hrs_leak_fraction = args.nonideal_eps;
  opt.stepping = args.step_per_update ? taxi::AnnealStepping::per_update : taxi::AnnealStepping::per_sweep;
  res.macros_used = opt.max_parallel;

  taxi::MacroTraceCollector collector;
  if (!args.trace_path.empty()) opt.macro_trace = &collector;

  auto [tour, trace] = taxi::solve_hierarchical(res.instance, opt);
  res.tour = std::move(tour);
  res.trace = std::move(trace);

  // Deterministic reports model full parallelism (one macro per cluster) so
  // the report does not depend on the host's --macros value.
  int model_macros = opt.max_parallel;
  if (args.deterministic) {
    model_macros = 1;
    for (const auto& lv : res.trace.levels) model_macros = std::max(model_macros, lv.cluster_count);
  }
  res.cost = taxi::estimate(res.trace, args.bits, model_macros);

  if (known_optimum && *known_optimum > 0)
    res.optimal_ratio = static_cast<double>(res.trace.final_length) / static_cast<double>(*known_optimum);

  if (!args.trace_path.empty()) {
    std::ostringstream csv;
    csv << "level,cluster,sweep,current_uA,p,length\n";
    for (const auto& row : collector.take_sorted())
      csv << row.level << ',' << row.cluster << ',' << row.sweep << ',' << row.current_uA << ','
          << row.p << ',' << row.length << '\n';
    write_file(args.trace_path, csv.str());
  }
  return res;
}

ordered_json cost_to_json(const taxi::CostReport& cost, bool deterministic) {
  ordered_json j;
  j["bits"] = cost.bits;
  j["n_macros"] = deterministic ? ordered_json("per_cluster") : ordered_json(cost.n_macros);
  j["iteration_ns"] = cost.iteration_ns;
  j["total_order_updates"] = cost.total_order_updates;
  j["macro_latency_ns"] = cost.macro_latency_ns;
  j["macro_energy_pj"] = cost.macro_energy_pj;
  j["unmodeled"] = taxi::kUnmodeledCostNote;
  return j;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  return buf;
}

const char* kCsvHeader =
    "instance,n,m,bits,seed,tour_length,optimal_ratio,"
    "clustering_s,fixing_s,annealing_s,merging_s,macro_latency_ns,macro_energy_pj";

std::string csv_row(const SolveArgs& args, const SolveResult& res) {
  std::ostringstream row;
  row << res.instance.name << ',' << res.instance.dimension << ',' << args.max_cluster_size << ','
      << args.bits << ',' << args.seed << ',' << res.trace.final_length << ',';
  if (res.optimal_ratio) row << *res.optimal_ratio;
  row << ',';
  if (args.deterministic) {
    row << ",,,";
  } else {
    row << res.trace.clustering_s << ',' << res.trace.fixing_s << ',' << res.trace.annealing_s << ','
        << res.trace.merging_s;
  }
  row << ',' << res.cost.macro_latency_ns << ',' << res.cost.macro_energy_pj;
  return row.str();
}

int cmd_solve(const SolveArgs& args) {
  SolveResult res;
  try {
    res = run_solve(args);
  } catch (const taxi::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "solve error: " << e.what() << '\n';
    return kExitSolve;
  }

  try {
    std::string tour_path = args.tour_out;
    if (tour_path.empty()) {
      const std::string base =
          res.instance.name.empty() ? std::string("UNNAMED") : res.instance.name;
      tour_path = base + ".tour";
    }
    write_file(tour_path, taxi::write_tour(res.tour, res.instance.name));

    if (args.report_format == "csv") {
      std::cout << kCsvHeader << '\n' << csv_row(args, res) << '\n';
      return kExitOk;
    }

    ordered_json j;
    j["schema"] = 1;
    j["instance"] = res.instance.name;
    j["n"] = res.instance.dimension;
    j["m"] = args.max_cluster_size;
    j["bits"] = args.bits;
    j["seed"] = args.seed;
    j["nonideal_eps"] = args.nonideal_eps;
    j["tour_length"] = res.trace.final_length;
    if (res.optimal_ratio) j["optimal_ratio"] = *res.optimal_ratio;
    j["tour_file"] = tour_path;
    if (!args.deterministic) {
      j["macros"] = res.macros_used;
      j["timestamp"] = iso_timestamp();
      j["phase_times"] = ordered_json{{"clustering_s", res.trace.clustering_s},
                                      {"fixing_s", res.trace.fixing_s},
                                      {"annealing_s", res.trace.annealing_s},
                                      {"merging_s", res.trace.merging_s}};
    }
    j["cost_report"] = cost_to_json(res.cost, args.deterministic);
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "solve error: " << e.what() << '\n';
    return kExitSolve;
  }
}

struct BenchArgs {
  std::string list_path;
  std::vector<int> cluster_sizes{12};
  std::vector<int> bits_set{2, 3, 4};
  std::vector<std::uint64_t> seeds{1};
  std::string optima_path;
  int macros = 0;
  bool deterministic = false;
  std::string out_path;
};

int cmd_bench(const BenchArgs& args) {
  std::vector<std::string> instances;
  try {
    std::istringstream list(read_file(args.list_path));
    for (std::string line; std::getline(list, line);) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty()) instances.push_back(line);
    }
  } catch (const taxi::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  }

  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  for (const auto& path : instances) {
    for (int m : args.cluster_sizes) {
      for (int bits : args.bits_set) {
        for (std::uint64_t seed : args.seeds) {
          SolveArgs sa;
          sa.instance_path = path;
          sa.max_cluster_size = m;
          sa.bits = bits;
          sa.seed = seed;
          sa.macros = args.macros;
          sa.optima_path = args.optima_path;
          sa.deterministic = args.deterministic;
          SolveResult res;
          try {
            res = run_solve(sa);
          } catch (const taxi::ParseError& e) {
            std::cerr << "parse error (" << path << "): " << e.what() << '\n';
            return kExitParse;
          } catch (const std::exception& e) {
            std::cerr << "solve error (" << path << "): " << e.what() << '\n';
            return kExitSolve;
          }
          csv << csv_row(sa, res) << '\n';
        }
      }
    }
  }

  try {
    if (args.out_path.empty())
      std::cout << csv.str();
    else
      write_file(args.out_path, csv.str());
  } catch (const std::exception& e) {
    std::cerr << "solve error: " << e.what() << '\n';
    return kExitSolve;
  }
  return kExitOk;
}

struct OracleArgs {
  std::string instance_path;
  std::string method = "held-karp";
  int start = 0;
  bool print_tour = false;
};

int cmd_oracle(const OracleArgs& args) {
  taxi::Instance inst;
  try {
    inst = taxi::parse_instance(read_file(args.instance_path));
  } catch (const taxi::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  }

  try {
    const taxi::DistanceMatrix dm = taxi::build_distance_matrix(inst.coords, inst.edge_weight_type);
    std::int64_t length = 0;
    taxi::Tour tour;
    if (args.method == "held-karp") {
      std::tie(length, tour) = taxi::held_karp_cycle(dm);
    } else if (args.method == "exhaustive") {
      std::tie(length, tour) = taxi::exhaustive_cycle(dm);
    } else if (args.method == "nn") {
      tour = taxi::nearest_neighbor(dm, args.start);
      length = taxi::tour_length(tour, dm, true);
    } else if (args.method == "nn2opt") {
      tour = taxi::two_opt(dm, taxi::nearest_neighbor(dm, args.start));
      length = taxi::tour_length(tour, dm, true);
    } else {
      std::cerr << "unknown method '" << args.method << "'\n";
      return kExitUsage;
    }
    std::cout << args.method << " length " << length << '\n';
    if (args.print_tour) {
      for (std::size_t i = 0; i < tour.order.size(); ++i)
        std::cout << (i ? " " : "") << tour.order[i] + 1;
      std::cout << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "solve error: " << e.what() << '\n';
    return kExitSolve;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TAXI: hierarchical crossbar-Ising TSP solver"};
  app.require_subcommand(1);
  app.set_config("--config")->description("key=value config file (CLI flags take precedence)");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "solve one TSPLIB instance");
  solve->add_option("--instance", solve_args.instance_path, "TSPLIB .tsp file")->required();
  solve->add_option("--max-cluster-size", solve_args.max_cluster_size,
                    "largest sub-problem a macro solves")
      ->check(CLI::Range(4, 64))
      ->capture_default_str();
  solve->add_option("--bits", solve_args.bits, "weight precision")
      ->check(CLI::IsMember({2, 3, 4}))
      ->capture_default_str();
  solve->add_option("--seed", solve_args.seed, "root RNG seed")->capture_default_str();
  solve->add_option("--macros", solve_args.macros, "parallel macro count (0 = host parallelism)")
      ->check(CLI::Range(0, 4096));
  solve->add_option("--nonideal-eps", solve_args.nonideal_eps, "HRS leakage fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  solve->add_flag("--step-per-update", solve_args.step_per_update,
                  "decrement the write current per order update instead of per sweep");
  solve->add_option("--optima", solve_args.optima_path, "JSON registry of known optima");
  solve->add_option("--trace", solve_args.trace_path, "write per-sweep annealing trace CSV");
  solve->add_option("--report", solve_args.report_format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  solve->add_flag("--deterministic", solve_args.deterministic,
                  "omit wall-clock fields; report is byte-stable for fixed flags");
  solve->add_option("--tour-out", solve_args.tour_out, "output .tour path (default <name>.tour)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "sweep cluster sizes, bit widths and seeds");
  bench->add_option("--instances", bench_args.list_path, "text file with one instance path per line")
      ->required();
  bench->add_option("--cluster-sizes", bench_args.cluster_sizes, "cluster sizes to sweep")
      ->delimiter(',');
  bench->add_option("--bits-set", bench_args.bits_set, "bit widths to sweep")->delimiter(',');
  bench->add_option("--seeds", bench_args.seeds, "seeds to sweep")->delimiter(',');
  bench->add_option("--optima", bench_args.optima_path, "JSON registry of known optima");
  bench->add_option("--macros", bench_args.macros, "parallel macro count (0 = host parallelism)");
  bench->add_flag("--deterministic", bench_args.deterministic, "omit wall-clock CSV columns");
  bench->add_option("--out", bench_args.out_path, "write CSV here instead of stdout");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "reference solvers for small instances");
  oracle->add_option("--instance", oracle_args.instance_path, "TSPLIB .tsp file")->required();
  oracle->add_option("--method", oracle_args.method, "held-karp | exhaustive | nn | nn2opt")
      ->check(CLI::IsMember({"held-karp", "exhaustive", "nn", "nn2opt"}))
      ->capture_default_str();
  oracle->add_option("--start", oracle_args.start, "start city for nn variants");
  oracle->add_flag("--print-tour", oracle_args.print_tour, "also print the 1-based tour");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (solve->parsed()) return cmd_solve(solve_args);
  if (bench->parsed()) return cmd_bench(bench_args);
  if (oracle->parsed()) return cmd_oracle(oracle_args);
  return kExitUsage;
}
