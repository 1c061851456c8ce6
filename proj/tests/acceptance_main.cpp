// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one [PASS]/[FAIL] line per criterion. Exit code is the number of
// failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "taxi/taxi.hpp"

namespace fs = std::filesystem;
using namespace taxi;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Point> random_points(int n, std::uint64_t seed, double scale = 10000.0) {
  SplitMix64 rng(seed);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({rng.next_double() * scale, rng.next_double() * scale});
  return pts;
}

Instance random_instance(const std::string& name, int n, std::uint64_t seed) {
  Instance inst;
  inst.name = name;
  inst.dimension = n;
  inst.edge_weight_type = EdgeWeightType::euc_2d;
  inst.coords = random_points(n, seed);
  return inst;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Held-Karp equals exhaustive enumeration on 100 random small instances.
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  SplitMix64 rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 5 + static_cast<int>(rng.next_below(6));
    const DistanceMatrix dm =
        build_distance_matrix(random_points(n, rng()), EdgeWeightType::euc_2d);
    const auto [hk, hk_tour] = held_karp_cycle(dm);
    const auto [ex, ex_tour] = exhaustive_cycle(dm);
    if (hk != ex || !hk_tour.is_permutation())
      return {false, "mismatch at rep " + std::to_string(rep)};
  }
  const double dt = seconds_since(t0);
  std::ostringstream d;
  d << "100/100 equal, " << dt << " s";
  return {dt < 10.0, d.str()};
}

// 2. Annealed 10-city fixed-endpoint paths: >=80% exact, never above 1.10x.
Outcome subsolver_quality() {
  const auto t0 = std::chrono::steady_clock::now();
  int hits = 0;
  double worst = 1.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto pts = random_points(10, 5000 + static_cast<std::uint64_t>(rep));
    SubProblem sp;
    for (int i = 0; i < 10; ++i) sp.node_ids.push_back(i);
    sp.points = pts;
    sp.mode = SolveMode::path;
    sp.entry = 0;
    sp.exit = 9;
    sp.seed = derive_stream(2024, static_cast<std::uint64_t>(rep));
    const auto tour = solve_subproblem(sp, 4);

    const DistanceMatrix dm = build_distance_matrix(pts, EdgeWeightType::euc_2d);
    std::int64_t len = 0;
    for (std::size_t i = 0; i + 1 < tour.size(); ++i) len += dm.at(tour[i], tour[i + 1]);
    const auto [opt, opt_tour] = held_karp_path(dm, 0, 9);
    const double ratio = static_cast<double>(len) / static_cast<double>(opt);
    worst = std::max(worst, ratio);
    if (len == opt) ++hits;
    if (ratio > 1.10) {
      std::ostringstream d;
      d << "rep " << rep << " ratio " << ratio << " exceeds 1.10";
      return {false, d.str()};
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream d;
  d << hits << "/50 optimal, worst ratio " << worst << ", " << dt << " s";
  return {hits >= 40 && dt < 120.0, d.str()};
}

// 3. Schedule constants: 1340 sweeps, p ramps from 0.20 to 0.01.
Outcome schedule_constants() {
  const AnnealSchedule sched;
  const StochasticModel model = calibrate_stochastic_model();
  const int sweeps = sched.sweep_count();
  const double p_first = model.probability(sched.write_current(0, sweeps));
  const double p_last = model.probability(sched.write_current(sweeps - 1, sweeps));
  std::ostringstream d;
  d << "sweeps " << sweeps << ", p_first " << p_first << ", p_last " << p_last;
  const bool ok = sweeps == 1340 && std::abs(p_first - 0.20) <= 1e-9 && std::abs(p_last - 0.01) <= 1e-9;
  return {ok, d.str()};
}

// 4. Cost table reproduces the circuit simulation figures bit-exactly.
Outcome table_calibration() {
  const bool ok = MacroCostTable::superpose_ns == 3.0 && MacroCostTable::optimize_ns == 4.0 &&
                  MacroCostTable::update_ns == 2.0 && MacroCostTable::iteration_ns() == 9.0 &&
                  MacroCostTable::energy_per_iteration_pj(2) == 37.82 &&
                  MacroCostTable::energy_per_iteration_pj(3) == 45.3 &&
                  MacroCostTable::energy_per_iteration_pj(4) == 45.98;
  return {ok, "iteration 3+4+2 ns, energy 37.82/45.3/45.98 pJ"};
}

struct MidScale {
  std::vector<std::int64_t> lengths;  // per seed
  std::int64_t nn_len = 0;
  std::int64_t baseline_best = 0;     // best-of-5 two_opt(nearest_neighbor)
  bool valid = true;
};

const Instance& midscale_instance() {
  static const Instance inst = random_instance("uniform1000", 1000, 987654321);
  return inst;
}

MidScale run_midscale(int bits) {
  const Instance& inst = midscale_instance();
  MidScale ms;
  for (int seed = 1; seed <= 5; ++seed) {
    SolveOptions opt;
    opt.max_cluster_size = 12;
    opt.bits = bits;
    opt.seed = static_cast<std::uint64_t>(seed);
    opt.max_parallel = 4;
    auto [tour, trace] = solve_hierarchical(inst, opt);
    if (!tour.is_permutation()) ms.valid = false;
    ms.lengths.push_back(trace.final_length);
  }
  return ms;
}

double mean_length(const MidScale& ms) {
  double s = 0;
  for (std::int64_t l : ms.lengths) s += static_cast<double>(l);
  return s / static_cast<double>(ms.lengths.size());
}

// 5. 1000-city instance: valid permutations, beats nearest-neighbor every
// run, mean within 1.35x of the best-of-5 2-opt baseline.
Outcome midscale_quality(MidScale& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance& inst = midscale_instance();
  out = run_midscale(4);
  if (!out.valid) return {false, "invalid permutation"};

  const DistanceMatrix dm = build_distance_matrix(inst.coords, inst.edge_weight_type);
  out.nn_len = tour_length(nearest_neighbor(dm, 0), dm, true);
  out.baseline_best = 0;
  for (int start = 0; start < 5; ++start) {
    const std::int64_t len = tour_length(two_opt(dm, nearest_neighbor(dm, start)), dm, true);
    if (out.baseline_best == 0 || len < out.baseline_best) out.baseline_best = len;
  }

  for (std::int64_t l : out.lengths)
    if (l >= out.nn_len)
      return {false, "run did not beat nearest-neighbor (" + std::to_string(l) + " vs " +
                         std::to_string(out.nn_len) + ")"};
  const double mean = mean_length(out);
  const double rel = mean / static_cast<double>(out.baseline_best);
  const double dt = seconds_since(t0);
  std::ostringstream d;
  d << "mean " << mean << ", nn " << out.nn_len << ", 2-opt best " << out.baseline_best
    << ", mean/baseline " << rel << ", " << dt << " s";
  return {rel <= 1.35 && dt < 600.0, d.str()};
}

// 6. Mean lengths at 2 and 3 bits stay within 5% of 4 bits.
Outcome bit_robustness(const MidScale& b4) {
  if (b4.lengths.empty()) return {false, "criterion 5 did not run"};
  const double mean4 = mean_length(b4);
  std::ostringstream d;
  bool ok = true;
  for (int bits : {2, 3}) {
    const MidScale ms = run_midscale(bits);
    if (!ms.valid) return {false, "invalid permutation at bits " + std::to_string(bits)};
    const double rel = std::abs(mean_length(ms) / mean4 - 1.0);
    d << "B" << bits << " rel " << rel << "  ";
    ok = ok && rel <= 0.05;
  }
  return {ok, d.str()};
}

// 7. Invariants under 10,000 randomized spin updates.
Outcome invariant_suite() {
  SplitMix64 rng(314159);
  int updates = 0;
  while (updates < 10000) {
    const int n = 4 + static_cast<int>(rng.next_below(9));
    std::vector<int> initial;
    for (int i = 0; i < n; ++i) initial.push_back(i);
    const bool path = rng.next_below(2) == 0;
    SpinStorage s = path ? SpinStorage::make_path(initial, 0, n - 1) : SpinStorage::make_cycle(initial);
    for (int step = 0; step < 40 && updates < 10000; ++step, ++updates) {
      const int order =
          1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(s.last_optimizable())));
      const double p = rng.next_double();
      const auto mask = stochastic_mask(n, p, rng);
      const auto cands = candidate_set(s, order, mask);
      if (cands.empty()) return {false, "empty candidate set"};
      update_spin(s, order, cands[rng.next_below(cands.size())]);
      if (!s.tour().is_permutation()) return {false, "permutation broken"};
      if (path && (s.assign.front() != 0 || s.assign.back() != n - 1))
        return {false, "fixed endpoint moved"};
    }
    const auto full = stochastic_mask(n, 0.0, rng);
    if (static_cast<int>(full.size()) != n) return {false, "p=0 mask not full"};
  }
  return {true, "10000 updates clean"};
}

struct Cmd {
  int exit_code = -1;
  std::string out;
};

Cmd run_cmd(const std::string& cmd) {
  Cmd res;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) res.out += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

// 8. Byte-identical deterministic CLI reports, independent of --macros.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "taxi_acceptance";
  fs::create_directories(dir);
  const Instance inst = random_instance("det200", 200, 24680);
  std::string text = "NAME : det200\nTYPE : TSP\nDIMENSION : 200\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n";
  for (int i = 0; i < 200; ++i)
    text += std::to_string(i + 1) + " " + std::to_string(inst.coords[i].x) + " " +
            std::to_string(inst.coords[i].y) + "\n";
  text += "EOF\n";
  const fs::path tsp = dir / "det200.tsp";
  std::ofstream(tsp) << text;

  const std::string base = std::string(TAXI_CLI_PATH) + " solve --instance " + tsp.string() +
                           " --seed 9 --deterministic --tour-out " + (dir / "det200.tour").string();
  const Cmd a = run_cmd(base + " --macros 1");
  const Cmd b = run_cmd(base + " --macros 1");
  const Cmd c = run_cmd(base + " --macros 7");
  if (a.exit_code != 0 || b.exit_code != 0 || c.exit_code != 0)
    return {false, "solver exited nonzero"};
  if (a.out != b.out) return {false, "repeat run differed"};
  if (a.out != c.out) return {false, "--macros changed the report"};
  return {true, "reports byte-identical across runs and --macros"};
}

// 9. Real TSPLIB files parse and a registered optimal tour recomputes
// exactly.
Outcome parser_corpus() {
  const fs::path data = fs::path(TAXI_TEST_DATA_DIR) / "tsplib";
  const fs::path reg_path = data / "registry.json";
  if (!fs::exists(reg_path)) return {false, "missing " + reg_path.string()};

  std::map<std::string, std::int64_t> registry;
  {
    std::ifstream in(reg_path);
    const auto j = nlohmann::json::parse(in);
    for (auto it = j.begin(); it != j.end(); ++it) registry[it.key()] = it.value().get<std::int64_t>();
  }

  int parsed = 0;
  int recomputed = 0;
  std::ostringstream d;
  for (const auto& entry : fs::directory_iterator(data)) {
    if (entry.path().extension() != ".tsp") continue;
    std::ifstream in(entry.path());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Instance inst;
    try {
      inst = parse_instance(text);
    } catch (const ParseError& e) {
      return {false, entry.path().filename().string() + ": " + e.what()};
    }
    ++parsed;

    const fs::path tour_path = entry.path().parent_path() / (inst.name + ".opt.tour");
    auto reg = registry.find(inst.name);
    if (fs::exists(tour_path) && reg != registry.end()) {
      std::ifstream tin(tour_path);
      std::string ttext((std::istreambuf_iterator<char>(tin)), std::istreambuf_iterator<char>());
      const Tour tour = parse_tour(ttext, inst.dimension);
      const std::int64_t len =
          tour_length_points(tour.order, inst.coords, inst.edge_weight_type, true);
      if (len != reg->second) {
        std::ostringstream e;
        e << inst.name << " recomputed " << len << " != registered " << reg->second;
        return {false, e.str()};
      }
      ++recomputed;
    }
  }
  d << parsed << " instances parsed, " << recomputed << " optimal tours recomputed exactly";
  return {parsed >= 5 && recomputed >= 1, d.str()};
}

}  // namespace

int main() {
  MidScale b4;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence (held-karp == exhaustive, 100 instances)", oracle_equivalence},
      {"sub-solver quality (50 annealed 10-city paths vs held-karp)", subsolver_quality},
      {"schedule constants (1340 sweeps, p 0.20 -> 0.01)", schedule_constants},
      {"cost table calibration (9 ns, 37.82/45.3/45.98 pJ)", table_calibration},
      {"mid-scale validity and quality (1000 cities, 5 seeds)",
       [&b4] { return midscale_quality(b4); }},
      {"bit-precision robustness (B=2,3 within 5% of B=4)", [&b4] { return bit_robustness(b4); }},
      {"invariant suite (10000 randomized spin updates)", invariant_suite},
      {"determinism (byte-identical deterministic reports)", determinism},
      {"parser corpus (public TSPLIB instances + exact optimum recompute)", parser_corpus},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome oc;
    try {
      oc = criteria[i].second();
    } catch (const std::exception& e) {
      oc = {false, std::string("exception: ") + e.what()};
    }
    if (!oc.pass) ++failures;
    std::cout << (oc.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << criteria[i].first << " — "
              << oc.detail << '\n';
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures;
}
