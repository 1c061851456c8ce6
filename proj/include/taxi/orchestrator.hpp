#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "taxi/clustering.hpp"
#include "taxi/distance.hpp"
#include "taxi/ising_macro.hpp"
#include "taxi/rng.hpp"
#include "taxi/trace.hpp"
#include "taxi/tsplib.hpp"

namespace taxi {

// Top-down hierarchical solve: the topmost level is annealed as a cycle,
// entry/exit cities of tour-adjacent clusters are fixed from closest pairs,
// every cluster is annealed as a fixed-endpoint path on its own macro, and
// the child tours are spliced in parent order.

// One cluster handed to one macro. node_ids index a hierarchy level; entry
// and exit are node ids (set in path mode).
struct SubProblem {
  std::vector<int> node_ids;
  std::vector<Point> points;
  SolveMode mode = SolveMode::cycle;
  int entry = -1;
  int exit = -1;
  std::uint64_t seed = 0;
  EdgeWeightType convention = EdgeWeightType::euc_2d;
};

// One per-sweep sample of a macro run, for annealing-curve plots.
struct MacroTraceRow {
  int level = 0;
  int cluster = 0;
  int sweep = 0;
  double current_uA = 0.0;
  double p = 0.0;
  std::int64_t length = 0;
};

class MacroTraceCollector {
 public:
  void append(std::vector<MacroTraceRow>&& rows) {
    std::lock_guard<std::mutex> lock(mu_);
    rows_.insert(rows_.end(), rows.begin(), rows.end());
  }

  // Rows grouped deterministically regardless of worker schedule.
  std::vector<MacroTraceRow> take_sorted() {
    std::lock_guard<std::mutex> lock(mu_);
    std::sort(rows_.begin(), rows_.end(), [](const MacroTraceRow& a, const MacroTraceRow& b) {
      if (a.level != b.level) return a.level > b.level;
      if (a.cluster != b.cluster) return a.cluster < b.cluster;
      return a.sweep < b.sweep;
    });
    return std::move(rows_);
  }

 private:
  std::mutex mu_;
  std::vector<MacroTraceRow> rows_;
};

struct SolveOptions {
  int max_cluster_size = 12;
  int bits = 4;
  std::uint64_t seed = 1;
  int max_parallel = 1;
  double hrs_leak_fraction = 0.0;
  AnnealStepping stepping = AnnealStepping::per_sweep;
  MacroTraceCollector* macro_trace = nullptr;
};

// Entry/exit selection: for each consecutive cluster pair (Ca, Cb) of the
// cyclic cluster tour, the closest member pair (x in Ca, y in Cb) fixes
// exit(Ca) = x and entry(Cb) = y. A cluster with two or more members never
// reuses its entry as its exit; the next-best pair is taken instead.
// Returns (entry, exit) member ids indexed by cluster index.
inline std::vector<std::pair<int, int>> fix_endpoints(const std::vector<int>& cluster_tour,
                                                      const Level& level,
                                                      std::span<const Point> member_coords) {
  const int k = static_cast<int>(cluster_tour.size());
  std::vector<int> entry(level.size(), -1);
  std::vector<int> exit(level.size(), -1);

  const auto sqdist = [&](int a, int b) {
    const double dx = member_coords[static_cast<std::size_t>(a)].x - member_coords[static_cast<std::size_t>(b)].x;
    const double dy = member_coords[static_cast<std::size_t>(a)].y - member_coords[static_cast<std::size_t>(b)].y;
    return dx * dx + dy * dy;
  };

  for (int b = 0; b < k; ++b) {
    const int ca = cluster_tour[static_cast<std::size_t>(b)];
    const int cb = cluster_tour[static_cast<std::size_t>((b + 1) % k)];
    const auto& ma = level[static_cast<std::size_t>(ca)].members;
    const auto& mb = level[static_cast<std::size_t>(cb)].members;

    const int banned_x = (ma.size() >= 2) ? entry[static_cast<std::size_t>(ca)] : -1;
    const int banned_y = (mb.size() >= 2) ? exit[static_cast<std::size_t>(cb)] : -1;

    int best_x = -1, best_y = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int x : ma) {
      if (x == banned_x) continue;
      for (int y : mb) {
        if (y == banned_y) continue;
        const double d = sqdist(x, y);
        if (d < best_d || (d == best_d && (x < best_x || (x == best_x && y < best_y)))) {
          best_d = d;
          best_x = x;
          best_y = y;
        }
      }
    }
    exit[static_cast<std::size_t>(ca)] = best_x;
    entry[static_cast<std::size_t>(cb)] = best_y;
  }

  std::vector<std::pair<int, int>> out(level.size());
  for (std::size_t c = 0; c < level.size(); ++c) out[c] = {entry[c], exit[c]};
  return out;
}

namespace detail {

inline int optimizable_orders(int n, SolveMode mode) {
  return mode == SolveMode::cycle ? n - 1 : n - 2;
}

}  // namespace detail

// Solves one sub-problem on one macro. Sizes up to 3 are solved exactly by
// construction; larger ones get a full annealing run. Returns node ids in
// visit order (entry first and exit last in path mode). When `updates_out`
// is given, it receives the number of order updates spent.
inline std::vector<int> solve_subproblem(const SubProblem& sp, int bits,
                                         std::int64_t* updates_out = nullptr,
                                         const SolveOptions* opt = nullptr, int trace_level = 0,
                                         int trace_cluster = 0) {
  const int n = static_cast<int>(sp.node_ids.size());
  if (n < 1) throw std::invalid_argument("solve_subproblem: empty node set");
  if (sp.points.size() != sp.node_ids.size())
    throw std::invalid_argument("solve_subproblem: points/node_ids size mismatch");
  if (updates_out) *updates_out = 0;

  const bool path = sp.mode == SolveMode::path;
  int local_entry = -1, local_exit = -1;
  if (path) {
    for (int i = 0; i < n; ++i) {
      if (sp.node_ids[static_cast<std::size_t>(i)] == sp.entry) local_entry = i;
      if (sp.node_ids[static_cast<std::size_t>(i)] == sp.exit) local_exit = i;
    }
    if (local_entry < 0 || local_exit < 0)
      throw std::invalid_argument("solve_subproblem: entry/exit not in node set");
    if (n >= 2 && local_entry == local_exit)
      throw std::invalid_argument("solve_subproblem: entry equals exit");
  }

  // trivial and exact-by-construction sizes
  if (n == 1) return {sp.node_ids[0]};
  if (n <= 3) {
    std::vector<int> local;
    if (path) {
      local.push_back(local_entry);
      for (int i = 0; i < n; ++i)
        if (i != local_entry && i != local_exit) local.push_back(i);
      local.push_back(local_exit);
    } else {
      for (int i = 0; i < n; ++i) local.push_back(i);
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i : local) out.push_back(sp.node_ids[static_cast<std::size_t>(i)]);
    return out;
  }

  const DistanceMatrix dm = build_distance_matrix(sp.points, sp.convention);
  WeightMatrix wm = quantize_weights(dm, bits);

  std::vector<int> initial;
  initial.reserve(static_cast<std::size_t>(n));
  if (path) {
    initial.push_back(local_entry);
    for (int i = 0; i < n; ++i)
      if (i != local_entry && i != local_exit) initial.push_back(i);
    initial.push_back(local_exit);
  } else {
    for (int i = 0; i < n; ++i) initial.push_back(i);
  }

  SpinStorage spins = path ? SpinStorage::make_path(std::move(initial), local_entry, local_exit)
                           : SpinStorage::make_cycle(std::move(initial));
  MacroState macro(std::move(wm), dm, std::move(spins), SplitMix64(sp.seed));
  if (opt) {
    macro.nonideal.hrs_leak_fraction = opt->hrs_leak_fraction;
    macro.stepping = opt->stepping;
  }

  Tour local_tour;
  if (opt && opt->macro_trace) {
    std::vector<MacroTraceRow> rows;
    rows.reserve(static_cast<std::size_t>(macro.schedule.sweep_count()));
    local_tour = anneal(macro, [&](int s, double i_uA, double p) {
      rows.push_back(MacroTraceRow{trace_level, trace_cluster, s, i_uA, p,
                                   tour_length(macro.spins.tour(), macro.distances,
                                               sp.mode == SolveMode::cycle)});
    });
    opt->macro_trace->append(std::move(rows));
  } else {
    local_tour = anneal(macro);
  }

  if (updates_out)
    *updates_out = static_cast<std::int64_t>(macro.schedule.sweep_count()) *
                   detail::optimizable_orders(n, sp.mode);

  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i : local_tour.order) out.push_back(sp.node_ids[static_cast<std::size_t>(i)]);
  return out;
}

// Splices fixed-endpoint child paths in parent cyclic order. endpoints[c]
// holds the (entry, exit) pair fixed for cluster c; a mismatch between a
// child tour and its fixed endpoints is a hard error.
inline std::vector<int> merge_tours(const std::vector<int>& parent_order,
                                    const std::vector<std::vector<int>>& child_tours,
                                    const std::vector<std::pair<int, int>>& endpoints) {
  std::vector<int> merged;
  for (int c : parent_order) {
    const auto& child = child_tours[static_cast<std::size_t>(c)];
    if (child.empty()) throw std::logic_error("merge_tours: empty child tour");
    const auto [entry, exit] = endpoints[static_cast<std::size_t>(c)];
    if (child.front() != entry || child.back() != exit)
      throw std::logic_error("merge_tours: child endpoints do not match fixed entry/exit");
    merged.insert(merged.end(), child.begin(), child.end());
  }
  return merged;
}

namespace detail {

class PhaseClock {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  double stop() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

// Runs fn(i) for i in [0, count) on up to max_parallel workers. Work items
// must be independent; the first exception wins and is rethrown.
template <typename Fn>
void parallel_for(int count, int max_parallel, Fn&& fn) {
  const int workers = std::max(1, std::min(max_parallel, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto body = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// Full hierarchical solve. Returns the city tour and the per-phase trace
// consumed by the cost model.
inline std::pair<Tour, SolveTrace> solve_hierarchical(const Instance& inst, const SolveOptions& opt) {
  if (opt.max_cluster_size < 4)
    throw std::invalid_argument("solve_hierarchical: max cluster size must be at least 4");
  if (opt.max_parallel < 1) throw std::invalid_argument("solve_hierarchical: max_parallel must be at least 1");
  if (inst.dimension < 3) throw std::invalid_argument("solve_hierarchical: instance needs at least 3 cities");
  if (static_cast<int>(inst.coords.size()) != inst.dimension)
    throw std::invalid_argument("solve_hierarchical: coordinate count does not match dimension");

  SolveTrace trace;
  detail::PhaseClock clock;

  clock.start();
  const Hierarchy h = build_hierarchy(inst.coords, opt.max_cluster_size);
  trace.clustering_s = clock.stop();

  const int depth = h.depth();
  const int sweeps = AnnealSchedule{}.sweep_count();

  // top level: one cycle over the topmost nodes
  std::vector<int> tour_nodes;
  {
    const Level& top = h.top();
    const int k = static_cast<int>(top.size());
    SubProblem sp;
    sp.mode = SolveMode::cycle;
    sp.convention = inst.edge_weight_type;
    sp.seed = derive_stream(opt.seed, static_cast<std::uint64_t>(depth), 0);
    sp.node_ids.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      sp.node_ids[static_cast<std::size_t>(i)] = i;
      sp.points.push_back(top[static_cast<std::size_t>(i)].centroid);
    }
    clock.start();
    std::int64_t updates = 0;
    tour_nodes = solve_subproblem(sp, opt.bits, &updates, &opt, depth, 0);
    trace.annealing_s += clock.stop();

    LevelTrace lt;
    lt.level = depth - 1;
    lt.cluster_count = 1;
    lt.batches = 1;
    lt.sweeps = updates > 0 ? sweeps : 0;
    lt.order_updates = {updates};
    trace.levels.push_back(std::move(lt));
  }

  // descend; clusters at level lvl are solved over their members (level lvl-1)
  for (int lvl = depth - 1; lvl >= 1; --lvl) {
    const Level& level = h.levels[static_cast<std::size_t>(lvl)];
    const Level& below = h.levels[static_cast<std::size_t>(lvl - 1)];

    std::vector<Point> member_coords(below.size());
    for (std::size_t i = 0; i < below.size(); ++i) member_coords[i] = below[i].centroid;

    clock.start();
    const auto endpoints = fix_endpoints(tour_nodes, level, member_coords);
    trace.fixing_s += clock.stop();

    const int count = static_cast<int>(level.size());
    std::vector<std::vector<int>> child(level.size());
    std::vector<std::int64_t> updates(level.size(), 0);

    clock.start();
    detail::parallel_for(count, opt.max_parallel, [&](int c) {
      const ClusterNode& node = level[static_cast<std::size_t>(c)];
      SubProblem sp;
      sp.node_ids = node.members;
      sp.points.reserve(node.members.size());
      for (int m : node.members) sp.points.push_back(member_coords[static_cast<std::size_t>(m)]);
      sp.mode = SolveMode::path;
      sp.entry = endpoints[static_cast<std::size_t>(c)].first;
      sp.exit = endpoints[static_cast<std::size_t>(c)].second;
      sp.seed = derive_stream(opt.seed, static_cast<std::uint64_t>(lvl), static_cast<std::uint64_t>(c));
      sp.convention = inst.edge_weight_type;
      child[static_cast<std::size_t>(c)] =
          solve_subproblem(sp, opt.bits, &updates[static_cast<std::size_t>(c)], &opt, lvl, c);
    });
    trace.annealing_s += clock.stop();

    LevelTrace lt;
    lt.level = lvl;
    lt.cluster_count = count;
    lt.batches = (count + opt.max_parallel - 1) / opt.max_parallel;
    lt.sweeps = sweeps;
    lt.order_updates = std::move(updates);
    trace.levels.push_back(std::move(lt));

    clock.start();
    tour_nodes = merge_tours(tour_nodes, child, endpoints);
    trace.merging_s += clock.stop();
  }

  // level-0 nodes are city singletons
  Tour final_tour;
  final_tour.order.reserve(tour_nodes.size());
  for (int node : tour_nodes)
    final_tour.order.push_back(h.levels[0][static_cast<std::size_t>(node)].members[0]);

  trace.final_length = tour_length_points(final_tour.order, inst.coords, inst.edge_weight_type, true);
  return {std::move(final_tour), std::move(trace)};
}

}  // namespace taxi
