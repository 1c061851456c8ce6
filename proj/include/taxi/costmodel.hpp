#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "taxi/trace.hpp"

namespace taxi {

// Pre-layout circuit figures for one macro iteration (superposition +
// optimization + spin-storage update) on a 12-city array, per bit width.
struct MacroCostTable {
  static constexpr double superpose_ns = 3.0;
  static constexpr double optimize_ns = 4.0;
  static constexpr double update_ns = 2.0;

  static constexpr double iteration_ns() { return superpose_ns + optimize_ns + update_ns; }

  static double energy_per_iteration_pj(int bits) {
    switch (bits) {
      case 2: return 37.82;
      case 3: return 45.3;
      case 4: return 45.98;
    }
    throw std::invalid_argument("MacroCostTable: bits must be 2, 3 or 4");
  }

  static double power_mw(int bits) {
    switch (bits) {
      case 2: return 4.202;
      case 3: return 5.033;
      case 4: return 5.11;
    }
    throw std::invalid_argument("MacroCostTable: bits must be 2, 3 or 4");
  }

  // rows x columns of the crossbar for an n-city problem: B weight
  // partitions plus the spin storage.
  static std::pair<int, int> array_shape(int n, int bits) { return {n, n * (bits + 1)}; }
};

struct CostReport {
  int bits = 0;
  int n_macros = 0;
  double iteration_ns = 0.0;
  std::int64_t total_order_updates = 0;
  double macro_latency_ns = 0.0;  // batched critical path across levels
  double macro_energy_pj = 0.0;
  // host-measured wall time, copied from the trace
  double clustering_s = 0.0;
  double fixing_s = 0.0;
  double annealing_s = 0.0;
  double merging_s = 0.0;
};

// Weight mapping and host<->macro data transfer are deliberately not
// estimated; reports carry this note instead of invented numbers.
inline constexpr const char* kUnmodeledCostNote =
    "weight mapping and data transfer energy not modeled";

// Closed-form cost of the macro workload described by a solve trace.
// Each order update costs one 9 ns iteration; clusters of a level run in
// parallel over n_macros macros, so a level's latency is the number of
// batches times the slowest cluster in it. Energy is linear in the total
// number of order updates.
inline CostReport estimate(const SolveTrace& trace, int bits, int n_macros) {
  if (n_macros < 1) throw std::invalid_argument("estimate: n_macros must be at least 1");
  const double e_iter = MacroCostTable::energy_per_iteration_pj(bits);  // validates bits
  const double t_iter = MacroCostTable::iteration_ns();

  CostReport r;
  r.bits = bits;
  r.n_macros = n_macros;
  r.iteration_ns = t_iter;
  for (const LevelTrace& lv : trace.levels) {
    std::int64_t max_updates = 0;
    for (std::int64_t u : lv.order_updates) {
      r.total_order_updates += u;
      max_updates = std::max(max_updates, u);
    }
    const int batches = (lv.cluster_count + n_macros - 1) / n_macros;
    r.macro_latency_ns += static_cast<double>(batches) * static_cast<double>(max_updates) * t_iter;
  }
  r.macro_energy_pj = static_cast<double>(r.total_order_updates) * e_iter;
  r.clustering_s = trace.clustering_s;
  r.fixing_s = trace.fixing_s;
  r.annealing_s = trace.annealing_s;
  r.merging_s = trace.merging_s;
  return r;
}

}  // namespace taxi
