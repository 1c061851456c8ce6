#pragma once

#include <cstdint>
#include <vector>

namespace taxi {

// Per-level record of one hierarchical solve, in solve order (top-level
// cycle first, then each descended level).
struct LevelTrace {
  int level = 0;          // hierarchy level index the solved clusters live on
  int cluster_count = 0;
  int batches = 0;        // worker batches actually executed by the host
  int sweeps = 0;         // annealing sweeps per macro-solved cluster (0 = all trivial)
  std::vector<std::int64_t> order_updates;  // per cluster, zero for trivial solves
};

struct SolveTrace {
  std::vector<LevelTrace> levels;
  double clustering_s = 0.0;
  double fixing_s = 0.0;
  double annealing_s = 0.0;
  double merging_s = 0.0;
  std::int64_t final_length = 0;
};

}  // namespace taxi
