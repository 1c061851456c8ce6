#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taxi/distance.hpp"
#include "taxi/tsplib.hpp"

namespace taxi {

// Exact and heuristic reference solvers used for validation. All functions
// are pure and deterministic.

namespace detail {
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
}

// Exact optimal cyclic tour via dynamic programming over subsets.
// City 0 is the fixed start. n must be in [3, 20].
inline std::pair<std::int64_t, Tour> held_karp_cycle(const DistanceMatrix& dm) {
  const int n = dm.n;
  if (n < 3 || n > 20) throw std::invalid_argument("held_karp_cycle: n must be in [3, 20]");
  const int m = n - 1;  // cities 1..n-1, indexed 0..m-1 in the DP
  const std::size_t masks = std::size_t{1} << m;

  std::vector<std::int64_t> dp(masks * m, detail::kInf);
  std::vector<std::int8_t> parent(masks * m, -1);
  for (int j = 0; j < m; ++j) dp[(std::size_t{1} << j) * m + j] = dm.at(0, j + 1);

  for (std::size_t mask = 1; mask < masks; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const std::int64_t cur = dp[mask * m + j];
      if (cur >= detail::kInf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask & (std::size_t{1} << k)) continue;
        const std::size_t nxt = mask | (std::size_t{1} << k);
        const std::int64_t cand = cur + dm.at(j + 1, k + 1);
        if (cand < dp[nxt * m + k]) {
          dp[nxt * m + k] = cand;
          parent[nxt * m + k] = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  const std::size_t full = masks - 1;
  std::int64_t best = detail::kInf;
  int best_end = -1;
  for (int j = 0; j < m; ++j) {
    const std::int64_t cand = dp[full * m + j] + dm.at(j + 1, 0);
    if (cand < best) {
      best = cand;
      best_end = j;
    }
  }

  Tour tour;
  tour.order.assign(static_cast<std::size_t>(n), 0);
  std::size_t mask = full;
  int j = best_end;
  for (int pos = n - 1; pos >= 1; --pos) {
    tour.order[static_cast<std::size_t>(pos)] = j + 1;
    const int pj = parent[mask * m + j];
    mask &= ~(std::size_t{1} << j);
    j = pj;
  }
  return {best, tour};
}

// Exact shortest Hamiltonian path from entry to exit. n must be in [2, 20].
inline std::pair<std::int64_t, Tour> held_karp_path(const DistanceMatrix& dm, int entry, int exit) {
  const int n = dm.n;
  if (n < 2 || n > 20) throw std::invalid_argument("held_karp_path: n must be in [2, 20]");
  if (entry == exit) throw std::invalid_argument("held_karp_path: entry and exit must differ");
  if (entry < 0 || entry >= n || exit < 0 || exit >= n)
    throw std::invalid_argument("held_karp_path: endpoint out of range");

  // DP over the cities other than `entry`; paths start at entry.
  std::vector<int> rest;
  for (int c = 0; c < n; ++c)
    if (c != entry) rest.push_back(c);
  const int m = n - 1;
  const std::size_t masks = std::size_t{1} << m;

  std::vector<std::int64_t> dp(masks * m, detail::kInf);
  std::vector<std::int8_t> parent(masks * m, -1);
  for (int j = 0; j < m; ++j) dp[(std::size_t{1} << j) * m + j] = dm.at(entry, rest[j]);

  for (std::size_t mask = 1; mask < masks; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const std::int64_t cur = dp[mask * m + j];
      if (cur >= detail::kInf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask & (std::size_t{1} << k)) continue;
        const std::size_t nxt = mask | (std::size_t{1} << k);
        const std::int64_t cand = cur + dm.at(rest[j], rest[k]);
        if (cand < dp[nxt * m + k]) {
          dp[nxt * m + k] = cand;
          parent[nxt * m + k] = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  int exit_j = 0;
  while (rest[exit_j] != exit) ++exit_j;
  const std::size_t full = masks - 1;
  const std::int64_t best = dp[full * m + exit_j];

  Tour tour;
  tour.order.assign(static_cast<std::size_t>(n), entry);
  std::size_t mask = full;
  int j = exit_j;
  for (int pos = n - 1; pos >= 1; --pos) {
    tour.order[static_cast<std::size_t>(pos)] = rest[j];
    const int pj = parent[mask * m + j];
    mask &= ~(std::size_t{1} << j);
    j = pj;
  }
  return {best, tour};
}

// Brute-force minimum over all (n-1)! cyclic tours with city 0 first.
inline std::pair<std::int64_t, Tour> exhaustive_cycle(const DistanceMatrix& dm) {
  const int n = dm.n;
  if (n < 3 || n > 11) throw std::invalid_argument("exhaustive_cycle: n must be in [3, 11]");
  std::vector<int> perm(static_cast<std::size_t>(n - 1));
  std::iota(perm.begin(), perm.end(), 1);

  std::int64_t best = detail::kInf;
  std::vector<int> best_perm;
  do {
    std::int64_t len = dm.at(0, perm.front()) + dm.at(perm.back(), 0);
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) len += dm.at(perm[i], perm[i + 1]);
    if (len < best) {
      best = len;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Tour tour;
  tour.order.push_back(0);
  tour.order.insert(tour.order.end(), best_perm.begin(), best_perm.end());
  return {best, tour};
}

// Brute-force minimum over all Hamiltonian paths from entry to exit.
inline std::pair<std::int64_t, Tour> exhaustive_path(const DistanceMatrix& dm, int entry, int exit) {
  const int n = dm.n;
  if (n < 2 || n > 12) throw std::invalid_argument("exhaustive_path: n must be in [2, 12]");
  if (entry == exit) throw std::invalid_argument("exhaustive_path: entry and exit must differ");
  std::vector<int> interior;
  for (int c = 0; c < n; ++c)
    if (c != entry && c != exit) interior.push_back(c);
  std::sort(interior.begin(), interior.end());

  std::int64_t best = detail::kInf;
  std::vector<int> best_interior;
  do {
    std::int64_t len = 0;
    int prev = entry;
    for (int c : interior) {
      len += dm.at(prev, c);
      prev = c;
    }
    len += dm.at(prev, exit);
    if (len < best) {
      best = len;
      best_interior = interior;
    }
  } while (std::next_permutation(interior.begin(), interior.end()));

  Tour tour;
  tour.order.push_back(entry);
  tour.order.insert(tour.order.end(), best_interior.begin(), best_interior.end());
  tour.order.push_back(exit);
  return {best, tour};
}

// Greedy construction: repeatedly move to the closest unvisited city.
inline Tour nearest_neighbor(const DistanceMatrix& dm, int start) {
  const int n = dm.n;
  if (start < 0 || start >= n) throw std::invalid_argument("nearest_neighbor: start out of range");
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  Tour tour;
  tour.order.reserve(static_cast<std::size_t>(n));
  int cur = start;
  visited[cur] = 1;
  tour.order.push_back(cur);
  for (int step = 1; step < n; ++step) {
    int best = -1;
    std::int32_t best_d = 0;
    for (int c = 0; c < n; ++c) {
      if (visited[c]) continue;
      if (best < 0 || dm.at(cur, c) < best_d) {
        best = c;
        best_d = dm.at(cur, c);
      }
    }
    visited[best] = 1;
    tour.order.push_back(best);
    cur = best;
  }
  return tour;
}

// First-improvement 2-opt on a cyclic tour, run to local optimality with a
// deterministic scan order.
inline Tour two_opt(const DistanceMatrix& dm, Tour tour) {
  const int n = dm.n;
  if (tour.size() != n) throw std::invalid_argument("two_opt: tour size does not match matrix");
  auto& t = tour.order;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n - 1; ++i) {
      const int a = t[static_cast<std::size_t>(i)];
      int b = t[static_cast<std::size_t>(i + 1)];
      for (int j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // same edge pair
        const int c = t[static_cast<std::size_t>(j)];
        const int d = t[static_cast<std::size_t>((j + 1) % n)];
        const std::int64_t delta = static_cast<std::int64_t>(dm.at(a, c)) + dm.at(b, d) -
                                   dm.at(a, b) - dm.at(c, d);
        if (delta < 0) {
          std::reverse(t.begin() + i + 1, t.begin() + j + 1);
          b = t[static_cast<std::size_t>(i + 1)];
          improved = true;
        }
      }
    }
  }
  return tour;
}

}  // namespace taxi
