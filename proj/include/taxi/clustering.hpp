#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxi/tsplib.hpp"

namespace taxi {

struct ClusterNode {
  std::vector<int> members;  // indices into the level below (cities at level 0)
  Point centroid;
};

using Level = std::vector<ClusterNode>;

// Bottom-up cluster tree. levels[0] holds one singleton node per city; each
// higher level partitions the nodes of the level below into clusters of at
// most the configured maximum size. The topmost level has at most that many
// nodes as well.
struct Hierarchy {
  std::vector<Level> levels;

  const Level& top() const { return levels.back(); }
  int depth() const { return static_cast<int>(levels.size()); }
};

// Agglomerative clustering with Ward linkage: starting from singletons,
// repeatedly merge the pair with the smallest within-cluster variance
// increase
//   delta(A, B) = |A||B| / (|A|+|B|) * ||centroid_A - centroid_B||^2
// until k clusters remain. Pair distances are maintained with the
// Lance-Williams recurrence. Ties are broken toward the pair with the
// lexicographically smallest (lowest member index, other lowest member
// index), so the merge sequence is deterministic.
inline std::vector<std::vector<int>> agglomerative_ward(std::span<const Point> points, int k) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw std::invalid_argument("agglomerative_ward: k out of range");

  struct Cluster {
    double cx, cy;
    int size;
    int low;  // lowest member index, for tie-breaking
    bool alive;
  };
  std::vector<Cluster> cl(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cl[static_cast<std::size_t>(i)] = {points[i].x, points[i].y, 1, i, true};

  std::vector<std::vector<int>> leaf_cache(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) leaf_cache[static_cast<std::size_t>(i)] = {i};

  const auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
  std::vector<double> delta(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      const double d = 0.5 * (dx * dx + dy * dy);
      delta[idx(i, j)] = delta[idx(j, i)] = d;
    }
  }

  int active = n;
  while (active > k) {
    // smallest delta; ties toward the smallest (low_a, low_b) pair
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    int best_lo = 0, best_hi = 0;
    for (int i = 0; i < n; ++i) {
      if (!cl[static_cast<std::size_t>(i)].alive) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!cl[static_cast<std::size_t>(j)].alive) continue;
        const double d = delta[idx(i, j)];
        const int lo = std::min(cl[static_cast<std::size_t>(i)].low, cl[static_cast<std::size_t>(j)].low);
        const int hi = std::max(cl[static_cast<std::size_t>(i)].low, cl[static_cast<std::size_t>(j)].low);
        if (d < best || (d == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
          best = d;
          bi = i;
          bj = j;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }

    Cluster& a = cl[static_cast<std::size_t>(bi)];
    Cluster& b = cl[static_cast<std::size_t>(bj)];
    const double na = a.size, nb = b.size;

    // Lance-Williams update of delta(A u B, C) for all alive C
    for (int c = 0; c < n; ++c) {
      if (c == bi || c == bj || !cl[static_cast<std::size_t>(c)].alive) continue;
      const double nc = cl[static_cast<std::size_t>(c)].size;
      const double dac = delta[idx(bi, c)];
      const double dbc = delta[idx(bj, c)];
      const double dab = delta[idx(bi, bj)];
      const double upd = ((na + nc) * dac + (nb + nc) * dbc - nc * dab) / (na + nb + nc);
      delta[idx(bi, c)] = delta[idx(c, bi)] = upd;
    }

    a.cx = (na * a.cx + nb * b.cx) / (na + nb);
    a.cy = (na * a.cy + nb * b.cy) / (na + nb);
    a.size += b.size;
    a.low = std::min(a.low, b.low);
    b.alive = false;

    // fold b's leaves into a
    auto& la = leaf_cache[static_cast<std::size_t>(bi)];
    auto& lb = leaf_cache[static_cast<std::size_t>(bj)];
    la.insert(la.end(), lb.begin(), lb.end());
    lb.clear();
    --active;
  }

  std::vector<std::vector<int>> result;
  result.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    if (!cl[static_cast<std::size_t>(i)].alive) continue;
    auto members = leaf_cache[static_cast<std::size_t>(i)];
    std::sort(members.begin(), members.end());
    result.push_back(std::move(members));
  }
  // deterministic cluster order: by lowest member index
  std::sort(result.begin(), result.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return result;
}

namespace detail {

inline Point mean_point(std::span<const Point> pts, std::span<const int> members) {
  double sx = 0.0, sy = 0.0;
  for (int m : members) {
    sx += pts[static_cast<std::size_t>(m)].x;
    sy += pts[static_cast<std::size_t>(m)].y;
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  return Point{sx * inv, sy * inv};
}

// Ward can hand back clusters above the size cap; re-cluster those into
// ceil(size / m) parts until every piece fits.
inline void split_oversized(std::span<const Point> pts, std::vector<int> members, int m,
                            std::vector<std::vector<int>>& out) {
  if (static_cast<int>(members.size()) <= m) {
    out.push_back(std::move(members));
    return;
  }
  const int parts = static_cast<int>((members.size() + m - 1) / static_cast<std::size_t>(m));
  std::vector<Point> sub;
  sub.reserve(members.size());
  for (int mm : members) sub.push_back(pts[static_cast<std::size_t>(mm)]);
  auto pieces = agglomerative_ward(sub, parts);
  for (auto& piece : pieces) {
    std::vector<int> mapped;
    mapped.reserve(piece.size());
    for (int local : piece) mapped.push_back(members[static_cast<std::size_t>(local)]);
    split_oversized(pts, std::move(mapped), m, out);
  }
}

}  // namespace detail

// Builds the full hierarchy for a maximum solvable sub-problem size m:
// level 0 is the cities (singletons); each round clusters the current top
// level's centroids into ceil(count / m) Ward clusters (splitting any that
// exceed m) until a level has at most m nodes.
inline Hierarchy build_hierarchy(std::span<const Point> points, int m) {
  if (m < 3) throw std::invalid_argument("build_hierarchy: m must be at least 3");
  const int n = static_cast<int>(points.size());
  if (n < 1) throw std::invalid_argument("build_hierarchy: need at least one point");

  Hierarchy h;
  Level base;
  base.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) base.push_back(ClusterNode{{i}, points[static_cast<std::size_t>(i)]});
  h.levels.push_back(std::move(base));

  while (static_cast<int>(h.top().size()) > m) {
    const Level& below = h.top();
    std::vector<Point> pts;
    pts.reserve(below.size());
    for (const ClusterNode& node : below) pts.push_back(node.centroid);

    const int count = static_cast<int>(below.size());
    const int k = (count + m - 1) / m;
    auto raw = agglomerative_ward(pts, k);

    std::vector<std::vector<int>> fitted;
    for (auto& cluster : raw) detail::split_oversized(pts, std::move(cluster), m, fitted);
    std::sort(fitted.begin(), fitted.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });

    Level level;
    level.reserve(fitted.size());
    for (auto& members : fitted) {
      ClusterNode node;
      node.centroid = detail::mean_point(pts, members);
      node.members = std::move(members);
      level.push_back(std::move(node));
    }
    h.levels.push_back(std::move(level));
  }
  return h;
}

// Debug dump: one JSON object per level with node members and centroids.
inline std::string hierarchy_to_json(const Hierarchy& h) {
  std::string out = "{\"levels\":[";
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    if (l) out += ',';
    out += "[";
    for (std::size_t c = 0; c < h.levels[l].size(); ++c) {
      if (c) out += ',';
      const ClusterNode& node = h.levels[l][c];
      out += "{\"members\":[";
      for (std::size_t i = 0; i < node.members.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(node.members[i]);
      }
      out += "],\"centroid\":[" + std::to_string(node.centroid.x) + "," +
             std::to_string(node.centroid.y) + "]}";
    }
    out += "]";
  }
  out += "]}";
  return out;
}

}  // namespace taxi
