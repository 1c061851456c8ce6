#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxi/tsplib.hpp"

namespace taxi {

// Integer city-to-city distances in TSPLIB units, plus the minimum
// off-diagonal entry used as the quantization reference.
struct DistanceMatrix {
  int n = 0;
  std::vector<std::int32_t> d;  // row-major n*n, zero diagonal, symmetric
  std::int32_t d_min = 0;

  std::int32_t at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  std::int32_t& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

// Quantized conductance levels: shorter distance maps to a larger level.
// Off-diagonal entries lie in [1, 2^bits - 1]; the diagonal is 0.
struct WeightMatrix {
  int n = 0;
  int bits = 0;
  std::vector<std::int32_t> w;

  std::int32_t at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }
  std::int32_t& at(int i, int j) { return w[static_cast<std::size_t>(i) * n + j]; }
  std::int32_t max_level() const { return (std::int32_t{1} << bits) - 1; }
};

namespace detail {

// TSPLIB nearest-integer rounding.
inline std::int32_t nint(double x) { return static_cast<std::int32_t>(x + 0.5); }

inline std::int32_t edge_distance(const Point& a, const Point& b, EdgeWeightType type) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  switch (type) {
    case EdgeWeightType::euc_2d:
      return nint(std::sqrt(dx * dx + dy * dy));
    case EdgeWeightType::ceil_2d:
      return static_cast<std::int32_t>(std::ceil(std::sqrt(dx * dx + dy * dy)));
    case EdgeWeightType::att: {
      const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
      const std::int32_t t = nint(r);
      return (t < r) ? t + 1 : t;
    }
  }
  return 0;
}

}  // namespace detail

// Builds the full distance matrix under the given TSPLIB convention.
// Coincident points get unit distance so the conductance mapping stays
// well-defined; d_min is the minimum off-diagonal entry after that fix.
inline DistanceMatrix build_distance_matrix(std::span<const Point> points, EdgeWeightType type) {
  const int n = static_cast<int>(points.size());
  if (n < 2) throw std::invalid_argument("build_distance_matrix: need at least 2 points");
  for (const Point& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("build_distance_matrix: non-finite coordinate");

  DistanceMatrix dm;
  dm.n = n;
  dm.d.assign(static_cast<std::size_t>(n) * n, 0);
  std::int32_t d_min = 0;
  bool first = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::int32_t dij = detail::edge_distance(points[i], points[j], type);
      if (dij < 1) dij = 1;  // coincident (or sub-unit CEIL) pair
      dm.at(i, j) = dm.at(j, i) = dij;
      if (first || dij < d_min) {
        d_min = dij;
        first = false;
      }
    }
  }
  dm.d_min = d_min;
  return dm;
}

// Conductance mapping: w = round(d_min / d * (2^bits - 1)), clamped to
// [1, 2^bits - 1] off the diagonal. The minimum distance maps to full scale.
inline WeightMatrix quantize_weights(const DistanceMatrix& dm, int bits) {
  if (bits < 2 || bits > 4) throw std::invalid_argument("quantize_weights: bits must be 2, 3 or 4");
  if (dm.n < 2 || dm.d_min < 1) throw std::invalid_argument("quantize_weights: invalid distance matrix");

  WeightMatrix wm;
  wm.n = dm.n;
  wm.bits = bits;
  wm.w.assign(static_cast<std::size_t>(dm.n) * dm.n, 0);
  const double full_scale = static_cast<double>(wm.max_level());
  for (int i = 0; i < dm.n; ++i) {
    for (int j = 0; j < dm.n; ++j) {
      if (i == j) continue;
      const double ratio = static_cast<double>(dm.d_min) / static_cast<double>(dm.at(i, j));
      std::int32_t level = detail::nint(ratio * full_scale);
      if (level < 1) level = 1;
      if (level > wm.max_level()) level = wm.max_level();
      wm.at(i, j) = level;
    }
  }
  return wm;
}

// Per-edge distance under the TSPLIB convention, without materializing a
// matrix; coincident pairs get the same unit-distance fix as
// build_distance_matrix.
inline std::int32_t point_distance(const Point& a, const Point& b, EdgeWeightType type) {
  const std::int32_t d = detail::edge_distance(a, b, type);
  return d < 1 ? 1 : d;
}

// Tour length computed directly from coordinates; usable at scales where an
// n x n matrix does not fit.
inline std::int64_t tour_length_points(std::span<const int> order, std::span<const Point> coords,
                                       EdgeWeightType type, bool cyclic) {
  const std::size_t n = order.size();
  std::int64_t total = 0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    total += point_distance(coords[static_cast<std::size_t>(order[i])],
                            coords[static_cast<std::size_t>(order[i + 1])], type);
  if (cyclic && n > 1)
    total += point_distance(coords[static_cast<std::size_t>(order[n - 1])],
                            coords[static_cast<std::size_t>(order[0])], type);
  return total;
}

// Sum of consecutive edge distances; adds the closing edge in cyclic mode.
inline std::int64_t tour_length(const Tour& tour, const DistanceMatrix& dm, bool cyclic) {
  const int n = tour.size();
  if (n != dm.n) throw std::invalid_argument("tour_length: tour size does not match matrix");
  std::int64_t total = 0;
  for (int i = 0; i + 1 < n; ++i) total += dm.at(tour.order[i], tour.order[i + 1]);
  if (cyclic && n > 1) total += dm.at(tour.order[n - 1], tour.order[0]);
  return total;
}

}  // namespace taxi
