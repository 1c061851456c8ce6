#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "taxi/distance.hpp"
#include "taxi/rng.hpp"
#include "taxi/tsplib.hpp"

namespace taxi {

// Behavioral model of one crossbar Ising macro. The macro keeps a quantized
// distance-weight matrix, a one-hot city-by-order spin storage, and the
// tour-length Hamiltonian of the stored assignment, and optimizes the
// visiting order one position at a time:
//
//   superpose   read the spin columns of the two neighboring orders; the
//               row-wise OR is the drive vector u
//   MAC         column currents d_hat[x] = sum_{k != x} w[x][k] * u[k];
//               larger current means shorter combined distance to both
//               neighbors
//   mask        a stochastic binary vector gates which columns may win;
//               an empty mask lets every column through
//   select      the gated candidate whose write lowers the Hamiltonian the
//               most; the MAC currents break ties (largest current wins)
//   write       a Hamiltonian-lowering winner is always written into the
//               optimized order; a raising one is written with a
//               probability set by the switching probability p, the
//               stochastic escape from local minima
//
// Sweeping all optimizable orders under the shrinking switching probability
// anneals the stored tour toward minimum length.

enum class SolveMode { cycle, path };

// One-hot spin storage: assign maps visiting order to city (local index).
// Path mode pins both endpoint cities in place. Cycle mode never optimizes
// order 0 (rotation-symmetry anchor), but its occupant may still be
// displaced by a swap.
struct SpinStorage {
  SolveMode mode = SolveMode::cycle;
  std::vector<int> assign;    // order -> city
  std::vector<int> order_of;  // city -> order
  int fixed_first = -1;
  int fixed_last = -1;

  int size() const { return static_cast<int>(assign.size()); }

  // Orders 1..last_optimizable() may be rewritten; order 0 (and order n-1
  // in path mode) are never optimized directly.
  int last_optimizable() const { return mode == SolveMode::cycle ? size() - 1 : size() - 2; }

  bool is_optimizable(int order) const { return order >= 1 && order <= last_optimizable(); }

  bool is_fixed_city(int city) const {
    return mode == SolveMode::path && (city == fixed_first || city == fixed_last);
  }

  Tour tour() const { return Tour{assign}; }

  static SpinStorage make_cycle(std::vector<int> initial_order) {
    SpinStorage s;
    s.mode = SolveMode::cycle;
    s.init(std::move(initial_order));
    if (s.size() < 3) throw std::invalid_argument("SpinStorage: cycle needs at least 3 cities");
    return s;
  }

  static SpinStorage make_path(std::vector<int> initial_order, int entry, int exit) {
    SpinStorage s;
    s.mode = SolveMode::path;
    s.init(std::move(initial_order));
    if (s.size() < 2) throw std::invalid_argument("SpinStorage: path needs at least 2 cities");
    if (s.assign.front() != entry || s.assign.back() != exit)
      throw std::invalid_argument("SpinStorage: endpoints must be pre-placed at the first and last order");
    s.fixed_first = entry;
    s.fixed_last = exit;
    return s;
  }

 private:
  void init(std::vector<int>&& initial) {
    assign = std::move(initial);
    const int n = size();
    order_of.assign(static_cast<std::size_t>(n), -1);
    for (int o = 0; o < n; ++o) {
      const int c = assign[static_cast<std::size_t>(o)];
      if (c < 0 || c >= n || order_of[static_cast<std::size_t>(c)] != -1)
        throw std::invalid_argument("SpinStorage: initial order is not a permutation");
      order_of[static_cast<std::size_t>(c)] = o;
    }
  }
};

// Switching-probability model of the SOT write path: a logistic in the
// write current, calibrated on the stochastic-regime anchor points.
struct StochasticModel {
  double i0_uA = 0.0;  // logistic midpoint
  double k_uA = 1.0;   // logistic slope
  double i_stoch_lo_uA = 300.0;
  double i_det_uA = 650.0;

  double probability(double i_uA) const { return 1.0 / (1.0 + std::exp(-(i_uA - i0_uA) / k_uA)); }
};

// Two-anchor fit: P(353 uA) = 1% and P(420 uA) = 20%. The fitted curve must
// be effectively deterministic at the 650 uA write current used for normal
// crossbar operation.
inline StochasticModel calibrate_stochastic_model() {
  constexpr double i_lo = 353.0, p_lo = 0.01;
  constexpr double i_hi = 420.0, p_hi = 0.20;
  const double logit_lo = std::log(p_lo / (1.0 - p_lo));
  const double logit_hi = std::log(p_hi / (1.0 - p_hi));
  StochasticModel m;
  m.k_uA = (i_hi - i_lo) / (logit_hi - logit_lo);
  m.i0_uA = i_lo - m.k_uA * logit_lo;
  if (!(m.probability(m.i_det_uA) > 0.999))
    throw std::logic_error("calibrate_stochastic_model: deterministic regime inconsistent");
  return m;
}

// Annealing schedule: the write current starts at 420 uA (20% switching
// probability), drops by 50 nA per sweep and stops at 353 uA (1%). The
// nominal step fixes the sweep count; the executed ramp spreads the full
// 67 uA span across those sweeps so the first sweep runs exactly at i_start
// and the last exactly at i_stop.
struct AnnealSchedule {
  double i_start_uA = 420.0;
  double i_stop_uA = 353.0;
  double i_step_uA = 0.05;

  int sweep_count() const {
    return static_cast<int>(std::lround((i_start_uA - i_stop_uA) / i_step_uA));
  }

  double write_current(int step, int total) const {
    if (total <= 1) return i_start_uA;
    return i_start_uA + (i_stop_uA - i_start_uA) * static_cast<double>(step) /
                            static_cast<double>(total - 1);
  }
};

// Whether the write current steps once per full sweep (default reading) or
// once per order update.
enum class AnnealStepping { per_sweep, per_update };

struct MacroNonideal {
  double hrs_leak_fraction = 0.0;  // epsilon: HRS leakage as a fraction of full scale
};

// Escape temperature per unit switching probability, in units of the mean
// city distance: a Hamiltonian-raising write of one mean-distance is
// accepted with probability exp(-1 / kEscapeTempFactor) when p = 1.
// Calibrated once against exact small-instance optima.
inline constexpr double kEscapeTempFactor = 2.0;

struct MacroState {
  WeightMatrix weights;
  DistanceMatrix distances;  // Hamiltonian bookkeeping of the stored tour
  SpinStorage spins;
  AnnealSchedule schedule;
  StochasticModel stoch = calibrate_stochastic_model();
  SplitMix64 rng;
  MacroNonideal nonideal;
  AnnealStepping stepping = AnnealStepping::per_sweep;
  double escape_scale = 0.0;  // kEscapeTempFactor * mean off-diagonal distance

  MacroState(WeightMatrix w, DistanceMatrix d, SpinStorage s, SplitMix64 r)
      : weights(std::move(w)), distances(std::move(d)), spins(std::move(s)), rng(r) {
    if (weights.n != spins.size() || distances.n != spins.size())
      throw std::invalid_argument("MacroState: matrix sizes do not match spin storage");
    double sum = 0.0;
    for (int i = 0; i < distances.n; ++i)
      for (int j = 0; j < distances.n; ++j)
        if (i != j) sum += distances.at(i, j);
    const double pairs = static_cast<double>(distances.n) * (distances.n - 1);
    escape_scale = kEscapeTempFactor * sum / pairs;
  }
};

// Crossbar cells needed for an n-city sub-problem at the given precision:
// B weight partitions plus one spin-storage partition, each n columns wide.
inline std::int64_t crossbar_cells(int n, int bits) {
  return static_cast<std::int64_t>(n) * n * (bits + 1);
}

// Drive vector for optimizing `order`: u[k] = 1 iff city k is visited at
// order-1 or order+1 (cycle wraps around).
inline std::vector<std::uint8_t> superpose(const SpinStorage& spins, int order) {
  const int n = spins.size();
  if (order < 0 || order >= n) throw std::invalid_argument("superpose: order out of range");
  if (!spins.is_optimizable(order)) throw std::invalid_argument("superpose: order is not optimizable");
  std::vector<std::uint8_t> u(static_cast<std::size_t>(n), 0);
  const int prev = spins.assign[static_cast<std::size_t>(order - 1)];
  const int next = spins.assign[static_cast<std::size_t>((order + 1) % n)];
  u[static_cast<std::size_t>(prev)] = 1;
  u[static_cast<std::size_t>(next)] = 1;
  return u;
}

// Column currents d_hat[x] = sum_{k != x} (w[x][k] + eps * full_scale) * u[k].
// With eps = 0 the sums are exact integers.
inline std::vector<double> mac_currents(const WeightMatrix& weights, const std::vector<std::uint8_t>& u,
                                        double hrs_leak_fraction = 0.0) {
  const int n = weights.n;
  if (static_cast<int>(u.size()) != n) throw std::invalid_argument("mac_currents: drive vector size mismatch");
  const double leak = hrs_leak_fraction * static_cast<double>(weights.max_level());
  std::vector<double> d_hat(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (!u[static_cast<std::size_t>(k)]) continue;
    for (int x = 0; x < n; ++x) {
      if (x == k) continue;
      d_hat[static_cast<std::size_t>(x)] += static_cast<double>(weights.at(x, k)) + leak;
    }
  }
  return d_hat;
}

// Raw Bernoulli subset: index i included with probability p, in index order.
inline std::vector<int> bernoulli_subset(int n, double p, SplitMix64& rng) {
  std::vector<int> s;
  for (int i = 0; i < n; ++i)
    if (rng.next_double() < p) s.push_back(i);
  return s;
}

// Stochastic gating vector. An empty draw opens every column, so the
// selection stage always sees at least one candidate.
inline std::vector<int> stochastic_mask(int n, double p, SplitMix64& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("stochastic_mask: p must be in [0, 1]");
  std::vector<int> s = bernoulli_subset(n, p, rng);
  if (s.empty()) {
    s.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
  }
  return s;
}

// Winner-take-all: largest current among the candidates, lowest index wins
// ties.
inline int argmax_select(const std::vector<double>& d_hat, const std::vector<int>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("argmax_select: empty candidate set");
  int best = candidates.front();
  for (int c : candidates)
    if (d_hat[static_cast<std::size_t>(c)] > d_hat[static_cast<std::size_t>(best)]) best = c;
  return best;
}

// Validity filter on the stochastic mask: the two neighbor cities and the
// pinned cities can never be written into `order`. If the filter empties
// the mask, all valid cities become candidates.
inline std::vector<int> candidate_set(const SpinStorage& spins, int order, const std::vector<int>& mask) {
  const int n = spins.size();
  if (!spins.is_optimizable(order)) throw std::invalid_argument("candidate_set: order is not optimizable");
  const int prev = spins.assign[static_cast<std::size_t>(order - 1)];
  const int next = spins.assign[static_cast<std::size_t>((order + 1) % n)];
  const auto excluded = [&](int city) {
    return city == prev || city == next || spins.is_fixed_city(city);
  };
  std::vector<int> out;
  for (int c : mask)
    if (!excluded(c)) out.push_back(c);
  if (out.empty()) {
    for (int c = 0; c < n; ++c)
      if (!excluded(c)) out.push_back(c);
  }
  if (out.empty()) throw std::logic_error("candidate_set: no valid candidate");
  return out;
}

// Writes `city` into `order`. If the city currently sits at another order,
// the displaced occupant moves there (swap), keeping the one-hot row and
// column structure intact. Keeping neighbor cities out of `order` is the
// candidate filter's job, not this op's.
inline void update_spin(SpinStorage& spins, int order, int city) {
  const int n = spins.size();
  if (!spins.is_optimizable(order)) throw std::invalid_argument("update_spin: order is not optimizable");
  if (city < 0 || city >= n) throw std::invalid_argument("update_spin: city out of range");
  if (spins.is_fixed_city(city)) throw std::invalid_argument("update_spin: city is pinned");

  const int old_order = spins.order_of[static_cast<std::size_t>(city)];
  if (old_order == order) return;
  const int displaced = spins.assign[static_cast<std::size_t>(order)];
  spins.assign[static_cast<std::size_t>(order)] = city;
  spins.assign[static_cast<std::size_t>(old_order)] = displaced;
  spins.order_of[static_cast<std::size_t>(city)] = order;
  spins.order_of[static_cast<std::size_t>(displaced)] = old_order;
}

// Writes `city` into `order` by shifting the cities in between (the reset
// column is refilled and every displaced spin moves one order over). This
// is the writer the annealed sweep uses: unlike a plain swap it heals the
// donor site, so the stored tour changes by one remove-and-reinsert.
inline void insert_spin(SpinStorage& spins, int order, int city) {
  const int n = spins.size();
  if (!spins.is_optimizable(order)) throw std::invalid_argument("insert_spin: order is not optimizable");
  if (city < 0 || city >= n) throw std::invalid_argument("insert_spin: city out of range");
  if (spins.is_fixed_city(city)) throw std::invalid_argument("insert_spin: city is pinned");

  const int old_order = spins.order_of[static_cast<std::size_t>(city)];
  if (old_order == order) return;
  if (old_order < order) {
    for (int k = old_order; k < order; ++k) {
      spins.assign[static_cast<std::size_t>(k)] = spins.assign[static_cast<std::size_t>(k + 1)];
      spins.order_of[static_cast<std::size_t>(spins.assign[static_cast<std::size_t>(k)])] = k;
    }
  } else {
    for (int k = old_order; k > order; --k) {
      spins.assign[static_cast<std::size_t>(k)] = spins.assign[static_cast<std::size_t>(k - 1)];
      spins.order_of[static_cast<std::size_t>(spins.assign[static_cast<std::size_t>(k)])] = k;
    }
  }
  spins.assign[static_cast<std::size_t>(order)] = city;
  spins.order_of[static_cast<std::size_t>(city)] = order;
}

// Tour-length change of insert_spin(order, city): the city's old edges are
// bridged and the target gap is split. Everything in between keeps its
// edges, so only three edges change.
inline std::int64_t insertion_delta(const DistanceMatrix& dm, const SpinStorage& spins, int order,
                                    int city) {
  const int n = spins.size();
  const int old_order = spins.order_of[static_cast<std::size_t>(city)];
  if (old_order == order) return 0;
  const auto at = [&](int pos) {
    return spins.assign[static_cast<std::size_t>(((pos % n) + n) % n)];
  };
  const int before_city = at(old_order - 1);
  const int after_city = at(old_order + 1);
  int gap_a, gap_b;  // the edge x lands on, read from the tour without x
  if (old_order < order) {
    gap_a = at(order);
    gap_b = at(order + 1);
  } else {
    gap_a = at(order - 1);
    gap_b = at(order);
  }
  if (gap_a == city || gap_b == city) return 0;  // cyclic rotation, same tour
  return static_cast<std::int64_t>(dm.at(before_city, after_city)) - dm.at(before_city, city) -
         dm.at(city, after_city) + dm.at(gap_a, city) + dm.at(city, gap_b) - dm.at(gap_a, gap_b);
}

namespace detail {

// Mask filtered to writable cities (pinned endpoints can never move);
// empty result falls back to every writable city.
inline std::vector<int> writable_candidates(const SpinStorage& spins, const std::vector<int>& mask) {
  std::vector<int> out;
  for (int c : mask)
    if (!spins.is_fixed_city(c)) out.push_back(c);
  if (out.empty()) {
    for (int c = 0; c < spins.size(); ++c)
      if (!spins.is_fixed_city(c)) out.push_back(c);
  }
  return out;
}

}  // namespace detail

// One order update: superpose -> MAC -> stochastic mask -> select the
// candidate whose write lowers the stored tour's Hamiltonian the most (MAC
// currents break ties) -> annealed write. A raising write is committed
// with probability exp(-delta / (p * escape_scale)); a neutral one with
// probability p.
inline void update_order(MacroState& st, int order, double p) {
  const auto u = superpose(st.spins, order);
  const auto d_hat = mac_currents(st.weights, u, st.nonideal.hrs_leak_fraction);
  const auto mask = stochastic_mask(st.spins.size(), p, st.rng);
  const auto cands = detail::writable_candidates(st.spins, mask);

  int pick = -1;
  std::int64_t pick_delta = 0;
  for (int c : cands) {
    const std::int64_t delta = insertion_delta(st.distances, st.spins, order, c);
    if (pick < 0 || delta < pick_delta ||
        (delta == pick_delta &&
         (d_hat[static_cast<std::size_t>(c)] > d_hat[static_cast<std::size_t>(pick)] ||
          (d_hat[static_cast<std::size_t>(c)] == d_hat[static_cast<std::size_t>(pick)] && c < pick)))) {
      pick = c;
      pick_delta = delta;
    }
  }
  if (pick == st.spins.assign[static_cast<std::size_t>(order)]) return;

  bool commit = pick_delta < 0;
  if (!commit && p > 0.0) {
    const double accept =
        pick_delta == 0 ? p
                        : std::exp(-static_cast<double>(pick_delta) / (p * st.escape_scale));
    commit = st.rng.next_double() < accept;
  }
  if (commit) insert_spin(st.spins, order, pick);
}

// One full sweep over all optimizable orders.
inline void sweep(MacroState& st, double p, bool descending = false) {
  if (descending) {
    for (int order = st.spins.last_optimizable(); order >= 1; --order) update_order(st, order, p);
  } else {
    for (int order = 1; order <= st.spins.last_optimizable(); ++order) update_order(st, order, p);
  }
}

// Called after each sweep with (sweep index, write current, switching
// probability); used for annealing-curve traces.
using SweepObserver = std::function<void(int, double, double)>;

// Full annealing run: sweep_count() sweeps under the sigmoidal probability
// ramp, then read the tour out of the spin storage. Sweep direction
// alternates so coverage is not biased toward high orders.
inline Tour anneal(MacroState& st, const SweepObserver& observe = {}) {
  const int total = st.schedule.sweep_count();
  if (st.stepping == AnnealStepping::per_sweep) {
    for (int s = 0; s < total; ++s) {
      const double i = st.schedule.write_current(s, total);
      const double p = st.stoch.probability(i);
      sweep(st, p, (s & 1) != 0);
      if (observe) observe(s, i, p);
    }
  } else {
    // the current steps after every order update instead; same total number
    // of write-current steps, so the run may end mid-sweep
    int done = 0;
    int sweep_no = 0;
    while (done < total) {
      const bool desc = (sweep_no & 1) != 0;
      const int last = st.spins.last_optimizable();
      for (int k = 0; k < last && done < total; ++k, ++done) {
        const int order = desc ? last - k : 1 + k;
        update_order(st, order, st.stoch.probability(st.schedule.write_current(done, total)));
      }
      if (observe)
        observe(sweep_no, st.schedule.write_current(std::min(done, total - 1), total),
                st.stoch.probability(st.schedule.write_current(std::min(done, total - 1), total)));
      ++sweep_no;
    }
  }
  return st.spins.tour();
}

}  // namespace taxi
