#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "taxi/oracle.hpp"
#include "taxi/rng.hpp"

using namespace taxi;

namespace {

std::vector<Point> random_points(int n, SplitMix64& rng, double scale = 1000.0) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({rng.next_double() * scale, rng.next_double() * scale});
  return pts;
}

DistanceMatrix random_dm(int n, SplitMix64& rng) {
  return build_distance_matrix(random_points(n, rng), EdgeWeightType::euc_2d);
}

}  // namespace

TEST_CASE("held_karp_cycle on known geometries", "[oracle]") {
  const std::vector<Point> tri{{0, 0}, {0, 3}, {4, 0}};
  const auto [tri_len, tri_tour] = held_karp_cycle(build_distance_matrix(tri, EdgeWeightType::euc_2d));
  CHECK(tri_len == 12);
  CHECK(tri_tour.is_permutation());

  const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto [sq_len, sq_tour] = held_karp_cycle(build_distance_matrix(square, EdgeWeightType::euc_2d));
  CHECK(sq_len == 4);
  CHECK(sq_tour.is_permutation());
}

TEST_CASE("held_karp_cycle equals exhaustive enumeration", "[oracle][property]") {
  SplitMix64 rng(123);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 5 + static_cast<int>(rng.next_below(6));  // 5..10
    const DistanceMatrix dm = random_dm(n, rng);
    const auto [hk_len, hk_tour] = held_karp_cycle(dm);
    const auto [ex_len, ex_tour] = exhaustive_cycle(dm);
    CHECK(hk_len == ex_len);
    CHECK(tour_length(hk_tour, dm, true) == hk_len);
    CHECK(tour_length(ex_tour, dm, true) == ex_len);
  }
}

TEST_CASE("held_karp_cycle range checks", "[oracle]") {
  SplitMix64 rng(5);
  CHECK_THROWS_AS(held_karp_cycle(random_dm(2, rng)), std::invalid_argument);
}

TEST_CASE("held_karp_path endpoints and tiny cases", "[oracle]") {
  SplitMix64 rng(17);
  const DistanceMatrix dm2 = random_dm(2, rng);
  const auto [len2, tour2] = held_karp_path(dm2, 0, 1);
  CHECK(len2 == dm2.at(0, 1));
  CHECK(tour2.order == std::vector<int>{0, 1});

  const DistanceMatrix dm3 = random_dm(3, rng);
  const auto [len3, tour3] = held_karp_path(dm3, 2, 0);
  CHECK(tour3.order == std::vector<int>{2, 1, 0});
  CHECK(len3 == dm3.at(2, 1) + dm3.at(1, 0));

  CHECK_THROWS_AS(held_karp_path(dm3, 1, 1), std::invalid_argument);
}

TEST_CASE("held_karp_path equals exhaustive enumeration", "[oracle][property]") {
  SplitMix64 rng(31);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 5 + static_cast<int>(rng.next_below(5));  // 5..9
    const DistanceMatrix dm = random_dm(n, rng);
    const int entry = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    int exit = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (exit == entry) exit = (exit + 1) % n;
    const auto [hk_len, hk_tour] = held_karp_path(dm, entry, exit);
    const auto [ex_len, ex_tour] = exhaustive_path(dm, entry, exit);
    CHECK(hk_len == ex_len);
    CHECK(hk_tour.order.front() == entry);
    CHECK(hk_tour.order.back() == exit);
    CHECK(hk_tour.is_permutation());
    CHECK(tour_length(hk_tour, dm, false) == hk_len);
  }
}

TEST_CASE("nearest_neighbor and two_opt", "[oracle]") {
  const std::vector<Point> tri{{0, 0}, {0, 3}, {4, 0}};
  const DistanceMatrix tri_dm = build_distance_matrix(tri, EdgeWeightType::euc_2d);
  for (int s = 0; s < 3; ++s) CHECK(tour_length(nearest_neighbor(tri_dm, s), tri_dm, true) == 12);

  SplitMix64 rng(77);
  const DistanceMatrix dm = random_dm(50, rng);
  const Tour nn = nearest_neighbor(dm, 0);
  REQUIRE(nn.is_permutation());
  const Tour improved = two_opt(dm, nn);
  REQUIRE(improved.is_permutation());
  CHECK(tour_length(improved, dm, true) <= tour_length(nn, dm, true));

  // a 2-opt optimal tour is a fixed point
  const Tour again = two_opt(dm, improved);
  CHECK(again.order == improved.order);
}
