// Copyright 2026 The Geoblock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geoblock/blocker.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>

namespace geoblock::blocker {
namespace {

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
Vec2 V(Rational x, Rational y) { return {x, y}; }

// Exhaustive minimum hitting set over all candidate subsets.
std::int64_t exhaustive_min(const IncidenceInstance& inst) {
  const std::size_t c = inst.candidate_count();
  const std::size_t g = inst.geodesic_count();
  if (g == 0) return 0;
  std::int64_t best = -1;
  for (std::uint32_t mask = 1; mask < (1u << c); ++mask) {
    int size = std::popcount(mask);
    if (best >= 0 && size >= best) continue;
    Bitset cov(g);
    for (std::size_t i = 0; i < c; ++i)
      if (mask & (1u << i)) cov |= inst.covers[i];
    if (cov.all()) best = size;
  }
  return best;
}

TEST(BuildInstance, TwoArcs) {
  auto T = FlatSpace::unit_torus();
  auto inst = build_instance(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1));
  EXPECT_EQ(inst.geodesic_count(), 2u);
  EXPECT_EQ(inst.candidate_count(), 2u);
  auto empty = build_instance(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1, 100));
  EXPECT_EQ(empty.geodesic_count(), 0u);
  EXPECT_EQ(solve_exact(empty).size, 0);
}

TEST(BuildInstance, DiagonalCrossing) {
  auto T = FlatSpace::unit_torus();
  auto inst = build_instance(T, V(R(0), R(0)), V(R(0), R(0)), R(2));
  EXPECT_NE(std::find(inst.candidates.begin(), inst.candidates.end(),
                      V(R(1, 2), R(1, 2))),
            inst.candidates.end());
}

TEST(SolveExact, Examples) {
  auto T = FlatSpace::unit_torus();
  EXPECT_EQ(blocking_threshold(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1)).value,
            2);
  EXPECT_EQ(
      blocking_threshold(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1, 9)).value, 0);
  ThresholdResult r =
      blocking_threshold(T, V(R(0), R(0)), V(R(1, 2), R(1, 2)), R(36));
  EXPECT_TRUE(r.certified);
  EXPECT_GE(r.value, 1);
  EXPECT_LE(r.value, 4);
  auto fam =
      flat::connecting_geodesics(T, V(R(0), R(0)), V(R(1, 2), R(1, 2)), R(36));
  EXPECT_TRUE(verify_cover(T, fam, r.solution.points));
  EXPECT_TRUE(verify_cover(
      T, fam, midpoint_cover(T, V(R(0), R(0)), V(R(1, 2), R(1, 2)))));
}

TEST(SolveExact, AbstractInstances) {
  auto inst = make_instance(3, {{0, 1}, {1, 2}, {0}, {2}});
  EXPECT_EQ(solve_exact(inst).size, 2);
  EXPECT_EQ(solve_greedy(inst).size, 2);
  auto bad = make_instance(2, {{0}});
  EXPECT_THROW(solve_exact(bad), std::logic_error);
}

TEST(SolveExact, MatchesExhaustiveOnRandomInstances) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    std::size_t g = 1 + rng() % 20;
    std::size_t c = 1 + rng() % 14;
    std::vector<std::vector<std::size_t>> covers(c);
    for (auto& cv : covers)
      for (std::size_t j = 0; j < g; ++j)
        if (rng() % 4 == 0) cv.push_back(j);
    for (std::size_t j = 0; j < g; ++j) covers[rng() % c].push_back(j);
    auto inst = make_instance(g, covers);
    BlockingSolution s = solve_exact(inst);
    ASSERT_TRUE(s.optimal);
    ASSERT_EQ(s.size, exhaustive_min(inst));
    ASSERT_LE(s.lower_bound, s.size);
    ASSERT_GE(s.greedy_upper, s.size);
  }
}

TEST(SolveExact, CapFallsBackToGreedy) {
  auto T = FlatSpace::unit_torus();
  auto inst = build_instance(T, V(R(0), R(0)), V(R(1, 3), R(1, 5)), R(16));
  SolverOptions opts;
  opts.max_geodesics = 1;
  BlockingSolution s = solve_exact(inst, opts);
  EXPECT_FALSE(s.optimal);
  EXPECT_EQ(s.size, s.greedy_upper);
}

TEST(MidpointCover, TorusBoundAndFeasibility) {
  auto T = FlatSpace::torus(V(R(1), R(0)), V(R(2, 5), R(4, 3)));
  std::mt19937_64 rng(17);
  for (int it = 0; it < 20; ++it) {
    Vec2 x = V(R(rng() % 13, 13), R(rng() % 11, 11));
    Vec2 y = V(R(rng() % 13, 13), R(rng() % 11, 11));
    auto cover = midpoint_cover(T, x, y);
    EXPECT_LE(cover.size(), 4u);
    auto fam = flat::connecting_geodesics(T, x, y, R(25));
    EXPECT_TRUE(verify_cover(T, fam, cover));
    EXPECT_LE(blocking_threshold(T, x, y, R(9)).value, 4);
  }
}

TEST(VerifyCover, RejectsEndpointsAndGaps) {
  auto T = FlatSpace::unit_torus();
  Vec2 x = V(R(0), R(0)), y = V(R(1, 2), R(0));
  auto fam = flat::connecting_geodesics(T, x, y, R(1));
  EXPECT_FALSE(verify_cover(T, fam, {V(R(1, 4), R(0))}));
  EXPECT_TRUE(verify_cover(T, fam, {V(R(1, 4), R(0)), V(R(3, 4), R(0))}));
  EXPECT_FALSE(verify_cover(T, fam, {x, V(R(1, 4), R(0)), V(R(3, 4), R(0))}));
}

TEST(SampledCost, DeterministicAndBounded) {
  auto T = FlatSpace::unit_torus();
  auto pairs = sample_pairs(T, 42, 10);
  EXPECT_EQ(pairs, sample_pairs(T, 42, 10));
  SampledCost a = blocking_cost_sampled(T, R(1), pairs);
  for (auto v : a.thresholds) EXPECT_LE(v, 4);
  EXPECT_EQ(a.value,
            *std::max_element(a.thresholds.begin(), a.thresholds.end()));
  SampledCost b = blocking_cost_sampled(T, R(1), pairs, {}, 3);
  EXPECT_EQ(a.thresholds, b.thresholds);
  EXPECT_EQ(blocking_cost_sampled(T, R(1, 1000), pairs).value, 0);
}

TEST(Recursion, BelowDelta) {
  auto T = FlatSpace::unit_torus();
  auto rep = recursion_harness(T, V(R(0), R(0)), V(R(1, 5), R(0)), R(1, 16));
  EXPECT_EQ(rep.kappa, 0);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Recursion, TwoLevels) {
  auto T = FlatSpace::unit_torus();
  auto rep = recursion_harness(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1));
  EXPECT_EQ(rep.kappa, 2);
  EXPECT_TRUE(rep.all_pass()) << rep.to_json().dump(2);
  std::vector<std::string> names;
  for (const auto& c : rep.checks) names.push_back(c.name);
  for (const char* n : {"split-sum[k=1]", "split-sum[k=2]"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

TEST(Recursion, LoopAtOrigin) {
  auto T = FlatSpace::unit_torus();
  auto rep = recursion_harness(T, V(R(0), R(0)), V(R(0), R(0)), R(4));
  EXPECT_TRUE(rep.certified);
  EXPECT_TRUE(rep.all_pass()) << rep.to_json().dump(2);
  EXPECT_LE(rep.m, rep.n);
  EXPECT_LE(rep.threshold, rep.m);
}

}  // namespace
}  // namespace geoblock::blocker
