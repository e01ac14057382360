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

#ifndef GEOBLOCK_BLOCKER_HPP_
#define GEOBLOCK_BLOCKER_HPP_

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoblock/flatspace.hpp"

// Blocking thresholds as minimum hitting sets.
//
// A finite family of connecting segments is blocked by a point set when every
// segment passes through one of the points at an interior parameter. The
// optimum over all points of the space equals the optimum over a finite
// candidate set, by an exchange argument:
//
//   * a point interior to two or more segments is a pairwise crossing point,
//     or lies on a stretch where collinear segments overlap. Crossing points
//     are candidates, and every overlap stretch is cut at the endpoints of all
//     overlap intervals into cells with one representative each; all points of
//     a cell block the same collinear segments, and the cell representative
//     blocks at least those;
//   * a point blocking exactly one segment can be swapped for that segment's
//     own representative (its midpoint), which blocks it too.
//
// Hence replacing every point of an optimal blocking set by a dominating
// candidate yields a blocking set of the same size.
namespace geoblock::blocker {

using flat::FlatSpace;
using flat::GeodesicSegment;
using flat::Vec2;
using Bitset = boost::dynamic_bitset<>;

struct IncidenceInstance {
  Vec2 x;
  Vec2 y;
  std::vector<GeodesicSegment> geodesics;
  std::size_t num_geodesics = 0;
  // Candidate blocking points (canonical), empty for abstract instances.
  std::vector<Vec2> candidates;
  // covers[c] has bit g set iff candidate c blocks geodesic g.
  std::vector<Bitset> covers;

  std::size_t geodesic_count() const { return num_geodesics; }
  std::size_t candidate_count() const { return covers.size(); }

  nlohmann::json to_json() const;
};

// Abstract instance from explicit cover sets (candidate index -> geodesic
// indices). Used by tests and by the randomized oracle.
IncidenceInstance make_instance(
    std::size_t geodesics, const std::vector<std::vector<std::size_t>>& covers);

IncidenceInstance build_instance(const FlatSpace& space, const Vec2& x,
                                 const Vec2& y, const Rational& t2,
                                 int workers = 1);

struct SolverOptions {
  std::size_t max_candidates = 5000;
  std::size_t max_geodesics = 2000;
  // blocking_threshold refuses larger instances up front with
  // BudgetExceededError; building one is quadratic in exact arithmetic.
  std::size_t max_build_geodesics = 200;
  // Branch-and-bound nodes before giving up on optimality.
  std::uint64_t node_limit = 50'000'000;
};

struct BlockingSolution {
  std::vector<std::size_t> chosen;  // candidate indices, ascending
  std::vector<Vec2> points;
  std::int64_t size = 0;
  bool optimal = false;
  std::int64_t greedy_upper = 0;
  std::int64_t lower_bound = 0;
  std::uint64_t nodes = 0;

  nlohmann::json to_json() const;
};

BlockingSolution solve_greedy(const IncidenceInstance& instance);

// Exact minimum hitting set by branch-and-bound. Falls back to the greedy
// solution (optimal = false) when a cap or the node limit is hit. Throws
// std::logic_error for a geodesic no candidate covers.
BlockingSolution solve_exact(const IncidenceInstance& instance,
                             const SolverOptions& opts = {});

// The four half-lattice classes (x + y)/2 + (a b1 + b b2)/2, minus any that
// coincide with x or y. Every connecting torus geodesic has its midpoint in
// one of them. Throws DomainError on the billiard table.
std::vector<Vec2> midpoint_cover(const FlatSpace& space, const Vec2& x,
                                 const Vec2& y);

// True iff every segment passes through one of `points` at an interior
// parameter (exact).
bool verify_cover(const FlatSpace& space,
                  const std::vector<GeodesicSegment>& family,
                  const std::vector<Vec2>& points);

struct ThresholdResult {
  std::int64_t value = 0;
  bool certified = false;
  std::size_t geodesics = 0;
  std::size_t candidates = 0;
  BlockingSolution solution;
};

ThresholdResult blocking_threshold(const FlatSpace& space, const Vec2& x,
                                   const Vec2& y, const Rational& t2,
                                   const SolverOptions& opts = {},
                                   int workers = 1);

using PointPair = std::pair<Vec2, Vec2>;

// Deterministic generic pairs with coordinates k / 97 in the fundamental
// domain (torus) or the open square (billiard).
std::vector<PointPair> sample_pairs(const FlatSpace& space, std::uint64_t seed,
                                    std::size_t count);

struct SampledCost {
  // max of the per-pair thresholds: a lower bound on the blocking cost.
  std::int64_t value = 0;
  bool certified = true;
  std::vector<PointPair> pairs;
  std::vector<std::int64_t> thresholds;
};

SampledCost blocking_cost_sampled(const FlatSpace& space, const Rational& t2,
                                  const std::vector<PointPair>& pairs,
                                  const SolverOptions& opts = {},
                                  int workers = 1);

struct InequalityCheck {
  std::string name;
  std::string anchor;
  double lhs = 0;
  double rhs = 0;
  bool pass = true;
  bool skipped = false;
  std::string context;

  nlohmann::json to_json() const;
};

struct RecursionLevel {
  int k = 0;
  // Squared sub-threshold (t / 2^k)^2.
  Rational t2;
  std::vector<PointPair> pairs;
  std::vector<std::int64_t> m_counts;
  // Minimal blocking sets, one per pair (empty on the last level).
  std::vector<std::vector<Vec2>> blocking_sets;
  std::int64_t max_threshold = 0;
};

struct RecursionOptions {
  SolverOptions solver;
  int workers = 1;
  // Optional sampled blocking cost s(t) used in place of the per-level
  // observed maximum when it is larger.
  std::function<std::int64_t(const Rational& t2)> sampled_cost;
};

struct RecursionReport {
  int kappa = 0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t threshold = 0;
  std::vector<RecursionLevel> levels;
  // Per-level factors s_j entering S(t) and the source of each.
  std::vector<std::int64_t> level_costs;
  bool sampled_costs = false;
  std::vector<InequalityCheck> checks;
  bool certified = true;
  std::string error;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

RecursionReport recursion_harness(const FlatSpace& space, const Vec2& x,
                                  const Vec2& y, const Rational& t2,
                                  const RecursionOptions& opts = {});

}  // namespace geoblock::blocker

#endif  // GEOBLOCK_BLOCKER_HPP_
