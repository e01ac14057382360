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

#ifndef GEOBLOCK_HYPERBOLIC_HPP_
#define GEOBLOCK_HYPERBOLIC_HPP_

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "geoblock/growth.hpp"

namespace geoblock::hyp {

// Upper half-plane point.
using Point = std::complex<double>;

struct Mobius {
  double a = 1, b = 0, c = 0, d = 1;

  static Mobius identity() { return {}; }

  Point apply(Point z) const;
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  // Inverse in SL(2, R).
  Mobius inverse() const { return {d, -b, -c, a}; }
  // Representative of {M, -M} whose first nonzero entry is positive.
  Mobius normalized() const;

  friend Mobius operator*(const Mobius& m, const Mobius& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
  }
};

// Frobenius distance in PSL(2, R), i.e. min over the sign.
double psl_distance(const Mobius& m, const Mobius& n);

// Throws DomainError unless both points are in the upper half-plane.
double hyp_distance(Point z, Point w);

enum class PresetKind { kSchottky, kCocompact };

std::string to_string(PresetKind k);

struct FuchsianPreset {
  std::string name;
  PresetKind kind = PresetKind::kCocompact;
  std::vector<std::string> generator_names;
  std::vector<Mobius> generators;
  // Space-separated generator names; upper-case first letter = inverse.
  std::string relator;
  // Centre of the fundamental domain used to bound prefixes.
  Point center{0, 1};
  double diameter = 0;  // D
  double area = 0;      // A
  double systole = 0;

  // Letters: generators followed by their inverses; letter i and
  // inverse_letter(i) cancel.
  std::size_t letter_count() const { return 2 * generators.size(); }
  Mobius letter(std::size_t i) const;
  std::size_t inverse_letter(std::size_t i) const;

  // Evaluates a relator-style word.
  Mobius evaluate(const std::string& word) const;
  // Inverse of evaluate's parser: letters back to generator names.
  std::string spell(const std::vector<std::uint8_t>& word) const;

  // Throws DomainError describing the first failed invariant.
  void validate() const;

  static FuchsianPreset from_json(const nlohmann::json& j);
  static FuchsianPreset load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct OrbitOptions {
  // Distinct elements kept before giving up.
  std::size_t max_elements = 4'000'000;
  int workers = 1;
  // Throw BudgetExceededError on a cap hit; otherwise return a partial
  // result with certified_t set.
  bool strict = true;
};

struct OrbitElement {
  Mobius g;
  // Letters spelling g (not necessarily reduced when the base points were
  // first moved into the fundamental domain).
  std::vector<std::uint8_t> word;
  double displacement = 0;  // d(x, g y)
  Point image;              // g y
};

struct OrbitBall {
  Point x;
  Point y;
  double radius = 0;
  // All elements with displacement <= radius, sorted by (displacement, word).
  std::vector<OrbitElement> elements;
  // Counts are exact for t <= certified_t.
  double certified_t = 0;
  bool complete = true;
  std::uint64_t expanded = 0;
};

OrbitBall orbit_ball(const FuchsianPreset& preset, Point x, Point y,
                     double radius, const OrbitOptions& opts = {});

struct OrbitCount {
  std::vector<double> t;
  std::vector<std::int64_t> counts;
  std::vector<bool> certified;

  // Rows with positive count as a growth series.
  growth::GrowthSeries series() const;
  void write_csv(std::ostream& os) const;
};

OrbitCount orbit_count(const FuchsianPreset& preset, Point x, Point y,
                       const std::vector<double>& t_grid,
                       const OrbitOptions& opts = {});

OrbitCount count_from_ball(const OrbitBall& ball,
                           const std::vector<double>& t_grid);

// Number of distinct elements first reached at each word length 0..max_len
// (sphere sizes of the Cayley graph).
std::vector<std::int64_t> word_length_counts(const FuchsianPreset& preset,
                                             int max_len);

growth::GrowthClass entropy_estimate(const growth::GrowthSeries& series,
                                     double window = 0.5);

// Seeded base-point pairs near the preset centre (within D/2 for cocompact
// presets; y outside the isometric circles for Schottky presets).
std::vector<std::pair<Point, Point>> sample_pairs(const FuchsianPreset& preset,
                                                  std::uint64_t seed,
                                                  std::size_t count);

enum class BoundMode { kArea, kPacking, kBest, kEmpirical };

std::string to_string(BoundMode m);
BoundMode parse_bound_mode(const std::string& s);

struct UniformBound {
  double value = 1;  // max(raw, 1)
  double raw = 0;
  bool rigorous = false;
  std::string method;
};

struct EmpiricalOptions {
  std::uint64_t seed = 42;
  std::size_t samples = 16;
  int workers = 1;
};

// Upper bound on #{g : d(p, g q) <= r} over all p, q. Rigorous modes need a
// cocompact preset: area uses the diameter, packing uses the systole (orbit
// points are systole-separated, so disjoint systole/2 disks fit in the
// (r + systole/2)-ball). Throws UnsupportedInputError for rigorous modes on
// a Schottky preset.
UniformBound uniform_count_bound(const FuchsianPreset& preset, double r,
                                 BoundMode mode,
                                 const EmpiricalOptions& emp = {});

// For each element of the ball: does the segment from x to g y pass through
// another lift of x or y in its interior? Tolerance 1e-9 on the triangle
// defect.
std::vector<bool> endpoint_passing(const FuchsianPreset& preset,
                                   const OrbitBall& ball, int workers = 1);

struct LowerBound {
  double t = 0;
  double value = 0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  double u = 1;
  bool certified = false;
  std::string note;

  nlohmann::json to_json() const;
};

// s_t(x, y) >= m_t(x, y) / (2 U(t / 2)).
LowerBound certified_blocking_lower_bound(const FuchsianPreset& preset, Point x,
                                          Point y, double t,
                                          BoundMode mode = BoundMode::kBest,
                                          const OrbitOptions& opts = {});

std::vector<LowerBound> lower_bound_series(const FuchsianPreset& preset,
                                           Point x, Point y,
                                           const std::vector<double>& t_grid,
                                           BoundMode mode = BoundMode::kBest,
                                           const OrbitOptions& opts = {});

enum class GroupKind { kFree, kAbelian };

// Ball size w(n) in the standard generators of the free group or Z^rank.
std::int64_t word_growth(GroupKind kind, int rank, int n);

}  // namespace geoblock::hyp

#endif  // GEOBLOCK_HYPERBOLIC_HPP_
