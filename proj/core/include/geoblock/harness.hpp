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

#ifndef GEOBLOCK_HARNESS_HPP_
#define GEOBLOCK_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoblock/blocker.hpp"
#include "geoblock/flatspace.hpp"
#include "geoblock/hyperbolic.hpp"
#include "geoblock/rational.hpp"

namespace geoblock::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceCap = 3;

enum class GeometryKind { kTorus, kBilliard, kHyperbolic };

struct Geometry {
  GeometryKind kind = GeometryKind::kTorus;
  std::optional<flat::FlatSpace> flat;
  std::optional<hyp::FuchsianPreset> preset;

  bool is_flat() const { return kind != GeometryKind::kHyperbolic; }
  std::string describe() const;
};

// Directory holding the shipped presets; $GEOBLOCK_DATA_DIR overrides the
// build-time default.
std::filesystem::path data_dir();

// Key-value geometry file:
//   kind = torus | billiard
//   basis = 1 0 1/2 3/4      (b1.x b1.y b2.x b2.y, torus only)
//   billiard = true          (same as kind = billiard)
// Lines starting with '#' are comments.
Geometry parse_geometry_keyvalue(std::istream& in);

// JSON forms: "unit-torus" | "billiard" | "bolza" | "schottky", or an object
// {"kind": ..., "basis": [...], "preset": path, "file": path}. Relative
// paths resolve against `base`.
Geometry geometry_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base = {});

// t grids: "a:b:step" (arithmetic, inclusive), "a:b:*r" (geometric with
// ratio r), or a comma-separated list. Values are exact rationals.
std::vector<Rational> parse_grid(const std::string& spec);

using HypPair = std::pair<hyp::Point, hyp::Point>;

// Pair files: one pair per line, "x1 y1 x2 y2".
std::vector<blocker::PointPair> read_flat_pairs(std::istream& in);
std::vector<HypPair> read_hyp_pairs(std::istream& in);

struct ExperimentConfig {
  Geometry geometry;
  std::vector<blocker::PointPair> flat_pairs;
  std::vector<HypPair> hyp_pairs;
  std::uint64_t seed = 42;
  // Pairs drawn from the seed when none are listed.
  std::size_t sample_count = 3;
  // Pairs used for the sampled blocking cost s(t).
  std::size_t cost_samples = 10;
  std::vector<Rational> grid;
  int workers = 1;
  blocker::SolverOptions solver;
  bool recursion = true;
  int recursion_max_kappa = 3;
  hyp::BoundMode bound_mode = hyp::BoundMode::kBest;
  std::size_t max_elements = 4'000'000;
  double window = 0.5;
  // transform: "const:c", "linear", "monomial:c:d", "exp:a", or a CSV path
  // in `input_series`.
  std::string transform_function = "linear";
  std::string transform_delta = "1";
  std::string input_series;

  static ExperimentConfig defaults();
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base = {});
  static ExperimentConfig load(const std::filesystem::path& path);

  // Fills the pair list from the seed if it is empty.
  void resolve_pairs();
  std::vector<double> grid_doubles() const;
};

enum class Format { kCsv, kJson };

// A command result: tabular rows for CSV plus a JSON document.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  // Extra JSON content merged into the document next to "rows".
  nlohmann::json extra = nlohmann::json::object();
  int status = kExitOk;

  void write(std::ostream& os, Format format, std::uint64_t seed,
             const std::string& geometry) const;
};

// Rounds every floating-point number in `j` to `digits` significant digits.
nlohmann::json round_numbers(const nlohmann::json& j, int digits = 12);

Table cmd_count(const ExperimentConfig& cfg);
Table cmd_block(const ExperimentConfig& cfg);
Table cmd_recursion_check(const ExperimentConfig& cfg);
Table cmd_transform(const ExperimentConfig& cfg);
Table cmd_entropy(const ExperimentConfig& cfg);
Table cmd_verify(const ExperimentConfig& cfg);
Table cmd_report(const ExperimentConfig& cfg);

}  // namespace geoblock::harness

#endif  // GEOBLOCK_HARNESS_HPP_
