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

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "geoblock/errors.hpp"
#include "geoblock/harness.hpp"

namespace gh = geoblock::harness;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::optional<std::string> grid;
  std::string pairs;
  std::optional<int> workers;
  std::optional<std::string> geometry;
  std::optional<std::size_t> samples;
  std::optional<std::string> function;
  std::optional<std::string> delta;
  std::string series;
  std::optional<std::string> bound_mode;
  std::optional<std::size_t> max_elements;
};

gh::ExperimentConfig build_config(const Flags& f) {
  auto cfg = f.config.empty() ? gh::ExperimentConfig::defaults()
                              : gh::ExperimentConfig::load(f.config);
  if (f.geometry) {
    nlohmann::json g = *f.geometry;
    if (std::filesystem::exists(*f.geometry)) g = {{"file", *f.geometry}};
    cfg.geometry = gh::geometry_from_json(g);
    cfg.flat_pairs.clear();
    cfg.hyp_pairs.clear();
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.grid) cfg.grid = gh::parse_grid(*f.grid);
  if (f.workers) {
    if (*f.workers < 1) throw geoblock::ConfigError("--workers must be >= 1");
    cfg.workers = *f.workers;
  }
  if (f.samples) cfg.sample_count = *f.samples;
  if (f.function) cfg.transform_function = *f.function;
  if (f.delta) cfg.transform_delta = *f.delta;
  if (!f.series.empty()) cfg.input_series = f.series;
  if (f.bound_mode)
    cfg.bound_mode = geoblock::hyp::parse_bound_mode(*f.bound_mode);
  if (f.max_elements) cfg.max_elements = *f.max_elements;
  if (!f.pairs.empty()) {
    std::ifstream in(f.pairs);
    if (!in) throw geoblock::ConfigError("cannot open pairs file " + f.pairs);
    if (cfg.geometry.is_flat()) {
      cfg.flat_pairs = gh::read_flat_pairs(in);
    } else {
      cfg.hyp_pairs = gh::read_hyp_pairs(in);
    }
  }
  cfg.resolve_pairs();
  return cfg;
}

int run(const std::string& name,
        const std::function<gh::Table(const gh::ExperimentConfig&)>& cmd,
        const Flags& f) {
  gh::ExperimentConfig cfg = build_config(f);
  gh::Format format = f.format == "json" ? gh::Format::kJson : gh::Format::kCsv;
  if (name == "report") format = gh::Format::kJson;
  gh::Table table = cmd(cfg);
  const std::string geometry = cfg.geometry.describe();
  if (f.out.empty()) {
    table.write(std::cout, format, cfg.seed, geometry);
    std::cout.flush();
  } else {
    std::filesystem::create_directories(f.out);
    auto path = std::filesystem::path(f.out) /
                (name + (format == gh::Format::kJson ? ".json" : ".csv"));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw geoblock::ConfigError("cannot write " + path.string());
    table.write(os, format, cfg.seed, geometry);
  }
  return table.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic counting and blocking experiments", "geoblock"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON experiment config")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "Sampler seed");
  app.add_option("--out", f.out, "Directory to write <command>.<format> into");
  app.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--t-grid", f.grid, "a:b:step, a:b:*ratio or a comma list");
  app.add_option("--pairs", f.pairs, "File of 'x1 y1 x2 y2' lines")
      ->check(CLI::ExistingFile);
  app.add_option("--workers", f.workers, "Worker threads");
  app.add_option("--geometry", f.geometry,
                 "unit-torus, billiard, bolza, schottky or a key=value file");
  app.add_option("--samples", f.samples, "Pairs to sample when none are given");
  app.add_option("--function", f.function,
                 "transform input: linear, const:c, monomial:c:d, exp:a");
  app.add_option("--delta", f.delta, "transform delta");
  app.add_option("--series", f.series, "transform/entropy input CSV (t,value)")
      ->check(CLI::ExistingFile);
  app.add_option("--bound-mode", f.bound_mode,
                 "area, packing, best (rigorous) or empirical");
  app.add_option("--max-elements", f.max_elements, "Orbit enumeration budget");

  const std::map<std::string,
                 std::pair<std::string, std::function<gh::Table(
                                            const gh::ExperimentConfig&)>>>
      commands = {
          {"count", {"Counting functions n_t and m_t", gh::cmd_count}},
          {"block",
           {"Exact blocking thresholds or certified lower bounds",
            gh::cmd_block}},
          {"recursion-check",
           {"Recursive blocking construction checks", gh::cmd_recursion_check}},
          {"transform", {"Growth-function transform F(t)", gh::cmd_transform}},
          {"entropy", {"Exponential growth rate of counts", gh::cmd_entropy}},
          {"verify", {"Full inequality suite", gh::cmd_verify}},
          {"report", {"Rates and verdicts as JSON", gh::cmd_report}},
  };
  for (const auto& [name, entry] : commands)
    app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? gh::kExitOk : gh::kExitConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run(name, commands.at(name).second, f);
  } catch (const geoblock::ConfigError& e) {
    std::cerr << "geoblock: configuration error: " << e.what() << "\n";
    return gh::kExitConfigError;
  } catch (const geoblock::UnsupportedInputError& e) {
    std::cerr << "geoblock: unsupported input: " << e.what() << "\n";
    return gh::kExitConfigError;
  } catch (const geoblock::DomainError& e) {
    std::cerr << "geoblock: invalid input: " << e.what() << "\n";
    return gh::kExitConfigError;
  } catch (const geoblock::BudgetExceededError& e) {
    std::cerr << "geoblock: budget exceeded: " << e.what()
              << " (certified up to t = " << e.certified_t() << ")\n";
    return gh::kExitResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "geoblock: " << e.what() << "\n";
    return gh::kExitCheckFailed;
  }
}
