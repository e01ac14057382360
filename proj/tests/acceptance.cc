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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Expected values come from oracles written here, not from the
// library under test.

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoblock/blocker.hpp"
#include "geoblock/errors.hpp"
#include "geoblock/flatspace.hpp"
#include "geoblock/growth.hpp"
#include "geoblock/harness.hpp"
#include "geoblock/hyperbolic.hpp"

namespace {

using namespace geoblock;
using blocker::IncidenceInstance;
using flat::FlatSpace;
using flat::Vec2;
using growth::BigRational;
using R = Rational;

const std::string kDataDir = GEOBLOCK_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure; later ones only bump the count.
struct Recorder {
  Outcome out;
  int failures = 0;
  void fail(const std::string& why) {
    if (out.pass) out.detail = why;
    out.pass = false;
    ++failures;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  Outcome done(const std::string& summary) {
    if (out.pass) {
      out.detail = summary;
    } else if (failures > 1) {
      out.detail += fmt::format(" (+{} more)", failures - 1);
    }
    return out;
  }
};

// ---- oracles ---------------------------------------------------------------

int kappa_by_halving(double t, double delta) {
  int k = 0;
  while (!(t < delta)) {
    t /= 2;
    ++k;
  }
  return k;
}

int kappa_by_halving(BigRational t, const BigRational& delta) {
  int k = 0;
  while (!(t < delta)) {
    t /= 2;
    ++k;
  }
  return k;
}

// Least-squares slope of log(value) against t over the upper half of the
// samples.
double log_slope(const std::vector<std::pair<double, double>>& s) {
  const double lo = s.back().first - 0.5 * (s.back().first - s.front().first);
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, v] : s) {
    if (t < lo) continue;
    const double y = std::log(v);
    n += 1;
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Connecting-vector scan over a coefficient box, independent of the
// enumerator's reduced-basis search.
std::set<Vec2> lattice_scan(const FlatSpace& sp, const Vec2& b1, const Vec2& b2,
                            const Vec2& x, const Vec2& y, const Rational& t2) {
  const double scale =
      std::sqrt(std::max(b1.norm2().to_double(), b2.norm2().to_double())) /
      sp.covolume().to_double();
  const auto box = static_cast<std::int64_t>(
      std::ceil(
          (std::sqrt(t2.to_double()) + std::sqrt((y - x).norm2().to_double())) *
          scale) +
      2);
  std::set<Vec2> out;
  for (std::int64_t i = -box; i <= box; ++i) {
    for (std::int64_t j = -box; j <= box; ++j) {
      Vec2 v = y + R(i) * b1 + R(j) * b2 - x;
      if (v.norm2().is_zero() || v.norm2() > t2) continue;
      out.insert(v);
    }
  }
  return out;
}

// Minimum hitting set by trying every subset of size 0, 1, 2, ... in turn.
std::int64_t exhaustive_min(const IncidenceInstance& inst) {
  const std::size_t c = inst.candidate_count();
  const std::size_t g = inst.geodesic_count();
  if (g == 0) return 0;
  std::vector<std::size_t> pick;
  std::function<bool(std::size_t, std::size_t, blocker::Bitset)> rec =
      [&](std::size_t start, std::size_t left, blocker::Bitset cov) {
        if (left == 0) return cov.all();
        for (std::size_t i = start; i + left <= c; ++i) {
          if (rec(i + 1, left - 1, cov | inst.covers[i])) return true;
        }
        return false;
      };
  for (std::size_t k = 1; k <= c; ++k) {
    if (rec(0, k, blocker::Bitset(g))) return static_cast<std::int64_t>(k);
  }
  return -1;
}

// ---- criteria --------------------------------------------------------------

Outcome criterion1() {
  Recorder r;
  const growth::TransformParams p(1.0);
  std::string summary;
  for (double a : {0.5, 1.0, 2.0}) {
    auto f = [a](double t) { return std::exp(a * t); };
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i <= 990; ++i) {
      const double t = 1 + i * 0.1;
      s.push_back({t, std::exp(growth::log_transform(f, p, t))});
    }
    const double rate = log_slope(s);
    std::vector<growth::GrowthSeries::Sample> gs;
    for (const auto& [t, v] : s) gs.push_back({t, v});
    const double lib = growth::rate_estimate(growth::GrowthSeries(gs),
                                             growth::RateMode::kExponential)
                           .parameter;
    r.expect(
        std::abs(rate - 2 * a) <= 0.05,
        fmt::format("a={}: rate {:.4f} not within 0.05 of {}", a, rate, 2 * a));
    r.expect(std::abs(lib - rate) <= 1e-9,
             fmt::format("a={}: rate_estimate {:.6f} vs oracle fit {:.6f}", a,
                         lib, rate));
    summary +=
        fmt::format("{}a={}: {:.4f}", summary.empty() ? "" : ", ", a, rate);
  }
  return r.done("rates " + summary);
}

Outcome criterion2() {
  Recorder r;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> num(1, 4000), den(1, 97);
  for (int i = 0; i < 1000; ++i) {
    BigRational t(num(rng), den(rng));
    const int k = kappa_by_halving(t, BigRational(1));
    BigRational expected = 1;
    for (int j = 0; j < k; ++j) expected *= t;
    for (int j = 0; j < k * (k - 1) / 2; ++j) expected /= 2;
    const BigRational got = growth::transform_exact(
        growth::ClosedForm::linear(), t, BigRational(1));
    if (got != expected) {
      r.fail("t=" + t.str() + ": " + got.str() + " != " + expected.str());
    }
  }
  std::uniform_real_distribution<double> ld(-8, 8);
  for (int i = 0; i < 100000; ++i) {
    const double delta = std::exp2(ld(rng));
    const double t = delta * std::exp2(ld(rng));
    const int k = growth::kappa(t, growth::TransformParams(delta));
    if (k != kappa_by_halving(t, delta)) {
      r.fail(fmt::format("kappa({}, {}) = {} disagrees with halving", t, delta,
                         k));
      continue;
    }
    const double l = std::log2(t / delta);
    const bool ok = t < delta ? k == 0 : (l < k + 1e-12 && k <= l + 1 + 1e-12);
    r.expect(
        ok, fmt::format("kappa({}, {}) = {} outside log2 bounds", t, delta, k));
  }
  return r.done("1000 exact transforms, 1e5 kappa checks");
}

Outcome criterion3() {
  Recorder r;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-6, 6), p(0, 11), tt(1, 100);
  int done = 0;
  while (done < 100) {
    const Vec2 b1{R(d(rng), 2), R(d(rng), 3)};
    const Vec2 b2{R(d(rng), 3), R(d(rng), 2)};
    if (cross(b1, b2).is_zero()) continue;
    const auto sp = FlatSpace::torus(b1, b2);
    const Vec2 x = sp.canonical({R(p(rng), 12), R(p(rng), 12)});
    const Vec2 y = sp.canonical({R(p(rng), 12), R(p(rng), 12)});
    const R t2(tt(rng));  // t <= 10
    std::set<Vec2> fast;
    for (const auto& s : flat::enumerate_geodesics(sp, x, y, t2)) {
      fast.insert(s.displacement);
    }
    r.expect(fast == lattice_scan(sp, b1, b2, x, y, t2),
             sp.describe() + " x=" + x.str() + " y=" + y.str());
    ++done;
  }
  const auto T = FlatSpace::unit_torus();
  const auto c = flat::count(T, {R(0), R(0)}, {R(1, 3), R(1, 7)}, R(2500));
  const double ratio = c.n / (std::numbers::pi * 2500.0);
  r.expect(std::abs(ratio - 1) <= 0.1, fmt::format("Gauss ratio {}", ratio));
  return r.done(fmt::format("100 instances agree, Gauss ratio {:.5f}", ratio));
}

Outcome criterion4() {
  Recorder r;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> d(1, 4), p(0, 12), tt(1, 12);
  int exact = 0, torus_checked = 0;
  std::int64_t worst = 0;
  while (exact < 50) {
    const auto sp =
        FlatSpace::torus({R(1), R(0)}, {R(d(rng) - 2, 3), R(d(rng) + 1, 3)});
    const Vec2 x = sp.canonical({R(p(rng), 13), R(p(rng), 13)});
    const Vec2 y = sp.canonical({R(p(rng), 13), R(p(rng), 13)});
    const R t2(tt(rng), 2);
    auto inst = blocker::build_instance(sp, x, y, t2);
    if (inst.geodesic_count() == 0 || inst.geodesic_count() > 20 ||
        inst.candidate_count() > 120) {
      continue;
    }
    const std::string ctx =
        sp.describe() + " x=" + x.str() + " y=" + y.str() + " t2=" + t2.str();
    auto sol = blocker::solve_exact(inst);
    r.expect(sol.optimal, "not optimal: " + ctx);
    r.expect(sol.size == exhaustive_min(inst),
             fmt::format("solve_exact {} vs exhaustive {}: {}", sol.size,
                         exhaustive_min(inst), ctx));
    r.expect(sol.size <= 4, "threshold above 4: " + ctx);
    r.expect(blocker::verify_cover(sp, inst.geodesics, sol.points),
             "solution does not block: " + ctx);
    auto mid = blocker::midpoint_cover(sp, x, y);
    r.expect(mid.size() <= 4 && blocker::verify_cover(sp, inst.geodesics, mid),
             "midpoint cover fails: " + ctx);
    worst = std::max(worst, sol.size);
    ++exact;
    ++torus_checked;
  }
  return r.done(fmt::format("{} instances, max threshold {}", exact, worst));
}

// Shared by criteria 5 and 6.
struct FlatSuite {
  std::vector<blocker::RecursionReport> reports;
  std::vector<std::string> contexts;
};

FlatSuite run_recursion_suite() {
  FlatSuite suite;
  const std::vector<FlatSpace> spaces = {
      FlatSpace::unit_torus(),
      FlatSpace::torus({R(1), R(0)}, {R(1, 3), R(6, 5)}),
  };
  // delta = 1/2 on both: kappa 1 on [1/2, 1), 2 on [1, 2), 3 on [2, 4).
  // kappa 1 rows sit near 2 delta, where t^3 / (2 delta^3) >= 2.
  const std::vector<R> ts = {R(17, 20), R(19, 20), R(3, 2),
                             R(19, 10), R(5, 2),   R(7, 2)};
  for (const auto& sp : spaces) {
    const auto cost_pairs = blocker::sample_pairs(sp, 42, 10);
    std::map<R, std::int64_t> cache;
    blocker::RecursionOptions opts;
    opts.sampled_cost = [&](const R& t2) {
      auto it = cache.find(t2);
      if (it != cache.end()) return it->second;
      auto s = blocker::blocking_cost_sampled(sp, t2, cost_pairs);
      const std::int64_t v = std::max<std::int64_t>(s.value, 1);
      cache.emplace(t2, v);
      return v;
    };
    for (const auto& [x, y] : blocker::sample_pairs(sp, 7, 2)) {
      for (const auto& t : ts) {
        suite.reports.push_back(
            blocker::recursion_harness(sp, x, y, t * t, opts));
        suite.contexts.push_back(sp.describe() + " x=" + x.str() +
                                 " y=" + y.str() + " t=" + t.str());
      }
    }
  }
  return suite;
}

Outcome criterion5(const FlatSuite& suite) {
  Recorder r;
  std::set<int> kappas;
  int split = 0, level = 0, leaf = 0, cost = 0, final_bound = 0;
  for (std::size_t i = 0; i < suite.reports.size(); ++i) {
    const auto& rep = suite.reports[i];
    const std::string& ctx = suite.contexts[i];
    kappas.insert(rep.kappa);
    r.expect(rep.error.empty(), "error: " + rep.error + ": " + ctx);
    r.expect(rep.certified, "uncertified threshold: " + ctx);
    for (const auto& c : rep.checks) {
      const bool is_split = c.name.rfind("split-sum", 0) == 0;
      const bool is_level = c.name.rfind("level-size", 0) == 0;
      const bool is_leaf =
          c.name == "leaf-count" || c.name == "terminal-unique";
      const bool is_cost = c.name == "cost-bound";
      const bool is_final = c.name == "count-cost-bound";
      if (!(is_split || is_level || is_leaf || is_cost || is_final)) continue;
      r.expect(c.pass,
               fmt::format("{} {} > {}: {}", c.name, c.lhs, c.rhs, ctx));
      split += is_split;
      level += is_level;
      leaf += is_leaf;
      cost += is_cost;
      final_bound += is_final;
    }
  }
  r.expect(suite.reports.size() >= 20, "fewer than 20 instances");
  r.expect(kappas == std::set<int>{1, 2, 3}, "kappa range not {1, 2, 3}");
  r.expect(final_bound == static_cast<int>(suite.reports.size()),
           "final bound missing on some instance");
  return r.done(fmt::format(
      "{} instances, kappa 1..3; split-sum {}, level-size {}, leaf {}, "
      "cost-bound {}, final bound {} checks",
      suite.reports.size(), split, level, leaf, cost, final_bound));
}

Outcome criterion6(const FlatSuite& suite) {
  Recorder r;
  int chain = 0, guarded = 0;
  for (std::size_t i = 0; i < suite.reports.size(); ++i) {
    const auto& rep = suite.reports[i];
    const std::string& ctx = suite.contexts[i];
    r.expect(
        rep.threshold <= rep.m && rep.m <= rep.n,
        fmt::format("s={} m={} n={}: {}", rep.threshold, rep.m, rep.n, ctx));
    ++chain;
  }
  harness::ExperimentConfig cfg = harness::ExperimentConfig::defaults();
  cfg.grid = harness::parse_grid("1/2,3/4,1,3/2,2,3,4");
  cfg.sample_count = 10;
  cfg.recursion = false;
  cfg.resolve_pairs();
  const auto table = harness::cmd_verify(cfg);
  const double two_delta = 2 * cfg.geometry.flat->delta();
  for (const auto& row : table.rows) {
    const std::string name = row[2];
    const double t = row[1];
    const bool pass = row[6], skipped = row[7];
    if (name == "s<=m" || name == "m<=n") {
      r.expect(pass && !skipped, name + " fails: " + row[8].get<std::string>());
      ++chain;
    } else if (name == "n-vs-m" && t >= two_delta) {
      r.expect(pass && !skipped, "n-vs-m fails: " + row[8].get<std::string>());
      ++guarded;
    }
  }
  return r.done(fmt::format(
      "{} chain checks, {} n-vs-m checks with t >= 2 delta", chain, guarded));
}

Outcome criterion7() {
  Recorder r;
  const auto S =
      hyp::FuchsianPreset::load(kDataDir + "/presets/schottky_rank2.json");
  const auto B =
      hyp::FuchsianPreset::load(kDataDir + "/presets/bolza_octagon.json");
  // Reduced words of rank 2: 1 of length 0, 4 * 3^(L-1) of length L.
  const auto spheres = hyp::word_length_counts(S, 8);
  std::int64_t expected = 4, total = 1, got_total = 0;
  for (int L = 0; L <= 8; ++L) {
    const std::int64_t e = L == 0 ? 1 : expected;
    if (L > 0) {
      total += e;
      expected *= 3;
    }
    r.expect(spheres.at(L) == e,
             fmt::format("sphere {}: {} != {}", L, spheres.at(L), e));
    got_total += spheres.at(L);
  }
  r.expect(got_total == total, "ball size mismatch");

  // Ball area 2 pi (cosh r - 1) has exponential rate 1.
  std::vector<growth::GrowthSeries::Sample> area;
  for (int i = 0; i <= 200; ++i) {
    const double t = 1 + i * 0.1;
    area.push_back({t, 2 * std::numbers::pi * (std::cosh(t) - 1)});
  }
  const double area_rate =
      hyp::entropy_estimate(growth::GrowthSeries(area)).parameter;
  r.expect(std::abs(area_rate - 1) <= 0.05,
           fmt::format("ball-area rate {}", area_rate));

  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(1 + i * 0.25);  // to 11
  const auto pair = hyp::sample_pairs(B, 42, 1).front();
  const auto counts = hyp::orbit_count(B, pair.first, pair.second, grid);
  std::vector<std::pair<double, double>> s;
  for (std::size_t i = 0; i < counts.t.size(); ++i) {
    r.expect(counts.certified[i],
             fmt::format("uncertified at t={}", counts.t[i]));
    if (counts.counts[i] > 0) {
      s.push_back({counts.t[i], static_cast<double>(counts.counts[i])});
    }
  }
  const double rate = log_slope(s);
  r.expect(rate >= 0.8 && rate <= 1.2, fmt::format("cocompact rate {}", rate));
  return r.done(fmt::format(
      "free-group spheres to length 8 exact; ball-area rate {:.4f}; cocompact "
      "rate(N) {:.4f} at t_max {}",
      area_rate, rate, grid.back()));
}

Outcome criterion8() {
  Recorder r;
  const auto B =
      hyp::FuchsianPreset::load(kDataDir + "/presets/bolza_octagon.json");
  std::vector<double> grid;
  for (int i = 0; i <= 36; ++i) grid.push_back(1 + i * 0.25);  // to 10
  std::string summary;
  for (const auto& [x, y] : hyp::sample_pairs(B, 42, 2)) {
    const auto series =
        hyp::lower_bound_series(B, x, y, grid, hyp::BoundMode::kBest);
    std::vector<std::pair<double, double>> ns, bs;
    std::optional<double> first_above;
    for (const auto& lb : series) {
      if (lb.n > 0) ns.push_back({lb.t, static_cast<double>(lb.n)});
      if (lb.value > 0) bs.push_back({lb.t, lb.value});
      if (lb.certified && lb.value > 1 && !first_above) first_above = lb.t;
    }
    // Eventually increasing: the strictly increasing tail of the series
    // covers at least the upper 40% of the grid.
    std::size_t tail = series.size() - 1;
    while (tail > 0 && series[tail].value > series[tail - 1].value) --tail;
    const double tail_t = series[tail].t;
    const bool increasing =
        tail_t <= grid.front() + 0.6 * (grid.back() - grid.front());
    const double rn = log_slope(ns), rb = log_slope(bs);
    r.expect(increasing, fmt::format("increasing only from t={}", tail_t));
    r.expect(first_above.has_value(), "never above 1 at a certified t");
    r.expect(rb >= 0.3 * rn, fmt::format("lb rate {} < 0.3 x {}", rb, rn));
    summary += fmt::format(
        "{}increasing from t={}, above 1 from t={}, lb rate {:.3f} = {:.3f} x "
        "rate(N)",
        summary.empty() ? "" : "; ", tail_t, first_above.value_or(-1), rb,
        rb / rn);
  }
  return r.done(summary);
}

std::string render(const harness::Table& t, harness::Format f,
                   const harness::ExperimentConfig& c) {
  std::ostringstream os;
  t.write(os, f, c.seed, c.geometry.describe());
  return os.str();
}

#ifdef GEOBLOCK_CLI_PATH
std::string run_cli(const std::string& args) {
  std::string cmd = std::string(GEOBLOCK_CLI_PATH) + " " + args;
  std::string out;
  if (FILE* p = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    if (pclose(p) != 0) out += "\n<nonzero exit>";
  }
  return out;
}
#endif

Outcome criterion9() {
  Recorder r;
  using Cmd = harness::Table (*)(const harness::ExperimentConfig&);
  struct Case {
    std::string geometry, grid;
    std::vector<std::pair<std::string, Cmd>> commands;
  };
  const std::vector<Case> cases = {
      {"unit-torus",
       "1/2,1,2,4",
       {{"count", harness::cmd_count},
        {"block", harness::cmd_block},
        {"recursion-check", harness::cmd_recursion_check},
        {"verify", harness::cmd_verify},
        {"entropy", harness::cmd_entropy}}},
      {"bolza",
       "1:9:1/2",
       {{"count", harness::cmd_count},
        {"block", harness::cmd_block},
        {"verify", harness::cmd_verify},
        {"report", harness::cmd_report}}},
  };
  int compared = 0;
  for (const auto& c : cases) {
    for (const auto& [name, cmd] : c.commands) {
      for (auto format : {harness::Format::kCsv, harness::Format::kJson}) {
        std::string first;
        for (int w : {1, 2, 8}) {
          harness::ExperimentConfig cfg = harness::ExperimentConfig::defaults();
          cfg.geometry = harness::geometry_from_json(c.geometry);
          cfg.grid = harness::parse_grid(c.grid);
          cfg.workers = w;
          cfg.resolve_pairs();
          const std::string out = render(cmd(cfg), format, cfg);
          if (w == 1) {
            first = out;
          } else {
            r.expect(out == first, fmt::format("{} {} differs at {} workers",
                                               c.geometry, name, w));
          }
        }
        ++compared;
      }
    }
  }
#ifdef GEOBLOCK_CLI_PATH
  for (const char* args :
       {"verify --t-grid 1,2,4", "count --geometry bolza --t-grid 1:9:1",
        "report --geometry bolza --t-grid 1:9:1/2"}) {
    std::string first;
    for (int w : {1, 2, 8}) {
      const std::string out = run_cli(
          fmt::format("{} --seed 42 --format json --workers {}", args, w));
      if (w == 1) {
        first = out;
        r.expect(out.find("<nonzero exit>") == std::string::npos,
                 std::string("CLI failed: ") + args);
      } else {
        r.expect(out == first,
                 fmt::format("CLI '{}' differs at {} workers", args, w));
      }
    }
    ++compared;
  }
#endif
  return r.done(fmt::format("{} outputs byte-identical across 1, 2, 8 workers",
                            compared));
}

}  // namespace

int main() {
  struct Entry {
    int id;
    double limit_s;  // 0: no stated limit
    std::function<Outcome()> run;
  };
  FlatSuite suite;
  double suite_s = 0;
  auto with_suite = [&](auto fn) {
    return [&, fn] {
      if (suite.reports.empty()) {
        const auto t0 = std::chrono::steady_clock::now();
        suite = run_recursion_suite();
        suite_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
      }
      return fn(suite);
    };
  };
  const std::vector<Entry> entries = {
      {1, 1, criterion1},
      {2, 5, criterion2},
      {3, 30, criterion3},
      {4, 120, criterion4},
      {5, 300, with_suite(criterion5)},
      {6, 300, with_suite(criterion6)},
      {7, 300, criterion7},
      {8, 300, criterion8},
      {9, 0, criterion9},
  };
  int failed = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (e.limit_s > 0 && s > e.limit_s) {
      o.pass = false;
      o.detail +=
          fmt::format("; runtime {:.2f} s over the {} s limit", s, e.limit_s);
    }
    if (!o.pass) ++failed;
    std::cout << fmt::format("criterion {}: {} [{:.2f} s] {}\n", e.id,
                             o.pass ? "PASS" : "FAIL", s, o.detail)
              << std::flush;
  }
  std::cout << fmt::format("acceptance: {}/{} passed\n",
                           entries.size() - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
