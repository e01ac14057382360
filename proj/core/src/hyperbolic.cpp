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

#include "geoblock/hyperbolic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "geoblock/errors.hpp"
#include "parallel.hpp"

namespace geoblock::hyp {
namespace {

using detail::parallel_for;

constexpr double kDedupTol = 1e-9;
constexpr double kCollinearTol = 1e-9;

void check_point(Point z, const char* what) {
  if (!(z.imag() > 0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError(
        fmt::format("{} = ({}, {}) is not in the upper half-plane", what,
                    z.real(), z.imag()));
  }
}

double frobenius(const Mobius& m, const Mobius& n, double sign) {
  double da = m.a - sign * n.a, db = m.b - sign * n.b;
  double dc = m.c - sign * n.c, dd = m.d - sign * n.d;
  return std::sqrt(da * da + db * db + dc * dc + dd * dd);
}

double matrix_norm(const Mobius& m) {
  return std::sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d);
}

struct Circle {
  double center;
  double radius;
};

// Isometric circle |c z + d| = 1 of a letter.
Circle isometric_circle(const Mobius& m) {
  return {-m.d / m.c, 1.0 / std::abs(m.c)};
}

// Hyperbolic distance from z to the closed half-disk bounded by the
// geodesic over `circle`.
double distance_to_halfdisk(Point z, const Circle& circle) {
  double dx = z.real() - circle.center;
  double q = dx * dx + z.imag() * z.imag() - circle.radius * circle.radius;
  if (q <= 0) return 0;
  return std::asinh(q / (2 * circle.radius * z.imag()));
}

// Grid cell of an orbit point, in coordinates where unit steps are roughly
// hyperbolic-isotropic.
struct CellKey {
  std::int64_t u;
  std::int64_t v;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.u) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.v) + 0x7F4A7C159E3779B9ull + (h << 6) +
         (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

constexpr double kCell = 1e-7;
// Generic probe point for deduplication; torsion-free groups act freely, so
// distinct elements move it to distinct points.
const Point kProbe{0.1234567, 1.0987654};

CellKey cell_of(Point w) {
  return {std::llround(std::log(w.imag()) / kCell),
          std::llround(w.real() / w.imag() / kCell)};
}

struct Node {
  Mobius g;
  std::vector<std::uint8_t> word;
  Point image;
  double displacement;
  // Lower bound on the displacement of every extension (Schottky), or the
  // displacement itself (cocompact).
  double prune_key;
  bool expand;
};

class ElementSet {
 public:
  // Returns true if g was not yet present and records it.
  bool insert(const Mobius& g, std::size_t id, const std::vector<Node>& nodes) {
    CellKey k = cell_of(g.apply(kProbe));
    for (std::int64_t du = -1; du <= 1; ++du) {
      for (std::int64_t dv = -1; dv <= 1; ++dv) {
        auto it = cells_.find({k.u + du, k.v + dv});
        if (it == cells_.end()) continue;
        for (std::size_t other : it->second) {
          const Mobius& h = nodes[other].g;
          if (psl_distance(g, h) <= kDedupTol * std::max(1.0, matrix_norm(h))) {
            return false;
          }
        }
      }
    }
    cells_[k].push_back(id);
    return true;
  }

 private:
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

Point Mobius::apply(Point z) const {
  // With ad - bc = 1, Im(g z) = Im z / |cz + d|^2. Evaluating it that way
  // avoids the cancellation of the naive complex quotient near the boundary.
  Point den = c * z + d;
  double n2 = std::norm(den);
  Point num = (a * z + b) * std::conj(den);
  return {num.real() / n2, z.imag() / n2};
}

Mobius Mobius::normalized() const {
  double first = a != 0 ? a : (b != 0 ? b : (c != 0 ? c : d));
  if (first < 0) return {-a, -b, -c, -d};
  return *this;
}

double psl_distance(const Mobius& m, const Mobius& n) {
  return std::min(frobenius(m, n, 1), frobenius(m, n, -1));
}

double hyp_distance(Point z, Point w) {
  check_point(z, "z");
  check_point(w, "w");
  // 2 asinh(|z - w| / (2 sqrt(Im z Im w))) is the cosh formula rewritten to
  // stay accurate for nearby points.
  return 2 * std::asinh(std::abs(z - w) / (2 * std::sqrt(z.imag() * w.imag())));
}

std::string to_string(PresetKind k) {
  return k == PresetKind::kSchottky ? "schottky" : "cocompact";
}

Mobius FuchsianPreset::letter(std::size_t i) const {
  const std::size_t k = generators.size();
  return i < k ? generators[i] : generators[i - k].inverse();
}

std::size_t FuchsianPreset::inverse_letter(std::size_t i) const {
  const std::size_t k = generators.size();
  return i < k ? i + k : i - k;
}

Mobius FuchsianPreset::evaluate(const std::string& word) const {
  std::istringstream in(word);
  std::string tok;
  Mobius m = Mobius::identity();
  while (in >> tok) {
    bool found = false;
    for (std::size_t i = 0; i < generator_names.size() && !found; ++i) {
      const std::string& name = generator_names[i];
      if (tok == name) {
        m = m * generators[i];
        found = true;
      } else if (tok.size() == name.size() && !tok.empty() &&
                 std::isupper(static_cast<unsigned char>(tok[0])) &&
                 std::tolower(static_cast<unsigned char>(tok[0])) == name[0] &&
                 tok.substr(1) == name.substr(1)) {
        m = m * generators[i].inverse();
        found = true;
      }
    }
    if (!found) throw DomainError("unknown generator '" + tok + "'");
  }
  return m;
}

std::string FuchsianPreset::spell(const std::vector<std::uint8_t>& w) const {
  std::string out;
  const std::size_t k = generators.size();
  for (auto l : w) {
    if (!out.empty()) out += ' ';
    std::string name = generator_names[l % k];
    if (l >= k && !name.empty()) {
      name[0] = static_cast<char>(std::toupper(name[0]));
    }
    out += name;
  }
  return out;
}

void FuchsianPreset::validate() const {
  if (generators.empty()) throw DomainError(name + ": no generators");
  if (generator_names.size() != generators.size()) {
    throw DomainError(name + ": generator_names does not match generators");
  }
  check_point(center, "center");
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const Mobius& g = generators[i];
    if (std::abs(g.det() - 1) > 1e-12) {
      throw DomainError(fmt::format("{}: det({}) = {:.17g}, expected 1", name,
                                    generator_names[i], g.det()));
    }
    if (!(std::abs(g.trace()) > 2)) {
      throw DomainError(fmt::format("{}: {} is not hyperbolic (trace {:.12g})",
                                    name, generator_names[i], g.trace()));
    }
  }
  if (kind == PresetKind::kCocompact) {
    if (relator.empty())
      throw DomainError(name + ": cocompact needs a relator");
    double err = psl_distance(evaluate(relator), Mobius::identity());
    if (err > 1e-9) {
      throw DomainError(fmt::format(
          "{}: relator evaluates {:.3g} away from the identity", name, err));
    }
    if (!(diameter > 0) || !(area > 0) || !(systole > 0)) {
      throw DomainError(name + ": cocompact needs positive D, A, systole");
    }
  } else {
    std::vector<Circle> circles;
    for (std::size_t i = 0; i < letter_count(); ++i) {
      Mobius l = letter(i);
      if (l.c == 0) {
        throw DomainError(name + ": letter with c = 0 has no isometric circle");
      }
      circles.push_back(isometric_circle(l));
    }
    for (std::size_t i = 0; i < circles.size(); ++i) {
      for (std::size_t j = i + 1; j < circles.size(); ++j) {
        if (std::abs(circles[i].center - circles[j].center) <=
            circles[i].radius + circles[j].radius) {
          throw DomainError(name +
                            ": isometric circles overlap (no ping-pong)");
        }
      }
    }
  }
}

FuchsianPreset FuchsianPreset::from_json(const nlohmann::json& j) {
  FuchsianPreset p;
  try {
    p.name = j.value("name", std::string("unnamed"));
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "cocompact") {
      p.kind = PresetKind::kCocompact;
    } else if (kind == "schottky") {
      p.kind = PresetKind::kSchottky;
    } else {
      throw ConfigError("unknown preset kind '" + kind + "'");
    }
    for (const auto& g : j.at("generators")) {
      auto v = g.get<std::vector<double>>();
      if (v.size() != 4) throw ConfigError("generator needs 4 entries");
      p.generators.push_back({v[0], v[1], v[2], v[3]});
    }
    if (j.contains("generator_names")) {
      p.generator_names = j["generator_names"].get<std::vector<std::string>>();
    } else {
      for (std::size_t i = 0; i < p.generators.size(); ++i) {
        p.generator_names.push_back(fmt::format("g{}", i));
      }
    }
    p.relator = j.value("relator", std::string());
    if (j.contains("center")) {
      auto c = j["center"].get<std::vector<double>>();
      if (c.size() != 2) throw ConfigError("center needs 2 entries");
      p.center = {c[0], c[1]};
    }
    p.diameter = j.value("D", 0.0);
    p.area = j.value("A", 0.0);
    p.systole = j.value("systole", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("preset: ") + e.what());
  }
  p.validate();
  return p;
}

FuchsianPreset FuchsianPreset::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open preset " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json FuchsianPreset::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : generators) gens.push_back({g.a, g.b, g.c, g.d});
  return {{"name", name},
          {"kind", to_string(kind)},
          {"generator_names", generator_names},
          {"generators", gens},
          {"relator", relator},
          {"center", {center.real(), center.imag()}},
          {"D", diameter},
          {"A", area},
          {"systole", systole}};
}

namespace {

struct Reduction {
  Mobius k;  // p = k^{-1} z
  std::vector<std::uint8_t> word;
  Point p;
};

// Moves z into the Dirichlet domain around the preset centre by greedy
// descent: outside the domain some side pairing brings z closer to o.
Reduction reduce_to_domain(const FuchsianPreset& preset, Point z) {
  Reduction r{Mobius::identity(), {}, z};
  double best = hyp_distance(preset.center, z);
  for (;;) {
    std::size_t pick = preset.letter_count();
    double pick_d = best;
    for (std::size_t l = 0; l < preset.letter_count(); ++l) {
      double d = hyp_distance(preset.center, preset.letter(l).apply(r.p));
      if (d < pick_d - 1e-12) {
        pick_d = d;
        pick = l;
      }
    }
    if (pick == preset.letter_count()) return r;
    r.p = preset.letter(pick).apply(r.p);
    r.k = r.k * preset.letter(preset.inverse_letter(pick));
    r.word.push_back(static_cast<std::uint8_t>(preset.inverse_letter(pick)));
    best = pick_d;
  }
}

OrbitBall enumerate_ball(const FuchsianPreset& preset, Point x, Point y,
                         double radius, const OrbitOptions& opts) {
  const bool schottky = preset.kind == PresetKind::kSchottky;
  const std::size_t L = preset.letter_count();
  std::vector<Mobius> letters;
  std::vector<Circle> inverse_circles;  // I(s^{-1}) for each letter s
  for (std::size_t i = 0; i < L; ++i) letters.push_back(preset.letter(i));

  // Expansion bound. Cocompact, with x and y in the Dirichlet domain F
  // around o: the tiles crossed by the segment from x to g y run from F to
  // g F through side pairings, and each tile h F met at a point p of the
  // segment has d(p, h o) <= R = D/2, so
  //   d(x, h y) <= d(x, p) + R + d(o, y) <= d(x, g y) + R + d(o, y).
  // Schottky: the subtree below a reduced word w s lies in w(I(s^{-1})), so
  // its distance from x bounds every extension; no slack is needed.
  double slack = 0;
  if (schottky) {
    for (std::size_t i = 0; i < L; ++i) {
      Circle c = isometric_circle(letters[i]);
      double dx = y.real() - c.center;
      if (dx * dx + y.imag() * y.imag() <= c.radius * c.radius) {
        throw UnsupportedInputError(
            "schottky base point y must lie outside every isometric circle");
      }
      inverse_circles.push_back(
          isometric_circle(letters[preset.inverse_letter(i)]));
    }
  } else {
    slack = preset.diameter / 2 + hyp_distance(preset.center, y);
    for (const auto& s : letters) {
      slack =
          std::max(slack, hyp_distance(preset.center, s.apply(preset.center)));
    }
    slack += 1e-9;
  }
  const double limit = radius + slack;

  std::vector<Node> nodes;
  ElementSet seen;
  {
    Node id{Mobius::identity(), {}, y, hyp_distance(x, y), 0, true};
    id.prune_key = schottky ? 0 : id.displacement;
    nodes.push_back(id);
    seen.insert(id.g, 0, nodes);
  }

  OrbitBall ball;
  ball.x = x;
  ball.y = y;
  ball.radius = radius;

  std::vector<std::size_t> frontier{0};
  std::size_t next_unexpanded = 0;  // nodes[i] for i >= this are unexpanded
  bool capped = false;
  while (!frontier.empty() && !capped) {
    std::vector<std::vector<Node>> children(frontier.size());
    parallel_for(frontier.size(), opts.workers, [&](std::size_t fi) {
      const Node& parent = nodes[frontier[fi]];
      const Mobius parent_inv = parent.g.inverse();
      const Point pulled_x = parent_inv.apply(x);
      auto& out = children[fi];
      for (std::size_t l = 0; l < L; ++l) {
        if (!parent.word.empty() &&
            l == preset.inverse_letter(parent.word.back())) {
          continue;
        }
        Node c;
        c.g = parent.g * letters[l];
        c.image = c.g.apply(y);
        c.displacement = hyp_distance(x, c.image);
        if (schottky) {
          c.prune_key = distance_to_halfdisk(pulled_x, inverse_circles[l]);
          c.expand = c.prune_key <= radius;
        } else {
          c.prune_key = c.displacement;
          c.expand = c.displacement <= limit;
        }
        if (!c.expand && c.displacement > radius) continue;
        c.word = parent.word;
        c.word.push_back(static_cast<std::uint8_t>(l));
        out.push_back(std::move(c));
      }
    });
    ball.expanded += frontier.size();
    next_unexpanded = nodes.size();
    std::vector<std::size_t> next;
    for (auto& list : children) {
      for (auto& ch : list) {
        if (nodes.size() >= opts.max_elements) {
          capped = true;
          break;
        }
        std::size_t id = nodes.size();
        nodes.push_back(std::move(ch));
        if (!seen.insert(nodes.back().g, id, nodes)) {
          nodes.pop_back();
          continue;
        }
        if (nodes.back().expand) next.push_back(id);
      }
      if (capped) break;
    }
    frontier = std::move(next);
  }

  ball.complete = !capped;
  ball.certified_t = radius;
  if (capped) {
    // Every missed element has an unexpanded prefix h with
    // prune_key(h) <= d(x, g y) + slack.
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = next_unexpanded; i < nodes.size(); ++i) {
      if (nodes[i].expand) lo = std::min(lo, nodes[i].prune_key);
    }
    ball.certified_t = std::clamp(lo - slack, 0.0, radius);
  }

  for (auto& n : nodes) {
    if (n.displacement <= radius) {
      ball.elements.push_back(
          {n.g, std::move(n.word), n.displacement, n.image});
    }
  }
  std::sort(ball.elements.begin(), ball.elements.end(),
            [](const OrbitElement& a, const OrbitElement& b) {
              if (a.displacement != b.displacement) {
                return a.displacement < b.displacement;
              }
              return a.word < b.word;
            });
  if (capped && opts.strict) {
    throw BudgetExceededError(
        fmt::format("orbit enumeration hit the cap of {} elements; counts are "
                    "exact only up to t = {:.12g}",
                    opts.max_elements, ball.certified_t),
        ball.certified_t);
  }
  return ball;
}

}  // namespace

OrbitBall orbit_ball(const FuchsianPreset& preset, Point x, Point y,
                     double radius, const OrbitOptions& opts) {
  check_point(x, "x");
  check_point(y, "y");
  if (!(radius >= 0)) throw DomainError("negative orbit radius");
  if (preset.kind == PresetKind::kSchottky) {
    return enumerate_ball(preset, x, y, radius, opts);
  }
  // d(kx p, g ky q) = d(p, kx^{-1} g ky q): enumerate for the reduced points
  // and conjugate back.
  Reduction rx = reduce_to_domain(preset, x);
  Reduction ry = reduce_to_domain(preset, y);
  if (rx.word.empty() && ry.word.empty()) {
    return enumerate_ball(preset, x, y, radius, opts);
  }
  OrbitBall ball = enumerate_ball(preset, rx.p, ry.p, radius, opts);
  const Mobius ky_inv = ry.k.inverse();
  std::vector<std::uint8_t> ky_inv_word;
  for (auto it = ry.word.rbegin(); it != ry.word.rend(); ++it) {
    ky_inv_word.push_back(
        static_cast<std::uint8_t>(preset.inverse_letter(*it)));
  }
  for (auto& e : ball.elements) {
    e.g = rx.k * e.g * ky_inv;
    e.image = e.g.apply(y);
    std::vector<std::uint8_t> w = rx.word;
    w.insert(w.end(), e.word.begin(), e.word.end());
    w.insert(w.end(), ky_inv_word.begin(), ky_inv_word.end());
    e.word = std::move(w);
  }
  std::sort(ball.elements.begin(), ball.elements.end(),
            [](const OrbitElement& a, const OrbitElement& b) {
              if (a.displacement != b.displacement) {
                return a.displacement < b.displacement;
              }
              return a.word < b.word;
            });
  ball.x = x;
  ball.y = y;
  return ball;
}

growth::GrowthSeries OrbitCount::series() const {
  std::vector<growth::GrowthSeries::Sample> s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (counts[i] > 0 && t[i] > 0) {
      s.push_back({t[i], static_cast<double>(counts[i])});
    }
  }
  return growth::GrowthSeries(std::move(s));
}

void OrbitCount::write_csv(std::ostream& os) const {
  os << "t,count,certified\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << fmt::format("{:.12g},{},{}\n", t[i], counts[i],
                      certified[i] ? "true" : "false");
  }
}

OrbitCount count_from_ball(const OrbitBall& ball,
                           const std::vector<double>& t_grid) {
  OrbitCount out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double t = t_grid[i];
    if (i > 0 && !(t > t_grid[i - 1])) {
      throw DomainError("t grid must be strictly increasing");
    }
    if (t > ball.radius) {
      throw RangeError(
          fmt::format("t = {:.12g} beyond the enumerated radius", t));
    }
    auto it = std::upper_bound(
        ball.elements.begin(), ball.elements.end(), t,
        [](double v, const OrbitElement& e) { return v < e.displacement; });
    out.t.push_back(t);
    out.counts.push_back(it - ball.elements.begin());
    out.certified.push_back(t <= ball.certified_t);
  }
  return out;
}

OrbitCount orbit_count(const FuchsianPreset& preset, Point x, Point y,
                       const std::vector<double>& t_grid,
                       const OrbitOptions& opts) {
  if (t_grid.empty()) return {};
  if (t_grid.front() < 0) throw DomainError("negative t in grid");
  OrbitBall ball = orbit_ball(preset, x, y, t_grid.back(), opts);
  return count_from_ball(ball, t_grid);
}

std::vector<std::int64_t> word_length_counts(const FuchsianPreset& preset,
                                             int max_len) {
  if (max_len < 0) throw DomainError("negative word length");
  const std::size_t L = preset.letter_count();
  std::vector<Node> nodes;
  ElementSet seen;
  nodes.push_back({Mobius::identity(), {}, kProbe, 0, 0, true});
  seen.insert(nodes[0].g, 0, nodes);
  std::vector<std::int64_t> counts{1};
  std::vector<std::size_t> frontier{0};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> next;
    for (std::size_t f : frontier) {
      for (std::size_t l = 0; l < L; ++l) {
        const auto& w = nodes[f].word;
        if (!w.empty() && l == preset.inverse_letter(w.back())) continue;
        Node c{nodes[f].g * preset.letter(l), w, {}, 0, 0, true};
        c.word.push_back(static_cast<std::uint8_t>(l));
        std::size_t id = nodes.size();
        nodes.push_back(std::move(c));
        if (seen.insert(nodes.back().g, id, nodes)) {
          next.push_back(id);
        } else {
          nodes.pop_back();
        }
      }
    }
    counts.push_back(static_cast<std::int64_t>(next.size()));
    frontier = std::move(next);
  }
  return counts;
}

growth::GrowthClass entropy_estimate(const growth::GrowthSeries& series,
                                     double window) {
  return growth::rate_estimate(series, growth::RateMode::kExponential, window);
}

std::string to_string(BoundMode m) {
  switch (m) {
    case BoundMode::kArea:
      return "area";
    case BoundMode::kPacking:
      return "packing";
    case BoundMode::kBest:
      return "best";
    case BoundMode::kEmpirical:
      return "empirical";
  }
  return "?";
}

BoundMode parse_bound_mode(const std::string& s) {
  if (s == "area") return BoundMode::kArea;
  if (s == "packing") return BoundMode::kPacking;
  if (s == "best" || s == "rigorous") return BoundMode::kBest;
  if (s == "empirical") return BoundMode::kEmpirical;
  throw ConfigError("unknown bound mode '" + s + "'");
}

namespace {

// Deterministic base point within hyperbolic distance `rho_max` of c.
Point sample_near(Point c, double rho_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double rho = std::acosh(1 + u(rng) * (std::cosh(rho_max) - 1));
  double theta = 2 * std::numbers::pi * u(rng);
  Point zeta = std::polar(std::tanh(rho / 2), theta);
  Point w = Point(0, 1) * (1.0 + zeta) / (1.0 - zeta);
  return c.real() + c.imag() * w;
}

bool outside_circles(const FuchsianPreset& p, Point z) {
  for (std::size_t i = 0; i < p.letter_count(); ++i) {
    Circle c = isometric_circle(p.letter(i));
    double dx = z.real() - c.center;
    if (dx * dx + z.imag() * z.imag() <= c.radius * c.radius) return false;
  }
  return true;
}

}  // namespace

std::vector<std::pair<Point, Point>> sample_pairs(const FuchsianPreset& preset,
                                                  std::uint64_t seed,
                                                  std::size_t count) {
  std::mt19937_64 rng(seed);
  const bool schottky = preset.kind == PresetKind::kSchottky;
  const double spread = schottky ? 0.5 : preset.diameter / 2;
  std::vector<std::pair<Point, Point>> pairs;
  while (pairs.size() < count) {
    Point p = sample_near(preset.center, spread, rng);
    Point q = sample_near(preset.center, spread, rng);
    if (schottky && !outside_circles(preset, q)) continue;
    pairs.emplace_back(p, q);
  }
  return pairs;
}

UniformBound uniform_count_bound(const FuchsianPreset& preset, double r,
                                 BoundMode mode, const EmpiricalOptions& emp) {
  if (!(r >= 0)) throw DomainError("uniform_count_bound needs r >= 0");
  UniformBound u;
  u.method = to_string(mode);
  if (mode == BoundMode::kEmpirical) {
    auto pairs = sample_pairs(preset, emp.seed, emp.samples);
    std::vector<std::size_t> counts(pairs.size());
    parallel_for(pairs.size(), emp.workers, [&](std::size_t i) {
      counts[i] = orbit_ball(preset, pairs[i].first, pairs[i].second, r)
                      .elements.size();
    });
    u.raw = static_cast<double>(
        counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()));
    u.rigorous = false;
  } else {
    if (preset.kind != PresetKind::kCocompact) {
      throw UnsupportedInputError(
          "rigorous uniform count bounds need a cocompact preset (finite "
          "area)");
    }
    double area_bound = 2 * std::numbers::pi *
                        (std::cosh(r + 2 * preset.diameter) - 1) / preset.area;
    double half = preset.systole / 2;
    double packing_bound = (std::cosh(r + half) - 1) / (std::cosh(half) - 1);
    if (mode == BoundMode::kArea) {
      u.raw = area_bound;
    } else if (mode == BoundMode::kPacking) {
      u.raw = packing_bound;
    } else {
      u.raw = std::min(area_bound, packing_bound);
      u.method = packing_bound <= area_bound ? "packing" : "area";
    }
    u.rigorous = true;
  }
  u.value = std::max(u.raw, 1.0);
  return u;
}

std::vector<bool> endpoint_passing(const FuchsianPreset& preset,
                                   const OrbitBall& ball, int workers) {
  const auto& el = ball.elements;
  // Lifts of x other than x itself, and lifts of y.
  OrbitBall xs = orbit_ball(preset, ball.x, ball.x, ball.radius);
  struct Lift {
    Point p;
    double dist;
    std::size_t element;  // index into el for y-lifts, npos for x-lifts
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<Lift> lifts;
  for (const auto& e : xs.elements) {
    // Conjugated words need not be reduced, so test the identity by its
    // action: nothing else in a torsion-free group fixes x.
    if (e.displacement < kCollinearTol) continue;
    lifts.push_back({e.image, e.displacement, kNone});
  }
  for (std::size_t i = 0; i < el.size(); ++i) {
    lifts.push_back({el[i].image, el[i].displacement, i});
  }
  std::sort(lifts.begin(), lifts.end(),
            [](const Lift& a, const Lift& b) { return a.dist < b.dist; });

  std::vector<char> hit(el.size(), 0);
  parallel_for(el.size(), workers, [&](std::size_t i) {
    const double di = el[i].displacement;
    for (const auto& l : lifts) {
      if (l.dist >= di) break;
      if (l.element == i) continue;
      double defect = l.dist + hyp_distance(l.p, el[i].image) - di;
      if (defect < kCollinearTol) {
        hit[i] = 1;
        return;
      }
    }
  });
  return {hit.begin(), hit.end()};
}

nlohmann::json LowerBound::to_json() const {
  return {{"t", t}, {"value", value},         {"n", n},      {"m", m},
          {"U", u}, {"certified", certified}, {"note", note}};
}

std::vector<LowerBound> lower_bound_series(const FuchsianPreset& preset,
                                           Point x, Point y,
                                           const std::vector<double>& t_grid,
                                           BoundMode mode,
                                           const OrbitOptions& opts) {
  if (t_grid.empty()) return {};
  OrbitOptions o = opts;
  o.strict = false;
  OrbitBall ball = orbit_ball(preset, x, y, t_grid.back(), o);
  std::vector<bool> passing = endpoint_passing(preset, ball, opts.workers);
  std::vector<LowerBound> out;
  EmpiricalOptions emp;
  emp.workers = opts.workers;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (i > 0 && !(t > t_grid[i - 1])) {
      throw DomainError("t grid must be strictly increasing");
    }
    LowerBound lb;
    lb.t = t;
    for (std::size_t j = 0; j < ball.elements.size(); ++j) {
      if (ball.elements[j].displacement > t) break;
      ++lb.n;
      if (!passing[j]) ++lb.m;
    }
    UniformBound u = uniform_count_bound(preset, t / 2, mode, emp);
    lb.u = u.value;
    lb.value = static_cast<double>(lb.m) / (2 * u.value);
    const bool counted = t <= ball.certified_t;
    lb.certified = counted && u.rigorous;
    if (!u.rigorous) {
      lb.note = "heuristic: empirical U";
    } else if (!counted) {
      lb.note = "heuristic: count beyond certified radius";
    } else {
      lb.note = "U by " + u.method;
    }
    out.push_back(lb);
  }
  return out;
}

LowerBound certified_blocking_lower_bound(const FuchsianPreset& preset, Point x,
                                          Point y, double t, BoundMode mode,
                                          const OrbitOptions& opts) {
  if (!(t >= 0)) throw DomainError("t must be non-negative");
  return lower_bound_series(preset, x, y, {t}, mode, opts).front();
}

std::int64_t word_growth(GroupKind kind, int rank, int n) {
  if (rank < 1 || n < 0)
    throw DomainError("word_growth needs rank >= 1, n >= 0");
  auto mul = [](std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
      throw RangeError("word_growth overflow");
    return r;
  };
  auto add = [](std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
      throw RangeError("word_growth overflow");
    return r;
  };
  if (kind == GroupKind::kFree) {
    std::int64_t total = 1, sphere = 2 * rank;
    for (int i = 1; i <= n; ++i) {
      total = add(total, sphere);
      if (i < n) sphere = mul(sphere, 2 * rank - 1);
    }
    return total;
  }
  // sum_i 2^i C(rank, i) C(n, i): choose the i nonzero coordinates, their
  // signs, and a composition of at most n into i positive parts.
  std::int64_t total = 0;
  std::int64_t c_rank = 1, c_n = 1, pow2 = 1;
  for (int i = 0; i <= std::min(rank, n); ++i) {
    total = add(total, mul(mul(pow2, c_rank), c_n));
    c_rank = mul(c_rank, rank - i) / (i + 1);
    c_n = mul(c_n, n - i) / (i + 1);
    pow2 = mul(pow2, 2);
  }
  return total;
}

}  // namespace geoblock::hyp
