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

#include "geoblock/flatspace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>
#include <tuple>

#include "geoblock/errors.hpp"

namespace geoblock::flat {
namespace {

using i128 = __int128;

Rational round_nearest(const Rational& r) {
  return Rational((r + Rational(1, 2)).floor());
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  i128 l = static_cast<i128>(a) / std::gcd(a, b) * b;
  if (l > std::numeric_limits<std::int64_t>::max()) {
    throw std::overflow_error("denominator lcm overflow");
  }
  return static_cast<std::int64_t>(l);
}

// Common denominator of a set of vectors, and the vectors scaled by it.
struct Scaled {
  std::int64_t L = 1;
  std::vector<std::array<i128, 2>> v;
};

Scaled scale(std::initializer_list<const Vec2*> vs) {
  Scaled out;
  for (const Vec2* p : vs) {
    out.L = checked_lcm(out.L, p->x.den());
    out.L = checked_lcm(out.L, p->y.den());
  }
  for (const Vec2* p : vs) {
    out.v.push_back({static_cast<i128>(p->x.num()) * (out.L / p->x.den()),
                     static_cast<i128>(p->y.num()) * (out.L / p->y.den())});
  }
  return out;
}

Rational make_rational(i128 n, i128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  if (n > std::numeric_limits<std::int64_t>::max() ||
      n < std::numeric_limits<std::int64_t>::min() ||
      d > std::numeric_limits<std::int64_t>::max()) {
    throw std::overflow_error("rational overflow");
  }
  return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

i128 cross128(const std::array<i128, 2>& a, const std::array<i128, 2>& b) {
  return a[0] * b[1] - a[1] * b[0];
}

struct Overlap {
  Rational lo, hi, sigma, rho;
};

struct PairSolution {
  std::vector<std::pair<Rational, Rational>> crossings;  // (s, u)
  std::vector<Overlap> overlaps;
};

// All (s, u) in (0,1)^2 with s c - u d - e in Z^2 (lattice coordinates).
// Parallel c, d give open s-intervals instead of isolated solutions.
PairSolution pair_hits(const Vec2& c, const Vec2& d, const Vec2& e) {
  PairSolution out;
  Scaled sc = scale({&c, &d, &e});
  const i128 L = sc.L;
  const auto& C = sc.v[0];
  const auto& D = sc.v[1];
  const auto& E = sc.v[2];
  const i128 den = cross128(D, C);
  if (den != 0) {
    // r = s c - u d lies in the open box spanned by c and -d.
    i128 lo[2], hi[2];
    for (int k = 0; k < 2; ++k) {
      i128 rlo = std::min<i128>(0, C[k]) + std::min<i128>(0, -D[k]);
      i128 rhi = std::max<i128>(0, C[k]) + std::max<i128>(0, -D[k]);
      lo[k] = floor_div(rlo - E[k], L);
      hi[k] = ceil_div(rhi - E[k], L);
    }
    for (i128 l0 = lo[0]; l0 <= hi[0]; ++l0) {
      for (i128 l1 = lo[1]; l1 <= hi[1]; ++l1) {
        std::array<i128, 2> R = {E[0] + L * l0, E[1] + L * l1};
        i128 sn = cross128(D, R);
        i128 un = cross128(C, R);
        // 0 < sn/den < 1 and 0 < un/den < 1.
        auto inside = [&](i128 num) {
          return den > 0 ? (num > 0 && num < den) : (num < 0 && num > den);
        };
        if (inside(sn) && inside(un)) {
          out.crossings.emplace_back(make_rational(sn, den),
                                     make_rational(un, den));
        }
      }
    }
    return out;
  }
  // d = rho c.
  Rational rho = c.x.is_zero() ? d.y / c.y : d.x / c.x;
  Rational zero(0), one(1);
  Rational sig_lo = std::min(zero, -rho);
  Rational sig_hi = one + std::max(zero, -rho);
  for (const Rational& sigma : line_hits(c, e, sig_lo, sig_hi)) {
    Rational lo = std::max(zero, sigma + std::min(zero, rho));
    Rational hi = std::min(one, sigma + std::max(zero, rho));
    if (lo < hi) out.overlaps.push_back({lo, hi, sigma, rho});
  }
  return out;
}

Vec2 reflect(const Vec2& p, int s1, int s2) {
  return {s1 < 0 ? -p.x : p.x, s2 < 0 ? -p.y : p.y};
}

std::vector<Rational> sorted_unique(std::vector<Rational> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

FlatSpace FlatSpace::torus(const Vec2& b1, const Vec2& b2) {
  if (cross(b1, b2).is_zero()) {
    throw DomainError("torus basis vectors are linearly dependent");
  }
  FlatSpace s;
  s.kind_ = SpaceKind::kTorus;
  s.input_b1_ = b1;
  s.input_b2_ = b2;
  s.finish();
  return s;
}

FlatSpace FlatSpace::unit_torus() {
  return torus({Rational(1), Rational(0)}, {Rational(0), Rational(1)});
}

FlatSpace FlatSpace::square_billiard() {
  FlatSpace s;
  s.kind_ = SpaceKind::kSquareBilliard;
  s.input_b1_ = {Rational(2), Rational(0)};
  s.input_b2_ = {Rational(0), Rational(2)};
  s.finish();
  return s;
}

void FlatSpace::finish() {
  Vec2 a = input_b1_, b = input_b2_;
  if (a.norm2() > b.norm2()) std::swap(a, b);
  for (;;) {
    Rational mu = round_nearest(dot(a, b) / a.norm2());
    b = b - mu * a;
    if (b.norm2() < a.norm2()) {
      std::swap(a, b);
    } else {
      break;
    }
  }
  r1_ = a;
  r2_ = b;
  Rational det = cross(r1_, r2_);
  inv_row1_ = {r2_.y / det, -r2_.x / det};
  inv_row2_ = {-r1_.y / det, r1_.x / det};

  // Lagrange-reduced: r1 is a shortest vector. The scan certifies it.
  shortest_ = {r1_, r1_.norm2()};
  for (std::int64_t i = -2; i <= 2; ++i) {
    for (std::int64_t j = -2; j <= 2; ++j) {
      if (i == 0 && j == 0) continue;
      Vec2 v = Rational(i) * r1_ + Rational(j) * r2_;
      if (v.norm2() < shortest_.length2) {
        throw std::logic_error("lattice reduction did not reach a minimum");
      }
    }
  }
  delta2_ = kind_ == SpaceKind::kTorus ? shortest_.length2 / Rational(4)
                                       : Rational(1, 16);
}

Rational FlatSpace::covolume() const {
  Rational d = cross(input_b1_, input_b2_);
  return kind_ == SpaceKind::kTorus ? abs(d) : Rational(1);
}

double FlatSpace::delta() const { return std::sqrt(delta2_.to_double()); }

Vec2 FlatSpace::to_lattice(const Vec2& p) const {
  return {dot(inv_row1_, p), dot(inv_row2_, p)};
}

Vec2 FlatSpace::to_ambient(const Vec2& c) const {
  return c.x * r1_ + c.y * r2_;
}

std::vector<Vec2> FlatSpace::images(const Vec2& p) const {
  if (kind_ == SpaceKind::kTorus) return {p};
  return {reflect(p, 1, 1), reflect(p, -1, 1), reflect(p, 1, -1),
          reflect(p, -1, -1)};
}

Vec2 FlatSpace::canonical(const Vec2& p) const {
  if (kind_ == SpaceKind::kTorus) {
    Vec2 c = to_lattice(p);
    return to_ambient({c.x.frac(), c.y.frac()});
  }
  auto fold = [](const Rational& u) {
    Rational two(2);
    Rational r = u - two * Rational((u / two).floor());
    return r > Rational(1) ? two - r : r;
  };
  return {fold(p.x), fold(p.y)};
}

void FlatSpace::check_endpoint(const Vec2& p) const {
  if (kind_ == SpaceKind::kTorus) return;
  Rational zero(0), one(1);
  if (!(p.x > zero && p.x < one && p.y > zero && p.y < one)) {
    throw UnsupportedInputError("billiard endpoint " + p.str() +
                                " is not in the open unit square");
  }
}

std::string FlatSpace::describe() const {
  if (kind_ == SpaceKind::kSquareBilliard) return "square-billiard";
  return "torus[" + input_b1_.str() + ", " + input_b2_.str() + "]";
}

ShortestVector shortest_vector(const FlatSpace& space) {
  if (!space.is_torus()) {
    throw DomainError("shortest_vector needs a torus");
  }
  return {space.reduced_b1(), space.shortest_length2()};
}

std::string to_string(SegmentClass c) {
  return c == SegmentClass::kConnecting ? "connecting"
                                        : "passes-through-endpoint";
}

std::vector<Rational> line_hits(const Vec2& c, const Vec2& e,
                                const Rational& lo, const Rational& hi) {
  if (c.x.is_zero() && c.y.is_zero()) {
    throw DomainError("line_hits needs a nonzero direction");
  }
  Scaled sc = scale({&c, &e});
  const i128 L = sc.L;
  const auto& C = sc.v[0];
  const auto& E = sc.v[1];
  const int k = C[0] != 0 ? 0 : 1;
  const int o = 1 - k;
  // s = (E_k + L m) / C_k must lie in (lo, hi).
  const Vec2 bound_pair{lo, hi};
  Scaled b = scale({&bound_pair});
  const i128 BL = b.L;
  const i128 lo_n = b.v[0][0], hi_n = b.v[0][1];  // lo = lo_n / BL
  // lo < (E_k + L m)/C_k < hi.
  i128 a_lo, a_hi;  // open bounds on E_k + L m, scaled by BL
  if (C[k] > 0) {
    a_lo = lo_n * C[k];
    a_hi = hi_n * C[k];
  } else {
    a_lo = hi_n * C[k];
    a_hi = lo_n * C[k];
  }
  // BL (E_k + L m) in (a_lo, a_hi).
  i128 m_min = floor_div(a_lo - BL * E[k], BL * L) + 1;
  i128 m_max = ceil_div(a_hi - BL * E[k], BL * L) - 1;
  std::vector<Rational> out;
  for (i128 m = m_min; m <= m_max; ++m) {
    i128 num = E[k] + L * m;
    // s c_o - e_o = (num C_o - E_o C_k) / (C_k L) must be an integer.
    i128 t = num * C[o] - E[o] * C[k];
    if (t % (C[k] * L) != 0) continue;
    out.push_back(make_rational(num, C[k]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void scan_targets(const FlatSpace& space, const Vec2& x, const Vec2& y,
                  const Rational& t2, int workers,
                  std::vector<GeodesicSegment>& out) {
  const double t = std::sqrt(t2.to_double()) * (1 + 1e-9) + 1e-9;
  Vec2 ir1 = space.to_lattice({Rational(1), Rational(0)});
  Vec2 ir2 = space.to_lattice({Rational(0), Rational(1)});
  // Norms of the dual rows bound each lattice coordinate of a vector of
  // length <= t.
  double w1 = std::hypot(ir1.x.to_double(), ir2.x.to_double()) * t;
  double w2 = std::hypot(ir1.y.to_double(), ir2.y.to_double()) * t;

  std::vector<Vec2> corners;
  if (!space.is_torus()) {
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b)
        corners.push_back({Rational(a), Rational(b)});
  }

  struct Target {
    Vec2 image;
    int s1, s2;
  };
  std::vector<Target> targets;
  if (space.is_torus()) {
    targets.push_back({y, 1, 1});
  } else {
    for (int s2 : {1, -1})
      for (int s1 : {1, -1}) targets.push_back({reflect(y, s1, s2), s1, s2});
  }

  for (const Target& tg : targets) {
    Vec2 dc = space.to_lattice(tg.image - x);
    auto i_lo =
        static_cast<std::int64_t>(std::floor(-dc.x.to_double() - w1)) - 1;
    auto i_hi =
        static_cast<std::int64_t>(std::ceil(-dc.x.to_double() + w1)) + 1;
    auto j_lo =
        static_cast<std::int64_t>(std::floor(-dc.y.to_double() - w2)) - 1;
    auto j_hi =
        static_cast<std::int64_t>(std::ceil(-dc.y.to_double() + w2)) + 1;

    auto work = [&](std::int64_t from, std::int64_t to,
                    std::vector<GeodesicSegment>& local) {
      for (std::int64_t i = from; i < to; ++i) {
        for (std::int64_t j = j_lo; j <= j_hi; ++j) {
          Vec2 c{dc.x + Rational(i), dc.y + Rational(j)};
          Vec2 v = space.to_ambient(c);
          Rational len2 = v.norm2();
          if (len2.is_zero() || len2 > t2) continue;
          GeodesicSegment seg;
          seg.source = x;
          seg.target = y;
          seg.displacement = v;
          seg.lattice_displacement = c;
          seg.length2 = len2;
          if (!space.is_torus()) {
            bool corner = false;
            for (const Vec2& k : corners) {
              if (!line_hits(c, space.to_lattice(k - x)).empty()) {
                corner = true;
                break;
              }
            }
            if (corner) continue;
            seg.sigma1 = tg.s1;
            seg.sigma2 = tg.s2;
            Vec2 end = x + v;
            seg.m = ((end.x - reflect(y, tg.s1, 1).x) / Rational(2)).floor();
            seg.n = ((end.y - reflect(y, 1, tg.s2).y) / Rational(2)).floor();
          }
          local.push_back(std::move(seg));
        }
      }
    };

    const std::int64_t span = i_hi - i_lo + 1;
    const int nw = static_cast<int>(
        std::max<std::int64_t>(1, std::min<std::int64_t>(workers, span)));
    if (nw == 1) {
      work(i_lo, i_hi + 1, out);
    } else {
      std::vector<std::vector<GeodesicSegment>> parts(nw);
      std::vector<std::thread> threads;
      for (int w = 0; w < nw; ++w) {
        std::int64_t from = i_lo + span * w / nw;
        std::int64_t to = i_lo + span * (w + 1) / nw;
        threads.emplace_back(work, from, to, std::ref(parts[w]));
      }
      for (auto& th : threads) th.join();
      for (auto& p : parts) {
        for (auto& s : p) out.push_back(std::move(s));
      }
    }
  }
}

void sort_family(std::vector<GeodesicSegment>& family) {
  std::sort(family.begin(), family.end(),
            [](const GeodesicSegment& a, const GeodesicSegment& b) {
              return a.displacement < b.displacement;
            });
}

}  // namespace

std::vector<GeodesicSegment> enumerate_geodesics(const FlatSpace& space,
                                                 const Vec2& x, const Vec2& y,
                                                 const Rational& t2,
                                                 int workers) {
  if (t2.sign() <= 0) throw DomainError("t^2 must be positive");
  space.check_endpoint(x);
  space.check_endpoint(y);
  std::vector<GeodesicSegment> out;
  scan_targets(space, x, y, t2, std::max(1, workers), out);
  for (auto& seg : out) {
    Classification c = classify(space, seg);
    seg.cls = c.cls;
    seg.endpoint_hits = std::move(c.parameters);
  }
  sort_family(out);
  return out;
}

std::vector<GeodesicSegment> enumerate_geodesics_bruteforce(
    const FlatSpace& space, const Vec2& x, const Vec2& y, const Rational& t2,
    std::int64_t box) {
  space.check_endpoint(x);
  space.check_endpoint(y);
  std::vector<GeodesicSegment> out;
  std::vector<Vec2> images =
      space.is_torus() ? std::vector<Vec2>{y} : space.images(y);
  for (std::size_t img = 0; img < images.size(); ++img) {
    for (std::int64_t i = -box; i <= box; ++i) {
      for (std::int64_t j = -box; j <= box; ++j) {
        Vec2 v = images[img] - x + Rational(i) * space.b1() +
                 Rational(j) * space.b2();
        Rational len2 = v.norm2();
        if (len2.is_zero() || len2 > t2) continue;
        GeodesicSegment seg;
        seg.source = x;
        seg.target = y;
        seg.displacement = v;
        seg.lattice_displacement = space.to_lattice(v);
        seg.length2 = len2;
        if (!space.is_torus()) {
          // Corner images are the integer points of the plane.
          bool corner = false;
          for (const Rational& s : line_hits(v, {-x.x, -x.y})) {
            (void)s;
            corner = true;
          }
          if (corner) continue;
        }
        Classification c = classify(space, seg);
        seg.cls = c.cls;
        seg.endpoint_hits = c.parameters;
        out.push_back(std::move(seg));
      }
    }
  }
  sort_family(out);
  return out;
}

Classification classify(const FlatSpace& space, const GeodesicSegment& seg) {
  std::vector<Rational> hits = point_on_geodesic(space, seg.source, seg);
  std::vector<Rational> at_y = point_on_geodesic(space, seg.target, seg);
  hits.insert(hits.end(), at_y.begin(), at_y.end());
  hits = sorted_unique(std::move(hits));
  return {hits.empty() ? SegmentClass::kConnecting
                       : SegmentClass::kPassesThroughEndpoint,
          std::move(hits)};
}

Counts count(const FlatSpace& space, const Vec2& x, const Vec2& y,
             const Rational& t2, int workers) {
  Counts c;
  for (const auto& seg : enumerate_geodesics(space, x, y, t2, workers)) {
    ++c.n;
    if (seg.cls == SegmentClass::kConnecting) ++c.m;
  }
  return c;
}

std::vector<GeodesicSegment> connecting_geodesics(const FlatSpace& space,
                                                  const Vec2& x, const Vec2& y,
                                                  const Rational& t2,
                                                  int workers) {
  auto all = enumerate_geodesics(space, x, y, t2, workers);
  std::vector<GeodesicSegment> out;
  for (auto& seg : all) {
    if (seg.cls == SegmentClass::kConnecting) out.push_back(std::move(seg));
  }
  return out;
}

std::vector<Rational> point_on_geodesic(const FlatSpace& space, const Vec2& z,
                                        const GeodesicSegment& seg) {
  std::vector<Rational> hits;
  for (const Vec2& img : space.images(z)) {
    auto h =
        line_hits(seg.lattice_displacement, space.to_lattice(img - seg.source));
    hits.insert(hits.end(), h.begin(), h.end());
  }
  return sorted_unique(std::move(hits));
}

std::vector<IntersectionCandidate> intersection_candidates(
    const FlatSpace& space, const GeodesicSegment& a,
    const GeodesicSegment& b) {
  std::vector<IntersectionCandidate> out;
  const Vec2& x = a.source;
  for (int s2 : {1, -1}) {
    for (int s1 : {1, -1}) {
      if (space.is_torus() && (s1 < 0 || s2 < 0)) continue;
      // Points x + s va and R(x + u vb) agree modulo the lattice.
      Vec2 rd = space.to_lattice(reflect(b.displacement, s1, s2));
      Vec2 e = space.to_lattice(reflect(b.source, s1, s2) - x);
      PairSolution sol = pair_hits(a.lattice_displacement, rd, e);
      for (const auto& [s, u] : sol.crossings) {
        IntersectionCandidate c;
        c.point = space.canonical(x + s * a.displacement);
        c.s = s;
        c.u = u;
        out.push_back(std::move(c));
      }
      auto& ov = sol.overlaps;
      std::sort(ov.begin(), ov.end(),
                [](const Overlap& p, const Overlap& q) { return p.lo < q.lo; });
      for (std::size_t i = 0; i < ov.size();) {
        Rational lo = ov[i].lo, hi = ov[i].hi;
        std::size_t j = i + 1;
        while (j < ov.size() && ov[j].lo < hi) {
          hi = std::max(hi, ov[j].hi);
          ++j;
        }
        Rational mid = (lo + hi) / Rational(2);
        IntersectionCandidate c;
        c.overlap = true;
        c.s_lo = lo;
        c.s_hi = hi;
        c.s = mid;
        for (std::size_t k = i; k < j; ++k) {
          if (ov[k].lo < mid && mid < ov[k].hi) {
            c.u = (mid - ov[k].sigma) / ov[k].rho;
            break;
          }
        }
        c.point = space.canonical(x + mid * a.displacement);
        out.push_back(std::move(c));
        i = j;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const IntersectionCandidate& p, const IntersectionCandidate& q) {
              return std::tie(p.s, p.u) < std::tie(q.s, q.u);
            });
  return out;
}

void write_family_csv(std::ostream& os,
                      const std::vector<GeodesicSegment>& family) {
  os << "vx,vy,len2,class\n";
  for (const auto& seg : family) {
    os << fmt::format("{:.12g},{:.12g},{:.12g},{}\n",
                      seg.displacement.x.to_double(),
                      seg.displacement.y.to_double(), seg.length2.to_double(),
                      to_string(seg.cls));
  }
}

}  // namespace geoblock::flat
