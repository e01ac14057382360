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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "geoblock/errors.hpp"

namespace geoblock::flat {
namespace {

void PrintTo(const Vec2& v, std::ostream* os) { *os << v.str(); }

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
Vec2 V(Rational x, Rational y) { return {x, y}; }

std::set<Vec2> displacements(const std::vector<GeodesicSegment>& segs) {
  std::set<Vec2> out;
  for (const auto& s : segs) out.insert(s.displacement);
  return out;
}

TEST(ShortestVector, Examples) {
  EXPECT_EQ(shortest_vector(FlatSpace::unit_torus()).length2, R(1));
  auto skew = FlatSpace::torus(V(R(1), R(0)), V(R(1, 2), R(1, 2)));
  EXPECT_EQ(shortest_vector(skew).length2, R(1, 2));
  auto rect = FlatSpace::torus(V(R(2), R(0)), V(R(0), R(3)));
  EXPECT_EQ(shortest_vector(rect).length2, R(4));
  EXPECT_EQ(rect.delta2(), R(1));
}

TEST(ShortestVector, DegenerateBasis) {
  EXPECT_THROW(FlatSpace::torus(V(R(1), R(2)), V(R(2), R(4))), DomainError);
  EXPECT_THROW(shortest_vector(FlatSpace::square_billiard()), DomainError);
}

TEST(ShortestVector, MatchesCoefficientScan) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int it = 0; it < 200; ++it) {
    Vec2 b1 = V(R(d(rng), 3), R(d(rng), 4));
    Vec2 b2 = V(R(d(rng), 5), R(d(rng), 2));
    if (cross(b1, b2).is_zero()) continue;
    auto sp = FlatSpace::torus(b1, b2);
    Rational best = b1.norm2();
    for (int i = -12; i <= 12; ++i) {
      for (int j = -12; j <= 12; ++j) {
        if (i == 0 && j == 0) continue;
        Rational l = (R(i) * b1 + R(j) * b2).norm2();
        if (l < best) best = l;
      }
    }
    ASSERT_EQ(shortest_vector(sp).length2, best);
    ASSERT_EQ(sp.covolume(), abs(cross(b1, b2)));
  }
}

TEST(Enumerate, UnitTorusExamples) {
  auto T = FlatSpace::unit_torus();
  auto a = enumerate_geodesics(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1));
  EXPECT_EQ(displacements(a),
            (std::set<Vec2>{V(R(1, 2), R(0)), V(R(-1, 2), R(0))}));
  auto b = enumerate_geodesics(T, V(R(0), R(0)), V(R(0), R(0)), R(1));
  EXPECT_EQ(displacements(b), (std::set<Vec2>{V(R(1), R(0)), V(R(-1), R(0)),
                                              V(R(0), R(1)), V(R(0), R(-1))}));
  EXPECT_TRUE(
      enumerate_geodesics(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1, 5)).empty());
}

TEST(Classify, Examples) {
  auto T = FlatSpace::unit_torus();
  auto segs = enumerate_geodesics(T, V(R(0), R(0)), V(R(0), R(0)), R(4));
  for (const auto& s : segs) {
    if (s.displacement == V(R(2), R(0))) {
      EXPECT_EQ(s.cls, SegmentClass::kPassesThroughEndpoint);
      ASSERT_EQ(s.endpoint_hits.size(), 1u);
      EXPECT_EQ(s.endpoint_hits[0], R(1, 2));
    }
    if (s.displacement == V(R(1), R(0))) {
      EXPECT_EQ(s.cls, SegmentClass::kConnecting);
      EXPECT_EQ(classify(T, s).cls, SegmentClass::kConnecting);
    }
  }
  EXPECT_EQ(to_string(SegmentClass::kPassesThroughEndpoint),
            "passes-through-endpoint");
}

TEST(Count, Examples) {
  auto T = FlatSpace::unit_torus();
  Counts a = count(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1));
  EXPECT_EQ(a.n, 2);
  EXPECT_EQ(a.m, 2);
  Counts b = count(T, V(R(0), R(0)), V(R(0), R(0)), R(1));
  EXPECT_EQ(b.n, 4);
  EXPECT_EQ(b.m, 4);
  Counts c = count(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1, 100));
  EXPECT_EQ(c.n, 0);
  EXPECT_EQ(c.m, 0);
}

TEST(Count, TranslationInvarianceAndWorkers) {
  auto T = FlatSpace::torus(V(R(1), R(0)), V(R(1, 3), R(5, 4)));
  Vec2 x = V(R(1, 7), R(2, 9)), y = V(R(3, 5), R(1, 11));
  Vec2 c = V(R(5, 13), R(-2, 3));
  Counts base = count(T, x, y, R(36));
  Counts moved = count(T, x + c, y + c, R(36));
  EXPECT_EQ(base.n, moved.n);
  EXPECT_EQ(base.m, moved.m);
  auto one = enumerate_geodesics(T, x, y, R(36), 1);
  auto four = enumerate_geodesics(T, x, y, R(36), 4);
  EXPECT_EQ(displacements(one), displacements(four));
  EXPECT_EQ(one.size(), four.size());
}

TEST(Count, BruteForceAgreement) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> d(-6, 6);
  std::uniform_int_distribution<int> p(0, 11);
  for (int it = 0; it < 40; ++it) {
    Vec2 b1 = V(R(d(rng), 2), R(d(rng), 3));
    Vec2 b2 = V(R(d(rng), 3), R(d(rng), 2));
    if (cross(b1, b2).is_zero()) continue;
    auto sp = FlatSpace::torus(b1, b2);
    Vec2 x = V(R(p(rng), 12), R(p(rng), 12));
    Vec2 y = V(R(p(rng), 12), R(p(rng), 12));
    Rational t2 = R(1 + p(rng) * 3);
    auto fast = enumerate_geodesics(sp, x, y, t2);
    // Coefficients of a vector of length <= t are bounded by t |b_j| / covol.
    double scale =
        std::sqrt(std::max(b1.norm2().to_double(), b2.norm2().to_double())) /
        sp.covolume().to_double();
    auto box = static_cast<std::int64_t>(
        std::ceil((std::sqrt(t2.to_double()) +
                   std::sqrt((y - x).norm2().to_double())) *
                  scale) +
        2);
    auto slow = enumerate_geodesics_bruteforce(sp, x, y, t2, box);
    ASSERT_EQ(displacements(fast), displacements(slow)) << sp.describe();
    std::int64_t m_slow = std::count_if(slow.begin(), slow.end(), [](auto& s) {
      return s.cls == SegmentClass::kConnecting;
    });
    ASSERT_EQ(count(sp, x, y, t2).m, m_slow);
  }
}

TEST(Count, GaussCircle) {
  auto T = FlatSpace::unit_torus();
  Counts c = count(T, V(R(0), R(0)), V(R(1, 3), R(1, 7)), R(2500));
  double ratio = c.n / (std::numbers::pi * 2500.0);
  EXPECT_NEAR(ratio, 1.0, 0.01);
}

TEST(Billiard, UnfoldingCounts) {
  auto B = FlatSpace::square_billiard();
  EXPECT_EQ(B.delta2(), R(1, 16));
  EXPECT_THROW(B.check_endpoint(V(R(0), R(1, 2))), UnsupportedInputError);
  EXPECT_THROW(count(B, V(R(1), R(1, 2)), V(R(1, 2), R(1, 2)), R(4)),
               UnsupportedInputError);
  // From the centre to itself: unfolded images are (2a+-1/2, 2b+-1/2)
  // minus the centre, so vectors (2a, 2b), (2a-1, 2b), ... with the
  // reflected ones of length 1 being (+-1, 0), (0, +-1).
  Vec2 c = V(R(1, 2), R(1, 2));
  auto segs = enumerate_geodesics(B, c, c, R(1));
  EXPECT_EQ(displacements(segs),
            (std::set<Vec2>{V(R(1), R(0)), V(R(-1), R(0)), V(R(0), R(1)),
                            V(R(0), R(-1))}));
  Vec2 x = V(R(1, 5), R(2, 7)), y = V(R(3, 4), R(1, 3));
  auto fast = enumerate_geodesics(B, x, y, R(30));
  auto slow = enumerate_geodesics_bruteforce(B, x, y, R(30), 20);
  EXPECT_EQ(displacements(fast), displacements(slow));
  EXPECT_EQ(fast.size(), slow.size());
}

TEST(Billiard, CornerTrajectoriesExcluded) {
  auto B = FlatSpace::square_billiard();
  // x and y on the diagonal: the direct diagonal segment is fine but the
  // extension to the reflected image through the corner (1,1) is not.
  Vec2 x = V(R(1, 4), R(1, 4)), y = V(R(1, 2), R(1, 2));
  for (const auto& s : enumerate_geodesics(B, x, y, R(16))) {
    for (int i = -4; i <= 4; ++i) {
      for (int j = -4; j <= 4; ++j) {
        Vec2 corner = V(R(i), R(j)) - x;
        if (!cross(s.displacement, corner).is_zero()) continue;
        Rational t = dot(corner, s.displacement) / s.length2;
        EXPECT_FALSE(t > R(0) && t < R(1)) << s.displacement.str();
      }
    }
  }
}

TEST(Count, SymmetricInEndpoints) {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> d(1, 5);
  std::uniform_int_distribution<int> p(0, 12);
  for (int it = 0; it < 20; ++it) {
    auto sp = FlatSpace::torus(V(R(d(rng)), R(0)), V(R(d(rng), 2), R(d(rng))));
    Vec2 x = V(R(p(rng), 13), R(p(rng), 13));
    Vec2 y = V(R(p(rng), 13), R(p(rng), 13));
    Rational t2 = R(4 + p(rng) * 2);
    Counts a = count(sp, x, y, t2);
    Counts b = count(sp, y, x, t2);
    EXPECT_EQ(a.n, b.n) << sp.describe();
    EXPECT_EQ(a.m, b.m) << sp.describe();
  }
}

TEST(Billiard, FourImagesOnDoubledTorus) {
  // Unfolding: billiard geodesics from x to y are torus geodesics on 2Z^2
  // from x to the four reflections of y, minus those through a corner.
  auto B = FlatSpace::square_billiard();
  auto T2 = FlatSpace::torus(V(R(2), R(0)), V(R(0), R(2)));
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> p(1, 10);
  for (int it = 0; it < 20; ++it) {
    Vec2 x = V(R(p(rng), 11), R(p(rng), 11));
    Vec2 y = V(R(p(rng), 11), R(p(rng), 11));
    Rational t2 = R(2 + p(rng));
    std::int64_t expected = 0;
    for (int sx : {1, -1}) {
      for (int sy : {1, -1}) {
        Vec2 img = T2.canonical(V(y.x * R(sx), y.y * R(sy)));
        for (const auto& s : enumerate_geodesics(T2, x, img, t2)) {
          bool corner = false;
          const int box = 8;
          for (int i = -box; i <= box && !corner; ++i) {
            for (int j = -box; j <= box && !corner; ++j) {
              Vec2 c = V(R(i), R(j)) - x;
              if (!cross(s.displacement, c).is_zero()) continue;
              Rational u = dot(c, s.displacement) / s.length2;
              corner = u > R(0) && u < R(1);
            }
          }
          if (!corner) ++expected;
        }
      }
    }
    EXPECT_EQ(count(B, x, y, t2).n, expected)
        << x.str() << " " << y.str() << " " << t2.str();
  }
}

TEST(PointOnGeodesic, Examples) {
  auto T = FlatSpace::unit_torus();
  auto a = enumerate_geodesics(T, V(R(0), R(0)), V(R(1, 2), R(0)), R(1));
  auto seg = *std::find_if(a.begin(), a.end(), [](auto& s) {
    return s.displacement == V(R(1, 2), R(0));
  });
  EXPECT_EQ(point_on_geodesic(T, V(R(1, 4), R(0)), seg),
            std::vector<Rational>{R(1, 2)});
  EXPECT_TRUE(point_on_geodesic(T, V(R(0), R(1, 2)), seg).empty());
  auto b = enumerate_geodesics(T, V(R(0), R(0)), V(R(0), R(0)), R(1));
  auto loop = *std::find_if(b.begin(), b.end(), [](auto& s) {
    return s.displacement == V(R(1), R(0));
  });
  EXPECT_EQ(point_on_geodesic(T, V(R(1, 2), R(0)), loop),
            std::vector<Rational>{R(1, 2)});
}

TEST(LineHits, ScaledSolve) {
  // s * (3, 0) - (1/2, 0) in Z^2 for s in (0, 1): s = 1/6, 1/2, 5/6.
  auto h = line_hits(V(R(3), R(0)), V(R(1, 2), R(0)));
  EXPECT_EQ(h, (std::vector<Rational>{R(1, 6), R(1, 2), R(5, 6)}));
  EXPECT_TRUE(line_hits(V(R(3), R(0)), V(R(1, 2), R(1, 3))).empty());
}

GeodesicSegment find_seg(const std::vector<GeodesicSegment>& segs, Vec2 v) {
  for (const auto& s : segs)
    if (s.displacement == v) return s;
  ADD_FAILURE() << "missing " << v.str();
  return {};
}

TEST(Intersection, Examples) {
  auto T = FlatSpace::unit_torus();
  Vec2 o = V(R(0), R(0));
  auto a = enumerate_geodesics(T, o, V(R(1, 2), R(0)), R(1));
  EXPECT_TRUE(intersection_candidates(T, find_seg(a, V(R(1, 2), R(0))),
                                      find_seg(a, V(R(-1, 2), R(0))))
                  .empty());
  auto b = enumerate_geodesics(T, o, o, R(2));
  EXPECT_TRUE(intersection_candidates(T, find_seg(b, V(R(1), R(0))),
                                      find_seg(b, V(R(0), R(1))))
                  .empty());
  auto c = intersection_candidates(T, find_seg(b, V(R(1), R(1))),
                                   find_seg(b, V(R(1), R(-1))));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].point, V(R(1, 2), R(1, 2)));
  EXPECT_EQ(c[0].s, R(1, 2));
  EXPECT_EQ(c[0].u, R(1, 2));
  EXPECT_FALSE(c[0].overlap);
}

TEST(Intersection, CandidatesLieOnBoth) {
  auto T = FlatSpace::torus(V(R(1), R(0)), V(R(1, 2), R(3, 4)));
  Vec2 x = V(R(1, 5), R(1, 3)), y = V(R(2, 3), R(1, 8));
  auto segs = enumerate_geodesics(T, x, y, R(9));
  ASSERT_GT(segs.size(), 4u);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      for (const auto& c : intersection_candidates(T, segs[i], segs[j])) {
        EXPECT_FALSE(point_on_geodesic(T, c.point, segs[i]).empty());
        EXPECT_FALSE(point_on_geodesic(T, c.point, segs[j]).empty());
      }
    }
  }
}

}  // namespace
}  // namespace geoblock::flat
