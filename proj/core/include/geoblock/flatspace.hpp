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

#ifndef GEOBLOCK_FLATSPACE_HPP_
#define GEOBLOCK_FLATSPACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoblock/rational.hpp"

// Exact connecting-geodesic enumeration on flat 2-tori and on the unit-square
// billiard table.
//
// Both geometries are handled through one lattice model. A torus R^2 / L is
// used directly. The unit square is unfolded into the 2x2 torus R^2 / (2Z)^2:
// a billiard trajectory from x to y is a straight segment from x to one of the
// four mirror images (+-y1, +-y2) of y, and a table point z is hit whenever the
// segment meets one of the four images of z modulo (2Z)^2. All incidence
// questions then reduce to "s c - e in Z^2" in lattice coordinates.
namespace geoblock::flat {

struct Vec2 {
  Rational x;
  Rational y;

  friend Vec2 operator+(const Vec2& a, const Vec2& b) {
    return {a.x + b.x, a.y + b.y};
  }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) {
    return {a.x - b.x, a.y - b.y};
  }
  friend Vec2 operator*(const Rational& s, const Vec2& v) {
    return {s * v.x, s * v.y};
  }
  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend auto operator<=>(const Vec2&, const Vec2&) = default;

  Rational norm2() const { return x * x + y * y; }
  std::string str() const { return "(" + x.str() + ", " + y.str() + ")"; }
};

using RationalPoint = Vec2;

inline Rational dot(const Vec2& a, const Vec2& b) {
  return a.x * b.x + a.y * b.y;
}
inline Rational cross(const Vec2& a, const Vec2& b) {
  return a.x * b.y - a.y * b.x;
}

enum class SpaceKind { kTorus, kSquareBilliard };

struct ShortestVector {
  Vec2 vector;
  Rational length2;
};

class FlatSpace {
 public:
  // Throws DomainError if b1, b2 are linearly dependent.
  static FlatSpace torus(const Vec2& b1, const Vec2& b2);
  static FlatSpace unit_torus();
  static FlatSpace square_billiard();

  SpaceKind kind() const { return kind_; }
  bool is_torus() const { return kind_ == SpaceKind::kTorus; }

  // Basis as given (torus) or the unfolding lattice 2Z^2 (billiard).
  const Vec2& b1() const { return input_b1_; }
  const Vec2& b2() const { return input_b2_; }
  // Lagrange-reduced basis of the same lattice; used for all lattice
  // coordinates below.
  const Vec2& reduced_b1() const { return r1_; }
  const Vec2& reduced_b2() const { return r2_; }

  Rational covolume() const;
  Rational shortest_length2() const { return shortest_.length2; }
  // Squared injectivity radius: shortest^2 / 4 on a torus, 1/16 on the
  // billiard table.
  Rational delta2() const { return delta2_; }
  double delta() const;

  Vec2 to_lattice(const Vec2& ambient) const;
  Vec2 to_ambient(const Vec2& lattice) const;

  // Mirror images of a point of the space inside one cell of the lattice
  // model: {p} on a torus, {(+-p.x, +-p.y)} on the billiard table.
  std::vector<Vec2> images(const Vec2& p) const;

  // Canonical representative of the point of the space covered by an
  // ambient (unfolded) point: reduced into the fundamental parallelogram of
  // the reduced basis (torus) or folded into [0, 1]^2 (billiard).
  Vec2 canonical(const Vec2& ambient) const;
  bool same_point(const Vec2& a, const Vec2& b) const {
    return canonical(a) == canonical(b);
  }

  // Throws UnsupportedInputError for billiard points outside the open square.
  void check_endpoint(const Vec2& p) const;

  std::string describe() const;

 private:
  FlatSpace() = default;
  void finish();

  SpaceKind kind_ = SpaceKind::kTorus;
  Vec2 input_b1_, input_b2_;
  Vec2 r1_, r2_;
  // Rows of the inverse of the reduced basis matrix.
  Vec2 inv_row1_, inv_row2_;
  ShortestVector shortest_;
  Rational delta2_;
};

// Shortest nonzero vector of the torus lattice, found by Lagrange reduction
// and certified against a scan of the reduced basis' neighbourhood.
// Throws DomainError for the billiard table.
ShortestVector shortest_vector(const FlatSpace& space);

enum class SegmentClass { kConnecting, kPassesThroughEndpoint };

std::string to_string(SegmentClass c);

struct GeodesicSegment {
  Vec2 source;
  Vec2 target;
  // Ambient displacement; the segment is source + s * displacement, s in
  // [0, 1], in the unfolded plane.
  Vec2 displacement;
  // Displacement in reduced-lattice coordinates.
  Vec2 lattice_displacement;
  Rational length2;
  // Billiard image index: the unfolded target is
  // (sigma1 * y.x + 2m, sigma2 * y.y + 2n). Unused on a torus.
  int sigma1 = 1;
  int sigma2 = 1;
  std::int64_t m = 0;
  std::int64_t n = 0;
  SegmentClass cls = SegmentClass::kConnecting;
  // Interior parameters at which the segment meets x or y.
  std::vector<Rational> endpoint_hits;
};

// All s in (lo, hi) with s * c - e in Z^2. `c` must be nonzero.
std::vector<Rational> line_hits(const Vec2& c, const Vec2& e,
                                const Rational& lo = Rational(0),
                                const Rational& hi = Rational(1));

// Every geodesic from x to y of squared length in (0, t2], sorted by
// displacement. Billiard segments whose interior meets a corner image are
// dropped. `workers` splits the lattice scan; output does not depend on it.
std::vector<GeodesicSegment> enumerate_geodesics(const FlatSpace& space,
                                                 const Vec2& x, const Vec2& y,
                                                 const Rational& t2,
                                                 int workers = 1);

// Brute-force reference scan over a coefficient box in the input basis.
std::vector<GeodesicSegment> enumerate_geodesics_bruteforce(
    const FlatSpace& space, const Vec2& x, const Vec2& y, const Rational& t2,
    std::int64_t box);

struct Classification {
  SegmentClass cls;
  std::vector<Rational> parameters;
};

Classification classify(const FlatSpace& space, const GeodesicSegment& seg);

struct Counts {
  std::int64_t n = 0;
  std::int64_t m = 0;
};

Counts count(const FlatSpace& space, const Vec2& x, const Vec2& y,
             const Rational& t2, int workers = 1);

// Connecting geodesics only (the family Gamma_t).
std::vector<GeodesicSegment> connecting_geodesics(const FlatSpace& space,
                                                  const Vec2& x, const Vec2& y,
                                                  const Rational& t2,
                                                  int workers = 1);

// Interior parameters s in (0, 1) at which `seg` passes through z.
std::vector<Rational> point_on_geodesic(const FlatSpace& space, const Vec2& z,
                                        const GeodesicSegment& seg);

struct IntersectionCandidate {
  Vec2 point;  // canonical
  Rational s;  // parameter on the first segment
  Rational u;  // parameter on the second segment
  bool overlap = false;
  // Maximal open overlap interval on the first segment (overlap only).
  Rational s_lo;
  Rational s_hi;
};

// Points interior to both segments (which share their source). Parallel
// carriers that overlap yield one representative per maximal interval.
std::vector<IntersectionCandidate> intersection_candidates(
    const FlatSpace& space, const GeodesicSegment& a, const GeodesicSegment& b);

// Exports a family as CSV `vx,vy,len2,class`.
void write_family_csv(std::ostream& os,
                      const std::vector<GeodesicSegment>& family);

}  // namespace geoblock::flat

#endif  // GEOBLOCK_FLATSPACE_HPP_
