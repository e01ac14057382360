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

#ifndef GEOBLOCK_GROWTH_HPP_
#define GEOBLOCK_GROWTH_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "geoblock/rational.hpp"

// Growth functions and the halving-product transform
//
//   F(t) = prod_{0 <= k < kappa(t)} f(t / 2^k),
//
// where kappa(t) is the least k with t / 2^k < delta. The transform turns a
// per-scale cost into the cost of a full dyadic refinement down to scale
// delta; it maps e^{at} to roughly e^{2at}, polynomials to t^{c log t}, and
// bounded functions to polynomials.
namespace geoblock::growth {

using BigRational = boost::multiprecision::cpp_rational;

struct TransformParams {
  explicit TransformParams(double delta);
  double delta;
};

// Least k >= 0 with t / 2^k < delta. Throws DomainError unless t, delta > 0.
int kappa(double t, const TransformParams& params);
int kappa(const BigRational& t, const BigRational& delta);
// Same index computed from squared quantities: least k with t2 < delta2 * 4^k.
int kappa_from_squares(const Rational& t2, const Rational& delta2);

// A positive function sampled on a strictly increasing grid. Evaluation
// between samples interpolates linearly in (t, log value).
class GrowthSeries {
 public:
  struct Sample {
    double t;
    double value;
  };

  GrowthSeries() = default;
  // Throws DomainError if t is not strictly increasing or a value is <= 0.
  explicit GrowthSeries(std::vector<Sample> samples, bool monotone = false);

  static GrowthSeries sample(const std::function<double(double)>& f,
                             const std::vector<double>& grid,
                             bool monotone = false);

  const std::vector<Sample>& samples() const { return samples_; }
  bool monotone() const { return monotone_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  double t_min() const { return samples_.front().t; }
  double t_max() const { return samples_.back().t; }

  // Throws RangeError outside [t_min, t_max] unless `extrapolate` is set, in
  // which case the end segments are extended in log-value.
  double log_value_at(double t, bool extrapolate = false) const;
  double value_at(double t, bool extrapolate = false) const;

  void write_csv(std::ostream& os) const;
  static GrowthSeries read_csv(std::istream& is);

 private:
  std::vector<Sample> samples_;
  bool monotone_ = false;
};

// log F(t), accumulated in log space so that e^{at} inputs do not overflow.
double log_transform(const std::function<double(double)>& f,
                     const TransformParams& params, double t,
                     std::optional<int> k_stop = std::nullopt);
double transform(const std::function<double(double)>& f,
                 const TransformParams& params, double t,
                 std::optional<int> k_stop = std::nullopt);
double transform(const GrowthSeries& f, const TransformParams& params, double t,
                 std::optional<int> k_stop = std::nullopt,
                 bool extrapolate = false);

// f(t) = coefficient * t^degree with rational data, transformed exactly.
struct ClosedForm {
  static ClosedForm constant(BigRational c) { return {std::move(c), 0}; }
  static ClosedForm linear(BigRational slope = 1) {
    return {std::move(slope), 1};
  }
  static ClosedForm monomial(BigRational c, int degree) {
    return {std::move(c), degree};
  }

  BigRational operator()(const BigRational& t) const;

  BigRational coefficient;
  int degree = 0;
};

BigRational transform_exact(const ClosedForm& f, const BigRational& t,
                            const BigRational& delta,
                            std::optional<int> k_stop = std::nullopt);

// Transform of a sampled series evaluated on its own grid (points below the
// transform's support, t < delta, map to the empty product 1).
GrowthSeries transform_series(const GrowthSeries& f,
                              const TransformParams& params,
                              const std::vector<double>& grid,
                              bool extrapolate = false);

enum class GrowthKind {
  kBounded,
  kPolynomial,
  kQuasiPolynomial,
  kExponential,
  kSuperExponential,
};

enum class RateMode { kExponential, kPolynomial, kQuasiPolynomial };

std::string to_string(GrowthKind kind);

struct GrowthClass {
  GrowthKind kind = GrowthKind::kBounded;
  // Rate, degree or (log t)^2 coefficient depending on kind; 0 if bounded.
  double parameter = 0.0;
  // Root-mean-square residual of the least-squares fit.
  double residual = 0.0;
  // Largest slope between consecutive tail samples (limsup proxy).
  double max_slope = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t window_samples = 0;

  nlohmann::json to_json() const;
};

// Least-squares slope of log f against t (exponential), log t (polynomial)
// or (log t)^2 (quasi-polynomial) over the top `window` fraction of the
// t-range. Needs at least 8 samples in the window.
GrowthClass rate_estimate(const GrowthSeries& f, RateMode mode,
                          double window = 0.5);

enum class BoundClaim {
  // f = O(e^{at})  =>  F = O(e^{(2a + eps) t}).
  kExponentialDoubling,
  // f = O(t^r)     =>  F = O(t^{alpha log2 t}), alpha = (2n + 1) / 2, n >= r.
  kQuasiPolynomial,
  // f bounded by M =>  F = O(t^{log2 M + eps}).
  kBoundedToPolynomial,
};

enum class EquivClaim {
  // g = O(f) => G = O(t^alpha F).
  kBigO,
  // g = o(f) => G = O(t^beta F) for every beta (probed at one beta).
  kLittleO,
  // f ~ g    => G = O(t^alpha F) and F = O(t^beta G).
  kEquivalent,
};

struct BoundCheckOptions {
  double epsilon = 0.1;
  // Largest admissible multiplicative constant.
  double constant_cap = 1e6;
  // Exponent probed for the little-o claim.
  double beta_probe = -1.0;
  double window = 0.5;
};

struct BoundReport {
  std::string claim;
  bool pass = false;
  // Smallest constant C with F <= C * envelope on the sampled range.
  double constant = 0.0;
  // Exponent or rate parameterising the envelope.
  double exponent = 0.0;
  // Measured rate/degree used to instantiate the claim.
  double measured = 0.0;
  std::optional<double> witness_t;
  std::string detail;

  nlohmann::json to_json() const;
};

// Throws RangeError if f and F do not share a t-range.
BoundReport bound_check(const GrowthSeries& f, const GrowthSeries& F,
                        BoundClaim claim, const TransformParams& params,
                        const BoundCheckOptions& opts = {});

BoundReport equiv_check(const GrowthSeries& f, const GrowthSeries& F,
                        const GrowthSeries& g, const GrowthSeries& G,
                        EquivClaim claim, const TransformParams& params,
                        const BoundCheckOptions& opts = {});

}  // namespace geoblock::growth

#endif  // GEOBLOCK_GROWTH_HPP_
