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

#include "geoblock/growth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "geoblock/errors.hpp"

namespace geoblock::growth {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(
        fmt::format("{} must be positive and finite, got {}", what, v));
  }
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

double mode_abscissa(RateMode mode, double t) {
  switch (mode) {
    case RateMode::kExponential:
      return t;
    case RateMode::kPolynomial:
      return std::log(t);
    case RateMode::kQuasiPolynomial: {
      double l = std::log(t);
      return l * l;
    }
  }
  return t;
}

GrowthKind mode_kind(RateMode mode) {
  switch (mode) {
    case RateMode::kExponential:
      return GrowthKind::kExponential;
    case RateMode::kPolynomial:
      return GrowthKind::kPolynomial;
    case RateMode::kQuasiPolynomial:
      return GrowthKind::kQuasiPolynomial;
  }
  return GrowthKind::kBounded;
}

std::pair<double, double> shared_range(const GrowthSeries& a,
                                       const GrowthSeries& b) {
  if (a.empty() || b.empty()) throw RangeError("empty growth series");
  double lo = std::max(a.t_min(), b.t_min());
  double hi = std::min(a.t_max(), b.t_max());
  if (lo > hi) {
    throw RangeError(
        fmt::format("series do not share a t-range ([{}, {}] vs [{}, {}])",
                    a.t_min(), a.t_max(), b.t_min(), b.t_max()));
  }
  return {lo, hi};
}

// max over F's samples in [lo, hi] of log F(t) - log_envelope(t).
template <typename Envelope>
std::pair<double, double> max_log_ratio(const GrowthSeries& F, double lo,
                                        double hi, Envelope log_envelope) {
  double best = -std::numeric_limits<double>::infinity();
  double at = lo;
  for (const auto& s : F.samples()) {
    if (s.t < lo || s.t > hi) continue;
    double r = std::log(s.value) - log_envelope(s.t);
    if (r > best) {
      best = r;
      at = s.t;
    }
  }
  return {best, at};
}

std::vector<double> union_grid(const GrowthSeries& a, const GrowthSeries& b,
                               double lo, double hi) {
  std::vector<double> grid;
  for (const auto& s : a.samples())
    if (s.t >= lo && s.t <= hi) grid.push_back(s.t);
  for (const auto& s : b.samples())
    if (s.t >= lo && s.t <= hi) grid.push_back(s.t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

TransformParams::TransformParams(double d) : delta(d) {
  require_positive(d, "delta");
}

int kappa(double t, const TransformParams& params) {
  require_positive(t, "t");
  int k = 0;
  while (std::ldexp(t, -k) >= params.delta) ++k;
  return k;
}

int kappa(const BigRational& t, const BigRational& delta) {
  if (t <= 0 || delta <= 0) throw DomainError("kappa needs t, delta > 0");
  int k = 0;
  BigRational x = t;
  while (x >= delta) {
    x /= 2;
    ++k;
  }
  return k;
}

int kappa_from_squares(const Rational& t2, const Rational& delta2) {
  if (t2.sign() <= 0 || delta2.sign() <= 0) {
    throw DomainError("kappa needs t, delta > 0");
  }
  int k = 0;
  Rational x = t2;
  while (x >= delta2) {
    x /= Rational(4);
    ++k;
  }
  return k;
}

GrowthSeries::GrowthSeries(std::vector<Sample> samples, bool monotone)
    : samples_(std::move(samples)), monotone_(monotone) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.value > 0.0) || !std::isfinite(s.value)) {
      throw DomainError(
          fmt::format("series value at t={} must be positive", s.t));
    }
    if (!(s.t > 0.0)) throw DomainError("series t must be positive");
    if (i > 0 && !(s.t > samples_[i - 1].t)) {
      throw DomainError("series t values must be strictly increasing");
    }
    if (monotone_ && i > 0 && s.value < samples_[i - 1].value) {
      throw DomainError(
          fmt::format("series flagged monotone decreases at t={}", s.t));
    }
  }
}

GrowthSeries GrowthSeries::sample(const std::function<double(double)>& f,
                                  const std::vector<double>& grid,
                                  bool monotone) {
  std::vector<Sample> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back({t, f(t)});
  return GrowthSeries(std::move(out), monotone);
}

double GrowthSeries::log_value_at(double t, bool extrapolate) const {
  if (samples_.empty()) throw RangeError("empty growth series");
  if (samples_.size() == 1) {
    if (t == samples_.front().t || extrapolate) {
      return std::log(samples_.front().value);
    }
    throw RangeError(fmt::format("t={} outside single-sample series", t));
  }
  if ((t < t_min() || t > t_max()) && !extrapolate) {
    throw RangeError(fmt::format("t={} outside sampled range [{}, {}]", t,
                                 t_min(), t_max()));
  }
  auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                             [](const Sample& s, double v) { return s.t < v; });
  std::size_t hi;
  if (it == samples_.begin()) {
    hi = 1;
  } else if (it == samples_.end()) {
    hi = samples_.size() - 1;
  } else {
    if (it->t == t) return std::log(it->value);
    hi = static_cast<std::size_t>(it - samples_.begin());
  }
  const Sample& a = samples_[hi - 1];
  const Sample& b = samples_[hi];
  double la = std::log(a.value), lb = std::log(b.value);
  double w = (t - a.t) / (b.t - a.t);
  return la + w * (lb - la);
}

double GrowthSeries::value_at(double t, bool extrapolate) const {
  return std::exp(log_value_at(t, extrapolate));
}

void GrowthSeries::write_csv(std::ostream& os) const {
  os << "t,value\n";
  for (const auto& s : samples_) {
    os << fmt::format("{:.12g},{:.12g}\n", s.t, s.value);
  }
}

GrowthSeries GrowthSeries::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw RangeError("empty CSV");
  std::vector<Sample> samples;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("malformed CSV row: " + line);
    }
    samples.push_back(
        {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return GrowthSeries(std::move(samples));
}

double log_transform(const std::function<double(double)>& f,
                     const TransformParams& params, double t,
                     std::optional<int> k_stop) {
  int K = k_stop ? *k_stop : kappa(t, params);
  if (K < 0) throw DomainError("k_stop must be non-negative");
  double acc = 0.0;
  for (int k = 0; k < K; ++k) {
    double v = f(std::ldexp(t, -k));
    if (!(v > 0.0)) {
      throw DomainError(
          fmt::format("f must be positive; f({}) = {}", std::ldexp(t, -k), v));
    }
    acc += std::log(v);
  }
  return acc;
}

double transform(const std::function<double(double)>& f,
                 const TransformParams& params, double t,
                 std::optional<int> k_stop) {
  int K = k_stop ? *k_stop : kappa(t, params);
  if (K < 0) throw DomainError("k_stop must be non-negative");
  double acc = 1.0;
  for (int k = 0; k < K; ++k) acc *= f(std::ldexp(t, -k));
  return acc;
}

double transform(const GrowthSeries& f, const TransformParams& params, double t,
                 std::optional<int> k_stop, bool extrapolate) {
  return std::exp(log_transform(
      [&](double x) { return f.value_at(x, extrapolate); }, params, t, k_stop));
}

BigRational ClosedForm::operator()(const BigRational& t) const {
  BigRational v = coefficient;
  for (int i = 0; i < degree; ++i) v *= t;
  return v;
}

BigRational transform_exact(const ClosedForm& f, const BigRational& t,
                            const BigRational& delta,
                            std::optional<int> k_stop) {
  int K = k_stop ? *k_stop : kappa(t, delta);
  BigRational acc = 1;
  BigRational x = t;
  for (int k = 0; k < K; ++k) {
    acc *= f(x);
    x /= 2;
  }
  return acc;
}

GrowthSeries transform_series(const GrowthSeries& f,
                              const TransformParams& params,
                              const std::vector<double>& grid,
                              bool extrapolate) {
  std::vector<GrowthSeries::Sample> out;
  out.reserve(grid.size());
  for (double t : grid) {
    out.push_back({t, transform(f, params, t, std::nullopt, extrapolate)});
  }
  return GrowthSeries(std::move(out));
}

std::string to_string(GrowthKind kind) {
  switch (kind) {
    case GrowthKind::kBounded:
      return "bounded";
    case GrowthKind::kPolynomial:
      return "polynomial";
    case GrowthKind::kQuasiPolynomial:
      return "quasi-polynomial";
    case GrowthKind::kExponential:
      return "exponential";
    case GrowthKind::kSuperExponential:
      return "super-exponential";
  }
  return "unknown";
}

nlohmann::json GrowthClass::to_json() const {
  return {{"kind", to_string(kind)},
          {"parameter", parameter},
          {"residual", residual},
          {"window", {window_lo, window_hi}}};
}

GrowthClass rate_estimate(const GrowthSeries& f, RateMode mode, double window) {
  if (!(window > 0.0 && window <= 1.0)) {
    throw DomainError("rate window must lie in (0, 1]");
  }
  if (f.empty()) throw InsufficientDataError("empty series");
  double lo = f.t_max() - window * (f.t_max() - f.t_min());
  std::vector<double> x, y;
  for (const auto& s : f.samples()) {
    if (s.t < lo) continue;
    x.push_back(mode_abscissa(mode, s.t));
    y.push_back(std::log(s.value));
  }
  if (x.size() < 8) {
    throw InsufficientDataError(fmt::format(
        "rate estimate needs >= 8 samples in window, have {}", x.size()));
  }
  LineFit fit = least_squares(x, y);
  double max_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[i - 1]) {
      max_slope = std::max(max_slope, (y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    }
  }

  GrowthClass out;
  out.window_lo = lo;
  out.window_hi = f.t_max();
  out.window_samples = x.size();
  out.residual = fit.rms;
  out.max_slope = max_slope;
  constexpr double kFlat = 1e-12;
  if (std::abs(fit.slope) <= kFlat && max_slope <= kFlat) {
    out.kind = GrowthKind::kBounded;
    out.parameter = 0.0;
  } else {
    out.kind = mode_kind(mode);
    out.parameter = std::max(0.0, fit.slope);
  }
  return out;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j = {{"claim", claim},       {"pass", pass},
                      {"constant", constant}, {"exponent", exponent},
                      {"measured", measured}, {"detail", detail}};
  j["witness_t"] = witness_t ? nlohmann::json(*witness_t) : nlohmann::json();
  return j;
}

BoundReport bound_check(const GrowthSeries& f, const GrowthSeries& F,
                        BoundClaim claim, const TransformParams& params,
                        const BoundCheckOptions& opts) {
  auto [lo, hi] = shared_range(f, F);
  BoundReport rep;
  const double log_cap = std::log(opts.constant_cap);

  switch (claim) {
    case BoundClaim::kExponentialDoubling: {
      rep.claim = "exponential-doubling";
      double a =
          rate_estimate(f, RateMode::kExponential, opts.window).parameter;
      double rate_F =
          rate_estimate(F, RateMode::kExponential, opts.window).parameter;
      rep.measured = rate_F;
      rep.exponent = 2 * a + opts.epsilon;
      auto [lr, at] =
          max_log_ratio(F, lo, hi, [&](double t) { return rep.exponent * t; });
      rep.constant = std::exp(lr);
      rep.pass = lr <= log_cap && rate_F <= rep.exponent;
      if (!rep.pass) rep.witness_t = at;
      rep.detail = fmt::format("rate(f)={:.6g} rate(F)={:.6g} bound={:.6g}", a,
                               rate_F, rep.exponent);
      break;
    }
    case BoundClaim::kQuasiPolynomial: {
      rep.claim = "quasi-polynomial";
      double r = rate_estimate(f, RateMode::kPolynomial, opts.window).parameter;
      double n = std::max(0.0, std::ceil(r - 1e-6));
      rep.measured = r;
      rep.exponent = (2 * n + 1) / 2;
      auto [lr, at] = max_log_ratio(F, lo, hi, [&](double t) {
        return rep.exponent * std::log2(t) * std::log(t);
      });
      rep.constant = std::exp(lr);
      rep.pass = lr <= log_cap;
      if (!rep.pass) rep.witness_t = at;
      rep.detail =
          fmt::format("degree(f)={:.6g} alpha={:.6g}", r, rep.exponent);
      break;
    }
    case BoundClaim::kBoundedToPolynomial: {
      rep.claim = "bounded-to-polynomial";
      double M = 0;
      for (const auto& s : f.samples()) M = std::max(M, s.value);
      rep.measured = M;
      rep.exponent = std::log2(std::max(M, 1.0)) + opts.epsilon;
      auto [lr, at] = max_log_ratio(
          F, lo, hi, [&](double t) { return rep.exponent * std::log(t); });
      rep.constant = std::exp(lr);
      rep.pass = lr <= log_cap;
      if (!rep.pass) rep.witness_t = at;
      rep.detail = fmt::format("sup f={:.6g} degree={:.6g}", M, rep.exponent);
      break;
    }
  }
  (void)params;
  return rep;
}

namespace {

// G/F <= C^kappa(t) <= C (t/delta)^{log2 C} whenever g <= C f and C >= 1.
BoundReport big_o_direction(const GrowthSeries& f, const GrowthSeries& F,
                            const GrowthSeries& g, const GrowthSeries& G,
                            const TransformParams& params,
                            const BoundCheckOptions& opts) {
  auto [lo, hi] = shared_range(f, g);
  double C = 0;
  for (double t : union_grid(f, g, lo, hi)) {
    C = std::max(C, g.value_at(t) / f.value_at(t));
  }
  C = std::max(C, 1.0);
  BoundReport rep;
  rep.measured = C;
  rep.exponent = std::log2(C);
  double predicted = C * std::pow(params.delta, -rep.exponent);
  auto [glo, ghi] = shared_range(F, G);
  double worst = 0;
  for (double t : union_grid(F, G, glo, ghi)) {
    double ratio = G.value_at(t) / F.value_at(t) / std::pow(t, rep.exponent);
    if (ratio > worst) {
      worst = ratio;
      if (ratio > predicted * (1 + 1e-9)) rep.witness_t = t;
    }
  }
  rep.constant = worst;
  rep.pass = !rep.witness_t && worst <= opts.constant_cap;
  rep.detail = fmt::format("sup g/f={:.6g} alpha={:.6g} C={:.6g} (<= {:.6g})",
                           C, rep.exponent, worst, predicted);
  return rep;
}

}  // namespace

BoundReport equiv_check(const GrowthSeries& f, const GrowthSeries& F,
                        const GrowthSeries& g, const GrowthSeries& G,
                        EquivClaim claim, const TransformParams& params,
                        const BoundCheckOptions& opts) {
  switch (claim) {
    case EquivClaim::kBigO: {
      BoundReport rep = big_o_direction(f, F, g, G, params, opts);
      rep.claim = "equiv-big-o";
      return rep;
    }
    case EquivClaim::kLittleO: {
      auto [lo, hi] = shared_range(F, G);
      std::vector<GrowthSeries::Sample> ratio;
      for (double t : union_grid(F, G, lo, hi)) {
        ratio.push_back({t, G.value_at(t) / F.value_at(t)});
      }
      BoundReport rep;
      rep.claim = "equiv-little-o";
      double lo_w = hi - opts.window * (hi - lo);
      std::vector<double> x, y;
      for (const auto& s : ratio) {
        if (s.t < lo_w || s.t <= 1.0) continue;
        x.push_back(std::log(s.t));
        y.push_back(std::log(s.value));
      }
      if (x.size() < 8) {
        throw InsufficientDataError("little-o check needs >= 8 tail samples");
      }
      LineFit fit = least_squares(x, y);
      rep.measured = fit.slope;
      rep.exponent = opts.beta_probe;
      rep.pass = fit.slope <= opts.beta_probe;
      if (!rep.pass) rep.witness_t = ratio.back().t;
      rep.detail =
          fmt::format("tail slope of log(G/F) vs log t = {:.6g}", fit.slope);
      return rep;
    }
    case EquivClaim::kEquivalent: {
      BoundReport a = big_o_direction(f, F, g, G, params, opts);
      BoundReport b = big_o_direction(g, G, f, F, params, opts);
      BoundReport rep = a;
      rep.claim = "equiv-sim";
      rep.pass = a.pass && b.pass;
      if (!a.pass) {
        rep.witness_t = a.witness_t;
      } else if (!b.pass) {
        rep.witness_t = b.witness_t;
      }
      rep.detail = "G vs F: " + a.detail + "; F vs G: " + b.detail;
      return rep;
    }
  }
  return {};
}

}  // namespace geoblock::growth
