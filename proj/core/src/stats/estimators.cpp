#include "regenlab/stats/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "regenlab/errors.hpp"

namespace regenlab::stats {

nlohmann::json TailFit::to_json() const {
  return {{"rate", rate}, {"intercept", intercept}, {"r_squared", r_squared},
          {"k_lo", k_lo}, {"k_hi", k_hi},           {"n", n_samples}};
}

nlohmann::json RateEstimate::to_json() const {
  return {{"rate", rate}, {"std_error", std_error}, {"ci_lo", lo}, {"ci_hi", hi}, {"n_cycles", n_cycles}};
}

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean: empty sample");
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance: need two points");
  const double m = mean(x);
  long double s = 0.0L;
  for (double v : x) s += (v - m) * (v - m);
  return static_cast<double>(s / static_cast<long double>(x.size() - 1));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

TailFit geometric_tail_fit(std::span<const std::int64_t> sample) {
  if (sample.size() < 1000) throw FitError("tail fit: need at least 1000 points");
  std::vector<std::int64_t> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  if (s.front() < 0) throw FitError("tail fit: negative value");
  const std::int64_t median = s[(s.size() - 1) / 2];
  auto exceed = [&](std::int64_t k) {
    return static_cast<std::size_t>(s.end() - std::upper_bound(s.begin(), s.end(), k));
  };
  if (exceed(median) < kMinTailExceedances) throw FitError("tail fit: fewer than 30 exceedances beyond the median");
  // Last threshold with at least 30 exceedances: the value 30 places from the top.
  const std::int64_t k_hi = s[s.size() - kMinTailExceedances] - 1;
  if (k_hi <= median) throw FitError("tail fit: tail range is a single point");
  const double n = static_cast<double>(s.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  double m = 0;
  for (std::int64_t k = median; k <= k_hi; ++k) {
    const double y = std::log(static_cast<double>(exceed(k)) / n);
    const double x = static_cast<double>(k);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    m += 1;
  }
  const double cov = sxy - sx * sy / m;
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  TailFit f;
  const double slope = cov / vx;
  f.rate = -slope;
  f.intercept = (sy - slope * sx) / m;
  f.r_squared = vy > 0 ? (cov * cov) / (vx * vy) : 1.0;
  f.k_lo = median;
  f.k_hi = k_hi;
  f.n_samples = s.size();
  return f;
}

RateEstimate renewal_reward(std::span<const double> gaps, std::span<const double> rewards, double level) {
  if (gaps.size() != rewards.size()) throw DomainError("renewal_reward: gaps and rewards differ in length");
  if (gaps.size() < 2) throw DomainError("renewal_reward: need at least two cycles");
  const double g = mean(gaps);
  if (!(g > 0.0)) throw DomainError("renewal_reward: mean gap is zero");
  const double r = mean(rewards);
  RateEstimate e;
  e.rate = r / g;
  long double s = 0.0L;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const long double d = rewards[i] - e.rate * gaps[i];
    s += d * d;
  }
  const double n = static_cast<double>(gaps.size());
  const double var_d = static_cast<double>(s) / (n - 1.0);
  e.std_error = std::sqrt(var_d / n) / g;
  const double z = normal_quantile(0.5 + level / 2.0);
  e.lo = e.rate - z * e.std_error;
  e.hi = e.rate + z * e.std_error;
  e.n_cycles = gaps.size();
  return e;
}

int Binning::bin_of(double x) const noexcept {
  if (!(hi > lo)) return 0;
  const double t = (x - lo) / (hi - lo) * bins;
  if (!(t >= 0.0)) return 0;
  return std::min(bins - 1, static_cast<int>(t));
}

Binning Binning::pooled(std::span<const double> a, std::span<const double> b, int bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : a) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : b) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) hi = lo + 1.0;
  return Binning{lo, hi, bins};
}

double tv_empirical(std::span<const double> a, std::span<const double> b, const Binning& binning) {
  if (a.empty() || b.empty()) throw DomainError("tv_empirical: empty sample");
  if (binning.bins < 1) throw DomainError("tv_empirical: need at least one bin");
  std::vector<double> ha(binning.bins, 0.0), hb(binning.bins, 0.0);
  for (double v : a) ha[binning.bin_of(v)] += 1.0;
  for (double v : b) hb[binning.bin_of(v)] += 1.0;
  double d = 0.0;
  for (int i = 0; i < binning.bins; ++i)
    d += std::abs(ha[i] / static_cast<double>(a.size()) - hb[i] / static_cast<double>(b.size()));
  return std::min(1.0, 0.5 * d);
}

double tv_empirical(std::span<const double> a, std::span<const double> b, int bins) {
  return tv_empirical(a, b, Binning::pooled(a, b, bins));
}

double tv_categorical(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("tv_categorical: empty sample");
  std::map<double, std::pair<double, double>> h;
  for (double v : a) h[v].first += 1.0;
  for (double v : b) h[v].second += 1.0;
  double d = 0.0;
  for (const auto& [v, c] : h)
    d += std::abs(c.first / static_cast<double>(a.size()) - c.second / static_cast<double>(b.size()));
  return std::min(1.0, 0.5 * d);
}

}  // namespace regenlab::stats
