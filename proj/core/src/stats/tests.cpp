#include "regenlab/stats/tests.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "regenlab/core/counter_rng.hpp"
#include "regenlab/errors.hpp"

namespace regenlab::stats {

nlohmann::json TestReport::to_json() const {
  return {{"test", name},       {"statistic", statistic}, {"p_value", p_value},
          {"n", n_samples},     {"alpha", alpha},         {"reject", reject}};
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form converges faster near zero.
    const double y = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int k = 1; k < 40; k += 2) s += std::pow(y, k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  TestReport r;
  r.name = "ks_two_sample";
  r.alpha = alpha;
  r.statistic = ks_statistic(a, b);
  r.n_samples = a.size() + b.size();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double en = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * r.statistic);
  r.reject = r.p_value < alpha;
  return r;
}

namespace {

// Fenwick tree over ranks holding four running sums.
class Fenwick4 {
 public:
  explicit Fenwick4(std::size_t n) : t_(n + 1) {}
  void add(std::size_t i, const std::array<long double, 4>& v) {
    for (++i; i < t_.size(); i += i & (~i + 1))
      for (int k = 0; k < 4; ++k) t_[i][k] += v[k];
  }
  std::array<long double, 4> prefix(std::size_t i) const {  // ranks [0, i]
    std::array<long double, 4> s{};
    for (++i; i > 0; i -= i & (~i + 1))
      for (int k = 0; k < 4; ++k) s[k] += t_[i][k];
    return s;
  }

 private:
  std::vector<std::array<long double, 4>> t_;
};

// Row sums a_i = sum_j |x_i - x_j| for data given in sorted order.
std::vector<long double> abs_row_sums_sorted(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];
  std::vector<long double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long double xi = sorted[i];
    row[i] = xi * static_cast<long double>(i) - prefix[i] + (prefix[n] - prefix[i + 1]) -
             xi * static_cast<long double>(n - i - 1);
  }
  return row;
}

// Univariate distance-covariance machinery. Points are held sorted by x;
// y is attached through a permutation so that relabelling is cheap.
class FastDcov {
 public:
  FastDcov(std::span<const double> x, std::span<const double> y) : n_(x.size()) {
    std::vector<std::size_t> ox(n_);
    std::iota(ox.begin(), ox.end(), 0);
    std::stable_sort(ox.begin(), ox.end(), [&](auto i, auto j) { return x[i] < x[j]; });
    xs_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) xs_[i] = x[ox[i]];
    ax_ = abs_row_sums_sorted(xs_);
    sum_ax_ = std::accumulate(ax_.begin(), ax_.end(), 0.0L);

    std::vector<std::size_t> oy(n_);
    std::iota(oy.begin(), oy.end(), 0);
    std::stable_sort(oy.begin(), oy.end(), [&](auto i, auto j) { return y[i] < y[j]; });
    ys_sorted_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) ys_sorted_[i] = y[oy[i]];
    by_sorted_ = abs_row_sums_sorted(ys_sorted_);
    sum_by_ = std::accumulate(by_sorted_.begin(), by_sorted_.end(), 0.0L);
    // Tied y values share one rank so the prefix query "y_j <= y_i" sees all ties.
    rank_of_sorted_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      rank_of_sorted_[i] = (i > 0 && ys_sorted_[i] == ys_sorted_[i - 1]) ? rank_of_sorted_[i - 1] : i;
    // Identity pairing: point at x-position i carries y of original index ox[i].
    std::vector<std::size_t> ypos(n_);
    for (std::size_t i = 0; i < n_; ++i) ypos[oy[i]] = i;
    base_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) base_[i] = ypos[ox[i]];
  }

  const std::vector<std::size_t>& base() const noexcept { return base_; }

  // V-statistic dCov^2 with the y sample attached through pairing[i] = index
  // into the y-sorted arrays for the i-th smallest x.
  long double dcov2(const std::vector<std::size_t>& pairing) const {
    Fenwick4 fw(n_);
    std::array<long double, 4> total{};
    long double cross = 0.0L;  // sum_{j<i} |x_i - x_j| |y_i - y_j|
    long double ab = 0.0L;     // sum_i a_i b_i
    for (std::size_t i = 0; i < n_; ++i) {
      const long double xi = xs_[i];
      const std::size_t yi_pos = pairing[i];
      const long double yi = ys_sorted_[yi_pos];
      const auto le = fw.prefix(rank_of_sorted_[yi_pos]);
      auto term = [&](const std::array<long double, 4>& s) {
        // sum (x_i - x_j)(y_i - y_j) over the set summarized by s = (count, sum x, sum y, sum xy)
        return s[0] * xi * yi - xi * s[2] - yi * s[1] + s[3];
      };
      cross += 2.0L * term(le) - term(total);
      const std::array<long double, 4> v{1.0L, xi, yi, xi * yi};
      fw.add(rank_of_sorted_[yi_pos], v);
      for (int k = 0; k < 4; ++k) total[k] += v[k];
      ab += ax_[i] * by_sorted_[yi_pos];
    }
    const long double n = static_cast<long double>(n_);
    return 2.0L * cross / (n * n) - 2.0L * ab / (n * n * n) + (sum_ax_ / (n * n)) * (sum_by_ / (n * n));
  }

  long double dcov2_xx() const { return self_dcov2(xs_, ax_, sum_ax_); }
  long double dcov2_yy() const { return self_dcov2(ys_sorted_, by_sorted_, sum_by_); }

 private:
  long double self_dcov2(const std::vector<double>& s, const std::vector<long double>& row, long double total) const {
    // sum_{i,j} (s_i - s_j)^2 = 2n sum s^2 - 2 (sum s)^2
    long double s1 = 0.0L, s2 = 0.0L, rr = 0.0L;
    for (std::size_t i = 0; i < n_; ++i) {
      s1 += s[i];
      s2 += static_cast<long double>(s[i]) * s[i];
      rr += row[i] * row[i];
    }
    const long double n = static_cast<long double>(n_);
    const long double sq = 2.0L * n * s2 - 2.0L * s1 * s1;
    return sq / (n * n) - 2.0L * rr / (n * n * n) + (total / (n * n)) * (total / (n * n));
  }

  std::size_t n_;
  std::vector<double> xs_;
  std::vector<long double> ax_;
  long double sum_ax_ = 0.0L;
  std::vector<double> ys_sorted_;
  std::vector<long double> by_sorted_;
  long double sum_by_ = 0.0L;
  std::vector<std::size_t> rank_of_sorted_;
  std::vector<std::size_t> base_;
};

template <class T>
void shuffle(std::vector<T>& v, const core::CounterRng& rng, std::int64_t round) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t w = rng.word(round, static_cast<std::uint32_t>(i), core::Tag::kPermutation);
    const auto j = static_cast<std::size_t>(((w >> 32) * static_cast<std::uint64_t>(i)) >> 32);
    std::swap(v[i - 1], v[j]);
  }
}

void check_pairs(std::size_t nu, std::size_t nv, int permutations) {
  if (nu != nv) throw DomainError("permutation_independence: samples differ in length");
  if (nu < 2) throw DomainError("permutation_independence: need at least 2 pairs");
  if (permutations < 1) throw DomainError("permutation_independence: need at least one permutation");
}

double dcor_from(long double dxy, long double dxx, long double dyy) {
  if (dxx <= 0.0L || dyy <= 0.0L) return 0.0;
  const long double v = std::max(0.0L, dxy) / std::sqrt(dxx * dyy);
  return static_cast<double>(std::sqrt(v));
}

// Double-centred distance matrix, row-major.
std::vector<double> centred_distances(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k) {
        const double t = x[i][k] - x[j][k];
        s += t * t;
      }
      d[i * n + j] = std::sqrt(s);
    }
  std::vector<double> row(n, 0.0);
  double all = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[i] += d[i * n + j];
    all += row[i];
    row[i] /= static_cast<double>(n);
  }
  all /= static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] += all - row[i] - row[j];
  return d;
}

double inner(const std::vector<double>& a, const std::vector<double>& b, const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * b[perm[i] * n + perm[j]];
  return static_cast<double>(s / (static_cast<long double>(n) * n));
}

}  // namespace

double distance_correlation(std::span<const double> x, std::span<const double> y) {
  check_pairs(x.size(), y.size(), 1);
  FastDcov d(x, y);
  return dcor_from(d.dcov2(d.base()), d.dcov2_xx(), d.dcov2_yy());
}

double distance_correlation(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y) {
  check_pairs(x.size(), y.size(), 1);
  const auto a = centred_distances(x);
  const auto b = centred_distances(y);
  std::vector<std::size_t> id(x.size());
  std::iota(id.begin(), id.end(), 0);
  return dcor_from(inner(a, b, id), inner(a, a, id), inner(b, b, id));
}

TestReport permutation_independence(std::span<const double> u, std::span<const double> v, int permutations,
                                    std::uint64_t seed, double alpha) {
  check_pairs(u.size(), v.size(), permutations);
  FastDcov d(u, v);
  const long double observed = d.dcov2(d.base());
  const long double tol = 1e-12L * std::max(1.0L, std::abs(observed));
  const core::CounterRng rng(seed);
  auto pairing = d.base();
  int at_least = 0;
  for (int b = 0; b < permutations; ++b) {
    shuffle(pairing, rng, b);
    if (d.dcov2(pairing) >= observed - tol) ++at_least;
  }
  TestReport r;
  r.name = "permutation_dcor";
  r.statistic = dcor_from(observed, d.dcov2_xx(), d.dcov2_yy());
  r.p_value = (1.0 + at_least) / (1.0 + permutations);
  r.n_samples = u.size();
  r.alpha = alpha;
  r.reject = r.p_value < alpha;
  return r;
}

TestReport permutation_independence(const std::vector<std::vector<double>>& u,
                                    const std::vector<std::vector<double>>& v, int permutations, std::uint64_t seed,
                                    double alpha) {
  check_pairs(u.size(), v.size(), permutations);
  const auto a = centred_distances(u);
  const auto b = centred_distances(v);
  std::vector<std::size_t> perm(u.size());
  std::iota(perm.begin(), perm.end(), 0);
  const double observed = inner(a, b, perm);
  const double tol = 1e-12 * std::max(1.0, std::abs(observed));
  const double axx = inner(a, a, perm);
  const double byy = inner(b, b, perm);
  const core::CounterRng rng(seed);
  int at_least = 0;
  for (int k = 0; k < permutations; ++k) {
    shuffle(perm, rng, k);
    if (inner(a, b, perm) >= observed - tol) ++at_least;
  }
  TestReport r;
  r.name = "permutation_dcor";
  r.statistic = dcor_from(observed, axx, byy);
  r.p_value = (1.0 + at_least) / (1.0 + permutations);
  r.n_samples = u.size();
  r.alpha = alpha;
  r.reject = r.p_value < alpha;
  return r;
}

TestReport chi_square_gof(std::span<const double> counts, std::span<const double> probs, double alpha,
                          double min_expected) {
  if (counts.size() != probs.size() || counts.empty()) throw DomainError("chi_square_gof: size mismatch");
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(n > 0.0)) throw DomainError("chi_square_gof: no observations");
  double stat = 0.0;
  int cells = 0;
  double obs = 0.0, expct = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs += counts[i];
    expct += n * probs[i];
    const bool last = i + 1 == counts.size();
    if (expct >= min_expected || last) {
      if (expct > 0.0) {
        stat += (obs - expct) * (obs - expct) / expct;
        ++cells;
      } else if (obs > 0.0) {
        stat = std::numeric_limits<double>::infinity();
        ++cells;
      }
      obs = expct = 0.0;
    }
  }
  TestReport r;
  r.name = "chi_square_gof";
  r.statistic = stat;
  r.n_samples = static_cast<std::size_t>(n);
  r.alpha = alpha;
  if (cells < 2) {
    r.p_value = 1.0;
  } else if (!std::isfinite(stat)) {
    r.p_value = 0.0;
  } else {
    boost::math::chi_squared dist(cells - 1);
    r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  }
  r.reject = r.p_value < alpha;
  return r;
}

}  // namespace regenlab::stats
