#ifndef DYNFPP_STATS_HPP
#define DYNFPP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dynfpp {

struct EstimatorResult {
  double estimate = 0;
  double std_error = 0;
  long n_samples = 0;
  double ci_lo = 0, ci_hi = 0;

  static EstimatorResult make(double est, double se, long n) { return {est, se, n, est - 1.96 * se, est + 1.96 * se}; }

  // sample mean; stderr is the sample standard deviation over sqrt(n)
  static EstimatorResult of_values(const std::vector<double>& xs) {
    long n = long(xs.size());
    if (n == 0) return {};
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= double(n);
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = n > 1 ? std::sqrt(ss / double(n - 1)) : 0;
    return make(mean, sd / std::sqrt(double(n)), n);
  }

  static EstimatorResult of_count(long hits, long n) {
    if (n == 0) return {};
    double p = double(hits) / double(n);
    double sd = n > 1 ? std::sqrt(p * (1 - p) * double(n) / double(n - 1)) : 0;
    return make(p, sd / std::sqrt(double(n)), n);
  }
};

// Runs fn(i) for i in [0, count) on up to `threads` workers.  Results land in
// slot i, so the outcome never depends on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(long count, int threads, Fn&& fn) {
  std::vector<T> out(std::size_t(std::max(count, 0L)));
  threads = std::max(1, std::min<int>(threads, int(std::max(count, 1L))));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) out[std::size_t(i)] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (long i = w; i < count; i += threads) out[std::size_t(i)] = fn(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

struct ExponentFit {
  double slope = 0, intercept = 0;
  double slope_se = 0;
  std::vector<double> scale;  // n grid
  std::vector<double> x, y, w;
  std::vector<double> residuals;
};

// Weighted least squares y = intercept + slope * x.
inline ExponentFit wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2) throw std::invalid_argument("wls: bad input");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double mx = sx / sw, my = sy / sw, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.slope_se = std::sqrt(1 / sxx);
  f.x = x;
  f.y = y;
  f.w = w;
  for (std::size_t i = 0; i < x.size(); ++i) f.residuals.push_back(y[i] - f.intercept - f.slope * x[i]);
  return f;
}

// Unweighted fit; the slope error comes from the residual scatter.
inline ExponentFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  auto f = wls(x, y, std::vector<double>(x.size(), 1.0));
  double rss = 0;
  for (double r : f.residuals) rss += r * r;
  f.slope_se = x.size() > 2 ? f.slope_se * std::sqrt(rss / double(x.size() - 2)) : 0;
  return f;
}

}  // namespace dynfpp

#endif
