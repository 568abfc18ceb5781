#ifndef DYNFPP_EXPERIMENTS_HPP
#define DYNFPP_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "dynamics.hpp"
#include "fpp.hpp"
#include "lattice.hpp"
#include "percolation.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace dynfpp {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kMaxFieldVertices = std::int64_t(1) << 26;

inline void check_budget(std::int64_t vertices, const char* what) {
  if (vertices > kMaxFieldVertices)
    throw BudgetExceeded(std::string(what) + ": " + std::to_string(vertices) + " vertices exceeds the per-field budget");
}

inline Rect box_rect(int n) { return {-n, n, -n, n}; }

// ---------------------------------------------------------------------------
// Crossings

// min over left-right paths of the largest label on the path: the rectangle
// has an open crossing at level p exactly when this is <= p.
inline double crossing_threshold(const Rect& q, std::uint64_t seed) {
  Grid g(q);
  thread_local std::vector<double> best, label;
  thread_local std::vector<std::uint32_t> stamp;
  thread_local std::uint32_t cur = 0;
  if (best.size() < g.size()) {
    best.assign(g.size(), 0);
    label.assign(g.size(), 0);
    stamp.assign(g.size(), 0);
    cur = 0;
  }
  if (++cur == 0) {
    std::fill(stamp.begin(), stamp.end(), 0);
    cur = 1;
  }
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  auto touch = [&](int p) {
    if (stamp[std::size_t(p)] != cur) {
      stamp[std::size_t(p)] = cur;
      label[std::size_t(p)] = label_of(seed, g.at(p));
      best[std::size_t(p)] = kInf;
    }
  };
  for (int y = 0; y < g.H; ++y) {
    int p = y * g.W;
    touch(p);
    best[std::size_t(p)] = label[std::size_t(p)];
    heap.push({best[std::size_t(p)], p});
  }
  while (!heap.empty()) {
    auto [k, u] = heap.top();
    heap.pop();
    if (k > best[std::size_t(u)]) continue;
    if (u % g.W == g.W - 1) return k;
    g.for_each_neighbor(u, [&](int v) {
      touch(v);
      double nk = std::max(k, label[std::size_t(v)]);
      if (nk < best[std::size_t(v)]) {
        best[std::size_t(v)] = nk;
        heap.push({nk, v});
      }
    });
  }
  return 1.0;
}

// Sorted crossing thresholds of B(n) per n, computed once and reused for
// every p.  Sample i of size n uses seed derive_seed(seed, i, n).
class CrossingSampler {
 public:
  CrossingSampler(long samples, std::uint64_t seed, int threads = 1) : samples_(samples), seed_(seed), threads_(threads) {
    if (samples < 1) throw std::invalid_argument("CrossingSampler: samples < 1");
  }

  const std::vector<double>& thresholds(int n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    check_budget(box_rect(n).area(), "crossing");
    auto ts = parallel_map<double>(samples_, threads_, [&](long i) {
      return crossing_threshold(box_rect(n), derive_seed(seed_, std::uint64_t(i), std::uint64_t(n)));
    });
    std::sort(ts.begin(), ts.end());
    return cache_.emplace(n, std::move(ts)).first->second;
  }

  EstimatorResult prob(int n, double p) {
    auto& ts = thresholds(n);
    long hits = long(std::upper_bound(ts.begin(), ts.end(), p) - ts.begin());
    return EstimatorResult::of_count(hits, long(ts.size()));
  }

  long samples() const { return samples_; }

 private:
  long samples_;
  std::uint64_t seed_;
  int threads_;
  std::map<int, std::vector<double>> cache_;
};

// Thresholds of `rect` for samples 0..samples-1, sample i on derive_seed(seed, i).
inline std::vector<double> crossing_thresholds(const Rect& rect, long samples, std::uint64_t seed, int threads = 1) {
  if (samples < 1) throw std::invalid_argument("crossing_curve: samples < 1");
  check_budget(rect.area(), "crossing_curve");
  return parallel_map<double>(samples, threads, [&](long i) { return crossing_threshold(rect, derive_seed(seed, std::uint64_t(i))); });
}

inline EstimatorResult crossing_fraction(const std::vector<double>& ts, double p) {
  long hits = 0;
  for (double t : ts) hits += t <= p;
  return EstimatorResult::of_count(hits, long(ts.size()));
}

// Open left-right crossing of `rect` at level p.  Samples share labels across
// p, so the estimate is monotone in p.
inline EstimatorResult crossing_curve(double p, const Rect& rect, long samples, std::uint64_t seed, int threads = 1) {
  return crossing_fraction(crossing_thresholds(rect, samples, seed, threads), p);
}

inline EstimatorResult crossing_curve(double p, int n, long samples, std::uint64_t seed, int threads = 1) {
  return crossing_curve(p, box_rect(n), samples, seed, threads);
}

struct CorrelationLength {
  long L = 0;
  bool resolved = false;
  std::vector<std::pair<int, EstimatorResult>> evaluations;
};

// Smallest n (doubling, then bisection) at which the crossing probability of
// B(n) clears 1 - eps0 (p > 1/2) or drops below eps0 (p < 1/2) by 2 sigma.
inline CorrelationLength correlation_length(double p, double eps0, int n_max, CrossingSampler& sampler) {
  if (p == 0.5) throw std::invalid_argument("correlation_length: undefined at p = 1/2");
  if (!(eps0 > 0 && eps0 < 0.5)) throw std::invalid_argument("correlation_length: eps0 outside (0, 1/2)");
  CorrelationLength out;
  auto good = [&](int n) {
    auto e = sampler.prob(n, p);
    out.evaluations.emplace_back(n, e);
    return p > 0.5 ? e.estimate - 2 * e.std_error > 1 - eps0 : e.estimate + 2 * e.std_error < eps0;
  };
  int hi = 1;
  while (hi <= n_max && !good(hi)) hi *= 2;
  if (hi > n_max) {
    if (hi / 2 < n_max && good(n_max)) {
      hi = n_max;
    } else {
      out.L = n_max;
      return out;
    }
  }
  int lo = hi / 2;
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (good(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.L = hi;
  out.resolved = true;
  return out;
}

struct PnEstimate {
  double p_hat = 0.5;
  double lo = 0.5, hi = 1.0;
  bool resolved = false;
};

// p_n = sup{p : L(p) > n}.  On the sampled thresholds of B(n) the 2-sigma
// criterion of correlation_length first holds at an order statistic, so the
// bisection over p collapses to picking that order statistic.
inline PnEstimate pn_estimate(int n, double eps0, CrossingSampler& sampler) {
  if (n < 2) throw std::invalid_argument("pn_estimate: n < 2");
  auto& ts = sampler.thresholds(n);
  long N = long(ts.size());
  PnEstimate out;
  long j = -1;
  for (long i = 0; i < N; ++i) {
    auto e = EstimatorResult::of_count(i + 1, N);
    if (e.estimate - 2 * e.std_error > 1 - eps0) {
      j = i;
      break;
    }
  }
  if (j < 0) return out;
  double q = 1 - eps0;
  long spread = long(std::ceil(2 * std::sqrt(double(N) * q * (1 - q))));
  out.p_hat = ts[std::size_t(j)];
  out.lo = ts[std::size_t(std::max(0L, j - spread))];
  out.hi = ts[std::size_t(std::min(N - 1, j + spread))];
  out.resolved = out.p_hat > 0.5;
  return out;
}

// ---------------------------------------------------------------------------
// Arm events

inline auto lazy_colors(std::uint64_t seed, double p) {
  return [seed, p](Vertex v) { return label_of(seed, v) <= p ? Color::Open : Color::Closed; };
}

inline EstimatorResult arm_probability(const ArmSpec& spec, int m, int n, double p, long samples, std::uint64_t seed,
                                       int threads = 1) {
  if (!(m < n)) throw std::invalid_argument("arm_probability: need m < n");
  check_budget(box_rect(n).area(), "arm_probability");
  auto hits = parallel_map<char>(samples, threads, [&](long i) {
    return char(arms_event(lazy_colors(derive_seed(seed, std::uint64_t(i)), p), m, n, spec));
  });
  long h = 0;
  for (char c : hits) h += c;
  return EstimatorResult::of_count(h, samples);
}

struct ArmCurve {
  ArmSpec spec;
  int m = 0;
  double p = 0.5;
  std::vector<int> n;
  std::vector<EstimatorResult> est;
  ExponentFit fit;
  bool shared_samples = false;
  double exponent() const { return -fit.slope; }
};

struct ArmCurveOptions {
  int m = 0;
  double p = 0.5;
  long samples = 1000;
  long max_samples = 400000;
  double target_rel_se = 0.1;
  std::uint64_t seed = 1;
  int threads = 1;
};

inline ExponentFit fit_log_log(const std::vector<int>& n, const std::vector<EstimatorResult>& est) {
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < n.size(); ++i) {
    double p = est[i].estimate;
    if (!(p > 0)) throw std::domain_error("exponent fit: estimate at n=" + std::to_string(n[i]) + " is consistent with 0");
    x.push_back(std::log(double(n[i])));
    y.push_back(std::log(p));
    double var = p < 1 ? (1 - p) / (p * double(est[i].n_samples)) : 1.0 / double(est[i].n_samples * est[i].n_samples);
    w.push_back(1 / var);
  }
  auto f = wls(x, y, w);
  for (int v : n) f.scale.push_back(v);
  return f;
}

inline long samples_for(double p, double rel) {
  if (!(p > 0)) return 0;
  return long(std::ceil((1 - p) / (p * rel * rel)));
}

// Arm probabilities on an n grid, samples auto-scaled so that every point
// reaches the target relative stderr (up to max_samples).  One-arm and
// polychromatic two-arm events come from a single exploration per sample that
// serves the whole grid; other events use independent samples per n.
inline ArmCurve arm_exponent(const ArmSpec& spec, std::vector<int> grid, const ArmCurveOptions& o) {
  spec.validate();
  if (grid.size() < 4) throw std::invalid_argument("arm_exponent: need at least 4 grid points");
  std::sort(grid.begin(), grid.end());
  int nmax = grid.back();
  check_budget(box_rect(nmax).area(), "arm_exponent");
  ArmCurve out{spec, o.m, o.p, grid, {}, {}, false};
  bool half = spec.sector == Sector::UpperHalf;
  bool reach_based = spec.colors.size() == 1 || (spec.colors.size() == 2 && !spec.monochromatic());
  if (reach_based) {
    out.shared_samples = true;
    // per sample: largest radius at which the event still holds
    auto radius = [&](long i) {
      auto col = lazy_colors(derive_seed(o.seed, std::uint64_t(i)), o.p);
      int r = arm_reach(col, spec.colors[0], o.m, nmax, half);
      if (spec.colors.size() == 2) r = std::min(r, arm_reach(col, spec.colors[1], o.m, nmax, half));
      return r;
    };
    std::vector<int> radii = parallel_map<int>(o.samples, o.threads, radius);
    while (true) {
      long hits = 0;
      for (int r : radii) hits += r >= nmax;
      double pr = double(hits) / double(radii.size());
      long need = std::max(samples_for(pr, o.target_rel_se), long(radii.size()));
      if (pr == 0) need = long(radii.size()) * 4;
      need = std::min(need, o.max_samples);
      if (need <= long(radii.size())) break;
      long base = long(radii.size());
      auto more = parallel_map<int>(need - base, o.threads, [&](long i) { return radius(base + i); });
      radii.insert(radii.end(), more.begin(), more.end());
    }
    for (int n : grid) {
      long hits = 0;
      for (int r : radii) hits += r >= n;
      out.est.push_back(EstimatorResult::of_count(hits, long(radii.size())));
    }
  } else {
    for (int n : grid) {
      auto event = [&](long i) {
        return char(arms_event(lazy_colors(derive_seed(o.seed, std::uint64_t(i), std::uint64_t(n)), o.p), o.m, n, spec));
      };
      auto hits = parallel_map<char>(o.samples, o.threads, event);
      while (true) {
        long h = 0;
        for (char c : hits) h += c;
        double pr = double(h) / double(hits.size());
        long need = std::max(samples_for(pr, o.target_rel_se), long(hits.size()));
        if (pr == 0) need = long(hits.size()) * 4;
        need = std::min(need, o.max_samples);
        if (need <= long(hits.size())) {
          out.est.push_back(EstimatorResult::of_count(h, long(hits.size())));
          break;
        }
        long base = long(hits.size());
        auto more = parallel_map<char>(need - base, o.threads, [&](long i) { return event(base + i); });
        hits.insert(hits.end(), more.begin(), more.end());
      }
    }
  }
  out.fit = fit_log_log(out.n, out.est);
  return out;
}

struct QmRow {
  int m, r, n;
  EstimatorResult mn, mr, rn;
  double ratio = 0, ratio_se = 0;
};

// pi(m,n) / (pi(m,r) pi(r,n)); an empty inner annulus (r = m) has probability 1.
inline std::vector<QmRow> quasimultiplicativity_check(const ArmSpec& spec, const std::vector<std::array<int, 3>>& triples,
                                                      long samples, std::uint64_t seed, int threads = 1) {
  std::vector<QmRow> rows;
  std::uint64_t tag = 0;
  auto pi = [&](int a, int b) {
    if (a == b) return EstimatorResult::make(1.0, 0.0, samples);
    return arm_probability(spec, a, b, 0.5, samples, derive_seed(seed, ++tag, 77), threads);
  };
  for (auto [m, r, n] : triples) {
    if (!(m <= r && r < n)) throw std::invalid_argument("quasimultiplicativity_check: need m <= r < n");
    QmRow row{m, r, n, pi(m, n), pi(m, r), pi(r, n)};
    if (row.mr.estimate == 0 || row.rn.estimate == 0) throw std::domain_error("quasimultiplicativity_check: zero estimate");
    row.ratio = row.mn.estimate / (row.mr.estimate * row.rn.estimate);
    auto rel2 = [](const EstimatorResult& e) { return e.estimate > 0 ? std::pow(e.std_error / e.estimate, 2) : 0.0; };
    row.ratio_se = row.ratio * std::sqrt(rel2(row.mn) + rel2(row.mr) + rel2(row.rn));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Passage-time growth

struct GrowthRow {
  int n = 0;  // box size 2^n
  EstimatorResult T;
  double partial_sum = 0;  // sum_{k=2}^{n} a_k
  double ratio = 0;
};

inline std::vector<GrowthRow> growth_curve(const Cdf& F, std::vector<int> exps, long samples, std::uint64_t seed, int threads = 1) {
  if (exps.empty()) throw std::invalid_argument("growth_curve: empty grid");
  std::sort(exps.begin(), exps.end());
  if (exps.front() < 0 || exps.back() > 14) throw std::invalid_argument("growth_curve: exponent out of range");
  int N = 1 << exps.back();
  check_budget(box_rect(N).area(), "growth_curve");
  auto rings = parallel_map<std::vector<double>>(samples, threads, [&](long i) {
    auto all = ring_passage_times(F, derive_seed(seed, std::uint64_t(i)), N);
    std::vector<double> keep;
    for (int e : exps) keep.push_back(all[std::size_t(1) << e]);
    return keep;
  });
  std::vector<GrowthRow> rows;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    std::vector<double> xs;
    for (auto& r : rings) xs.push_back(r[j]);
    GrowthRow row;
    row.n = exps[j];
    row.T = EstimatorResult::of_values(xs);
    for (int k = 2; k <= exps[j]; ++k) row.partial_sum += ak(F, k);
    row.ratio = row.partial_sum > 0 ? row.T.estimate / row.partial_sum : 0;
    rows.push_back(row);
  }
  return rows;
}

struct TailProfile {
  std::vector<double> lambda;
  std::vector<double> p_tn, p_rect;  // P(X >= lambda)
  EstimatorResult tn_mean, rect_mean;
};

// Empirical tails of the annulus decomposition T(n) and of the R(n) crossing time.
inline TailProfile tail_profile(std::shared_ptr<const Cdf> F, int n, std::vector<double> lambda, long samples, std::uint64_t seed,
                                int threads = 1) {
  if (n < 0 || n > 8) throw std::invalid_argument("tail_profile: n out of range");
  check_budget(box_rect(4 << n).area(), "tail_profile");
  auto vals = parallel_map<std::pair<double, double>>(samples, threads, [&](long i) {
    auto f = make_field(Region::box(4 << n), F, derive_seed(seed, std::uint64_t(i)));
    return std::make_pair(tn(f, n).value(), rect_crossing_time(f, n).value);
  });
  TailProfile out;
  out.lambda = lambda;
  std::vector<double> a, b;
  for (auto& v : vals) {
    a.push_back(v.first);
    b.push_back(v.second);
  }
  out.tn_mean = EstimatorResult::of_values(a);
  out.rect_mean = EstimatorResult::of_values(b);
  for (double l : lambda) {
    long ca = 0, cb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ca += a[i] >= l;
      cb += b[i] >= l;
    }
    out.p_tn.push_back(double(ca) / double(samples));
    out.p_rect.push_back(double(cb) / double(samples));
  }
  return out;
}

inline EstimatorResult count_vn_estimate(int n, double p, int Lhat, long samples, std::uint64_t seed, int threads = 1) {
  check_budget(rect_S(n).area(), "count_vn");
  auto xs = parallel_map<double>(samples, threads, [&](long i) {
    auto lab = make_labels(Region::rect(rect_S(n)), derive_seed(seed, std::uint64_t(i)));
    return double(count_contributing_vertices(lab, n, p, Lhat));
  });
  return EstimatorResult::of_values(xs);
}

// ---------------------------------------------------------------------------
// Dynamical surveys

// P(T(0, dB(2^n)) <= x) from independent static fields.
inline EstimatorResult static_probability(std::shared_ptr<const Cdf> F, int n, double x, long samples, std::uint64_t seed,
                                          int threads = 1) {
  auto hits = parallel_map<char>(samples, threads, [&](long i) {
    auto t = ring_passage_times(*F, derive_seed(seed, std::uint64_t(i), 991), 1 << n);
    return char(t[std::size_t(1) << n] <= x);
  });
  long h = 0;
  for (char c : hits) h += c;
  return EstimatorResult::of_count(h, samples);
}

struct CoveringRow {
  double eps = 0;
  EstimatorResult N;
  int y = 0;
  double binom = 0;
  double shape = 0;  // ceil(s/eps) C(n,y) pi_1(2^n), without the C^(y+1) factor
  bool in_regime = false;
  long L_tilted = 0;
};

struct CoveringSurvey {
  std::vector<CoveringRow> rows;
  EstimatorResult leb;      // Lebesgue measure of {t in [0,s] : T_t <= x}
  EstimatorResult fixed_t;  // P(T_0 <= x) on the same replicas
  EstimatorResult pi1;
  double C_fit = 0;
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

inline CoveringSurvey covering_survey(std::shared_ptr<const Cdf> F, int n, double x, double s, const std::vector<double>& eps_grid,
                                      long samples, std::uint64_t seed, int threads = 1, double eps0 = 0.05, long aux_samples = 2000) {
  if (n < 1 || n > 9) throw std::invalid_argument("covering_survey: n out of range");
  check_budget(box_rect(1 << n).area(), "covering_survey");
  struct Rep {
    std::vector<long> N;
    double leb;
    double v0;
  };
  auto reps = parallel_map<Rep>(samples, threads, [&](long i) {
    auto d = generate(Region::box(1 << n), s, F, derive_seed(seed, std::uint64_t(i)));
    auto tr = scan_statistic(d, PathStat::point_to_box(1 << n));
    auto set = exceptional_set(tr, x);
    Rep r{{}, set.measure(), tr.value.front()};
    for (double e : eps_grid) r.N.push_back(covering_number(set, e, s));
    return r;
  });
  CoveringSurvey out;
  std::vector<double> leb, v0;
  for (auto& r : reps) {
    leb.push_back(r.leb);
    v0.push_back(r.v0 <= x ? 1.0 : 0.0);
  }
  out.leb = EstimatorResult::of_values(leb);
  out.fixed_t = EstimatorResult::of_values(v0);
  out.pi1 = arm_probability(ArmSpec::parse("open1"), 0, 1 << n, 0.5, aux_samples, derive_seed(seed, 1, 31), threads);
  CrossingSampler sampler(aux_samples, derive_seed(seed, 2, 31), threads);
  for (std::size_t j = 0; j < eps_grid.size(); ++j) {
    double e = eps_grid[j];
    std::vector<double> xs;
    for (auto& r : reps) xs.push_back(double(r.N[j]));
    CoveringRow row;
    row.eps = e;
    row.N = EstimatorResult::of_values(xs);
    double q = e < 0.5 ? F->quantile(0.5 + e) : kInf;
    row.y = q > 0 ? int(std::min<double>(std::floor(x / q), n)) : n;
    row.binom = binomial(n, row.y);
    row.shape = std::ceil(s / e) * row.binom * out.pi1.estimate;
    if (e < 0.5) {
      double pt = 1 - std::exp(-e) * (0.5 - e);
      auto L = correlation_length(pt, eps0, 2 << n, sampler);
      row.L_tilted = L.L;
      row.in_regime = !L.resolved || L.L >= (1 << n);
    }
    if (row.shape > 0 && row.N.estimate > 0)
      out.C_fit = std::max(out.C_fit, std::pow(row.N.estimate / row.shape, 1.0 / (row.y + 1)));
    out.rows.push_back(row);
  }
  return out;
}

// Good vertices at time t: weight zero at t and no resampling in [t, t+1/M).
// A_t: a good circuit around 0 in Ann(2^n, 2^(n+1)) and a good path from 0
// (whose own weight is not counted) to it.
inline bool interval_event(const DynamicalField& d, int n, int M, int i) {
  double t = double(i) / M, t1 = double(i + 1) / M;
  int R = 2 << n;
  const Grid& g = d.grid();
  double f0 = d.cdf().f0();
  auto quiet = [&](int p) {
    auto k = d.ordinal(p, t);
    return k == d.event_count(p) || d.event_time(p, std::size_t(k)) >= t1;
  };
  if (!quiet(g.pos({0, 0}))) return false;
  auto cfg = make_config(Region::box(R), [&](Vertex v) {
    int p = g.pos(v);
    return quiet(p) && d.label(p, d.ordinal(p, t)) <= f0;
  });
  auto C = innermost_open_circuit(cfg, 1 << n, R);
  if (!C) return false;
  Grid b(box_rect(R));
  std::vector<std::uint8_t> target(b.size(), 0), seen(b.size(), 0);
  for (auto v : C->vertices) target[std::size_t(b.pos(v))] = 1;
  std::vector<int> queue{b.pos({0, 0})};
  seen[std::size_t(queue[0])] = 1;
  for (std::size_t k = 0; k < queue.size(); ++k) {
    int u = queue[k];
    if (target[std::size_t(u)]) return true;
    b.for_each_neighbor(u, [&](int v) {
      if (seen[std::size_t(v)] || !cfg.is_open(b.at(v))) return;
      seen[std::size_t(v)] = 1;
      queue.push_back(v);
    });
  }
  return false;
}

struct IntervalCountResult {
  std::vector<long> counts;  // per replica
  EstimatorResult mean_count;
  EstimatorResult p_a0;
  EstimatorResult pi1;
  std::vector<double> c_grid;
  std::vector<EstimatorResult> tail;  // P(N >= c M pi1)
  double best_c = 0;                  // largest grid c with P(N >= c M pi1) >= c
  bool cond_corr_length = false, cond_arm = false;
};

inline IntervalCountResult interval_count_statistic(int n, int M, long samples, std::uint64_t seed, int threads = 1,
                                                    std::vector<double> c_grid = {}, std::shared_ptr<const Cdf> F = nullptr,
                                                    double eps0 = 0.05, long aux_samples = 2000) {
  if (n < 1 || n > 8 || M < 1) throw std::invalid_argument("interval_count_statistic: bad n or M");
  if (!F) F = std::make_shared<const Cdf>(bernoulli());
  if (c_grid.empty())
    for (int k = 1; k <= 20; ++k) c_grid.push_back(0.05 * k);
  int R = 2 << n;
  check_budget(box_rect(R).area(), "interval_count");
  struct Rep {
    long count;
    bool a0;
  };
  auto reps = parallel_map<Rep>(samples, threads, [&](long s) {
    auto d = generate(Region::box(R), 1.0, F, derive_seed(seed, std::uint64_t(s)));
    Rep r{0, false};
    for (int i = 0; i < M; ++i) {
      bool a = interval_event(d, n, M, i);
      r.count += a;
      if (i == 0) r.a0 = a;
    }
    return r;
  });
  IntervalCountResult out;
  std::vector<double> cnt, a0;
  for (auto& r : reps) {
    out.counts.push_back(r.count);
    cnt.push_back(double(r.count));
    a0.push_back(r.a0);
  }
  out.mean_count = EstimatorResult::of_values(cnt);
  out.p_a0 = EstimatorResult::of_values(a0);
  out.pi1 = arm_probability(ArmSpec::parse("open1"), 0, R, 0.5, aux_samples, derive_seed(seed, 3, 31), threads);
  out.c_grid = c_grid;
  for (double c : c_grid) {
    long h = 0;
    for (long k : out.counts) h += double(k) >= c * M * out.pi1.estimate;
    out.tail.push_back(EstimatorResult::of_count(h, long(out.counts.size())));
    if (out.tail.back().estimate >= c) out.best_c = std::max(out.best_c, c);
  }
  CrossingSampler sampler(aux_samples, derive_seed(seed, 4, 31), threads);
  auto L = correlation_length(0.5 * std::exp(-1.0 / M), eps0, R, sampler);
  out.cond_corr_length = !L.resolved || L.L >= R;
  out.cond_arm = M * out.pi1.estimate >= 1;
  return out;
}

// B_k: a crossing of Ann(m, n) by vertices with sigma = 0, where sigma = 1
// means label >= q and no resampling in [0, h).
template <class LabelOf, class Quiet>
bool sigma_zero_crossing(LabelOf&& label_of0, Quiet&& quiet, int m, int n, double q) {
  auto col = [&](Vertex v) { return (label_of0(v) >= q && quiet(v)) ? Color::Closed : Color::Open; };
  return arm_reach(col, Color::Open, m, n) >= n;
}

struct HausdorffScale {
  int k = 0;
  long Lk = 0;
  double p_hat = 0, q = 0, delta = 0, h = 0;
  EstimatorResult pB;
  EstimatorResult pi1;
  double C = 0;
};

struct HausdorffSurvey {
  std::vector<HausdorffScale> scales;
  std::vector<double> wbar;  // per replica
  EstimatorResult wbar_mean;
  double sum_pB_over_n = 0;
  EstimatorResult p_wbar_ge_x;
  double C_min = 0, C_max = 0;
};

inline HausdorffSurvey hausdorff_cover_survey(int L, int n, double x, long samples, std::uint64_t seed, int threads = 1,
                                              double eps0 = 0.05, long aux_samples = 2000) {
  if (L < 2 || n < 1) throw std::invalid_argument("hausdorff_cover_survey: need L >= 2, n >= 1");
  double top = std::pow(double(L), n);
  if (top > 4096) throw BudgetExceeded("hausdorff_cover_survey: L^n exceeds 4096");
  HausdorffSurvey out;
  CrossingSampler sampler(aux_samples, derive_seed(seed, 5, 31), threads);
  std::vector<long> Lk(std::size_t(n) + 1, 1);
  for (int k = 1; k <= n; ++k) Lk[std::size_t(k)] = Lk[std::size_t(k) - 1] * L;
  for (int k = 1; k <= n; ++k) {
    HausdorffScale sc;
    sc.k = k;
    sc.Lk = Lk[std::size_t(k)];
    auto pn = pn_estimate(int(std::max(2L, sc.Lk)), eps0, sampler);
    sc.p_hat = pn.p_hat;
    sc.q = 0.5 + 0.5 * (sc.p_hat - 0.5);
    sc.delta = (sc.p_hat - 0.5) / 2;
    sc.h = sc.delta > 0 ? 1.0 / std::ceil(1.0 / sc.delta) : 1.0;
    out.scales.push_back(sc);
  }
  auto hits = parallel_map<std::vector<char>>(samples, threads, [&](long i) {
    std::uint64_t sd = derive_seed(seed, std::uint64_t(i));
    std::vector<char> b;
    for (auto& sc : out.scales) {
      b.push_back(sigma_zero_crossing([&](Vertex v) { return label_of(sd, v); },
                                      [&](Vertex v) { return !has_event_in(sd, v, -1.0, sc.h - 1e-300); },
                                      int(Lk[std::size_t(sc.k) - 1]), int(sc.Lk), sc.q));
    }
    return b;
  });
  for (auto& b : hits) {
    double w = 0;
    for (char c : b) w += c;
    out.wbar.push_back(w / n);
  }
  out.wbar_mean = EstimatorResult::of_values(out.wbar);
  long ge = 0;
  for (double w : out.wbar) ge += w >= x;
  out.p_wbar_ge_x = EstimatorResult::of_count(ge, samples);
  out.C_min = kInf;
  for (std::size_t j = 0; j < out.scales.size(); ++j) {
    auto& sc = out.scales[j];
    long h = 0;
    for (auto& b : hits) h += b[j];
    sc.pB = EstimatorResult::of_count(h, samples);
    out.sum_pB_over_n += sc.pB.estimate / n;
    sc.pi1 = arm_probability(ArmSpec::parse("open1"), int(Lk[j]), int(sc.Lk), 0.5, aux_samples, derive_seed(seed, 6 + j, 31), threads);
    sc.C = sc.pi1.estimate > 0 ? sc.pB.estimate / sc.pi1.estimate : kInf;
    out.C_min = std::min(out.C_min, sc.C);
    out.C_max = std::max(out.C_max, sc.C);
  }
  return out;
}

struct NoiseRow {
  double t = 0;
  EstimatorResult joint;
  double ratio = 0, ratio_se = 0;
};

struct NoiseDecay {
  EstimatorResult p0;
  std::vector<NoiseRow> rows;
  ExponentFit fit;  // log ratio against log t
};

// W_t: a zero-weight path from the neighbours of 0 to dB(2^n) at time t.
inline NoiseDecay noise_decay(int n, const std::vector<double>& t_grid, long samples, std::uint64_t seed, int threads = 1,
                              double f0 = 0.5) {
  if (n < 1 || n > 10) throw std::invalid_argument("noise_decay: n out of range");
  int R = 1 << n;
  auto w_at = [&](std::uint64_t sd, double t) {
    auto col = [&](Vertex v) { return label_at(sd, v, t) <= f0 ? Color::Open : Color::Closed; };
    return arm_reach(col, Color::Open, 0, R) >= R;
  };
  auto reps = parallel_map<std::vector<char>>(samples, threads, [&](long i) {
    std::uint64_t sd = derive_seed(seed, std::uint64_t(i));
    std::vector<char> r{char(w_at(sd, 0.0))};
    for (double t : t_grid) r.push_back(r[0] && w_at(sd, t));
    return r;
  });
  NoiseDecay out;
  long h0 = 0;
  for (auto& r : reps) h0 += r[0];
  out.p0 = EstimatorResult::of_count(h0, samples);
  std::vector<double> lx, ly, w;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    long h = 0;
    for (auto& r : reps) h += r[j + 1];
    NoiseRow row;
    row.t = t_grid[j];
    row.joint = EstimatorResult::of_count(h, samples);
    double p0 = out.p0.estimate;
    if (p0 > 0) {
      row.ratio = row.joint.estimate / (p0 * p0);
      double rj = row.joint.estimate > 0 ? row.joint.std_error / row.joint.estimate : 0;
      double r0 = out.p0.std_error / p0;
      row.ratio_se = row.ratio * std::sqrt(rj * rj + 4 * r0 * r0);
    }
    out.rows.push_back(row);
    if (row.ratio > 0 && row.t > 0) {
      lx.push_back(std::log(row.t));
      ly.push_back(std::log(row.ratio));
      double rel = row.ratio_se / row.ratio;
      w.push_back(rel > 0 ? 1 / (rel * rel) : 1.0);
    }
  }
  if (lx.size() >= 2) out.fit = wls(lx, ly, w);
  return out;
}

// ---------------------------------------------------------------------------
// Analytic utilities

struct AbelResult {
  bool precondition_ok = true;
  bool holds = true;
  long witness = -1;  // first failing prefix, or offending index
  std::string problem;
};

// Summation by parts: with a, c >= 0, b nonincreasing and A_k <= C_k for all
// prefixes, sum a_k b_k <= sum c_k b_k for every prefix.
inline AbelResult abel_compare(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c, long n) {
  AbelResult r;
  if (n < 0 || std::size_t(n) > a.size() || std::size_t(n) > b.size() || std::size_t(n) > c.size()) {
    r.precondition_ok = false;
    r.problem = "sequence shorter than n";
    return r;
  }
  double A = 0, C = 0;
  for (long k = 0; k < n; ++k) {
    std::size_t i = std::size_t(k);
    if (a[i] < 0 || b[i] < 0 || c[i] < 0) r.problem = "negative entry";
    if (k > 0 && b[i] > b[i - 1]) r.problem = "b not nonincreasing";
    A += a[i];
    C += c[i];
    if (A > C * (1 + 1e-12) + 1e-300) r.problem = "partial sums A_k > C_k";
    if (!r.problem.empty()) {
      r.precondition_ok = false;
      r.witness = k;
      return r;
    }
  }
  double L = 0, Rs = 0;
  for (long k = 0; k < n; ++k) {
    std::size_t i = std::size_t(k);
    L += a[i] * b[i];
    Rs += c[i] * b[i];
    if (L > Rs * (1 + 1e-12) + 1e-300) {
      r.holds = false;
      r.witness = k;
      return r;
    }
  }
  return r;
}

// I(x,p) = x log(x/p) + (1-x) log((1-x)/(1-p)), with 0 log 0 = 0 at the ends.
inline double bernoulli_rate(double x, double p) {
  if (!(p > 0 && p < 1)) throw std::domain_error("bernoulli_rate: p outside (0,1)");
  if (!(x >= 0 && x <= 1)) throw std::domain_error("bernoulli_rate: x outside [0,1]");
  auto term = [](double u, double v) { return u == 0 ? 0.0 : u * std::log(u / v); };
  return term(x, p) + term(1 - x, 1 - p);
}

}  // namespace dynfpp

#endif
