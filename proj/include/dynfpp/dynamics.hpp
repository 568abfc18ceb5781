#ifndef DYNFPP_DYNAMICS_HPP
#define DYNFPP_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "distributions.hpp"
#include "fpp.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace dynfpp {

// Event j of vertex v happens at the sum of j+1 exponential gaps, each gap a
// keyed draw, so any vertex's clock can be rebuilt in isolation.
inline double event_gap(std::uint64_t seed, Vertex v, std::uint64_t j) {
  return -std::log(keyed_uniform(seed, v, Stream::Event, j));
}

// Number of resamplings of v in [0, t].
inline std::uint64_t ordinal_at(std::uint64_t seed, Vertex v, double t) {
  std::uint64_t n = 0;
  double clock = event_gap(seed, v, 0);
  while (clock <= t) clock += event_gap(seed, v, ++n);
  return n;
}

inline double label_at(std::uint64_t seed, Vertex v, double t) { return label_of(seed, v, ordinal_at(seed, v, t)); }

// True if v has an event in (a, b].
inline bool has_event_in(std::uint64_t seed, Vertex v, double a, double b) {
  double clock = event_gap(seed, v, 0);
  std::uint64_t j = 0;
  while (clock <= a) clock += event_gap(seed, v, ++j);
  return clock <= b;
}

class DynamicalField {
 public:
  DynamicalField(const Region& region, double horizon, std::shared_ptr<const Cdf> F, std::uint64_t seed)
      : index_(std::make_shared<const VertexIndex>(region)), s_(horizon), F_(std::move(F)), seed_(seed) {
    if (!(horizon > 0)) throw std::invalid_argument("generate: horizon must be positive");
    const Grid& g = index_->grid();
    start_.assign(g.size() + 1, 0);
    for (int p = 0; p < int(g.size()); ++p) {
      start_[std::size_t(p)] = times_.size();
      if (!index_->mask(p)) continue;
      Vertex v = g.at(p);
      double clock = event_gap(seed_, v, 0);
      for (std::uint64_t j = 0; clock <= s_; clock += event_gap(seed_, v, ++j)) times_.push_back(clock);
    }
    start_[g.size()] = times_.size();
  }

  const VertexIndex& index() const { return *index_; }
  std::shared_ptr<const VertexIndex> index_ptr() const { return index_; }
  const Grid& grid() const { return index_->grid(); }
  double horizon() const { return s_; }
  const Cdf& cdf() const { return *F_; }
  std::shared_ptr<const Cdf> cdf_ptr() const { return F_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t event_count() const { return times_.size(); }
  std::size_t event_count(int pos) const { return start_[std::size_t(pos) + 1] - start_[std::size_t(pos)]; }
  double event_time(int pos, std::size_t j) const { return times_[start_[std::size_t(pos)] + j]; }

  std::uint64_t ordinal(int pos, double t) const {
    auto b = times_.begin() + std::ptrdiff_t(start_[std::size_t(pos)]);
    auto e = times_.begin() + std::ptrdiff_t(start_[std::size_t(pos) + 1]);
    return std::uint64_t(std::upper_bound(b, e, t) - b);
  }
  double label(int pos, std::uint64_t ordinal) const { return label_of(seed_, grid().at(pos), ordinal); }
  double weight(int pos, std::uint64_t ordinal) const { return sample_weight(*F_, label(pos, ordinal)); }

  WeightField snapshot(double t) const {
    if (!(t >= 0 && t <= s_)) throw std::domain_error("snapshot: t outside [0, horizon]");
    WeightField f{LabelField{index_, std::vector<double>(grid().size(), 0.0)}, F_, std::vector<double>(grid().size(), 0.0)};
    for (int p = 0; p < int(grid().size()); ++p) {
      if (!index_->mask(p)) continue;
      double w = label(p, ordinal(p, t));
      f.labels.omega[std::size_t(p)] = w;
      f.tau[std::size_t(p)] = sample_weight(*F_, w);
    }
    return f;
  }

  struct Event {
    double t;
    int pos;
    std::uint64_t ordinal;  // label index after the event
  };
  // Events of vertices in `relevant`, in time order.
  std::vector<Event> events(const Region& relevant) const {
    std::vector<Event> ev;
    for (int p = 0; p < int(grid().size()); ++p) {
      if (!index_->mask(p) || !relevant.contains(grid().at(p))) continue;
      for (std::size_t j = 0; j < event_count(p); ++j) ev.push_back({event_time(p, j), p, j + 1});
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t || (a.t == b.t && a.pos < b.pos); });
    return ev;
  }

 private:
  std::shared_ptr<const VertexIndex> index_;
  double s_;
  std::shared_ptr<const Cdf> F_;
  std::uint64_t seed_;
  std::vector<std::size_t> start_;
  std::vector<double> times_;
};

inline DynamicalField generate(const Region& region, double s, std::shared_ptr<const Cdf> F, std::uint64_t seed) {
  return DynamicalField(region, s, std::move(F), seed);
}

inline WeightField snapshot(const DynamicalField& d, double t) { return d.snapshot(t); }

// Piecewise-constant, right-continuous: value[i] holds on [start[i], start[i+1])
// and the last piece runs to the horizon.
struct Trajectory {
  std::vector<double> start;
  std::vector<double> value;
  double horizon = 0;
  std::size_t full_recomputes = 0;
  std::size_t events_seen = 0;

  double at(double t) const {
    auto it = std::upper_bound(start.begin(), start.end(), t);
    return value[std::size_t(it - start.begin()) - 1];
  }
  double end_of(std::size_t i) const { return i + 1 < start.size() ? start[i + 1] : horizon; }
  void push(double t, double v) {
    if (!value.empty() && value.back() == v) return;
    start.push_back(t);
    value.push_back(v);
  }
};

// Generic scan: any functional of the weight field, recomputed from scratch at
// every event inside `relevant`.
template <class Stat>
Trajectory scan_statistic(const DynamicalField& d, Stat&& stat, const Region& relevant) {
  WeightField f = d.snapshot(0);
  Trajectory tr;
  tr.horizon = d.horizon();
  tr.push(0.0, stat(f));
  for (auto& e : d.events(relevant)) {
    ++tr.events_seen;
    double w = d.label(e.pos, e.ordinal);
    f.labels.omega[std::size_t(e.pos)] = w;
    f.tau[std::size_t(e.pos)] = sample_weight(d.cdf(), w);
    ++tr.full_recomputes;
    tr.push(e.t, stat(f));
  }
  return tr;
}

// Min-over-paths statistic: paths from `sources` (first weight excluded) to
// `targets`, inside `allowed`.
struct PathStat {
  std::vector<Vertex> sources;
  std::vector<Vertex> targets;
  Region allowed;

  static PathStat point_to_box(int n) { return {{{0, 0}}, box_ring(n), Region::box(n)}; }
  static PathStat rect_crossing(const Rect& q) {
    auto s = sides(q);
    return {s.left, s.right, Region::rect(q)};
  }
};

namespace detail {

inline std::vector<Vertex> loop_erase(const std::vector<Vertex>& walk) {
  std::vector<Vertex> out;
  for (auto v : walk) {
    auto it = std::find(out.begin(), out.end(), v);
    if (it != out.end())
      out.erase(it + 1, out.end());
    else
      out.push_back(v);
  }
  return out;
}

}  // namespace detail

// Exact trajectory of a PathStat with incremental updates:
//   weight raised off the witness (or at its first vertex) -> unchanged;
//   weight lowered -> min(old, best path through v) from two cut-off searches;
//   weight raised on the witness -> full recompute.
inline Trajectory scan_statistic(const DynamicalField& d, const PathStat& stat) {
  WeightField f = d.snapshot(0);
  const Grid& g = f.grid();
  std::vector<std::uint8_t> is_target(g.size(), 0), is_source(g.size(), 0);
  for (auto v : stat.targets) is_target[std::size_t(g.pos(v))] = 1;
  for (auto v : stat.sources) is_source[std::size_t(g.pos(v))] = 1;
  std::vector<std::uint8_t> allowed(g.size(), 0);
  for (int p = 0; p < int(g.size()); ++p) allowed[std::size_t(p)] = f.labels.index->mask(p) && stat.allowed.contains(g.at(p));
  auto allow = [&](int p) { return allowed[std::size_t(p)] != 0; };

  auto full = [&] {
    return detail::field_search(f, stat.sources, allow, [&](int p) { return is_target[std::size_t(p)] != 0; }, true);
  };
  PathResult cur = full();
  std::vector<std::uint8_t> on_witness(g.size(), 0);
  auto set_witness = [&](const std::vector<Vertex>& w) {
    std::fill(on_witness.begin(), on_witness.end(), 0);
    for (std::size_t i = 1; i < w.size(); ++i) on_witness[std::size_t(g.pos(w[i]))] = 1;
  };
  if (cur.witness) set_witness(*cur.witness);

  Trajectory tr;
  tr.horizon = d.horizon();
  tr.push(0.0, cur.value);
  for (auto& e : d.events(stat.allowed)) {
    ++tr.events_seen;
    std::size_t p = std::size_t(e.pos);
    double w = d.label(e.pos, e.ordinal);
    double old_tau = f.tau[p];
    double new_tau = sample_weight(d.cdf(), w);
    f.labels.omega[p] = w;
    f.tau[p] = new_tau;
    if (new_tau == old_tau) continue;
    if (!allowed[p]) continue;
    if (new_tau > old_tau) {
      if (!on_witness[p] || !cur.reachable()) continue;
      ++tr.full_recomputes;
      cur = full();
      if (cur.witness) set_witness(*cur.witness);
    } else {
      if (cur.reachable() && cur.value == 0) continue;
      Vertex v = g.at(e.pos);
      auto to_v = detail::field_search(f, stat.sources, allow, [&](int q) { return q == e.pos; }, true, cur.value);
      if (!to_v.reachable()) continue;
      double rest = cur.value - to_v.value;
      auto from_v = detail::field_search(f, {v}, allow, [&](int q) { return is_target[std::size_t(q)] != 0; }, true, rest);
      if (!from_v.reachable()) continue;
      std::vector<Vertex> walk = *to_v.witness;
      walk.insert(walk.end(), from_v.witness->begin() + 1, from_v.witness->end());
      walk = detail::loop_erase(walk);
      cur.value = path_time(f, walk);
      cur.witness = walk;
      set_witness(walk);
    }
    tr.push(e.t, cur.value);
  }
  return tr;
}

// Closed intervals [lo, hi]; lo == hi is a single point.
struct IntervalSet {
  std::vector<std::pair<double, double>> parts;

  void add(double lo, double hi) {
    if (hi < lo) throw std::invalid_argument("interval with hi < lo");
    parts.emplace_back(lo, hi);
    normalize();
  }
  void normalize() {
    std::sort(parts.begin(), parts.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& iv : parts) {
      if (!merged.empty() && iv.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    parts = std::move(merged);
  }
  bool empty() const { return parts.empty(); }
  double measure() const {
    double m = 0;
    for (auto& iv : parts) m += iv.second - iv.first;
    return m;
  }
};

inline IntervalSet exceptional_set(const Trajectory& tr, double x) {
  IntervalSet out;
  for (std::size_t i = 0; i < tr.value.size(); ++i)
    if (tr.value[i] <= x) out.parts.emplace_back(tr.start[i], tr.end_of(i));
  out.normalize();
  return out;
}

// Fewest closed intervals of length eps covering set within [w0, w1]: start a
// new interval at the leftmost uncovered point.  Ratios within 1e-9 of an
// integer are rounded to it so that float noise cannot add a cover piece.
inline long covering_number(const IntervalSet& set, double eps, double w0, double w1) {
  if (!(eps > 0)) throw std::invalid_argument("covering_number: eps must be positive");
  long count = 0;
  double covered = -kInf;
  for (auto [lo, hi] : set.parts) {
    lo = std::max(lo, w0);
    hi = std::min(hi, w1);
    if (hi < lo || hi <= covered) continue;
    double x = std::max(lo, covered);
    double k = std::max(1.0, std::ceil((hi - x) / eps - 1e-9));
    count += long(k);
    covered = x + k * eps;
  }
  return count;
}

inline long covering_number(const IntervalSet& set, double eps, double s) { return covering_number(set, eps, 0.0, s); }

struct DimensionEstimate {
  bool defined = false;
  double slope = 0, intercept = 0;
  std::vector<double> eps;
  std::vector<long> count;
  std::vector<double> local_ratio;  // log N / log(1/eps)
};

inline DimensionEstimate dimension_estimate(const IntervalSet& set, const std::vector<double>& eps_grid, double w0 = 0,
                                            double w1 = kInf) {
  if (eps_grid.size() < 3) throw std::invalid_argument("dimension_estimate: need at least 3 grid points");
  DimensionEstimate d;
  d.eps = eps_grid;
  if (set.empty()) return d;
  std::vector<double> xs, ys;
  for (double e : eps_grid) {
    long n = covering_number(set, e, w0, w1);
    d.count.push_back(n);
    double lx = std::log(1 / e), ly = n > 0 ? std::log(double(n)) : 0;
    d.local_ratio.push_back(lx != 0 ? ly / lx : 0);
    xs.push_back(lx);
    ys.push_back(ly);
  }
  if (d.count.back() == 0) return d;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(xs.size());
  my /= double(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  d.defined = sxx > 0;
  d.slope = d.defined ? sxy / sxx : 0;
  d.intercept = my - d.slope * mx;
  return d;
}

// Dyadic grid 2^-a, ..., 2^-b.
inline std::vector<double> dyadic_grid(int a, int b) {
  std::vector<double> g;
  for (int k = a; k <= b; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

}  // namespace dynfpp

#endif
