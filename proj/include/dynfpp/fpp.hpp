#ifndef DYNFPP_FPP_HPP
#define DYNFPP_FPP_HPP

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "distributions.hpp"
#include "lattice.hpp"
#include "percolation.hpp"
#include "rng.hpp"
#include "search.hpp"

namespace dynfpp {

struct WeightField {
  LabelField labels;
  std::shared_ptr<const Cdf> F;
  std::vector<double> tau;  // by grid position

  const VertexIndex& index() const { return *labels.index; }
  const Grid& grid() const { return labels.grid(); }
  const Region& region() const { return labels.index->region(); }
  bool contains(Vertex v) const { return labels.index->contains(v); }
  double at(Vertex v) const {
    if (!contains(v)) throw std::out_of_range("weight outside region");
    return tau[std::size_t(grid().pos(v))];
  }
};

inline WeightField make_field(LabelField labels, std::shared_ptr<const Cdf> F) {
  WeightField f{std::move(labels), std::move(F), {}};
  f.tau.assign(f.labels.omega.size(), 0.0);
  for (std::size_t i = 0; i < f.tau.size(); ++i)
    if (f.labels.index->mask(int(i))) f.tau[i] = sample_weight(*f.F, f.labels.omega[i]);
  return f;
}

inline WeightField make_field(const Region& r, std::shared_ptr<const Cdf> F, std::uint64_t seed) {
  return make_field(make_labels(r, seed), std::move(F));
}

// Weights given directly; labels are left at zero.  For tests and oracles.
template <class TauOf>
WeightField field_from_weights(const Region& r, TauOf&& tau_of) {
  WeightField f{LabelField{std::make_shared<const VertexIndex>(r), {}}, nullptr, {}};
  f.labels.omega.assign(f.grid().size(), 0.0);
  f.tau.assign(f.grid().size(), 0.0);
  for (int p = 0; p < int(f.grid().size()); ++p)
    if (f.labels.index->mask(p)) {
      double t = tau_of(f.grid().at(p));
      if (!(t >= 0)) throw std::invalid_argument("weights must be nonnegative");
      f.tau[std::size_t(p)] = t;
    }
  return f;
}

struct PathResult {
  double value = kInf;
  std::optional<std::vector<Vertex>> witness;
  bool reachable() const { return value < kInf; }
};

// T(gamma) = sum of weights after the first vertex.
inline double path_time(const WeightField& f, const std::vector<Vertex>& path) {
  double t = 0;
  for (std::size_t i = 1; i < path.size(); ++i) t += f.at(path[i]);
  return t;
}

// Circuit passage time: every distinct vertex once.
inline double circuit_time(const WeightField& f, const std::vector<Vertex>& cycle) {
  double t = 0;
  for (auto v : cycle) t += f.at(v);
  return t;
}

namespace detail {

template <class Allowed, class Target>
PathResult field_search(const WeightField& f, const std::vector<Vertex>& from, Allowed&& allowed, Target&& target,
                        bool want_witness, double cutoff = kInf) {
  const Grid& g = f.grid();
  std::vector<int> src;
  for (auto v : from) src.push_back(g.pos(v));
  thread_local std::unique_ptr<Dijkstra> dj;
  if (!dj || !(dj->grid().box == g.box)) dj = std::make_unique<Dijkstra>(g);
  int hit = -1;
  double val = kInf;
  dj->run(
      src, [&](int p) { return f.labels.index->mask(p) && allowed(p); }, [&](int p) { return f.tau[std::size_t(p)]; },
      [&](int p, double d) {
        if (!target(p)) return false;
        hit = p;
        val = d;
        return true;
      },
      cutoff);
  PathResult r;
  if (hit < 0) return r;
  r.value = val;
  if (want_witness) {
    std::vector<Vertex> w;
    for (int p : dj->path_to(hit)) w.push_back(g.at(p));
    r.witness = std::move(w);
  }
  return r;
}

inline void require_inside(const WeightField& f, const Region& r, const char* what) {
  Rect q = r.bounding_box();
  for (int y = q.y0; y <= q.y1; ++y)
    for (int x = q.x0; x <= q.x1; ++x)
      if (r.contains({x, y}) && !f.contains({x, y})) throw std::invalid_argument(std::string(what) + ": region too small");
}

}  // namespace detail

inline PathResult passage_time(const WeightField& f, const std::vector<Vertex>& A, const std::vector<Vertex>& B,
                               const Region& allowed, bool want_witness = false) {
  if (A.empty() || B.empty()) throw std::invalid_argument("passage_time: empty endpoint set");
  detail::require_inside(f, allowed, "passage_time");
  for (auto v : A)
    if (!allowed.contains(v)) throw std::invalid_argument("passage_time: A not inside allowed region");
  for (auto v : B)
    if (!allowed.contains(v)) throw std::invalid_argument("passage_time: B not inside allowed region");
  const Grid& g = f.grid();
  std::vector<std::uint8_t> in_b(g.size(), 0);
  for (auto v : B) in_b[std::size_t(g.pos(v))] = 1;
  return detail::field_search(
      f, A, [&](int p) { return allowed.contains(g.at(p)); }, [&](int p) { return in_b[std::size_t(p)] != 0; }, want_witness);
}

inline PathResult passage_time(const WeightField& f, const std::vector<Vertex>& A, const std::vector<Vertex>& B,
                               bool want_witness = false) {
  return passage_time(f, A, B, f.region(), want_witness);
}

// T(0, dB(n))
inline PathResult point_to_box(const WeightField& f, int n, bool want_witness = false) {
  if (n < 0) throw std::invalid_argument("point_to_box: n < 0");
  detail::require_inside(f, Region::box(n), "point_to_box");
  const Grid& g = f.grid();
  return detail::field_search(
      f, {{0, 0}}, [&](int p) { return linf(g.at(p)) <= n; }, [&](int p) { return linf(g.at(p)) == n; }, want_witness);
}

inline PathResult min_circuit_time(const WeightField& f, int m, int n, bool want_witness = false) {
  if (!(n > m && m >= 0)) throw std::invalid_argument("min_circuit_time: need n > m >= 0");
  detail::require_inside(f, Region::annulus(m, n), "min_circuit_time");
  const Grid& g = f.grid();
  thread_local std::unique_ptr<CircuitSearch> cs;
  thread_local Rect cs_box{};
  if (!cs || !(cs_box == g.box)) {
    cs = std::make_unique<CircuitSearch>(g);
    cs_box = g.box;
  }
  auto res = cs->run(
      m + 1, n,
      [&](int p) {
        int r = linf(g.at(p));
        return r > m && r <= n && f.labels.index->mask(p);
      },
      [&](int p) { return f.tau[std::size_t(p)]; }, want_witness);
  PathResult out;
  if (!res.found()) return out;
  out.value = res.value;
  if (want_witness) out.witness = res.cycle;
  return out;
}

// Crossing of Ann(m,n) from B(m) to dB(n); the first vertex sits on dB(m).
inline PathResult annulus_crossing_time(const WeightField& f, int m, int n, bool want_witness = false) {
  if (!(n > m && m >= 0)) throw std::invalid_argument("annulus_crossing_time: need n > m >= 0");
  detail::require_inside(f, Region::box(n), "annulus_crossing_time");
  const Grid& g = f.grid();
  return detail::field_search(
      f, box_ring(m),
      [&](int p) {
        int r = linf(g.at(p));
        return r >= m && r <= n;
      },
      [&](int p) { return linf(g.at(p)) == n; }, want_witness);
}

struct TnResult {
  PathResult circuit;   // over Ann(2^n, 2^(n+1))
  PathResult crossing;  // B(2^n) to dB(2^(n+2))
  double value() const { return circuit.value + crossing.value; }
};

inline TnResult tn(const WeightField& f, int n, bool want_witness = false) {
  if (n < 0 || n > 28) throw std::invalid_argument("tn: n out of range");
  detail::require_inside(f, Region::box(4 << n), "tn");
  return {min_circuit_time(f, 1 << n, 2 << n, want_witness), annulus_crossing_time(f, 1 << n, 4 << n, want_witness)};
}

inline PathResult rect_crossing_time(const WeightField& f, const Rect& q, bool want_witness = false) {
  detail::require_inside(f, Region::rect(q), "rect_crossing_time");
  const Grid& g = f.grid();
  return detail::field_search(
      f, sides(q).left, [&](int p) { return q.contains(g.at(p)); }, [&](int p) { return g.at(p).x == q.x1; }, want_witness);
}

// Left-right crossing time of R(n), or of S(n) when `wide`.
inline PathResult rect_crossing_time(const WeightField& f, int n, bool wide = false, bool want_witness = false) {
  return rect_crossing_time(f, wide ? rect_S(n) : rect_R(n), want_witness);
}

// #V_n(p): vertices v of R(n) with omega_v in (1/2, p], two disjoint p-open
// paths from v to dB(v, Lhat) inside S(n) and B(v, Lhat), and two disjoint
// 1/2-closed paths from v inside S(n), one to each of its top and bottom sides.
inline bool contributes(const LabelField& lab, int n, double p, int Lhat, Vertex v) {
  const Rect S = rect_S(n);
  double w = lab.at(v);
  if (!(w > 0.5 && w <= p)) return false;
  Grid g(S);
  int vp = g.pos(v);
  {
    auto member = [&](int q) {
      Vertex u = g.at(q);
      return q != vp && linf(u - v) <= Lhat && lab.at(u) <= p;
    };
    SplitNetwork net(g, member);
    g.for_each_neighbor(vp, [&](int q) {
      if (net.has(q)) net.flow.add_edge(net.source, net.in(q), 1);
    });
    for (int q = 0; q < int(g.size()); ++q)
      if (net.has(q) && linf(g.at(q) - v) == Lhat) net.flow.add_edge(net.out(q), net.sink, 1);
    if (net.flow.run(net.source, net.sink, 2) < 2) return false;
  }
  auto member = [&](int q) { return q != vp && lab.at(g.at(q)) > 0.5; };
  SplitNetwork net(g, member);
  int top = net.flow.add_node(), bot = net.flow.add_node();
  net.flow.add_edge(top, net.sink, 1);
  net.flow.add_edge(bot, net.sink, 1);
  if (v.y == S.y1) net.flow.add_edge(net.source, top, 1);
  if (v.y == S.y0) net.flow.add_edge(net.source, bot, 1);
  g.for_each_neighbor(vp, [&](int q) {
    if (net.has(q)) net.flow.add_edge(net.source, net.in(q), 1);
  });
  for (int q = 0; q < int(g.size()); ++q) {
    if (!net.has(q)) continue;
    Vertex u = g.at(q);
    if (u.y == S.y1) net.flow.add_edge(net.out(q), top, 1);
    if (u.y == S.y0) net.flow.add_edge(net.out(q), bot, 1);
  }
  return net.flow.run(net.source, net.sink, 2) == 2;
}

inline long count_contributing_vertices(const LabelField& lab, int n, double p, int Lhat) {
  if (n < 1 || n > 12) throw std::invalid_argument("count_contributing_vertices: n out of range");
  if (Lhat < 1 || Lhat > (1 << n)) throw std::invalid_argument("count_contributing_vertices: Lhat too large");
  const Rect S = rect_S(n), R = rect_R(n);
  for (int y = S.y0; y <= S.y1; ++y)
    for (int x = S.x0; x <= S.x1; ++x)
      if (!lab.index->contains({x, y})) throw std::invalid_argument("count_contributing_vertices: labels do not cover S(n)");
  if (!(p > 0.5)) return 0;
  long count = 0;
  for (int y = R.y0; y <= R.y1; ++y)
    for (int x = R.x0; x <= R.x1; ++x)
      if (contributes(lab, n, p, Lhat, {x, y})) ++count;
  return count;
}

// T(0, dB(r)) for r = 1..N from a single search over B(N).  Weights are drawn on
// demand from the counter-based labels of `seed`.
inline std::vector<double> ring_passage_times(const Cdf& F, std::uint64_t seed, int N) {
  Grid g(Rect{-N, N, -N, N});
  thread_local std::unique_ptr<Dijkstra> dj;
  thread_local std::vector<double> tau;
  thread_local std::vector<std::uint32_t> tau_stamp;
  thread_local std::uint32_t stamp = 0;
  if (!dj || !(dj->grid().box == g.box)) {
    dj = std::make_unique<Dijkstra>(g);
    tau.assign(g.size(), 0);
    tau_stamp.assign(g.size(), 0);
    stamp = 0;
  }
  if (++stamp == 0) {
    std::fill(tau_stamp.begin(), tau_stamp.end(), 0);
    stamp = 1;
  }
  std::vector<double> out(std::size_t(N) + 1, kInf);
  out[0] = 0;
  int reached = 0;
  dj->run(
      {g.pos({0, 0})}, [](int) { return true; },
      [&](int p) {
        if (tau_stamp[std::size_t(p)] != stamp) {
          tau_stamp[std::size_t(p)] = stamp;
          tau[std::size_t(p)] = sample_weight(F, label_of(seed, g.at(p)));
        }
        return tau[std::size_t(p)];
      },
      [&](int p, double d) {
        int r = linf(g.at(p));
        while (reached < r) out[std::size_t(++reached)] = d;
        return reached == N;
      });
  return out;
}

}  // namespace dynfpp

#endif
