#ifndef DYNFPP_PERCOLATION_HPP
#define DYNFPP_PERCOLATION_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"
#include "search.hpp"

namespace dynfpp {

// Uniform labels omega_v on a region, stored by grid position.
struct LabelField {
  std::shared_ptr<const VertexIndex> index;
  std::vector<double> omega;

  const Grid& grid() const { return index->grid(); }
  double at(Vertex v) const {
    if (!index->contains(v)) throw std::out_of_range("label outside region");
    return omega[std::size_t(grid().pos(v))];
  }
};

inline LabelField make_labels(const Region& r, std::uint64_t seed, std::uint64_t ordinal = 0) {
  LabelField f{std::make_shared<const VertexIndex>(r), {}};
  const Grid& g = f.grid();
  f.omega.assign(g.size(), 0.0);
  for (int p = 0; p < int(g.size()); ++p)
    if (f.index->mask(p)) f.omega[std::size_t(p)] = label_of(seed, g.at(p), ordinal);
  return f;
}

struct Configuration {
  std::shared_ptr<const VertexIndex> index;
  std::vector<std::uint8_t> open;  // by grid position
  double p = 0;

  const Grid& grid() const { return index->grid(); }
  bool contains(Vertex v) const { return index->contains(v); }
  bool is_open(Vertex v) const { return open[std::size_t(grid().pos(v))] != 0; }
};

inline Configuration open_config(const LabelField& f, double p) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("open_config: p outside [0,1]");
  Configuration c{f.index, std::vector<std::uint8_t>(f.omega.size(), 0), p};
  for (std::size_t i = 0; i < f.omega.size(); ++i) c.open[i] = f.index->mask(int(i)) && f.omega[i] <= p;
  return c;
}

// Configuration from an explicit predicate (tests, enumerations).
template <class IsOpen>
Configuration make_config(const Region& r, IsOpen&& is_open) {
  Configuration c{std::make_shared<const VertexIndex>(r), {}, 0};
  const Grid& g = c.grid();
  c.open.assign(g.size(), 0);
  for (int p = 0; p < int(g.size()); ++p)
    if (c.index->mask(p)) c.open[std::size_t(p)] = is_open(g.at(p)) ? 1 : 0;
  return c;
}

enum class Direction { LR, TB };
enum class Color : std::uint8_t { Closed = 0, Open = 1 };

inline bool has_crossing(const Configuration& cfg, const Rect& rect, Direction dir, Color color) {
  for (int y = rect.y0; y <= rect.y1; ++y)
    for (int x = rect.x0; x <= rect.x1; ++x)
      if (!cfg.contains({x, y})) throw std::invalid_argument("has_crossing: rectangle not inside configuration region");
  Grid g(rect);
  const std::uint8_t want = std::uint8_t(color);
  auto colored = [&](int p) { return cfg.open[std::size_t(cfg.grid().pos(g.at(p)))] == want; };
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::vector<int> queue;
  if (dir == Direction::LR) {
    for (int y = 0; y < g.H; ++y) queue.push_back(y * g.W);
  } else {
    for (int x = 0; x < g.W; ++x) queue.push_back((g.H - 1) * g.W + x);
  }
  std::erase_if(queue, [&](int p) { return !colored(p); });
  for (int p : queue) seen[std::size_t(p)] = 1;
  auto done = [&](int p) { return dir == Direction::LR ? p % g.W == g.W - 1 : p / g.W == 0; };
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int u = queue[i];
    if (done(u)) return true;
    g.for_each_neighbor(u, [&](int v) {
      if (!seen[std::size_t(v)] && colored(v)) {
        seen[std::size_t(v)] = 1;
        queue.push_back(v);
      }
    });
  }
  return false;
}

// ---------------------------------------------------------------------------
// Circuits

struct Circuit {
  std::vector<Vertex> vertices;  // cyclic order; the closing edge is implicit

  bool on(Vertex v) const { return std::find(vertices.begin(), vertices.end(), v) != vertices.end(); }

  // Vertices separated from infinity by the circuit.
  std::vector<Vertex> interior() const {
    Rect q{vertices[0].x, vertices[0].x, vertices[0].y, vertices[0].y};
    for (auto v : vertices) q = {std::min(q.x0, v.x), std::max(q.x1, v.x), std::min(q.y0, v.y), std::max(q.y1, v.y)};
    q = {q.x0 - 1, q.x1 + 1, q.y0 - 1, q.y1 + 1};
    Grid g(q);
    std::vector<std::uint8_t> state(g.size(), 0);  // 1 circuit, 2 outside
    for (auto v : vertices) state[std::size_t(g.pos(v))] = 1;
    std::vector<int> queue{0};
    state[0] = 2;
    for (std::size_t i = 0; i < queue.size(); ++i)
      g.for_each_neighbor(queue[i], [&](int v) {
        if (!state[std::size_t(v)]) {
          state[std::size_t(v)] = 2;
          queue.push_back(v);
        }
      });
    std::vector<Vertex> out;
    for (int p = 0; p < int(g.size()); ++p)
      if (!state[std::size_t(p)]) out.push_back(g.at(p));
    return out;
  }

  bool surrounds(Vertex v) const {
    auto in = interior();
    return std::find(in.begin(), in.end(), v) != in.end();
  }
};

inline bool is_valid_circuit(const std::vector<Vertex>& c) {
  if (c.size() < 3) return false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!adjacent(c[i], c[(i + 1) % c.size()])) return false;
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i] == c[j]) return false;
  }
  return true;
}

// Innermost open circuit around 0 in Ann(m,n).  K is the cluster of B(m)
// together with closed annulus vertices; the circuit lives in the outer
// vertex boundary of K.
inline std::optional<Circuit> innermost_open_circuit(const Configuration& cfg, int m, int n) {
  if (!(n > m && m >= 0)) throw std::invalid_argument("innermost_open_circuit: need n > m >= 0");
  for (auto v : box_ring(n))
    if (!cfg.contains(v)) throw std::invalid_argument("innermost_open_circuit: annulus outside configuration");
  Grid g(Rect{-(n + 1), n + 1, -(n + 1), n + 1});
  std::vector<std::uint8_t> st(g.size(), 0);  // 1 in K, 2 unbounded side, 3 boundary of K
  std::vector<int> queue;
  for (int y = -m; y <= m; ++y)
    for (int x = -m; x <= m; ++x) {
      int p = g.pos({x, y});
      st[std::size_t(p)] = 1;
      queue.push_back(p);
    }
  for (std::size_t i = 0; i < queue.size(); ++i)
    g.for_each_neighbor(queue[i], [&](int v) {
      if (st[std::size_t(v)]) return;
      Vertex w = g.at(v);
      int r = linf(w);
      if (r > m && r <= n && !cfg.is_open(w)) {
        st[std::size_t(v)] = 1;
        queue.push_back(v);
      }
    });
  for (int p : queue)
    if (linf(g.at(p)) == n) return std::nullopt;
  queue.clear();
  for (int p = 0; p < int(g.size()); ++p)
    if (linf(g.at(p)) == n + 1) {
      st[std::size_t(p)] = 2;
      queue.push_back(p);
    }
  for (std::size_t i = 0; i < queue.size(); ++i)
    g.for_each_neighbor(queue[i], [&](int v) {
      if (st[std::size_t(v)]) return;
      st[std::size_t(v)] = 2;
      queue.push_back(v);
    });
  for (int p : queue) {
    bool touches = false;
    g.for_each_neighbor(p, [&](int v) { touches |= st[std::size_t(v)] == 1; });
    if (touches) st[std::size_t(p)] = 3;
  }
  CircuitSearch cs(g);
  auto res = cs.run(m + 1, n, [&](int p) { return st[std::size_t(p)] == 3; }, [](int) { return 1.0; });
  if (!res.found()) return std::nullopt;
  return Circuit{res.cycle};
}

// ---------------------------------------------------------------------------
// Arm events

enum class Sector { Full, UpperHalf };

struct ArmSpec {
  std::vector<Color> colors;  // clockwise
  Sector sector = Sector::Full;

  bool alternating() const {
    if (colors.size() < 2) return false;
    for (std::size_t i = 0; i < colors.size(); ++i)
      if (colors[i] == colors[(i + 1) % colors.size()]) return false;
    return true;
  }
  bool monochromatic() const {
    for (auto c : colors)
      if (c != colors[0]) return false;
    return true;
  }
  void validate() const {
    std::size_t k = colors.size();
    if (k != 1 && k != 2 && k != 4) throw std::invalid_argument("arm spec: length must be 1, 2 or 4");
    if (k == 4 && !alternating() && !monochromatic())
      throw std::invalid_argument("arm spec: four arms must be alternating or monochromatic");
    if (k == 4 && alternating() && sector == Sector::UpperHalf)
      throw std::invalid_argument("arm spec: alternating four-arm event is full-plane only");
  }

  // open1, closed1, poly2, mono2, alt4, mono4; an 'h' suffix selects the upper
  // half-plane.  A comma list of o/c letters is also accepted, e.g. "o,c,o,c".
  static ArmSpec parse(std::string s) {
    ArmSpec a;
    if (!s.empty() && s.back() == 'h' && s != "h") {
      a.sector = Sector::UpperHalf;
      s.pop_back();
    }
    using C = Color;
    if (s == "open1") a.colors = {C::Open};
    else if (s == "closed1") a.colors = {C::Closed};
    else if (s == "poly2") a.colors = {C::Open, C::Closed};
    else if (s == "mono2") a.colors = {C::Open, C::Open};
    else if (s == "alt4") a.colors = {C::Open, C::Closed, C::Open, C::Closed};
    else if (s == "mono4") a.colors = {C::Open, C::Open, C::Open, C::Open};
    else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == ',') continue;
        if (s[i] == 'o') a.colors.push_back(C::Open);
        else if (s[i] == 'c') a.colors.push_back(C::Closed);
        else throw std::invalid_argument("arm spec: cannot parse '" + s + "'");
      }
    }
    a.validate();
    return a;
  }
  std::string name() const {
    std::string s;
    for (std::size_t i = 0; i < colors.size(); ++i) s += std::string(i ? "," : "") + (colors[i] == Color::Open ? "o" : "c");
    return s + (sector == Sector::UpperHalf ? ":h" : "");
  }
};

namespace detail {

struct ArmGeometry {
  int m, n;
  bool half;
  Grid g;
  ArmGeometry(int m_, int n_, bool h) : m(m_), n(n_), half(h), g(Rect{-n_, n_, -n_, n_}) {}
  bool in_region(Vertex v) const {
    int r = linf(v);
    return r > m && r <= n && (!half || v.y >= 0);
  }
  // annulus vertices with a neighbour in B(m)
  std::vector<Vertex> inner_layer() const {
    std::vector<Vertex> out;
    for (auto v : box_ring(m + 1)) {
      if (!in_region(v)) continue;
      for (auto w : neighbors(v))
        if (linf(w) <= m) {
          out.push_back(v);
          break;
        }
    }
    return out;
  }
};

struct Stamps {
  std::vector<std::uint32_t> mark;
  std::uint32_t cur = 0;
  std::vector<int> queue;
  void prepare(std::size_t n) {
    if (mark.size() < n) {
      mark.assign(n, 0);
      cur = 0;
    }
    if (++cur == 0) {
      std::fill(mark.begin(), mark.end(), 0);
      cur = 1;
    }
    queue.clear();
  }
};

inline Stamps& scratch() {
  thread_local Stamps s;
  return s;
}

}  // namespace detail

// Largest l-infinity radius reached by the color-c cluster of the inner layer
// inside Ann(m, nmax) (upper half of it when `half`).  Returns m when the inner
// layer has no vertex of colour c.  Stops early on reaching nmax.
template <class ColorOf>
int arm_reach(ColorOf&& color_of, Color c, int m, int nmax, bool half = false) {
  detail::ArmGeometry geo(m, nmax, half);
  auto& S = detail::scratch();
  S.prepare(geo.g.size());
  int best = m;
  for (auto v : geo.inner_layer()) {
    int p = geo.g.pos(v);
    if (S.mark[std::size_t(p)] == S.cur) continue;
    S.mark[std::size_t(p)] = S.cur;
    if (color_of(v) != c) continue;
    S.queue.push_back(p);
  }
  for (std::size_t i = 0; i < S.queue.size(); ++i) {
    int u = S.queue[i];
    int r = linf(geo.g.at(u));
    if (r > best) {
      best = r;
      if (best == nmax) return best;
    }
    geo.g.for_each_neighbor(u, [&](int q) {
      if (S.mark[std::size_t(q)] == S.cur) return;
      Vertex w = geo.g.at(q);
      if (!geo.in_region(w)) return;
      S.mark[std::size_t(q)] = S.cur;
      if (color_of(w) == c) S.queue.push_back(q);
    });
  }
  return best;
}

// Number of distinct colour-c clusters of Ann(m,n) that join the inner layer to
// the outer ring, counting at most `cap`.
template <class ColorOf>
int crossing_clusters(ColorOf&& color_of, Color c, int m, int n, int cap = 2) {
  detail::ArmGeometry geo(m, n, false);
  auto& S = detail::scratch();
  S.prepare(geo.g.size());
  std::vector<std::int8_t> col(geo.g.size(), -1);
  auto colour = [&](int p) {
    if (col[std::size_t(p)] < 0) col[std::size_t(p)] = std::int8_t(color_of(geo.g.at(p)) == c);
    return col[std::size_t(p)] == 1;
  };
  int count = 0;
  for (auto v : geo.inner_layer()) {
    int s = geo.g.pos(v);
    if (S.mark[std::size_t(s)] == S.cur || !colour(s)) continue;
    S.queue.clear();
    S.queue.push_back(s);
    S.mark[std::size_t(s)] = S.cur;
    bool crosses = false;
    for (std::size_t i = 0; i < S.queue.size(); ++i) {
      int u = S.queue[i];
      if (linf(geo.g.at(u)) == n) crosses = true;
      geo.g.for_each_neighbor(u, [&](int q) {
        if (S.mark[std::size_t(q)] == S.cur || !geo.in_region(geo.g.at(q)) || !colour(q)) return;
        S.mark[std::size_t(q)] = S.cur;
        S.queue.push_back(q);
      });
    }
    if (crosses && ++count >= cap) return count;
  }
  return count;
}

// Maximum number of vertex-disjoint colour-c crossings of the (half-)annulus,
// capped at `cap`.
template <class ColorOf>
int disjoint_crossings(ColorOf&& color_of, Color c, int m, int n, bool half, int cap) {
  detail::ArmGeometry geo(m, n, half);
  SplitNetwork net(geo.g, [&](int p) {
    Vertex v = geo.g.at(p);
    return geo.in_region(v) && color_of(v) == c;
  });
  for (auto v : geo.inner_layer()) {
    int p = geo.g.pos(v);
    if (net.has(p)) net.flow.add_edge(net.source, net.in(p), 1);
  }
  for (int p = 0; p < int(geo.g.size()); ++p)
    if (net.has(p) && linf(geo.g.at(p)) == n) net.flow.add_edge(net.out(p), net.sink, 1);
  return net.flow.run(net.source, net.sink, cap);
}

// Arms cross Ann(m,n): they use annulus vertices only, start next to B(m) and
// end on the outer ring.  color_of is only asked about annulus vertices.
template <class ColorOf>
bool arms_event(ColorOf&& color_of, int m, int n, const ArmSpec& spec) {
  if (!(m >= 0 && m < n)) throw std::invalid_argument("has_arms: need 0 <= m < n");
  spec.validate();
  bool half = spec.sector == Sector::UpperHalf;
  std::size_t k = spec.colors.size();
  if (k == 1) return arm_reach(color_of, spec.colors[0], m, n, half) >= n;
  if (spec.monochromatic()) return disjoint_crossings(color_of, spec.colors[0], m, n, half, int(k)) >= int(k);
  if (k == 2)
    return arm_reach(color_of, Color::Open, m, n, half) >= n && arm_reach(color_of, Color::Closed, m, n, half) >= n;
  // alternating four arms: two open crossing clusters, separated on both sides
  // by closed crossings (self-matching lattice)
  return crossing_clusters(color_of, Color::Open, m, n, 2) >= 2;
}

inline bool has_arms(const Configuration& cfg, int m, int n, const ArmSpec& spec) {
  if (!(m >= 0 && m < n)) throw std::invalid_argument("has_arms: need 0 <= m < n");
  for (auto v : box_ring(n))
    if (!cfg.contains(v) && (spec.sector == Sector::Full || v.y >= 0))
      throw std::invalid_argument("has_arms: annulus outside configuration");
  return arms_event([&](Vertex v) { return cfg.is_open(v) ? Color::Open : Color::Closed; }, m, n, spec);
}

}  // namespace dynfpp

#endif
