// Brute-force reference implementations.  Deliberately naive and independent
// of the library's search code.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "dynfpp/lattice.hpp"

namespace oracle {

using dynfpp::Vertex;

inline const Vertex kSteps[6] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};

inline bool adj(Vertex a, Vertex b) {
  for (auto s : kSteps)
    if (a + s == b) return true;
  return false;
}

inline int norm(Vertex v) { return std::max(std::abs(v.x), std::abs(v.y)); }

struct Graph {
  std::vector<Vertex> verts;
  std::map<Vertex, int> id;
  std::vector<std::vector<int>> nb;

  explicit Graph(std::vector<Vertex> vs) : verts(std::move(vs)) {
    for (int i = 0; i < int(verts.size()); ++i) id[verts[std::size_t(i)]] = i;
    nb.resize(verts.size());
    for (int i = 0; i < int(verts.size()); ++i)
      for (auto s : kSteps) {
        auto it = id.find(verts[std::size_t(i)] + s);
        if (it != id.end()) nb[std::size_t(i)].push_back(it->second);
      }
  }
  int size() const { return int(verts.size()); }
};

inline std::vector<Vertex> rect_vertices(int x0, int x1, int y0, int y1) {
  std::vector<Vertex> out;
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y) out.push_back({x, y});
  return out;
}

// Bellman-Ford relaxation to a fixed point; the first vertex costs nothing.
inline double passage(const Graph& g, const std::function<double(Vertex)>& w, const std::vector<Vertex>& A,
                      const std::vector<Vertex>& B) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(std::size_t(g.size()), inf);
  for (auto a : A)
    if (g.id.count(a)) d[std::size_t(g.id.at(a))] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int u = 0; u < g.size(); ++u) {
      if (d[std::size_t(u)] == inf) continue;
      for (int v : g.nb[std::size_t(u)]) {
        double c = d[std::size_t(u)] + w(g.verts[std::size_t(v)]);
        if (c < d[std::size_t(v)]) {
          d[std::size_t(v)] = c;
          changed = true;
        }
      }
    }
  }
  double best = inf;
  for (auto b : B)
    if (g.id.count(b)) best = std::min(best, d[std::size_t(g.id.at(b))]);
  return best;
}

// Exhaustive self-avoiding path enumeration; tiny graphs only.
inline double passage_enumerate(const Graph& g, const std::function<double(Vertex)>& w, const std::vector<Vertex>& A,
                                const std::vector<Vertex>& B) {
  std::vector<char> target(std::size_t(g.size()), 0), used(std::size_t(g.size()), 0);
  for (auto b : B)
    if (g.id.count(b)) target[std::size_t(g.id.at(b))] = 1;
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, double)> dfs = [&](int u, double acc) {
    if (target[std::size_t(u)]) best = std::min(best, acc);
    for (int v : g.nb[std::size_t(u)]) {
      if (used[std::size_t(v)]) continue;
      used[std::size_t(v)] = 1;
      dfs(v, acc + w(g.verts[std::size_t(v)]));
      used[std::size_t(v)] = 0;
    }
  };
  for (auto a : A) {
    if (!g.id.count(a)) continue;
    int s = g.id.at(a);
    used[std::size_t(s)] = 1;
    dfs(s, 0);
    used[std::size_t(s)] = 0;
  }
  return best;
}

// Edmonds-Karp on integer capacities.
struct Flow {
  struct E {
    int to;
    long long cap;
  };
  std::vector<E> e;
  std::vector<std::vector<int>> g;
  explicit Flow(int n) : g(std::size_t(n)) {}
  void add(int a, int b, long long c) {
    g[std::size_t(a)].push_back(int(e.size()));
    e.push_back({b, c});
    g[std::size_t(b)].push_back(int(e.size()));
    e.push_back({a, 0});
  }
  long long run(int s, int t) {
    long long total = 0;
    while (true) {
      std::vector<int> pre(g.size(), -1);
      std::deque<int> q{s};
      pre[std::size_t(s)] = -2;
      while (!q.empty() && pre[std::size_t(t)] == -1) {
        int u = q.front();
        q.pop_front();
        for (int id : g[std::size_t(u)])
          if (e[std::size_t(id)].cap > 0 && pre[std::size_t(e[std::size_t(id)].to)] == -1) {
            pre[std::size_t(e[std::size_t(id)].to)] = id;
            q.push_back(e[std::size_t(id)].to);
          }
      }
      if (pre[std::size_t(t)] == -1) return total;
      long long f = std::numeric_limits<long long>::max();
      for (int v = t; v != s; v = e[std::size_t(pre[std::size_t(v)] ^ 1)].to) f = std::min(f, e[std::size_t(pre[std::size_t(v)])].cap);
      for (int v = t; v != s; v = e[std::size_t(pre[std::size_t(v)] ^ 1)].to) {
        e[std::size_t(pre[std::size_t(v)])].cap -= f;
        e[std::size_t(pre[std::size_t(v)] ^ 1)].cap += f;
      }
      total += f;
    }
  }
};

// Minimum total weight of a vertex set in Ann(m,n) separating B(m) from the
// outside of B(n).  On the triangular lattice a minimal separating set is a
// circuit, so this equals the minimal circuit weight.  Integer weights only.
inline long long min_separator(const std::function<long long(Vertex)>& w, int m, int n) {
  auto all = rect_vertices(-n - 1, n + 1, -n - 1, n + 1);
  Graph g(all);
  int N = g.size(), s = 2 * N, t = 2 * N + 1;
  const long long big = 1LL << 40;
  Flow f(2 * N + 2);
  for (int i = 0; i < N; ++i) {
    Vertex v = g.verts[std::size_t(i)];
    int r = norm(v);
    f.add(2 * i, 2 * i + 1, (r > m && r <= n) ? w(v) : big);
    if (r <= m) f.add(s, 2 * i, big);
    if (r == n + 1) f.add(2 * i + 1, t, big);
    for (int j : g.nb[std::size_t(i)]) f.add(2 * i + 1, 2 * j, big);
  }
  return f.run(s, t);
}

// Open/closed crossing by union-find over a rectangle.
inline bool crossing(int x0, int x1, int y0, int y1, const std::function<bool(Vertex)>& ok, bool left_right) {
  auto vs = rect_vertices(x0, x1, y0, y1);
  Graph g(vs);
  std::vector<int> parent(std::size_t(g.size()));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[std::size_t(a)] == a ? a : parent[std::size_t(a)] = find(parent[std::size_t(a)]); };
  for (int i = 0; i < g.size(); ++i) {
    if (!ok(g.verts[std::size_t(i)])) continue;
    for (int j : g.nb[std::size_t(i)])
      if (ok(g.verts[std::size_t(j)])) parent[std::size_t(find(i))] = find(j);
  }
  std::set<int> start;
  for (int i = 0; i < g.size(); ++i) {
    Vertex v = g.verts[std::size_t(i)];
    if (ok(v) && (left_right ? v.x == x0 : v.y == y1)) start.insert(find(i));
  }
  for (int i = 0; i < g.size(); ++i) {
    Vertex v = g.verts[std::size_t(i)];
    if (ok(v) && (left_right ? v.x == x1 : v.y == y0) && start.count(find(i))) return true;
  }
  return false;
}

// Number of distinct clusters of `ok` vertices inside Ann(m,n) that touch both
// a neighbour of B(m) and the ring dB(n).
inline int crossing_cluster_count(const std::function<bool(Vertex)>& ok, int m, int n) {
  std::vector<Vertex> vs;
  for (auto v : rect_vertices(-n, n, -n, n))
    if (norm(v) > m) vs.push_back(v);
  Graph g(vs);
  std::vector<int> parent(std::size_t(g.size()));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[std::size_t(a)] == a ? a : parent[std::size_t(a)] = find(parent[std::size_t(a)]); };
  for (int i = 0; i < g.size(); ++i) {
    if (!ok(g.verts[std::size_t(i)])) continue;
    for (int j : g.nb[std::size_t(i)])
      if (ok(g.verts[std::size_t(j)])) parent[std::size_t(find(i))] = find(j);
  }
  std::set<int> inner, both;
  for (int i = 0; i < g.size(); ++i) {
    Vertex v = g.verts[std::size_t(i)];
    if (!ok(v)) continue;
    bool touches = false;
    for (auto s : kSteps)
      if (norm(v + s) <= m) touches = true;
    if (touches) inner.insert(find(i));
  }
  for (int i = 0; i < g.size(); ++i) {
    Vertex v = g.verts[std::size_t(i)];
    if (ok(v) && norm(v) == n && inner.count(find(i))) both.insert(find(i));
  }
  return int(both.size());
}

// BFS reachability from s to t in g avoiding `banned`, over vertices allowed by `ok`.
inline bool reach(const std::vector<std::vector<int>>& nb, int s, int t, int banned) {
  std::vector<char> seen(nb.size(), 0);
  std::deque<int> q{s};
  seen[std::size_t(s)] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == t) return true;
    for (int v : nb[std::size_t(u)])
      if (v != banned && !seen[std::size_t(v)]) {
        seen[std::size_t(v)] = 1;
        q.push_back(v);
      }
  }
  return false;
}

// Menger: two internally disjoint s-t paths exist iff s, t are connected, not
// adjacent, and no single other vertex separates them.
inline bool two_disjoint(const std::vector<std::vector<int>>& nb, int s, int t) {
  for (int v : nb[std::size_t(s)])
    if (v == t) return false;
  if (!reach(nb, s, t, -1)) return false;
  for (int w = 0; w < int(nb.size()); ++w)
    if (w != s && w != t && !reach(nb, s, t, w)) return false;
  return true;
}

// The four conditions of a contributing vertex, checked by Menger cut-vertex
// enumeration.  label(u) covers S(n).
inline bool contributes(const std::function<double(Vertex)>& label, int n, double p, int Lhat, Vertex v) {
  int X = 4 << n, Y = 1 << n;
  double wv = label(v);
  if (!(wv > 0.5 && wv <= p)) return false;
  auto inS = [&](Vertex u) { return std::abs(u.x) <= X && std::abs(u.y) <= Y; };
  {
    // open arms: graph over p-open vertices of S(n) within B(v,Lhat), plus v, plus sink
    std::vector<Vertex> vs{v};
    for (auto u : rect_vertices(v.x - Lhat, v.x + Lhat, v.y - Lhat, v.y + Lhat))
      if (u != v && inS(u) && label(u) <= p) vs.push_back(u);
    Graph g(vs);
    auto nb = g.nb;
    int t = int(nb.size());
    nb.emplace_back();
    for (int i = 1; i < g.size(); ++i)
      if (norm(g.verts[std::size_t(i)] - v) == Lhat) {
        nb[std::size_t(i)].push_back(t);
        nb[std::size_t(t)].push_back(i);
      }
    if (!two_disjoint(nb, 0, t)) return false;
  }
  // closed arms to top and bottom: TOP and BOT are single vertices joined to t
  std::vector<Vertex> vs{v};
  for (auto u : rect_vertices(-X, X, -Y, Y))
    if (u != v && label(u) > 0.5) vs.push_back(u);
  Graph g(vs);
  auto nb = g.nb;
  int top = int(nb.size()), bot = top + 1, t = top + 2;
  nb.resize(nb.size() + 3);
  auto link = [&](int a, int b) {
    nb[std::size_t(a)].push_back(b);
    nb[std::size_t(b)].push_back(a);
  };
  for (int i = 0; i < g.size(); ++i) {
    if (g.verts[std::size_t(i)].y == Y) link(i, top);
    if (g.verts[std::size_t(i)].y == -Y) link(i, bot);
  }
  link(top, t);
  link(bot, t);
  return two_disjoint(nb, 0, t);
}

// Simple cycle check plus separation of `inside` from far away.
inline bool surrounds(const std::vector<Vertex>& cyc, Vertex inside, int far) {
  std::set<Vertex> on(cyc.begin(), cyc.end());
  if (on.count(inside)) return false;
  auto vs = rect_vertices(-far, far, -far, far);
  Graph g(vs);
  std::vector<char> seen(std::size_t(g.size()), 0);
  std::deque<int> q{g.id.at(inside)};
  seen[std::size_t(q.front())] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (norm(g.verts[std::size_t(u)]) == far) return false;
    for (int v : g.nb[std::size_t(u)])
      if (!seen[std::size_t(v)] && !on.count(g.verts[std::size_t(v)])) {
        seen[std::size_t(v)] = 1;
        q.push_back(v);
      }
  }
  return true;
}

}  // namespace oracle
