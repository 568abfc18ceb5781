#ifndef DYNFPP_SEARCH_HPP
#define DYNFPP_SEARCH_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "lattice.hpp"

namespace dynfpp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Vertex-weighted shortest paths on a Grid.  Moving u -> v costs w(v), so a
// path's cost leaves out its first vertex.  Zero-weight neighbours are settled
// straight away from a stack, which keeps big zero clusters cheap.
class Dijkstra {
 public:
  explicit Dijkstra(const Grid& g) : g_(g), dist_(g.size(), kInf), parent_(g.size(), -1), seen_(g.size(), 0), done_(g.size(), 0) {}

  const Grid& grid() const { return g_; }

  // settle(pos, d) is called once per settled position in nondecreasing d and
  // may return true to stop.  Positions with d >= cutoff are never settled.
  template <class Allowed, class Weight, class Settle>
  void run(const std::vector<int>& sources, Allowed&& allowed, Weight&& weight, Settle&& settle, double cutoff = kInf) {
    next_stamp();
    heap_ = {};
    stack_.clear();
    for (int s : sources) {
      if (!allowed(s) || is_seen(s)) continue;
      mark(s, 0.0, -1);
      stack_.push_back(s);
    }
    if (!(cutoff > 0)) return;
    while (true) {
      int u;
      double d;
      if (!stack_.empty()) {
        u = stack_.back();
        stack_.pop_back();
        d = dist_[u];
      } else {
        if (heap_.empty()) return;
        auto [hd, hu] = heap_.top();
        heap_.pop();
        if (done_[hu] == stamp_ || hd > dist_[hu]) continue;
        if (hd >= cutoff) return;
        u = hu;
        d = hd;
      }
      if (done_[u] == stamp_) continue;
      done_[u] = stamp_;
      if (settle(u, d)) return;
      g_.for_each_neighbor(u, [&](int v) {
        if (done_[v] == stamp_ || !allowed(v)) return;
        double nd = d + weight(v);
        if (is_seen(v) && !(nd < dist_[v])) return;
        mark(v, nd, u);
        if (nd == d)
          stack_.push_back(v);
        else
          heap_.push({nd, v});
      });
    }
  }

  bool reached(int p) const { return seen_[p] == stamp_; }
  bool settled(int p) const { return done_[p] == stamp_; }
  double dist(int p) const { return reached(p) ? dist_[p] : kInf; }

  std::vector<int> path_to(int p) const {
    std::vector<int> path;
    for (int q = p; q >= 0; q = parent_[q]) path.push_back(q);
    return {path.rbegin(), path.rend()};
  }

 private:
  struct Item {
    double d;
    int p;
    bool operator<(const Item& o) const { return d > o.d || (d == o.d && p > o.p); }
  };
  void next_stamp() {
    if (++stamp_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      std::fill(done_.begin(), done_.end(), 0);
      stamp_ = 1;
    }
  }
  bool is_seen(int p) const { return seen_[p] == stamp_; }
  void mark(int p, double d, int parent) {
    seen_[p] = stamp_;
    dist_[p] = d;
    parent_[p] = parent;
  }

  Grid g_;
  std::vector<double> dist_;
  std::vector<int> parent_;
  std::vector<std::uint32_t> seen_, done_;
  std::uint32_t stamp_ = 0;
  std::priority_queue<Item> heap_;
  std::vector<int> stack_;
};

// The ray used to detect winding around the origin runs just below the positive
// x-axis; it is crossed by the edges from (a,0), a >= 1, to (a,-1) and (a+1,-1).
constexpr bool crosses_cut(Vertex u, Vertex v) {
  if (u.y == -1 && v.y == 0) std::swap(u, v);
  if (!(u.y == 0 && v.y == -1) || u.x < 1) return false;
  return v.x == u.x || v.x == u.x + 1;
}

struct CircuitResult {
  double value = kInf;
  std::vector<Vertex> cycle;  // simple, consecutive vertices adjacent, closes up
  bool found() const { return value < kInf; }
};

// Removes even-winding loops from a closed walk until a simple odd loop is left.
inline std::vector<Vertex> odd_simple_loop(const std::vector<Vertex>& walk) {
  // walk[0] == walk.back()
  std::vector<Vertex> stack;
  std::vector<int> parity;  // crossings between stack[0] and stack[i]
  for (std::size_t i = 0; i < walk.size(); ++i) {
    Vertex v = walk[i];
    int par = stack.empty() ? 0 : parity.back() ^ int(crosses_cut(stack.back(), v));
    auto it = std::find(stack.begin(), stack.end(), v);
    if (it != stack.end()) {
      std::size_t j = std::size_t(it - stack.begin());
      if ((par ^ parity[j]) & 1) {
        std::vector<Vertex> loop(stack.begin() + std::ptrdiff_t(j), stack.end());
        return loop;
      }
      stack.resize(j + 1);
      parity.resize(j + 1);
      continue;
    }
    stack.push_back(v);
    parity.push_back(par);
  }
  return {};
}

// Minimum-weight circuit around the origin inside `allowed`.  Each cut vertex
// (a,0), a in [a_lo, a_hi], is joined to itself through the other sheet of the
// double cover; the cut vertex's weight is charged on arrival.
class CircuitSearch {
 public:
  explicit CircuitSearch(const Grid& g) : g_(g), dist_(2 * g.size(), kInf), parent_(2 * g.size(), -1), seen_(2 * g.size(), 0) {}

  template <class Allowed, class Weight>
  CircuitResult run(int a_lo, int a_hi, Allowed&& allowed, Weight&& weight, bool want_cycle = true, double cutoff = kInf) {
    CircuitResult best;
    best.value = cutoff;
    int best_end = -1;
    std::vector<int> best_path;
    for (int a = std::max(a_lo, 1); a <= a_hi; ++a) {
      Vertex c{a, 0};
      if (!g_.inside(c)) continue;
      int cp = g_.pos(c);
      if (!allowed(cp)) continue;
      double got = search(cp, allowed, weight, best.value);
      if (got < best.value) {
        best.value = got;
        best_end = 2 * cp + 1;
        if (want_cycle) best_path = trace(best_end);
      }
    }
    if (best_end < 0) return {};
    if (want_cycle) {
      std::vector<Vertex> walk;
      for (int s : best_path) walk.push_back(g_.at(s / 2));
      best.cycle = odd_simple_loop(walk);
    }
    return best;
  }

 private:
  template <class Allowed, class Weight>
  double search(int cp, Allowed& allowed, Weight& weight, double bound) {
    if (++stamp_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      stamp_ = 1;
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    int s = 2 * cp, t = 2 * cp + 1;
    seen_[s] = stamp_;
    dist_[s] = 0;
    parent_[s] = -1;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [d, st] = heap.top();
      heap.pop();
      if (d > dist_[st]) continue;
      if (d >= bound) return kInf;
      if (st == t) return d;
      int u = st / 2, sheet = st & 1;
      Vertex uv = g_.at(u);
      g_.for_each_neighbor(u, [&](int v) {
        if (!allowed(v)) return;
        int ns = 2 * v + (sheet ^ int(crosses_cut(uv, g_.at(v))));
        double nd = d + weight(v);
        if (seen_[ns] == stamp_ && !(nd < dist_[ns])) return;
        seen_[ns] = stamp_;
        dist_[ns] = nd;
        parent_[ns] = st;
        heap.push({nd, ns});
      });
    }
    return kInf;
  }

  std::vector<int> trace(int st) const {
    std::vector<int> path;
    for (int q = st; q >= 0; q = parent_[q]) path.push_back(q);
    return {path.rbegin(), path.rend()};
  }

  Grid g_;
  std::vector<double> dist_;
  std::vector<int> parent_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t stamp_ = 0;
};

// Dinic max-flow, used for vertex-disjoint path counts.
class MaxFlow {
 public:
  explicit MaxFlow(int n = 0) { reset(n); }
  void reset(int n) {
    head_.assign(std::size_t(n), -1);
    edges_.clear();
  }
  int add_node() {
    head_.push_back(-1);
    return int(head_.size()) - 1;
  }
  int size() const { return int(head_.size()); }
  void add_edge(int u, int v, int cap) {
    edges_.push_back({v, head_[u], cap});
    head_[u] = int(edges_.size()) - 1;
    edges_.push_back({u, head_[v], 0});
    head_[v] = int(edges_.size()) - 1;
  }

  // Stops as soon as `limit` units are routed.
  int run(int s, int t, int limit = std::numeric_limits<int>::max()) {
    int flow = 0;
    level_.resize(head_.size());
    it_.resize(head_.size());
    while (flow < limit && bfs(s, t)) {
      for (std::size_t i = 0; i < head_.size(); ++i) it_[i] = head_[i];
      while (flow < limit) {
        int f = dfs(s, t, limit - flow);
        if (!f) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  struct Edge {
    int to, next, cap;
  };
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> q{s};
    level_[s] = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      int u = q[i];
      for (int e = head_[u]; e >= 0; e = edges_[e].next)
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push_back(edges_[e].to);
        }
    }
    return level_[t] >= 0;
  }
  // iterative augmenting DFS along the level graph
  int dfs(int s, int t, int push) {
    std::vector<int> path_edges;
    int u = s;
    while (true) {
      if (u == t) {
        int f = push;
        for (int e : path_edges) f = std::min(f, edges_[e].cap);
        for (int e : path_edges) {
          edges_[e].cap -= f;
          edges_[e ^ 1].cap += f;
        }
        return f;
      }
      int& e = it_[u];
      while (e >= 0 && !(edges_[e].cap > 0 && level_[edges_[e].to] == level_[u] + 1)) e = edges_[e].next;
      if (e < 0) {
        if (path_edges.empty()) return 0;
        level_[u] = -1;
        int back = path_edges.back();
        path_edges.pop_back();
        u = edges_[back ^ 1].to;
        it_[u] = edges_[it_[u]].next;
        continue;
      }
      path_edges.push_back(e);
      u = edges_[e].to;
    }
  }

  std::vector<int> head_;
  std::vector<Edge> edges_;
  std::vector<int> level_, it_;
};

// Vertex-split flow network over grid positions: node 2i is "in", 2i+1 "out".
struct SplitNetwork {
  MaxFlow flow;
  std::vector<int> node_of;  // grid position -> compact index, -1 if absent
  int source = -1, sink = -1;

  template <class Member>
  SplitNetwork(const Grid& g, Member&& member) {
    node_of.assign(g.size(), -1);
    int count = 0;
    for (int p = 0; p < int(g.size()); ++p)
      if (member(p)) node_of[p] = count++;
    flow.reset(2 * count + 2);
    source = 2 * count;
    sink = 2 * count + 1;
    for (int p = 0; p < int(g.size()); ++p) {
      int i = node_of[p];
      if (i < 0) continue;
      flow.add_edge(2 * i, 2 * i + 1, 1);
      g.for_each_neighbor(p, [&](int q) {
        if (node_of[q] >= 0) flow.add_edge(2 * i + 1, 2 * node_of[q], 1);
      });
    }
  }
  int in(int p) const { return 2 * node_of[p]; }
  int out(int p) const { return 2 * node_of[p] + 1; }
  bool has(int p) const { return node_of[p] >= 0; }
};

}  // namespace dynfpp

#endif
