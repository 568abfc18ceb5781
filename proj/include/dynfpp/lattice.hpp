#ifndef DYNFPP_LATTICE_HPP
#define DYNFPP_LATTICE_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynfpp {

struct Vertex {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Vertex, Vertex) = default;
  friend constexpr auto operator<=>(Vertex, Vertex) = default;
  constexpr Vertex operator+(Vertex o) const { return {x + o.x, y + o.y}; }
  constexpr Vertex operator-(Vertex o) const { return {x - o.x, y - o.y}; }
};

struct VertexHash {
  std::size_t operator()(Vertex v) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(v.x)) << 32) | std::uint32_t(v.y));
  }
};

// E, W, N, S, SE, NW.  Geodesic ties are broken in this order.
inline constexpr std::array<Vertex, 6> kNeighborOffsets{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}}};

// Same offsets in counter-clockwise angular order under the embedding
// e1 = (1,0), e2 = (1/2, sqrt3/2): E, N, NW, W, S, SE.
inline constexpr std::array<Vertex, 6> kCcwOffsets{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

constexpr std::array<Vertex, 6> neighbors(Vertex v) {
  std::array<Vertex, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) out[i] = v + kNeighborOffsets[i];
  return out;
}

constexpr bool adjacent(Vertex a, Vertex b) {
  Vertex d = b - a;
  for (auto o : kNeighborOffsets)
    if (o == d) return true;
  return false;
}

constexpr int linf(Vertex v) { return std::max(v.x < 0 ? -v.x : v.x, v.y < 0 ? -v.y : v.y); }

struct Rect {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  constexpr bool contains(Vertex v) const { return v.x >= x0 && v.x <= x1 && v.y >= y0 && v.y <= y1; }
  constexpr int width() const { return x1 - x0 + 1; }
  constexpr int height() const { return y1 - y0 + 1; }
  constexpr std::int64_t area() const { return std::int64_t(width()) * height(); }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

enum class RegionKind { Box, Annulus, Rect, HalfPlane, Translate };

// Immutable region description.  HalfPlane keeps the vertices of its base with
// y >= 0; with no base it is the whole (unbounded) upper half-plane.
class Region {
 public:
  static Region box(int n) {
    if (n < 0) throw std::invalid_argument("box: n < 0");
    Region r(RegionKind::Box);
    r.a_ = n;
    return r;
  }
  static Region annulus(int m, int n) {
    if (!(n > m && m >= 0)) throw std::invalid_argument("annulus: need n > m >= 0");
    Region r(RegionKind::Annulus);
    r.a_ = m;
    r.b_ = n;
    return r;
  }
  static Region rect(int x0, int x1, int y0, int y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("rect: empty");
    Region r(RegionKind::Rect);
    r.rect_ = {x0, x1, y0, y1};
    return r;
  }
  static Region rect(const Rect& q) { return rect(q.x0, q.x1, q.y0, q.y1); }
  static Region half_plane(const Region& base) {
    Region r(RegionKind::HalfPlane);
    r.base_ = std::make_shared<const Region>(base);
    return r;
  }
  static Region half_plane() { return Region(RegionKind::HalfPlane); }
  static Region translate(const Region& base, Vertex offset) {
    Region r(RegionKind::Translate);
    r.base_ = std::make_shared<const Region>(base);
    r.offset_ = offset;
    return r;
  }

  RegionKind kind() const { return kind_; }
  int box_n() const { return kind_ == RegionKind::Box ? a_ : b_; }
  int inner_m() const { return a_; }
  const Rect& rect_bounds() const { return rect_; }
  const Region* base() const { return base_.get(); }
  Vertex offset() const { return offset_; }

  bool contains(Vertex v) const {
    switch (kind_) {
      case RegionKind::Box: return linf(v) <= a_;
      case RegionKind::Annulus: {
        int r = linf(v);
        return r > a_ && r <= b_;
      }
      case RegionKind::Rect: return rect_.contains(v);
      case RegionKind::HalfPlane: return v.y >= 0 && (!base_ || base_->contains(v));
      case RegionKind::Translate: return base_->contains(v - offset_);
    }
    return false;
  }

  bool bounded() const {
    if (kind_ == RegionKind::HalfPlane) return base_ && base_->bounded();
    if (kind_ == RegionKind::Translate) return base_->bounded();
    return true;
  }

  // Smallest rectangle containing the region.
  Rect bounding_box() const {
    switch (kind_) {
      case RegionKind::Box: return {-a_, a_, -a_, a_};
      case RegionKind::Annulus: return {-b_, b_, -b_, b_};
      case RegionKind::Rect: return rect_;
      case RegionKind::HalfPlane: {
        if (!base_) throw std::domain_error("region unbounded");
        Rect q = base_->bounding_box();
        q.y0 = std::max(q.y0, 0);
        if (q.y1 < q.y0) throw std::domain_error("half-plane restriction is empty");
        return q;
      }
      case RegionKind::Translate: {
        Rect q = base_->bounding_box();
        return {q.x0 + offset_.x, q.x1 + offset_.x, q.y0 + offset_.y, q.y1 + offset_.y};
      }
    }
    return {};
  }

  std::string describe() const {
    switch (kind_) {
      case RegionKind::Box: return "Box(" + std::to_string(a_) + ")";
      case RegionKind::Annulus: return "Annulus(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      case RegionKind::Rect:
        return "Rect(" + std::to_string(rect_.x0) + "," + std::to_string(rect_.x1) + "," + std::to_string(rect_.y0) +
               "," + std::to_string(rect_.y1) + ")";
      case RegionKind::HalfPlane: return base_ ? "HalfPlane(" + base_->describe() + ")" : "HalfPlane";
      case RegionKind::Translate:
        return "Translate(" + base_->describe() + "," + std::to_string(offset_.x) + "," + std::to_string(offset_.y) + ")";
    }
    return {};
  }

 private:
  explicit Region(RegionKind k) : kind_(k) {}
  RegionKind kind_;
  int a_ = 0, b_ = 0;
  Rect rect_{};
  std::shared_ptr<const Region> base_;
  Vertex offset_{};
};

// Dense addressing of a rectangle, row-major with y outer.  Used by all searches;
// positions outside the region are masked by the caller.
struct Grid {
  Rect box{};
  int W = 0, H = 0;

  Grid() = default;
  explicit Grid(const Rect& q) : box(q), W(q.width()), H(q.height()) {}

  std::size_t size() const { return std::size_t(W) * std::size_t(H); }
  bool inside(Vertex v) const { return box.contains(v); }
  int pos(Vertex v) const { return (v.y - box.y0) * W + (v.x - box.x0); }
  Vertex at(int p) const { return {box.x0 + p % W, box.y0 + p / W}; }

  // Calls f(q) for each neighbor position inside the grid, in neighbor order.
  template <class F>
  void for_each_neighbor(int p, F&& f) const {
    int x = p % W, y = p / W;
    if (x + 1 < W) f(p + 1);
    if (x > 0) f(p - 1);
    if (y + 1 < H) f(p + W);
    if (y > 0) f(p - W);
    if (x + 1 < W && y > 0) f(p + 1 - W);
    if (x > 0 && y + 1 < H) f(p - 1 + W);
  }
};

class VertexIndex {
 public:
  explicit VertexIndex(Region region) : region_(std::move(region)) {
    if (!region_.bounded()) throw std::domain_error("index: region unbounded");
    grid_ = Grid(region_.bounding_box());
    slot_.assign(grid_.size(), -1);
    for (int p = 0; p < int(grid_.size()); ++p) {
      Vertex v = grid_.at(p);
      if (region_.contains(v)) {
        slot_[p] = int(verts_.size());
        verts_.push_back(v);
      }
    }
  }

  const Region& region() const { return region_; }
  const Grid& grid() const { return grid_; }
  std::size_t size() const { return verts_.size(); }
  const std::vector<Vertex>& vertices() const { return verts_; }
  Vertex vertex(int id) const { return verts_.at(std::size_t(id)); }
  bool contains(Vertex v) const { return grid_.inside(v) && slot_[grid_.pos(v)] >= 0; }
  // -1 when v is outside the region.
  int id(Vertex v) const { return grid_.inside(v) ? slot_[grid_.pos(v)] : -1; }
  int id_at_pos(int p) const { return slot_[p]; }
  bool mask(int p) const { return slot_[p] >= 0; }

 private:
  Region region_;
  Grid grid_;
  std::vector<int> slot_;
  std::vector<Vertex> verts_;
};

inline VertexIndex index(const Region& r) { return VertexIndex(r); }

struct RectSides {
  std::vector<Vertex> left, right, top, bottom;
};

inline RectSides sides(const Rect& q) {
  RectSides s;
  for (int y = q.y0; y <= q.y1; ++y) {
    s.left.push_back({q.x0, y});
    s.right.push_back({q.x1, y});
  }
  for (int x = q.x0; x <= q.x1; ++x) {
    s.bottom.push_back({x, q.y0});
    s.top.push_back({x, q.y1});
  }
  return s;
}

// l-infinity sphere {|v| = n}, counter-clockwise from (n,0).
inline std::vector<Vertex> box_ring(int n) {
  if (n == 0) return {{0, 0}};
  std::vector<Vertex> out;
  out.reserve(std::size_t(8 * n));
  for (int y = 0; y < n; ++y) out.push_back({n, y});
  for (int x = n; x > -n; --x) out.push_back({x, n});
  for (int y = n; y > -n; --y) out.push_back({-n, y});
  for (int x = -n; x < n; ++x) out.push_back({x, -n});
  for (int y = -n; y < 0; ++y) out.push_back({n, y});
  return out;
}

inline std::vector<Vertex> boundary(const Region& r) {
  switch (r.kind()) {
    case RegionKind::Box: return box_ring(r.box_n());
    case RegionKind::Rect: {
      const Rect& q = r.rect_bounds();
      std::vector<Vertex> out;
      for (int y = q.y0; y <= q.y1; ++y)
        for (int x = q.x0; x <= q.x1; ++x)
          if (x == q.x0 || x == q.x1 || y == q.y0 || y == q.y1) out.push_back({x, y});
      return out;
    }
    default: throw std::invalid_argument("boundary: unsupported region kind " + r.describe());
  }
}

// R(n) = [-2^(n+1), 2^(n+1)] x [-2^n, 2^n]
inline Rect rect_R(int n) { return {-(2 << n), 2 << n, -(1 << n), 1 << n}; }
// S(n) = [-2^(n+2), 2^(n+2)] x [-2^n, 2^n]
inline Rect rect_S(int n) { return {-(4 << n), 4 << n, -(1 << n), 1 << n}; }

}  // namespace dynfpp

#endif
