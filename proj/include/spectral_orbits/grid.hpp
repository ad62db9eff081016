#pragma once

// Planar spectra as resolution-eps grid data: half-open boxes
// B(n,m) = (eps*n - eps/2, eps*n + eps/2] x i(eps*m - eps/2, eps*m + eps/2],
// plus finitely many isolated points. The represented set is the union of the
// *closed* boxes and the points; all distances below are exact for that set.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral_orbits {

using Complex = std::complex<double>;

struct GridBox {
  long long n = 0;
  long long m = 0;
  friend bool operator==(const GridBox&, const GridBox&) = default;
  friend auto operator<=>(const GridBox&, const GridBox&) = default;
};

struct IsolatedPoint {
  Complex value;
  bool is_cluster_point = false;
};

inline bool point_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

inline GridBox box_index(Complex z, double resolution) {
  return GridBox{static_cast<long long>(std::ceil(z.real() / resolution - 0.5)),
                 static_cast<long long>(std::ceil(z.imag() / resolution - 0.5))};
}

inline Complex box_center(GridBox b, double resolution) {
  return Complex(resolution * static_cast<double>(b.n),
                 resolution * static_cast<double>(b.m));
}

inline bool point_in_closed_box(Complex z, GridBox b, double resolution) {
  const double h = resolution / 2.0;
  const Complex c = box_center(b, resolution);
  return std::abs(z.real() - c.real()) <= h && std::abs(z.imag() - c.imag()) <= h;
}

// Distance from a point to one closed box (componentwise clamp).
inline double dist_point_box(Complex z, GridBox b, double resolution) {
  const double h = resolution / 2.0;
  const Complex c = box_center(b, resolution);
  const double dx = std::max(0.0, std::abs(z.real() - c.real()) - h);
  const double dy = std::max(0.0, std::abs(z.imag() - c.imag()) - h);
  return std::hypot(dx, dy);
}

class GridSet {
 public:
  GridSet() = default;
  GridSet(double resolution, std::vector<GridBox> boxes,
          std::vector<IsolatedPoint> isolated_points = {})
      : resolution_(resolution), boxes_(std::move(boxes)),
        isolated_points_(std::move(isolated_points)) {
    if (!(resolution_ > 0.0)) throw std::invalid_argument("resolution must be positive");
    std::sort(boxes_.begin(), boxes_.end());
    boxes_.erase(std::unique(boxes_.begin(), boxes_.end()), boxes_.end());
    std::sort(isolated_points_.begin(), isolated_points_.end(),
              [](const IsolatedPoint& a, const IsolatedPoint& b) {
                return point_less(a.value, b.value);
              });
    for (std::size_t i = 0; i + 1 < isolated_points_.size(); ++i) {
      if (isolated_points_[i].value == isolated_points_[i + 1].value)
        throw std::invalid_argument("isolated points must be pairwise distinct");
    }
    for (const auto& p : isolated_points_) {
      for (const auto& b : boxes_) {
        if (point_in_closed_box(p.value, b, resolution_))
          throw std::invalid_argument("isolated point lies inside a box");
      }
    }
  }

  double resolution() const { return resolution_; }
  const std::vector<GridBox>& boxes() const { return boxes_; }
  const std::vector<IsolatedPoint>& isolated_points() const { return isolated_points_; }
  bool empty() const { return boxes_.empty() && isolated_points_.empty(); }

  bool contains_box(GridBox b) const {
    return std::binary_search(boxes_.begin(), boxes_.end(), b);
  }

  // Membership of a point in the represented set (closed boxes + points).
  bool contains_point(Complex z) const {
    for (const auto& b : boxes_)
      if (point_in_closed_box(z, b, resolution_)) return true;
    for (const auto& p : isolated_points_)
      if (p.value == z) return true;
    return false;
  }

  friend bool operator==(const GridSet& a, const GridSet& b) {
    if (a.resolution_ != b.resolution_ || a.boxes_ != b.boxes_) return false;
    if (a.isolated_points_.size() != b.isolated_points_.size()) return false;
    for (std::size_t i = 0; i < a.isolated_points_.size(); ++i) {
      if (a.isolated_points_[i].value != b.isolated_points_[i].value) return false;
      if (a.isolated_points_[i].is_cluster_point != b.isolated_points_[i].is_cluster_point)
        return false;
    }
    return true;
  }

 private:
  double resolution_ = 1.0;
  std::vector<GridBox> boxes_;
  std::vector<IsolatedPoint> isolated_points_;
};

// Rounds a finite point multiset onto the grid. With as_regions the covering
// boxes are recorded; otherwise the deduplicated points become isolated points.
inline GridSet rasterize(const std::vector<Complex>& points, double resolution,
                         bool as_regions = true) {
  if (points.empty()) throw std::invalid_argument("empty spectrum");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (as_regions) {
    std::vector<GridBox> boxes;
    boxes.reserve(points.size());
    for (const auto& z : points) boxes.push_back(box_index(z, resolution));
    return GridSet(resolution, std::move(boxes));
  }
  std::vector<Complex> uniq = points;
  std::sort(uniq.begin(), uniq.end(), point_less);
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<IsolatedPoint> pts;
  pts.reserve(uniq.size());
  for (const auto& z : uniq) pts.push_back(IsolatedPoint{z, false});
  return GridSet(resolution, {}, std::move(pts));
}

struct Component {
  enum class Kind { region, singleton };
  int id = 0;
  Kind kind = Kind::region;
  std::vector<GridBox> boxes;      // region only, sorted
  Complex point;                   // singleton only
  bool is_cluster_point = false;   // singleton only
};

namespace detail {

inline const std::array<std::pair<int, int>, 8>& eight_neighbors() {
  static const std::array<std::pair<int, int>, 8> k = {{{-1, -1}, {-1, 0}, {-1, 1},
                                                        {0, -1},  {0, 1},
                                                        {1, -1},  {1, 0},  {1, 1}}};
  return k;
}

}  // namespace detail

// Spectrum components: 8-way box adjacency (diagonal touching counts, the
// closed boxes share at least a corner point); each isolated point is its own
// singleton. Ids are deterministic: regions by smallest box, then singletons
// by point, lexicographically.
inline std::vector<Component> connected_components(const GridSet& g) {
  std::vector<Component> out;
  const auto& boxes = g.boxes();
  std::map<GridBox, int> index;
  for (std::size_t i = 0; i < boxes.size(); ++i) index[boxes[i]] = static_cast<int>(i);
  std::vector<char> seen(boxes.size(), 0);
  int next_id = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (seen[i]) continue;
    Component comp;
    comp.id = next_id++;
    comp.kind = Component::Kind::region;
    std::vector<int> stack{static_cast<int>(i)};
    seen[i] = 1;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      comp.boxes.push_back(boxes[static_cast<std::size_t>(cur)]);
      const GridBox b = boxes[static_cast<std::size_t>(cur)];
      for (const auto& [dn, dm] : detail::eight_neighbors()) {
        auto it = index.find(GridBox{b.n + dn, b.m + dm});
        if (it != index.end() && !seen[static_cast<std::size_t>(it->second)]) {
          seen[static_cast<std::size_t>(it->second)] = 1;
          stack.push_back(it->second);
        }
      }
    }
    std::sort(comp.boxes.begin(), comp.boxes.end());
    out.push_back(std::move(comp));
  }
  for (const auto& p : g.isolated_points()) {
    Component comp;
    comp.id = next_id++;
    comp.kind = Component::Kind::singleton;
    comp.point = p.value;
    comp.is_cluster_point = p.is_cluster_point;
    out.push_back(std::move(comp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact distances between represented sets.
// ---------------------------------------------------------------------------

inline double dist_point_gridset(Complex z, const GridSet& g) {
  if (g.empty()) throw std::invalid_argument("distance to empty grid set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : g.boxes()) best = std::min(best, dist_point_box(z, b, g.resolution()));
  for (const auto& p : g.isolated_points()) best = std::min(best, std::abs(z - p.value));
  return best;
}

namespace detail {

// Within one axis-aligned cell each piece of the target set acts as a point,
// a vertical line, a horizontal line, or covers the cell.
struct Prim {
  enum class Type { point, vline, hline, covers } type;
  double a = 0.0;  // point x / line coordinate
  double b = 0.0;  // point y
};

struct Rect {
  double x1, x2, y1, y2;
};

inline double dist_rect_prim(const Rect& r, const Prim& p) {
  auto gap = [](double lo, double hi, double v) {
    return std::max(0.0, std::max(lo - v, v - hi));
  };
  switch (p.type) {
    case Prim::Type::point:
      return std::hypot(gap(r.x1, r.x2, p.a), gap(r.y1, r.y2, p.b));
    case Prim::Type::vline:
      return gap(r.x1, r.x2, p.a);
    case Prim::Type::hline:
      return gap(r.y1, r.y2, p.b);
    case Prim::Type::covers:
      return 0.0;
  }
  return 0.0;
}

inline double dist_point_prim(double x, double y, const Prim& p) {
  switch (p.type) {
    case Prim::Type::point:
      return std::hypot(x - p.a, y - p.b);
    case Prim::Type::vline:
      return std::abs(x - p.a);
    case Prim::Type::hline:
      return std::abs(y - p.b);
    case Prim::Type::covers:
      return 0.0;
  }
  return 0.0;
}

// Roots of A t^2 + B t + C = 0 within [lo, hi] (closed, small guard).
inline void quad_roots_in(double A, double B, double C, double lo, double hi,
                          std::vector<double>& out) {
  const double guard = 1e-12 * (1.0 + std::abs(hi - lo));
  auto push = [&](double t) {
    if (t >= lo - guard && t <= hi + guard) out.push_back(std::clamp(t, lo, hi));
  };
  if (std::abs(A) < 1e-300) {
    if (std::abs(B) > 1e-300) push(-C / B);
    return;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (B + (B >= 0.0 ? s : -s));
  push(q / A);
  if (q != 0.0) push(C / q);
  else push(0.0);
}

// d^2 along the segment {base + t*dir : dir is a unit axis direction} for a
// primitive, as quadratic coefficients (A, B, C) in t.
inline void prim_quadratic_along(const Prim& p, bool horizontal, double fixed,
                                 double& A, double& B, double& C) {
  // horizontal: point (t, fixed); vertical: point (fixed, t)
  switch (p.type) {
    case Prim::Type::point: {
      const double u = horizontal ? p.a : p.b;
      const double v = horizontal ? p.b : p.a;
      A = 1.0;
      B = -2.0 * u;
      C = u * u + (fixed - v) * (fixed - v);
      return;
    }
    case Prim::Type::vline: {
      if (horizontal) {
        A = 1.0; B = -2.0 * p.a; C = p.a * p.a;
      } else {
        A = 0.0; B = 0.0; C = (fixed - p.a) * (fixed - p.a);
      }
      return;
    }
    case Prim::Type::hline: {
      if (horizontal) {
        A = 0.0; B = 0.0; C = (fixed - p.b) * (fixed - p.b);
      } else {
        A = 1.0; B = -2.0 * p.b; C = p.b * p.b;
      }
      return;
    }
    case Prim::Type::covers:
      A = B = C = 0.0;
      return;
  }
}

// Points equidistant from three primitives (closed forms; at most two).
inline void three_way_ties(const Prim& p1, const Prim& p2, const Prim& p3,
                           std::vector<std::pair<double, double>>& out) {
  std::array<const Prim*, 3> ps = {&p1, &p2, &p3};
  std::vector<const Prim*> points, vls, hls;
  for (auto* p : ps) {
    switch (p->type) {
      case Prim::Type::point: points.push_back(p); break;
      case Prim::Type::vline: vls.push_back(p); break;
      case Prim::Type::hline: hls.push_back(p); break;
      case Prim::Type::covers: return;
    }
  }
  auto push = [&](double x, double y) { out.emplace_back(x, y); };

  if (points.size() == 3) {  // circumcenter
    const double ax = points[0]->a, ay = points[0]->b;
    const double bx = points[1]->a, by = points[1]->b;
    const double cx = points[2]->a, cy = points[2]->b;
    const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(d) < 1e-14) return;
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    push((a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d,
         (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d);
    return;
  }

  if (points.size() == 2) {  // two points and one axis line
    const double ax = points[0]->a, ay = points[0]->b;
    const double bx = points[1]->a, by = points[1]->b;
    const bool vertical = !vls.empty();
    const double u = vertical ? vls[0]->a : hls[0]->b;
    // bisector of the two points: alpha*x + beta*y = gamma
    const double alpha = 2.0 * (bx - ax), beta = 2.0 * (by - ay);
    const double gamma = bx * bx + by * by - ax * ax - ay * ay;
    // |c - a|^2 = (x - u)^2 (vertical) or (y - u)^2 (horizontal)
    // Reduce to one variable along the bisector line.
    if (std::abs(alpha) < 1e-14 && std::abs(beta) < 1e-14) return;
    // Parametrize the bisector: pick the larger coefficient to solve for.
    if (std::abs(beta) >= std::abs(alpha)) {
      // y = (gamma - alpha x)/beta; plug into the point/line equality in x.
      const double k1 = -alpha / beta, k0 = gamma / beta;  // y = k1 x + k0
      double A, B, C;
      // (x-ax)^2 + (y-ay)^2 - (vertical ? (x-u)^2 : (y-u)^2) = 0
      const double qa = k1 * k1, qb = 2.0 * k1 * (k0 - ay), qc = (k0 - ay) * (k0 - ay);
      if (vertical) {
        A = 1.0 + qa - 1.0;
        B = -2.0 * ax + qb + 2.0 * u;
        C = ax * ax + qc - u * u;
      } else {
        A = 1.0 + qa - k1 * k1;
        B = -2.0 * ax + qb - (2.0 * k1 * (k0 - u));
        C = ax * ax + qc - (k0 - u) * (k0 - u);
      }
      std::vector<double> roots;
      quad_roots_in(A, B, C, -1e18, 1e18, roots);
      for (double x : roots) push(x, k1 * x + k0);
    } else {
      const double k1 = -beta / alpha, k0 = gamma / alpha;  // x = k1 y + k0
      double A, B, C;
      const double qa = k1 * k1, qb = 2.0 * k1 * (k0 - ax), qc = (k0 - ax) * (k0 - ax);
      if (vertical) {
        A = 1.0 + qa - k1 * k1;
        B = -2.0 * ay + qb - (2.0 * k1 * (k0 - u));
        C = ay * ay + qc - (k0 - u) * (k0 - u);
      } else {
        A = 1.0 + qa - 1.0;
        B = -2.0 * ay + qb + 2.0 * u;
        C = ay * ay + qc - u * u;
      }
      std::vector<double> roots;
      quad_roots_in(A, B, C, -1e18, 1e18, roots);
      for (double y : roots) push(k1 * y + k0, y);
    }
    return;
  }

  if (points.size() == 1) {  // one point and two axis lines
    const double px = points[0]->a, py = points[0]->b;
    if (vls.size() == 2) {
      const double X = 0.5 * (vls[0]->a + vls[1]->a);
      const double R = (X - vls[0]->a) * (X - vls[0]->a) - (X - px) * (X - px);
      if (R < 0.0) return;
      const double s = std::sqrt(R);
      push(X, py + s);
      push(X, py - s);
    } else if (hls.size() == 2) {
      const double Y = 0.5 * (hls[0]->b + hls[1]->b);
      const double R = (Y - hls[0]->b) * (Y - hls[0]->b) - (Y - py) * (Y - py);
      if (R < 0.0) return;
      const double s = std::sqrt(R);
      push(px + s, Y);
      push(px - s, Y);
    } else {  // one vline, one hline: |x-u| = |y-v|, and = |c-p|
      const double u = vls[0]->a, v = hls[0]->b;
      for (int sign = -1; sign <= 1; sign += 2) {
        // y = v + sign*(x - u); (x-px)^2 + (y-py)^2 = (x-u)^2
        const double k1 = static_cast<double>(sign), k0 = v - static_cast<double>(sign) * u;
        const double A = 1.0 + k1 * k1 - 1.0;
        const double B = -2.0 * px + 2.0 * k1 * (k0 - py) + 2.0 * u;
        const double C = px * px + (k0 - py) * (k0 - py) - u * u;
        std::vector<double> roots;
        quad_roots_in(A, B, C, -1e18, 1e18, roots);
        for (double x : roots) push(x, k1 * x + k0);
      }
    }
    return;
  }

  // three axis lines
  if (vls.size() == 2 && hls.size() == 1) {
    const double X = 0.5 * (vls[0]->a + vls[1]->a);
    const double r = std::abs(X - vls[0]->a);
    push(X, hls[0]->b + r);
    push(X, hls[0]->b - r);
  } else if (hls.size() == 2 && vls.size() == 1) {
    const double Y = 0.5 * (hls[0]->b + hls[1]->b);
    const double r = std::abs(Y - hls[0]->b);
    push(vls[0]->a + r, Y);
    push(vls[0]->a - r, Y);
  }
}

// Exact sup over one closed box of the distance to the target set. Candidates:
// cell corners, pairwise tie points on cell edges, interior three-way ties,
// and feet of point primitives on cell edges; the max of the true distance
// over these equals the sup (each piece distance is convex, so maxima of the
// lower envelope land on corners, edge ties, or multi-way interior ties).
inline double sup_over_box(GridBox xb, double xres, const GridSet& y) {
  const double h = xres / 2.0;
  const Complex c = box_center(xb, xres);
  const double bx1 = c.real() - h, bx2 = c.real() + h;
  const double by1 = c.imag() - h, by2 = c.imag() + h;

  // Cut lines from y's box edges that cross the interior of this box.
  std::set<double> xcuts{bx1, bx2}, ycuts{by1, by2};
  const double yh = y.resolution() / 2.0;
  for (const auto& b : y.boxes()) {
    const Complex bc = box_center(b, y.resolution());
    for (double v : {bc.real() - yh, bc.real() + yh})
      if (v > bx1 && v < bx2) xcuts.insert(v);
    for (double v : {bc.imag() - yh, bc.imag() + yh})
      if (v > by1 && v < by2) ycuts.insert(v);
  }
  std::vector<double> xs(xcuts.begin(), xcuts.end());
  std::vector<double> ys(ycuts.begin(), ycuts.end());

  double best = 0.0;
  auto consider = [&](double x, double yy) {
    best = std::max(best, dist_point_gridset(Complex(x, yy), y));
  };

  for (std::size_t xi = 0; xi + 1 < xs.size(); ++xi) {
    for (std::size_t yi = 0; yi + 1 < ys.size(); ++yi) {
      const Rect cell{xs[xi], xs[xi + 1], ys[yi], ys[yi + 1]};
      const double mx = 0.5 * (cell.x1 + cell.x2), my = 0.5 * (cell.y1 + cell.y2);

      // Effective primitives for this cell.
      std::vector<Prim> prims;
      bool covered = false;
      for (const auto& b : y.boxes()) {
        const Complex bc = box_center(b, y.resolution());
        const double lx = bc.real() - yh, hx = bc.real() + yh;
        const double ly = bc.imag() - yh, hy = bc.imag() + yh;
        const int zx = mx < lx ? -1 : (mx > hx ? 1 : 0);
        const int zy = my < ly ? -1 : (my > hy ? 1 : 0);
        if (zx == 0 && zy == 0) { covered = true; break; }
        Prim p;
        if (zx != 0 && zy != 0) {
          p.type = Prim::Type::point;
          p.a = zx < 0 ? lx : hx;
          p.b = zy < 0 ? ly : hy;
        } else if (zx != 0) {
          p.type = Prim::Type::vline;
          p.a = zx < 0 ? lx : hx;
        } else {
          p.type = Prim::Type::hline;
          p.b = zy < 0 ? ly : hy;
        }
        prims.push_back(p);
      }
      if (covered) continue;  // distance is identically 0 on this cell
      for (const auto& ip : y.isolated_points())
        prims.push_back(Prim{Prim::Type::point, ip.value.real(), ip.value.imag()});

      // Prune primitives that can never be the nearest within the cell.
      double M = std::numeric_limits<double>::infinity();
      std::vector<double> lower(prims.size());
      for (std::size_t k = 0; k < prims.size(); ++k) {
        lower[k] = dist_rect_prim(cell, prims[k]);
        double upper = 0.0;
        for (double cx : {cell.x1, cell.x2})
          for (double cy : {cell.y1, cell.y2})
            upper = std::max(upper, dist_point_prim(cx, cy, prims[k]));
        M = std::min(M, upper);
      }
      std::vector<Prim> kept;
      for (std::size_t k = 0; k < prims.size(); ++k)
        if (lower[k] <= M + 1e-12 * (1.0 + M)) kept.push_back(prims[k]);

      // Corners.
      for (double cx : {cell.x1, cell.x2})
        for (double cy : {cell.y1, cell.y2}) consider(cx, cy);

      // Edge ties and feet.
      struct Edge { bool horizontal; double fixed, lo, hi; };
      const Edge edges[4] = {{true, cell.y1, cell.x1, cell.x2},
                             {true, cell.y2, cell.x1, cell.x2},
                             {false, cell.x1, cell.y1, cell.y2},
                             {false, cell.x2, cell.y1, cell.y2}};
      for (const auto& e : edges) {
        for (std::size_t i = 0; i < kept.size(); ++i) {
          if (kept[i].type == Prim::Type::point) {
            const double foot = e.horizontal ? kept[i].a : kept[i].b;
            if (foot >= e.lo && foot <= e.hi) {
              if (e.horizontal) consider(foot, e.fixed);
              else consider(e.fixed, foot);
            }
          }
          for (std::size_t j = i + 1; j < kept.size(); ++j) {
            double Ai = 0, Bi = 0, Ci = 0, Aj = 0, Bj = 0, Cj = 0;
            prim_quadratic_along(kept[i], e.horizontal, e.fixed, Ai, Bi, Ci);
            prim_quadratic_along(kept[j], e.horizontal, e.fixed, Aj, Bj, Cj);
            std::vector<double> roots;
            quad_roots_in(Ai - Aj, Bi - Bj, Ci - Cj, e.lo, e.hi, roots);
            for (double t : roots) {
              if (e.horizontal) consider(t, e.fixed);
              else consider(e.fixed, t);
            }
          }
        }
      }

      // Interior three-way ties.
      std::vector<std::pair<double, double>> ties;
      for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t j = i + 1; j < kept.size(); ++j)
          for (std::size_t k = j + 1; k < kept.size(); ++k)
            three_way_ties(kept[i], kept[j], kept[k], ties);
      const double g = 1e-12 * (1.0 + xres);
      for (const auto& [tx, ty] : ties) {
        if (tx >= cell.x1 - g && tx <= cell.x2 + g && ty >= cell.y1 - g && ty <= cell.y2 + g)
          consider(std::clamp(tx, cell.x1, cell.x2), std::clamp(ty, cell.y1, cell.y2));
      }
    }
  }
  return best;
}

inline double directed_hausdorff(const GridSet& x, const GridSet& y) {
  double best = 0.0;
  for (const auto& p : x.isolated_points())
    best = std::max(best, dist_point_gridset(p.value, y));
  for (const auto& b : x.boxes())
    best = std::max(best, sup_over_box(b, x.resolution(), y));
  return best;
}

}  // namespace detail

// Exact Hausdorff distance between the represented sets.
inline double hausdorff_distance(const GridSet& x, const GridSet& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("empty spectrum");
  return std::max(detail::directed_hausdorff(x, y), detail::directed_hausdorff(y, x));
}

// ---------------------------------------------------------------------------
// Complement structure: bounded holes of the box complement.
// ---------------------------------------------------------------------------

struct Hole {
  int id = 0;
  std::vector<GridBox> boxes;  // sorted
  Complex representative;      // a hole box center outside the represented set
};

struct ComplementFrame {
  long long n_lo = 0, n_hi = 0, m_lo = 0, m_hi = 0;
  bool contains(GridBox b) const {
    return b.n >= n_lo && b.n <= n_hi && b.m >= m_lo && b.m <= m_hi;
  }
};

struct ComplementRegions {
  std::vector<Hole> holes;
  std::vector<GridBox> unbounded_boxes;  // complement boxes inside the frame
  ComplementFrame frame;
};

inline ComplementFrame default_frame(const GridSet& g, double frame_margin) {
  if (g.empty()) throw std::invalid_argument("empty spectrum");
  long long n_lo = std::numeric_limits<long long>::max(), n_hi = std::numeric_limits<long long>::min();
  long long m_lo = n_lo, m_hi = n_hi;
  auto absorb = [&](GridBox b) {
    n_lo = std::min(n_lo, b.n); n_hi = std::max(n_hi, b.n);
    m_lo = std::min(m_lo, b.m); m_hi = std::max(m_hi, b.m);
  };
  for (const auto& b : g.boxes()) absorb(b);
  for (const auto& p : g.isolated_points()) absorb(box_index(p.value, g.resolution()));
  const long long pad =
      std::max<long long>(1, static_cast<long long>(std::ceil(frame_margin / g.resolution())));
  return ComplementFrame{n_lo - pad, n_hi + pad, m_lo - pad, m_hi + pad};
}

// 4-way components of the non-spectrum boxes inside the frame. 4-way is the
// dual of the 8-way spectrum adjacency: a diagonal pair of spectrum boxes
// separates the two complement boxes it pinches. Boxes on the frame boundary
// seed the unbounded region; the rest group into holes ordered by smallest box.
inline ComplementRegions complement_components(const GridSet& g, const ComplementFrame& frame) {
  const long long W = frame.n_hi - frame.n_lo + 1;
  const long long H = frame.m_hi - frame.m_lo + 1;
  if (W <= 0 || H <= 0) throw std::invalid_argument("degenerate complement frame");
  if (W * H > 64LL * 1024 * 1024) throw std::invalid_argument("complement frame too large");
  auto at = [&](long long n, long long m) {
    return static_cast<std::size_t>((n - frame.n_lo) * H + (m - frame.m_lo));
  };
  std::vector<uint8_t> state(static_cast<std::size_t>(W * H), 0);  // 0 free, 1 spectrum, 2 unbounded
  for (const auto& b : g.boxes())
    if (frame.contains(b)) state[at(b.n, b.m)] = 1;

  std::vector<GridBox> stack;
  auto push_free = [&](long long n, long long m) {
    if (n < frame.n_lo || n > frame.n_hi || m < frame.m_lo || m > frame.m_hi) return;
    auto& s = state[at(n, m)];
    if (s == 0) {
      s = 2;
      stack.push_back(GridBox{n, m});
    }
  };
  for (long long n = frame.n_lo; n <= frame.n_hi; ++n) {
    push_free(n, frame.m_lo);
    push_free(n, frame.m_hi);
  }
  for (long long m = frame.m_lo; m <= frame.m_hi; ++m) {
    push_free(frame.n_lo, m);
    push_free(frame.n_hi, m);
  }
  std::vector<GridBox> unbounded;
  while (!stack.empty()) {
    GridBox b = stack.back();
    stack.pop_back();
    unbounded.push_back(b);
    push_free(b.n - 1, b.m);
    push_free(b.n + 1, b.m);
    push_free(b.n, b.m - 1);
    push_free(b.n, b.m + 1);
  }
  std::sort(unbounded.begin(), unbounded.end());

  ComplementRegions out;
  out.frame = frame;
  out.unbounded_boxes = std::move(unbounded);
  int next_id = 0;
  for (long long n = frame.n_lo; n <= frame.n_hi; ++n) {
    for (long long m = frame.m_lo; m <= frame.m_hi; ++m) {
      if (state[at(n, m)] != 0) continue;
      Hole hole;
      hole.id = next_id++;
      std::vector<GridBox> st{GridBox{n, m}};
      state[at(n, m)] = 3;
      while (!st.empty()) {
        GridBox b = st.back();
        st.pop_back();
        hole.boxes.push_back(b);
        for (auto [dn, dm] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          const long long nn = b.n + dn, mm = b.m + dm;
          if (nn < frame.n_lo || nn > frame.n_hi || mm < frame.m_lo || mm > frame.m_hi) continue;
          auto& s = state[at(nn, mm)];
          if (s == 0) {
            s = 3;
            st.push_back(GridBox{nn, mm});
          }
        }
      }
      std::sort(hole.boxes.begin(), hole.boxes.end());
      hole.representative = box_center(hole.boxes.front(), g.resolution());
      for (const auto& b : hole.boxes) {
        const Complex c = box_center(b, g.resolution());
        bool hits_point = false;
        for (const auto& p : g.isolated_points()) hits_point |= (p.value == c);
        if (!hits_point) { hole.representative = c; break; }
      }
      out.holes.push_back(std::move(hole));
    }
  }
  // Scanning order already yields holes sorted by their smallest box; keep the
  // ids aligned with that order.
  std::sort(out.holes.begin(), out.holes.end(),
            [](const Hole& a, const Hole& b) { return a.boxes.front() < b.boxes.front(); });
  for (std::size_t i = 0; i < out.holes.size(); ++i) out.holes[i].id = static_cast<int>(i);
  return out;
}

inline ComplementRegions complement_components(const GridSet& g, double frame_margin) {
  return complement_components(g, default_frame(g, frame_margin));
}

}  // namespace spectral_orbits
