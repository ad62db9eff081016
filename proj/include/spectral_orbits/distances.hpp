#pragma once

// Distance estimates between unitary orbits: the rho pseudometric (Hausdorff
// distance joined with an index-mismatch penalty), rule-based upper bounds,
// and a resolvent-contour lower bound driven by projection-class mismatch.

#include <numbers>
#include <set>

#include "spectral_orbits/decisions.hpp"

namespace spectral_orbits {

struct RhoDetail {
  double value = 0.0;      // max(hausdorff, mismatch_corner_max)
  double hausdorff = 0.0;
  double mismatch_corner_max = 0.0;
  std::size_t mismatch_box_count = 0;
  double slack = 0.0;  // sqrt(2)*resolution when a mismatch region exists
};

// rho = max(d_H(s1,s2), sup over label-mismatch points of d(.,s1)+d(.,s2)).
// The sup is estimated from box corners; the summand is 2-Lipschitz, so the
// true sup exceeds the corner value by at most sqrt(2)*resolution (reported
// as slack, never folded into the value).
inline RhoDetail rho_detail(const SpectralDatum& d1, const SpectralDatum& d2) {
  if (d1.spectrum.resolution() != d2.spectrum.resolution())
    throw std::invalid_argument("rho: resolution mismatch");
  if (!(d1.profile.k1 == d2.profile.k1))
    throw std::invalid_argument("rho: index label groups differ");
  RhoDetail r;
  r.hausdorff = hausdorff_distance(d1.spectrum, d2.spectrum);
  const auto mismatch = detail::gamma_mismatch_boxes(d1, d2);
  r.mismatch_box_count = mismatch.size();
  const double eps = d1.spectrum.resolution();
  for (const auto& b : mismatch) {
    const Complex c = box_center(b, eps);
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        const Complex z = c + Complex(sx * eps / 2.0, sy * eps / 2.0);
        const double v = dist_point_gridset(z, d1.spectrum) + dist_point_gridset(z, d2.spectrum);
        r.mismatch_corner_max = std::max(r.mismatch_corner_max, v);
      }
    }
  }
  if (!mismatch.empty()) r.slack = std::sqrt(2.0) * eps;
  r.value = std::max(r.hausdorff, r.mismatch_corner_max);
  return r;
}

inline double rho(const SpectralDatum& d1, const SpectralDatum& d2) {
  return rho_detail(d1, d2).value;
}

struct DistanceReport {
  double lower = 0.0;
  std::optional<double> upper;  // empty = unknown
  std::string lower_rule = "rho";
  std::string upper_rule = "unknown";
  double discretization_slack = 0.0;
  RhoDetail rho_estimate;
};

namespace detail {

// Containment-based upper-bound rule: src inside tgt, src meets every tgt
// component, and the class sums inside each tgt component agree with its
// label (skipped exactly as in the orbit decision).
inline bool containment_rule(const SpectralDatum& src, const SpectralDatum& tgt) {
  if (!spectrum_subset(src.spectrum, tgt.spectrum, nullptr)) return false;
  const auto tix = component_index(tgt);
  std::vector<char> meets(tgt.components.size(), 0);
  std::vector<KElement> sums(tgt.components.size(), KElement::zero(tgt.profile.k0));
  for (const auto& c : src.components) {
    auto host = containing_component(c, tix);
    if (!host) return false;  // cannot happen when containment holds
    meets[static_cast<std::size_t>(*host)] = 1;
    sums[static_cast<std::size_t>(*host)] =
        k_add(sums[static_cast<std::size_t>(*host)], src.component_k0.at(c.id));
  }
  for (const auto& c : tgt.components)
    if (!meets[static_cast<std::size_t>(c.id)]) return false;
  if (tgt.profile.all_nonzero_projections_equivalent || tgt.profile.k0.trivial()) return true;
  for (const auto& c : tgt.components)
    if (!k_eq(sums[static_cast<std::size_t>(c.id)], tgt.component_k0.at(c.id))) return false;
  return true;
}

inline bool all_hole_labels_zero(const SpectralDatum& d) {
  for (const auto& [id, label] : d.hole_k1) {
    (void)id;
    if (!label.is_zero()) return false;
  }
  return true;
}

// Clopen classes compared over the components of the union spectrum. A
// component populated by only one of the data is a mismatch: a nonzero
// projection is never equivalent to the zero projection, whatever its class.
inline bool union_clopen_match(const SpectralDatum& d1, const SpectralDatum& d2) {
  const double res = d1.spectrum.resolution();
  std::vector<GridBox> boxes = d1.spectrum.boxes();
  boxes.insert(boxes.end(), d2.spectrum.boxes().begin(), d2.spectrum.boxes().end());
  std::sort(boxes.begin(), boxes.end());
  boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());

  std::vector<IsolatedPoint> pts;
  auto absorb_points = [&](const GridSet& g) {
    for (const auto& p : g.isolated_points()) {
      bool covered = false;
      for (const auto& b : boxes) covered |= point_in_closed_box(p.value, b, res);
      if (covered) continue;
      bool dup = false;
      for (const auto& q : pts) dup |= (q.value == p.value);
      if (!dup) pts.push_back({p.value, false});
    }
  };
  absorb_points(d1.spectrum);
  absorb_points(d2.spectrum);

  const GridSet union_set(res, boxes, pts);
  const auto comps = connected_components(union_set);
  std::map<GridBox, int> box_comp;
  std::vector<std::pair<Complex, int>> point_comp;
  for (const auto& c : comps) {
    if (c.kind == Component::Kind::region)
      for (const auto& b : c.boxes) box_comp[b] = c.id;
    else
      point_comp.emplace_back(c.point, c.id);
  }
  auto locate = [&](const Component& c) {
    if (c.kind == Component::Kind::region) return box_comp.at(c.boxes.front());
    for (const auto& [b, id] : box_comp)
      if (point_in_closed_box(c.point, b, res)) return id;
    for (const auto& [p, id] : point_comp)
      if (p == c.point) return id;
    throw std::logic_error("union component lookup failed");
  };

  std::vector<KElement> sum1(comps.size(), KElement::zero(d1.profile.k0));
  std::vector<KElement> sum2(comps.size(), KElement::zero(d2.profile.k0));
  std::vector<char> seen1(comps.size(), 0), seen2(comps.size(), 0);
  for (const auto& c : d1.components) {
    const auto id = static_cast<std::size_t>(locate(c));
    seen1[id] = 1;
    sum1[id] = k_add(sum1[id], d1.component_k0.at(c.id));
  }
  for (const auto& c : d2.components) {
    const auto id = static_cast<std::size_t>(locate(c));
    seen2[id] = 1;
    sum2[id] = k_add(sum2[id], d2.component_k0.at(c.id));
  }
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (seen1[i] != seen2[i]) return false;
    if (seen1[i] && !k_eq(sum1[i], sum2[i])) return false;
  }
  return true;
}

}  // namespace detail

// Lower bound is always rho; the upper bound takes the first applicable rule,
// ordered sharpest first. "unknown" is an honest outcome: the distance
// problem is not solved in general.
inline DistanceReport distance_bounds(const SpectralDatum& d1, const SpectralDatum& d2) {
  detail::require_comparable(d1, d2, "distance_bounds");
  DistanceReport rep;
  rep.rho_estimate = rho_detail(d1, d2);
  rep.lower = rep.rho_estimate.value;
  rep.discretization_slack = rep.rho_estimate.slack;
  const bool gamma_agree = rep.rho_estimate.mismatch_box_count == 0;
  if (gamma_agree &&
      (detail::containment_rule(d1, d2) || detail::containment_rule(d2, d1))) {
    rep.upper = rep.rho_estimate.hausdorff;
    rep.upper_rule = "containment-hausdorff";
  } else if (d1.profile.all_nonzero_projections_equivalent &&
             detail::all_hole_labels_zero(d1) && detail::all_hole_labels_zero(d2)) {
    rep.upper = rep.rho_estimate.hausdorff;
    rep.upper_rule = "equal-projections-hausdorff";
  } else if (d1.profile.k0.trivial() || detail::union_clopen_match(d1, d2)) {
    rep.upper = 2.0 * rep.lower;
    rep.upper_rule = "double-rho";
  }
  return rep;
}

struct GapBound {
  bool applicable = false;
  double bound = 0.0;          // certified: 2*pi / (l0 * sup_certified)
  double bound_sampled = 0.0;  // same formula with the raw sampled sup
  double l0 = 0.0;
  double sup_sampled = 0.0;
  double sup_certified = 0.0;
  double effective_offset = 0.0;
  std::string note;
};

namespace detail {

using Cell = std::pair<long long, long long>;

struct GapPiece {
  bool is_box = false;
  GridBox box{0, 0};
  Complex point{0.0, 0.0};
};

// Cells of the refined grid (spacing delta, cell (i,j) = [i,i+1]x[j,j+1] in
// delta units) whose interior meets the open L-infinity dilation of the piece
// by k*delta. Box pieces are aligned (resolution = 4*delta), so their ranges
// are exact integer arithmetic.
inline void add_dilated_cells(const GapPiece& p, long long k, double delta,
                              std::set<Cell>& out) {
  long long ilo, ihi, jlo, jhi;
  if (p.is_box) {
    ilo = 4 * p.box.n - 2 - k;
    ihi = 4 * p.box.n + 1 + k;
    jlo = 4 * p.box.m - 2 - k;
    jhi = 4 * p.box.m + 1 + k;
  } else {
    const double r = static_cast<double>(k) * delta;
    ilo = static_cast<long long>(std::floor((p.point.real() - r) / delta + 1e-9));
    ihi = static_cast<long long>(std::ceil((p.point.real() + r) / delta - 1e-9)) - 1;
    jlo = static_cast<long long>(std::floor((p.point.imag() - r) / delta + 1e-9));
    jhi = static_cast<long long>(std::ceil((p.point.imag() + r) / delta - 1e-9)) - 1;
  }
  for (long long i = ilo; i <= ihi; ++i)
    for (long long j = jlo; j <= jhi; ++j) out.insert({i, j});
}

inline double axis_gap(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::max(lo2 - hi1, lo1 - hi2));
}

// Exact L-infinity distance between two pieces (boxes or points).
inline double piece_linf_distance(const GapPiece& a, const GapPiece& b, double eps) {
  auto extent = [&](const GapPiece& p, bool x) {
    if (p.is_box) {
      const Complex c = box_center(p.box, eps);
      const double mid = x ? c.real() : c.imag();
      return std::pair<double, double>{mid - eps / 2.0, mid + eps / 2.0};
    }
    const double v = x ? p.point.real() : p.point.imag();
    return std::pair<double, double>{v, v};
  };
  const auto [alx, ahx] = extent(a, true);
  const auto [blx, bhx] = extent(b, true);
  const auto [aly, ahy] = extent(a, false);
  const auto [bly, bhy] = extent(b, false);
  return std::max(axis_gap(alx, ahx, blx, bhx), axis_gap(aly, ahy, bly, bhy));
}

struct CellFlood {
  long long ilo = 0, ihi = -1, jlo = 0, jhi = -1;
  std::vector<char> outside;  // 1 = reachable from the frame boundary
  bool is_outside(Cell c) const {
    if (c.first < ilo || c.first > ihi || c.second < jlo || c.second > jhi) return true;
    const long long H = jhi - jlo + 1;
    return outside[static_cast<std::size_t>((c.first - ilo) * H + (c.second - jlo))] != 0;
  }
};

// 4-way flood of the complement of `solid` from the frame boundary.
inline CellFlood flood_outside(const std::set<Cell>& solid, long long ilo, long long ihi,
                               long long jlo, long long jhi) {
  CellFlood f;
  f.ilo = ilo;
  f.ihi = ihi;
  f.jlo = jlo;
  f.jhi = jhi;
  const long long W = ihi - ilo + 1, H = jhi - jlo + 1;
  f.outside.assign(static_cast<std::size_t>(W * H), 0);
  auto idx = [&](long long i, long long j) {
    return static_cast<std::size_t>((i - ilo) * H + (j - jlo));
  };
  std::vector<Cell> stack;
  auto push = [&](long long i, long long j) {
    if (i < ilo || i > ihi || j < jlo || j > jhi) return;
    if (f.outside[idx(i, j)]) return;
    if (solid.count({i, j})) return;
    f.outside[idx(i, j)] = 1;
    stack.push_back({i, j});
  };
  for (long long i = ilo; i <= ihi; ++i) {
    push(i, jlo);
    push(i, jhi);
  }
  for (long long j = jlo; j <= jhi; ++j) {
    push(ilo, j);
    push(ihi, j);
  }
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    push(i - 1, j);
    push(i + 1, j);
    push(i, j - 1);
    push(i, j + 1);
  }
  return f;
}

}  // namespace detail

// Quantitative lower bound on the unitary-orbit distance from a projection
// class mismatch over `region` (component ids shared by both data). A
// rectilinear contour is drawn on the eps/4 grid at L-infinity offset around
// the selected components; the spectral projection difference is estimated
// through the resolvent integral over the near loop only (the far return
// contour lies where the calculus function vanishes and contributes nothing),
// giving dist >= 2*pi / (l0 * sup of resolvent-norm products).
inline GapBound projection_gap_lower_bound(const SpectralDatum& d1, const SpectralDatum& d2,
                                           const std::vector<int>& region, double offset,
                                           int samples_per_edge = 3) {
  const double eps = d1.spectrum.resolution();
  if (eps != d2.spectrum.resolution())
    throw std::invalid_argument("projection_gap_lower_bound: resolution mismatch");
  if (!(d1.profile.k0 == d2.profile.k0))
    throw std::invalid_argument("projection_gap_lower_bound: class groups differ");
  if (!(offset > 0.0) || !std::isfinite(offset))
    throw std::invalid_argument("projection_gap_lower_bound: offset must be positive");
  if (region.empty())
    throw std::invalid_argument("projection_gap_lower_bound: empty region");
  if (samples_per_edge < 2)
    throw std::invalid_argument("projection_gap_lower_bound: need at least 2 samples per edge");

  auto same_content = [](const Component& a, const Component& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Component::Kind::region) return a.boxes == b.boxes;
    return a.point == b.point && a.is_cluster_point == b.is_cluster_point;
  };
  for (int id : region) {
    if (id < 0 || id >= static_cast<int>(d1.components.size()) ||
        id >= static_cast<int>(d2.components.size()))
      throw std::invalid_argument("projection_gap_lower_bound: unknown component id " +
                                  std::to_string(id));
    if (!same_content(d1.components[static_cast<std::size_t>(id)],
                      d2.components[static_cast<std::size_t>(id)]))
      throw std::invalid_argument("projection_gap_lower_bound: component " + std::to_string(id) +
                                  " differs between the data");
  }

  GapBound g;
  if (d1.profile.all_nonzero_projections_equivalent ||
      d2.profile.all_nonzero_projections_equivalent) {
    g.note = "all nonzero projections are equivalent; class labels carry no obstruction";
    return g;
  }
  const KElement c1 = clopen_class(d1, region);
  const KElement c2 = clopen_class(d2, region);
  if (k_eq(c1, c2)) {
    g.note = "classes agree on the selected region";
    return g;
  }
  g.applicable = true;
  g.note = "distinct projection classes force unitary-orbit distance >= 1 (projection rigidity)";

  const double delta = eps / 4.0;
  const long long k = static_cast<long long>(std::floor(offset / delta + 1e-9));
  if (k < 1)
    throw std::invalid_argument("offset too small: need at least resolution/4");
  g.effective_offset = static_cast<double>(k) * delta;

  // Selected pieces come from d1; the region components are identical in d2.
  std::vector<detail::GapPiece> selected, others;
  std::set<int> region_ids(region.begin(), region.end());
  for (const auto& c : d1.components) {
    const bool sel = region_ids.count(c.id) != 0;
    auto& dst = sel ? selected : others;
    if (c.kind == Component::Kind::region)
      for (const auto& b : c.boxes) dst.push_back({true, b, {}});
    else
      dst.push_back({false, {0, 0}, c.point});
  }
  // Pieces of d2 outside the shared region count as obstacles too.
  for (const auto& c : d2.components) {
    if (region_ids.count(c.id) && same_content(c, d1.components[static_cast<std::size_t>(c.id)]))
      continue;
    if (c.kind == Component::Kind::region)
      for (const auto& b : c.boxes) others.push_back({true, b, {}});
    else
      others.push_back({false, {0, 0}, c.point});
  }

  // The calculus function must be 1 near the selected pieces and 0 on the
  // rest: every other piece has to clear the dilated neighborhood.
  for (const auto& s : selected) {
    for (const auto& o : others) {
      if (detail::piece_linf_distance(s, o, eps) <= static_cast<double>(k + 2) * delta)
        throw std::invalid_argument("offset too large: contour cannot separate the region");
    }
  }

  std::set<detail::Cell> D1, D2;
  for (const auto& s : selected) {
    detail::add_dilated_cells(s, k, delta, D1);
    detail::add_dilated_cells(s, k + 1, delta, D2);
  }
  long long ilo = 0, ihi = 0, jlo = 0, jhi = 0;
  bool first = true;
  auto absorb = [&](detail::Cell c) {
    if (first) {
      ilo = ihi = c.first;
      jlo = jhi = c.second;
      first = false;
      return;
    }
    ilo = std::min(ilo, c.first);
    ihi = std::max(ihi, c.first);
    jlo = std::min(jlo, c.second);
    jhi = std::max(jhi, c.second);
  };
  for (const auto& c : D2) absorb(c);
  std::set<detail::Cell> obstacle_cells;
  for (const auto& o : others) detail::add_dilated_cells(o, 0, delta, obstacle_cells);
  for (const auto& c : obstacle_cells) absorb(c);
  ilo -= 2;
  jlo -= 2;
  ihi += 2;
  jhi += 2;

  // No other piece may be trapped in a bounded pocket of the dilation.
  const auto flood2 = detail::flood_outside(D2, ilo, ihi, jlo, jhi);
  for (const auto& c : obstacle_cells) {
    if (!flood2.is_outside(c))
      throw std::invalid_argument("offset too large: dilated region encloses other spectrum");
  }

  // Outer boundary of the k-dilation: edges facing the unbounded complement.
  const auto flood1 = detail::flood_outside(D1, ilo, ihi, jlo, jhi);
  struct Edge {
    double x0, y0, x1, y1;
  };
  std::vector<Edge> edges;
  for (const auto& [i, j] : D1) {
    const double x = static_cast<double>(i) * delta, y = static_cast<double>(j) * delta;
    if (flood1.is_outside({i - 1, j})) edges.push_back({x, y, x, y + delta});
    if (flood1.is_outside({i + 1, j})) edges.push_back({x + delta, y, x + delta, y + delta});
    if (flood1.is_outside({i, j - 1})) edges.push_back({x, y, x + delta, y});
    if (flood1.is_outside({i, j + 1})) edges.push_back({x, y + delta, x + delta, y + delta});
  }
  g.l0 = static_cast<double>(edges.size()) * delta;

  const double sample_gap = delta / (2.0 * (samples_per_edge - 1));
  for (const auto& e : edges) {
    double min1 = std::numeric_limits<double>::infinity();
    double min2 = min1;
    for (int s = 0; s < samples_per_edge; ++s) {
      const double t = static_cast<double>(s) / (samples_per_edge - 1);
      const Complex z(e.x0 + t * (e.x1 - e.x0), e.y0 + t * (e.y1 - e.y0));
      const double a = dist_point_gridset(z, d1.spectrum);
      const double b = dist_point_gridset(z, d2.spectrum);
      min1 = std::min(min1, a);
      min2 = std::min(min2, b);
      g.sup_sampled = std::max(g.sup_sampled, 1.0 / (a * b));
    }
    const double lo1 = min1 - sample_gap, lo2 = min2 - sample_gap;
    if (lo1 <= 0.0 || lo2 <= 0.0)
      throw std::invalid_argument("offset too small: contour touches a spectrum");
    g.sup_certified = std::max(g.sup_certified, 1.0 / (lo1 * lo2));
  }
  g.bound = 2.0 * std::numbers::pi / (g.l0 * g.sup_certified);
  g.bound_sampled = 2.0 * std::numbers::pi / (g.l0 * g.sup_sampled);
  return g;
}

}  // namespace spectral_orbits
