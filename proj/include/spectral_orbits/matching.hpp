#pragma once

// Pairing plans: discrete back-and-forth schedules that certify the
// eigenvalue matching behind the intertwining unitaries built in the
// sandbox. A plan walks the finite spectral models of both sides, splits
// fragments and matches them pairwise, ending in one residual pair whose
// equivalence is carried by the class labels.

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spectral_orbits/decisions.hpp"

namespace spectral_orbits {

enum class StepKind { split, match };

struct PlanStep {
  StepKind kind = StepKind::match;
  // split: fragment `parent` of `side` (1 or 2) divides into two fresh ids
  int side = 0;
  int parent = -1;
  int child1 = -1;
  int child2 = -1;
  // match: consumes a live side 1 fragment and a live side 2 fragment
  int atom1 = -1;
  int atom2 = -1;
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PairingPlan {
  double resolution = 0.0;
  std::vector<std::pair<int, Complex>> atoms1;  // (id, location)
  std::vector<std::pair<int, Complex>> atoms2;
  std::vector<PlanStep> steps;
  std::pair<int, int> residual{-1, -1};  // final live side 1 / side 2 fragments
  double cost = 0.0;             // largest matched gap, residual included
  double certified_bound = 0.0;  // bound the construction guarantees
  friend bool operator==(const PairingPlan&, const PairingPlan&) = default;
};

namespace detail {

inline PlanStep split_step(int side, int parent, int c1, int c2) {
  PlanStep s;
  s.kind = StepKind::split;
  s.side = side;
  s.parent = parent;
  s.child1 = c1;
  s.child2 = c2;
  return s;
}

inline PlanStep match_step(int a1, int a2) {
  PlanStep s;
  s.kind = StepKind::match;
  s.atom1 = a1;
  s.atom2 = a2;
  return s;
}

}  // namespace detail

// Canonical cost. Split children inherit the parent location; the cost is
// the largest |gap| over all match steps plus the residual pair. Every
// stored plan cost comes from this function.
inline double plan_cost(const PairingPlan& p) {
  std::unordered_map<int, Complex> loc1, loc2;
  for (const auto& [id, z] : p.atoms1) loc1[id] = z;
  for (const auto& [id, z] : p.atoms2) loc2[id] = z;
  const auto look = [](const std::unordered_map<int, Complex>& m, int id) {
    auto it = m.find(id);
    if (it == m.end())
      throw std::invalid_argument("plan references unknown atom " + std::to_string(id));
    return it->second;
  };
  double cost = 0.0;
  for (const auto& s : p.steps) {
    if (s.kind == StepKind::split) {
      auto& m = s.side == 1 ? loc1 : loc2;
      const Complex z = look(m, s.parent);
      m[s.child1] = z;
      m[s.child2] = z;
    } else {
      cost = std::max(cost, std::abs(look(loc1, s.atom1) - look(loc2, s.atom2)));
    }
  }
  cost = std::max(cost, std::abs(look(loc1, p.residual.first) - look(loc2, p.residual.second)));
  return cost;
}

// Structural audit. Checks that ids are introduced once (initial atoms and
// split children), every fragment is consumed exactly once (split parent,
// match, or residual), and the stored cost agrees with plan_cost.
inline std::vector<std::string> plan_validate(const PairingPlan& p) {
  std::vector<std::string> out;
  std::set<int> live1, live2, used1, used2;
  const auto tag = [](int side, int id) {
    return "side " + std::to_string(side) + " atom " + std::to_string(id);
  };
  const auto intro = [&](int side, int id) {
    auto& used = side == 1 ? used1 : used2;
    auto& live = side == 1 ? live1 : live2;
    if (!used.insert(id).second) {
      out.push_back(tag(side, id) + " is not fresh");
      return;
    }
    live.insert(id);
  };
  const auto consume = [&](int side, int id) {
    auto& used = side == 1 ? used1 : used2;
    auto& live = side == 1 ? live1 : live2;
    if (live.erase(id)) return;
    out.push_back(tag(side, id) + (used.count(id) ? " already consumed" : " unknown"));
  };
  for (const auto& [id, z] : p.atoms1) intro(1, id);
  for (const auto& [id, z] : p.atoms2) intro(2, id);
  for (const auto& s : p.steps) {
    if (s.kind == StepKind::split) {
      if (s.side != 1 && s.side != 2) {
        out.push_back("split names side " + std::to_string(s.side));
        continue;
      }
      if (s.child1 == s.child2)
        out.push_back("split children of " + tag(s.side, s.parent) + " are not distinct");
      consume(s.side, s.parent);
      intro(s.side, s.child1);
      intro(s.side, s.child2);
    } else {
      consume(1, s.atom1);
      consume(2, s.atom2);
    }
  }
  consume(1, p.residual.first);
  consume(2, p.residual.second);
  for (int id : live1) out.push_back(tag(1, id) + " unconsumed");
  for (int id : live2) out.push_back(tag(2, id) + " unconsumed");
  if (out.empty()) {
    const double recomputed = plan_cost(p);
    if (recomputed != p.cost) {
      std::ostringstream msg;
      msg << "cost mismatch: stored " << p.cost << ", computed " << recomputed;
      out.push_back(msg.str());
    }
  }
  return out;
}

// Schedule for a single connected union of boxes, both sides carrying the
// same region. A spanning tree of the 8-way box graph is pruned leaf by
// leaf: the side 2 fragment at the leaf splits, one half matches the side 1
// fragment in place (gap 0), the other half matches a fresh half of the
// side 1 fragment at the tree neighbour (gap at most one box diagonal).
// Each elimination needs that split pair: per side, fragments created must
// exceed match consumptions by exactly one residual.
inline PairingPlan tree_schedule(const GridSet& g) {
  if (g.empty()) throw std::invalid_argument("tree_schedule: represented set is empty");
  const auto comps = connected_components(g);
  if (comps.size() != 1)
    throw std::invalid_argument("tree_schedule: represented set is not connected");
  if (comps.front().kind != Component::Kind::region)
    throw std::invalid_argument("tree_schedule: represented set must be a union of grid boxes");

  const double eps = g.resolution();
  const auto& boxes = g.boxes();  // sorted
  const int n = static_cast<int>(boxes.size());
  std::map<GridBox, int> index;
  for (int i = 0; i < n; ++i) index[boxes[i]] = i;

  // spanning tree: breadth first from the smallest box, neighbours in box order
  std::vector<int> order, parent(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  order.reserve(static_cast<std::size_t>(n));
  order.push_back(0);
  seen[0] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int v = order[head];
    std::vector<int> nbs;
    for (const auto& [dn, dm] : detail::eight_neighbors()) {
      auto it = index.find(GridBox{boxes[static_cast<std::size_t>(v)].n + dn,
                                   boxes[static_cast<std::size_t>(v)].m + dm});
      if (it != index.end() && !seen[static_cast<std::size_t>(it->second)]) nbs.push_back(it->second);
    }
    std::sort(nbs.begin(), nbs.end());
    for (int u : nbs) {
      seen[static_cast<std::size_t>(u)] = 1;
      parent[static_cast<std::size_t>(u)] = v;
      order.push_back(u);
    }
  }

  PairingPlan p;
  p.resolution = eps;
  p.certified_bound = std::abs(Complex(eps, eps));
  std::vector<int> cur1(static_cast<std::size_t>(n)), cur2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    p.atoms1.emplace_back(i, box_center(boxes[static_cast<std::size_t>(i)], eps));
    p.atoms2.emplace_back(i, box_center(boxes[static_cast<std::size_t>(i)], eps));
    cur1[static_cast<std::size_t>(i)] = cur2[static_cast<std::size_t>(i)] = i;
  }
  int next1 = n, next2 = n;
  // reverse breadth-first order: each vertex is a leaf when its turn comes
  for (int k = n - 1; k >= 1; --k) {
    const int v = order[static_cast<std::size_t>(k)];
    const int u = parent[static_cast<std::size_t>(v)];
    const int c1 = next2++, c2 = next2++;
    p.steps.push_back(detail::split_step(2, cur2[static_cast<std::size_t>(v)], c1, c2));
    p.steps.push_back(detail::match_step(cur1[static_cast<std::size_t>(v)], c1));
    const int d1 = next1++, d2 = next1++;
    p.steps.push_back(detail::split_step(1, cur1[static_cast<std::size_t>(u)], d1, d2));
    p.steps.push_back(detail::match_step(d1, c2));
    cur1[static_cast<std::size_t>(u)] = d2;
  }
  p.residual = {cur1[static_cast<std::size_t>(order[0])], cur2[static_cast<std::size_t>(order[0])]};
  p.cost = plan_cost(p);
  return p;
}

namespace detail {

struct PairAtom {
  int id = 0;  // fragment id within its side
  Complex value;
};

inline double finite_hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double h = 0.0;
  const auto directed = [&](const std::vector<Complex>& x, const std::vector<Complex>& y) {
    for (const Complex& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& q : y) best = std::min(best, std::abs(p - q));
      h = std::max(h, best);
    }
  };
  directed(a, b);
  directed(b, a);
  return h;
}

// Union of two represented sets at a shared resolution. Points swallowed by
// a box of either side disappear; coincident leftover points merge.
inline GridSet union_grid(const GridSet& a, const GridSet& b) {
  std::vector<GridBox> boxes = a.boxes();
  boxes.insert(boxes.end(), b.boxes().begin(), b.boxes().end());
  std::sort(boxes.begin(), boxes.end());
  boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
  std::vector<IsolatedPoint> pts;
  const auto add = [&](const GridSet& g) {
    for (const auto& p : g.isolated_points()) {
      bool covered = false;
      for (const auto& bx : boxes)
        if (point_in_closed_box(p.value, bx, g.resolution())) {
          covered = true;
          break;
        }
      if (!covered) pts.push_back(IsolatedPoint{p.value, false});
    }
  };
  add(a);
  add(b);
  std::sort(pts.begin(), pts.end(),
            [](const IsolatedPoint& x, const IsolatedPoint& y) { return point_less(x.value, y.value); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const IsolatedPoint& x, const IsolatedPoint& y) { return x.value == y.value; }),
            pts.end());
  return GridSet(a.resolution(), std::move(boxes), std::move(pts));
}

// Cut vertices of the live subgraph (adjacency matrix, iterative lowlink).
inline std::vector<char> articulation_points(const std::vector<char>& adj,
                                             const std::vector<char>& live, int n) {
  std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      parent(static_cast<std::size_t>(n), -1), kids(static_cast<std::size_t>(n), 0);
  std::vector<char> cut(static_cast<std::size_t>(n), 0);
  int timer = 0;
  for (int root = 0; root < n; ++root) {
    if (!live[static_cast<std::size_t>(root)] || disc[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<std::pair<int, int>> stack{{root, 0}};
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < n) {
        const int u = next++;
        if (u == v || !live[static_cast<std::size_t>(u)] ||
            !adj[static_cast<std::size_t>(v) * static_cast<std::size_t>(n) + static_cast<std::size_t>(u)])
          continue;
        if (disc[static_cast<std::size_t>(u)] == -1) {
          parent[static_cast<std::size_t>(u)] = v;
          ++kids[static_cast<std::size_t>(v)];
          disc[static_cast<std::size_t>(u)] = low[static_cast<std::size_t>(u)] = timer++;
          stack.emplace_back(u, 0);
        } else if (u != parent[static_cast<std::size_t>(v)]) {
          low[static_cast<std::size_t>(v)] =
              std::min(low[static_cast<std::size_t>(v)], disc[static_cast<std::size_t>(u)]);
        }
      } else {
        const int done = v;
        stack.pop_back();
        const int pv = parent[static_cast<std::size_t>(done)];
        if (pv != -1) {
          low[static_cast<std::size_t>(pv)] =
              std::min(low[static_cast<std::size_t>(pv)], low[static_cast<std::size_t>(done)]);
          if (low[static_cast<std::size_t>(done)] >= disc[static_cast<std::size_t>(pv)] &&
              parent[static_cast<std::size_t>(pv)] != -1)
            cut[static_cast<std::size_t>(pv)] = 1;
        }
      }
    }
    if (kids[static_cast<std::size_t>(root)] >= 2) cut[static_cast<std::size_t>(root)] = 1;
  }
  return cut;
}

// Connected bipartite elimination. Vertices are the atoms of both sides;
// edges join exactly the cross-side atoms within `bound`, so every matched
// gap is bounded by construction. Repeatedly removes the highest-index
// non-cut vertex: the closest live neighbour on the other side splits, one
// half absorbs the removed fragment. Exactly n1 + n2 - 2 eliminations
// happen; the survivors form the residual.
inline std::pair<int, int> bipartite_core(const std::vector<PairAtom>& s1,
                                          const std::vector<PairAtom>& s2, double bound,
                                          int& next1, int& next2, std::vector<PlanStep>& steps) {
  const int n1 = static_cast<int>(s1.size()), n2 = static_cast<int>(s2.size());
  const int n = n1 + n2;
  if (n1 == 0 || n2 == 0)
    throw std::invalid_argument("an empty spectrum admits no pairing plan");
  const auto value_of = [&](int v) {
    return v < n1 ? s1[static_cast<std::size_t>(v)].value : s2[static_cast<std::size_t>(v - n1)].value;
  };
  // Every cross pair within the bound becomes an edge. Pairs exist within
  // one diagonal plus the model distance, so any atom one box away from an
  // admissible partner is itself admissible: the neighbour propagation is
  // subsumed, and no edge (hence no match) can exceed the bound.
  std::vector<char> adj(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  const auto link = [&](int a, int b) {
    adj[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] = 1;
    adj[static_cast<std::size_t>(b) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = 1;
  };
  for (int i = 0; i < n1; ++i)
    for (int j = n1; j < n; ++j)
      if (std::abs(value_of(i) - value_of(j)) <= bound) link(i, j);

  std::vector<char> live(static_cast<std::size_t>(n), 1);
  {
    std::vector<int> reach{0};
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    seen[0] = 1;
    for (std::size_t h = 0; h < reach.size(); ++h)
      for (int u = 0; u < n; ++u)
        if (!seen[static_cast<std::size_t>(u)] &&
            adj[static_cast<std::size_t>(reach[h]) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          reach.push_back(u);
        }
    if (static_cast<int>(reach.size()) != n)
      throw std::logic_error("pairing graph is not connected");
  }

  std::vector<int> cur(static_cast<std::size_t>(n));
  for (int i = 0; i < n1; ++i) cur[static_cast<std::size_t>(i)] = s1[static_cast<std::size_t>(i)].id;
  for (int j = 0; j < n2; ++j) cur[static_cast<std::size_t>(n1 + j)] = s2[static_cast<std::size_t>(j)].id;
  int remaining = n;
  while (remaining > 2) {
    const std::vector<char> cut = articulation_points(adj, live, n);
    int pick = -1;
    for (int v = 0; v < n; ++v)
      if (live[static_cast<std::size_t>(v)] && !cut[static_cast<std::size_t>(v)]) pick = v;
    if (pick < 0) throw std::logic_error("no removable vertex in pairing graph");
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int u = 0; u < n; ++u) {
      if (!live[static_cast<std::size_t>(u)] ||
          !adj[static_cast<std::size_t>(pick) * static_cast<std::size_t>(n) + static_cast<std::size_t>(u)])
        continue;
      const double d = std::abs(value_of(pick) - value_of(u));
      if (d < best_d) {
        best_d = d;
        best = u;
      }
    }
    if (best < 0) throw std::logic_error("removable vertex has no live neighbour");
    if (pick < n1) {  // side 1 fragment absorbed by a side 2 split
      const int c1 = next2++, c2 = next2++;
      steps.push_back(split_step(2, cur[static_cast<std::size_t>(best)], c1, c2));
      steps.push_back(match_step(cur[static_cast<std::size_t>(pick)], c1));
      cur[static_cast<std::size_t>(best)] = c2;
    } else {
      const int c1 = next1++, c2 = next1++;
      steps.push_back(split_step(1, cur[static_cast<std::size_t>(best)], c1, c2));
      steps.push_back(match_step(c1, cur[static_cast<std::size_t>(pick)]));
      cur[static_cast<std::size_t>(best)] = c2;
    }
    live[static_cast<std::size_t>(pick)] = 0;
    --remaining;
  }
  int a = -1, b = -1;
  for (int v = 0; v < n; ++v)
    if (live[static_cast<std::size_t>(v)]) (a < 0 ? a : b) = v;
  if (!(a < n1 && b >= n1)) throw std::logic_error("residual pair is not cross-side");
  if (!adj[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)])
    throw std::logic_error("residual pair is not admissible");
  return {cur[static_cast<std::size_t>(a)], cur[static_cast<std::size_t>(b)]};
}

inline std::vector<PairAtom> datum_atoms(const SpectralDatum& d, int first_id) {
  std::vector<PairAtom> out;
  const double eps = d.spectrum.resolution();
  int id = first_id;
  for (const auto& b : d.spectrum.boxes()) out.push_back({id++, box_center(b, eps)});
  for (const auto& p : d.spectrum.isolated_points())
    out.push_back({id++, p.value});
  return out;
}

inline std::vector<Complex> atom_values(const std::vector<PairAtom>& atoms) {
  std::vector<Complex> vals;
  vals.reserve(atoms.size());
  for (const auto& a : atoms) vals.push_back(a.value);
  return vals;
}

}  // namespace detail

// Schedule across two spectra whose union is connected and whose index data
// agree over the common complement. Certified bound: two box diagonals plus
// the distance between the finite eigenvalue models.
inline PairingPlan bipartite_schedule(const SpectralDatum& d1, const SpectralDatum& d2) {
  detail::require_comparable(d1, d2, "bipartite_schedule");
  const GridSet uni = detail::union_grid(d1.spectrum, d2.spectrum);
  if (uni.empty() || connected_components(uni).size() != 1)
    throw std::invalid_argument("bipartite_schedule: union of the two spectra is not connected");
  if (!detail::gamma_mismatch_boxes(d1, d2).empty())
    throw std::invalid_argument(
        "bipartite_schedule: index labels disagree on the common complement");
  const double eps = d1.spectrum.resolution();
  const auto s1 = detail::datum_atoms(d1, 0);
  const auto s2 = detail::datum_atoms(d2, 0);
  const double bound = 2.0 * std::abs(Complex(eps, eps)) +
                       detail::finite_hausdorff(detail::atom_values(s1), detail::atom_values(s2));
  PairingPlan p;
  p.resolution = eps;
  p.certified_bound = bound;
  for (const auto& a : s1) p.atoms1.emplace_back(a.id, a.value);
  for (const auto& a : s2) p.atoms2.emplace_back(a.id, a.value);
  int next1 = static_cast<int>(s1.size()), next2 = static_cast<int>(s2.size());
  p.residual = detail::bipartite_core(s1, s2, bound, next1, next2, p.steps);
  p.cost = plan_cost(p);
  return p;
}

// Blockwise schedule. Blocks name component ids of each side; they must
// cover each side exactly once, each block's union must be connected, block
// closures must not touch, and block class sums must agree unless K0 is
// trivial. Every block runs the bipartite elimination; the residuals of all
// but the last block become matches (their equivalence is exactly what the
// class condition certifies), the last residual survives as the plan's.
inline PairingPlan partitioned_schedule(
    const SpectralDatum& d1, const SpectralDatum& d2,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& blocks) {
  detail::require_comparable(d1, d2, "partitioned_schedule");
  if (blocks.empty()) throw std::invalid_argument("partitioned_schedule: no blocks given");
  if (!detail::gamma_mismatch_boxes(d1, d2).empty())
    throw std::invalid_argument(
        "partitioned_schedule: index labels disagree on the common complement");
  const double eps = d1.spectrum.resolution();

  for (int side = 1; side <= 2; ++side) {
    const SpectralDatum& d = side == 1 ? d1 : d2;
    std::vector<int> seen(d.components.size(), 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& ids = side == 1 ? blocks[b].first : blocks[b].second;
      if (ids.empty())
        throw std::invalid_argument("partitioned_schedule: block " + std::to_string(b) +
                                    " has no side " + std::to_string(side) + " components");
      for (int id : ids) {
        if (id < 0 || id >= static_cast<int>(d.components.size()))
          throw std::invalid_argument("partitioned_schedule: block " + std::to_string(b) +
                                      " names unknown side " + std::to_string(side) +
                                      " component " + std::to_string(id));
        if (seen[static_cast<std::size_t>(id)]++)
          throw std::invalid_argument("partitioned_schedule: side " + std::to_string(side) +
                                      " component " + std::to_string(id) +
                                      " appears in more than one block");
      }
    }
    for (std::size_t id = 0; id < seen.size(); ++id)
      if (!seen[id])
        throw std::invalid_argument("partitioned_schedule: side " + std::to_string(side) +
                                    " component " + std::to_string(id) +
                                    " is not covered by any block");
  }

  struct BlockPieces {
    std::vector<GridBox> boxes;
    std::vector<Complex> points;
  };
  std::vector<BlockPieces> pieces(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto collect = [&](const SpectralDatum& d, const std::vector<int>& ids) {
      for (int id : ids) {
        const Component& c = d.components[static_cast<std::size_t>(id)];
        if (c.kind == Component::Kind::region)
          pieces[b].boxes.insert(pieces[b].boxes.end(), c.boxes.begin(), c.boxes.end());
        else
          pieces[b].points.push_back(c.point);
      }
    };
    collect(d1, blocks[b].first);
    collect(d2, blocks[b].second);
    std::sort(pieces[b].boxes.begin(), pieces[b].boxes.end());
    pieces[b].boxes.erase(std::unique(pieces[b].boxes.begin(), pieces[b].boxes.end()),
                          pieces[b].boxes.end());
  }
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      bool separated = true;
      for (const auto& x : pieces[a].boxes)
        for (const auto& y : pieces[b].boxes)
          if (std::llabs(x.n - y.n) <= 1 && std::llabs(x.m - y.m) <= 1) separated = false;
      for (int dir = 0; dir < 2 && separated; ++dir) {
        const auto& pts = dir == 0 ? pieces[a].points : pieces[b].points;
        const auto& bxs = dir == 0 ? pieces[b].boxes : pieces[a].boxes;
        for (const auto& z : pts)
          for (const auto& bx : bxs)
            if (dist_point_box(z, bx, eps) <= 0.0) separated = false;
      }
      for (const auto& z : pieces[a].points)
        for (const auto& w : pieces[b].points)
          if (z == w) separated = false;
      if (!separated)
        throw std::invalid_argument("partitioned_schedule: blocks " + std::to_string(a) +
                                    " and " + std::to_string(b) + " are not separated");
    }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::vector<IsolatedPoint> pts;
    for (const Complex& z : pieces[b].points) {
      bool covered = false;
      for (const auto& bx : pieces[b].boxes)
        if (point_in_closed_box(z, bx, eps)) {
          covered = true;
          break;
        }
      if (!covered) pts.push_back(IsolatedPoint{z, false});
    }
    std::sort(pts.begin(), pts.end(),
              [](const IsolatedPoint& x, const IsolatedPoint& y) { return point_less(x.value, y.value); });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const IsolatedPoint& x, const IsolatedPoint& y) { return x.value == y.value; }),
              pts.end());
    const GridSet block_set(eps, pieces[b].boxes, std::move(pts));
    if (connected_components(block_set).size() != 1)
      throw std::invalid_argument("partitioned_schedule: block " + std::to_string(b) +
                                  ": union of spectra is not connected");
    if (!d1.profile.k0.trivial() &&
        !k_eq(clopen_class(d1, blocks[b].first), clopen_class(d2, blocks[b].second)))
      throw std::invalid_argument("partitioned_schedule: block " + std::to_string(b) +
                                  ": projection class mismatch");
  }

  PairingPlan p;
  p.resolution = eps;
  int next1 = 0, next2 = 0;
  std::pair<int, int> last_residual{-1, -1};
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::vector<detail::PairAtom> s1, s2;
    const auto atoms_for = [&](const SpectralDatum& d, const std::vector<int>& ids, int& next) {
      std::vector<detail::PairAtom> out;
      std::vector<Component const*> comps;
      for (int id : ids) comps.push_back(&d.components[static_cast<std::size_t>(id)]);
      // boxes first, then points, each in grid order to keep ids deterministic
      std::vector<GridBox> bxs;
      std::vector<Complex> vals;
      for (const Component* c : comps) {
        if (c->kind == Component::Kind::region)
          bxs.insert(bxs.end(), c->boxes.begin(), c->boxes.end());
        else
          vals.push_back(c->point);
      }
      std::sort(bxs.begin(), bxs.end());
      std::sort(vals.begin(), vals.end(), point_less);
      for (const auto& bx : bxs) out.push_back({next++, box_center(bx, eps)});
      for (const Complex& z : vals) out.push_back({next++, z});
      return out;
    };
    s1 = atoms_for(d1, blocks[b].first, next1);
    s2 = atoms_for(d2, blocks[b].second, next2);
    for (const auto& a : s1) p.atoms1.emplace_back(a.id, a.value);
    for (const auto& a : s2) p.atoms2.emplace_back(a.id, a.value);
    const double bound = 2.0 * std::abs(Complex(eps, eps)) +
                         detail::finite_hausdorff(detail::atom_values(s1), detail::atom_values(s2));
    p.certified_bound = std::max(p.certified_bound, bound);
    const auto residual = detail::bipartite_core(s1, s2, bound, next1, next2, p.steps);
    if (b + 1 < blocks.size())
      p.steps.push_back(detail::match_step(residual.first, residual.second));
    else
      last_residual = residual;
  }
  p.residual = last_residual;
  p.cost = plan_cost(p);
  return p;
}

}  // namespace spectral_orbits
