#pragma once

// Finite dimensional sandbox. Pairing plans become explicit diagonal models
// with an intertwining permutation; projections are conjugated by the polar
// unitary of the mixing map; triangular couplings are removed by exact
// elementary similarities; the analytic calculus bound is audited with a
// trapezoid contour quadrature. Everything here is checkable linear algebra.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spectral_orbits/matching.hpp"

namespace spectral_orbits {

using DenseMatrix = Eigen::MatrixXcd;

inline double opnorm(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return Eigen::JacobiSVD<DenseMatrix>(m).singularValues()(0);
}

// coeffs are ascending: c[0] + c[1] z + c[2] z^2 + ...
inline Complex poly_eval(const std::vector<Complex>& coeffs, Complex z) {
  Complex acc(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

struct PlanExecution {
  DenseMatrix m1;  // diagonal, eigenvalues in match order
  DenseMatrix m2;  // diagonal, eigenvalues in canonical grid order
  DenseMatrix u;   // permutation with u^* m2 u aligned against m1
  double achieved = 0.0;
};

// Realizes a valid plan as matrices: entry k of m1 and of u^* m2 u hold the
// k-th matched pair (residual last), so the gap is read off the diagonals.
inline PlanExecution execute_plan(const PairingPlan& p) {
  const auto violations = plan_validate(p);
  if (!violations.empty())
    throw std::invalid_argument("execute_plan: invalid plan: " + violations.front());

  std::unordered_map<int, Complex> loc1, loc2;
  for (const auto& [id, z] : p.atoms1) loc1[id] = z;
  for (const auto& [id, z] : p.atoms2) loc2[id] = z;
  std::vector<std::pair<Complex, Complex>> pairs;
  for (const auto& s : p.steps) {
    if (s.kind == StepKind::split) {
      auto& m = s.side == 1 ? loc1 : loc2;
      const Complex z = m.at(s.parent);
      m[s.child1] = z;
      m[s.child2] = z;
    } else {
      pairs.emplace_back(loc1.at(s.atom1), loc2.at(s.atom2));
    }
  }
  pairs.emplace_back(loc1.at(p.residual.first), loc2.at(p.residual.second));

  const int dim = static_cast<int>(pairs.size());
  PlanExecution out;
  out.m1 = DenseMatrix::Zero(dim, dim);
  out.m2 = DenseMatrix::Zero(dim, dim);
  out.u = DenseMatrix::Zero(dim, dim);
  std::vector<int> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return point_less(pairs[static_cast<std::size_t>(a)].second,
                      pairs[static_cast<std::size_t>(b)].second);
  });
  std::vector<int> slot(static_cast<std::size_t>(dim));  // pair k -> m2 position
  for (int a = 0; a < dim; ++a) slot[static_cast<std::size_t>(order[a])] = a;
  for (int k = 0; k < dim; ++k) {
    out.m1(k, k) = pairs[static_cast<std::size_t>(k)].first;
    out.m2(slot[static_cast<std::size_t>(k)], slot[static_cast<std::size_t>(k)]) =
        pairs[static_cast<std::size_t>(k)].second;
    out.u(slot[static_cast<std::size_t>(k)], k) = Complex(1.0, 0.0);
    out.achieved = std::max(out.achieved, std::abs(pairs[static_cast<std::size_t>(k)].first -
                                                   pairs[static_cast<std::size_t>(k)].second));
  }
  if (out.achieved != p.cost)
    throw std::logic_error("execute_plan: achieved gap disagrees with the plan cost");
  return out;
}

struct LowerBoundReport {
  double difference = 0.0;         // |d1 - u d2 u^*|
  double spectral_distance = 0.0;  // matching distance of the two diagonals
  bool ok = false;                 // difference >= spectral_distance - tol
};

// No unitary can move two normal models closer than the distance between
// their spectra; this checks the witness matrices against that floor.
inline LowerBoundReport lower_bound_check(const DenseMatrix& d1, const DenseMatrix& d2,
                                          const DenseMatrix& u, double tol = 1e-10) {
  if (d1.rows() != d1.cols() || d2.rows() != d2.cols() || u.rows() != u.cols())
    throw std::invalid_argument("lower_bound_check: matrices must be square");
  if (d1.rows() != d2.rows() || d1.rows() != u.rows())
    throw std::invalid_argument("lower_bound_check: dimensions disagree");
  const int n = static_cast<int>(d1.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && (std::abs(d1(i, j)) > tol || std::abs(d2(i, j)) > tol))
        throw std::invalid_argument("lower_bound_check: models must be diagonal");
  if (opnorm(u.adjoint() * u - DenseMatrix::Identity(n, n)) > tol)
    throw std::invalid_argument("lower_bound_check: conjugator is not unitary");
  std::vector<Complex> s1, s2;
  for (int i = 0; i < n; ++i) {
    s1.push_back(d1(i, i));
    s2.push_back(d2(i, i));
  }
  LowerBoundReport r;
  r.difference = opnorm(d1 - u * d2 * u.adjoint());
  r.spectral_distance = detail::finite_hausdorff(s1, s2);
  r.ok = r.difference >= r.spectral_distance - tol;
  return r;
}

struct ProjectionConjugation {
  DenseMatrix w;     // unitary with w p w^* ~= q
  double gap = 0.0;  // |p - q|
  double err = 0.0;  // |w p w^* - q|
};

// Close projections are unitarily conjugate: the mixing map
// z = q p + (1 - q)(1 - p) intertwines p and q, and its polar unitary
// conjugates exactly. Requires the gap below 1/2 so z stays invertible with
// a comfortable margin.
inline ProjectionConjugation projection_conjugator(const DenseMatrix& p, const DenseMatrix& q,
                                                   double tol = 1e-8) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows())
    throw std::invalid_argument("projection_conjugator: shapes disagree");
  const int n = static_cast<int>(p.rows());
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  for (const auto* m : {&p, &q}) {
    if (opnorm(*m - m->adjoint()) > tol || opnorm(*m * *m - *m) > tol)
      throw std::invalid_argument("projection_conjugator: input is not a projection");
  }
  ProjectionConjugation out;
  out.gap = opnorm(p - q);
  if (!(out.gap < 0.5))
    throw std::invalid_argument("projection_conjugator: projections are not close enough");
  const DenseMatrix z = q * p + (id - q) * (id - p);
  Eigen::JacobiSVD<DenseMatrix> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.w = svd.matrixU() * svd.matrixV().adjoint();
  out.err = opnorm(out.w * p * out.w.adjoint() - q);
  return out;
}

struct TriangularSimilarity {
  DenseMatrix t;
  DenseMatrix t_inv;    // exact inverse: every stage is i + nilpotent
  DenseMatrix diagonal; // target block diagonal
  double err = 0.0;     // |t a t^{-1} - diagonal|
};

// Removes the strictly upper coupling of a block triangular matrix whose
// diagonal blocks are distinct scalars. Stage i solves
// y (lambda_i - z) = x for the coupling x of block i against the trailing
// corner z, and i + y has the exact inverse i - y.
inline TriangularSimilarity triangular_similarity(const DenseMatrix& a,
                                                  const std::vector<int>& block_sizes) {
  if (a.rows() != a.cols()) throw std::invalid_argument("triangular_similarity: matrix must be square");
  const int n = static_cast<int>(a.rows());
  int total = 0;
  for (int s : block_sizes) {
    if (s <= 0) throw std::invalid_argument("triangular_similarity: block sizes must be positive");
    total += s;
  }
  if (total != n) throw std::invalid_argument("triangular_similarity: block sizes must cover the matrix");
  const int k = static_cast<int>(block_sizes.size());
  std::vector<int> offset(static_cast<std::size_t>(k) + 1, 0);
  for (int i = 0; i < k; ++i) offset[static_cast<std::size_t>(i) + 1] = offset[static_cast<std::size_t>(i)] + block_sizes[static_cast<std::size_t>(i)];
  std::vector<Complex> lambda(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int o = offset[static_cast<std::size_t>(i)], s = block_sizes[static_cast<std::size_t>(i)];
    lambda[static_cast<std::size_t>(i)] = a(o, o);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c)
        if (a(o + r, o + c) != (r == c ? lambda[static_cast<std::size_t>(i)] : Complex(0.0, 0.0)))
          throw std::invalid_argument("triangular_similarity: diagonal block is not scalar");
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j) {
      if (lambda[static_cast<std::size_t>(i)] == lambda[static_cast<std::size_t>(j)])
        throw std::invalid_argument("triangular_similarity: block eigenvalues must be pairwise distinct");
      const int oi = offset[static_cast<std::size_t>(i)], oj = offset[static_cast<std::size_t>(j)];
      if (!a.block(oi, oj, block_sizes[static_cast<std::size_t>(i)], block_sizes[static_cast<std::size_t>(j)]).isZero(0.0))
        throw std::invalid_argument("triangular_similarity: matrix is not block upper triangular");
    }

  TriangularSimilarity out;
  out.t = DenseMatrix::Identity(n, n);
  out.t_inv = DenseMatrix::Identity(n, n);
  out.diagonal = DenseMatrix::Zero(n, n);
  for (int i = 0; i < k; ++i)
    for (int r = 0; r < block_sizes[static_cast<std::size_t>(i)]; ++r)
      out.diagonal(offset[static_cast<std::size_t>(i)] + r, offset[static_cast<std::size_t>(i)] + r) =
          lambda[static_cast<std::size_t>(i)];

  DenseMatrix m = a;
  for (int i = 0; i + 1 < k; ++i) {
    const int o = offset[static_cast<std::size_t>(i)], s = block_sizes[static_cast<std::size_t>(i)];
    const int rest = n - (o + s);
    const DenseMatrix x = m.block(o, o + s, s, rest);
    const DenseMatrix z = m.block(o + s, o + s, rest, rest);
    const DenseMatrix y =
        x * (lambda[static_cast<std::size_t>(i)] * DenseMatrix::Identity(rest, rest) - z).inverse();
    DenseMatrix e = DenseMatrix::Identity(n, n), e_inv = DenseMatrix::Identity(n, n);
    e.block(o, o + s, s, rest) = y;
    e_inv.block(o, o + s, s, rest) = -y;
    out.t = e * out.t;
    out.t_inv = out.t_inv * e_inv;
    m = e * m * e_inv;
  }
  out.err = opnorm(out.t * a * out.t_inv - out.diagonal);
  return out;
}

struct ContourRect {
  double re_lo = 0.0, re_hi = 0.0;
  double im_lo = 0.0, im_hi = 0.0;
  double step = 0.0;  // node spacing along the edges
};

struct AnalyticBound {
  double lhs = 0.0;             // |f(a) - v f(b) v^{-1}|, both by quadrature
  double rhs = 0.0;             // (length / 2 pi) |a - v b v^{-1}| sup |f| |r_a| |v r_b v^{-1}|
  double quad_error = 0.0;      // second difference estimate for both integrals
  double contour_length = 0.0;
  double sup_factor = 0.0;      // the sampled sup entering rhs
};

// Calculus comparison on a rectangular contour winding once around both
// spectra: the resolvent identity bounds the calculus gap of two normal
// models by their similarity gap times the sampled sup of the integrand.
inline AnalyticBound analytic_calculus_bound(const DenseMatrix& a, const DenseMatrix& b,
                                             const DenseMatrix& v,
                                             const std::vector<Complex>& coeffs,
                                             const ContourRect& rect, double tol = 1e-10) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || v.rows() != v.cols())
    throw std::invalid_argument("analytic_calculus_bound: matrices must be square");
  if (a.rows() != b.rows() || a.rows() != v.rows())
    throw std::invalid_argument("analytic_calculus_bound: dimensions disagree");
  if (!(rect.re_lo < rect.re_hi) || !(rect.im_lo < rect.im_hi) || !(rect.step > 0.0))
    throw std::invalid_argument("analytic_calculus_bound: malformed contour");
  const int n = static_cast<int>(a.rows());
  for (const auto* m : {&a, &b}) {
    const double scale = 1.0 + m->norm();
    if ((m->adjoint() * *m - *m * m->adjoint()).norm() > tol * scale * scale)
      throw std::invalid_argument("analytic_calculus_bound: matrix is not normal");
  }
  Eigen::FullPivLU<DenseMatrix> lu(v);
  if (!lu.isInvertible())
    throw std::invalid_argument("analytic_calculus_bound: conjugator is not invertible");
  const DenseMatrix v_inv = lu.inverse();

  const auto clearance = [&](const DenseMatrix& m) {
    double c = std::numeric_limits<double>::infinity();
    const Eigen::ComplexEigenSolver<DenseMatrix> es(m);
    for (int i = 0; i < n; ++i) {
      const Complex ev = es.eigenvalues()(i);
      c = std::min({c, ev.real() - rect.re_lo, rect.re_hi - ev.real(),
                    ev.imag() - rect.im_lo, rect.im_hi - ev.imag()});
    }
    return c;
  };
  const double clear = std::min(clearance(a), clearance(b));
  if (!(clear > 0.0))
    throw std::invalid_argument("analytic_calculus_bound: spectrum must lie inside the contour");
  if (clear < rect.step)
    throw std::invalid_argument("analytic_calculus_bound: contour step exceeds the spectral clearance");

  // counterclockwise rectangle, nodes shared at the corners
  const Complex c0(rect.re_lo, rect.im_lo), c1(rect.re_hi, rect.im_lo);
  const Complex c2(rect.re_hi, rect.im_hi), c3(rect.re_lo, rect.im_hi);
  const std::vector<std::pair<Complex, Complex>> edges{{c0, c1}, {c1, c2}, {c2, c3}, {c3, c0}};

  const DenseMatrix id = DenseMatrix::Identity(n, n);
  DenseMatrix int_a = DenseMatrix::Zero(n, n), int_b = DenseMatrix::Zero(n, n);
  double quad_second = 0.0, sup = 0.0, length = 0.0;
  for (const auto& [from, to] : edges) {
    const double len = std::abs(to - from);
    length += len;
    const int segments = std::max(1, static_cast<int>(std::ceil(len / rect.step)));
    const Complex h = (to - from) / static_cast<double>(segments);
    std::vector<DenseMatrix> ga, gb;
    for (int s = 0; s <= segments; ++s) {
      const Complex zeta = from + h * static_cast<double>(s);
      const Complex f = poly_eval(coeffs, zeta);
      const DenseMatrix ra = (zeta * id - a).partialPivLu().solve(id);
      const DenseMatrix rb_c = v * (zeta * id - b).partialPivLu().solve(id) * v_inv;
      ga.push_back(f * ra);
      gb.push_back(f * rb_c);
      sup = std::max(sup, std::abs(f) * opnorm(ra) * opnorm(rb_c));
    }
    for (int s = 0; s <= segments; ++s) {
      const double w = (s == 0 || s == segments) ? 0.5 : 1.0;
      int_a += w * h * ga[static_cast<std::size_t>(s)];
      int_b += w * h * gb[static_cast<std::size_t>(s)];
    }
    for (int s = 1; s < segments; ++s) {
      const std::size_t u = static_cast<std::size_t>(s);
      quad_second += std::abs(h) / 12.0 *
                     (opnorm(ga[u - 1] - 2.0 * ga[u] + ga[u + 1]) +
                      opnorm(gb[u - 1] - 2.0 * gb[u] + gb[u + 1]));
    }
  }
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  AnalyticBound out;
  out.contour_length = length;
  out.sup_factor = sup;
  out.lhs = opnorm((int_a - int_b) / two_pi_i);
  out.rhs = length / (2.0 * std::numbers::pi) * opnorm(a - v * b * v_inv) * sup;
  out.quad_error = quad_second / (2.0 * std::numbers::pi);
  return out;
}

// Least index from which every model in the tail meets the open disk; the
// last entry stands for the limit. Returns nothing when the limit itself
// misses the disk.
inline std::optional<int> semicontinuity_probe(const std::vector<DenseMatrix>& models,
                                               Complex center, double radius) {
  if (models.empty()) throw std::invalid_argument("semicontinuity_probe: no models given");
  if (!(radius > 0.0)) throw std::invalid_argument("semicontinuity_probe: radius must be positive");
  std::vector<char> meets;
  for (const auto& m : models) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("semicontinuity_probe: matrices must be square");
    const Eigen::ComplexEigenSolver<DenseMatrix> es(m);
    bool hit = false;
    for (int i = 0; i < m.rows(); ++i)
      hit = hit || std::abs(es.eigenvalues()(i) - center) < radius;
    meets.push_back(hit ? 1 : 0);
  }
  if (!meets.back()) return std::nullopt;
  int k = static_cast<int>(meets.size()) - 1;
  while (k > 0 && meets[static_cast<std::size_t>(k - 1)]) --k;
  return k;
}

}  // namespace spectral_orbits
