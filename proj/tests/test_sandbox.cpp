#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "spectral_orbits/sandbox.hpp"
#include "support/generators.hpp"

using namespace spectral_orbits;
using Catch::Matchers::ContainsSubstring;

namespace {

DenseMatrix random_gaussian(testgen::Rng& rng, int n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

DenseMatrix random_unitary(testgen::Rng& rng, int n) {
  Eigen::HouseholderQR<DenseMatrix> qr(random_gaussian(rng, n));
  return DenseMatrix(qr.householderQ());
}

DenseMatrix rotated_rank_one(double s) {
  const double c = std::sqrt(1.0 - s * s);
  DenseMatrix r(2, 2);
  r << Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0);
  DenseMatrix p = DenseMatrix::Zero(2, 2);
  p(0, 0) = Complex(1.0, 0.0);
  return r * p * r.adjoint();
}

}  // namespace

TEST_CASE("plan execution realizes the certified matching on a two box strip") {
  const GridSet g(1.0, {{0, 0}, {1, 0}});
  const PairingPlan plan = tree_schedule(g);
  REQUIRE(plan.cost == 1.0);

  const PlanExecution exec = execute_plan(plan);
  const int dim = static_cast<int>(exec.m1.rows());
  CHECK(dim == 3);  // two matches plus the residual
  CHECK(exec.achieved == plan.cost);

  // permutation conjugator, so unitarity is exact
  CHECK(opnorm(exec.u.adjoint() * exec.u - DenseMatrix::Identity(dim, dim)) == 0.0);

  // u^* m2 u lines the second diagonal up against the first
  const DenseMatrix aligned = exec.u.adjoint() * exec.m2 * exec.u;
  double worst = 0.0;
  for (int k = 0; k < dim; ++k) worst = std::max(worst, std::abs(exec.m1(k, k) - aligned(k, k)));
  CHECK(worst == exec.achieved);
  CHECK_THAT(opnorm(exec.m1 - aligned), Catch::Matchers::WithinAbs(exec.achieved, 1e-12));

  // m2 keeps the canonical grid order
  for (int k = 0; k + 1 < dim; ++k)
    CHECK_FALSE(point_less(exec.m2(k + 1, k + 1), exec.m2(k, k)));
}

TEST_CASE("plan execution rejects tampered plans") {
  const GridSet g(1.0, {{0, 0}, {1, 0}});
  PairingPlan plan = tree_schedule(g);
  plan.cost += 0.5;
  CHECK_THROWS_WITH(execute_plan(plan), ContainsSubstring("invalid plan"));
}

TEST_CASE("unitary conjugation cannot beat the spectral floor") {
  DenseMatrix d1 = DenseMatrix::Zero(2, 2), d2 = DenseMatrix::Zero(2, 2);
  d1(1, 1) = Complex(1.0, 0.0);
  d2(0, 0) = Complex(3.0, 0.0);
  d2(1, 1) = Complex(5.0, 0.0);

  const auto base = lower_bound_check(d1, d2, DenseMatrix::Identity(2, 2));
  CHECK(base.spectral_distance == 4.0);
  CHECK(base.difference == 4.0);
  CHECK(base.ok);

  testgen::Rng rng(testgen::suite_seed() ^ 0x5a5du);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rep = lower_bound_check(d1, d2, random_unitary(rng, 2), 1e-9);
    CHECK(rep.ok);
    CHECK(rep.difference >= 4.0 - 1e-9);
  }
}

TEST_CASE("lower bound check validates its inputs") {
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  DenseMatrix skew = id;
  skew(0, 1) = Complex(0.3, 0.0);
  CHECK_THROWS_WITH(lower_bound_check(skew, id, id), ContainsSubstring("diagonal"));
  CHECK_THROWS_WITH(lower_bound_check(id, id, skew), ContainsSubstring("not unitary"));
  CHECK_THROWS_WITH(lower_bound_check(id, DenseMatrix::Identity(3, 3), id),
                    ContainsSubstring("dimensions disagree"));

  // drift within the tolerance passes, drift past it does not; the check
  // sees u^* u - 1, so the diagonal drift enters doubled
  DenseMatrix close = id;
  close(0, 0) += Complex(4e-11, 0.0);
  CHECK(lower_bound_check(id, id, close, 1e-10).ok);
  DenseMatrix far = id;
  far(0, 0) += Complex(1e-6, 0.0);
  CHECK_THROWS_WITH(lower_bound_check(id, id, far, 1e-10), ContainsSubstring("not unitary"));
}

TEST_CASE("executed bipartite plans respect the lower bound") {
  testgen::Rng rng(testgen::suite_seed() ^ 0xb1b2u);
  const auto profile = AlgebraProfile::o2();
  int built = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto [g1, g2] = testgen::random_union_connected_pair(rng, 0.5, 30);
    const auto d1 = testgen::random_datum(rng, profile, g1);
    const auto d2 = testgen::random_datum(rng, profile, g2);
    const PairingPlan plan = bipartite_schedule(d1, d2);
    const PlanExecution exec = execute_plan(plan);
    CHECK(exec.achieved <= plan.certified_bound);

    // exec.u aligns via u^* m2 u, so its adjoint is the conjugator here
    const auto rep = lower_bound_check(exec.m1, exec.m2, exec.u.adjoint());
    CHECK(rep.ok);
    // svd roundoff versus the direct gap maximum
    CHECK_THAT(rep.difference, Catch::Matchers::WithinAbs(exec.achieved, 1e-12));
    ++built;
  }
  CHECK(built == 10);
}

TEST_CASE("projection conjugator rotates rank one projections exactly") {
  DenseMatrix p = DenseMatrix::Zero(2, 2);
  p(0, 0) = Complex(1.0, 0.0);
  const DenseMatrix q = rotated_rank_one(0.3);

  const auto conj = projection_conjugator(p, q);
  CHECK_THAT(conj.gap, Catch::Matchers::WithinAbs(0.3, 1e-12));  // gap is sin of the angle
  CHECK(conj.err < 1e-12);
  CHECK(opnorm(conj.w.adjoint() * conj.w - DenseMatrix::Identity(2, 2)) < 1e-12);
  CHECK(std::llround((conj.w * p * conj.w.adjoint()).trace().real()) == 1);

  CHECK_THROWS_WITH(projection_conjugator(p, rotated_rank_one(0.6)),
                    ContainsSubstring("not close enough"));
  DenseMatrix half = DenseMatrix::Zero(2, 2);
  half(0, 0) = Complex(0.5, 0.0);
  CHECK_THROWS_WITH(projection_conjugator(half, q), ContainsSubstring("not a projection"));
}

TEST_CASE("projection conjugator preserves rank on a random eight dimensional pair") {
  testgen::Rng rng(testgen::suite_seed() ^ 0x9d9eu);
  const int n = 8, rank = 3;
  const DenseMatrix u0 = random_unitary(rng, n);
  DenseMatrix diag = DenseMatrix::Zero(n, n);
  for (int i = 0; i < rank; ++i) diag(i, i) = Complex(1.0, 0.0);
  const DenseMatrix p = u0 * diag * u0.adjoint();
  Eigen::HouseholderQR<DenseMatrix> qr(DenseMatrix::Identity(n, n) + 0.05 * random_gaussian(rng, n));
  const DenseMatrix u1 = DenseMatrix(qr.householderQ());
  const DenseMatrix q = u1 * p * u1.adjoint();

  const auto conj = projection_conjugator(p, q);
  REQUIRE(conj.gap < 0.5);
  CHECK(conj.err < 1e-8);
  CHECK(std::llround((conj.w * p * conj.w.adjoint()).trace().real()) == rank);
}

TEST_CASE("triangular similarity removes a single coupling symbolically") {
  const Complex x(0.7, 0.2);
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 0) = Complex(1.0, 0.0);
  a(0, 1) = x;

  const auto sim = triangular_similarity(a, {1, 1});
  CHECK(sim.t(0, 1) == x);        // y = x (1 - 0)^{-1}
  CHECK(sim.t_inv(0, 1) == -x);
  CHECK(sim.err <= 1e-15);
  CHECK(opnorm(sim.t * sim.t_inv - DenseMatrix::Identity(2, 2)) == 0.0);
  CHECK(sim.diagonal(0, 0) == Complex(1.0, 0.0));
  CHECK(sim.diagonal(1, 1) == Complex(0.0, 0.0));
}

TEST_CASE("triangular similarity clears a three block matrix") {
  testgen::Rng rng(testgen::suite_seed() ^ 0x7172u);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  const std::vector<int> sizes{1, 2, 1};
  const std::vector<Complex> lambda{Complex(2.0, 0.0), Complex(-1.0, 0.5), Complex(0.3, 0.0)};
  DenseMatrix a = DenseMatrix::Zero(4, 4);
  a(0, 0) = lambda[0];
  a(1, 1) = a(2, 2) = lambda[1];
  a(3, 3) = lambda[2];
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!(i == 1 && j == 2)) a(i, j) = Complex(entry(rng), entry(rng));

  const auto sim = triangular_similarity(a, sizes);
  CHECK(sim.err < 1e-10);
  CHECK(opnorm(sim.t_inv * sim.t - DenseMatrix::Identity(4, 4)) < 1e-13);
  CHECK(sim.diagonal(1, 1) == lambda[1]);
}

TEST_CASE("triangular similarity validates its inputs") {
  DenseMatrix twin = DenseMatrix::Identity(2, 2) * Complex(2.0, 0.0);
  twin(0, 1) = Complex(1.0, 0.0);
  CHECK_THROWS_WITH(triangular_similarity(twin, {1, 1}),
                    ContainsSubstring("pairwise distinct"));

  DenseMatrix jordan = DenseMatrix::Identity(2, 2);
  jordan(0, 1) = Complex(1.0, 0.0);
  CHECK_THROWS_WITH(triangular_similarity(jordan, {2}), ContainsSubstring("not scalar"));

  DenseMatrix lower = DenseMatrix::Zero(2, 2);
  lower(0, 0) = Complex(1.0, 0.0);
  lower(1, 0) = Complex(1.0, 0.0);
  CHECK_THROWS_WITH(triangular_similarity(lower, {1, 1}),
                    ContainsSubstring("not block upper triangular"));

  CHECK_THROWS_WITH(triangular_similarity(jordan, {1, 2}),
                    ContainsSubstring("cover the matrix"));
}

TEST_CASE("analytic calculus bound holds on a perturbed normal pair") {
  DenseMatrix a = DenseMatrix::Zero(2, 2), b = DenseMatrix::Zero(2, 2);
  a(1, 1) = Complex(1.0, 0.0);
  b(0, 0) = Complex(0.05, 0.0);
  b(1, 1) = Complex(0.95, 0.0);
  DenseMatrix v = DenseMatrix::Identity(2, 2);
  v(0, 1) = Complex(0.1, 0.0);

  const ContourRect rect{-0.5, 1.5, -0.5, 0.5, 0.05};
  const auto out = analytic_calculus_bound(a, b, v, {Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(1.0, 0.0)}, rect);
  CHECK(out.lhs > 0.0);
  CHECK(out.lhs <= out.rhs + out.quad_error);
  CHECK(out.contour_length == 6.0);
  CHECK(out.sup_factor > 0.0);
}

TEST_CASE("analytic calculus quadrature matches the exact calculus") {
  const DenseMatrix a = DenseMatrix::Constant(1, 1, Complex(0.25, 0.0));
  const DenseMatrix b = DenseMatrix::Zero(1, 1);
  const DenseMatrix v = DenseMatrix::Identity(1, 1);
  const ContourRect rect{-0.5, 1.0, -0.5, 0.5, 0.05};

  // f(z) = z, so the calculus gap is exactly |0.25 - 0|
  const auto out = analytic_calculus_bound(a, b, v, {Complex(0.0, 0.0), Complex(1.0, 0.0)}, rect);
  CHECK(std::abs(out.lhs - 0.25) <= out.quad_error + 1e-10);

  // identical inputs cancel node by node
  const auto zero = analytic_calculus_bound(a, a, v, {Complex(0.0, 0.0), Complex(1.0, 0.0)}, rect);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
}

TEST_CASE("analytic calculus bound validates its inputs") {
  const DenseMatrix a = DenseMatrix::Constant(1, 1, Complex(0.25, 0.0));
  const DenseMatrix v = DenseMatrix::Identity(1, 1);
  const std::vector<Complex> f{Complex(0.0, 0.0), Complex(1.0, 0.0)};

  const DenseMatrix outside = DenseMatrix::Constant(1, 1, Complex(2.0, 0.0));
  CHECK_THROWS_WITH(analytic_calculus_bound(a, outside, v, f, {-0.5, 1.0, -0.5, 0.5, 0.05}),
                    ContainsSubstring("inside the contour"));
  CHECK_THROWS_WITH(analytic_calculus_bound(a, a, v, f, {-0.5, 1.0, -0.5, 0.5, 0.6}),
                    ContainsSubstring("exceeds the spectral clearance"));
  CHECK_THROWS_WITH(analytic_calculus_bound(a, a, v, f, {-0.5, 1.0, -0.5, 0.5, 0.0}),
                    ContainsSubstring("malformed contour"));
  CHECK_THROWS_WITH(analytic_calculus_bound(a, a, DenseMatrix::Zero(1, 1), f,
                                            {-0.5, 1.0, -0.5, 0.5, 0.05}),
                    ContainsSubstring("not invertible"));

  DenseMatrix nilpotent = DenseMatrix::Zero(2, 2);
  nilpotent(0, 1) = Complex(1.0, 0.0);
  const DenseMatrix id2 = DenseMatrix::Identity(2, 2);
  CHECK_THROWS_WITH(analytic_calculus_bound(nilpotent, id2 * Complex(0.1, 0.0), id2, f,
                                            {-0.5, 1.0, -0.5, 0.5, 0.05}),
                    ContainsSubstring("not normal"));
}

TEST_CASE("semicontinuity probe finds the stabilization index") {
  std::vector<DenseMatrix> models;
  models.push_back(DenseMatrix::Constant(1, 1, Complex(1.0, 0.0)));
  for (int k = 1; k <= 13; ++k)
    models.push_back(DenseMatrix::Constant(1, 1, Complex(1.0 / k, 0.0)));

  const auto hit = semicontinuity_probe(models, Complex(0.0, 0.0), 0.1);
  REQUIRE(hit.has_value());
  CHECK(*hit == 11);  // 1/11 is the first entry inside the open disk for good

  const auto everywhere = semicontinuity_probe(models, Complex(0.0, 0.0), 2.0);
  REQUIRE(everywhere.has_value());
  CHECK(*everywhere == 0);

  CHECK_FALSE(semicontinuity_probe(models, Complex(0.0, 0.0), 1e-4).has_value());
  CHECK_THROWS_WITH(semicontinuity_probe({}, Complex(0.0, 0.0), 0.1),
                    ContainsSubstring("no models"));
  CHECK_THROWS_WITH(semicontinuity_probe(models, Complex(0.0, 0.0), 0.0),
                    ContainsSubstring("radius"));
}
