#include <catch2/catch_amalgamated.hpp>

#include "spectral_orbits/kdata.hpp"
#include "support/generators.hpp"

using namespace spectral_orbits;

TEST_CASE("group arithmetic reduces torsion coordinates") {
  KGroup g{1, {3}};  // Z + Z_3
  KElement a{g, {1, 2}};
  KElement b{g, {0, 2}};
  auto s = k_add(a, b);
  CHECK(s.coords == std::vector<long long>{1, 1});
  CHECK(k_eq(k_add(a, k_neg(a)), KElement::zero(g)));
  CHECK_THROWS_AS(k_add(a, KElement::zero(KGroup::free(1))), std::invalid_argument);

  // Associativity and commutativity on random elements.
  testgen::Rng rng(testgen::suite_seed() ^ 0x31);
  std::uniform_int_distribution<long long> c(-10, 10);
  for (int t = 0; t < 200; ++t) {
    KElement x{g, {c(rng), c(rng)}}, y{g, {c(rng), c(rng)}}, z{g, {c(rng), c(rng)}};
    CHECK(k_eq(k_add(k_add(x, y), z), k_add(x, k_add(y, z))));
    CHECK(k_eq(k_add(x, y), k_add(y, x)));
  }
}

TEST_CASE("built-in profiles declare the expected capability flags") {
  auto o2 = AlgebraProfile::o2();
  CHECK(o2.k0.trivial());
  CHECK(o2.k1.trivial());
  CHECK(o2.purely_infinite_simple);
  CHECK(o2.all_nonzero_projections_equivalent);

  auto o3 = AlgebraProfile::cuntz(3);
  CHECK(o3.k0 == KGroup::cyclic(2));
  CHECK(o3.unit_class.coords == std::vector<long long>{1});
  CHECK_FALSE(o3.all_nonzero_projections_equivalent);
  CHECK_THROWS_AS(AlgebraProfile::cuntz(2), std::invalid_argument);

  auto calkin = AlgebraProfile::calkin();
  CHECK(calkin.k0.trivial());
  CHECK(calkin.k1 == KGroup::free(1));
  CHECK(calkin.all_nonzero_projections_equivalent);

  auto iii = AlgebraProfile::type_iii();
  CHECK_FALSE(iii.purely_infinite_simple);
  CHECK(iii.weak_fn);
  CHECK(iii.all_nonzero_projections_equivalent);

  CHECK(AlgebraProfile::by_name("O7").has_value());
  CHECK(AlgebraProfile::by_name("O7")->k0 == KGroup::cyclic(6));
  CHECK_FALSE(AlgebraProfile::by_name("O1").has_value());
  CHECK_FALSE(AlgebraProfile::by_name("bogus").has_value());
}

TEST_CASE("clopen classes add over O3 torsion") {
  // Two components, both labeled 1 in Z_2: together they carry the unit class,
  // and the pair sums to 0.
  GridSet g(1.0, {GridBox{0, 0}, GridBox{5, 0}});
  auto d = make_datum(g, AlgebraProfile::cuntz(3));
  d.component_k0[0] = KElement{d.profile.k0, {1}};
  d.component_k0[1] = KElement{d.profile.k0, {1}};
  CHECK(k_eq(clopen_class(d, {0, 1}), KElement::zero(d.profile.k0)));
  CHECK(k_eq(clopen_class(d, {0}), KElement{d.profile.k0, {1}}));
  CHECK_THROWS_AS(clopen_class(d, {7}), std::invalid_argument);
  // 1 + 1 = 0 in Z_2, so the sum of the labels misses the unit class.
  auto violations = validate_datum(d);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("unit class") != std::string::npos);
}

TEST_CASE("validate_datum reports structural violations") {
  GridSet g(1.0, {GridBox{0, 0}}, {{Complex(5.0, 0.0), false}});
  SECTION("valid zero-labeled datum") {
    auto d = make_datum_zero_labels(g, AlgebraProfile::o2());
    CHECK(validate_datum(d).empty());
  }
  SECTION("missing labels are named") {
    auto d = make_datum(g, AlgebraProfile::o2());
    auto v = validate_datum(d);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == "component 0: missing k0 label");
    CHECK(v[1] == "component 1: missing k0 label");
  }
  SECTION("nonzero hole label under trivial k1") {
    std::vector<GridBox> ring;
    for (long long n = -1; n <= 1; ++n)
      for (long long m = -1; m <= 1; ++m)
        if (n != 0 || m != 0) ring.push_back({n, m});
    auto d = make_datum_zero_labels(GridSet(1.0, ring), AlgebraProfile::o2());
    d.hole_k1[0] = KElement{KGroup::free(1), {2}};  // wrong group, nonzero
    auto v = validate_datum(d);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == "hole 0: k1 label group mismatch");
    CHECK(v[1] == "hole 0: label must be 0 (trivial k1)");
  }
  SECTION("unknown ids are flagged") {
    auto d = make_datum_zero_labels(g, AlgebraProfile::o2());
    d.component_k0[9] = KElement::zero(d.profile.k0);
    auto v = validate_datum(d);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "component 9: label references unknown component");
  }
  SECTION("validation is idempotent") {
    auto d = make_datum(g, AlgebraProfile::o2());
    CHECK(validate_datum(d) == validate_datum(d));
  }
}

TEST_CASE("calkin hole labels model fredholm indices") {
  std::vector<GridBox> ring;
  for (long long n = -2; n <= 2; ++n)
    for (long long m = -2; m <= 2; ++m)
      if (std::max(std::llabs(n), std::llabs(m)) == 2) ring.push_back({n, m});
  auto d = make_datum_zero_labels(GridSet(0.5, ring), AlgebraProfile::calkin());
  REQUIRE(d.complement.holes.size() == 1);
  d.hole_k1[0] = KElement{d.profile.k1, {-3}};  // index -3 inside the ring
  CHECK(validate_datum(d).empty());
}
