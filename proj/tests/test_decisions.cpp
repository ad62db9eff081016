#include <catch2/catch_amalgamated.hpp>

#include "spectral_orbits/decisions.hpp"
#include "support/generators.hpp"

using namespace spectral_orbits;

namespace {

bool has_condition(const Verdict& v, const std::string& id) {
  for (const auto& f : v.failed)
    if (f.condition == id) return true;
  return false;
}

// 8 boxes around a single-box hole at (hole_n, hole_m).
std::vector<GridBox> ring_boxes(long long hole_n = 0, long long hole_m = 0) {
  std::vector<GridBox> out;
  for (long long n = -1; n <= 1; ++n)
    for (long long m = -1; m <= 1; ++m)
      if (n != 0 || m != 0) out.push_back({hole_n + n, hole_m + m});
  return out;
}

AlgebraProfile z2_all_equivalent() {
  AlgebraProfile p;
  p.name = "CustomZ2";
  p.k0 = KGroup::cyclic(2);
  p.unit_class = k_normalize(KElement{p.k0, {1}});
  p.k1 = KGroup::trivial_group();
  p.purely_infinite_simple = true;
  p.all_nonzero_projections_equivalent = true;
  return p;
}

SpectralDatum two_point_o3(long long a_coord, long long b_coord, AlgebraProfile profile) {
  GridSet g(0.5, {}, {{Complex(0, 0), false}, {Complex(1, 0), false}});
  std::map<int, KElement> labels{{0, k_normalize(KElement{profile.k0, {a_coord}})},
                                 {1, k_normalize(KElement{profile.k0, {b_coord}})}};
  return make_datum(g, profile, labels, {});
}

}  // namespace

TEST_CASE("aue detects spectrum differences") {
  auto p = AlgebraProfile::o2();
  auto d1 = make_datum_zero_labels(GridSet(1.0, {{0, 0}, {1, 0}}), p);
  auto d2 = make_datum_zero_labels(GridSet(1.0, {{0, 0}, {1, 0}, {2, 0}}), p);
  auto v = decide_aue(d1, d2);
  CHECK_FALSE(v.answer);
  CHECK(has_condition(v, "(a)"));

  // Same represented points but a flipped cluster flag still differs.
  auto c1 = make_datum_zero_labels(GridSet(1.0, {}, {{Complex(3, 0), true}}), p);
  auto c2 = make_datum_zero_labels(GridSet(1.0, {}, {{Complex(3, 0), false}}), p);
  auto w = decide_aue(c1, c2);
  CHECK_FALSE(w.answer);
  CHECK(has_condition(w, "(a)"));
  CHECK(w.failed.front().witness.find("cluster") != std::string::npos);

  CHECK(decide_aue(d1, d1).answer);
}

TEST_CASE("aue compares index labels over the common complement") {
  auto p = AlgebraProfile::calkin();
  GridSet ring(1.0, ring_boxes());
  auto idx = [&](long long k) {
    return make_datum(ring, p, {{0, KElement::zero(p.k0)}},
                      {{0, KElement{p.k1, {k}}}});
  };
  auto v = decide_aue(idx(1), idx(2));
  CHECK_FALSE(v.answer);
  REQUIRE(has_condition(v, "(b)"));
  CHECK(v.failed.front().witness.find("(0,0)") != std::string::npos);
  CHECK(decide_aue(idx(-3), idx(-3)).answer);

  // Zero hole label agrees with the unbounded region of a shifted frame.
  auto plain = make_datum_zero_labels(ring, p);
  CHECK(decide_aue(plain, plain).answer);
}

TEST_CASE("aue compares component classes unless projections collapse") {
  auto o3 = AlgebraProfile::cuntz(3);
  auto d1 = two_point_o3(0, 1, o3);
  auto d2 = two_point_o3(1, 0, o3);
  auto v = decide_aue(d1, d2);
  CHECK_FALSE(v.answer);
  CHECK(v.failed.size() == 2);
  CHECK(has_condition(v, "(c)"));
  CHECK(decide_aue(d1, d1).answer);

  // Same shape of data under a profile where all nonzero projections are
  // equivalent: the class comparison is dropped entirely.
  auto pz = z2_all_equivalent();
  CHECK(decide_aue(two_point_o3(0, 1, pz), two_point_o3(1, 0, pz)).answer);
}

TEST_CASE("aue precondition failures throw") {
  auto o2 = make_datum_zero_labels(GridSet(1.0, {{0, 0}}), AlgebraProfile::o2());
  auto iii = make_datum_zero_labels(GridSet(1.0, {{0, 0}}), AlgebraProfile::type_iii());
  CHECK_THROWS_AS(decide_aue(o2, iii), std::invalid_argument);

  auto fine = make_datum_zero_labels(GridSet(0.5, {{0, 0}}), AlgebraProfile::o2());
  CHECK_THROWS_AS(decide_aue(o2, fine), std::invalid_argument);

  // Missing component label makes the datum invalid.
  auto bad = make_datum(GridSet(1.0, {{0, 0}}), AlgebraProfile::cuntz(3));
  auto good = make_datum(GridSet(1.0, {{0, 0}}), AlgebraProfile::cuntz(3),
                         {{0, k_normalize(KElement{KGroup::cyclic(2), {1}})}});
  CHECK_THROWS_AS(decide_aue(bad, bad), std::invalid_argument);
  CHECK(decide_aue(good, good).answer);

  // Profile with neither capability flag is out of scope.
  AlgebraProfile finite;
  finite.name = "Finite";
  finite.unit_class = KElement::zero(finite.k0);
  auto f = make_datum_zero_labels(GridSet(1.0, {{0, 0}}), finite);
  CHECK_THROWS_AS(decide_aue(f, f), std::invalid_argument);

  // TypeIII qualifies through the equivalent-projections flag.
  CHECK(decide_aue(iii, iii).answer);
}

TEST_CASE("similarity requires accumulation inside target components") {
  auto p = AlgebraProfile::o2();
  auto segment = make_datum_zero_labels(GridSet(1.0, {{0, 0}, {1, 0}}), p);
  auto isolated = make_datum_zero_labels(GridSet(1.0, {}, {{Complex(0, 0), false}}), p);
  auto cluster = make_datum_zero_labels(GridSet(1.0, {}, {{Complex(0, 0), true}}), p);

  // An isolated eigenvalue cannot fill out a continuum.
  auto v = decide_similarity(isolated, segment);
  CHECK_FALSE(v.answer);
  CHECK(v.failed.size() == 1);
  CHECK(has_condition(v, "(4)"));

  // A cluster point can.
  CHECK(decide_similarity(cluster, segment).answer);

  // Containment is directional.
  auto r = decide_similarity(segment, isolated);
  CHECK_FALSE(r.answer);
  CHECK(has_condition(r, "(1)"));
  CHECK(has_condition(r, "(2)"));

  // A cluster-flagged target singleton needs a cluster source at that point.
  auto tgt_cluster = decide_similarity(isolated, cluster);
  CHECK_FALSE(tgt_cluster.answer);
  CHECK(has_condition(tgt_cluster, "(4)"));
  CHECK(decide_similarity(cluster, cluster).answer);
}

TEST_CASE("similarity flags unreached target components") {
  auto p = AlgebraProfile::o2();
  auto src = make_datum_zero_labels(GridSet(1.0, {{0, 0}}), p);
  auto tgt = make_datum_zero_labels(GridSet(1.0, {{0, 0}, {5, 0}, {6, 0}}), p);
  auto v = decide_similarity(src, tgt);
  CHECK_FALSE(v.answer);
  CHECK(has_condition(v, "(2)"));
  bool witness_names_far_component = false;
  for (const auto& f : v.failed)
    if (f.condition == "(2)") witness_names_far_component = f.witness == "component 1";
  CHECK(witness_names_far_component);
}

TEST_CASE("similarity hole conditions track the index of the source") {
  auto p = AlgebraProfile::calkin();
  GridSet ring(1.0, ring_boxes());
  std::vector<GridBox> filled = ring_boxes();
  filled.push_back({0, 0});
  GridSet square(1.0, filled);

  auto annulus = [&](long long k) {
    return make_datum(ring, p, {{0, KElement::zero(p.k0)}}, {{0, KElement{p.k1, {k}}}});
  };
  auto solid = make_datum_zero_labels(square, p);

  // Filling the hole absorbs the index obstruction.
  CHECK(decide_similarity(annulus(1), solid).answer);
  CHECK(decide_similarity(annulus(1), annulus(1)).answer);

  // Mismatched labels on the same hole fail the index condition.
  auto v = decide_similarity(annulus(0), annulus(1));
  CHECK_FALSE(v.answer);
  REQUIRE(v.failed.size() == 1);
  CHECK(v.failed.front().condition == "(3)");
  CHECK(v.failed.front().witness.find("hole 0") != std::string::npos);

  // Source covering the target hole: containment and the representative check
  // both fail.
  auto r = decide_similarity(solid, annulus(1));
  CHECK_FALSE(r.answer);
  CHECK(has_condition(r, "(1)"));
  CHECK(has_condition(r, "(3)"));
  bool rep_inside = false;
  for (const auto& f : r.failed)
    if (f.condition == "(3)") rep_inside = f.reason.find("inside the source") != std::string::npos;
  CHECK(rep_inside);
}

TEST_CASE("similarity sums source classes inside each target component") {
  auto o3 = AlgebraProfile::cuntz(3);
  // Two target segments, each holding one cluster point of the source.
  GridSet tgt_set(1.0, {{0, 0}, {1, 0}, {5, 0}, {6, 0}});
  GridSet src_set(1.0, {}, {{Complex(0, 0), true}, {Complex(5, 0), true}});
  auto one = k_normalize(KElement{o3.k0, {1}});
  auto zero = KElement::zero(o3.k0);

  auto src = make_datum(src_set, o3, {{0, one}, {1, zero}}, {});
  auto tgt_match = make_datum(tgt_set, o3, {{0, one}, {1, zero}}, {});
  auto tgt_swap = make_datum(tgt_set, o3, {{0, zero}, {1, one}}, {});

  CHECK(decide_similarity(src, tgt_match).answer);
  auto v = decide_similarity(src, tgt_swap);
  CHECK_FALSE(v.answer);
  CHECK(v.failed.size() == 2);
  CHECK(v.failed[0].condition == "(5)");
  CHECK(v.failed[1].condition == "(5)");

  // Two source components merging into one target component sum their classes.
  GridSet merged(1.0, {{-1, 0}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}});
  auto tgt_merged = make_datum(merged, o3, {{0, k_add(one, zero)}}, {});
  CHECK(decide_similarity(src, tgt_merged).answer);

  // Under the collapsed-projection profile the class condition is dropped.
  auto pz = z2_all_equivalent();
  auto src_z = make_datum(src_set, pz, {{0, one}, {1, zero}}, {});
  auto tgt_z = make_datum(tgt_set, pz, {{0, zero}, {1, one}}, {});
  CHECK(decide_similarity(src_z, tgt_z).answer);
}

TEST_CASE("nilpotent limit needs zero, connectedness, and vanishing index") {
  auto p = AlgebraProfile::o2();
  CHECK(decide_nilpotent_limit(make_datum_zero_labels(GridSet(1.0, {{0, 0}, {1, 0}}), p)).answer);

  auto off = decide_nilpotent_limit(make_datum_zero_labels(GridSet(1.0, {{2, 0}}), p));
  CHECK_FALSE(off.answer);
  CHECK(has_condition(off, "zero"));

  auto split =
      decide_nilpotent_limit(make_datum_zero_labels(GridSet(1.0, {{0, 0}, {4, 0}}), p));
  CHECK_FALSE(split.answer);
  CHECK(has_condition(split, "connected"));

  // Ring through the origin with a unit index on its hole.
  auto calkin = AlgebraProfile::calkin();
  GridSet ring(1.0, ring_boxes(1, 0));
  auto wound = make_datum(ring, calkin, {{0, KElement::zero(calkin.k0)}},
                          {{0, KElement{calkin.k1, {1}}}});
  auto v = decide_nilpotent_limit(wound);
  CHECK_FALSE(v.answer);
  CHECK(v.failed.size() == 1);
  CHECK(has_condition(v, "index"));
  CHECK(decide_nilpotent_limit(make_datum_zero_labels(ring, calkin)).answer);

  // TypeIII is admitted through the weak F+N route; a plain finite profile is not.
  CHECK(decide_nilpotent_limit(
            make_datum_zero_labels(GridSet(1.0, {{0, 0}}), AlgebraProfile::type_iii()))
            .answer);
  AlgebraProfile finite;
  finite.name = "Finite";
  finite.unit_class = KElement::zero(finite.k0);
  CHECK_THROWS_AS(
      decide_nilpotent_limit(make_datum_zero_labels(GridSet(1.0, {{0, 0}}), finite)),
      std::invalid_argument);
}

TEST_CASE("moment obstruction separates uniform grids of different width") {
  DiscreteMeasure full, half;
  for (int i = 0; i < 64; ++i) {
    full.atoms.push_back({(i + 0.5) / 64.0, 1.0 / 64.0});
    half.atoms.push_back({(i + 0.5) / 128.0, 1.0 / 64.0});
  }
  CHECK(moment(full, 1) - moment(half, 1) == 0.25);
  auto v = ii1_moment_obstruction(full, half, 3);
  CHECK_FALSE(v.answer);
  REQUIRE_FALSE(v.failed.empty());
  CHECK(v.failed.front().condition == "moment 1");
  CHECK(ii1_moment_obstruction(full, full, 8).answer);
}

TEST_CASE("moment obstruction sees degree where distributions first differ") {
  // Matching mean and variance, different fourth moment.
  const double x = std::sqrt(2.0);
  DiscreteMeasure two{{{-1.0, 0.5}, {1.0, 0.5}}};
  DiscreteMeasure three{{{-x, 0.25}, {0.0, 0.5}, {x, 0.25}}};
  CHECK(ii1_moment_obstruction(two, three, 3).answer);
  auto v = ii1_moment_obstruction(two, three, 4);
  CHECK_FALSE(v.answer);
  CHECK(v.failed.size() == 1);
  CHECK(v.failed.front().condition == "moment 4");
}

TEST_CASE("moment obstruction rejects malformed measures") {
  DiscreteMeasure ok{{{0.0, 1.0}}};
  DiscreteMeasure negw{{{0.0, -1.0}, {1.0, 2.0}}};
  DiscreteMeasure short_sum{{{0.0, 0.5}, {1.0, 0.4}}};
  DiscreteMeasure empty;
  CHECK_THROWS_AS(ii1_moment_obstruction(ok, negw, 2), std::invalid_argument);
  CHECK_THROWS_AS(ii1_moment_obstruction(short_sum, ok, 2), std::invalid_argument);
  CHECK_THROWS_AS(ii1_moment_obstruction(empty, ok, 2), std::invalid_argument);
  CHECK_THROWS_AS(ii1_moment_obstruction(ok, ok, 0), std::invalid_argument);
}

TEST_CASE("aue is symmetric and implies similarity both ways") {
  testgen::Rng rng(testgen::suite_seed() ^ 0x77);
  const std::vector<AlgebraProfile> profiles{AlgebraProfile::o2(), AlgebraProfile::cuntz(3),
                                             AlgebraProfile::cuntz(5), AlgebraProfile::calkin()};
  const double resolutions[] = {1.0, 0.5};
  int equivalent_pairs = 0;
  for (int t = 0; t < 80; ++t) {
    const auto& p = profiles[static_cast<std::size_t>(t) % profiles.size()];
    const double res = resolutions[t % 2];
    auto d1 = testgen::random_datum(rng, p, res, 14, 2);
    SpectralDatum d2 = d1;
    switch (t % 5) {
      case 0:
        break;  // identical copy
      case 1:
        d2 = testgen::random_datum(rng, p, d1.spectrum);
        break;
      case 2:
        d2 = testgen::random_datum(rng, p, res, 14, 2);
        break;
      case 3:
        if (d1.components.size() >= 2) {
          std::swap(d2.component_k0.at(0), d2.component_k0.at(1));
        }
        break;
      case 4:
        if (!d2.complement.holes.empty() && !p.k1.trivial()) {
          auto& label = d2.hole_k1.at(0);
          label = k_add(label, KElement{p.k1, {1}});
        }
        break;
    }
    CHECK(decide_aue(d1, d1).answer);
    const auto fwd = decide_aue(d1, d2);
    CHECK(fwd.answer == decide_aue(d2, d1).answer);
    if (fwd.answer) {
      ++equivalent_pairs;
      CHECK(decide_similarity(d1, d2).answer);
      CHECK(decide_similarity(d2, d1).answer);
    }
  }
  CHECK(equivalent_pairs >= 16);  // the copy mode alone guarantees these
}

TEST_CASE("similarity is transitive along nested spectra") {
  testgen::Rng rng(testgen::suite_seed() ^ 0x99);
  auto p = AlgebraProfile::o2();
  std::uniform_int_distribution<int> grow(1, 6);
  std::uniform_int_distribution<long long> offs(-5, 5);
  std::bernoulli_distribution detach(0.3);
  int chained = 0;
  for (int t = 0; t < 100; ++t) {
    auto base = testgen::random_blob(rng, grow(rng), offs(rng), offs(rng));
    auto extend = [&](std::vector<GridBox> boxes) {
      if (detach(rng)) {
        auto far = testgen::random_blob(rng, grow(rng), offs(rng) + 20, offs(rng));
        boxes.insert(boxes.end(), far.begin(), far.end());
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, boxes.size() - 1);
        auto seed = boxes[pick(rng)];
        auto more = testgen::random_blob(rng, grow(rng), seed.n, seed.m);
        boxes.insert(boxes.end(), more.begin(), more.end());
      }
      return boxes;
    };
    auto mid = extend(base);
    auto top = extend(mid);
    auto d1 = make_datum_zero_labels(GridSet(1.0, base), p);
    auto d2 = make_datum_zero_labels(GridSet(1.0, mid), p);
    auto d3 = make_datum_zero_labels(GridSet(1.0, top), p);
    if (decide_similarity(d1, d2).answer && decide_similarity(d2, d3).answer) {
      ++chained;
      CHECK(decide_similarity(d1, d3).answer);
    }
  }
  CHECK(chained >= 20);
}
