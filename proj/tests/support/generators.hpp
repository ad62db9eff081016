#pragma once

// Deterministic random data for the property and acceptance suites. The seed
// comes from SPECTRAL_ORBITS_SEED when set so sweeps are reproducible.

#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spectral_orbits/grid.hpp"
#include "spectral_orbits/kdata.hpp"

namespace testgen {

inline std::uint64_t suite_seed(std::uint64_t fallback = 20260816ull) {
  if (const char* env = std::getenv("SPECTRAL_ORBITS_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
    }
  }
  return fallback;
}

using Rng = std::mt19937_64;

// Connected 8-way blob of `count` boxes grown from a seed box.
inline std::vector<spectral_orbits::GridBox> random_blob(Rng& rng, int count,
                                                         long long seed_n = 0,
                                                         long long seed_m = 0) {
  std::set<spectral_orbits::GridBox> boxes{{seed_n, seed_m}};
  std::vector<spectral_orbits::GridBox> frontier{{seed_n, seed_m}};
  std::uniform_int_distribution<int> step(-1, 1);
  while (static_cast<int>(boxes.size()) < count) {
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    auto b = frontier[pick(rng)];
    const spectral_orbits::GridBox nb{b.n + step(rng), b.m + step(rng)};
    if (boxes.insert(nb).second) frontier.push_back(nb);
  }
  return {boxes.begin(), boxes.end()};
}

inline spectral_orbits::GridSet random_grid_set(Rng& rng, double resolution,
                                                int max_boxes = 24, int max_points = 3) {
  std::uniform_int_distribution<int> nblob(1, 2);
  std::uniform_int_distribution<int> npts(0, max_points);
  std::uniform_int_distribution<long long> offs(-6, 6);
  std::vector<spectral_orbits::GridBox> boxes;
  const int blobs = nblob(rng);
  std::uniform_int_distribution<int> szd(1, std::max(1, max_boxes / blobs));
  for (int i = 0; i < blobs; ++i) {
    auto blob = random_blob(rng, szd(rng), offs(rng), offs(rng));
    boxes.insert(boxes.end(), blob.begin(), blob.end());
  }
  spectral_orbits::GridSet just_boxes(resolution, boxes);
  std::vector<spectral_orbits::IsolatedPoint> pts;
  std::uniform_real_distribution<double> coord(-8.0 * resolution, 8.0 * resolution);
  std::bernoulli_distribution cluster(0.3);
  int want = npts(rng);
  int attempts = 0;
  while (static_cast<int>(pts.size()) < want && attempts++ < 200) {
    spectral_orbits::Complex z(coord(rng), coord(rng));
    if (spectral_orbits::dist_point_gridset(z, just_boxes) <= 1e-9) continue;
    bool dup = false;
    for (const auto& p : pts) dup |= (p.value == z || std::abs(p.value - z) < 1e-9);
    if (dup) continue;
    pts.push_back({z, cluster(rng)});
  }
  return spectral_orbits::GridSet(resolution, boxes, pts);
}

inline spectral_orbits::KElement random_k_element(Rng& rng, const spectral_orbits::KGroup& g) {
  std::vector<long long> coords;
  std::uniform_int_distribution<long long> fr(-3, 3);
  for (int i = 0; i < g.free_rank; ++i) coords.push_back(fr(rng));
  for (auto ord : g.torsion_orders) {
    std::uniform_int_distribution<long long> td(0, ord - 1);
    coords.push_back(td(rng));
  }
  return spectral_orbits::KElement{g, std::move(coords)};
}

// Valid labeled datum: random component classes adjusted so they sum to the
// unit class, random hole labels.
inline spectral_orbits::SpectralDatum random_datum(Rng& rng,
                                                   const spectral_orbits::AlgebraProfile& profile,
                                                   const spectral_orbits::GridSet& spectrum) {
  namespace so = spectral_orbits;
  auto d = so::make_datum(spectrum, profile);
  so::KElement sum = so::KElement::zero(profile.k0);
  for (const auto& c : d.components) {
    if (c.id + 1 == static_cast<int>(d.components.size())) {
      d.component_k0[c.id] = so::k_add(profile.unit_class, so::k_neg(sum));
    } else {
      auto e = random_k_element(rng, profile.k0);
      sum = so::k_add(sum, e);
      d.component_k0[c.id] = e;
    }
  }
  for (const auto& h : d.complement.holes) d.hole_k1[h.id] = random_k_element(rng, profile.k1);
  return d;
}

inline spectral_orbits::SpectralDatum random_datum(Rng& rng,
                                                   const spectral_orbits::AlgebraProfile& profile,
                                                   double resolution, int max_boxes = 24,
                                                   int max_points = 3) {
  return random_datum(rng, profile, random_grid_set(rng, resolution, max_boxes, max_points));
}

// Two box-only spectra covering one connected blob between them, so the
// union of the represented sets is connected while each side is arbitrary.
inline std::pair<spectral_orbits::GridSet, spectral_orbits::GridSet>
random_union_connected_pair(Rng& rng, double resolution, int max_union_boxes) {
  namespace so = spectral_orbits;
  std::uniform_int_distribution<int> count(1, max_union_boxes);
  const auto blob = random_blob(rng, count(rng));
  std::uniform_int_distribution<int> coin(0, 2);
  std::vector<so::GridBox> b1, b2;
  for (const auto& b : blob) {
    const int c = coin(rng);
    if (c != 1) b1.push_back(b);
    if (c != 0) b2.push_back(b);
  }
  if (b1.empty()) b1.push_back(blob.front());
  if (b2.empty()) b2.push_back(blob.back());
  return {so::GridSet(resolution, b1), so::GridSet(resolution, b2)};
}

}  // namespace testgen
