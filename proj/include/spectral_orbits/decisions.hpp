#pragma once

// Decision predicates over labeled spectra: approximate unitary equivalence,
// closed-similarity-orbit membership, norm-limits of nilpotents, and the
// tracial moment obstruction for self-adjoint data.

#include <sstream>

#include "spectral_orbits/kdata.hpp"

namespace spectral_orbits {

struct FailedCondition {
  std::string condition;  // stable id, e.g. "(2)" or "(b)" or "moment 3"
  std::string reason;
  std::string witness;
};

struct Verdict {
  bool answer = false;
  std::vector<FailedCondition> failed;
};

namespace detail {

inline void require_comparable(const SpectralDatum& a, const SpectralDatum& b,
                               const char* op) {
  if (!(a.profile == b.profile))
    throw std::invalid_argument(std::string(op) + ": profile mismatch");
  if (a.spectrum.resolution() != b.spectrum.resolution())
    throw std::invalid_argument(std::string(op) + ": resolution mismatch");
  for (const auto* d : {&a, &b}) {
    auto v = validate_datum(*d);
    if (!v.empty())
      throw std::invalid_argument(std::string(op) + ": invalid datum: " + v.front());
  }
}

// Joint frame covering both spectra with both margins honored.
inline ComplementFrame joint_frame(const GridSet& a, const GridSet& b, double margin_a,
                                   double margin_b) {
  const ComplementFrame fa = default_frame(a, margin_a);
  const ComplementFrame fb = default_frame(b, margin_b);
  return ComplementFrame{std::min(fa.n_lo, fb.n_lo), std::max(fa.n_hi, fb.n_hi),
                         std::min(fa.m_lo, fb.m_lo), std::max(fa.m_hi, fb.m_hi)};
}

// Complement labeling of one datum over an explicit frame: for each frame box,
// spectrum (-2), unbounded complement (-1), or the containing hole id.
struct RegionMap {
  ComplementFrame frame;
  std::vector<int> cells;
  int at(GridBox b) const {
    if (!frame.contains(b)) return -1;  // outside any sane frame: unbounded
    const long long H = frame.m_hi - frame.m_lo + 1;
    return cells[static_cast<std::size_t>((b.n - frame.n_lo) * H + (b.m - frame.m_lo))];
  }
};

inline RegionMap region_map(const SpectralDatum& d, const ComplementFrame& frame) {
  RegionMap rm;
  rm.frame = frame;
  const long long H = frame.m_hi - frame.m_lo + 1;
  const long long W = frame.n_hi - frame.n_lo + 1;
  rm.cells.assign(static_cast<std::size_t>(W * H), -1);
  auto set = [&](GridBox b, int v) {
    rm.cells[static_cast<std::size_t>((b.n - frame.n_lo) * H + (b.m - frame.m_lo))] = v;
  };
  const auto regions = complement_components(d.spectrum, frame);
  for (const auto& b : d.spectrum.boxes())
    if (frame.contains(b)) set(b, -2);
  for (const auto& h : regions.holes)
    for (const auto& b : h.boxes) set(b, h.id);
  return rm;
}

// Index label of the complement region code produced by region_map. Hole ids
// computed over an enlarging frame coincide with the datum's own: holes do not
// depend on the frame once it clears the spectrum by a full ring.
inline KElement gamma_label(const SpectralDatum& d, int region_code) {
  if (region_code == -1) return KElement::zero(d.profile.k1);
  auto it = d.hole_k1.find(region_code);
  if (it == d.hole_k1.end())
    throw std::invalid_argument("hole " + std::to_string(region_code) + ": missing k1 label");
  return it->second;
}

// Boxes in the joint complement where the two index functions disagree.
inline std::vector<GridBox> gamma_mismatch_boxes(const SpectralDatum& d1,
                                                 const SpectralDatum& d2) {
  const ComplementFrame frame =
      joint_frame(d1.spectrum, d2.spectrum, d1.frame_margin, d2.frame_margin);
  const RegionMap r1 = region_map(d1, frame);
  const RegionMap r2 = region_map(d2, frame);
  std::vector<GridBox> out;
  for (long long n = frame.n_lo; n <= frame.n_hi; ++n) {
    for (long long m = frame.m_lo; m <= frame.m_hi; ++m) {
      const GridBox b{n, m};
      const int c1 = r1.at(b), c2 = r2.at(b);
      if (c1 == -2 || c2 == -2) continue;  // inside a spectrum
      if (!k_eq(gamma_label(d1, c1), gamma_label(d2, c2))) out.push_back(b);
    }
  }
  return out;
}

// Represented-set containment at shared resolution.
inline bool spectrum_subset(const GridSet& a, const GridSet& b, std::string* witness) {
  for (const auto& box : a.boxes()) {
    if (!b.contains_box(box)) {
      if (witness) {
        std::ostringstream os;
        os << "box (" << box.n << "," << box.m << ") of the source is not in the target";
        *witness = os.str();
      }
      return false;
    }
  }
  for (const auto& p : a.isolated_points()) {
    if (!b.contains_point(p.value)) {
      if (witness) {
        std::ostringstream os;
        os << "point " << p.value.real() << "+" << p.value.imag() << "i is not in the target";
        *witness = os.str();
      }
      return false;
    }
  }
  return true;
}

struct ComponentIndex {
  std::map<GridBox, int> by_box;
  std::vector<std::pair<Complex, int>> by_point;
  const std::vector<Component>* components = nullptr;
  double resolution = 1.0;

  // Component of the represented set containing z, if any.
  std::optional<int> locate(Complex z) const {
    for (const auto& [box, id] : by_box)
      if (point_in_closed_box(z, box, resolution)) return id;
    for (const auto& [p, id] : by_point)
      if (p == z) return id;
    return std::nullopt;
  }
};

inline ComponentIndex component_index(const SpectralDatum& d) {
  ComponentIndex idx;
  idx.components = &d.components;
  idx.resolution = d.spectrum.resolution();
  for (const auto& c : d.components) {
    if (c.kind == Component::Kind::region)
      for (const auto& b : c.boxes) idx.by_box[b] = c.id;
    else
      idx.by_point.emplace_back(c.point, c.id);
  }
  return idx;
}

// Target component holding each source component (source inside target only).
inline std::optional<int> containing_component(const Component& src, const ComponentIndex& tgt) {
  if (src.kind == Component::Kind::region) {
    auto it = tgt.by_box.find(src.boxes.front());
    if (it == tgt.by_box.end()) return std::nullopt;
    return it->second;
  }
  return tgt.locate(src.point);
}

}  // namespace detail

// Approximate unitary equivalence of the two labeled spectra.
// (a) the spectra agree as grid sets, (b) the index functions agree on the
// common complement, (c) matching components carry equal K0 classes; (c) is
// dropped when all nonzero projections are equivalent in the profile.
inline Verdict decide_aue(const SpectralDatum& d1, const SpectralDatum& d2) {
  detail::require_comparable(d1, d2, "decide_aue");
  if (!d1.profile.purely_infinite_simple && !d1.profile.all_nonzero_projections_equivalent)
    throw std::invalid_argument("decide_aue: profile must be purely infinite simple or have "
                                "all nonzero projections equivalent");
  Verdict v;
  const bool spectra_equal = d1.spectrum == d2.spectrum;
  if (!spectra_equal) {
    std::string w;
    if (!detail::spectrum_subset(d1.spectrum, d2.spectrum, &w) ||
        !detail::spectrum_subset(d2.spectrum, d1.spectrum, &w)) {
      v.failed.push_back({"(a)", "spectra differ as grid sets", w});
    } else {
      v.failed.push_back({"(a)", "spectra differ as grid sets",
                          "cluster-point flags disagree on a shared isolated point"});
    }
  }
  auto mismatch = detail::gamma_mismatch_boxes(d1, d2);
  if (!mismatch.empty()) {
    std::ostringstream os;
    os << "complement box (" << mismatch.front().n << "," << mismatch.front().m << ")";
    v.failed.push_back({"(b)", "index labels disagree on the complement", os.str()});
  }
  if (!d1.profile.all_nonzero_projections_equivalent) {
    // Compare K0 labels across components with identical content.
    auto same_content = [](const Component& a, const Component& b) {
      if (a.kind != b.kind) return false;
      if (a.kind == Component::Kind::region) return a.boxes == b.boxes;
      return a.point == b.point && a.is_cluster_point == b.is_cluster_point;
    };
    for (const auto& c : d1.components) {
      const Component* match = nullptr;
      for (const auto& o : d2.components)
        if (same_content(c, o)) {
          match = &o;
          break;
        }
      if (!match) continue;  // content mismatch is condition (a)
      const KElement& l1 = d1.component_k0.at(c.id);
      const KElement& l2 = d2.component_k0.at(match->id);
      if (!k_eq(l1, l2)) {
        v.failed.push_back({"(c)", "component classes differ",
                            "component " + std::to_string(c.id) + ": " + k_str(l1) +
                                " vs " + k_str(l2)});
      }
    }
  }
  v.answer = v.failed.empty();
  return v;
}

// Membership of the target in the closed similarity orbit of the source.
// Five checks, all reported independently:
//  (1) the source spectrum sits inside the target spectrum,
//  (2) every target component meets the source spectrum,
//  (3) for every bounded hole of the target, the source index label of the
//      region containing it matches the target's label,
//  (4) every target region, and every cluster-flagged target singleton,
//      contains a non-isolated source point,
//  (5) each target component's K0 class is the sum of the source components
//      inside it; dropped when projections are all equivalent or K0 is trivial.
inline Verdict decide_similarity(const SpectralDatum& source, const SpectralDatum& target) {
  detail::require_comparable(source, target, "decide_similarity");
  Verdict v;

  std::string w;
  if (!detail::spectrum_subset(source.spectrum, target.spectrum, &w))
    v.failed.push_back({"(1)", "source spectrum is not contained in the target", w});

  const auto tgt_index = detail::component_index(target);
  std::vector<char> meets(target.components.size(), 0);
  std::vector<char> dense(target.components.size(), 0);
  for (const auto& c : source.components) {
    auto host = detail::containing_component(c, tgt_index);
    if (!host) continue;
    meets[static_cast<std::size_t>(*host)] = 1;
    const bool src_dense = c.kind == Component::Kind::region || c.is_cluster_point;
    if (src_dense) dense[static_cast<std::size_t>(*host)] = 1;
  }
  for (const auto& c : target.components) {
    if (!meets[static_cast<std::size_t>(c.id)]) {
      v.failed.push_back({"(2)", "target component misses the source spectrum",
                          "component " + std::to_string(c.id)});
    }
    const bool needs_dense =
        c.kind == Component::Kind::region ||
        (c.kind == Component::Kind::singleton && c.is_cluster_point);
    if (needs_dense && !dense[static_cast<std::size_t>(c.id)]) {
      v.failed.push_back({"(4)", "target component has no non-isolated source point",
                          "component " + std::to_string(c.id)});
    }
  }

  {
    const ComplementFrame frame = detail::joint_frame(
        source.spectrum, target.spectrum, source.frame_margin, target.frame_margin);
    const detail::RegionMap src_regions = detail::region_map(source, frame);
    for (const auto& hole : target.complement.holes) {
      const GridBox rep = box_index(hole.representative, target.spectrum.resolution());
      const int code = src_regions.at(rep);
      if (code == -2) {
        v.failed.push_back({"(3)", "hole representative lies inside the source spectrum",
                            "hole " + std::to_string(hole.id)});
        continue;
      }
      const KElement src_label = detail::gamma_label(source, code);
      const KElement tgt_label = target.hole_k1.at(hole.id);
      if (!k_eq(src_label, tgt_label)) {
        v.failed.push_back({"(3)", "index labels disagree on a target hole",
                            "hole " + std::to_string(hole.id) + ": source " + k_str(src_label) +
                                " vs target " + k_str(tgt_label)});
      }
    }
  }

  if (!target.profile.all_nonzero_projections_equivalent && !target.profile.k0.trivial()) {
    std::vector<KElement> sums(target.components.size(), KElement::zero(target.profile.k0));
    for (const auto& c : source.components) {
      auto host = detail::containing_component(c, tgt_index);
      if (!host) continue;
      sums[static_cast<std::size_t>(*host)] =
          k_add(sums[static_cast<std::size_t>(*host)], source.component_k0.at(c.id));
    }
    for (const auto& c : target.components) {
      const KElement& want = target.component_k0.at(c.id);
      const KElement& got = sums[static_cast<std::size_t>(c.id)];
      if (!k_eq(want, got)) {
        v.failed.push_back({"(5)", "component class differs from the contained source classes",
                            "component " + std::to_string(c.id) + ": target " + k_str(want) +
                                " vs source sum " + k_str(got)});
      }
    }
  }

  v.answer = v.failed.empty();
  return v;
}

// Norm-limit-of-nilpotents test: 0 in the spectrum, connected spectrum, and
// vanishing index data.
inline Verdict decide_nilpotent_limit(const SpectralDatum& d) {
  if (!d.profile.purely_infinite_simple &&
      !(d.profile.weak_fn && d.profile.all_nonzero_projections_equivalent))
    throw std::invalid_argument("decide_nilpotent_limit: profile must be purely infinite simple "
                                "or weak-FN with all nonzero projections equivalent");
  auto violations = validate_datum(d);
  if (!violations.empty())
    throw std::invalid_argument("decide_nilpotent_limit: invalid datum: " + violations.front());
  Verdict v;
  if (!d.spectrum.contains_point(Complex(0.0, 0.0)))
    v.failed.push_back({"zero", "0 is not in the spectrum", ""});
  if (d.components.size() != 1)
    v.failed.push_back({"connected", "spectrum is not connected",
                        std::to_string(d.components.size()) + " components"});
  for (const auto& h : d.complement.holes) {
    const KElement& l = d.hole_k1.at(h.id);
    if (!l.is_zero())
      v.failed.push_back({"index", "index label is nonzero on a hole",
                          "hole " + std::to_string(h.id) + ": " + k_str(l)});
  }
  v.answer = v.failed.empty();
  return v;
}

// Finitely supported real spectral distribution: atom and positive weight.
struct DiscreteMeasure {
  std::vector<std::pair<double, double>> atoms;
};

inline double moment(const DiscreteMeasure& mu, int k) {
  double s = 0.0;
  for (const auto& [x, w] : mu.atoms) s += w * std::pow(x, k);
  return s;
}

// Moment comparison for self-adjoint elements of a II_1 factor: equality of
// the spectral distributions is necessary for approximate unitary
// equivalence, so any moment gap is an obstruction.
inline Verdict ii1_moment_obstruction(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                      int max_degree, double tol = 1e-10) {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be at least 1");
  for (const auto* mu : {&mu1, &mu2}) {
    if (mu->atoms.empty()) throw std::invalid_argument("measure has no atoms");
    double total = 0.0;
    for (const auto& [x, w] : mu->atoms) {
      (void)x;
      if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > tol)
      throw std::invalid_argument("weights must sum to 1");
  }
  Verdict v;
  for (int k = 1; k <= max_degree; ++k) {
    const double delta = moment(mu1, k) - moment(mu2, k);
    if (std::abs(delta) > tol) {
      std::ostringstream os;
      os << "|delta| = " << std::abs(delta);
      v.failed.push_back({"moment " + std::to_string(k),
                          "spectral distributions differ at degree " + std::to_string(k),
                          os.str()});
    }
  }
  v.answer = v.failed.empty();
  return v;
}

}  // namespace spectral_orbits
