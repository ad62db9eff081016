#pragma once

// Finitely generated abelian K-groups, algebra profiles, and labeled spectra.
// A SpectralDatum carries a grid spectrum plus a K0 class per component and a
// K1 class per bounded complement hole; the unbounded region is fixed at 0.

#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectral_orbits/grid.hpp"

namespace spectral_orbits {

struct KGroup {
  int free_rank = 0;
  std::vector<long long> torsion_orders;  // each >= 2

  int size() const { return free_rank + static_cast<int>(torsion_orders.size()); }
  bool trivial() const { return free_rank == 0 && torsion_orders.empty(); }

  friend bool operator==(const KGroup&, const KGroup&) = default;

  static KGroup trivial_group() { return {}; }
  static KGroup free(int rank) { return {rank, {}}; }
  static KGroup cyclic(long long order) { return {0, {order}}; }
};

struct KElement {
  KGroup group;
  std::vector<long long> coords;  // free coordinates then torsion coordinates

  static KElement zero(const KGroup& g) {
    return {g, std::vector<long long>(static_cast<std::size_t>(g.size()), 0)};
  }
  bool is_zero() const {
    for (long long c : coords)
      if (c != 0) return false;
    return true;
  }
};

inline void check_element(const KElement& e) {
  if (static_cast<int>(e.coords.size()) != e.group.size())
    throw std::invalid_argument("element coordinate count does not match its group");
}

inline KElement k_normalize(KElement e) {
  check_element(e);
  for (std::size_t i = 0; i < e.group.torsion_orders.size(); ++i) {
    const long long n = e.group.torsion_orders[i];
    long long& c = e.coords[static_cast<std::size_t>(e.group.free_rank) + i];
    c %= n;
    if (c < 0) c += n;
  }
  return e;
}

inline KElement k_add(const KElement& a, const KElement& b) {
  if (a.group != b.group) throw std::invalid_argument("k_add across different groups");
  KElement out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
  return k_normalize(std::move(out));
}

inline KElement k_neg(const KElement& a) {
  KElement out = a;
  for (auto& c : out.coords) c = -c;
  return k_normalize(std::move(out));
}

inline bool k_eq(const KElement& a, const KElement& b) {
  if (a.group != b.group) return false;
  return k_normalize(a).coords == k_normalize(b).coords;
}

inline std::string k_str(const KElement& e) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < e.coords.size(); ++i) {
    if (i) os << ',';
    os << e.coords[i];
  }
  os << ')';
  return os.str();
}

// Capability flags abstract the classification facts the decision procedures
// rely on; profiles only declare what holds, they never derive it.
struct AlgebraProfile {
  std::string name;
  KGroup k0;
  KElement unit_class;  // class of the identity in k0
  KGroup k1;
  bool purely_infinite_simple = false;
  bool all_nonzero_projections_equivalent = false;
  bool weak_fn = false;  // finite-spectrum normals are norm-dense among those
                         // with vanishing index data

  friend bool operator==(const AlgebraProfile& a, const AlgebraProfile& b) {
    return a.name == b.name && a.k0 == b.k0 && a.unit_class.coords == b.unit_class.coords &&
           a.k1 == b.k1 && a.purely_infinite_simple == b.purely_infinite_simple &&
           a.all_nonzero_projections_equivalent == b.all_nonzero_projections_equivalent &&
           a.weak_fn == b.weak_fn;
  }

  static AlgebraProfile o2() {
    AlgebraProfile p;
    p.name = "O2";
    p.k0 = KGroup::trivial_group();
    p.unit_class = KElement::zero(p.k0);
    p.k1 = KGroup::trivial_group();
    p.purely_infinite_simple = true;
    p.all_nonzero_projections_equivalent = true;
    p.weak_fn = true;
    return p;
  }

  // O_n for n >= 3: k0 = Z_{n-1} generated by the identity class.
  static AlgebraProfile cuntz(int n) {
    if (n < 3) throw std::invalid_argument("cuntz profile needs n >= 3 (use o2 for n = 2)");
    AlgebraProfile p;
    p.name = "O" + std::to_string(n);
    p.k0 = KGroup::cyclic(n - 1);
    p.unit_class = k_normalize(KElement{p.k0, {1}});
    p.k1 = KGroup::trivial_group();
    p.purely_infinite_simple = true;
    p.all_nonzero_projections_equivalent = false;
    p.weak_fn = true;
    return p;
  }

  static AlgebraProfile calkin() {
    AlgebraProfile p;
    p.name = "Calkin";
    p.k0 = KGroup::trivial_group();
    p.unit_class = KElement::zero(p.k0);
    p.k1 = KGroup::free(1);  // label = Fredholm index of lambda - N
    p.purely_infinite_simple = true;
    p.all_nonzero_projections_equivalent = true;
    p.weak_fn = true;
    return p;
  }

  static AlgebraProfile type_iii() {
    AlgebraProfile p;
    p.name = "TypeIII";
    p.k0 = KGroup::trivial_group();
    p.unit_class = KElement::zero(p.k0);
    p.k1 = KGroup::trivial_group();
    p.purely_infinite_simple = false;
    p.all_nonzero_projections_equivalent = true;
    p.weak_fn = true;
    return p;
  }

  static std::optional<AlgebraProfile> by_name(const std::string& name) {
    if (name == "O2") return o2();
    if (name == "Calkin") return calkin();
    if (name == "TypeIII") return type_iii();
    if (name.size() > 1 && name[0] == 'O') {
      try {
        const int n = std::stoi(name.substr(1));
        if (n >= 3 && name == "O" + std::to_string(n)) return cuntz(n);
      } catch (...) {
      }
    }
    return std::nullopt;
  }
};

struct SpectralDatum {
  GridSet spectrum;
  AlgebraProfile profile;
  std::map<int, KElement> component_k0;  // keyed by derived component id
  std::map<int, KElement> hole_k1;       // keyed by derived hole id
  double frame_margin = 0.0;

  // Derived at construction; ids match the deterministic orderings.
  std::vector<Component> components;
  ComplementRegions complement;
};

inline SpectralDatum make_datum(GridSet spectrum, AlgebraProfile profile,
                                std::map<int, KElement> component_k0 = {},
                                std::map<int, KElement> hole_k1 = {},
                                std::optional<double> frame_margin = std::nullopt) {
  SpectralDatum d;
  d.spectrum = std::move(spectrum);
  d.profile = std::move(profile);
  d.component_k0 = std::move(component_k0);
  d.hole_k1 = std::move(hole_k1);
  d.frame_margin = frame_margin.value_or(2.0 * d.spectrum.resolution());
  if (!d.spectrum.empty()) {
    d.components = connected_components(d.spectrum);
    d.complement = complement_components(d.spectrum, d.frame_margin);
  }
  return d;
}

// Datum with every label defaulted to zero; convenient for trivial-K data.
inline SpectralDatum make_datum_zero_labels(GridSet spectrum, AlgebraProfile profile,
                                            std::optional<double> frame_margin = std::nullopt) {
  SpectralDatum d = make_datum(std::move(spectrum), std::move(profile), {}, {}, frame_margin);
  for (const auto& c : d.components) d.component_k0[c.id] = KElement::zero(d.profile.k0);
  for (const auto& h : d.complement.holes) d.hole_k1[h.id] = KElement::zero(d.profile.k1);
  return d;
}

// Violations are data, not errors: each string names the failing invariant and
// the offending id.
inline std::vector<std::string> validate_datum(const SpectralDatum& d) {
  std::vector<std::string> out;
  if (d.spectrum.empty()) {
    out.push_back("spectrum: empty");
    return out;
  }
  for (const auto& c : d.components) {
    auto it = d.component_k0.find(c.id);
    if (it == d.component_k0.end()) {
      out.push_back("component " + std::to_string(c.id) + ": missing k0 label");
    } else if (it->second.group != d.profile.k0) {
      out.push_back("component " + std::to_string(c.id) + ": k0 label group mismatch");
    }
  }
  for (const auto& [id, e] : d.component_k0) {
    if (id < 0 || id >= static_cast<int>(d.components.size()))
      out.push_back("component " + std::to_string(id) + ": label references unknown component");
    (void)e;
  }
  for (const auto& h : d.complement.holes) {
    auto it = d.hole_k1.find(h.id);
    if (it == d.hole_k1.end()) {
      out.push_back("hole " + std::to_string(h.id) + ": missing k1 label");
      continue;
    }
    if (it->second.group != d.profile.k1)
      out.push_back("hole " + std::to_string(h.id) + ": k1 label group mismatch");
    if (d.profile.k1.trivial() && !it->second.is_zero())
      out.push_back("hole " + std::to_string(h.id) + ": label must be 0 (trivial k1)");
  }
  for (const auto& [id, e] : d.hole_k1) {
    if (id < 0 || id >= static_cast<int>(d.complement.holes.size()))
      out.push_back("hole " + std::to_string(id) + ": label references unknown hole");
    (void)e;
  }
  // The component classes must sum to the class of the identity.
  bool labels_ok = out.empty();
  if (labels_ok) {
    KElement sum = KElement::zero(d.profile.k0);
    for (const auto& c : d.components) sum = k_add(sum, d.component_k0.at(c.id));
    if (!k_eq(sum, d.profile.unit_class))
      out.push_back("component labels: sum " + k_str(sum) + " differs from unit class " +
                    k_str(d.profile.unit_class));
  }
  return out;
}

// K0 class of the spectral projection cut out by a clopen set of components.
inline KElement clopen_class(const SpectralDatum& d, const std::vector<int>& component_ids) {
  KElement sum = KElement::zero(d.profile.k0);
  for (int id : component_ids) {
    auto it = d.component_k0.find(id);
    if (it == d.component_k0.end() || id < 0 || id >= static_cast<int>(d.components.size()))
      throw std::invalid_argument("unknown component id " + std::to_string(id));
    sum = k_add(sum, it->second);
  }
  return sum;
}

}  // namespace spectral_orbits
