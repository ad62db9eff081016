#pragma once

// JSON document layer for the CLI. One schema, version 1. Component and hole
// ids are never stored as authoritative data: labels are keyed by the ids the
// library re-derives from the boxes, so documents are stable under box
// reordering. serialize_document emits a canonical form (sorted keys, sorted
// payload entries, normalized label coordinates) and is idempotent on its own
// output byte for byte.

#include <json.hpp>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spectral_orbits/matching.hpp"
#include "spectral_orbits/sandbox.hpp"

namespace spectral_orbits {

using Json = nlohmann::json;

struct DocumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Ii1Options {
  DiscreteMeasure mu1, mu2;
  int max_degree = 8;
  std::optional<double> tol;
};

struct GapOptions {
  std::vector<int> region;  // target component ids enclosed by the contour
  double offset = 0.0;
};

struct DocumentOptions {
  std::optional<double> frame_margin;
  std::optional<double> tol;
  std::optional<std::string> schedule;  // tree | bipartite | partitioned
  std::vector<std::pair<std::vector<int>, std::vector<int>>> blocks;
  std::optional<Ii1Options> ii1;
  std::optional<GapOptions> projection_gap;
};

struct SandboxJob {
  std::string kind;  // plan | conjugator | triangular | analytic | probe
  std::optional<PairingPlan> plan;
  DenseMatrix p, q;  // conjugator
  DenseMatrix matrix;  // triangular
  std::vector<int> block_sizes;
  DenseMatrix a, b, v;  // analytic
  std::vector<Complex> poly;  // ascending coefficients
  ContourRect rect;
  std::vector<DenseMatrix> models;  // probe
  Complex center{0.0, 0.0};
  double radius = 0.0;
  std::optional<double> tol;
};

struct Document {
  int version = 1;
  std::optional<AlgebraProfile> profile;
  std::optional<double> resolution;
  std::vector<SpectralDatum> spectra;
  DocumentOptions options;
  std::optional<SandboxJob> sandbox;
};

namespace detail {

inline const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object())
    throw DocumentError("document: " + where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw DocumentError("document: " + where + ": missing field '" + key + "'");
  return *it;
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw DocumentError("document: " + where + ": expected a number");
  return j.get<double>();
}

inline long long as_integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw DocumentError("document: " + where + ": expected an integer");
  return j.get<long long>();
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw DocumentError("document: " + where + ": expected a string");
  return j.get<std::string>();
}

inline const Json& as_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw DocumentError("document: " + where + ": expected an array");
  return j;
}

inline Complex parse_complex(const Json& j, const std::string& where) {
  as_array(j, where);
  if (j.size() != 2) throw DocumentError("document: " + where + ": expected [re, im]");
  return Complex(as_number(j[0], where + "[0]"), as_number(j[1], where + "[1]"));
}

inline Json dump_complex(Complex z) { return Json::array({z.real(), z.imag()}); }

inline KGroup parse_group(const Json& j, const std::string& where) {
  KGroup g;
  g.free_rank = static_cast<int>(as_integer(need(j, "free_rank", where), where + ".free_rank"));
  for (const auto& t : as_array(need(j, "torsion_orders", where), where + ".torsion_orders")) {
    g.torsion_orders.push_back(as_integer(t, where + ".torsion_orders[]"));
    if (g.torsion_orders.back() < 2)
      throw DocumentError("document: " + where + ": torsion orders must be at least 2");
  }
  if (g.free_rank < 0) throw DocumentError("document: " + where + ": free_rank must be nonnegative");
  return g;
}

inline Json dump_group(const KGroup& g) {
  return Json{{"free_rank", g.free_rank}, {"torsion_orders", g.torsion_orders}};
}

inline KElement parse_element(const Json& j, const KGroup& g, const std::string& where) {
  KElement e{g, {}};
  for (const auto& c : as_array(j, where)) e.coords.push_back(as_integer(c, where + "[]"));
  if (static_cast<int>(e.coords.size()) != g.size())
    throw DocumentError("document: " + where + ": expected " + std::to_string(g.size()) +
                        " coordinates, got " + std::to_string(e.coords.size()));
  return k_normalize(e);
}

inline AlgebraProfile parse_profile(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const auto found = AlgebraProfile::by_name(j.get<std::string>());
    if (!found)
      throw DocumentError("document: " + where + ": unknown profile '" + j.get<std::string>() + "'");
    return *found;
  }
  AlgebraProfile p;
  p.name = j.is_object() && j.contains("name") ? as_string(j["name"], where + ".name") : "custom";
  p.k0 = parse_group(need(j, "k0", where), where + ".k0");
  p.k1 = parse_group(need(j, "k1", where), where + ".k1");
  p.unit_class = parse_element(need(j, "unit_class", where), p.k0, where + ".unit_class");
  if (j.contains("purely_infinite_simple"))
    p.purely_infinite_simple = j["purely_infinite_simple"].get<bool>();
  if (j.contains("all_nonzero_projections_equivalent"))
    p.all_nonzero_projections_equivalent = j["all_nonzero_projections_equivalent"].get<bool>();
  if (j.contains("weak_fn")) p.weak_fn = j["weak_fn"].get<bool>();
  return p;
}

inline Json dump_profile(const AlgebraProfile& p) {
  const auto builtin = AlgebraProfile::by_name(p.name);
  if (builtin && *builtin == p) return Json(p.name);
  Json j;
  j["name"] = p.name;
  j["k0"] = dump_group(p.k0);
  j["k1"] = dump_group(p.k1);
  j["unit_class"] = k_normalize(p.unit_class).coords;
  j["purely_infinite_simple"] = p.purely_infinite_simple;
  j["all_nonzero_projections_equivalent"] = p.all_nonzero_projections_equivalent;
  j["weak_fn"] = p.weak_fn;
  return j;
}

inline std::map<int, KElement> parse_labels(const Json& j, const KGroup& g,
                                            const std::string& where) {
  std::map<int, KElement> out;
  for (std::size_t i = 0; i < as_array(j, where).size(); ++i) {
    const std::string here = where + "[" + std::to_string(i) + "]";
    const Json& entry = j[i];
    as_array(entry, here);
    if (entry.size() != 2) throw DocumentError("document: " + here + ": expected [id, coords]");
    const int id = static_cast<int>(as_integer(entry[0], here + "[0]"));
    if (out.count(id)) throw DocumentError("document: " + here + ": duplicate label id " +
                                           std::to_string(id));
    out[id] = parse_element(entry[1], g, here + "[1]");
  }
  return out;
}

inline Json dump_labels(const std::map<int, KElement>& labels) {
  Json j = Json::array();
  for (const auto& [id, e] : labels) j.push_back(Json::array({id, k_normalize(e).coords}));
  return j;
}

inline SpectralDatum parse_payload(const Json& j, const AlgebraProfile& profile,
                                   double default_resolution,
                                   const std::optional<double>& frame_margin,
                                   const std::string& where) {
  double res = default_resolution;
  if (j.is_object() && j.contains("resolution"))
    res = as_number(j["resolution"], where + ".resolution");
  if (!(res > 0.0)) throw DocumentError("document: " + where + ": resolution must be positive");

  std::vector<GridBox> boxes;
  for (std::size_t i = 0; i < as_array(need(j, "boxes", where), where + ".boxes").size(); ++i) {
    const std::string here = where + ".boxes[" + std::to_string(i) + "]";
    const Json& b = j["boxes"][i];
    as_array(b, here);
    if (b.size() != 2) throw DocumentError("document: " + here + ": expected [n, m]");
    boxes.push_back({as_integer(b[0], here + "[0]"), as_integer(b[1], here + "[1]")});
  }
  std::vector<IsolatedPoint> points;
  if (j.contains("isolated_points")) {
    const Json& arr = as_array(j["isolated_points"], where + ".isolated_points");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string here = where + ".isolated_points[" + std::to_string(i) + "]";
      as_array(arr[i], here);
      if (arr[i].size() != 3)
        throw DocumentError("document: " + here + ": expected [re, im, is_cluster]");
      if (!arr[i][2].is_boolean())
        throw DocumentError("document: " + here + "[2]: expected a boolean");
      points.push_back({Complex(as_number(arr[i][0], here + "[0]"),
                                as_number(arr[i][1], here + "[1]")),
                        arr[i][2].get<bool>()});
    }
  }

  SpectralDatum d;
  try {
    GridSet grid(res, std::move(boxes), std::move(points));
    std::map<int, KElement> comp, hole;
    if (j.contains("component_labels"))
      comp = parse_labels(j["component_labels"], profile.k0, where + ".component_labels");
    if (j.contains("hole_labels"))
      hole = parse_labels(j["hole_labels"], profile.k1, where + ".hole_labels");
    d = make_datum(std::move(grid), profile, std::move(comp), std::move(hole), frame_margin);
  } catch (const std::invalid_argument& e) {
    throw DocumentError("document: " + where + ": " + e.what());
  }
  const auto violations = validate_datum(d);
  if (!violations.empty())
    throw DocumentError("document: " + where + ": " + violations.front());
  return d;
}

inline Json dump_payload(const SpectralDatum& d, std::optional<double> document_resolution) {
  Json j;
  Json boxes = Json::array();
  for (const auto& b : d.spectrum.boxes()) boxes.push_back(Json::array({b.n, b.m}));
  j["boxes"] = std::move(boxes);
  if (!d.spectrum.isolated_points().empty()) {
    Json pts = Json::array();
    for (const auto& p : d.spectrum.isolated_points())
      pts.push_back(Json::array({p.value.real(), p.value.imag(), p.is_cluster_point}));
    j["isolated_points"] = std::move(pts);
  }
  if (!d.component_k0.empty()) j["component_labels"] = dump_labels(d.component_k0);
  if (!d.hole_k1.empty()) j["hole_labels"] = dump_labels(d.hole_k1);
  if (!document_resolution || d.spectrum.resolution() != *document_resolution)
    j["resolution"] = d.spectrum.resolution();
  return j;
}

inline DiscreteMeasure parse_measure(const Json& j, const std::string& where) {
  DiscreteMeasure mu;
  for (std::size_t i = 0; i < as_array(j, where).size(); ++i) {
    const std::string here = where + "[" + std::to_string(i) + "]";
    as_array(j[i], here);
    if (j[i].size() != 2) throw DocumentError("document: " + here + ": expected [x, weight]");
    mu.atoms.emplace_back(as_number(j[i][0], here + "[0]"), as_number(j[i][1], here + "[1]"));
  }
  return mu;
}

inline Json dump_measure(const DiscreteMeasure& mu) {
  Json j = Json::array();
  for (const auto& [x, w] : mu.atoms) j.push_back(Json::array({x, w}));
  return j;
}

inline DenseMatrix parse_matrix(const Json& j, const std::string& where) {
  const Json& rows = as_array(j, where);
  if (rows.empty()) throw DocumentError("document: " + where + ": matrix must be nonempty");
  const std::size_t ncols = as_array(rows[0], where + "[0]").size();
  DenseMatrix m(static_cast<int>(rows.size()), static_cast<int>(ncols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string here = where + "[" + std::to_string(r) + "]";
    if (as_array(rows[r], here).size() != ncols)
      throw DocumentError("document: " + here + ": ragged matrix rows");
    for (std::size_t c = 0; c < ncols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) =
          parse_complex(rows[r][c], here + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline Json dump_matrix(const DenseMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline Json plan_to_json(const PairingPlan& p) {
  Json j;
  j["resolution"] = p.resolution;
  Json a1 = Json::array(), a2 = Json::array();
  for (const auto& [id, z] : p.atoms1) a1.push_back(Json::array({id, detail::dump_complex(z)}));
  for (const auto& [id, z] : p.atoms2) a2.push_back(Json::array({id, detail::dump_complex(z)}));
  j["atoms1"] = std::move(a1);
  j["atoms2"] = std::move(a2);
  Json steps = Json::array();
  for (const auto& s : p.steps) {
    if (s.kind == StepKind::split)
      steps.push_back(Json{{"kind", "split"},
                           {"side", s.side},
                           {"parent", s.parent},
                           {"child1", s.child1},
                           {"child2", s.child2}});
    else
      steps.push_back(Json{{"kind", "match"}, {"atom1", s.atom1}, {"atom2", s.atom2}});
  }
  j["steps"] = std::move(steps);
  j["residual"] = Json::array({p.residual.first, p.residual.second});
  j["cost"] = p.cost;
  j["certified_bound"] = p.certified_bound;
  return j;
}

inline PairingPlan plan_from_json(const Json& j, const std::string& where) {
  using detail::as_array;
  using detail::as_integer;
  using detail::as_number;
  using detail::as_string;
  using detail::need;
  PairingPlan p;
  p.resolution = as_number(need(j, "resolution", where), where + ".resolution");
  const auto parse_atoms = [&](const char* key, std::vector<std::pair<int, Complex>>& out) {
    const Json& arr = as_array(need(j, key, where), where + "." + key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string here = where + "." + key + "[" + std::to_string(i) + "]";
      as_array(arr[i], here);
      if (arr[i].size() != 2)
        throw DocumentError("document: " + here + ": expected [id, [re, im]]");
      out.emplace_back(static_cast<int>(as_integer(arr[i][0], here + "[0]")),
                       detail::parse_complex(arr[i][1], here + "[1]"));
    }
  };
  parse_atoms("atoms1", p.atoms1);
  parse_atoms("atoms2", p.atoms2);
  const Json& steps = as_array(need(j, "steps", where), where + ".steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string here = where + ".steps[" + std::to_string(i) + "]";
    const std::string kind = as_string(need(steps[i], "kind", here), here + ".kind");
    PlanStep s;
    if (kind == "split") {
      s.kind = StepKind::split;
      s.side = static_cast<int>(as_integer(need(steps[i], "side", here), here + ".side"));
      s.parent = static_cast<int>(as_integer(need(steps[i], "parent", here), here + ".parent"));
      s.child1 = static_cast<int>(as_integer(need(steps[i], "child1", here), here + ".child1"));
      s.child2 = static_cast<int>(as_integer(need(steps[i], "child2", here), here + ".child2"));
    } else if (kind == "match") {
      s.kind = StepKind::match;
      s.atom1 = static_cast<int>(as_integer(need(steps[i], "atom1", here), here + ".atom1"));
      s.atom2 = static_cast<int>(as_integer(need(steps[i], "atom2", here), here + ".atom2"));
    } else {
      throw DocumentError("document: " + here + ": unknown step kind '" + kind + "'");
    }
    p.steps.push_back(s);
  }
  const Json& res = as_array(need(j, "residual", where), where + ".residual");
  if (res.size() != 2) throw DocumentError("document: " + where + ".residual: expected [id, id]");
  p.residual = {static_cast<int>(as_integer(res[0], where + ".residual[0]")),
                static_cast<int>(as_integer(res[1], where + ".residual[1]"))};
  p.cost = as_number(need(j, "cost", where), where + ".cost");
  p.certified_bound = as_number(need(j, "certified_bound", where), where + ".certified_bound");
  return p;
}

namespace detail {

inline SandboxJob parse_sandbox(const Json& j, const std::string& where) {
  SandboxJob job;
  job.kind = as_string(need(j, "kind", where), where + ".kind");
  if (j.contains("tol")) job.tol = as_number(j["tol"], where + ".tol");
  if (job.kind == "plan") {
    job.plan = plan_from_json(need(j, "plan", where), where + ".plan");
  } else if (job.kind == "conjugator") {
    job.p = parse_matrix(need(j, "p", where), where + ".p");
    job.q = parse_matrix(need(j, "q", where), where + ".q");
  } else if (job.kind == "triangular") {
    job.matrix = parse_matrix(need(j, "matrix", where), where + ".matrix");
    for (const auto& s : as_array(need(j, "block_sizes", where), where + ".block_sizes"))
      job.block_sizes.push_back(static_cast<int>(as_integer(s, where + ".block_sizes[]")));
  } else if (job.kind == "analytic") {
    job.a = parse_matrix(need(j, "a", where), where + ".a");
    job.b = parse_matrix(need(j, "b", where), where + ".b");
    job.v = parse_matrix(need(j, "v", where), where + ".v");
    for (const auto& c : as_array(need(j, "f", where), where + ".f"))
      job.poly.push_back(parse_complex(c, where + ".f[]"));
    const Json& r = need(j, "rect", where);
    job.rect.re_lo = as_number(need(r, "re_lo", where + ".rect"), where + ".rect.re_lo");
    job.rect.re_hi = as_number(need(r, "re_hi", where + ".rect"), where + ".rect.re_hi");
    job.rect.im_lo = as_number(need(r, "im_lo", where + ".rect"), where + ".rect.im_lo");
    job.rect.im_hi = as_number(need(r, "im_hi", where + ".rect"), where + ".rect.im_hi");
    job.rect.step = as_number(need(r, "step", where + ".rect"), where + ".rect.step");
  } else if (job.kind == "probe") {
    for (std::size_t i = 0; i < as_array(need(j, "models", where), where + ".models").size(); ++i)
      job.models.push_back(parse_matrix(j["models"][i],
                                        where + ".models[" + std::to_string(i) + "]"));
    job.center = parse_complex(need(j, "center", where), where + ".center");
    job.radius = as_number(need(j, "radius", where), where + ".radius");
  } else {
    throw DocumentError("document: " + where + ": unknown sandbox kind '" + job.kind + "'");
  }
  return job;
}

inline Json dump_sandbox(const SandboxJob& job) {
  Json j;
  j["kind"] = job.kind;
  if (job.tol) j["tol"] = *job.tol;
  if (job.kind == "plan") {
    j["plan"] = plan_to_json(*job.plan);
  } else if (job.kind == "conjugator") {
    j["p"] = dump_matrix(job.p);
    j["q"] = dump_matrix(job.q);
  } else if (job.kind == "triangular") {
    j["matrix"] = dump_matrix(job.matrix);
    j["block_sizes"] = job.block_sizes;
  } else if (job.kind == "analytic") {
    j["a"] = dump_matrix(job.a);
    j["b"] = dump_matrix(job.b);
    j["v"] = dump_matrix(job.v);
    Json f = Json::array();
    for (Complex c : job.poly) f.push_back(dump_complex(c));
    j["f"] = std::move(f);
    j["rect"] = Json{{"re_lo", job.rect.re_lo},
                     {"re_hi", job.rect.re_hi},
                     {"im_lo", job.rect.im_lo},
                     {"im_hi", job.rect.im_hi},
                     {"step", job.rect.step}};
  } else if (job.kind == "probe") {
    Json models = Json::array();
    for (const auto& m : job.models) models.push_back(dump_matrix(m));
    j["models"] = std::move(models);
    j["center"] = dump_complex(job.center);
    j["radius"] = job.radius;
  }
  return j;
}

inline DocumentOptions parse_options(const Json& j, const std::string& where) {
  DocumentOptions o;
  if (j.contains("frame_margin"))
    o.frame_margin = as_number(j["frame_margin"], where + ".frame_margin");
  if (j.contains("tol")) o.tol = as_number(j["tol"], where + ".tol");
  if (j.contains("schedule")) {
    o.schedule = as_string(j["schedule"], where + ".schedule");
    if (*o.schedule != "tree" && *o.schedule != "bipartite" && *o.schedule != "partitioned")
      throw DocumentError("document: " + where + ".schedule: unknown schedule '" + *o.schedule +
                          "'");
  }
  if (j.contains("blocks")) {
    const Json& arr = as_array(j["blocks"], where + ".blocks");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string here = where + ".blocks[" + std::to_string(i) + "]";
      as_array(arr[i], here);
      if (arr[i].size() != 2)
        throw DocumentError("document: " + here + ": expected [side1_ids, side2_ids]");
      std::pair<std::vector<int>, std::vector<int>> block;
      for (const auto& id : as_array(arr[i][0], here + "[0]"))
        block.first.push_back(static_cast<int>(as_integer(id, here + "[0][]")));
      for (const auto& id : as_array(arr[i][1], here + "[1]"))
        block.second.push_back(static_cast<int>(as_integer(id, here + "[1][]")));
      o.blocks.push_back(std::move(block));
    }
  }
  if (j.contains("ii1")) {
    const Json& m = j["ii1"];
    Ii1Options ii1;
    ii1.mu1 = parse_measure(need(m, "mu1", where + ".ii1"), where + ".ii1.mu1");
    ii1.mu2 = parse_measure(need(m, "mu2", where + ".ii1"), where + ".ii1.mu2");
    if (m.contains("max_degree"))
      ii1.max_degree = static_cast<int>(as_integer(m["max_degree"], where + ".ii1.max_degree"));
    if (m.contains("tol")) ii1.tol = as_number(m["tol"], where + ".ii1.tol");
    o.ii1 = std::move(ii1);
  }
  if (j.contains("projection_gap")) {
    const Json& g = j["projection_gap"];
    GapOptions gap;
    for (const auto& id : as_array(need(g, "region", where + ".projection_gap"),
                                   where + ".projection_gap.region"))
      gap.region.push_back(static_cast<int>(as_integer(id, where + ".projection_gap.region[]")));
    gap.offset = as_number(need(g, "offset", where + ".projection_gap"),
                           where + ".projection_gap.offset");
    o.projection_gap = std::move(gap);
  }
  return o;
}

inline Json dump_options(const DocumentOptions& o) {
  Json j = Json::object();
  if (o.frame_margin) j["frame_margin"] = *o.frame_margin;
  if (o.tol) j["tol"] = *o.tol;
  if (o.schedule) j["schedule"] = *o.schedule;
  if (!o.blocks.empty()) {
    Json arr = Json::array();
    for (const auto& [s1, s2] : o.blocks) arr.push_back(Json::array({s1, s2}));
    j["blocks"] = std::move(arr);
  }
  if (o.ii1) {
    Json m;
    m["mu1"] = dump_measure(o.ii1->mu1);
    m["mu2"] = dump_measure(o.ii1->mu2);
    m["max_degree"] = o.ii1->max_degree;
    if (o.ii1->tol) m["tol"] = *o.ii1->tol;
    j["ii1"] = std::move(m);
  }
  if (o.projection_gap) {
    j["projection_gap"] =
        Json{{"region", o.projection_gap->region}, {"offset", o.projection_gap->offset}};
  }
  return j;
}

}  // namespace detail

inline Document parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DocumentError(std::string("document: ") + e.what());
  }
  if (!j.is_object()) throw DocumentError("document: top level must be an object");
  Document doc;
  doc.version = static_cast<int>(detail::as_integer(detail::need(j, "version", "top"), "version"));
  if (doc.version != 1)
    throw DocumentError("document: version: unsupported version " + std::to_string(doc.version));
  if (j.contains("options")) doc.options = detail::parse_options(j["options"], "options");
  if (j.contains("profile")) doc.profile = detail::parse_profile(j["profile"], "profile");
  if (j.contains("resolution")) {
    doc.resolution = detail::as_number(j["resolution"], "resolution");
    if (!(*doc.resolution > 0.0))
      throw DocumentError("document: resolution: must be positive");
  }
  if (j.contains("spectra")) {
    const Json& arr = detail::as_array(j["spectra"], "spectra");
    if (arr.size() > 2) throw DocumentError("document: spectra: at most two payloads");
    if (!arr.empty() && !doc.profile)
      throw DocumentError("document: spectra: a profile is required");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "spectra[" + std::to_string(i) + "]";
      if (!doc.resolution && !(arr[i].is_object() && arr[i].contains("resolution")))
        throw DocumentError("document: " + where + ": no resolution given");
      doc.spectra.push_back(detail::parse_payload(arr[i], *doc.profile,
                                                  doc.resolution.value_or(0.0),
                                                  doc.options.frame_margin, where));
    }
  }
  if (j.contains("sandbox")) doc.sandbox = detail::parse_sandbox(j["sandbox"], "sandbox");
  return doc;
}

inline std::string serialize_document(const Document& doc) {
  Json j;
  j["version"] = doc.version;
  if (doc.profile) j["profile"] = detail::dump_profile(*doc.profile);
  if (doc.resolution) j["resolution"] = *doc.resolution;
  if (!doc.spectra.empty()) {
    Json arr = Json::array();
    for (const auto& d : doc.spectra) arr.push_back(detail::dump_payload(d, doc.resolution));
    j["spectra"] = std::move(arr);
  }
  const Json opts = detail::dump_options(doc.options);
  if (!opts.empty()) j["options"] = opts;
  if (doc.sandbox) j["sandbox"] = detail::dump_sandbox(*doc.sandbox);
  return j.dump(2) + "\n";
}

}  // namespace spectral_orbits
