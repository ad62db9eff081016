// Command line front end: parse spectral-datum documents, dispatch to the
// decision, distance, matching and sandbox layers, emit deterministic
// reports. Exit codes: 0 decided yes / bounds hold, 1 decided no / bound
// violated / hypothesis failed, 2 input error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectral_orbits/document.hpp"
#include "spectral_orbits/distances.hpp"

using namespace spectral_orbits;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError("document: cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// shortest round-trip formatting, same as the json serializer
std::string num(double x) { return Json(x).dump(); }

struct Flags {
  std::optional<double> tol;
  std::string profile;
  bool resolution_check = true;
  std::string report = "text";
  std::string emit_plan;
  bool verify = false;
};

Document load(const std::string& path, const Flags& flags) {
  std::string text = read_file(path);
  if (!flags.profile.empty()) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw DocumentError(std::string("document: ") + e.what());
    }
    j["profile"] = flags.profile;
    text = j.dump();
  }
  Document doc = parse_document(text);
  if (flags.resolution_check && !doc.spectra.empty()) {
    const double first = doc.spectra.front().spectrum.resolution();
    if (doc.resolution && first != *doc.resolution)
      throw DocumentError("document: spectra[0]: resolution " + num(first) +
                          " differs from the document resolution " + num(*doc.resolution));
    for (std::size_t i = 1; i < doc.spectra.size(); ++i)
      if (doc.spectra[i].spectrum.resolution() != first)
        throw DocumentError("document: spectra[" + std::to_string(i) + "]: resolution " +
                            num(doc.spectra[i].spectrum.resolution()) +
                            " differs from spectra[0] resolution " + num(first));
  }
  return doc;
}

struct Settings {
  double tol = 0.0;
  std::string tol_source;  // default | document | flag
  std::optional<double> frame_margin;
  bool margin_default = true;
  std::optional<double> contour_step;  // dist with a gap request only
};

Settings effective_settings(const Document& doc, const Flags& flags, double default_tol) {
  Settings s;
  s.tol = default_tol;
  s.tol_source = "default";
  if (doc.options.tol) {
    s.tol = *doc.options.tol;
    s.tol_source = "document";
  }
  if (flags.tol) {
    s.tol = *flags.tol;
    s.tol_source = "flag";
  }
  if (!doc.spectra.empty()) {
    s.margin_default = !doc.options.frame_margin;
    s.frame_margin = doc.spectra.front().frame_margin;
  }
  return s;
}

Json settings_json(const Settings& s) {
  Json j;
  j["tol"] = s.tol;
  j["tol_source"] = s.tol_source;
  if (s.frame_margin) {
    j["frame_margin"] = *s.frame_margin;
    j["frame_margin_source"] = s.margin_default ? "default" : "document";
  }
  if (s.contour_step) {
    j["contour_step"] = *s.contour_step;
    j["contour_step_source"] = "default";
  }
  return j;
}

std::string settings_text(const Settings& s) {
  std::string out = "settings: tol=" + num(s.tol) + " (" + s.tol_source + ")";
  if (s.frame_margin)
    out += ", frame_margin=" + num(*s.frame_margin) + " (" +
           (s.margin_default ? "default 2*resolution" : "document") + ")";
  if (s.contour_step) out += ", contour_step=" + num(*s.contour_step) + " (default resolution/4)";
  return out;
}

void print_header(Json& report, std::ostream& os, const Flags& flags, const std::string& command,
                  const Document& doc, const Settings& s) {
  report["command"] = command;
  report["settings"] = settings_json(s);
  if (doc.profile) report["profile"] = detail::dump_profile(*doc.profile);
  if (doc.resolution) report["resolution"] = *doc.resolution;
  if (flags.report == "text") {
    os << "command: " << command << "\n";
    if (doc.profile) {
      const Json p = detail::dump_profile(*doc.profile);
      os << "profile: " << (p.is_string() ? p.get<std::string>() : p.dump()) << "\n";
    }
    if (doc.resolution) os << "resolution: " << num(*doc.resolution) << "\n";
    os << settings_text(s) << "\n";
  }
}

int finish(const Json& report, const Flags& flags, int code) {
  if (flags.report == "json") std::cout << report.dump(2) << "\n";
  return code;
}

std::vector<std::string> condition_ids(const std::string& mode) {
  if (mode == "aue") return {"(a)", "(b)", "(c)"};
  if (mode == "simorbit") return {"(1)", "(2)", "(3)", "(4)", "(5)"};
  if (mode == "nilpotent") return {"zero", "connected", "index"};
  return {};
}

int emit_verdict(Json& report, const Flags& flags, const std::string& mode, const Verdict& v,
                 int checked_moments = 0) {
  Json conditions = Json::array();
  std::ostringstream os;
  for (const auto& id : condition_ids(mode)) {
    bool failed = false;
    for (const auto& f : v.failed) failed = failed || f.condition == id;
    if (!failed) {
      conditions.push_back(Json{{"id", id}, {"status", "PASS"}});
      os << "condition " << id << ": PASS\n";
    }
  }
  for (const auto& f : v.failed) {
    Json c{{"id", f.condition}, {"status", "FAIL"}, {"reason", f.reason}};
    if (!f.witness.empty()) c["witness"] = f.witness;
    conditions.push_back(std::move(c));
    os << "condition " << f.condition << ": FAIL  " << f.reason;
    if (!f.witness.empty()) os << " [" << f.witness << "]";
    os << "\n";
  }
  if (checked_moments > 0) {
    report["moments_checked"] = checked_moments;
    os << "moments checked: 1.." << checked_moments << "\n";
  }
  report["conditions"] = std::move(conditions);
  report["verdict"] = v.answer ? "yes" : "no";
  if (v.answer && flags.report == "text") os << "all conditions pass\n";
  os << "verdict: " << (v.answer ? "yes" : "no") << "\n";
  if (flags.report == "text") std::cout << os.str();
  return v.answer ? 0 : 1;
}

int run_decide(const std::string& mode, const std::string& file, const Flags& flags) {
  const Document doc = load(file, flags);
  const Settings s = effective_settings(doc, flags, 1e-10);
  Json report;
  print_header(report, std::cout, flags, "decide " + mode, doc, s);

  Verdict v;
  int moments = 0;
  if (mode == "ii1") {
    if (!doc.options.ii1) throw DocumentError("document: options.ii1: required for decide ii1");
    if (!doc.spectra.empty())
      throw DocumentError("document: spectra: decide ii1 works on measures, not spectra");
    double tol = s.tol;
    if (s.tol_source != "flag" && doc.options.ii1->tol) tol = *doc.options.ii1->tol;
    moments = doc.options.ii1->max_degree;
    v = ii1_moment_obstruction(doc.options.ii1->mu1, doc.options.ii1->mu2, moments, tol);
  } else if (mode == "nilpotent") {
    if (doc.spectra.size() != 1)
      throw DocumentError("document: spectra: decide nilpotent takes exactly one payload");
    v = decide_nilpotent_limit(doc.spectra[0]);
  } else {
    if (doc.spectra.size() != 2)
      throw DocumentError("document: spectra: decide " + mode + " takes exactly two payloads");
    v = mode == "aue" ? decide_aue(doc.spectra[0], doc.spectra[1])
                      : decide_similarity(doc.spectra[0], doc.spectra[1]);
  }
  return finish(report, flags, emit_verdict(report, flags, mode, v, moments));
}

int run_dist(const std::string& file, const Flags& flags) {
  const Document doc = load(file, flags);
  Settings s = effective_settings(doc, flags, 1e-10);
  if (doc.options.projection_gap && !doc.spectra.empty())
    s.contour_step = doc.spectra.front().spectrum.resolution() / 4.0;
  Json report;
  print_header(report, std::cout, flags, "dist", doc, s);
  if (doc.spectra.size() != 2)
    throw DocumentError("document: spectra: dist takes exactly two payloads");

  const DistanceReport d = distance_bounds(doc.spectra[0], doc.spectra[1]);
  report["lower"] = d.lower;
  report["lower_rule"] = d.lower_rule;
  if (d.upper) report["upper"] = *d.upper;
  report["upper_rule"] = d.upper_rule;
  report["discretization_slack"] = d.discretization_slack;
  report["rho"] = Json{{"value", d.rho_estimate.value},
                       {"hausdorff", d.rho_estimate.hausdorff},
                       {"mismatch_corner_max", d.rho_estimate.mismatch_corner_max},
                       {"mismatch_box_count", d.rho_estimate.mismatch_box_count},
                       {"slack", d.rho_estimate.slack}};
  std::ostringstream os;
  os << "lower: " << num(d.lower) << " (rule " << d.lower_rule << ")\n";
  if (d.upper)
    os << "upper: " << num(*d.upper) << " (rule " << d.upper_rule << ")\n";
  else
    os << "upper: unknown\n";
  os << "discretization slack: " << num(d.discretization_slack) << "\n";
  os << "rho detail: hausdorff=" << num(d.rho_estimate.hausdorff)
     << ", mismatch_corner_max=" << num(d.rho_estimate.mismatch_corner_max)
     << ", mismatch_boxes=" << d.rho_estimate.mismatch_box_count << "\n";

  if (doc.options.projection_gap) {
    const auto& g = *doc.options.projection_gap;
    const GapBound gap =
        projection_gap_lower_bound(doc.spectra[0], doc.spectra[1], g.region, g.offset);
    report["projection_gap"] = Json{{"applicable", gap.applicable},
                                    {"bound", gap.bound},
                                    {"bound_sampled", gap.bound_sampled},
                                    {"l0", gap.l0},
                                    {"sup_sampled", gap.sup_sampled},
                                    {"sup_certified", gap.sup_certified},
                                    {"effective_offset", gap.effective_offset},
                                    {"note", gap.note}};
    os << "projection gap: " << (gap.applicable ? "applicable" : "not applicable");
    if (gap.applicable)
      os << " bound=" << num(gap.bound) << " l0=" << num(gap.l0)
         << " sup_certified=" << num(gap.sup_certified);
    os << "\n";
    os << "projection gap note: " << gap.note << "\n";
  }
  if (flags.report == "text") std::cout << os.str();
  return finish(report, flags, 0);
}

int run_plan(const std::string& file, const Flags& flags) {
  const Document doc = load(file, flags);
  const Settings s = effective_settings(doc, flags, 1e-10);
  Json report;
  print_header(report, std::cout, flags, "plan", doc, s);

  std::string schedule = doc.options.schedule.value_or(
      doc.spectra.size() == 1 ? std::string("tree") : std::string("bipartite"));
  PairingPlan plan;
  try {
    if (schedule == "tree") {
      if (doc.spectra.size() != 1)
        throw DocumentError("document: spectra: the tree schedule takes exactly one payload");
      plan = tree_schedule(doc.spectra[0].spectrum);
    } else if (schedule == "bipartite") {
      if (doc.spectra.size() != 2)
        throw DocumentError("document: spectra: the bipartite schedule takes two payloads");
      plan = bipartite_schedule(doc.spectra[0], doc.spectra[1]);
    } else {
      if (doc.spectra.size() != 2)
        throw DocumentError("document: spectra: the partitioned schedule takes two payloads");
      if (doc.options.blocks.empty())
        throw DocumentError("document: options.blocks: required for the partitioned schedule");
      plan = partitioned_schedule(doc.spectra[0], doc.spectra[1], doc.options.blocks);
    }
  } catch (const std::invalid_argument& e) {
    // hypotheses of the schedule failed on valid input data
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  int splits = 0, matches = 0;
  for (const auto& st : plan.steps) (st.kind == StepKind::split ? splits : matches)++;
  report["schedule"] = schedule;
  report["atoms1"] = plan.atoms1.size();
  report["atoms2"] = plan.atoms2.size();
  report["splits"] = splits;
  report["matches"] = matches;
  report["residual"] = Json::array({plan.residual.first, plan.residual.second});
  report["cost"] = plan.cost;
  report["certified_bound"] = plan.certified_bound;
  std::ostringstream os;
  os << "schedule: " << schedule << "\n";
  os << "atoms: " << plan.atoms1.size() << " + " << plan.atoms2.size() << "\n";
  os << "steps: " << plan.steps.size() << " (" << splits << " splits, " << matches
     << " matches)\n";
  os << "residual: [" << plan.residual.first << ", " << plan.residual.second << "]\n";
  os << "cost: " << num(plan.cost) << "\n";
  os << "certified bound: " << num(plan.certified_bound) << "\n";

  if (!flags.emit_plan.empty()) {
    Document out;
    out.sandbox = SandboxJob{};
    out.sandbox->kind = "plan";
    out.sandbox->plan = plan;
    std::ofstream f(flags.emit_plan, std::ios::binary);
    if (!f) throw DocumentError("document: cannot write file '" + flags.emit_plan + "'");
    f << serialize_document(out);
    report["plan_written"] = flags.emit_plan;
    os << "plan written: " << flags.emit_plan << "\n";
  }
  if (flags.report == "text") std::cout << os.str();
  return finish(report, flags, 0);
}

int run_sandbox(const std::string& file, const Flags& flags) {
  const Document doc = load(file, flags);
  if (!doc.sandbox) throw DocumentError("document: sandbox: missing payload");
  const SandboxJob& job = *doc.sandbox;
  const bool tight = job.kind == "conjugator" || job.kind == "triangular";
  Settings s = effective_settings(doc, flags, tight ? 1e-8 : 1e-10);
  if (s.tol_source != "flag" && job.tol) {
    s.tol = *job.tol;
    s.tol_source = "document";
  }
  Json report;
  print_header(report, std::cout, flags, "sandbox", doc, s);
  report["kind"] = job.kind;
  std::ostringstream os;
  os << "kind: " << job.kind << "\n";
  bool ok = true;
  std::string failing;

  if (job.kind == "plan") {
    const PlanExecution exec = execute_plan(*job.plan);
    report["dimension"] = exec.m1.rows();
    report["cost"] = job.plan->cost;
    report["certified_bound"] = job.plan->certified_bound;
    report["achieved"] = exec.achieved;
    os << "dimension: " << exec.m1.rows() << "\n";
    os << "cost: " << num(job.plan->cost) << "\n";
    os << "certified bound: " << num(job.plan->certified_bound) << "\n";
    os << "achieved: " << num(exec.achieved) << "\n";
    if (exec.achieved > job.plan->certified_bound) {
      ok = false;
      failing = "achieved " + num(exec.achieved) + " > certified bound " +
                num(job.plan->certified_bound);
    }
    if (flags.verify) {
      const auto floor = lower_bound_check(exec.m1, exec.m2, exec.u.adjoint(), s.tol);
      report["verify"] = Json{{"spectral_floor", floor.spectral_distance},
                              {"difference", floor.difference},
                              {"floor_ok", floor.ok}};
      os << "verify: spectral floor " << num(floor.spectral_distance) << " vs difference "
         << num(floor.difference) << " (" << (floor.ok ? "PASS" : "FAIL") << ")\n";
      if (!floor.ok) {
        ok = false;
        failing = "difference " + num(floor.difference) + " < spectral floor " +
                  num(floor.spectral_distance);
      }
    }
  } else if (job.kind == "conjugator") {
    const auto conj = projection_conjugator(job.p, job.q, s.tol);
    const long long rank_p = std::llround((job.p * DenseMatrix::Identity(job.p.rows(), job.p.cols())).trace().real());
    const long long rank_moved = std::llround((conj.w * job.p * conj.w.adjoint()).trace().real());
    report["gap"] = conj.gap;
    report["err"] = conj.err;
    report["rank"] = rank_p;
    os << "gap: " << num(conj.gap) << "\n";
    os << "error: " << num(conj.err) << "\n";
    os << "rank: " << rank_p << "\n";
    if (conj.err > s.tol) {
      ok = false;
      failing = "error " + num(conj.err) + " > tol " + num(s.tol);
    }
    if (flags.verify) {
      const double uni =
          opnorm(conj.w.adjoint() * conj.w - DenseMatrix::Identity(job.p.rows(), job.p.cols()));
      const bool ranks = rank_moved == std::llround(job.q.trace().real());
      report["verify"] = Json{{"unitary_defect", uni}, {"rank_preserved", ranks}};
      os << "verify: unitary defect " << num(uni) << ", rank "
         << (ranks ? "preserved" : "changed") << "\n";
      if (uni > s.tol || !ranks) {
        ok = false;
        failing = "conjugating unitary fails verification";
      }
    }
  } else if (job.kind == "triangular") {
    const auto sim = triangular_similarity(job.matrix, job.block_sizes);
    report["err"] = sim.err;
    os << "error: " << num(sim.err) << "\n";
    if (sim.err > s.tol) {
      ok = false;
      failing = "error " + num(sim.err) + " > tol " + num(s.tol);
    }
    if (flags.verify) {
      const double inv_defect =
          opnorm(sim.t * sim.t_inv -
                 DenseMatrix::Identity(job.matrix.rows(), job.matrix.cols()));
      report["verify"] = Json{{"inverse_defect", inv_defect}};
      os << "verify: inverse defect " << num(inv_defect) << "\n";
      if (inv_defect > s.tol) {
        ok = false;
        failing = "t t_inv strays from the identity by " + num(inv_defect);
      }
    }
  } else if (job.kind == "analytic") {
    const double fn_tol = s.tol_source == "default" ? 1e-10 : s.tol;
    const auto out = analytic_calculus_bound(job.a, job.b, job.v, job.poly, job.rect, fn_tol);
    report["lhs"] = out.lhs;
    report["rhs"] = out.rhs;
    report["quad_error"] = out.quad_error;
    report["contour_length"] = out.contour_length;
    report["sup_factor"] = out.sup_factor;
    os << "lhs: " << num(out.lhs) << "\n";
    os << "rhs: " << num(out.rhs) << "\n";
    os << "quadrature error: " << num(out.quad_error) << "\n";
    os << "contour length: " << num(out.contour_length) << "\n";
    if (out.lhs > out.rhs + out.quad_error) {
      ok = false;
      failing = "lhs " + num(out.lhs) + " > rhs " + num(out.rhs) + " + quadrature error " +
                num(out.quad_error);
    }
    if (flags.verify) {
      ContourRect finer = job.rect;
      finer.step = job.rect.step / 2.0;
      const auto out2 = analytic_calculus_bound(job.a, job.b, job.v, job.poly, finer, fn_tol);
      const double drift = std::abs(out.lhs - out2.lhs);
      const bool stable = drift <= out.quad_error + out2.quad_error;
      report["verify"] = Json{{"refined_lhs", out2.lhs}, {"drift", drift}, {"stable", stable}};
      os << "verify: refined lhs " << num(out2.lhs) << ", drift " << num(drift) << " ("
         << (stable ? "PASS" : "FAIL") << ")\n";
      if (!stable) {
        ok = false;
        failing = "quadrature drift " + num(drift) + " exceeds the error estimates";
      }
    }
  } else if (job.kind == "probe") {
    const auto hit = semicontinuity_probe(job.models, job.center, job.radius);
    report["models"] = job.models.size();
    os << "models: " << job.models.size() << "\n";
    if (hit) {
      report["entry_index"] = *hit;
      os << "entry index: " << *hit << "\n";
    } else {
      report["entry_index"] = nullptr;
      os << "entry index: none\n";
      ok = false;
      failing = "the limit model misses the disk";
    }
  }

  report["ok"] = ok;
  os << "ok: " << (ok ? "yes" : "no") << "\n";
  if (!ok) {
    report["failing"] = failing;
    os << "failing: " << failing << "\n";
  }
  if (flags.report == "text") std::cout << os.str();
  return finish(report, flags, ok ? 0 : 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decides orbit relations between normal operators given as "
               "rasterized spectral data, bounds orbit distances, and builds "
               "finite dimensional intertwiner plans"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  bool tol_set = false;
  double tol_value = 0.0;
  app.add_option("--tol", tol_value, "numerical tolerance (default 1e-10; 1e-8 for conjugator and triangular sandbox checks)");
  app.add_option("--profile", flags.profile, "override the document profile by name");
  app.add_flag("--resolution-check,!--no-resolution-check", flags.resolution_check,
               "require all payload resolutions to match the document resolution (default on)");
  app.add_option("--report", flags.report, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  std::string mode, file;
  CLI::App* decide = app.add_subcommand("decide", "decide an orbit relation");
  decide->add_option("mode", mode, "aue | simorbit | nilpotent | ii1")
      ->required()
      ->check(CLI::IsMember({"aue", "simorbit", "nilpotent", "ii1"}));
  decide->add_option("file", file, "input document")->required();

  CLI::App* dist = app.add_subcommand("dist", "bound the distance between unitary orbits");
  dist->add_option("file", file, "input document")->required();

  CLI::App* plan = app.add_subcommand("plan", "construct a pairing plan");
  plan->add_option("file", file, "input document")->required();
  plan->add_option("--emit-plan", flags.emit_plan, "write the plan as a sandbox document");

  CLI::App* sandbox = app.add_subcommand("sandbox", "run a finite dimensional check");
  sandbox->add_option("file", file, "input document")->required();
  sandbox->add_flag("--verify", flags.verify, "run the independent cross checks as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  tol_set = app.count("--tol") > 0;
  if (tol_set) flags.tol = tol_value;

  try {
    if (decide->parsed()) return run_decide(mode, file, flags);
    if (dist->parsed()) return run_dist(file, flags);
    if (plan->parsed()) return run_plan(file, flags);
    if (sandbox->parsed()) return run_sandbox(file, flags);
  } catch (const DocumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
