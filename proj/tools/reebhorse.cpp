#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reeb/chords.hpp"
#include "reeb/diagrams.hpp"
#include "reeb/errors.hpp"
#include "reeb/horseshoe.hpp"
#include "reeb/ranks.hpp"
#include "reeb/words.hpp"

using nlohmann::json;
using namespace reeb;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2);
  std::cout << text << '\n';
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot write " + out_path);
    f << text << '\n';
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Flags named in the JSON config are appended unless already on the
// command line, so flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (std::next(it) == args.end()) throw UsageError("--config needs a file");
  const json cfg = read_json(*std::next(it));
  args.erase(it, std::next(it, 2));
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, val] : cfg.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (val.is_boolean()) {
      if (val.get<bool>()) args.push_back(flag);
    } else if (val.is_string()) {
      args.push_back(flag);
      args.push_back(val.get<std::string>());
    } else {
      args.push_back(flag);
      args.push_back(val.dump());
    }
  }
  return args;
}

// ------------------------------------------------------------ flow-validate

struct FlowArgs {
  std::string model;
  double z_period = 2 * M_PI;
  int grid = 12;
  bool chords = false;
  double K = 35.0;
  std::string arc = "three";
  bool literal = false;
  std::string out;
};

int cmd_flow_validate(const FlowArgs& a) {
  if (a.model.empty()) throw UsageError("--model is required (alpha_p, alpha_b or standard)");
  ContactModel m = [&] {
    if (a.model == "alpha_p") return ContactModel::alpha_p();
    if (a.model == "alpha_b") return ContactModel::alpha_b();
    if (a.model == "standard") return ContactModel::standard();
    throw UsageError("unknown model " + a.model);
  }();
  m.box().z_period = a.z_period;
  FlowSettings s;
  json rep = {{"model", a.model}, {"z_period", a.z_period}};
  bool ok = true;

  const double vmin = min_volume_on_grid(m, a.grid);
  rep["min_contact_volume"] = vmin;
  ok = ok && vmin > 0;

  double worst = 0.0;
  for (const auto& p : {ChartPoint{0, 0, 0}, ChartPoint{0.3, -0.4, 0.05}, ChartPoint{-0.5, 0.7, 1.0}}) {
    const auto r = verify_reeb(m, p);
    worst = std::max({worst, r.alpha_minus_one, r.iota_dalpha});
  }
  rep["reeb_residual"] = worst;
  ok = ok && worst < 1e-6;

  if (a.model == "alpha_p") {
    const double T = a.z_period, l2 = m.l_second_derivative();
    const auto path = linearized_flow(m, {0, 0, 0}, T, default_frame(m), s);
    const double tr = path.end().trace();
    const double exact = 2 * std::cosh(T * std::sqrt(l2));
    const double literal = 2 * std::cosh(std::sqrt(T * l2));
    const double ref = a.literal ? literal : exact;
    rep["trace"] = tr;
    rep["trace_closed_form"] = exact;
    rep["trace_sqrt_Tl"] = literal;
    rep["trace_reference"] = a.literal ? "2cosh(sqrt(T l''(0)))" : "2cosh(T sqrt(l''(0)))";
    rep["trace_error"] = std::abs(tr - ref) / std::abs(ref);
    ok = ok && tr > 2 && std::abs(tr - ref) / std::abs(ref) < 1e-3;
    std::cerr << "trace " << tr << " vs " << ref << '\n';
  }

  if (a.chords) {
    if (a.model != "alpha_b") throw UsageError("--chords needs --model alpha_b");
    const AttachingArc arc = a.arc == "trivial"       ? AttachingArc::trivial(m)
                             : a.arc == "overtwisted" ? AttachingArc::overtwisted(m)
                             : a.arc == "three"       ? AttachingArc::three_components(m)
                                                      : throw UsageError("unknown --arc " + a.arc);
    const ChordSearch res = find_chords(m, arc, a.K, {}, s);
    json arr = chords_json(res.chords).at("chords");
    int c_count = 0;
    for (std::size_t i = 0; i < res.chords.size(); ++i) {
      const auto idx = chord_index(m, arc, res.chords[i], s);
      arr[i]["mu_tilde"] = idx.mu.value;
      arr[i]["homotopy_weight"] = res.chords[i].winding;
      const char prefix = res.chords[i].label.empty() ? '?' : res.chords[i].label[0];
      if (prefix == 'c') {
        ++c_count;
        ok = ok && idx.mu.value == 1;
      } else if (prefix == 'd' && a.arc == "trivial") {
        ok = ok && idx.mu.value == 0;
      }
      std::cerr << res.chords[i].label << "  T=" << res.chords[i].period << "  mu~=" << idx.mu.value << '\n';
    }
    rep["chords"] = arr;
    rep["flagged"] = res.flagged.size();
    rep["grid"] = res.grid_used;
    // c_k has period close to 2 pi k, so K bounds the windings reached.
    if (c_count < 5) std::cerr << "note: K=" << a.K << " reaches windings up to " << c_count << '\n';
  }
  rep["pass"] = ok;
  emit(rep, a.out);
  return ok ? kPass : kFail;
}

// ------------------------------------------------------------ orbits

struct OrbitArgs {
  int composition_classes = 0;
  std::string chords;
  bool from_flow = false;
  double K = 10.0;
  double tau = 0.0;
  bool euler = false;
  std::string csv;
  std::string out;
};

int cmd_orbits(const OrbitArgs& a) {
  if (a.composition_classes > 0) {
    json counts = json::array(), classes = json::object();
    for (int l = 1; l <= a.composition_classes; ++l) {
      const auto necks = compositions_up_to_cyclic(l);
      counts.push_back(necks.size());
      classes[std::to_string(l)] = necks;
    }
    std::cerr << "necklace counts " << counts.dump() << '\n';
    emit({{"counts", counts}, {"classes", classes}}, a.out);
    return kPass;
  }
  std::vector<ChordDatum> chords;
  if (a.from_flow) {
    const ContactModel m = ContactModel::alpha_b();
    const AttachingArc arc = AttachingArc::three_components(m);
    FlowSettings s;
    for (const auto& c : find_chords(m, arc, a.K, {}, s).chords)
      chords.push_back({c.label, c.period, chord_index(m, arc, c, s).mu.value, c.winding});
  } else if (!a.chords.empty()) {
    try {
      chords = chords_from_json(read_json(a.chords));
    } catch (const json::exception& e) {
      throw UsageError(a.chords + ": " + e.what());
    }
  } else {
    throw UsageError("give --composition-classes, --chords FILE or --from-flow");
  }
  std::vector<OrbitRecord> recs;
  try {
    recs = enumerate_orbits(chords, a.K, a.tau);
  } catch (const BoundaryError& e) {
    throw UsageError(std::string(e.what()) + " (for example --K " + std::to_string(a.K + 1e-3) + ")");
  }
  json rep = {{"orbits", orbits_json(recs)}, {"K", a.K}};
  if (a.euler) {
    std::set<int> classes;
    for (const auto& r : recs) classes.insert(r.homotopy);
    json e = json::object();
    for (int h : classes) e[std::to_string(h)] = euler_characteristic(graded_block(recs, h, false));
    rep["euler"] = e;
  }
  write_text(a.csv, orbits_csv(recs));
  std::cerr << recs.size() << " orbits with action < " << a.K << '\n';
  emit(rep, a.out);
  return kPass;
}

// ------------------------------------------------------------ diagram

struct DiagramArgs {
  int n = 0;
  int base = 1;
  int parallel = 0;
  std::string diagram;
  std::string arc;
  bool strict = false;
  std::string attach;
  int surface = -1;
  int multiples = 1;
  std::string out;
};

ChordDiagram load_diagram(const DiagramArgs& a) {
  if (a.parallel > 0) return ChordDiagram::parallel(a.parallel, canonical_parallel_sign(a.parallel));
  if (!a.diagram.empty()) {
    try {
      ChordDiagram d = read_json(a.diagram).get<ChordDiagram>();
      d.validate();
      return d;
    } catch (const json::exception& e) {
      throw UsageError(a.diagram + ": " + e.what());
    }
  }
  throw UsageError("give --parallel N or --diagram FILE");
}

std::pair<int, int> parse_pair(const std::string& s, char sep) {
  const auto p = s.find(sep);
  if (p == std::string::npos) throw UsageError("expected a" + std::string(1, sep) + "b, got " + s);
  try {
    return {std::stoi(s.substr(0, p)), std::stoi(s.substr(p + 1))};
  } catch (const std::exception&) {
    throw UsageError("bad pair " + s);
  }
}

int cmd_diagram_enumerate(const DiagramArgs& a) {
  if (a.n < 1) throw UsageError("--n must be >= 1");
  const auto ds = enumerate_diagrams(a.n, a.base);
  emit({{"n", a.n}, {"count", ds.size()}, {"diagrams", ds}}, a.out);
  std::cerr << ds.size() << " diagrams\n";
  return kPass;
}

int cmd_diagram_attach(const DiagramArgs& a) {
  const ChordDiagram d = load_diagram(a);
  const auto [x, y] = parse_pair(a.arc, ',');
  const AttachResult r = attach_bypass(d, {x, y});
  json rep = {{"input", d},
              {"boundary_components_before", r.boundary_components_before},
              {"boundary_components_after", r.boundary_components_after}};
  if (r.diagram) {
    rep["diagram"] = *r.diagram;
    rep["parallel"] = is_parallel(*r.diagram);
  }
  if (r.rejection) rep["rejection"] = {{"kind", r.rejection->kind}, {"reason", r.rejection->reason}};
  emit(rep, a.out);
  if (r.rejection) std::cerr << "rejected: " << r.rejection->reason << '\n';
  return r.rejection && a.strict ? kFail : kPass;
}

int cmd_diagram_census(const DiagramArgs& a) {
  const ChordDiagram d = load_diagram(a);
  const C5Result chk = check_C4_C5(d);
  emit({{"diagram", d}, {"census", census_json(region_census(d, chk.witness))}}, a.out);
  return kPass;
}

int cmd_diagram_check(const DiagramArgs& a) {
  const ChordDiagram d = load_diagram(a);
  const C5Result chk = check_C4_C5(d);
  json rep = {{"diagram", d}, {"ok", chk.ok}, {"parallel", is_parallel(d)}};
  if (chk.witness) rep["witness"] = {{"j1", chk.witness->j1}, {"j2", chk.witness->j2}, {"i1", chk.witness->i1}};
  if (!chk.ok) rep["reason"] = chk.reason;
  emit(rep, a.out);
  return chk.ok ? kPass : kFail;
}

int cmd_diagram_ranks(const DiagramArgs& a) {
  if (a.surface >= 0) {
    emit({{"before", rank_json(thickened_surface_ranks(a.surface, a.multiples))},
          {"after", rank_json(after_bypass_ranks(a.surface, a.multiples))}},
         a.out);
    return kPass;
  }
  if (a.parallel > 0 && !a.attach.empty()) {
    AttachmentHistory h;
    h.n = a.parallel;
    std::stringstream ss(a.attach);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto [k, eps] = parse_pair(item, ':');
      h.steps.push_back({k, eps});
    }
    const ChordDiagram d = apply_attachments(h);
    const RankReport r = c5_torus_ranks(d);
    const BlockIdentity b = block_identity_check(d, h.sigma_plus(), h.sigma_minus(), h);
    const bool ok = b.ok && r.n_plus == b.dim_plus && r.n_minus == b.dim_minus;
    emit({{"diagram", d},
          {"ranks", rank_json(r)},
          {"sigma_plus", h.sigma_plus()},
          {"sigma_minus", h.sigma_minus()},
          {"dim_E_plus", b.dim_plus},
          {"dim_E_minus", b.dim_minus},
          {"identity", {{"ok", b.ok}, {"lhs_plus", b.lhs_plus}, {"rhs_plus", b.rhs_plus},
                        {"lhs_minus", b.lhs_minus}, {"rhs_minus", b.rhs_minus}}},
          {"pass", ok}},
         a.out);
    return ok ? kPass : kFail;
  }
  if (a.parallel > 0) {
    const RankReport r = parallel_torus_ranks(a.parallel);
    const RankReport c = c5_torus_ranks(load_diagram(a));
    const bool ok = r.n_plus == c.n_plus && r.n_minus == c.n_minus;
    emit({{"ranks", rank_json(r)}, {"c5_ranks", rank_json(c)}, {"pass", ok}}, a.out);
    std::cerr << "n+ = " << r.n_plus << ", n- = " << r.n_minus << '\n';
    return ok ? kPass : kFail;
  }
  emit({{"ranks", rank_json(c5_torus_ranks(load_diagram(a)))}}, a.out);
  return kPass;
}

// ------------------------------------------------------------ horseshoe

struct HorseArgs {
  SyntheticParams p;
  bool synthetic = true;
  int samples = 64;
  double K = 6.0;
  int seeds = 20;
  std::string csv;
  std::string out;
};

int cmd_horseshoe_verify(const HorseArgs& a) {
  SectionMapModel phi, psi;
  try {
    phi = synthetic_bypass_map(a.p);
    psi = synthetic_manifold_map(a.p);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  phi.validate();
  psi.validate();
  const auto k = verify_k_hyperbolic(psi, a.p.lambda, a.samples);
  const auto d = verify_dominated(psi, a.p.mu, a.p.nu, a.p.tau, a.samples);
  const auto b = verify_hyperbolic_bypass(phi, a.p.lambda, a.samples);
  const auto bd = verify_bypass_dominated(phi, a.p.nu, a.p.tau, a.p.A, a.p.eta, a.samples);
  const bool ok = k.passed() && d.passed() && b.passed() && bd.passed();
  emit({{"k_hyperbolic", certificate_json(k)},
        {"dominated", certificate_json(d)},
        {"hyperbolic_bypass", certificate_json(b)},
        {"bypass_dominated", certificate_json(bd)},
        {"sigma", a.p.sigma()},
        {"pass", ok}},
       a.out);
  std::cerr << (ok ? "certified" : "certification failed") << '\n';
  return ok ? kPass : kFail;
}

int cmd_horseshoe_orbits(const HorseArgs& a) {
  SectionMapModel phi, psi;
  try {
    phi = synthetic_bypass_map(a.p);
    psi = synthetic_manifold_map(a.p);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  FixedPointOptions opt;
  opt.A = a.p.A;
  opt.nu = a.p.nu;
  const auto orbs = horseshoe_orbits(phi, psi, a.K, a.p.tau, opt);
  bool ok = true;
  json arr = json::array();
  for (std::size_t i = 0; i < orbs.size(); ++i) {
    const auto& o = orbs[i];
    json e = {{"word", o.word}, {"action", o.action}, {"cz_index", o.cz},
              {"window", {o.window_lo, o.window_hi}}, {"in_window", o.in_window}};
    if (o.fp) {
      const CompositeMap F(phi, psi, o.word);
      const double spread = multi_seed_spread(F, *o.fp, a.seeds, 1000 + i, opt);
      e["x"] = o.fp->p.x();
      e["z"] = o.fp->p.y();
      e["period"] = o.fp->period;
      e["stretch"] = o.fp->stretch;
      e["seed_spread"] = spread;
      ok = ok && o.in_window && spread < 1e-9;
    } else {
      e["error"] = o.error;
      ok = false;
    }
    arr.push_back(e);
  }
  write_text(a.csv, fixed_points_csv(orbs));
  std::cerr << orbs.size() << " words with action < " << a.K << (ok ? ", all solved" : ", failures") << '\n';
  emit({{"orbits", arr}, {"pass", ok}}, a.out);
  return ok ? kPass : kFail;
}

void add_synthetic_flags(CLI::App* c, HorseArgs& h) {
  c->add_flag("--synthetic", h.synthetic, "Use the synthetic dominated bypass model (default)");
  c->add_option("--lambda", h.p.lambda, "Width parameter lambda in (0, pi/8)");
  c->add_option("--nu", h.p.nu, "Horizontal cone width nu");
  c->add_option("--tau", h.p.tau, "Return-time tolerance tau");
  c->add_option("--A", h.p.A, "Vertical cone width A");
  c->add_option("--eta", h.p.eta, "Inverse expansion eta");
  c->add_option("--mu", h.p.mu, "Domination cone width mu of the manifold side");
  c->add_option("--out", h.out, "Also write the JSON report here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reeb dynamics after a bypass attachment: flows, chords, orbits, diagrams, horseshoes"};
  app.require_subcommand(1);
  app.fallthrough();

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow-validate", "Validate a model contact form and its Reeb flow");
  flow->add_option("--model", fa.model, "alpha_p, alpha_b or standard");
  flow->add_option("--z-period", fa.z_period, "Circumference of the z circle");
  flow->add_option("--grid", fa.grid, "Grid size of the contact volume check");
  flow->add_flag("--chords", fa.chords, "Run the chord census (alpha_b)");
  flow->add_option("--K", fa.K, "Action bound for chords");
  flow->add_option("--arc", fa.arc, "three, trivial or overtwisted");
  flow->add_flag("--literal-trace-formula", fa.literal, "Compare the trace with 2cosh(sqrt(T l''(0)))");
  flow->add_option("--out", fa.out, "Also write the JSON report here");

  OrbitArgs oa;
  auto* orb = app.add_subcommand("orbits", "Enumerate periodic orbits as cyclic words on chords");
  orb->add_option("--composition-classes", oa.composition_classes, "Necklace counts for l = 1..N");
  orb->add_option("--chords", oa.chords, "Chord JSON file");
  orb->add_flag("--from-flow", oa.from_flow, "Detect the chords of alpha_b first");
  orb->add_option("--K", oa.K, "Action bound");
  orb->add_option("--tau", oa.tau, "Period window half-width per letter");
  orb->add_flag("--euler", oa.euler, "Euler characteristic per homotopy class");
  orb->add_option("--csv", oa.csv, "Write the orbit table as CSV");
  orb->add_option("--out", oa.out, "Also write the JSON report here");

  DiagramArgs da;
  auto* dia = app.add_subcommand("diagram", "Chord diagram calculus on the meridian disc");
  dia->require_subcommand(1);
  auto source = [&](CLI::App* c) {
    c->add_option("--parallel", da.parallel, "Parallel diagram with N chords");
    c->add_option("--diagram", da.diagram, "Diagram JSON file");
    c->add_option("--out", da.out, "Also write the JSON report here");
  };
  auto* den = dia->add_subcommand("enumerate", "All non-crossing diagrams with n chords");
  den->add_option("--n", da.n, "Number of chords")->required();
  den->add_option("--base", da.base, "Sign of the marked region (+1 or -1)");
  den->add_option("--out", da.out, "Also write the JSON report here");
  auto* dat = dia->add_subcommand("attach", "Bypass attachment along an arc meeting points a, a+1");
  source(dat);
  dat->add_option("--arc", da.arc, "a,b")->required();
  dat->add_flag("--strict", da.strict, "Exit 1 on a rejected arc");
  auto* dce = dia->add_subcommand("census", "Regions, signs and Euler characteristics");
  source(dce);
  auto* dch = dia->add_subcommand("check", "Conditions (C4) and (C5)");
  source(dch);
  auto* dra = dia->add_subcommand("ranks", "Contact homology ranks");
  source(dra);
  dra->add_option("--attach", da.attach, "Attachments k:eps,... on the parallel diagram");
  dra->add_option("--surface", da.surface, "Thickened surface with n+1 dividing curves");
  dra->add_option("--multiples", da.multiples, "Covers listed per class on surfaces");

  HorseArgs ha;
  auto* hor = app.add_subcommand("horseshoe", "Hyperbolic bypass certification and word fixed points");
  hor->require_subcommand(1);
  auto* hve = hor->add_subcommand("verify", "Certify the section maps");
  add_synthetic_flags(hve, ha);
  hve->add_option("--samples", ha.samples, "Samples per side of each domain");
  auto* hor_o = hor->add_subcommand("orbits", "Fixed points of F_a for every word of action < K");
  add_synthetic_flags(hor_o, ha);
  hor_o->add_option("--K", ha.K, "Action bound");
  hor_o->add_option("--seeds", ha.seeds, "Random seeds per word for the uniqueness check");
  hor_o->add_option("--csv", ha.csv, "Write the fixed-point table as CSV");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*flow) return cmd_flow_validate(fa);
    if (*orb) return cmd_orbits(oa);
    if (*den) return cmd_diagram_enumerate(da);
    if (*dat) return cmd_diagram_attach(da);
    if (*dce) return cmd_diagram_census(da);
    if (*dch) return cmd_diagram_check(da);
    if (*dra) return cmd_diagram_ranks(da);
    if (*hve) return cmd_horseshoe_verify(ha);
    if (*hor_o) return cmd_horseshoe_orbits(ha);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
