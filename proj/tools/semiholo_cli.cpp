// semiholo: batch front end to the foliation library.
//
// Exit codes: 0 ok, 1 usage or parse error, 2 check failed, 3 numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "semiholo/curves.hpp"
#include "semiholo/foliation.hpp"
#include "semiholo/gallery.hpp"
#include "semiholo/holonomy.hpp"
#include "semiholo/io.hpp"
#include "semiholo/moduli.hpp"

using namespace semiholo;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCheckFailed = 2, kNumeric = 3 };

struct Config {
  std::string lambda;
  std::string gallery;
  std::vector<double> box;
  int n = 5;
  double tol = 1e-8;
  std::size_t samples = 100;
  double radius = 1e-3;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
};

struct Field {
  SlopeField F;
  std::optional<GalleryEntry> entry;
  Box box;
};

Field resolve(const Config& cfg) {
  Field f;
  if (!cfg.gallery.empty()) {
    const auto labels = gallery_labels();
    if (std::find(labels.begin(), labels.end(), cfg.gallery) == labels.end())
      throw CLI::ValidationError("--gallery", "unknown label '" + cfg.gallery + "'");
    f.entry = gallery_entry(cfg.gallery);
    f.F = f.entry->field;
    f.box = f.entry->box;
  } else if (!cfg.lambda.empty()) {
    f.F = SlopeField::from_formula(cfg.lambda);
  } else {
    throw CLI::ValidationError("--lambda or --gallery", "one of the two is required");
  }
  if (!cfg.box.empty()) std::copy(cfg.box.begin(), cfg.box.end(), f.box.bounds.begin());
  return f;
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(cfg.out, std::ios::binary);
  if (!os) throw Error("cannot write " + cfg.out);
  os << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void add_field_options(CLI::App* cmd, Config& cfg) {
  auto* lam = cmd->add_option("--lambda", cfg.lambda, "slope formula in x, y");
  auto* gal = cmd->add_option("--gallery", cfg.gallery, "gallery label");
  lam->excludes(gal);
  cmd->add_option("--box", cfg.box, "re x, im x, re y, im y bounds as lo hi pairs")->expected(8);
}

cplx complex_of(const std::vector<double>& v, std::size_t k) { return {v.at(2 * k), v.at(2 * k + 1)}; }

// ---------------------------------------------------------------------------

int cmd_check(const Config& cfg, double curvature_tol, std::size_t curvature_points) {
  Field f = resolve(cfg);
  std::mt19937_64 rng(cfg.seed);
  json report = {{"field", to_string(f.F.lambda)}, {"label", f.F.label}, {"tolerance", cfg.tol}};

  if (f.entry && f.entry->report_only) {
    json comps = json::array();
    for (const auto& c : check_companions(*f.entry, cfg.samples, cfg.seed)) comps.push_back(to_json(c));
    report["report_only"] = true;
    report["companions"] = comps;
    emit(cfg, dump(report));
    return kOk;
  }

  std::vector<CPoint> pts = sample_admissible(f.F, f.box, cfg.samples, rng);
  json records = json::array();
  double worst_int = 0.0, worst_str = 0.0, worst_curv = 0.0;
  std::size_t curv_done = 0;
  for (const CPoint& p : pts) {
    double ri = integrability_residual(f.F, p);
    double rs = structural_residual(f.F, p);
    records.push_back(to_json(ResidualRecord{p, ri, "integrability"}));
    records.push_back(to_json(ResidualRecord{p, rs, "structural"}));
    worst_int = std::max(worst_int, ri);
    worst_str = std::max(worst_str, rs);
    if (curv_done < curvature_points && bott(f.F, p).metric_density >= 1e-2) {
      double rc;
      try {
        rc = curvature_residual(f.F, p);
      } catch (const SingularLocusError&) {
        continue;
      } catch (const DegenerateMetricError&) {
        continue;
      }
      records.push_back(to_json(ResidualRecord{p, rc, "curvature"}));
      worst_curv = std::max(worst_curv, rc);
      ++curv_done;
    }
  }
  bool ok = worst_int <= cfg.tol && worst_str <= cfg.tol && worst_curv <= curvature_tol;
  json summary = {{"integrability", worst_int},
                  {"structural", worst_str},
                  {"curvature", worst_curv},
                  {"curvature_points", curv_done},
                  {"curvature_tolerance", curvature_tol}};
  if (f.entry) {
    json comps = json::array();
    for (const auto& c : check_companions(*f.entry, cfg.samples, cfg.seed)) {
      comps.push_back(to_json(c));
      ok = ok && c.passed();
    }
    report["companions"] = comps;
  }
  report["summary"] = summary;
  report["records"] = records;
  report["passed"] = ok;
  emit(cfg, dump(report));
  return ok ? kOk : kCheckFailed;
}

int cmd_trace(const Config& cfg, const std::vector<double>& start, const std::vector<double>& segment,
              const std::vector<double>& arc, const std::vector<double>& polyline, bool with_linear) {
  Field f = resolve(cfg);
  cplx x0{start.at(0), start.at(1)}, y0{start.at(2), start.at(3)};
  std::optional<XPath> path;
  if (!segment.empty()) {
    path = XPath::segment(x0, complex_of(segment, 0));
  } else if (!arc.empty()) {
    cplx c = complex_of(arc, 0);
    double r = std::abs(x0 - c);
    double th0 = std::arg(x0 - c);
    path = XPath::arc(c, r, th0, th0 + arc.at(2));
  } else if (!polyline.empty()) {
    if (polyline.size() % 2) throw CLI::ValidationError("--polyline", "needs pairs of numbers");
    std::vector<cplx> v{x0};
    for (std::size_t k = 0; 2 * k < polyline.size(); ++k) v.push_back(complex_of(polyline, k));
    path = XPath::polyline(v);
  } else {
    throw CLI::ValidationError("path", "one of --segment, --arc, --polyline is required");
  }
  TraceOptions opt;
  opt.tol = cfg.tol;
  opt.linear_parts = with_linear;
  LeafTrace t = trace_leaf(f.F, y0, *path, opt);
  emit(cfg, to_csv(t));
  return kOk;
}

int cmd_dual(const Config& cfg) {
  Field f = resolve(cfg);
  std::vector<DualPoint> pts = dual_surface_sample(f.F, f.box, cfg.n);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& d : pts) arr.push_back({d.a.real(), d.a.imag(), d.b.real(), d.b.imag()});
    emit(cfg, dump(arr));
  } else {
    emit(cfg, to_csv(pts));
  }
  return kOk;
}

int cmd_semirank(const Config& cfg, double threshold) {
  Field f = resolve(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<CPoint> pts = clustered_samples(f.F, f.box, cfg.samples, cfg.radius, rng);
  SemirankReport r = semirank2_consistency(f.F, pts, cfg.radius);
  json j = {{"label", f.F.label},   {"samples", pts.size()},  {"radius", cfg.radius},
            {"statistic", r.statistic}, {"groups", r.groups}, {"largest_group", r.largest},
            {"vacuous", r.vacuous},  {"threshold", threshold}};
  bool ok = !r.vacuous && r.statistic <= threshold;
  j["consistent"] = ok;
  if (r.vacuous) std::cerr << "warning: no neighbourhood had enough members; verdict is vacuous\n";
  emit(cfg, dump(j));
  return ok ? kOk : kCheckFailed;
}

int cmd_holonomy(const Config& cfg, const std::vector<double>& base) {
  Field f = resolve(cfg);
  cplx x0 = base.empty() ? cplx{0.0, 1.0} : complex_of(base, 0);
  auto grid = [&](int a0, int a1) {
    std::vector<cplx> v;
    for (int i = 0; i < cfg.n; ++i)
      for (int k = 0; k < cfg.n; ++k) {
        double s = cfg.n == 1 ? 0.5 : static_cast<double>(i) / (cfg.n - 1);
        double t = cfg.n == 1 ? 0.5 : static_cast<double>(k) / (cfg.n - 1);
        v.push_back({f.box.lo(a0) + s * (f.box.hi(a0) - f.box.lo(a0)),
                     f.box.lo(a1) + t * (f.box.hi(a1) - f.box.lo(a1))});
      }
    return v;
  };
  std::vector<cplx> targets = grid(0, 1), ys = grid(2, 3);
  double tol = cfg.tol;
  auto table = slope_to_motion(f.F, x0, targets, ys, tol);
  std::ostringstream os;
  os << "re_x,im_x,re_y,im_y,re_phi,im_phi\n";
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      os << format_double(targets[i].real()) << ',' << format_double(targets[i].imag()) << ','
         << format_double(ys[j].real()) << ',' << format_double(ys[j].imag()) << ','
         << format_double(table[i][j].real()) << ',' << format_double(table[i][j].imag()) << '\n';
    }
  emit(cfg, os.str());
  return kOk;
}

Cocycle cocycle_of(const std::vector<double>& v, std::size_t count) {
  if (v.empty()) return Cocycle(count, Vec2::Zero());
  if (v.size() != 2 * count) throw CLI::ValidationError("cocycle", "needs 2 numbers per generator");
  Cocycle c;
  for (std::size_t k = 0; k < count; ++k) c.push_back(Vec2(v[2 * k], v[2 * k + 1]));
  return c;
}

int cmd_moduli_build(const Config& cfg, const std::vector<double>& cocycle) {
  GroupEmbedding g = octagon_embedding(cocycle_of(cocycle, 4));
  emit(cfg, dump(to_json(g)));
  return kOk;
}

int cmd_moduli_check(const Config& cfg, const std::string& in) {
  std::ifstream is(in);
  if (!is) throw CLI::ValidationError("--in", "cannot read " + in);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--in", e.what());
  }
  GroupEmbedding g = embedding_from_json(j);
  double rel = relation_residual(g.generators, Presentation::surface(g.genus));
  SlopeField F = ex_lines().field;
  std::mt19937_64 rng(cfg.seed);
  std::vector<CPoint> pts = sample_admissible(F, ex_lines().box, cfg.samples, rng);
  json inv = json::array();
  double worst_inv = 0.0;
  for (const Mat3& m : g.generators) {
    InvarianceReport r = invariance_residual(m, F, pts);
    inv.push_back({{"max_angle", r.max_angle}, {"used", r.used}, {"skipped", r.skipped}});
    worst_inv = std::max(worst_inv, r.max_angle);
  }
  bool ok = rel <= cfg.tol && worst_inv <= 1e-9;
  emit(cfg, dump({{"genus", g.genus}, {"relation_residual", rel}, {"invariance", inv}, {"passed", ok}}));
  return ok ? kOk : kCheckFailed;
}

int cmd_moduli_equiv(const Config& cfg, std::vector<double> c1v, std::vector<double> c2v,
                     const std::string& fixture) {
  std::vector<Mobius2> gens = octagon_generators();
  Presentation pres = Presentation::surface(2);
  Cocycle c1, c2;
  if (!c1v.empty() || !c2v.empty()) {
    c1 = cocycle_of(c1v, gens.size());
    c2 = cocycle_of(c2v, gens.size());
  } else {
    Eigen::MatrixXd Z = cocycle_basis(gens, pres);
    c1 = unflatten(Z.col(0) + 0.5 * Z.col(1));
    if (fixture == "coboundary") {
      c2 = apply_coboundary(c1, gens, Vec2(0.3, -0.7));
    } else if (fixture == "distinct") {
      Eigen::MatrixXd B = coboundary_basis(gens);
      Eigen::VectorXd w = Z.col(2) - B * (B.transpose() * Z.col(2));
      c2 = unflatten(flatten(c1) + w / w.norm());
    } else {
      throw CLI::ValidationError("--fixture", "expected coboundary or distinct");
    }
  }
  std::optional<Vec2> t = coboundary_equiv(c1, c2, gens, pres);
  json j = {{"equivalent", t.has_value()}};
  j["t"] = t ? json::array({(*t)(0), (*t)(1)}) : json(nullptr);
  emit(cfg, dump(j));
  return t ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiholo: semiholomorphic foliation computations"};
  app.require_subcommand(1);
  Config cfg;

  auto* check = app.add_subcommand("check", "pointwise integrability, structural and curvature residuals");
  add_field_options(check, cfg);
  double curvature_tol = 1e-3;
  std::size_t curvature_points = 10;
  check->add_option("--tol", cfg.tol, "tolerance for integrability and structural residuals")->check(CLI::PositiveNumber);
  check->add_option("--curvature-tol", curvature_tol, "tolerance for |K + 4|")->check(CLI::PositiveNumber);
  check->add_option("--curvature-points", curvature_points, "points that get a curvature residual");
  check->add_option("--samples", cfg.samples, "number of sample points");
  check->add_option("--seed", cfg.seed);
  check->add_option("--out", cfg.out);
  check->add_option("--format", cfg.format)->check(CLI::IsMember({"json"}));

  auto* trace = app.add_subcommand("trace", "trace a leaf over a path in the x-plane");
  add_field_options(trace, cfg);
  std::vector<double> start, segment, arc, polyline;
  bool with_linear = false;
  trace->add_option("--start", start, "re x, im x, re y, im y")->expected(4)->required();
  auto* seg_opt = trace->add_option("--segment", segment, "end point re im")->expected(2);
  auto* arc_opt = trace->add_option("--arc", arc, "center re im, swept angle")->expected(3);
  auto* poly_opt = trace->add_option("--polyline", polyline, "further vertices re im ...")->expected(2, 1000);
  seg_opt->excludes(arc_opt)->excludes(poly_opt);
  arc_opt->excludes(poly_opt);
  trace->add_flag("--linear-parts", with_linear, "co-integrate the linear parts u, v");
  trace->add_option("--tol", cfg.tol, "local error tolerance")->check(CLI::PositiveNumber);
  trace->add_option("--out", cfg.out);
  trace->add_option("--format", cfg.format)->check(CLI::IsMember({"csv"}));

  auto* dual = app.add_subcommand("dual", "sample the dual surface in the chart of lines");
  add_field_options(dual, cfg);
  dual->add_option("--n", cfg.n, "grid size per axis")->check(CLI::Range(2, 200));
  dual->add_option("--out", cfg.out);
  dual->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));

  auto* semi = app.add_subcommand("semirank", "semirank-2 consistency statistic");
  add_field_options(semi, cfg);
  double threshold = 1e-2;
  semi->add_option("--samples", cfg.samples, "number of sample points");
  semi->add_option("--radius", cfg.radius, "neighbourhood radius")->check(CLI::PositiveNumber);
  semi->add_option("--threshold", threshold, "largest statistic accepted");
  semi->add_option("--seed", cfg.seed);
  semi->add_option("--out", cfg.out);
  semi->add_option("--format", cfg.format)->check(CLI::IsMember({"json"}));

  auto* holo = app.add_subcommand("holonomy", "sampled holonomy motion from a base point");
  add_field_options(holo, cfg);
  std::vector<double> base;
  holo->add_option("--base", base, "base point re im (default i)")->expected(2);
  holo->add_option("--n", cfg.n, "grid size per complex axis")->check(CLI::Range(1, 50));
  holo->add_option("--tol", cfg.tol, "trace tolerance")->check(CLI::PositiveNumber);
  holo->add_option("--out", cfg.out);
  holo->add_option("--format", cfg.format)->check(CLI::IsMember({"csv"}));

  auto* moduli = app.add_subcommand("moduli", "genus-2 Fuchsian cocycle embeddings");
  moduli->require_subcommand(1);
  auto* build = moduli->add_subcommand("build", "embed the octagon group with a cocycle");
  std::vector<double> cocycle;
  build->add_option("--cocycle", cocycle, "8 numbers: (a12, a32) per generator")->expected(8);
  build->add_option("--out", cfg.out);
  auto* mcheck = moduli->add_subcommand("check", "relation and invariance residuals of an embedding");
  std::string in;
  mcheck->add_option("--in", in, "GroupEmbedding JSON")->required();
  mcheck->add_option("--tol", cfg.tol)->check(CLI::PositiveNumber);
  mcheck->add_option("--samples", cfg.samples);
  mcheck->add_option("--seed", cfg.seed);
  mcheck->add_option("--out", cfg.out);
  auto* equiv = moduli->add_subcommand("equiv", "decide coboundary equivalence of two cocycles");
  std::vector<double> c1v, c2v;
  std::string fixture = "coboundary";
  equiv->add_option("--c1", c1v)->expected(8);
  equiv->add_option("--c2", c2v)->expected(8);
  equiv->add_option("--fixture", fixture, "coboundary or distinct, used without --c1/--c2");
  equiv->add_option("--out", cfg.out);

  auto* gal = app.add_subcommand("gallery", "reference foliations");
  gal->require_subcommand(1);
  auto* list = gal->add_subcommand("list", "list the entries");
  list->add_option("--out", cfg.out);
  auto* gemit = gal->add_subcommand("emit", "print one entry");
  std::string label;
  gemit->add_option("label", label)->required();
  gemit->add_option("--out", cfg.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(cfg, curvature_tol, curvature_points);
    if (*trace) {
      if (!trace->count("--tol")) cfg.tol = 1e-10;
      return cmd_trace(cfg, start, segment, arc, polyline, with_linear);
    }
    if (*dual) return cmd_dual(cfg);
    if (*semi) {
      if (!semi->count("--samples")) cfg.samples = 10000;
      return cmd_semirank(cfg, threshold);
    }
    if (*holo) {
      if (!holo->count("--tol")) cfg.tol = 1e-10;
      if (!holo->count("--n")) cfg.n = 3;
      return cmd_holonomy(cfg, base);
    }
    if (*build) return cmd_moduli_build(cfg, cocycle);
    if (*mcheck) return cmd_moduli_check(cfg, in);
    if (*equiv) return cmd_moduli_equiv(cfg, c1v, c2v, fixture);
    if (*list) {
      emit(cfg, dump(gallery_list_json()));
      return kOk;
    }
    if (*gemit) {
      emit(cfg, dump(to_json(gallery_entry(label))));
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SingularLocusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const TangencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return *check ? kUsage : kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
