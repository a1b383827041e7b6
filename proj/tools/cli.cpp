#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "retfront/catalog/catalog.hpp"
#include "retfront/errors.hpp"
#include "retfront/jetalg/poly_text.hpp"
#include "retfront/propagation/propagation.hpp"
#include "retfront/wavefront/wavefront.hpp"

namespace retfront::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kParseTruncation = 24;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
      throw PreconditionError("bad number '" + item + "' in list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw PreconditionError("empty number list");
  return out;
}

std::vector<int> parse_signs(const std::string& text) {
  std::vector<int> out;
  for (char c : text) {
    if (c == '+') out.push_back(1);
    else if (c == '-') out.push_back(-1);
    else if (c != ',' && c != ' ') throw PreconditionError("signs are given as a string of + and -");
  }
  return out;
}

/// Joins "--t -1,0" into "--t=-1,0" so negative values are not read as flags.
std::vector<std::string> join_numeric_values(const std::vector<std::string>& args) {
  static const std::vector<std::string> numeric = {"--t", "--t-values", "--window", "--dt"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(numeric.begin(), numeric.end(), args[i]) != numeric.end() && i + 1 < args.size()) {
      out.push_back(args[i] + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  fs::path out_dir;

  void emit(const std::string& command, const json& j) const {
    const std::string body = j.dump(2) + "\n";
    out << body;
    write_file(out_dir / (command + ".json"), body);
  }
};

jetalg::RingContext germ_context(int r, int k) {
  if (r < 0 || k < 0 || r + k == 0) throw PreconditionError("need r >= 0, k >= 0 and r + k >= 1");
  return jetalg::RingContext(r, k, 0, 0);
}

int cmd_determinacy(const Context& ctx, const std::string& text, int r, int k, int l_max) {
  const int L = std::max(kParseTruncation, l_max + 2);
  const auto f = jetalg::parse_jet(text, germ_context(r, k), L);
  const auto v = equivalence::determinacy_order(f, l_max);
  json j{{"germ", f.to_string()},
         {"r", r},
         {"k", k},
         {"parse_truncation", L},
         {"l_max", l_max},
         {"verdict", v.to_string()},
         {"order", v.determined() ? json(v.order_tested) : json(nullptr)}};
  ctx.emit("determinacy", j);
  return v.determined() ? kExitOk : kExitInconclusive;
}

int cmd_classify(const Context& ctx, const std::string& text, int r, int k, std::optional<int> n) {
  const auto f = jetalg::parse_jet(text, germ_context(r, k), kParseTruncation);
  const auto rec = catalog::recognize(f, n);
  json j = rec.to_json();
  j["germ"] = f.to_string();
  if (rec.classified) {
    std::string stem = rec.family, sign;
    if (!stem.empty() && (stem.back() == '+' || stem.back() == '-')) {
      sign = stem.substr(stem.size() - 1);
      stem.pop_back();
    }
    j["family"] = stem;
    j["sign"] = sign.empty() ? json(nullptr) : json(sign);
  }
  ctx.emit("classify", j);
  return rec.classified ? kExitOk : kExitInconclusive;
}

struct StabilityArgs {
  std::string text;
  std::string label;
  std::string signs;
  int variant = 1;
  int r = 1, k = 0, n = 1;
  std::optional<int> truncation;
};

int cmd_check_stability(const Context& ctx, const StabilityArgs& a) {
  jetalg::JetPoly F;
  json j;
  if (!a.label.empty()) {
    if (!a.text.empty()) throw PreconditionError("give either a family or --label, not both");
    auto entry = catalog::instantiate(a.label, parse_signs(a.signs), a.variant);
    F = entry.polynomial();
    j["label"] = entry.label;
    j["variant"] = entry.variant;
  } else {
    if (a.text.empty()) throw PreconditionError("give a family polynomial or --label");
    if (a.r < 0 || a.k < 0 || a.n < 1) throw PreconditionError("need r >= 0, k >= 0, n >= 1");
    F = jetalg::parse_jet(a.text, jetalg::RingContext::generating_family(a.r, a.k, 1, a.n), kParseTruncation);
  }
  j["family"] = F.to_string();
  j["context"] = F.context().describe();
  const bool pc = stability::is_PC_nondegenerate(F);
  j["pc_nondegenerate"] = pc;
  if (!pc) {
    j["stable"] = nullptr;
    j["note"] = "not P-C-non-degenerate; the stability criterion does not apply";
    ctx.emit("check-stability", j);
    return kExitInconclusive;
  }
  stability::CheckOptions options;
  options.truncation = a.truncation;
  const auto report = stability::check_generating_family_stable(F, options);
  const json rj = report.to_json();
  for (auto& [key, value] : rj.items()) j[key] = value;
  ctx.emit("check-stability", j);
  return report.stable.has_value() ? kExitOk : kExitInconclusive;
}

std::string fixed(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_verify_catalog(const Context& ctx, std::optional<int> r, std::optional<int> n) {
  std::vector<catalog::NormalFormEntry> entries;
  if (r || n) {
    if (!r || !n) throw PreconditionError("--r and --n go together");
    entries = catalog::list_entries(*r, *n);
  } else {
    entries = catalog::all_entries();
  }
  const auto report = catalog::verify_catalog(entries);
  ctx.err << "label          variant  n  P-C  stable  L   seconds\n";
  for (const auto& res : report.results) {
    std::string label = res.entry.label;
    label.resize(std::max<std::size_t>(label.size(), 14), ' ');
    ctx.err << label << ' ' << res.entry.variant << "        " << res.entry.n << "  " << (res.pc_nondegenerate ? "yes" : "no ")
            << "  " << (res.passed() ? "yes   " : "NO    ") << "  " << (res.report ? std::to_string(res.report->truncation) : "-")
            << "  " << fixed(res.seconds) << (res.error.empty() ? "" : "  " + res.error) << "\n";
  }
  ctx.err << report.results.size() << " entries, " << (report.all_passed() ? "all passed" : "FAILURES") << " in "
          << fixed(report.seconds) << " s\n";
  ctx.emit("verify-catalog", report.to_json());
  return report.all_passed() ? kExitOk : kExitFailed;
}

json geometry_summary(const wavefront::BifurcationSeries& series, const std::vector<fs::path>& files) {
  json sheets = json::array();
  for (const auto& s : series.sheets) {
    sheets.push_back({{"sigma", s.sigma},
                      {"t", s.t},
                      {"vertices", s.vertices.size()},
                      {"edges", s.edges.size()},
                      {"triangles", s.triangles.size()},
                      {"cusps", s.count(wavefront::MarkerKind::Cusp)},
                      {"boundary_markers", s.count(wavefront::MarkerKind::Boundary)},
                      {"diagnostics", s.diagnostics}});
  }
  json names = json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  return {{"label", series.label},
          {"t_values", series.t_values},
          {"ambient_dim", series.ambient_dim},
          {"sheets", sheets},
          {"files", names}};
}

wavefront::Format default_format(int ambient_dim, const std::string& name) {
  if (!name.empty()) return wavefront::parse_format(name);
  return ambient_dim == 2 ? wavefront::Format::SVG : wavefront::Format::OBJ;
}

struct WavefrontArgs {
  std::string label;
  std::string signs;
  int variant = 1;
  std::string t_values = "-1,0,1";
  std::string format;
  std::optional<double> window;
  std::optional<int> grid;
};

int cmd_wavefront(const Context& ctx, const WavefrontArgs& a) {
  wavefront::SamplingOptions sampling;
  if (a.window) {
    if (!(*a.window > 0)) throw PreconditionError("--window must be positive");
    sampling.x_max = *a.window;
    sampling.lo = -*a.window;
    sampling.hi = *a.window;
  }
  if (a.grid) {
    if (*a.grid < 2) throw PreconditionError("--grid must be at least 2");
    sampling.curve_grid = sampling.surface_grid = *a.grid;
  }
  const auto entry = catalog::instantiate(a.label, parse_signs(a.signs), a.variant);
  const auto series = wavefront::bifurcation_series(entry, parse_list(a.t_values), sampling);
  const auto files = wavefront::export_geometry(series, default_format(series.ambient_dim, a.format), ctx.out_dir);
  json j = geometry_summary(series, files);
  j["family"] = entry.text;
  j["window"] = {{"x_max", sampling.x_max}, {"lo", sampling.lo}, {"hi", sampling.hi}};
  j["grid"] = {{"curve", sampling.curve_grid}, {"surface", sampling.surface_grid}};
  ctx.emit("wavefront", j);
  return kExitOk;
}

struct PropagateArgs {
  std::string shape;
  std::string front_file;
  std::string metric = "euclidean";
  std::string t_values = "0.5";
  double dt = 1e-3;
  int rays = 32;
  int samples = 101;
  std::string format;
};

int cmd_propagate(const Context& ctx, const PropagateArgs& a) {
  propagation::InitialFront front;
  if (!a.front_file.empty()) {
    if (!a.shape.empty()) throw PreconditionError("give either --shape or --front, not both");
    std::ifstream f(a.front_file);
    if (!f) throw PreconditionError("cannot read " + a.front_file);
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw PreconditionError(std::string("bad JSON in ") + a.front_file + ": " + e.what());
    }
    front = propagation::InitialFront::from_json(j);
  } else {
    std::string shape = a.shape.empty() ? "segment-endpoint" : a.shape;
    if (shape == "segment-with-endpoint") shape = "segment-endpoint";
    front = propagation::builtin_shape(shape, a.samples);
  }
  const auto t_values = parse_list(a.t_values);
  const bool forward = t_values.back() > 0;
  for (double t : t_values)
    if ((t > 0) != forward || t == 0.0) throw PreconditionError("t values must be nonzero and share one sign");
  const auto metric = propagation::MetricSpec::parse(a.metric, front.dim);
  auto bundle = propagation::conormal_lift_all(front, metric, a.rays);
  const double t_end = forward ? t_values.back() : t_values.front();
  bundle = propagation::flow(std::move(bundle), t_end, a.dt);
  const auto series = propagation::project_series(bundle, front.name, t_values);
  const auto files = wavefront::export_geometry(series, default_format(series.ambient_dim, a.format), ctx.out_dir);
  double drift = 0.0;
  for (const auto& e : bundle.edges)
    for (const auto& r : e.rays) drift = std::max(drift, r.max_drift);
  json j = geometry_summary(series, files);
  j["metric"] = a.metric;
  j["dt"] = a.dt;
  j["rays"] = bundle.ray_count();
  j["max_h_drift"] = drift;
  j["log"] = bundle.log;
  ctx.emit("propagate", j);
  return kExitOk;
}

int cmd_verify_lift(const Context& ctx, const std::string& family, int n, int samples, double step, double tol) {
  std::vector<std::string> names;
  if (family == "all")
    names = {"identity", "translation", "scaling", "offset"};
  else
    names = {family};
  if (samples < 1) throw PreconditionError("--samples must be positive");
  const auto points = propagation::sample_jet_points(n, samples);
  json results = json::array();
  for (const auto& name : names) {
    const auto report = propagation::verify_big_jet_lift(propagation::ContactFamily::example(name, n), points, step);
    json j = report.to_json();
    j["family"] = name;
    j["contact"] = report.max_residual < tol;
    results.push_back(j);
  }
  ctx.emit("verify-lift", {{"n", n}, {"step", step}, {"tolerance", tol}, {"results", results}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reticular wavefront toolkit: determinacy, stability, catalog, fronts, propagation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = "retfront_out";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string text;
  int r = 1, k = 0, l_max = 12;
  std::optional<int> n_opt;

  auto* det = app.add_subcommand("determinacy", "Determinacy order of a germ f0(x, y)");
  det->add_option("germ", text, "Germ text, e.g. \"x^3\"")->required();
  det->add_option("--r", r, "Corner variables x")->capture_default_str();
  det->add_option("--k", k, "Internal variables y")->capture_default_str();
  det->add_option("--l-max", l_max, "Largest order tested")->capture_default_str();

  auto* cls = app.add_subcommand("classify", "Recognize a germ among the catalog types");
  cls->add_option("germ", text, "Germ text")->required();
  cls->add_option("--r", r, "Corner variables x")->capture_default_str();
  cls->add_option("--k", k, "Internal variables y")->capture_default_str();
  cls->add_option("--n", n_opt, "Restrict to entries with at most n parameters");

  StabilityArgs st;
  auto* stab = app.add_subcommand("check-stability", "Stability of a generating family F(x, y, t, q, z)");
  stab->add_option("family", st.text, "Family text over x, y, t, q1..qn, z");
  stab->add_option("--label", st.label, "Catalog label instead of a polynomial");
  stab->add_option("--signs", st.signs, "Sign slots, e.g. \"+-\"");
  stab->add_option("--variant", st.variant, "Catalog variant")->capture_default_str();
  stab->add_option("--r", st.r, "Corner variables x")->capture_default_str();
  stab->add_option("--k", st.k, "Internal variables y")->capture_default_str();
  stab->add_option("--n", st.n, "Parameters q")->capture_default_str();
  stab->add_option("--truncation", st.truncation, "Working truncation order");

  std::optional<int> cat_r, cat_n;
  auto* cat = app.add_subcommand("verify-catalog", "Verify every catalog normal form");
  cat->add_option("--r", cat_r, "Only this corner count");
  cat->add_option("--n", cat_n, "Only entries with at most n parameters");

  WavefrontArgs wf;
  auto* wave = app.add_subcommand("wavefront", "Sample and export the fronts W_{sigma,t} of a catalog entry");
  wave->add_option("--label", wf.label, "Catalog label")->required();
  wave->add_option("--signs", wf.signs, "Sign slots");
  wave->add_option("--variant", wf.variant, "Catalog variant")->capture_default_str();
  wave->add_option("--t,--t-values", wf.t_values, "Comma-separated increasing times")->capture_default_str();
  wave->add_option("--format", wf.format, "svg, obj or json (default by dimension)");
  wave->add_option("--window", wf.window, "Half-width w: x in [0, w], y and q in [-w, w]");
  wave->add_option("--grid", wf.grid, "Samples per parameter axis");

  PropagateArgs pr;
  auto* prop = app.add_subcommand("propagate", "Propagate an initial front along characteristics");
  prop->add_option("--shape", pr.shape, "segment, segment-endpoint, arc, circle, parabola, plane, corner-wedge");
  prop->add_option("--front", pr.front_file, "Initial front JSON file");
  prop->add_option("--metric", pr.metric, "euclidean, diag:a,b or radial:c")->capture_default_str();
  prop->add_option("--t,--t-values", pr.t_values, "Comma-separated times")->capture_default_str();
  prop->add_option("--dt", pr.dt, "RK4 step")->capture_default_str();
  prop->add_option("--rays", pr.rays, "Rays per point on edges of codimension >= 2")->capture_default_str();
  prop->add_option("--samples", pr.samples, "Samples per axis of built-in shapes")->capture_default_str();
  prop->add_option("--format", pr.format, "svg, obj or json (default by dimension)");

  std::string lift_family = "all";
  int lift_n = 1, lift_samples = 50;
  double lift_step = 1e-5, lift_tol = 1e-6;
  auto* lift = app.add_subcommand("verify-lift", "Check the big-jet lift of a contact family");
  lift->add_option("--family", lift_family, "identity, translation, scaling, offset, noncontact or all")
      ->capture_default_str();
  lift->add_option("--n", lift_n, "Dimension n of q")->capture_default_str();
  lift->add_option("--samples", lift_samples, "Sample points")->capture_default_str();
  lift->add_option("--step", lift_step, "Central difference step")->capture_default_str();
  lift->add_option("--tolerance", lift_tol, "Residual bound for reporting contact")->capture_default_str();

  std::vector<std::string> args = join_numeric_values(raw_args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const Context ctx{out, err, fs::path(out_dir)};
  try {
    if (*det) return cmd_determinacy(ctx, text, r, k, l_max);
    if (*cls) return cmd_classify(ctx, text, r, k, n_opt);
    if (*stab) return cmd_check_stability(ctx, st);
    if (*cat) return cmd_verify_catalog(ctx, cat_r, cat_n);
    if (*wave) return cmd_wavefront(ctx, wf);
    if (*prop) return cmd_propagate(ctx, pr);
    if (*lift) return cmd_verify_lift(ctx, lift_family, lift_n, lift_samples, lift_step, lift_tol);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ContextMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionCapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitInputError;
}

}  // namespace retfront::cli
