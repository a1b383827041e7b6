#include "retfront/wavefront/wavefront.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "retfront/errors.hpp"

namespace retfront::wavefront {

using jetalg::Role;
using jetalg::RingContext;

namespace {

/// Double-precision copy of a jet for fast repeated evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const JetPoly& p) {
    for (const auto& [m, c] : p.terms()) {
      Term term{c.get_d(), {}};
      for (int v = 0; v < m.num_vars(); ++v)
        if (m[v] > 0) term.factors.emplace_back(v, m[v]);
      terms_.push_back(std::move(term));
    }
  }

  double operator()(const std::vector<double>& pt) const {
    double sum = 0.0;
    for (const auto& term : terms_) {
      double v = term.coeff;
      for (const auto& [var, e] : term.factors)
        for (int i = 0; i < e; ++i) v *= pt[var];
      sum += v;
    }
    return sum;
  }

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<int, int>> factors;
  };
  std::vector<Term> terms_;
};

struct Solution {
  bool ok = false;
  std::vector<double> point;
};

/// The sigma-criminant system G(p, s) = 0 in sheet parameters p and solved
/// unknowns s (z and some q's).
class CriminantSystem {
 public:
  CriminantSystem(const JetPoly& F, const std::vector<int>& sigma, double t) : ctx_(F.context()), t_(t) {
    if (!ctx_.has_z() || ctx_.m() != 1)
      throw PreconditionError("criminant_solve needs a generating family F(x, y, t, q, z) with one t");
    const auto xs = ctx_.vars(Role::X);
    std::set<int> in_sigma;
    for (int s : sigma) {
      if (s < 1 || s > ctx_.r() || !in_sigma.insert(s).second)
        throw PreconditionError("sigma must be a subset of {1..r}");
      zero_vars_.push_back(xs[s - 1]);
    }
    std::vector<JetPoly> eqs{F};
    for (int i = 0; i < ctx_.r(); ++i) {
      if (in_sigma.count(i + 1)) continue;
      free_x_.push_back(xs[i]);
      eqs.push_back(partial(F, xs[i]));
    }
    for (int y : ctx_.vars(Role::Y)) eqs.push_back(partial(F, y));
    const int E = static_cast<int>(eqs.size());
    const auto qs = ctx_.q_vars();
    if (qs.empty() || qs.size() > 2)
      throw PreconditionError("wavefront extraction supports n = 1 or n = 2 parameters q");

    for (const auto& e : eqs) G_.emplace_back(e);
    std::vector<int> candidates{ctx_.z_var()};
    candidates.insert(candidates.end(), qs.begin(), qs.end());
    for (int y : ctx_.vars(Role::Y)) candidates.push_back(y);
    candidates.insert(candidates.end(), free_x_.begin(), free_x_.end());

    // Pick unknowns greedily by rank of dG/ds, first at the origin then at
    // a fixed generic point.
    std::vector<std::vector<CompiledPoly>> dG(E);
    for (int e = 0; e < E; ++e)
      for (int v : candidates) dG[e].emplace_back(partial(eqs[e], v));
    std::vector<double> origin(ctx_.num_vars(), 0.0);
    std::vector<double> generic(ctx_.num_vars());
    for (int v = 0; v < ctx_.num_vars(); ++v) generic[v] = 0.3137 + 0.2113 * v - 0.0971 * v * v;
    for (int v : zero_vars_) generic[v] = 0.0;
    for (const auto* at : {&origin, &generic}) {
      std::vector<int> chosen;
      for (std::size_t c = 0; c < candidates.size() && static_cast<int>(chosen.size()) < E; ++c) {
        Eigen::MatrixXd A(E, chosen.size() + 1);
        for (int e = 0; e < E; ++e) {
          for (std::size_t j = 0; j < chosen.size(); ++j) A(e, j) = dG[e][chosen[j]](*at);
          A(e, chosen.size()) = dG[e][c](*at);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        lu.setThreshold(1e-10);
        if (lu.rank() == static_cast<int>(chosen.size()) + 1) chosen.push_back(static_cast<int>(c));
      }
      if (static_cast<int>(chosen.size()) == E) {
        for (int c : chosen) solved_.push_back(candidates[c]);
        break;
      }
    }
    if (solved_.empty())
      throw PreconditionError("the criminant equations have no independent set of unknowns");
    if (solved_.front() != ctx_.z_var())
      throw PreconditionError("the criminant equations cannot be solved for z");

    std::vector<int> pool = free_x_;
    for (int y : ctx_.vars(Role::Y)) pool.push_back(y);
    pool.insert(pool.end(), qs.begin(), qs.end());
    for (int v : pool)
      if (std::find(solved_.begin(), solved_.end(), v) == solved_.end()) params_.push_back(v);
    if (params_.size() != qs.size())
      throw PreconditionError("sheet parameter count does not match the number of parameters q");

    affine_ = true;
    for (const auto& [m, c] : F.terms()) {
      int deg = 0;
      for (int v : solved_) deg += m[v];
      if (deg > 1) affine_ = false;
    }
    for (int e = 0; e < E; ++e) {
      std::vector<CompiledPoly> rs, rp;
      for (int v : solved_) rs.emplace_back(partial(eqs[e], v));
      for (int v : params_) rp.emplace_back(partial(eqs[e], v));
      dGds_.push_back(std::move(rs));
      dGdp_.push_back(std::move(rp));
    }
  }

  const RingContext& context() const { return ctx_; }
  const std::vector<int>& params() const { return params_; }
  const std::vector<int>& free_x() const { return free_x_; }
  bool affine() const { return affine_; }

  std::vector<double> base_point(const std::vector<double>& p) const {
    std::vector<double> pt(ctx_.num_vars(), 0.0);
    pt[ctx_.first(Role::T)] = t_;
    for (std::size_t i = 0; i < params_.size(); ++i) pt[params_[i]] = p[i];
    return pt;
  }

  Eigen::VectorXd residual(const std::vector<double>& pt) const {
    Eigen::VectorXd r(G_.size());
    for (std::size_t e = 0; e < G_.size(); ++e) r(e) = G_[e](pt);
    return r;
  }

  Eigen::MatrixXd jac_s(const std::vector<double>& pt) const {
    Eigen::MatrixXd J(G_.size(), solved_.size());
    for (std::size_t e = 0; e < G_.size(); ++e)
      for (std::size_t j = 0; j < solved_.size(); ++j) J(e, j) = dGds_[e][j](pt);
    return J;
  }

  Eigen::MatrixXd jac_p(const std::vector<double>& pt) const {
    Eigen::MatrixXd J(G_.size(), params_.size());
    for (std::size_t e = 0; e < G_.size(); ++e)
      for (std::size_t j = 0; j < params_.size(); ++j) J(e, j) = dGdp_[e][j](pt);
    return J;
  }

  /// Solves for the unknowns at sheet parameters p; `seed` is a previous
  /// solution used as the Newton start.
  Solution solve(const std::vector<double>& p, const std::vector<double>* seed, double tol) const {
    Solution out;
    out.point = base_point(p);
    if (affine_) {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jac_s(out.point));
      if (!lu.isInvertible()) return out;
      Eigen::VectorXd s = lu.solve(-residual(out.point));
      for (std::size_t j = 0; j < solved_.size(); ++j) out.point[solved_[j]] = s(j);
    } else {
      if (seed)
        for (int v : solved_) out.point[v] = (*seed)[v];
      if (!newton(out.point)) return out;
    }
    if (!std::all_of(out.point.begin(), out.point.end(), [](double v) { return std::isfinite(v); })) return out;
    out.ok = residual(out.point).lpNorm<Eigen::Infinity>() <= tol;
    return out;
  }

  /// det of d(q)/d(params) at a solved point.
  double minor(const std::vector<double>& pt) const {
    const auto qs = ctx_.q_vars();
    const Eigen::MatrixXd A = jac_s(pt);
    const Eigen::MatrixXd ds = -A.fullPivLu().solve(jac_p(pt));
    Eigen::MatrixXd dq(qs.size(), params_.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
      auto ps = std::find(params_.begin(), params_.end(), qs[i]);
      if (ps != params_.end()) {
        dq.row(i).setZero();
        dq(i, ps - params_.begin()) = 1.0;
      } else {
        dq.row(i) = ds.row(std::find(solved_.begin(), solved_.end(), qs[i]) - solved_.begin());
      }
    }
    return dq.determinant();
  }

 private:
  bool newton(std::vector<double>& pt) const {
    Eigen::VectorXd r = residual(pt);
    for (int iter = 0; iter < 80; ++iter) {
      double norm = r.norm();
      if (norm <= 1e-14) return true;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jac_s(pt));
      if (!lu.isInvertible()) return false;
      Eigen::VectorXd step = lu.solve(-r);
      double lambda = 1.0;
      bool improved = false;
      for (int h = 0; h < 30; ++h, lambda *= 0.5) {
        std::vector<double> trial = pt;
        for (std::size_t j = 0; j < solved_.size(); ++j) trial[solved_[j]] += lambda * step(j);
        Eigen::VectorXd rt = residual(trial);
        if (rt.allFinite() && rt.norm() < norm) {
          pt = std::move(trial);
          r = rt;
          improved = true;
          break;
        }
      }
      if (!improved) return r.lpNorm<Eigen::Infinity>() <= 1e-12;
    }
    return r.lpNorm<Eigen::Infinity>() <= 1e-12;
  }

  RingContext ctx_;
  double t_;
  std::vector<int> zero_vars_;
  std::vector<int> free_x_;
  std::vector<int> solved_;
  std::vector<int> params_;
  bool affine_ = true;
  std::vector<CompiledPoly> G_;
  std::vector<std::vector<CompiledPoly>> dGds_;
  std::vector<std::vector<CompiledPoly>> dGdp_;
};

std::vector<double> ambient_of(const RingContext& ctx, const std::vector<double>& pt) {
  std::vector<double> v;
  for (int q : ctx.q_vars()) v.push_back(pt[q]);
  v.push_back(pt[ctx.z_var()]);
  return v;
}

std::vector<double> params_of(const CriminantSystem& sys, const std::vector<double>& pt) {
  std::vector<double> p;
  for (int v : sys.params()) p.push_back(pt[v]);
  return p;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v == 0.0 ? 0.0 : v);
  return buf;
}

/// Grid edges of a sheet: curve edges, or triangle sides along one parameter axis.
std::vector<std::array<int, 2>> grid_lines(const FrontSheet& sheet) {
  if (sheet.triangles.empty()) return sheet.edges;
  std::set<std::array<int, 2>> lines;
  for (const auto& tri : sheet.triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = tri[i], b = tri[(i + 1) % 3];
      int differing = 0;
      for (std::size_t c = 0; c < sheet.params[a].size(); ++c)
        if (sheet.params[a][c] != sheet.params[b][c]) ++differing;
      if (differing == 1) lines.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return {lines.begin(), lines.end()};
}

void detect_with(const CriminantSystem& sys, FrontSheet& sheet, const SamplingOptions& sampling) {
  sheet.vertices.resize(sheet.grid_vertices);
  sheet.params.resize(sheet.grid_vertices);
  sheet.sources.resize(sheet.grid_vertices);
  sheet.markers.clear();
  const auto& fx = sys.free_x();
  const auto& pv = sys.params();
  auto on_boundary = [&](const std::vector<double>& p) {
    for (std::size_t i = 0; i < pv.size(); ++i)
      if (std::find(fx.begin(), fx.end(), pv[i]) != fx.end() && p[i] <= 0.0) return true;
    return false;
  };
  const auto& points = sheet.sources;
  std::vector<double> minor(sheet.grid_vertices);
  for (std::size_t v = 0; v < sheet.grid_vertices; ++v) minor[v] = sys.minor(points[v]);
  for (std::size_t v = 0; v < sheet.grid_vertices; ++v) {
    if (on_boundary(sheet.params[v]))
      sheet.markers.push_back({MarkerKind::Boundary, static_cast<int>(v)});
    else if (minor[v] == 0.0)
      sheet.markers.push_back({MarkerKind::Cusp, static_cast<int>(v)});
  }
  for (const auto& [a, b] : grid_lines(sheet)) {
    if (!(minor[a] * minor[b] < 0.0)) continue;
    std::vector<double> pa = sheet.params[a], pb = sheet.params[b];
    double sa = minor[a];
    std::vector<double> seed = points[a];
    Solution mid;
    for (int iter = 0; iter < 200; ++iter) {
      double dist = 0.0;
      for (std::size_t i = 0; i < pa.size(); ++i) dist = std::max(dist, std::abs(pb[i] - pa[i]));
      std::vector<double> pm(pa.size());
      for (std::size_t i = 0; i < pa.size(); ++i) pm[i] = 0.5 * (pa[i] + pb[i]);
      mid = sys.solve(pm, &seed, sampling.tol_eq);
      if (!mid.ok) break;
      if (dist <= sampling.bisect_tol) break;
      double sm = sys.minor(mid.point);
      if (sm == 0.0) break;
      if ((sm < 0.0) == (sa < 0.0)) {
        pa = pm;
        sa = sm;
        seed = mid.point;
      } else {
        pb = pm;
      }
    }
    if (!mid.ok) {
      sheet.diagnostics.push_back("singular point refinement failed between vertices " + std::to_string(a) +
                                  " and " + std::to_string(b));
      continue;
    }
    auto p = params_of(sys, mid.point);
    sheet.vertices.push_back(ambient_of(sys.context(), mid.point));
    sheet.params.push_back(p);
    sheet.sources.push_back(mid.point);
    sheet.markers.push_back(
        {on_boundary(p) ? MarkerKind::Boundary : MarkerKind::Cusp, static_cast<int>(sheet.vertices.size() - 1)});
  }
}

std::vector<double> axis(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

}  // namespace

std::size_t FrontSheet::count(MarkerKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(markers.begin(), markers.end(), [&](const Marker& m) { return m.kind == kind; }));
}

nlohmann::json FrontSheet::to_json() const {
  nlohmann::json markers_json = nlohmann::json::array();
  for (const auto& m : markers)
    markers_json.push_back({{"kind", m.kind == MarkerKind::Cusp ? "cusp" : "boundary"}, {"vertex", m.vertex}});
  nlohmann::json xy = nlohmann::json::array();
  for (const auto& pt : sources) xy.push_back(pt);
  return {{"sigma", sigma},
          {"t", t},
          {"ambient_dim", ambient_dim},
          {"param_names", param_names},
          {"vertices", vertices},
          {"params", params},
          {"sources", xy},
          {"edges", edges},
          {"triangles", triangles},
          {"markers", markers_json},
          {"diagnostics", diagnostics}};
}

const FrontSheet& BifurcationSeries::sheet(const std::vector<int>& sigma, double t) const {
  for (const auto& s : sheets)
    if (s.sigma == sigma && s.t == t) return s;
  throw PreconditionError("no sheet for sigma " + sigma_tag(sigma) + " at t = " + number_tag(t));
}

FrontSheet criminant_solve(const JetPoly& F, const std::vector<int>& sigma, double t,
                           const SamplingOptions& sampling) {
  CriminantSystem sys(F, sigma, t);
  const auto& ctx = sys.context();
  FrontSheet sheet;
  sheet.sigma = sigma;
  std::sort(sheet.sigma.begin(), sheet.sigma.end());
  sheet.t = t;
  sheet.ambient_dim = static_cast<int>(ctx.q_vars().size()) + 1;
  for (int v : sys.params()) sheet.param_names.push_back(ctx.name(v));

  std::vector<std::vector<double>> axes;
  const int per_axis = sheet.ambient_dim == 2 ? sampling.curve_grid : sampling.surface_grid;
  if (per_axis < 2) throw PreconditionError("grid needs at least 2 samples per axis");
  for (int v : sys.params()) {
    bool corner = ctx.role(v) == Role::X;
    axes.push_back(corner ? axis(0.0, sampling.x_max, per_axis) : axis(sampling.lo, sampling.hi, per_axis));
  }

  const int rows = sheet.ambient_dim == 2 ? 1 : per_axis;
  const int cols = per_axis;
  std::vector<int> index(static_cast<std::size_t>(rows) * cols, -1);
  std::vector<std::vector<double>> solutions(index.size());
  std::size_t dropped = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      std::vector<double> p{axes[0][j]};
      if (rows > 1) p.push_back(axes[1][i]);
      const std::vector<double>* seed = nullptr;
      if (j > 0 && index[i * cols + j - 1] >= 0)
        seed = &solutions[i * cols + j - 1];
      else if (i > 0 && index[(i - 1) * cols + j] >= 0)
        seed = &solutions[(i - 1) * cols + j];
      Solution s = sys.solve(p, seed, sampling.tol_eq);
      if (!s.ok && seed) s = sys.solve(p, nullptr, sampling.tol_eq);
      if (!s.ok) {
        ++dropped;
        continue;
      }
      index[i * cols + j] = static_cast<int>(sheet.vertices.size());
      sheet.vertices.push_back(ambient_of(ctx, s.point));
      sheet.params.push_back(p);
      sheet.sources.push_back(s.point);
      solutions[i * cols + j] = std::move(s.point);
    }
  }
  if (dropped > 0) sheet.diagnostics.push_back(std::to_string(dropped) + " samples dropped (no solution)");
  if (sheet.vertices.empty()) sheet.diagnostics.push_back("empty sheet: system inconsistent on the whole grid");
  if (!sys.affine()) sheet.diagnostics.push_back("non-affine family: solved by damped Newton continuation");

  if (rows == 1) {
    for (int j = 0; j + 1 < cols; ++j)
      if (index[j] >= 0 && index[j + 1] >= 0) sheet.edges.push_back({index[j], index[j + 1]});
  } else {
    for (int i = 0; i + 1 < rows; ++i) {
      for (int j = 0; j + 1 < cols; ++j) {
        int a = index[i * cols + j], b = index[i * cols + j + 1];
        int c = index[(i + 1) * cols + j + 1], d = index[(i + 1) * cols + j];
        if (a >= 0 && b >= 0 && c >= 0) sheet.triangles.push_back({a, b, c});
        if (a >= 0 && c >= 0 && d >= 0) sheet.triangles.push_back({a, c, d});
      }
    }
  }
  sheet.grid_vertices = sheet.vertices.size();
  detect_with(sys, sheet, sampling);
  return sheet;
}

void detect_singular_points(const JetPoly& F, FrontSheet& sheet, const SamplingOptions& sampling) {
  CriminantSystem sys(F, sheet.sigma, sheet.t);
  detect_with(sys, sheet, sampling);
}

std::vector<std::vector<int>> corner_subsets(int r) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << r); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < r; ++i)
      if (mask & (1u << i)) s.push_back(i + 1);
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

BifurcationSeries bifurcation_series(const catalog::NormalFormEntry& entry, const std::vector<double>& t_values,
                                     const SamplingOptions& sampling, unsigned threads) {
  if (t_values.empty()) throw PreconditionError("t_values must not be empty");
  for (std::size_t i = 1; i < t_values.size(); ++i)
    if (!(t_values[i - 1] < t_values[i])) throw PreconditionError("t_values must be strictly increasing");
  BifurcationSeries series;
  series.label = entry.label;
  series.t_values = t_values;
  series.ambient_dim = entry.n + 1;
  const JetPoly F = entry.polynomial();
  const auto subsets = corner_subsets(entry.r);
  std::vector<std::pair<std::vector<int>, double>> tasks;
  for (double t : t_values)
    for (const auto& s : subsets) tasks.emplace_back(s, t);
  series.sheets.resize(tasks.size());

  if (threads == 0) threads = catalog::worker_count();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(tasks.size());
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        series.sheets[i] = criminant_solve(F, tasks[i].first, tasks[i].second, sampling);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) throw PreconditionError(e);
  return series;
}

BifurcationSeries bifurcation_series(const std::string& label, const std::vector<int>& signs, int variant,
                                     const std::vector<double>& t_values, const SamplingOptions& sampling,
                                     unsigned threads) {
  return bifurcation_series(catalog::instantiate(label, signs, variant), t_values, sampling, threads);
}

Format parse_format(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "svg") return Format::SVG;
  if (s == "obj") return Format::OBJ;
  if (s == "json") return Format::JSON;
  throw PreconditionError("unknown format '" + name + "' (expected svg, obj or json)");
}

std::string sigma_tag(const std::vector<int>& sigma) {
  if (sigma.empty()) return "sigma-none";
  std::string s = "sigma";
  for (int i : sigma) s += "-" + std::to_string(i);
  return s;
}

std::string number_tag(double v) { return fmt("%g", v); }

std::string render_svg(const std::vector<const FrontSheet*>& sheets, const std::string& title) {
  static const char* kColors[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400"};
  const double width = 800, height = 600, margin = 40;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto* s : sheets)
    for (const auto& v : s->vertices) {
      x0 = std::min(x0, v[0]);
      x1 = std::max(x1, v[0]);
      y0 = std::min(y0, v[1]);
      y1 = std::max(y1, v[1]);
    }
  if (x0 > x1) x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  const double scale = std::min((width - 2 * margin) / (x1 - x0), (height - 2 * margin) / (y1 - y0));
  auto X = [&](double x) { return fmt("%.3f", margin + (x - x0) * scale); };
  auto Y = [&](double y) { return fmt("%.3f", height - margin - (y - y0) * scale); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n"
      << "<title>" << title << "</title>\n"
      << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  if (x0 <= 0 && 0 <= x1)
    out << "<line x1=\"" << X(0) << "\" y1=\"" << fmt("%.3f", margin) << "\" x2=\"" << X(0) << "\" y2=\""
        << fmt("%.3f", height - margin) << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  if (y0 <= 0 && 0 <= y1)
    out << "<line x1=\"" << fmt("%.3f", margin) << "\" y1=\"" << Y(0) << "\" x2=\"" << fmt("%.3f", width - margin)
        << "\" y2=\"" << Y(0) << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  for (std::size_t k = 0; k < sheets.size(); ++k) {
    const auto& s = *sheets[k];
    const char* color = kColors[(s.sigma.empty() ? 0 : s.sigma.size() + s.sigma.front()) % 5];
    out << "<g id=\"" << sigma_tag(s.sigma) << "_t" << number_tag(s.t) << "\">\n";
    std::string d;
    int last = -1;
    for (const auto& [a, b] : s.edges) {
      if (a != last) d += "M" + X(s.vertices[a][0]) + "," + Y(s.vertices[a][1]) + " ";
      d += "L" + X(s.vertices[b][0]) + "," + Y(s.vertices[b][1]) + " ";
      last = b;
    }
    if (!d.empty()) {
      d.pop_back();
      out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& m : s.markers) {
      const auto& v = s.vertices[m.vertex];
      out << "<circle cx=\"" << X(v[0]) << "\" cy=\"" << Y(v[1]) << "\" r=\"3\" fill=\""
          << (m.kind == MarkerKind::Cusp ? "#e74c3c" : "#2980b9") << "\" class=\""
          << (m.kind == MarkerKind::Cusp ? "cusp" : "boundary") << "\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_obj(const std::vector<const FrontSheet*>& sheets, const std::string& title) {
  std::ostringstream out;
  out << "# " << title << "\n";
  std::size_t offset = 1;
  for (const auto* s : sheets) {
    out << "o " << sigma_tag(s->sigma) << "_t" << number_tag(s->t) << "\n";
    for (const auto& v : s->vertices) {
      out << "v";
      for (std::size_t i = 0; i < 3; ++i) out << ' ' << fmt("%.10g", i < v.size() ? v[i] : 0.0);
      out << "\n";
    }
    for (const auto& [a, b] : s->edges) out << "l " << a + offset << ' ' << b + offset << "\n";
    for (const auto& tri : s->triangles)
      out << "f " << tri[0] + offset << ' ' << tri[1] + offset << ' ' << tri[2] + offset << "\n";
    for (const auto& m : s->markers)
      out << "# " << (m.kind == MarkerKind::Cusp ? "cusp" : "boundary") << ' ' << m.vertex + offset << "\n";
    offset += s->vertices.size();
  }
  return out.str();
}

std::string render_json(const std::vector<const FrontSheet*>& sheets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto* s : sheets) arr.push_back(s->to_json());
  return nlohmann::json{{"sheets", arr}}.dump() + "\n";
}

std::vector<std::filesystem::path> export_geometry(const BifurcationSeries& series, Format format,
                                                   const std::filesystem::path& out_dir) {
  if (format == Format::SVG && series.ambient_dim != 2)
    throw PreconditionError("SVG export needs 2-dimensional fronts; use obj or json");
  if (format == Format::OBJ && series.ambient_dim != 3)
    throw PreconditionError("OBJ export needs 3-dimensional fronts; use svg or json");
  std::filesystem::create_directories(out_dir);
  const char* ext = format == Format::SVG ? ".svg" : format == Format::OBJ ? ".obj" : ".json";
  auto render = [&](const std::vector<const FrontSheet*>& sheets, const std::string& title) {
    switch (format) {
      case Format::SVG: return render_svg(sheets, title);
      case Format::OBJ: return render_obj(sheets, title);
      default: return render_json(sheets);
    }
  };
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const std::string& body) {
    auto path = out_dir / (name + ext);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << body;
    written.push_back(path);
  };
  for (double t : series.t_values) {
    std::vector<const FrontSheet*> at_t;
    for (const auto& s : series.sheets) {
      if (s.t != t) continue;
      at_t.push_back(&s);
      const std::string name = series.label + "_" + sigma_tag(s.sigma) + "_t" + number_tag(t);
      write(name, render({&s}, name));
    }
    const std::string name = series.label + "_t" + number_tag(t) + "_overlay";
    write(name, render(at_t, name));
  }
  return written;
}

}  // namespace retfront::wavefront
