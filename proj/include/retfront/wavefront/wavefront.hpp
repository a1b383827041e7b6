#ifndef RETFRONT_WAVEFRONT_WAVEFRONT_HPP
#define RETFRONT_WAVEFRONT_WAVEFRONT_HPP

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "retfront/catalog/catalog.hpp"

namespace retfront::wavefront {

using jetalg::JetPoly;

struct SamplingOptions {
  /// Corner coordinates are sampled on [0, x_max].
  double x_max = 1.5;
  /// Window for internal coordinates y and free parameters q.
  double lo = -1.5;
  double hi = 1.5;
  int curve_grid = 400;
  int surface_grid = 120;
  double tol_eq = 1e-9;
  double bisect_tol = 1e-10;
};

enum class MarkerKind { Cusp, Boundary };

struct Marker {
  MarkerKind kind = MarkerKind::Cusp;
  int vertex = -1;
};

/// One front W_{sigma,t}: vertices in (q1, z) or (q1, q2, z).
struct FrontSheet {
  /// Corner indices (1-based) set to zero.
  std::vector<int> sigma;
  double t = 0.0;
  int ambient_dim = 0;
  std::vector<std::vector<double>> vertices;
  /// Sheet parameters of each vertex, named by `param_names`.
  std::vector<std::vector<double>> params;
  std::vector<std::string> param_names;
  /// Full criminant point (x, y, t, q, z) of each vertex.
  std::vector<std::vector<double>> sources;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Marker> markers;
  std::vector<std::string> diagnostics;
  /// Vertices [0, grid_vertices) come from the sampling grid; later ones are
  /// refined singular points.
  std::size_t grid_vertices = 0;

  std::size_t count(MarkerKind kind) const;
  nlohmann::json to_json() const;
};

struct BifurcationSeries {
  std::string label;
  std::vector<double> t_values;
  /// Ordered by t, then sigma (empty set first).
  std::vector<FrontSheet> sheets;
  int ambient_dim = 0;

  const FrontSheet& sheet(const std::vector<int>& sigma, double t) const;
};

/// Samples W_{sigma,t} for a generating family F(x, y, t, q, z) with one t
/// and n = 1 or 2 parameters q. Unknowns are chosen by rank among z, the
/// q's, then y and x; the rest are sheet parameters. Systems affine in the
/// unknowns are solved exactly per sample, others by damped Newton
/// continuation along the grid.
FrontSheet criminant_solve(const JetPoly& F, const std::vector<int>& sigma, double t,
                           const SamplingOptions& sampling = {});

/// Re-detects cusp and boundary markers of a sheet built by criminant_solve.
void detect_singular_points(const JetPoly& F, FrontSheet& sheet, const SamplingOptions& sampling = {});

/// Every subset of {1..r} in increasing size, then lexicographic.
std::vector<std::vector<int>> corner_subsets(int r);

BifurcationSeries bifurcation_series(const catalog::NormalFormEntry& entry, const std::vector<double>& t_values,
                                     const SamplingOptions& sampling = {}, unsigned threads = 0);
BifurcationSeries bifurcation_series(const std::string& label, const std::vector<int>& signs, int variant,
                                     const std::vector<double>& t_values, const SamplingOptions& sampling = {},
                                     unsigned threads = 0);

enum class Format { SVG, OBJ, JSON };

Format parse_format(const std::string& name);

/// Writes one file per (sigma, t) plus one overlay per t. Returns the paths
/// written in order. Throws PreconditionError on format/dimension mismatch.
std::vector<std::filesystem::path> export_geometry(const BifurcationSeries& series, Format format,
                                                   const std::filesystem::path& out_dir);

/// Deterministic renderings used by export_geometry.
std::string render_svg(const std::vector<const FrontSheet*>& sheets, const std::string& title);
std::string render_obj(const std::vector<const FrontSheet*>& sheets, const std::string& title);
std::string render_json(const std::vector<const FrontSheet*>& sheets);

std::string sigma_tag(const std::vector<int>& sigma);
std::string number_tag(double v);

}  // namespace retfront::wavefront

#endif  // RETFRONT_WAVEFRONT_WAVEFRONT_HPP
