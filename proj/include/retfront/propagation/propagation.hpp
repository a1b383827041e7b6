#ifndef RETFRONT_PROPAGATION_PROPAGATION_HPP
#define RETFRONT_PROPAGATION_PROPAGATION_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "retfront/wavefront/wavefront.hpp"

namespace retfront::propagation {

inline constexpr int kMaxDim = 4;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Riemannian metric on R^d. H(q, p) = sqrt(p^T g(q)^{-1} p).
struct MetricSpec {
  std::string name;
  int dim = 0;
  std::function<Mat(const Vec&)> g;
  /// Optional closed-form inverse; computed by Cholesky when empty.
  std::function<Mat(const Vec&)> g_inv;

  static MetricSpec euclidean(int dim);
  static MetricSpec diagonal(const std::vector<double>& entries);
  /// g = (1 + c |q|^2) I.
  static MetricSpec radial(int dim, double c);
  /// "euclidean", "diag:1,4", "radial:0.5".
  static MetricSpec parse(const std::string& text, int dim);

  Mat inverse(const Vec& q) const;
  double hamiltonian(const Vec& q, const Vec& p) const;
  /// Cholesky success and H(q, 2p) = 2 H(q, p) at the points; throws
  /// PreconditionError otherwise.
  void check(const std::vector<Vec>& points) const;
};

/// Sampled immersion of H^r x R^k into R^d (d = r + k + 1) on a parameter
/// grid; corner axes come first and start at 0.
struct InitialFront {
  std::string name;
  int dim = 0;
  int r = 0;
  int k = 0;
  std::vector<int> shape;
  /// The last axis closes up (circle).
  bool periodic_last = false;
  std::vector<std::vector<double>> params;
  std::vector<Vec> points;
  /// dim x (r + k) derivative of the immersion at each sample.
  std::vector<Mat> jacobians;

  using Immersion = std::function<Vec(const std::vector<double>&)>;
  static InitialFront from_function(std::string name, int dim, int r, int k,
                                    const std::vector<std::pair<double, double>>& ranges,
                                    const std::vector<int>& shape, const Immersion& fn, bool periodic_last = false);
  /// {"dim", "r", "k", "shape", "ranges", "points", optional "periodic"};
  /// tangents come from grid differences.
  static InitialFront from_json(const nlohmann::json& j);
  std::size_t index(const std::vector<int>& multi) const;
};

/// segment, segment-endpoint, arc, circle, parabola, plane, corner-wedge.
InitialFront builtin_shape(const std::string& name, int samples = 101);
std::vector<std::string> builtin_shape_names();

struct Ray {
  std::vector<double> times;
  std::vector<Vec> q;
  std::vector<Vec> p;
  bool truncated = false;
  double max_drift = 0.0;
};

/// Rays of one sigma-edge: ray index = edge sample * branches + branch, edge
/// samples in row-major grid order.
struct EdgeRays {
  std::vector<int> sigma;
  std::vector<int> edge_shape;
  bool edge_periodic_last = false;
  /// 2 for codim 1 (+-), else the sphere sample grid.
  std::vector<int> branch_shape;
  int codim = 1;
  std::vector<std::vector<double>> edge_params;
  std::vector<Ray> rays;
};

struct RayBundle {
  int dim = 0;
  MetricSpec metric;
  std::vector<EdgeRays> edges;
  std::vector<std::string> log;

  std::size_t ray_count() const;
};

/// Unit-H conormal covectors of the sigma-edge at each of its samples.
/// rays_per_point sets the sphere sampling for codim >= 2 edges.
RayBundle conormal_lift(const InitialFront& front, const std::vector<int>& sigma, const MetricSpec& metric,
                        int rays_per_point = 32);
/// All edges sigma of the corner, empty sigma first.
RayBundle conormal_lift_all(const InitialFront& front, const MetricSpec& metric, int rays_per_point = 32);

/// Integrates every ray from its last state over signed time t_final with
/// RK4 at nominal step dt, halving steps while |H - H_0| > drift_tol.
RayBundle flow(RayBundle bundle, double t_final, double dt, double drift_tol = 5e-9, unsigned threads = 0);

/// Ray state at time t by cubic Hermite interpolation of the recorded steps.
bool state_at(const Ray& ray, const MetricSpec& metric, double t, Vec& q, Vec& p);

/// Positions at time t, one FrontSheet per edge, connected along the edge
/// grid and the conormal sphere grid.
std::vector<wavefront::FrontSheet> project_front(const RayBundle& bundle, double t);

/// Sheets for several times as a series, ready for wavefront::export_geometry.
wavefront::BifurcationSeries project_series(const RayBundle& bundle, const std::string& label,
                                            const std::vector<double>& t_values);

/// A family of contact maps C_t of J^1(R^n, R).
struct ContactFamily {
  std::string name;
  int n = 1;
  struct Image {
    Eigen::VectorXd q;
    double z;
    Eigen::VectorXd p;
  };
  std::function<Image(double t, const Eigen::VectorXd& q, double z, const Eigen::VectorXd& p)> map;
  /// Conformal factor; recovered as dz_t/dz - p_t dq_t/dz when empty.
  std::function<double(double t, const Eigen::VectorXd& q, double z, const Eigen::VectorXd& p)> alpha;

  /// identity, translation, scaling, offset, noncontact.
  static ContactFamily example(const std::string& name, int n = 1);
};

struct JetPoint {
  double t = 0.0;
  Eigen::VectorXd q;
  double z = 0.0;
  double s = 0.0;
  Eigen::VectorXd p;
};

struct LiftReport {
  double max_residual = 0.0;
  std::vector<double> h;
  std::vector<double> alpha;

  nlohmann::json to_json() const;
};

/// Builds h(t,q,z,s,p) = dz_t/dt - p_t dq_t/dt + alpha s by central
/// differences and checks C^*(dz - p dq - s dt) = alpha (dz - p dq - s dt).
LiftReport verify_big_jet_lift(const ContactFamily& family, const std::vector<JetPoint>& points,
                               double step = 1e-5);

/// Deterministic sample points in [-0.5, 0.5]^(2n+3).
std::vector<JetPoint> sample_jet_points(int n, int count, unsigned seed = 7);

}  // namespace retfront::propagation

#endif  // RETFRONT_PROPAGATION_PROPAGATION_HPP
