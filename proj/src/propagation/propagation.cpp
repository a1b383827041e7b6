#include "retfront/propagation/propagation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "retfront/catalog/catalog.hpp"
#include "retfront/errors.hpp"

namespace retfront::propagation {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw PreconditionError("bad number '" + item + "' in metric specification");
    }
  }
  return out;
}

struct Derivative {
  Vec dq;
  Vec dp;
};

Derivative vector_field(const MetricSpec& metric, const Vec& q, const Vec& p) {
  const Mat ginv = metric.inverse(q);
  const double H = std::sqrt(p.dot(ginv * p));
  Derivative d{ginv * p / H, Vec::Zero(q.size())};
  for (int i = 0; i < q.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(q(i)));
    Vec a = q, b = q;
    a(i) += h;
    b(i) -= h;
    d.dp(i) = -(metric.hamiltonian(a, p) - metric.hamiltonian(b, p)) / (2 * h);
  }
  return d;
}

void rk4(const MetricSpec& metric, Vec& q, Vec& p, double h) {
  const auto k1 = vector_field(metric, q, p);
  const auto k2 = vector_field(metric, q + 0.5 * h * k1.dq, p + 0.5 * h * k1.dp);
  const auto k3 = vector_field(metric, q + 0.5 * h * k2.dq, p + 0.5 * h * k2.dp);
  const auto k4 = vector_field(metric, q + h * k3.dq, p + h * k3.dp);
  q += h / 6 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
  p += h / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
}

/// One nominal step, split in halves while the H drift exceeds tol.
void advance(const MetricSpec& metric, Vec& q, Vec& p, double h, double H0, double tol, int depth) {
  Vec q1 = q, p1 = p;
  rk4(metric, q1, p1, h);
  if (depth < 12 && !(std::abs(metric.hamiltonian(q1, p1) - H0) <= tol)) {
    advance(metric, q, p, h / 2, H0, tol, depth + 1);
    advance(metric, q, p, h / 2, H0, tol, depth + 1);
    return;
  }
  q = q1;
  p = p1;
}

/// Covectors spanning the annihilator of `tangent`, orthonormal for g^{-1}.
std::vector<Vec> annihilator(const Mat& tangent, const Mat& g, const Mat& ginv) {
  const int d = static_cast<int>(g.rows());
  auto dot = [&](const Vec& a, const Vec& b) { return a.dot(ginv * b); };
  // g * v spans the g^{-1}-orthogonal complement of the annihilator.
  std::vector<Vec> complement;
  for (int c = 0; c < tangent.cols(); ++c) {
    Vec w = g * tangent.col(c);
    for (const auto& u : complement) w -= dot(u, w) * u;
    w /= std::sqrt(dot(w, w));
    complement.push_back(w);
  }
  std::vector<Vec> basis;
  for (int i = 0; i < d && static_cast<int>(basis.size()) < d - tangent.cols(); ++i) {
    Vec w = Vec::Unit(d, i);
    for (const auto& u : complement) w -= dot(u, w) * u;
    for (const auto& u : basis) w -= dot(u, w) * u;
    double n = std::sqrt(dot(w, w));
    if (n < 1e-8) continue;
    basis.push_back(w / n);
  }
  return basis;
}

/// Conormal of a hypersurface from the cofactors of its Jacobian; varies
/// continuously along the front.
Vec cofactor_normal(const Mat& J) {
  const int d = static_cast<int>(J.rows());
  Vec n(d);
  for (int i = 0; i < d; ++i) {
    Mat minor(d - 1, d - 1);
    for (int r = 0, rr = 0; r < d; ++r) {
      if (r == i) continue;
      minor.row(rr++) = J.row(r);
    }
    n(i) = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  return n;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

/// Row-major iteration over a grid shape.
bool next_index(std::vector<int>& idx, const std::vector<int>& shape) {
  for (int a = static_cast<int>(shape.size()) - 1; a >= 0; --a) {
    if (++idx[a] < shape[a]) return true;
    idx[a] = 0;
  }
  return false;
}

std::size_t flat(const std::vector<int>& idx, const std::vector<int>& shape) {
  std::size_t f = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) f = f * shape[a] + idx[a];
  return f;
}

std::size_t product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

}  // namespace

MetricSpec MetricSpec::euclidean(int dim) {
  MetricSpec m;
  m.name = "euclidean";
  m.dim = dim;
  m.g = [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); };
  m.g_inv = m.g;
  return m;
}

MetricSpec MetricSpec::diagonal(const std::vector<double>& entries) {
  const int dim = static_cast<int>(entries.size());
  for (double e : entries)
    if (!(e > 0)) throw PreconditionError("diagonal metric entries must be positive");
  MetricSpec m;
  m.name = "diag";
  m.dim = dim;
  m.g = [entries, dim](const Vec&) -> Mat {
    Mat g = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) g(i, i) = entries[i];
    return g;
  };
  m.g_inv = [entries, dim](const Vec&) -> Mat {
    Mat g = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) g(i, i) = 1.0 / entries[i];
    return g;
  };
  return m;
}

MetricSpec MetricSpec::radial(int dim, double c) {
  if (c < 0) throw PreconditionError("radial metric needs c >= 0");
  MetricSpec m;
  m.name = "radial";
  m.dim = dim;
  m.g = [dim, c](const Vec& q) -> Mat { return (1.0 + c * q.squaredNorm()) * Mat::Identity(dim, dim); };
  m.g_inv = [dim, c](const Vec& q) -> Mat { return Mat::Identity(dim, dim) / (1.0 + c * q.squaredNorm()); };
  return m;
}

MetricSpec MetricSpec::parse(const std::string& text, int dim) {
  if (text == "euclidean") return euclidean(dim);
  if (text.rfind("diag:", 0) == 0) {
    auto v = split_numbers(text.substr(5));
    if (static_cast<int>(v.size()) != dim)
      throw PreconditionError("diag metric needs " + std::to_string(dim) + " entries");
    return diagonal(v);
  }
  if (text.rfind("radial:", 0) == 0) {
    auto v = split_numbers(text.substr(7));
    if (v.size() != 1) throw PreconditionError("radial metric needs one coefficient");
    return radial(dim, v[0]);
  }
  throw PreconditionError("unknown metric '" + text + "' (euclidean, diag:a,b,..., radial:c)");
}

Mat MetricSpec::inverse(const Vec& q) const {
  if (g_inv) return g_inv(q);
  const Mat gq = g(q);
  return gq.llt().solve(Mat::Identity(dim, dim));
}

double MetricSpec::hamiltonian(const Vec& q, const Vec& p) const { return std::sqrt(p.dot(inverse(q) * p)); }

void MetricSpec::check(const std::vector<Vec>& points) const {
  for (const auto& q : points) {
    const Mat gq = g(q);
    if ((gq - gq.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, gq.cwiseAbs().maxCoeff()))
      throw PreconditionError("metric '" + name + "' is not symmetric");
    if (gq.llt().info() != Eigen::Success) throw PreconditionError("metric '" + name + "' is not positive definite");
    Vec p = Vec::LinSpaced(dim, 1.0, 0.5);
    if (std::abs(hamiltonian(q, 2 * p) - 2 * hamiltonian(q, p)) > 1e-10)
      throw PreconditionError("Hamiltonian of metric '" + name + "' is not homogeneous");
  }
}

InitialFront InitialFront::from_function(std::string name, int dim, int r, int k,
                                         const std::vector<std::pair<double, double>>& ranges,
                                         const std::vector<int>& shape, const Immersion& fn, bool periodic_last) {
  if (dim < 2 || dim > 3) throw PreconditionError("initial fronts live in R^2 or R^3");
  if (r < 0 || k < 0 || r + k + 1 != dim) throw PreconditionError("initial front needs r + k + 1 = dim");
  if (static_cast<int>(ranges.size()) != r + k || static_cast<int>(shape.size()) != r + k)
    throw PreconditionError("one range and one sample count per parameter axis");
  for (int a = 0; a < r; ++a)
    if (ranges[a].first != 0.0 || !(ranges[a].second > 0.0))
      throw PreconditionError("corner axes must range over [0, b] with b > 0");
  for (int s : shape)
    if (s < 2) throw PreconditionError("at least 2 samples per axis");
  if (periodic_last && k == 0) throw PreconditionError("only an internal axis can be periodic");
  InitialFront f;
  f.name = std::move(name);
  f.dim = dim;
  f.r = r;
  f.k = k;
  f.shape = shape;
  f.periodic_last = periodic_last;
  std::vector<int> idx(shape.size(), 0);
  do {
    std::vector<double> u(shape.size());
    for (std::size_t a = 0; a < shape.size(); ++a)
      u[a] = ranges[a].first + (ranges[a].second - ranges[a].first) * idx[a] / (shape[a] - 1);
    Vec x = fn(u);
    if (x.size() != dim) throw PreconditionError("immersion returned a point of the wrong dimension");
    Mat J(dim, static_cast<int>(shape.size()));
    for (std::size_t a = 0; a < shape.size(); ++a) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[a]));
      auto up = u, dn = u;
      up[a] += h;
      dn[a] -= h;
      J.col(static_cast<int>(a)) = (fn(up) - fn(dn)) / (2 * h);
    }
    f.params.push_back(u);
    f.points.push_back(x);
    f.jacobians.push_back(J);
  } while (next_index(idx, shape));
  return f;
}

InitialFront InitialFront::from_json(const nlohmann::json& j) {
  try {
    InitialFront f;
    f.name = j.value("name", std::string("json"));
    f.dim = j.at("dim").get<int>();
    f.r = j.at("r").get<int>();
    f.k = j.at("k").get<int>();
    f.shape = j.at("shape").get<std::vector<int>>();
    f.periodic_last = j.value("periodic", false);
    auto ranges = j.at("ranges").get<std::vector<std::pair<double, double>>>();
    auto pts = j.at("points").get<std::vector<std::vector<double>>>();
    if (f.dim < 2 || f.dim > 3 || f.r < 0 || f.k < 0 || f.r + f.k + 1 != f.dim)
      throw PreconditionError("initial front needs dim in {2,3} and r + k + 1 = dim");
    if (static_cast<int>(f.shape.size()) != f.r + f.k || ranges.size() != f.shape.size())
      throw PreconditionError("one range and one sample count per parameter axis");
    for (int a = 0; a < f.r; ++a)
      if (ranges[a].first != 0.0) throw PreconditionError("corner axes must start at 0");
    for (int s : f.shape)
      if (s < 2) throw PreconditionError("at least 2 samples per axis");
    if (pts.size() != product(f.shape)) throw PreconditionError("points do not match the grid shape");
    for (const auto& p : pts) {
      if (static_cast<int>(p.size()) != f.dim) throw PreconditionError("point of the wrong dimension");
      f.points.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), f.dim));
    }
    std::vector<int> idx(f.shape.size(), 0);
    do {
      std::vector<double> u(f.shape.size());
      Mat J(f.dim, static_cast<int>(f.shape.size()));
      for (std::size_t a = 0; a < f.shape.size(); ++a) {
        const double step = (ranges[a].second - ranges[a].first) / (f.shape[a] - 1);
        u[a] = ranges[a].first + step * idx[a];
        const bool wrap = f.periodic_last && a + 1 == f.shape.size();
        auto up = idx, dn = idx;
        double span = 2 * step;
        if (idx[a] + 1 < f.shape[a]) ++up[a];
        else if (wrap) up[a] = 0;
        else span = step;
        if (idx[a] > 0) --dn[a];
        else if (wrap) dn[a] = f.shape[a] - 1;
        else span = step;
        J.col(static_cast<int>(a)) = (f.points[flat(up, f.shape)] - f.points[flat(dn, f.shape)]) / span;
      }
      f.params.push_back(u);
      f.jacobians.push_back(J);
    } while (next_index(idx, f.shape));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("bad initial front JSON: ") + e.what());
  }
}

std::size_t InitialFront::index(const std::vector<int>& multi) const { return flat(multi, shape); }

std::vector<std::string> builtin_shape_names() {
  return {"segment", "segment-endpoint", "arc", "circle", "parabola", "plane", "corner-wedge"};
}

InitialFront builtin_shape(const std::string& name, int samples) {
  if (samples < 3) throw PreconditionError("at least 3 samples");
  const int surface = std::max(5, samples / 4);
  auto v2 = [](double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
  };
  auto v3 = [](double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
  };
  if (name == "segment")
    return InitialFront::from_function(name, 2, 0, 1, {{-1.0, 1.0}}, {samples},
                                       [&](const std::vector<double>& u) { return v2(u[0], 0.0); });
  if (name == "segment-endpoint")
    return InitialFront::from_function(name, 2, 1, 0, {{0.0, 1.0}}, {samples},
                                       [&](const std::vector<double>& u) { return v2(u[0], 0.0); });
  if (name == "arc")
    return InitialFront::from_function(name, 2, 0, 1, {{-kPi / 2, kPi / 2}}, {samples}, [&](const std::vector<double>& u) {
      return v2(std::cos(u[0]), std::sin(u[0]));
    });
  if (name == "circle")
    return InitialFront::from_function(
        name, 2, 0, 1, {{0.0, 2 * kPi * (samples - 1) / samples}}, {samples},
        [&](const std::vector<double>& u) { return v2(std::cos(u[0]), std::sin(u[0])); }, true);
  if (name == "parabola")
    return InitialFront::from_function(name, 2, 0, 1, {{-1.5, 1.5}}, {samples},
                                       [&](const std::vector<double>& u) { return v2(u[0], 0.5 * u[0] * u[0]); });
  if (name == "plane")
    return InitialFront::from_function(name, 3, 0, 2, {{-1.0, 1.0}, {-1.0, 1.0}}, {surface, surface},
                                       [&](const std::vector<double>& u) { return v3(u[0], u[1], 0.0); });
  if (name == "corner-wedge")
    return InitialFront::from_function(name, 3, 2, 0, {{0.0, 1.0}, {0.0, 1.0}}, {surface, surface},
                                       [&](const std::vector<double>& u) { return v3(u[0], u[1], 0.2 * u[0] * u[1]); });
  throw PreconditionError("unknown shape '" + name + "'");
}

std::size_t RayBundle::ray_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.rays.size();
  return n;
}

RayBundle conormal_lift(const InitialFront& front, const std::vector<int>& sigma, const MetricSpec& metric,
                        int rays_per_point) {
  if (metric.dim != front.dim) throw PreconditionError("metric and front dimensions differ");
  std::vector<bool> in_sigma(front.shape.size(), false);
  for (int s : sigma) {
    if (s < 1 || s > front.r || in_sigma[s - 1]) throw PreconditionError("sigma must be a subset of {1..r}");
    in_sigma[s - 1] = true;
  }
  metric.check(front.points);
  RayBundle bundle;
  bundle.dim = front.dim;
  bundle.metric = metric;
  EdgeRays edge;
  edge.sigma = sigma;
  std::sort(edge.sigma.begin(), edge.sigma.end());
  std::vector<int> free_axes;
  for (std::size_t a = 0; a < front.shape.size(); ++a)
    if (!in_sigma[a]) {
      free_axes.push_back(static_cast<int>(a));
      edge.edge_shape.push_back(front.shape[a]);
    }
  edge.edge_periodic_last = front.periodic_last && !free_axes.empty() &&
                            free_axes.back() + 1 == static_cast<int>(front.shape.size());
  edge.codim = front.dim - static_cast<int>(free_axes.size());
  if (edge.codim == 1) {
    edge.branch_shape = {2};
  } else if (edge.codim == 2) {
    if (rays_per_point < 3) throw PreconditionError("rays_per_point must be at least 3");
    edge.branch_shape = {rays_per_point};
  } else {
    if (rays_per_point < 4) throw PreconditionError("rays_per_point must be at least 4");
    edge.branch_shape = {std::max(2, rays_per_point / 2), rays_per_point};
  }

  std::vector<int> idx(edge.edge_shape.size(), 0);
  do {
    std::vector<int> full(front.shape.size(), 0);
    for (std::size_t a = 0; a < free_axes.size(); ++a) full[free_axes[a]] = idx[a];
    const std::size_t s = front.index(full);
    const Vec& q = front.points[s];
    Mat T(front.dim, static_cast<int>(free_axes.size()));
    for (std::size_t a = 0; a < free_axes.size(); ++a) T.col(static_cast<int>(a)) = front.jacobians[s].col(free_axes[a]);
    if (!free_axes.empty()) {
      Eigen::FullPivLU<Mat> lu(T);
      lu.setThreshold(1e-9);
      if (lu.rank() < static_cast<int>(free_axes.size()))
        throw PreconditionError("edge " + wavefront::sigma_tag(edge.sigma) + " is not immersed at sample " +
                                std::to_string(s));
    }
    std::vector<double> ep;
    for (int a : free_axes) ep.push_back(front.params[s][a]);
    edge.edge_params.push_back(ep);
    auto push = [&](const Vec& p) {
      Ray ray;
      ray.times = {0.0};
      ray.q = {q};
      ray.p = {p / metric.hamiltonian(q, p)};
      edge.rays.push_back(std::move(ray));
    };
    if (edge.codim == 1) {
      Vec n = cofactor_normal(T);
      push(n);
      push(-n);
    } else {
      const auto basis = annihilator(T, metric.g(q), metric.inverse(q));
      if (static_cast<int>(basis.size()) != edge.codim)
        throw PreconditionError("conormal space of edge " + wavefront::sigma_tag(edge.sigma) + " is degenerate");
      if (edge.codim == 2) {
        for (int j = 0; j < rays_per_point; ++j) {
          const double phi = 2 * kPi * j / rays_per_point;
          push(std::cos(phi) * basis[0] + std::sin(phi) * basis[1]);
        }
      } else if (edge.codim == 3) {
        const int n_lat = edge.branch_shape[0], n_lon = edge.branch_shape[1];
        for (int i = 0; i < n_lat; ++i) {
          const double theta = kPi * (i + 0.5) / n_lat;
          for (int j = 0; j < n_lon; ++j) {
            const double phi = 2 * kPi * j / n_lon;
            push(std::cos(theta) * basis[2] +
                 std::sin(theta) * (std::cos(phi) * basis[0] + std::sin(phi) * basis[1]));
          }
        }
      } else {
        throw PreconditionError("edges of codimension above 3 are not supported");
      }
    }
  } while (!idx.empty() && next_index(idx, edge.edge_shape));
  bundle.edges.push_back(std::move(edge));
  return bundle;
}

RayBundle conormal_lift_all(const InitialFront& front, const MetricSpec& metric, int rays_per_point) {
  RayBundle all;
  for (const auto& sigma : wavefront::corner_subsets(front.r)) {
    RayBundle one = conormal_lift(front, sigma, metric, rays_per_point);
    if (all.edges.empty()) {
      all.dim = one.dim;
      all.metric = one.metric;
    }
    all.edges.push_back(std::move(one.edges.front()));
  }
  return all;
}

RayBundle flow(RayBundle bundle, double t_final, double dt, double drift_tol, unsigned threads) {
  if (!(dt > 0)) throw PreconditionError("dt must be positive");
  if (!std::isfinite(t_final)) throw PreconditionError("t_final must be finite");
  std::vector<Ray*> rays;
  for (auto& e : bundle.edges)
    for (auto& r : e.rays) rays.push_back(&r);
  const long steps = static_cast<long>(std::ceil(std::abs(t_final) / dt - 1e-9));
  const MetricSpec& metric = bundle.metric;
  std::vector<std::string> logs(rays.size());
  auto run = [&](std::size_t i) {
    Ray& ray = *rays[i];
    if (ray.truncated || steps == 0) return;
    Vec q = ray.q.back(), p = ray.p.back();
    const double t0 = ray.times.back();
    const double H0 = metric.hamiltonian(ray.q.front(), ray.p.front());
    for (long s = 1; s <= steps; ++s) {
      const double target = s == steps ? t_final : std::copysign(s * dt, t_final);
      const double h = t0 + target - ray.times.back();
      advance(metric, q, p, h, H0, drift_tol, 0);
      if (!q.allFinite() || !p.allFinite()) {
        ray.truncated = true;
        logs[i] = "ray " + std::to_string(i) + " truncated at t = " + std::to_string(ray.times.back());
        return;
      }
      ray.max_drift = std::max(ray.max_drift, std::abs(metric.hamiltonian(q, p) - H0));
      ray.times.push_back(t0 + target);
      ray.q.push_back(q);
      ray.p.push_back(p);
    }
  };
  if (threads == 0) threads = catalog::worker_count();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, rays.size()))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rays.size(); i = next++) run(i);
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& l : logs)
    if (!l.empty()) bundle.log.push_back(std::move(l));
  return bundle;
}

bool state_at(const Ray& ray, const MetricSpec& metric, double t, Vec& q, Vec& p) {
  for (std::size_t i = 0; i < ray.times.size(); ++i) {
    if (ray.times[i] == t) {
      q = ray.q[i];
      p = ray.p[i];
      return true;
    }
  }
  for (std::size_t i = 0; i + 1 < ray.times.size(); ++i) {
    const double a = ray.times[i], b = ray.times[i + 1];
    if (!((a < t && t < b) || (b < t && t < a))) continue;
    const double h = b - a, s = (t - a) / h;
    const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
    const auto da = vector_field(metric, ray.q[i], ray.p[i]);
    const auto db = vector_field(metric, ray.q[i + 1], ray.p[i + 1]);
    q = h00 * ray.q[i] + h10 * h * da.dq + h01 * ray.q[i + 1] + h11 * h * db.dq;
    p = h00 * ray.p[i] + h10 * h * da.dp + h01 * ray.p[i + 1] + h11 * h * db.dp;
    return true;
  }
  return false;
}

std::vector<wavefront::FrontSheet> project_front(const RayBundle& bundle, double t) {
  std::vector<wavefront::FrontSheet> out;
  for (const auto& edge : bundle.edges) {
    wavefront::FrontSheet sheet;
    sheet.sigma = edge.sigma;
    sheet.t = t;
    sheet.ambient_dim = bundle.dim;
    for (std::size_t a = 0; a < edge.edge_shape.size(); ++a) sheet.param_names.push_back("s" + std::to_string(a + 1));
    if (edge.codim == 1) sheet.param_names.push_back("sign");
    if (edge.codim == 3) sheet.param_names.push_back("theta");
    if (edge.codim >= 2) sheet.param_names.push_back("phi");

    struct Axis {
      int size;
      bool cyclic;
      bool connected;
    };
    std::vector<Axis> axes;
    for (std::size_t a = 0; a < edge.edge_shape.size(); ++a)
      axes.push_back({edge.edge_shape[a], edge.edge_periodic_last && a + 1 == edge.edge_shape.size(), true});
    if (edge.codim == 1) axes.push_back({2, false, false});
    if (edge.codim == 2) axes.push_back({edge.branch_shape[0], true, true});
    if (edge.codim == 3) {
      axes.push_back({edge.branch_shape[0], false, true});
      axes.push_back({edge.branch_shape[1], true, true});
    }
    std::vector<int> shape;
    std::vector<int> connected;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      shape.push_back(axes[a].size);
      if (axes[a].connected) connected.push_back(static_cast<int>(a));
    }
    if (connected.size() > 2) throw PreconditionError("fronts of dimension above 2 cannot be meshed");

    const int branches = static_cast<int>(product(edge.branch_shape));
    std::vector<int> vertex(edge.rays.size(), -1);
    for (std::size_t i = 0; i < edge.rays.size(); ++i) {
      Vec q, p;
      if (!state_at(edge.rays[i], bundle.metric, t, q, p)) continue;
      vertex[i] = static_cast<int>(sheet.vertices.size());
      sheet.vertices.push_back(to_std(q));
      std::vector<double> params = edge.edge_params[i / branches];
      const int b = static_cast<int>(i % branches);
      if (edge.codim == 1) params.push_back(b == 0 ? 1.0 : -1.0);
      if (edge.codim == 2) params.push_back(2 * kPi * b / edge.branch_shape[0]);
      if (edge.codim == 3) {
        params.push_back(kPi * (b / edge.branch_shape[1] + 0.5) / edge.branch_shape[0]);
        params.push_back(2 * kPi * (b % edge.branch_shape[1]) / edge.branch_shape[1]);
      }
      sheet.params.push_back(params);
      sheet.sources.push_back(to_std(p));
    }
    sheet.grid_vertices = sheet.vertices.size();
    const std::size_t missing = static_cast<std::size_t>(std::count(vertex.begin(), vertex.end(), -1));
    if (missing > 0) sheet.diagnostics.push_back(std::to_string(missing) + " rays do not reach t");

    auto step = [&](std::vector<int> idx, int axis) -> std::optional<std::vector<int>> {
      if (idx[axis] + 1 < axes[axis].size) {
        ++idx[axis];
        return idx;
      }
      if (axes[axis].cyclic && axes[axis].size > 2) {
        idx[axis] = 0;
        return idx;
      }
      return std::nullopt;
    };
    auto at = [&](const std::vector<int>& idx) { return vertex[flat(idx, shape)]; };
    std::vector<int> idx(shape.size(), 0);
    do {
      if (connected.size() == 1) {
        auto nb = step(idx, connected[0]);
        if (nb && at(idx) >= 0 && at(*nb) >= 0) sheet.edges.push_back({at(idx), at(*nb)});
      } else if (connected.size() == 2) {
        auto b = step(idx, connected[1]);
        auto d = step(idx, connected[0]);
        if (!b || !d) continue;
        auto c = step(*b, connected[0]);
        int va = at(idx), vb = at(*b), vc = at(*c), vd = at(*d);
        if (va >= 0 && vb >= 0 && vc >= 0) sheet.triangles.push_back({va, vb, vc});
        if (va >= 0 && vc >= 0 && vd >= 0) sheet.triangles.push_back({va, vc, vd});
      }
    } while (next_index(idx, shape));
    out.push_back(std::move(sheet));
  }
  return out;
}

wavefront::BifurcationSeries project_series(const RayBundle& bundle, const std::string& label,
                                            const std::vector<double>& t_values) {
  for (std::size_t i = 1; i < t_values.size(); ++i)
    if (!(t_values[i - 1] < t_values[i])) throw PreconditionError("t values must be strictly increasing");
  wavefront::BifurcationSeries series;
  series.label = label;
  series.t_values = t_values;
  series.ambient_dim = bundle.dim;
  for (double t : t_values)
    for (auto& s : project_front(bundle, t)) series.sheets.push_back(std::move(s));
  return series;
}

ContactFamily ContactFamily::example(const std::string& name, int n) {
  if (n < 1) throw PreconditionError("n must be positive");
  using V = Eigen::VectorXd;
  ContactFamily f;
  f.name = name;
  f.n = n;
  auto one = [](double, const V&, double, const V&) { return 1.0; };
  if (name == "identity") {
    f.map = [](double, const V& q, double z, const V& p) { return Image{q, z, p}; };
    f.alpha = one;
  } else if (name == "translation") {
    V v(n);
    for (int i = 0; i < n; ++i) v(i) = 0.5 / (i + 1);
    f.map = [v](double t, const V& q, double z, const V& p) { return Image{q + t * v, z + 0.25 * t, p}; };
    f.alpha = one;
  } else if (name == "scaling") {
    f.map = [](double t, const V& q, double z, const V& p) { return Image{q, std::exp(t) * z, std::exp(t) * p}; };
    f.alpha = [](double t, const V&, double, const V&) { return std::exp(t); };
  } else if (name == "offset") {
    // Unit-speed normal motion of graph fronts z = f(q).
    f.map = [](double t, const V& q, double z, const V& p) {
      const double w = std::sqrt(1.0 + p.squaredNorm());
      return Image{q - t * p / w, z + t / w, p};
    };
  } else if (name == "noncontact") {
    f.map = [](double t, const V& q, double z, const V& p) { return Image{q, z, p + V::Constant(p.size(), t)}; };
  } else {
    throw PreconditionError("unknown contact family '" + name +
                            "' (identity, translation, scaling, offset, noncontact)");
  }
  return f;
}

nlohmann::json LiftReport::to_json() const {
  return {{"max_residual", max_residual}, {"h", h}, {"alpha", alpha}};
}

LiftReport verify_big_jet_lift(const ContactFamily& family, const std::vector<JetPoint>& points, double step) {
  using V = Eigen::VectorXd;
  const int n = family.n;
  LiftReport report;
  for (const auto& w : points) {
    if (w.q.size() != n || w.p.size() != n) throw PreconditionError("jet point dimension differs from the family");
    const auto C = family.map(w.t, w.q, w.z, w.p);
    const auto tp = family.map(w.t + step, w.q, w.z, w.p);
    const auto tm = family.map(w.t - step, w.q, w.z, w.p);
    const V dQdt = (tp.q - tm.q) / (2 * step);
    const double dZdt = (tp.z - tm.z) / (2 * step);

    // Derivatives in (q, z, p), variables ordered q_1..q_n, z, p_1..p_n.
    std::vector<V> dQ;
    std::vector<double> dZ;
    for (int j = 0; j < 2 * n + 1; ++j) {
      V q1 = w.q, q2 = w.q, p1 = w.p, p2 = w.p;
      double z1 = w.z, z2 = w.z;
      if (j < n) {
        q1(j) += step;
        q2(j) -= step;
      } else if (j == n) {
        z1 += step;
        z2 -= step;
      } else {
        p1(j - n - 1) += step;
        p2(j - n - 1) -= step;
      }
      const auto a = family.map(w.t, q1, z1, p1);
      const auto b = family.map(w.t, q2, z2, p2);
      dQ.push_back((a.q - b.q) / (2 * step));
      dZ.push_back((a.z - b.z) / (2 * step));
    }
    const double alpha = family.alpha ? family.alpha(w.t, w.q, w.z, w.p) : dZ[n] - C.p.dot(dQ[n]);
    const double h = dZdt - C.p.dot(dQdt) + alpha * w.s;
    report.h.push_back(h);
    report.alpha.push_back(alpha);

    // Pullback of dZ - P dQ - S dT against alpha (dz - p dq - s dt); the dt
    // component holds by the choice of h.
    double residual = 0.0;
    for (int j = 0; j < 2 * n + 1; ++j) {
      const double pulled = dZ[j] - C.p.dot(dQ[j]);
      const double target = j < n ? -alpha * w.p(j) : j == n ? alpha : 0.0;
      residual = std::max(residual, std::abs(pulled - target));
    }
    report.max_residual = std::max(report.max_residual, residual);
  }
  return report;
}

std::vector<JetPoint> sample_jet_points(int n, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<JetPoint> out;
  for (int i = 0; i < count; ++i) {
    JetPoint w;
    w.t = u(rng);
    w.q = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) w.q(j) = u(rng);
    w.z = u(rng);
    w.s = u(rng);
    w.p = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) w.p(j) = u(rng);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace retfront::propagation
