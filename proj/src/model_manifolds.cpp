#include "rmf/model_manifolds.hpp"

#include <cmath>
#include <numbers>

#include "rmf/errors.hpp"

namespace rmf::manifolds {
namespace {

// Metric e^{2 phi} delta: Gamma^k_ij = d_i phi delta_jk + d_j phi delta_ik - d_k phi delta_ij.
Christoffel conformal_christoffel(const Vec& grad_phi) {
  const auto n = static_cast<int>(grad_phi.size());
  Christoffel out;
  out.upper.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    Mat& m = out.upper[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) {
      m(i, k) += grad_phi[i];
      m(k, i) += grad_phi[i];
      m(i, i) -= grad_phi[k];
    }
  }
  return out;
}

Christoffel zero_christoffel(int n) {
  Christoffel out;
  out.upper.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  return out;
}

Mat rotation(const Vec& axis, double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d(axis[0], axis[1], axis[2]).normalized()).toRotationMatrix();
}

Isometry linear_isometry(std::string name, const Mat& a, const Vec& b) {
  Isometry mu;
  mu.name = std::move(name);
  mu.map = [a, b](const Vec& x) { return Vec(a * x + b); };
  mu.differential = [a](const Vec&, const Vec& u) { return Vec(a * u); };
  return mu;
}

ChartCatalogEntry euclidean3() {
  MetricChart::Options opts;
  opts.flat = true;
  MetricChart chart(
      "euclidean3", 3, [](const Vec&) { return Mat(Mat::Identity(3, 3)); },
      [](const Vec&) { return zero_christoffel(3); }, nullptr, opts);
  std::vector<Isometry> isos;
  isos.push_back(linear_isometry("rotation_z_0.7", rotation(vec3(0, 0, 1), 0.7), Vec::Zero(3)));
  isos.push_back(linear_isometry("rigid_motion", rotation(vec3(1, -2, 0.5), 1.3), vec3(0.4, -1.1, 2.5)));
  isos.push_back(linear_isometry("translation", Mat::Identity(3, 3), vec3(1.0, 2.0, -3.0)));
  return {"euclidean3", std::move(chart),
          [](const Vec& p, const Vec& d, double s) { return Vec(p + s * d); }, std::move(isos),
          "Flat R^3 in Cartesian coordinates; Christoffel symbols vanish; rigid motions are isometries."};
}

ChartCatalogEntry flat_torus3() {
  MetricChart::Options opts;
  opts.flat = true;
  opts.period = Vec::Constant(3, 2.0 * std::numbers::pi);
  MetricChart chart(
      "flat_torus3", 3, [](const Vec&) { return Mat(Mat::Identity(3, 3)); },
      [](const Vec&) { return zero_christoffel(3); }, nullptr, opts);
  std::vector<Isometry> isos;
  isos.push_back(linear_isometry("translation", Mat::Identity(3, 3), vec3(0.5, 1.5, -0.25)));
  return {"flat_torus3", std::move(chart),
          [](const Vec& p, const Vec& d, double s) { return Vec(p + s * d); }, std::move(isos),
          "Flat 3-torus R^3 / (2 pi Z)^3; coordinates are not wrapped, points are compared modulo the period."};
}

ChartCatalogEntry sphere3_stereographic() {
  MetricChart::Options opts;
  MetricChart chart(
      "sphere3_stereographic", 3,
      [](const Vec& x) {
        const double f = 2.0 / (1.0 + x.squaredNorm());
        return Mat(f * f * Mat::Identity(3, 3));
      },
      [](const Vec& x) { return conformal_christoffel(-2.0 * x / (1.0 + x.squaredNorm())); },
      [](const Vec& x) { return x.norm() < sphere3::chart_radius; }, opts);
  std::vector<Isometry> isos;
  isos.push_back(linear_isometry("rotation_z_0.7", rotation(vec3(0, 0, 1), 0.7), Vec::Zero(3)));
  isos.push_back(linear_isometry("rotation_oblique", rotation(vec3(1, 1, -1), 2.1), Vec::Zero(3)));
  auto geodesic = [](const Vec& p, const Vec& d, double s) {
    const Vec X = sphere3::to_embedding(p);
    const Vec V = (sphere3::embedding_jacobian(p) * d).normalized();
    return sphere3::from_embedding(std::cos(s) * X + std::sin(s) * V);
  };
  return {"sphere3_stereographic", std::move(chart), geodesic, std::move(isos),
          "Unit 3-sphere, stereographic chart from the north pole: g = 4 delta / (1 + |x|^2)^2, |x| < 1e3."};
}

ChartCatalogEntry hyperbolic3_halfspace() {
  MetricChart::Options opts;
  MetricChart chart(
      "hyperbolic3_halfspace", 3, [](const Vec& x) { return Mat(Mat::Identity(3, 3) / (x[2] * x[2])); },
      [](const Vec& x) { return conformal_christoffel(vec3(0.0, 0.0, -1.0 / x[2])); },
      [](const Vec& x) { return x[2] > 0.0; }, opts);
  std::vector<Isometry> isos;
  isos.push_back(linear_isometry("dilation_2", 2.0 * Mat::Identity(3, 3), Vec::Zero(3)));
  isos.push_back(linear_isometry("horizontal_translation", Mat::Identity(3, 3), vec3(1.5, -0.5, 0.0)));
  isos.push_back(linear_isometry("vertical_axis_rotation", rotation(vec3(0, 0, 1), 0.9), Vec::Zero(3)));
  for (auto& mu : isos) mu.domain = [](const Vec& x) { return x[2] > 0.0; };
  // Geodesics are vertical lines or semicircles orthogonal to z = 0.
  auto geodesic = [](const Vec& p, const Vec& d, double s) {
    const double z0 = p[2];
    const Vec u = d / (d.norm() / z0);  // g-unit
    const Eigen::Vector2d horizontal(u[0], u[1]);
    const double rho_rate = horizontal.norm();
    if (rho_rate <= 1e-14 * z0) return vec3(p[0], p[1], z0 * std::exp(u[2] > 0 ? s : -s));
    const Eigen::Vector2d e = horizontal / rho_rate;
    const double s0 = std::atanh(-u[2] / z0);
    const double radius = z0 * std::cosh(s0);
    const double rho = radius * (std::tanh(s + s0) - std::tanh(s0));
    return vec3(p[0] + rho * e[0], p[1] + rho * e[1], radius / std::cosh(s + s0));
  };
  return {"hyperbolic3_halfspace", std::move(chart), geodesic, std::move(isos),
          "Hyperbolic 3-space (curvature -1), upper half-space model g = delta / z^2, z > 0."};
}

ChartCatalogEntry warped_product_demo() {
  // g = diag(1, 1, w(x1)^2), w(u) = 1 + u^2 / 4.
  MetricChart::Options opts;
  MetricChart chart(
      "warped_product_demo", 3,
      [](const Vec& x) {
        const double w = 1.0 + 0.25 * x[0] * x[0];
        Mat g = Mat::Identity(3, 3);
        g(2, 2) = w * w;
        return g;
      },
      [](const Vec& x) {
        const double w = 1.0 + 0.25 * x[0] * x[0];
        const double dw = 0.5 * x[0];
        Christoffel out = zero_christoffel(3);
        out.upper[0](2, 2) = -w * dw;
        out.upper[2](0, 2) = dw / w;
        out.upper[2](2, 0) = dw / w;
        return out;
      },
      nullptr, opts);
  std::vector<Isometry> isos;
  isos.push_back(linear_isometry("x2_translation", Mat::Identity(3, 3), vec3(0.0, 0.8, 0.0)));
  isos.push_back(linear_isometry("x3_translation", Mat::Identity(3, 3), vec3(0.0, 0.0, -1.7)));
  Mat reflect = Mat::Identity(3, 3);
  reflect(1, 1) = -1.0;
  isos.push_back(linear_isometry("x2_reflection", reflect, Vec::Zero(3)));
  Mat flip = Mat::Identity(3, 3);
  flip(0, 0) = -1.0;
  isos.push_back(linear_isometry("x1_reflection", flip, Vec::Zero(3)));
  return {"warped_product_demo", std::move(chart), nullptr, std::move(isos),
          "Warped product g = diag(1, 1, w(x1)^2) with w(u) = 1 + u^2/4."};
}

}  // namespace

std::vector<std::string> chart_names() {
  return {"euclidean3", "sphere3_stereographic", "hyperbolic3_halfspace", "flat_torus3", "warped_product_demo"};
}

ChartCatalogEntry get_chart(std::string_view name) {
  if (name == "euclidean3") return euclidean3();
  if (name == "sphere3_stereographic") return sphere3_stereographic();
  if (name == "hyperbolic3_halfspace") return hyperbolic3_halfspace();
  if (name == "flat_torus3") return flat_torus3();
  if (name == "warped_product_demo") return warped_product_demo();
  std::string list;
  for (const auto& n : chart_names()) list += (list.empty() ? "" : ", ") + n;
  throw CatalogError("unknown chart '" + std::string(name) + "'; available: " + list);
}

namespace sphere3 {

Vec to_embedding(const Vec& x) {
  const double r2 = x.squaredNorm();
  Vec X(4);
  X.head(3) = 2.0 * x / (1.0 + r2);
  X[3] = (r2 - 1.0) / (1.0 + r2);
  return X;
}

Mat embedding_jacobian(const Vec& x) {
  const double r2 = x.squaredNorm();
  const double q = 1.0 + r2;
  Mat j(4, 3);
  j.topRows(3) = (2.0 / q) * Mat::Identity(3, 3) - (4.0 / (q * q)) * x * x.transpose();
  j.row(3) = (4.0 / (q * q)) * x.transpose();
  return j;
}

Vec from_embedding(const Vec& X) { return X.head(3) / (1.0 - X[3]); }

Vec pull_back(const Vec& x, const Vec& w) {
  const double f = 2.0 / (1.0 + x.squaredNorm());
  return embedding_jacobian(x).transpose() * w / (f * f);
}

}  // namespace sphere3

NormalField embedding_oracle_transport(const CurveSamples& c, const Vec& v0) {
  NormalField f;
  f.params = c.params;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c.positions[i].norm() < 0.999 * sphere3::chart_radius))
      throw DomainError("sample " + std::to_string(i) + " is too close to the stereographic chart boundary",
                        static_cast<long>(i));
  }
  if (c.size() < 2) {
    f.vectors.assign(c.size(), v0);
    f.proportionality.assign(c.size(), 0.0);
    f.step_drift.assign(c.size(), 0.0);
    return f;
  }

  Vec V = sphere3::embedding_jacobian(c.positions[0]) * v0;
  const double norm = V.norm();
  f.vectors.push_back(v0);
  f.step_drift.push_back(0.0);
  for (std::size_t i = 1; i < c.size(); ++i) {
    const Vec& x = c.positions[i];
    const Vec X = sphere3::to_embedding(x);
    const Vec T = (sphere3::embedding_jacobian(x) * c.velocities[i]).normalized();
    V -= V.dot(X) * X + V.dot(T) * T;
    if (norm > 0.0) V *= norm / V.norm();
    f.vectors.push_back(sphere3::pull_back(x, V));
    f.step_drift.push_back(0.0);
  }
  f.proportionality.assign(c.size(), 0.0);
  return f;
}

}  // namespace rmf::manifolds
