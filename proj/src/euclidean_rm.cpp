#include "rmf/euclidean_rm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/rk4.hpp"
#include "rmf/errors.hpp"
#include "rmf/grid.hpp"

namespace rmf {
namespace {

Vec cross3(const Vec& a, const Vec& b) {
  return vec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

void require_same_grid(const CurveSamples& c, const NormalField& f) {
  if (f.params.size() != c.size() || f.vectors.size() != c.size())
    throw ValidationError("field and curve have different sample counts");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (f.params[i] != c.params[i])
      throw ValidationError("field and curve sample grids differ at index " + std::to_string(i));
  }
}

double epsilon_for(const CurveSamples& c) { return 1e-12 * std::max(1.0, c.length()); }

}  // namespace

double NormalField::max_drift() const {
  return step_drift.empty() ? 0.0 : *std::max_element(step_drift.begin(), step_drift.end());
}

NormalField make_field(const CurveSamples& c, std::vector<Vec> vectors) {
  if (vectors.size() != c.size()) throw ValidationError("field needs one vector per sample");
  NormalField f;
  f.params = c.params;
  f.vectors = std::move(vectors);
  f.proportionality.assign(c.size(), 0.0);
  f.step_drift.assign(c.size(), 0.0);
  return f;
}

NormalField rm_transport(const CurveSamples& c, const Vec& v0, const TransportOptions& options) {
  const std::size_t n = c.size();
  if (n < 4) throw ValidationError("transport needs at least 4 samples");
  if (v0.size() != c.dimension()) throw ValidationError("seed vector dimension does not match the curve");

  // Unit tangent and its parameter derivative at the nodes.
  std::vector<Vec> tangent(n), tangent_rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double speed = c.velocities[i].norm();
    tangent[i] = c.velocities[i] / speed;
    const Vec& a = c.accelerations[i];
    tangent_rate[i] = (a - a.dot(tangent[i]) * tangent[i]) / speed;
  }

  NormalField f;
  f.params = c.params;
  const double seed_norm = v0.norm();
  if (seed_norm == 0.0) {
    f.vectors.assign(n, Vec::Zero(v0.size()));
    f.proportionality.assign(n, 0.0);
    f.step_drift.assign(n, 0.0);
    return f;
  }
  const double ip = v0.dot(tangent[0]);
  if (std::abs(ip) > options.normal_tolerance * seed_norm) {
    std::ostringstream os;
    os << "seed vector is not normal to the curve: <v0, t(s0)> = " << ip;
    throw ValidationError(os.str());
  }
  Vec start = v0 - ip * tangent[0];
  f.initial_projection = std::abs(ip);
  const double target_norm = start.norm();

  const auto mid_tangent = cubic_midpoints(c.params, tangent, c.closed);
  const auto mid_rate = cubic_midpoints(c.params, tangent_rate, c.closed);
  auto station = [&](std::size_t s) -> std::pair<const Vec&, const Vec&> {
    if (s % 2 == 0) return {tangent[s / 2], tangent_rate[s / 2]};
    return {mid_tangent[s / 2], mid_rate[s / 2]};
  };
  auto rhs = [&](std::size_t s, const Vec& v) -> Vec {
    auto [t, rate] = station(s);
    return -v.dot(rate) * t;
  };
  auto correct = [&](std::size_t i, Vec& v) {
    const double along = v.dot(tangent[i]);
    const double drift = std::max(std::abs(along), std::abs(v.norm() - target_norm));
    v -= along * tangent[i];
    v *= target_norm / v.norm();
    return drift;
  };
  detail::rk4_sweep(c.params, start, rhs, correct, f.vectors, f.step_drift);

  f.proportionality.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    f.proportionality[i] = -f.vectors[i].dot(tangent_rate[i]) / c.velocities[i].norm();
  return f;
}

RmVerdict is_rm(const CurveSamples& c, const NormalField& f, double tol) {
  require_same_grid(c, f);
  const auto rate = differentiate(c.params, f.vectors, c.closed);
  const double eps = epsilon_for(c);
  RmVerdict out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec t = c.velocities[i].normalized();
    const Vec& d = rate[i];
    const double r = (d - d.dot(t) * t).norm() / std::max({d.norm(), f.vectors[i].norm() / c.length(), eps});
    out.max_residual = std::max(out.max_residual, r);
  }
  out.verdict = out.max_residual < tol;
  return out;
}

Vec default_normal_seed(const Vec& tangent) {
  Eigen::Index j = 0;
  tangent.cwiseAbs().minCoeff(&j);
  Vec e = Vec::Zero(tangent.size());
  e[j] = 1.0;
  const Vec t = tangent.normalized();
  return (e - e.dot(t) * t).normalized();
}

FramedCurve rm_frame(const CurveSamples& c, const std::optional<Vec>& u0, const TransportOptions& options) {
  if (c.dimension() != 3) throw UnsupportedDimensionError("rm_frame requires dimension 3");
  const Vec t0 = c.velocities.front().normalized();
  const Vec seed = u0 ? *u0 : default_normal_seed(t0);
  if (std::abs(seed.norm() - 1.0) > 1e-9)
    throw ValidationError("rm_frame seed must be a unit vector");
  const NormalField u = rm_transport(c, seed, options);

  FramedCurve out;
  out.base = c;
  out.frames.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    Mat frame(3, 3);
    const Vec t = c.velocities[i].normalized();
    frame.col(0) = t;
    frame.col(1) = u.vectors[i];
    frame.col(2) = cross3(t, u.vectors[i]);
    out.frames.push_back(std::move(frame));
  }
  return out;
}

RuledSurfaceMesh ruled_surface(const CurveSamples& c, const NormalField& f, double lambda_min, double lambda_max,
                               int n_rulings) {
  require_same_grid(c, f);
  if (!(lambda_min < lambda_max)) throw ValidationError("ruled surface needs lambda_min < lambda_max");
  if (n_rulings < 2) throw ValidationError("ruled surface needs at least 2 rulings");
  RuledSurfaceMesh mesh;
  mesh.columns = c.size();
  const auto rows = static_cast<std::size_t>(n_rulings);
  for (std::size_t j = 0; j < rows; ++j) {
    const double lambda =
        j + 1 == rows ? lambda_max
                      : lambda_min + (lambda_max - lambda_min) * static_cast<double>(j) / static_cast<double>(rows - 1);
    mesh.lambdas.push_back(lambda);
    for (std::size_t i = 0; i < c.size(); ++i) {
      // Exact at lambda = 0.
      mesh.points.push_back(lambda == 0.0 ? c.positions[i] : Vec(c.positions[i] + lambda * f.vectors[i]));
    }
  }
  for (std::size_t j = 0; j + 1 < rows; ++j) {
    for (std::size_t i = 0; i + 1 < mesh.columns; ++i) {
      const std::size_t a = j * mesh.columns + i;
      mesh.quads.push_back({a, a + 1, a + 1 + mesh.columns, a + mesh.columns});
    }
  }
  return mesh;
}

double developability_residual(const CurveSamples& c, const NormalField& f) {
  if (c.dimension() != 3) throw UnsupportedDimensionError("developability residual requires dimension 3");
  require_same_grid(c, f);
  const auto rate = differentiate(c.params, f.vectors, c.closed);
  const double eps = epsilon_for(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec& g = c.velocities[i];
    const Vec& v = f.vectors[i];
    if (v.norm() <= eps) continue;
    const double det = g.dot(cross3(v, rate[i]));
    const double scale = std::max({rate[i].norm(), v.norm() / c.length(), eps});
    worst = std::max(worst, std::abs(det) / (g.norm() * v.norm() * scale));
  }
  return worst;
}

NormalField frenet_normal_field(const CurveSamples& c) { return make_field(c, frenet_frame(c).normal); }

TwistSeries frenet_rm_twist(const CurveSamples& c) {
  const FrenetData frenet = frenet_frame(c);
  const NormalField u = rm_transport(c, frenet.normal.front());
  TwistSeries out;
  out.theta.reserve(c.size());
  double previous = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double raw = std::atan2(u.vectors[i].dot(frenet.binormal[i]), u.vectors[i].dot(frenet.normal[i]));
    double theta = raw;
    if (i > 0) {
      theta = previous + std::remainder(raw - previous, 2.0 * M_PI);
    }
    out.theta.push_back(theta);
    previous = theta;
  }
  out.total_twist = out.theta.back() - out.theta.front();
  return out;
}

}  // namespace rmf
