#include "rmf/riemannian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "detail/rk4.hpp"
#include "rmf/errors.hpp"
#include "rmf/grid.hpp"

namespace rmf {

Vec Christoffel::contract(const Vec& u, const Vec& w) const {
  Vec out(dimension());
  for (int k = 0; k < dimension(); ++k) out[k] = u.dot(upper[static_cast<std::size_t>(k)] * w);
  return out;
}

MetricChart::MetricChart(std::string name, int dimension, MetricFn metric, std::optional<ChristoffelFn> christoffel,
                         DomainFn domain, Options options)
    : name_(std::move(name)),
      dimension_(dimension),
      metric_(std::move(metric)),
      christoffel_(std::move(christoffel)),
      domain_(std::move(domain)),
      options_(std::move(options)) {
  if (dimension_ < 2) throw ValidationError("chart dimension must be at least 2");
  if (!metric_) throw ValidationError("chart requires a metric function");
  if (!domain_) domain_ = [](const Vec&) { return true; };
}

Mat MetricChart::checked_metric(const Vec& x) const {
  Mat g = metric_(x);
  if (g.rows() != dimension_ || g.cols() != dimension_)
    throw ValidationError("chart '" + name_ + "': metric has wrong shape");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("chart '" + name_ + "': metric is not symmetric");
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw ValidationError("chart '" + name_ + "': metric is not positive definite");
  return g;
}

Christoffel MetricChart::christoffel(const Vec& x) const {
  if (christoffel_) return (*christoffel_)(x);
  if (options_.flat) {
    Christoffel zero;
    zero.upper.assign(static_cast<std::size_t>(dimension_), Mat::Zero(dimension_, dimension_));
    return zero;
  }
  return christoffel_fd(metric_, x, options_.fd_step * options_.coordinate_scale);
}

bool MetricChart::same_point(const Vec& a, const Vec& b, double tol) const {
  Vec d = b - a;
  if (options_.period) {
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      const double p = (*options_.period)[k];
      if (p > 0.0) d[k] -= p * std::round(d[k] / p);
    }
  }
  return d.norm() <= tol;
}

Christoffel christoffel_fd(const MetricChart::MetricFn& metric, const Vec& x, double h) {
  const auto n = static_cast<int>(x.size());
  const Mat g = metric(x);
  Eigen::SelfAdjointEigenSolver<Mat> eig(g);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : INFINITY;
  if (!(condition <= 1e12)) {
    std::ostringstream os;
    os << "singular metric: condition estimate " << condition;
    throw SingularMetricError(os.str(), condition);
  }
  const Mat inv = g.inverse();

  std::vector<Mat> dg(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    dg[static_cast<std::size_t>(l)] = (metric(xp) - metric(xm)) / (2.0 * h);
  }

  Christoffel out;
  out.upper.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
          sum += inv(k, l) * (dg[static_cast<std::size_t>(i)](l, j) + dg[static_cast<std::size_t>(j)](l, i) -
                              dg[static_cast<std::size_t>(l)](i, j));
        }
        out.upper[static_cast<std::size_t>(k)](i, j) = 0.5 * sum;
        out.upper[static_cast<std::size_t>(k)](j, i) = 0.5 * sum;
      }
    }
  }
  return out;
}

AmbientDecomposition decompose(const Vec& x, const Vec& unit_tangent, const Vec& u, const MetricChart& chart) {
  const Mat g = chart.metric(x);
  const double tt = unit_tangent.dot(g * unit_tangent);
  if (std::abs(tt - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "decompose: tangent is not g-unit, g(t, t) = " << tt;
    throw ValidationError(os.str());
  }
  AmbientDecomposition d;
  d.tangent = u.dot(g * unit_tangent) * unit_tangent;
  d.normal = u - d.tangent;
  return d;
}

namespace {

void require_same_grid(const CurveSamples& c, const NormalField& f) {
  if (f.params.size() != c.size() || f.vectors.size() != c.size())
    throw ValidationError("field and curve have different sample counts");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (f.params[i] != c.params[i])
      throw ValidationError("field and curve sample grids differ at index " + std::to_string(i));
  }
}

void require_inside(const MetricChart& chart, const Vec& x, long index, const char* what) {
  if (!chart.contains(x)) {
    std::ostringstream os;
    os << what << " " << index << " lies outside the domain of chart '" << chart.name() << "'";
    throw DomainError(os.str(), index);
  }
}

// Geometry of a g-unit-speed curve at the RK4 stations.
class Transporter {
 public:
  Transporter(const CurveSamples& c, const MetricChart& chart) : c_(c), chart_(chart) {
    const std::size_t n = c.size();
    if (n < 4) throw ValidationError("transport needs at least 4 samples");
    if (c.dimension() != chart.dimension())
      throw ValidationError("curve dimension does not match chart '" + chart.name() + "'");

    stations_.resize(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      require_inside(chart, c.positions[i], static_cast<long>(i), "sample");
      Station& s = stations_[2 * i];
      fill(s, c.positions[i], c.velocities[i], c.accelerations[i]);
      const double speed2 = s.velocity.dot(s.metric * s.velocity);
      if (std::abs(speed2 - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "curve is not unit speed in chart '" << chart.name() << "' at sample " << i << " (g(x', x') = " << speed2
           << "); reparametrize by g-arclength first";
        throw ReparametrizationRequiredError(os.str());
      }
    }
    const auto mx = cubic_midpoints(c.params, c.positions, c.closed);
    const auto mv = cubic_midpoints(c.params, c.velocities, c.closed);
    const auto ma = cubic_midpoints(c.params, c.accelerations, c.closed);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      require_inside(chart, mx[i], static_cast<long>(i), "midpoint after sample");
      fill(stations_[2 * i + 1], mx[i], mv[i], ma[i]);
    }
  }

  const Mat& metric(std::size_t node) const { return stations_[2 * node].metric; }
  const Vec& tangent(std::size_t node) const { return stations_[2 * node].velocity; }
  const Vec& position(std::size_t node) const { return c_.positions[node]; }

  NormalField run(const Vec& v0, const TransportOptions& options) const {
    const std::size_t n = c_.size();
    if (v0.size() != chart_.dimension()) throw ValidationError("seed vector dimension does not match the chart");
    NormalField f;
    f.params = c_.params;
    const Mat& g0 = metric(0);
    const double seed_norm = std::sqrt(v0.dot(g0 * v0));
    if (seed_norm == 0.0) {
      f.vectors.assign(n, Vec::Zero(v0.size()));
      f.proportionality.assign(n, 0.0);
      f.step_drift.assign(n, 0.0);
      return f;
    }
    const double ip = v0.dot(g0 * tangent(0));
    if (std::abs(ip) > options.normal_tolerance * seed_norm) {
      std::ostringstream os;
      os << "seed vector is not g-normal to the curve: g(v0, t(s0)) = " << ip;
      throw ValidationError(os.str());
    }
    Vec start = v0 - ip * tangent(0);
    f.initial_projection = std::abs(ip);
    const double target = std::sqrt(start.dot(g0 * start));

    auto rhs = [&](std::size_t s, const Vec& v) -> Vec {
      const Station& st = stations_[s];
      const double mu = -st.covariant_acceleration.dot(st.metric * v) / st.velocity.dot(st.metric * st.velocity);
      return -st.christoffel.contract(st.velocity, v) + mu * st.velocity;
    };
    auto correct = [&](std::size_t i, Vec& v) {
      const Mat& g = metric(i);
      const Vec& t = tangent(i);
      const double along = v.dot(g * t) / t.dot(g * t);
      const double before = std::sqrt(v.dot(g * v));
      const double drift = std::max(std::abs(along), std::abs(before - target));
      v -= along * t;
      v *= target / std::sqrt(v.dot(g * v));
      return drift;
    };
    detail::rk4_sweep(c_.params, start, rhs, correct, f.vectors, f.step_drift);

    f.proportionality.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Station& st = stations_[2 * i];
      f.proportionality[i] = -st.covariant_acceleration.dot(st.metric * f.vectors[i]);
    }
    return f;
  }

 private:
  struct Station {
    Vec velocity;
    Mat metric;
    Christoffel christoffel;
    Vec covariant_acceleration;  // nabla_{x'} x'
  };

  void fill(Station& s, const Vec& x, const Vec& v, const Vec& a) const {
    s.velocity = v;
    s.metric = chart_.checked_metric(x);
    s.christoffel = chart_.christoffel(x);
    s.covariant_acceleration = a + s.christoffel.contract(v, v);
  }

  const CurveSamples& c_;
  const MetricChart& chart_;
  std::vector<Station> stations_;
};

std::string format_gram(const Mat& gram) {
  std::ostringstream os;
  os.precision(12);
  os << "[";
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    os << (i ? "; " : "");
    for (Eigen::Index j = 0; j < gram.cols(); ++j) os << (j ? ", " : "") << gram(i, j);
  }
  os << "]";
  return os.str();
}

}  // namespace

std::vector<Vec> covariant_derivative_along(const CurveSamples& c, const NormalField& f, const MetricChart& chart) {
  require_same_grid(c, f);
  const auto rate = differentiate(c.params, f.vectors, c.closed);
  std::vector<Vec> out;
  out.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    require_inside(chart, c.positions[i], static_cast<long>(i), "sample");
    out.push_back(rate[i] + chart.christoffel(c.positions[i]).contract(c.velocities[i], f.vectors[i]));
  }
  return out;
}

double normal_connection_residual(const CurveSamples& c, const NormalField& f, const MetricChart& chart) {
  const auto nabla = covariant_derivative_along(c, f, chart);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec& x = c.positions[i];
    const Mat g = chart.metric(x);
    const double vn = std::sqrt(f.vectors[i].dot(g * f.vectors[i]));
    if (vn == 0.0) continue;
    const Vec& t = c.velocities[i];
    const Vec normal = nabla[i] - (nabla[i].dot(g * t) / t.dot(g * t)) * t;
    worst = std::max(worst, std::sqrt(normal.dot(g * normal)) / vn);
  }
  return worst;
}

CurveSamples g_arclength_reparametrize(const CurveSamples& c, const MetricChart& chart) {
  LengthMeasure m;
  m.name = chart.name();
  auto speed = [&chart](const Vec& x, const Vec& v) {
    if (!chart.contains(x)) throw DomainError("curve leaves the domain of chart '" + chart.name() + "'");
    return std::sqrt(v.dot(chart.metric(x) * v));
  };
  m.speed = speed;
  m.speed_rate = [&chart, speed](const Vec& x, const Vec& v, const Vec& a) {
    const Vec cov = a + chart.christoffel(x).contract(v, v);
    return cov.dot(chart.metric(x) * v) / speed(x, v);
  };
  m.chord = [speed](const Vec& a, const Vec& b) {
    const Vec d = b - a;
    return (speed(a, d) + 4.0 * speed(Vec(0.5 * (a + b)), d) + speed(b, d)) / 6.0;
  };
  return reparametrize_by_length(c, m);
}

NormalField normal_parallel_transport(const CurveSamples& c, const MetricChart& chart, const Vec& v0,
                                      const TransportOptions& options) {
  return Transporter(c, chart).run(v0, options);
}

FramedCurve rm_frame_manifold(const CurveSamples& c, const MetricChart& chart, const std::vector<Vec>& initial,
                              const TransportOptions& options) {
  const int n = chart.dimension();
  if (static_cast<int>(initial.size()) != n - 1)
    throw ValidationError("rm_frame_manifold needs " + std::to_string(n - 1) + " initial normal vectors");
  const Transporter transporter(c, chart);
  const Mat& g0 = transporter.metric(0);
  const Vec& t0 = transporter.tangent(0);
  Mat gram(n - 1, n - 1);
  double worst = 0.0;
  for (int a = 0; a < n - 1; ++a) {
    if (initial[static_cast<std::size_t>(a)].size() != n)
      throw ValidationError("initial normal vector has wrong dimension");
    worst = std::max(worst, std::abs(initial[static_cast<std::size_t>(a)].dot(g0 * t0)));
    for (int b = 0; b < n - 1; ++b)
      gram(a, b) = initial[static_cast<std::size_t>(a)].dot(g0 * initial[static_cast<std::size_t>(b)]);
  }
  worst = std::max(worst, (gram - Mat::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff());
  if (worst > 1e-8)
    throw ValidationError("initial vectors are not g-orthonormal and normal to the tangent; Gram matrix " +
                          format_gram(gram));

  std::vector<NormalField> fields;
  for (const Vec& v : initial) fields.push_back(transporter.run(v, options));

  FramedCurve out;
  out.base = c;
  for (std::size_t i = 0; i < c.size(); ++i) {
    Mat frame(n, n);
    frame.col(0) = c.velocities[i];
    for (int a = 0; a < n - 1; ++a) frame.col(a + 1) = fields[static_cast<std::size_t>(a)].vectors[i];
    out.frames.push_back(std::move(frame));
  }
  return out;
}

std::vector<Vec> normal_basis(const Vec& x, const Vec& tangent, const MetricChart& chart) {
  const Mat g = chart.metric(x);
  const auto n = static_cast<int>(tangent.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(tangent[a]) < std::abs(tangent[b]); });

  std::vector<Vec> basis{tangent / std::sqrt(tangent.dot(g * tangent))};
  for (int j : order) {
    if (static_cast<int>(basis.size()) == n) break;
    Vec w = Vec::Unit(n, j);
    for (const Vec& b : basis) w -= w.dot(g * b) * b;
    const double len = std::sqrt(w.dot(g * w));
    if (len > 1e-6) basis.push_back(w / len);
  }
  Mat m(n, n);
  for (int k = 0; k < n; ++k) m.col(k) = basis[static_cast<std::size_t>(k)];
  if (m.determinant() < 0.0) basis.back() = -basis.back();
  return {basis.begin() + 1, basis.end()};
}

Holonomy normal_holonomy(const CurveSamples& c, const MetricChart& chart, const TransportOptions& options) {
  const double scale = std::max(1.0, c.length());
  if (!c.closed && !chart.same_point(c.positions.front(), c.positions.back(), 1e-9 * scale))
    throw ValidationError("holonomy requires a closed curve");
  const Transporter transporter(c, chart);
  Holonomy h;
  h.basis = normal_basis(transporter.position(0), transporter.tangent(0), chart);
  const Mat& g0 = transporter.metric(0);
  const auto m = static_cast<Eigen::Index>(h.basis.size());
  h.matrix.resize(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    const NormalField f = transporter.run(h.basis[static_cast<std::size_t>(b)], options);
    for (Eigen::Index a = 0; a < m; ++a) h.matrix(a, b) = h.basis[static_cast<std::size_t>(a)].dot(g0 * f.vectors.back());
  }
  h.orthogonality_residual = (h.matrix.transpose() * h.matrix - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
  h.angle = m == 2 ? std::atan2(h.matrix(1, 0), h.matrix(0, 0)) : NAN;
  return h;
}

Vec Isometry::apply(const Vec& x) const {
  if (domain && !domain(x)) throw DomainError("isometry '" + name + "' is undefined at the given point");
  return map(x);
}

Vec Isometry::push(const Vec& x, const Vec& u) const {
  if (domain && !domain(x)) throw DomainError("isometry '" + name + "' is undefined at the given point");
  if (differential) return differential(x, u);
  const double len = u.norm();
  if (len == 0.0) return Vec::Zero(u.size());
  const double h = fd_step * std::max(1.0, x.norm());
  const Vec dir = u / len;
  return (map(x + h * dir) - map(x - h * dir)) * (len / (2.0 * h));
}

Vec Isometry::curvature_term(const Vec& x, const Vec& u) const {
  const double len = u.norm();
  if (len == 0.0) return Vec::Zero(u.size());
  const double h = 1e-4 * std::max(1.0, x.norm());
  const Vec dir = u / len;
  return (push(x + h * dir, u) - push(x - h * dir, u)) * (len / (2.0 * h));
}

double isometry_defect(const Isometry& mu, const MetricChart& chart, const Vec& x, const Vec& u, const Vec& w) {
  const Vec y = mu.apply(x);
  return std::abs(chart.inner(y, mu.push(x, u), mu.push(x, w)) - chart.inner(x, u, w));
}

PushedField pushforward_field(const Isometry& mu, const CurveSamples& c, const NormalField& f) {
  require_same_grid(c, f);
  PushedField out;
  CurveSamples& pc = out.curve;
  pc.params = c.params;
  pc.closed = c.closed;
  pc.cumulative_arclength = c.cumulative_arclength;
  pc.length_metric = c.length_metric;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec& x = c.positions[i];
    if (mu.domain && !mu.domain(x))
      throw DomainError("isometry '" + mu.name + "' is undefined at sample " + std::to_string(i),
                        static_cast<long>(i));
    pc.positions.push_back(mu.apply(x));
    pc.velocities.push_back(mu.push(x, c.velocities[i]));
    pc.accelerations.push_back(mu.push(x, c.accelerations[i]) + mu.curvature_term(x, c.velocities[i]));
    pc.speeds.push_back(pc.velocities.back().norm());
  }
  if (c.source && c.source->kind() == CurveSpec::Kind::analytic) {
    auto src = c.source;
    auto iso = std::make_shared<const Isometry>(mu);
    pc.source = std::make_shared<const CurveSpec>(CurveSpec::analytic(
        src->dimension(), [src, iso](double t) { return iso->apply(src->position(t)); },
        [src, iso](double t) { return iso->push(src->position(t), src->velocity(t)); },
        [src, iso](double t) {
          const Vec x = src->position(t);
          const Vec v = src->velocity(t);
          return Vec(iso->push(x, src->acceleration(t)) + iso->curvature_term(x, v));
        },
        src->t0(), src->t1(), src->closed()));
    pc.source_params = c.source_params;
  }

  NormalField& pf = out.field;
  pf.params = f.params;
  pf.proportionality = f.proportionality;
  pf.step_drift = f.step_drift;
  pf.initial_projection = f.initial_projection;
  for (std::size_t i = 0; i < c.size(); ++i) pf.vectors.push_back(mu.push(c.positions[i], f.vectors[i]));
  return out;
}

}  // namespace rmf
