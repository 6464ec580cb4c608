#include "rmf/curve.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rmf/errors.hpp"
#include "rmf/expression.hpp"
#include "rmf/grid.hpp"

namespace rmf {
namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double integrate(F&& f, double a, double b) {
  if (a == b) return 0.0;
  // One panel first; its error estimate has an absolute floor near 1e-15.
  double error = 0.0, l1 = 0.0;
  const double single = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &error, &l1);
  if (error <= 1e-13 * l1 + 1e-14) return single;
  return gauss_kronrod<double, 15>::integrate(f, a, b, 10, 1e-12);
}

Vec cross3(const Vec& a, const Vec& b) {
  return vec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

std::string describe(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

void fill_speeds(CurveSamples& c, const SampleOptions& options) {
  c.speeds.resize(c.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.speeds[i] = c.velocities[i].norm();
    peak = std::max(peak, c.speeds[i]);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c.speeds[i] > options.degenerate_speed * peak) || peak == 0.0)
      throw DegenerateCurveError("degenerate curve: zero speed at parameter " + describe(c.params[i]),
                                 c.params[i]);
  }
}

}  // namespace

CurveSpec CurveSpec::analytic(int dimension, PointFn position, PointFn velocity, PointFn acceleration,
                              double t0, double t1, bool closed) {
  CurveSpec s;
  s.kind_ = Kind::analytic;
  s.dimension_ = dimension;
  s.position_ = std::move(position);
  s.velocity_ = std::move(velocity);
  s.acceleration_ = std::move(acceleration);
  s.t0_ = t0;
  s.t1_ = t1;
  s.closed_ = closed;
  if (!s.position_) throw ValidationError("analytic curve requires a position function");
  if (static_cast<bool>(s.velocity_) != static_cast<bool>(s.acceleration_))
    throw ValidationError("analytic curve: supply both derivative functions or neither");
  return s;
}

CurveSpec CurveSpec::from_expressions(const std::vector<std::string>& components, double t0, double t1,
                                      bool closed) {
  if (components.size() < 2)
    throw ValidationError("analytic curve needs at least 2 coordinate expressions");
  auto exprs = std::make_shared<std::vector<Expression>>();
  for (const auto& c : components) exprs->push_back(Expression::parse(c, {"t"}));
  const int dim = static_cast<int>(components.size());
  auto component = [exprs, dim](double t, int order) {
    Vec out(dim);
    for (int k = 0; k < dim; ++k) {
      const Jet j = (*exprs)[static_cast<std::size_t>(k)].evaluate_jet(t);
      out[k] = order == 0 ? j.value : order == 1 ? j.d1 : j.d2;
    }
    return out;
  };
  return analytic(
      dim, [component](double t) { return component(t, 0); }, [component](double t) { return component(t, 1); },
      [component](double t) { return component(t, 2); }, t0, t1, closed);
}

CurveSpec CurveSpec::polyline(std::vector<Vec> points, bool closed) {
  CurveSpec s;
  s.kind_ = Kind::polyline;
  s.dimension_ = points.empty() ? 0 : static_cast<int>(points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].size() != s.dimension_)
      throw ValidationError("polyline point " + std::to_string(i) + " has dimension " +
                            std::to_string(points[i].size()) + ", expected " + std::to_string(s.dimension_));
  s.points_ = std::move(points);
  s.closed_ = closed;
  s.t0_ = 0.0;
  s.t1_ = s.points_.empty() ? 0.0 : static_cast<double>(s.points_.size() - 1);
  return s;
}

Vec CurveSpec::position(double t) const {
  if (kind_ == Kind::analytic) return position_(t);
  // Polylines: piecewise linear in the vertex index.
  const double clamped = std::clamp(t, t0_, t1_);
  const auto i = std::min(static_cast<std::size_t>(clamped), points_.size() - 2);
  const double f = clamped - static_cast<double>(i);
  return (1.0 - f) * points_[i] + f * points_[i + 1];
}

Vec CurveSpec::velocity(double t) const {
  if (velocity_) return velocity_(t);
  const double h = 1e-3 * (t1_ - t0_);
  return (8.0 * (position(t + h) - position(t - h)) - (position(t + 2 * h) - position(t - 2 * h))) / (12.0 * h);
}

Vec CurveSpec::acceleration(double t) const {
  if (acceleration_) return acceleration_(t);
  const double h = 1e-2 * (t1_ - t0_);
  return (16.0 * (position(t + h) + position(t - h)) - (position(t + 2 * h) + position(t - 2 * h)) -
          30.0 * position(t)) /
         (12.0 * h * h);
}

void CurveSpec::validate() const {
  if (kind_ == Kind::polyline) {
    if (points_.size() < 3) throw ValidationError("polyline needs at least 3 points");
    double length = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].size() != dimension_ || dimension_ < 2)
        throw ValidationError("polyline point " + std::to_string(i) + " has inconsistent dimension");
      if (i > 0) length += (points_[i] - points_[i - 1]).norm();
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if ((points_[i] - points_[i - 1]).norm() <= 1e-12 * length)
        throw ValidationError("polyline has duplicate consecutive points at index " + std::to_string(i));
    }
    if (closed_ && (points_.back() - points_.front()).norm() > 1e-9 * length)
      throw ValidationError("closed polyline does not end at its first point");
    return;
  }

  if (dimension_ < 2) throw ValidationError("curve dimension must be at least 2");
  if (!(t1_ > t0_)) throw ValidationError("curve parameter interval must satisfy t0 < t1");
  const double range = t1_ - t0_;
  double length = 0.0;
  Vec prev = position(t0_);
  if (prev.size() != dimension_) throw ValidationError("position function returned wrong dimension");
  for (int k = 1; k <= 64; ++k) {
    Vec p = position(t0_ + range * k / 64.0);
    length += (p - prev).norm();
    prev = std::move(p);
  }
  if (closed_ && (position(t1_) - position(t0_)).norm() > 1e-9 * length)
    throw ValidationError("closed curve does not return to its start within 1e-9 * length");

  if (velocity_) {
    const double h = 1e-4 * range;
    for (int k = 1; k < 8; ++k) {
      const double t = t0_ + range * k / 8.0;
      const Vec d1 = velocity_(t);
      const Vec d2 = acceleration_(t);
      const Vec fd1 = (position_(t + h) - position_(t - h)) / (2 * h);
      const Vec fd2 = (velocity_(t + h) - velocity_(t - h)) / (2 * h);
      const double scale1 = 1.0 + d1.norm() + position_(t).norm() / range;
      const double scale2 = 1.0 + d2.norm() + d1.norm() / range;
      if ((d1 - fd1).norm() > 1e-4 * scale1)
        throw ValidationError("supplied first derivative disagrees with differences of the position at t=" +
                              describe(t));
      if ((d2 - fd2).norm() > 1e-4 * scale2)
        throw ValidationError("supplied second derivative disagrees with differences of the velocity at t=" +
                              describe(t));
    }
  }
}

CurveSamples sample_curve(const CurveSpec& spec, int n_samples, const SampleOptions& options) {
  return sample_curve(std::make_shared<const CurveSpec>(spec), n_samples, options);
}

CurveSamples sample_curve(std::shared_ptr<const CurveSpec> spec, int n_samples, const SampleOptions& options) {
  spec->validate();
  CurveSamples c;
  c.closed = spec->closed();

  if (spec->kind() == CurveSpec::Kind::polyline) {
    const auto& pts = spec->points();
    for (std::size_t i = 0; i < pts.size(); ++i) c.params.push_back(static_cast<double>(i));
    c.positions = pts;
    c.velocities = differentiate(c.params, c.positions, c.closed);
    c.accelerations = differentiate2(c.params, c.positions, c.closed);
    fill_speeds(c, options);
    c.cumulative_arclength.assign(1, 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
      c.cumulative_arclength.push_back(c.cumulative_arclength.back() + (pts[i] - pts[i - 1]).norm());
    c.source = std::move(spec);
    c.source_params = c.params;
    return c;
  }

  if (n_samples < 4) throw ValidationError("n_samples must be at least 4");
  const auto n = static_cast<std::size_t>(n_samples);
  const double t0 = spec->t0(), t1 = spec->t1();
  c.params.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.params[i] = i + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  for (double t : c.params) c.positions.push_back(spec->position(t));
  if (spec->has_derivatives()) {
    for (double t : c.params) {
      c.velocities.push_back(spec->velocity(t));
      c.accelerations.push_back(spec->acceleration(t));
    }
  } else {
    c.velocities = differentiate(c.params, c.positions, c.closed);
    c.accelerations = differentiate2(c.params, c.positions, c.closed);
  }
  fill_speeds(c, options);

  c.cumulative_arclength.assign(1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double piece =
        integrate([&](double t) { return spec->velocity(t).norm(); }, c.params[i - 1], c.params[i]);
    c.cumulative_arclength.push_back(c.cumulative_arclength.back() + piece);
  }
  c.source_params = c.params;
  c.source = std::move(spec);
  return c;
}

LengthMeasure euclidean_length() {
  LengthMeasure m;
  m.name = "euclidean";
  m.speed = [](const Vec&, const Vec& v) { return v.norm(); };
  m.speed_rate = [](const Vec&, const Vec& v, const Vec& a) { return v.dot(a) / v.norm(); };
  m.chord = [](const Vec& a, const Vec& b) { return (b - a).norm(); };
  return m;
}

CurveSamples reparametrize_by_length(const CurveSamples& c, const LengthMeasure& measure) {
  const std::size_t n = c.size();
  if (n < 2) throw ValidationError("reparametrization needs at least 2 samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.speeds[i] > 0.0))
      throw DegenerateCurveError("reparametrization requires positive speed, sample " + std::to_string(i),
                                 c.params[i]);
  }

  CurveSamples out;
  out.closed = c.closed;
  out.length_metric = measure.name;

  const bool analytic = c.source && c.source->kind() == CurveSpec::Kind::analytic &&
                        c.source_params.size() == n;
  if (!analytic) {
    // Vertices stay put; the parameter becomes cumulative chord length.
    out.positions = c.positions;
    out.params.assign(1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double piece = measure.chord(c.positions[i - 1], c.positions[i]);
      if (!(piece > 0.0)) throw ConsistencyError("non-monotone cumulative arclength at sample " + std::to_string(i));
      out.params.push_back(out.params.back() + piece);
    }
    out.cumulative_arclength = out.params;
    out.velocities = differentiate(out.params, out.positions, out.closed);
    out.accelerations = differentiate2(out.params, out.positions, out.closed);
    for (std::size_t i = 0; i < n; ++i) out.velocities[i] /= measure.speed(out.positions[i], out.velocities[i]);
    out.speeds.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.speeds[i] = out.velocities[i].norm();
    out.source = c.source;
    out.source_params = c.source_params;
    return out;
  }

  const CurveSpec& spec = *c.source;
  auto sigma = [&](double t) { return measure.speed(spec.position(t), spec.velocity(t)); };

  const auto& tp = c.source_params;
  std::vector<double> node_length(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    node_length[i] = node_length[i - 1] + integrate(sigma, tp[i - 1], tp[i]);
    if (!(node_length[i] > node_length[i - 1]))
      throw ConsistencyError("non-monotone cumulative arclength at sample " + std::to_string(i));
  }
  const double total = node_length.back();

  out.params.resize(n);
  std::vector<double> new_t(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double target = j + 1 == n ? total : total * static_cast<double>(j) / static_cast<double>(n - 1);
    out.params[j] = target;
    if (j == 0) {
      new_t[j] = tp.front();
      continue;
    }
    if (j + 1 == n) {
      new_t[j] = tp.back();
      continue;
    }
    auto it = std::upper_bound(node_length.begin(), node_length.end(), target);
    std::size_t k = static_cast<std::size_t>(std::distance(node_length.begin(), it));
    k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
    const double a = tp[k], b = tp[k + 1];
    double t = a + (b - a) * (target - node_length[k]) / (node_length[k + 1] - node_length[k]);
    for (int iter = 0; iter < 60; ++iter) {
      const double residual = node_length[k] + integrate(sigma, a, t) - target;
      const double step = residual / sigma(t);
      t = std::clamp(t - step, a, b);
      if (std::abs(residual) <= 1e-14 * std::max(1.0, total) || std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) break;
    }
    new_t[j] = t;
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double t = new_t[j];
    const Vec x = spec.position(t);
    const Vec v = spec.velocity(t);
    const Vec a = spec.acceleration(t);
    const double s = measure.speed(x, v);
    const double rate = measure.speed_rate(x, v, a);
    out.positions.push_back(x);
    out.velocities.push_back(v / s);
    out.accelerations.push_back((a - (rate / s) * v) / (s * s));
  }
  out.speeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.speeds[i] = out.velocities[i].norm();
  out.cumulative_arclength = out.params;
  out.source = c.source;
  out.source_params = std::move(new_t);
  return out;
}

CurveSamples arclength_reparametrize(const CurveSamples& c) { return reparametrize_by_length(c, euclidean_length()); }

FrenetData frenet_frame(const CurveSamples& c, const FrenetOptions& options) {
  if (c.dimension() != 3) throw UnsupportedDimensionError("Frenet frame requires dimension 3");
  const std::size_t n = c.size();
  const double kappa_min = options.kappa_min > 0.0 ? options.kappa_min : 1e-8 / std::max(c.length(), 1e-300);
  const std::vector<Vec> jerk = differentiate(c.params, c.accelerations, c.closed);

  FrenetData f;
  std::vector<std::size_t> flat;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& v = c.velocities[i];
    const Vec& a = c.accelerations[i];
    const Vec va = cross3(v, a);
    const double speed = v.norm();
    const double kappa = va.norm() / (speed * speed * speed);
    if (!(kappa >= kappa_min)) {
      flat.push_back(i);
      continue;
    }
    const Vec t = v / speed;
    const Vec b = va.normalized();
    f.tangent.push_back(t);
    f.binormal.push_back(b);
    f.normal.push_back(cross3(b, t));
    f.curvature.push_back(kappa);
    f.torsion.push_back(va.dot(jerk[i]) / va.squaredNorm());
  }
  if (!flat.empty()) {
    std::ostringstream os;
    os << "Frenet frame undefined: curvature below " << kappa_min << " at " << flat.size() << " sample(s):";
    for (std::size_t k = 0; k < std::min<std::size_t>(flat.size(), 10); ++k) os << ' ' << flat[k];
    if (flat.size() > 10) os << " ...";
    throw FrenetUndefinedError(os.str(), std::move(flat));
  }
  return f;
}

double frenet_serret_residual(const CurveSamples& c, const FrenetData& frame) {
  const auto dn = differentiate(c.params, frame.normal, c.closed);
  const auto db = differentiate(c.params, frame.binormal, c.closed);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = frame.curvature[i], tau = frame.torsion[i];
    const Vec n_rate = dn[i] / c.speeds[i];
    const Vec b_rate = db[i] / c.speeds[i];
    worst = std::max(worst, (n_rate + k * frame.tangent[i] - tau * frame.binormal[i]).norm());
    worst = std::max(worst, (b_rate + tau * frame.normal[i]).norm());
  }
  return worst;
}

CurveSamples reverse(const CurveSamples& c) {
  CurveSamples r;
  const std::size_t n = c.size();
  r.closed = c.closed;
  r.length_metric = c.length_metric;
  const double p0 = c.params.front(), p1 = c.params.back();
  const double total = c.length();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = n - 1 - k;
    r.params.push_back(k + 1 == n ? p1 : p0 + p1 - c.params[i]);
    r.positions.push_back(c.positions[i]);
    r.velocities.push_back(-c.velocities[i]);
    r.accelerations.push_back(c.accelerations[i]);
    r.speeds.push_back(c.speeds[i]);
    r.cumulative_arclength.push_back(k == 0 ? 0.0 : total - c.cumulative_arclength[i]);
  }
  if (c.source && c.source->kind() == CurveSpec::Kind::analytic && c.source_params.size() == n) {
    auto src = c.source;
    const double a = src->t0(), b = src->t1();
    r.source = std::make_shared<const CurveSpec>(CurveSpec::analytic(
        src->dimension(), [src, a, b](double t) { return src->position(a + b - t); },
        [src, a, b](double t) { return Vec(-src->velocity(a + b - t)); },
        [src, a, b](double t) { return src->acceleration(a + b - t); }, a, b, src->closed()));
    for (std::size_t k = 0; k < n; ++k) r.source_params.push_back(a + b - c.source_params[n - 1 - k]);
  }
  return r;
}

namespace curves {

std::shared_ptr<const CurveSpec> line(const Vec& from, const Vec& to) {
  const Vec d = to - from;
  const int dim = static_cast<int>(from.size());
  return std::make_shared<const CurveSpec>(CurveSpec::analytic(
      dim, [from, d](double t) { return Vec(from + t * d); }, [d](double) { return d; },
      [dim](double) { return Vec(Vec::Zero(dim)); }, 0.0, 1.0, false));
}

std::shared_ptr<const CurveSpec> circle(double radius, double turns) {
  return std::make_shared<const CurveSpec>(CurveSpec::analytic(
      3, [radius](double t) { return vec3(radius * std::cos(t), radius * std::sin(t), 0.0); },
      [radius](double t) { return vec3(-radius * std::sin(t), radius * std::cos(t), 0.0); },
      [radius](double t) { return vec3(-radius * std::cos(t), -radius * std::sin(t), 0.0); }, 0.0,
      2.0 * std::numbers::pi * turns, true));
}

std::shared_ptr<const CurveSpec> helix(double a, double b, double t0, double t1) {
  return std::make_shared<const CurveSpec>(CurveSpec::analytic(
      3, [a, b](double t) { return vec3(a * std::cos(t), a * std::sin(t), b * t); },
      [a, b](double t) { return vec3(-a * std::sin(t), a * std::cos(t), b); },
      [a](double t) { return vec3(-a * std::cos(t), -a * std::sin(t), 0.0); }, t0, t1, false));
}

}  // namespace curves
}  // namespace rmf
