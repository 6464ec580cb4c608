#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rmf/curve.hpp"
#include "rmf/euclidean_rm.hpp"
#include "rmf/types.hpp"

namespace rmf {

/// Christoffel symbols of the second kind: upper[k](i, j) = Gamma^k_ij.
struct Christoffel {
  std::vector<Mat> upper;

  int dimension() const noexcept { return static_cast<int>(upper.size()); }
  /// (Gamma^k_ij u^i w^j)_k
  Vec contract(const Vec& u, const Vec& w) const;
};

/// Coordinate chart with a Riemannian metric. Immutable once built.
class MetricChart {
 public:
  using MetricFn = std::function<Mat(const Vec&)>;
  using ChristoffelFn = std::function<Christoffel(const Vec&)>;
  using DomainFn = std::function<bool(const Vec&)>;

  struct Options {
    /// Finite-difference step for Christoffels is fd_step * coordinate_scale.
    double fd_step = 1e-5;
    double coordinate_scale = 1.0;
    /// Metric is constant; Christoffels vanish.
    bool flat = false;
    /// Per-coordinate period for charts with periodic identifications.
    std::optional<Vec> period;
  };

  MetricChart(std::string name, int dimension, MetricFn metric, std::optional<ChristoffelFn> christoffel,
              DomainFn domain, Options options);

  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return dimension_; }
  bool flat() const noexcept { return options_.flat; }
  bool has_closed_form_christoffel() const noexcept { return christoffel_.has_value(); }
  const Options& options() const noexcept { return options_; }

  bool contains(const Vec& x) const { return domain_(x); }
  Mat metric(const Vec& x) const { return metric_(x); }
  /// Throws unless g(x) is symmetric within 1e-12 and positive definite.
  Mat checked_metric(const Vec& x) const;
  /// Closed form when provided, otherwise christoffel_fd.
  Christoffel christoffel(const Vec& x) const;

  double inner(const Vec& x, const Vec& u, const Vec& w) const { return u.dot(metric_(x) * w); }
  double norm(const Vec& x, const Vec& u) const { return std::sqrt(inner(x, u, u)); }

  /// True when a and b are the same point, modulo the chart period if any.
  bool same_point(const Vec& a, const Vec& b, double tol) const;

 private:
  std::string name_;
  int dimension_;
  MetricFn metric_;
  std::optional<ChristoffelFn> christoffel_;
  DomainFn domain_;
  Options options_;
};

/// Levi-Civita Christoffels by centered differences of the metric with step h.
/// Throws SingularMetricError when g(x) has condition number above 1e12.
Christoffel christoffel_fd(const MetricChart::MetricFn& metric, const Vec& x, double h);

/// Split of a vector at a curve point into tangent and g-normal parts.
struct AmbientDecomposition {
  Vec tangent;
  Vec normal;
};

/// Requires g(t, t) = 1 within 1e-8.
AmbientDecomposition decompose(const Vec& x, const Vec& unit_tangent, const Vec& u, const MetricChart& chart);

/// (nabla_{gamma'} v)^k = dv^k/ds + Gamma^k_ij gamma'^i v^j at every sample.
std::vector<Vec> covariant_derivative_along(const CurveSamples& c, const NormalField& f, const MetricChart& chart);

/// max_i |normal part of nabla_{gamma'} v|_g / |v|_g, the D-perp residual;
/// samples with v = 0 contribute 0.
double normal_connection_residual(const CurveSamples& c, const NormalField& f, const MetricChart& chart);

/// Resample at uniform g-arclength (g-unit speed).
CurveSamples g_arclength_reparametrize(const CurveSamples& c, const MetricChart& chart);

/// Normal-connection parallel transport
///   dv/ds = -Gamma(gamma', v) + mu gamma',  mu = -g(nabla_{gamma'} gamma', v)
/// with g-orthogonal re-projection and g-norm restoration after each RK4 step.
/// Requires g-unit speed.
NormalField normal_parallel_transport(const CurveSamples& c, const MetricChart& chart, const Vec& v0,
                                      const TransportOptions& options = {});

/// Frame {t, v_1, ..., v_{n-1}} with every v_k transported. Initial vectors
/// must be g-orthonormal and g-orthogonal to t(s0).
FramedCurve rm_frame_manifold(const CurveSamples& c, const MetricChart& chart, const std::vector<Vec>& initial,
                              const TransportOptions& options = {});

/// g-orthonormal basis of the normal space at x, positively oriented with t.
std::vector<Vec> normal_basis(const Vec& x, const Vec& tangent, const MetricChart& chart);

struct Holonomy {
  Mat matrix;
  /// Rotation angle in (-pi, pi] when the normal space is 2-dimensional, NaN otherwise.
  double angle = 0.0;
  double orthogonality_residual = 0.0;
  std::vector<Vec> basis;
};

/// Loop transport in the g-orthonormal basis of the initial normal space.
Holonomy normal_holonomy(const CurveSamples& c, const MetricChart& chart, const TransportOptions& options = {});

/// Metric-preserving map with its differential.
struct Isometry {
  std::string name;
  std::function<Vec(const Vec&)> map;
  /// (x, u) -> mu_* u at x; empty selects a finite-difference Jacobian.
  std::function<Vec(const Vec&, const Vec&)> differential;
  std::function<bool(const Vec&)> domain;
  double fd_step = 1e-6;

  Vec apply(const Vec& x) const;
  Vec push(const Vec& x, const Vec& u) const;
  /// Second-order term D^2 mu(u, u) at x by differencing the differential.
  Vec curvature_term(const Vec& x, const Vec& u) const;
};

/// |g_{mu(x)}(mu_* u, mu_* w) - g_x(u, w)|
double isometry_defect(const Isometry& mu, const MetricChart& chart, const Vec& x, const Vec& u, const Vec& w);

struct PushedField {
  CurveSamples curve;
  NormalField field;
};

/// mu o gamma on the same parameter grid and mu_* v at every sample.
PushedField pushforward_field(const Isometry& mu, const CurveSamples& c, const NormalField& f);

}  // namespace rmf
