#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmf/types.hpp"

namespace rmf {

/// A curve definition: either closed-form over [t0, t1] or an ordered point list.
class CurveSpec {
 public:
  enum class Kind { analytic, polyline };
  using PointFn = std::function<Vec(double)>;

  /// Derivative functions are optional; when absent, sampling falls back to
  /// grid differencing.
  static CurveSpec analytic(int dimension, PointFn position, PointFn velocity, PointFn acceleration,
                            double t0, double t1, bool closed);

  /// Builds position, velocity and acceleration from calculator expressions in t.
  static CurveSpec from_expressions(const std::vector<std::string>& components, double t0, double t1,
                                    bool closed);

  static CurveSpec polyline(std::vector<Vec> points, bool closed);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  bool closed() const noexcept { return closed_; }
  bool has_derivatives() const noexcept { return static_cast<bool>(velocity_); }
  const std::vector<Vec>& points() const noexcept { return points_; }

  Vec position(double t) const;
  /// Analytic derivative if supplied, otherwise a fourth-order difference of position().
  Vec velocity(double t) const;
  Vec acceleration(double t) const;

  /// Throws ValidationError when an invariant does not hold: supplied
  /// derivatives disagree with differences of the position, a polyline has
  /// fewer than 3 points or repeated consecutive points, or a closed curve
  /// does not return to its start within 1e-9 * length.
  void validate() const;

 private:
  CurveSpec() = default;

  Kind kind_ = Kind::analytic;
  int dimension_ = 0;
  PointFn position_, velocity_, acceleration_;
  double t0_ = 0.0, t1_ = 1.0;
  bool closed_ = false;
  std::vector<Vec> points_;
};

/// Discretized curve. Parameters strictly increase; closed curves repeat the
/// first point as the last sample.
struct CurveSamples {
  std::vector<double> params;
  std::vector<Vec> positions;
  std::vector<Vec> velocities;     // d(position)/d(param)
  std::vector<Vec> accelerations;  // d2(position)/d(param)2
  std::vector<double> speeds;      // coordinate norm of velocities
  std::vector<double> cumulative_arclength;
  std::string length_metric = "euclidean";  // metric the arclength table was measured in
  bool closed = false;
  std::shared_ptr<const CurveSpec> source;  // null when there is no evaluator to resample from
  std::vector<double> source_params;        // parameter of `source` at each sample

  std::size_t size() const noexcept { return params.size(); }
  int dimension() const noexcept { return positions.empty() ? 0 : static_cast<int>(positions.front().size()); }
  double length() const noexcept { return cumulative_arclength.empty() ? 0.0 : cumulative_arclength.back(); }
};

struct FrenetData {
  std::vector<Vec> tangent;
  std::vector<Vec> normal;
  std::vector<Vec> binormal;
  std::vector<double> curvature;
  std::vector<double> torsion;
};

struct SampleOptions {
  /// Samples with speed below this fraction of the peak speed are degenerate.
  double degenerate_speed = 1e-12;
};

/// n_samples uniformly spaced parameters over [t0, t1] (inclusive). A
/// polyline is sampled at its own vertices and n_samples is not used.
CurveSamples sample_curve(const CurveSpec& spec, int n_samples, const SampleOptions& options = {});
CurveSamples sample_curve(std::shared_ptr<const CurveSpec> spec, int n_samples,
                          const SampleOptions& options = {});

/// Speed and its rate of change for a length measure along a curve.
struct LengthMeasure {
  std::string name;
  /// sigma(x, x') > 0
  std::function<double(const Vec&, const Vec&)> speed;
  /// d sigma / dt given (x, x', x'')
  std::function<double(const Vec&, const Vec&, const Vec&)> speed_rate;
  /// Length of the straight chord from a to b (used for polylines).
  std::function<double(const Vec&, const Vec&)> chord;
};

LengthMeasure euclidean_length();

/// Resamples the curve at uniformly spaced values of the given length
/// measure, same sample count. Curves with an analytic source are evaluated
/// exactly at the new parameters; polylines keep their vertices and take
/// cumulative chord length as parameter.
CurveSamples reparametrize_by_length(const CurveSamples& c, const LengthMeasure& measure);

/// Euclidean arclength reparametrization.
CurveSamples arclength_reparametrize(const CurveSamples& c);

struct FrenetOptions {
  /// Curvature threshold; <= 0 selects 1e-8 / length.
  double kappa_min = 0.0;
};

/// Frenet frame, curvature and torsion (dimension 3). Torsion uses a
/// differenced third derivative.
FrenetData frenet_frame(const CurveSamples& c, const FrenetOptions& options = {});

/// Max Frenet-Serret residuals max(|n' + k t - tau b|, |b' + tau n|) with
/// n', b' obtained by grid differencing.
double frenet_serret_residual(const CurveSamples& c, const FrenetData& frame);

/// Same curve traversed backwards (parameter p -> p0 + p1 - p).
CurveSamples reverse(const CurveSamples& c);

/// Built-in analytic curves used by tests, examples and the CLI.
namespace curves {
std::shared_ptr<const CurveSpec> line(const Vec& from, const Vec& to);
/// Circle of the given radius in the xy-plane, `turns` full turns, closed.
std::shared_ptr<const CurveSpec> circle(double radius, double turns = 1.0);
/// (a cos t, a sin t, b t) for t in [t0, t1].
std::shared_ptr<const CurveSpec> helix(double a, double b, double t0, double t1);
}  // namespace curves

}  // namespace rmf
