#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rmf/curve.hpp"
#include "rmf/euclidean_rm.hpp"
#include "rmf/model_manifolds.hpp"
#include "rmf/riemannian.hpp"

namespace support {

inline rmf::Vec vec(const oracle::V3& v) { return rmf::Vec(v); }
inline oracle::V3 v3(const rmf::Vec& v) { return oracle::V3(v[0], v[1], v[2]); }

inline std::shared_ptr<const rmf::CurveSpec> from_oracle(const oracle::AnalyticCurve& c, bool closed = false) {
  return std::make_shared<const rmf::CurveSpec>(rmf::CurveSpec::analytic(
      3, [c](double t) { return vec(c.x(t)); }, [c](double t) { return vec(c.dx(t)); },
      [c](double t) { return vec(c.ddx(t)); }, c.t0, c.t1, closed));
}

inline std::shared_ptr<const rmf::CurveSpec> expr(const std::vector<std::string>& xyz, double t0, double t1,
                                                  bool closed = false) {
  return std::make_shared<const rmf::CurveSpec>(rmf::CurveSpec::from_expressions(xyz, t0, t1, closed));
}

// Unit-speed samples in the chart metric.
inline rmf::CurveSamples unit_speed(const std::shared_ptr<const rmf::CurveSpec>& spec, int n,
                                    const rmf::MetricChart& chart) {
  const rmf::CurveSamples raw = rmf::sample_curve(spec, n);
  return chart.flat() ? rmf::arclength_reparametrize(raw) : rmf::g_arclength_reparametrize(raw, chart);
}

inline double sup_diff(const rmf::NormalField& a, const rmf::NormalField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.vectors[i] - b.vectors[i]).cwiseAbs().maxCoeff());
  return worst;
}

// Largest |g(v_i, w_i) - g(v_0, w_0)| along the curve.
inline double pair_drift(const rmf::CurveSamples& c, const rmf::MetricChart& chart, const rmf::NormalField& v,
                         const rmf::NormalField& w) {
  const double ref = chart.inner(c.positions[0], v.vectors[0], w.vectors[0]);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    worst = std::max(worst, std::abs(chart.inner(c.positions[i], v.vectors[i], w.vectors[i]) - ref));
  return worst;
}

}  // namespace support
