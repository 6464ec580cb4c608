#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmf/curve.hpp"
#include "rmf/model_manifolds.hpp"

namespace rmf::report {

/// Thresholds for the invariant suite. Drift thresholds left unset pick
/// 1e-9 for flat charts and 1e-8 otherwise.
struct Tolerances {
  std::optional<double> norm_drift;
  std::optional<double> angle_drift;
  double field_residual = 1e-3;  // is_rm, D-perp and developability residuals
  double agreement = 1e-8;       // flat-chart RM vs normal-connection transport
  double equivariance = 1e-7;
  double metric_compatibility = 1e-8;
  double min_order = 3.5;
};

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string note;
};

struct Report {
  std::vector<CheckResult> checks;
  double max_step_drift = 0.0;
  double mean_step_drift = 0.0;
  std::optional<double> convergence_order;
  nlohmann::json provenance;

  bool passed() const;
  nlohmann::json to_json() const;
  void write_text(std::ostream& out) const;
};

enum class FieldKind { rm, frenet_normal };

struct Inputs {
  std::shared_ptr<const CurveSpec> curve;
  manifolds::ChartCatalogEntry chart;
  int n_samples = 2000;
  std::optional<Vec> seed;
  FieldKind field = FieldKind::rm;
  Tolerances tolerances;
  nlohmann::json config_echo;
};

/// Samples the curve in the chart (unit speed in the chart metric) and runs
/// every applicable check.
Report run(const Inputs& inputs);

/// Samples and reparametrizes by length in the chart metric.
CurveSamples prepare_curve(const std::shared_ptr<const CurveSpec>& curve, const MetricChart& chart, int n_samples);

inline constexpr const char* version = "rmframe 1.0.0";

}  // namespace rmf::report
