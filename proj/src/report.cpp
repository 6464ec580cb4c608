#include "rmf/report.hpp"

#include <cmath>
#include <ostream>

#include "rmf/errors.hpp"
#include "rmf/euclidean_rm.hpp"
#include "rmf/grid.hpp"
#include "rmf/riemannian.hpp"

namespace rmf::report {
namespace {

double sup_difference(const NormalField& a, const NormalField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.vectors[i] - b.vectors[i]).cwiseAbs().maxCoeff());
  return worst;
}

Vec seed_for(const CurveSamples& c, const MetricChart& chart, const std::optional<Vec>& seed) {
  if (seed) return *seed;
  return normal_basis(c.positions.front(), c.velocities.front(), chart).front();
}

}  // namespace

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json item = {{"name", c.name}, {"measured", c.measured}, {"threshold", c.threshold}, {"passed", c.passed}};
    if (!c.note.empty()) item["note"] = c.note;
    items.push_back(item);
  }
  nlohmann::json out = {{"passed", passed()},
                        {"checks", items},
                        {"drift", {{"max_step", max_step_drift}, {"mean_step", mean_step_drift}}},
                        {"provenance", provenance}};
  out["convergence_order"] = convergence_order ? nlohmann::json(*convergence_order) : nlohmann::json(nullptr);
  return out;
}

void Report::write_text(std::ostream& out) const {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": measured " << c.measured << " threshold " << c.threshold;
    if (!c.note.empty()) out << " (" << c.note << ")";
    out << '\n';
  }
  out << "step drift: max " << max_step_drift << ", mean " << mean_step_drift << '\n';
  out << (passed() ? "overall: PASS" : "overall: FAIL") << '\n';
}

CurveSamples prepare_curve(const std::shared_ptr<const CurveSpec>& curve, const MetricChart& chart, int n_samples) {
  const CurveSamples raw = sample_curve(curve, n_samples);
  if (raw.dimension() != chart.dimension())
    throw ValidationError("curve dimension does not match chart '" + chart.name() + "'");
  return chart.flat() ? arclength_reparametrize(raw) : g_arclength_reparametrize(raw, chart);
}

Report run(const Inputs& in) {
  const MetricChart& chart = in.chart.chart;
  const bool flat = chart.flat();
  const Tolerances& tol = in.tolerances;
  const double drift_tol = flat ? 1e-9 : 1e-8;

  Report report;
  report.provenance = {{"version", version}, {"config", in.config_echo}};

  const CurveSamples c = prepare_curve(in.curve, chart, in.n_samples);
  const Vec& x0 = c.positions.front();
  const Vec& t0 = c.velocities.front();

  // Transported basis of the initial normal space.
  std::vector<Vec> basis = normal_basis(x0, t0, chart);
  if (in.seed) {
    const Mat g = chart.metric(x0);
    Vec s = *in.seed - (in.seed->dot(g * t0)) * t0;
    const double len = std::sqrt(s.dot(g * s));
    if (len == 0.0) throw ValidationError("seed vector is tangent to the curve");
    basis.front() = s / len;
    for (std::size_t k = 1; k < basis.size(); ++k) {
      for (std::size_t m = 0; m < k; ++m) basis[k] -= basis[k].dot(g * basis[m]) * basis[m];
      basis[k] /= std::sqrt(basis[k].dot(g * basis[k]));
    }
  }
  std::vector<NormalField> fields;
  for (const Vec& b : basis) fields.push_back(normal_parallel_transport(c, chart, b));

  double drift_sum = 0.0;
  std::size_t drift_count = 0;
  for (const auto& f : fields) {
    report.max_step_drift = std::max(report.max_step_drift, f.max_drift());
    for (double d : f.step_drift) drift_sum += d, ++drift_count;
  }
  report.mean_step_drift = drift_count ? drift_sum / static_cast<double>(drift_count) : 0.0;

  double norm_drift = 0.0, angle_drift = 0.0, compat = 0.0;
  for (std::size_t a = 0; a < fields.size(); ++a) {
    for (std::size_t b = a; b < fields.size(); ++b) {
      std::vector<Vec> series;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const Mat g = chart.metric(c.positions[i]);
        series.push_back(Vec::Constant(1, fields[a].vectors[i].dot(g * fields[b].vectors[i])));
      }
      const double start = series.front()[0];
      for (const auto& v : series) {
        const double drift = a == b ? std::abs(std::sqrt(v[0]) - std::sqrt(start)) / std::sqrt(start)
                                    : std::abs(v[0] - start);
        (a == b ? norm_drift : angle_drift) = std::max(a == b ? norm_drift : angle_drift, drift);
      }
      for (const auto& d : differentiate(c.params, series, c.closed)) compat = std::max(compat, std::abs(d[0]));
    }
  }
  report.checks.push_back({"norm_drift", norm_drift, tol.norm_drift.value_or(drift_tol),
                           norm_drift < tol.norm_drift.value_or(drift_tol), ""});
  report.checks.push_back({"angle_drift", angle_drift, tol.angle_drift.value_or(drift_tol),
                           angle_drift < tol.angle_drift.value_or(drift_tol), ""});
  report.checks.push_back({"metric_compatibility", compat, tol.metric_compatibility, compat < tol.metric_compatibility,
                           "max |d/ds g(v, w)| over transported pairs"});

  // Field under test.
  NormalField subject = fields.front();
  std::string subject_name = "rm";
  if (in.field == FieldKind::frenet_normal) {
    if (!flat || c.dimension() != 3)
      throw ValidationError("--field frenet-normal requires a flat three-dimensional chart");
    subject = frenet_normal_field(c);
    subject_name = "frenet-normal";
  }
  const double dperp = normal_connection_residual(c, subject, chart);
  report.checks.push_back({"dperp_residual", dperp, tol.field_residual, dperp < tol.field_residual,
                           "field: " + subject_name});
  if (flat) {
    const RmVerdict verdict = is_rm(c, subject, tol.field_residual);
    report.checks.push_back({"is_rm", verdict.max_residual, tol.field_residual, verdict.verdict, "field: " + subject_name});
    if (c.dimension() == 3) {
      const double dev = developability_residual(c, subject);
      report.checks.push_back({"developability", dev, tol.field_residual, dev < tol.field_residual,
                               "field: " + subject_name});
    }
    double agreement = 0.0;
    for (const auto& f : fields) agreement = std::max(agreement, sup_difference(rm_transport(c, f.vectors.front()), f));
    report.checks.push_back({"flat_transport_agreement", agreement, tol.agreement, agreement < tol.agreement,
                             "RM transport vs normal-connection transport"});
  }

  for (const Isometry& mu : in.chart.isometries) {
    double worst = 0.0;
    for (const auto& f : fields) {
      const PushedField pushed = pushforward_field(mu, c, f);
      const NormalField again = normal_parallel_transport(pushed.curve, chart, pushed.field.vectors.front());
      worst = std::max(worst, sup_difference(again, pushed.field));
    }
    report.checks.push_back({"isometry_equivariance[" + mu.name + "]", worst, tol.equivariance, worst < tol.equivariance, ""});
  }

  // Step halving on nested grids with 40, 80 and 160 intervals.
  {
    std::vector<NormalField> levels;
    std::vector<CurveSamples> grids;
    for (int m : {40, 80, 160}) {
      grids.push_back(prepare_curve(in.curve, chart, m + 1));
      levels.push_back(normal_parallel_transport(grids.back(), chart, seed_for(grids.back(), chart, basis.front())));
    }
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < levels[0].size(); ++i)
      e1 = std::max(e1, (levels[0].vectors[i] - levels[1].vectors[2 * i]).cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < levels[1].size(); ++i)
      e2 = std::max(e2, (levels[1].vectors[i] - levels[2].vectors[2 * i]).cwiseAbs().maxCoeff());
    const double scale = std::max(1.0, levels[0].vectors.front().cwiseAbs().maxCoeff());
    if (e1 <= 1e-11 * scale) {
      report.checks.push_back({"convergence_order", 0.0, tol.min_order, true, "step-halving differences at roundoff"});
    } else {
      const double order = std::log2(e1 / std::max(e2, 1e-300));
      report.convergence_order = order;
      report.checks.push_back({"convergence_order", order, tol.min_order, order >= tol.min_order, ""});
    }
  }
  return report;
}

}  // namespace rmf::report
