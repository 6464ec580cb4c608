#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rmf/curve.hpp"
#include "rmf/types.hpp"

namespace rmf {

/// Vector field along a sampled curve, orthogonal to the tangent.
struct NormalField {
  std::vector<double> params;  // grid of the curve it lives on
  std::vector<Vec> vectors;
  /// Tangential factor recorded during transport: v' = lambda * gamma'.
  std::vector<double> proportionality;
  /// Pre-correction drift at each step (0 at the first sample).
  std::vector<double> step_drift;
  /// |<v0, t(s0)>| removed from the seed before transport.
  double initial_projection = 0.0;

  std::size_t size() const noexcept { return vectors.size(); }
  double max_drift() const;
};

/// Curve samples plus an orthonormal moving frame; column 0 is the tangent.
struct FramedCurve {
  CurveSamples base;
  std::vector<Mat> frames;
};

/// Grid f(t_i, lambda_j) = gamma(t_i) + lambda_j v(t_i); row j holds lambda_j.
struct RuledSurfaceMesh {
  std::vector<double> lambdas;
  std::size_t columns = 0;  // samples along the curve
  std::vector<Vec> points;  // row-major: points[j * columns + i]
  std::vector<std::array<std::size_t, 4>> quads;

  const Vec& at(std::size_t row, std::size_t column) const { return points[row * columns + column]; }
};

struct TransportOptions {
  /// Seeds with |<v0, t0>| <= tolerance * |v0| are projected onto the normal
  /// plane; larger components are rejected.
  double normal_tolerance = 1e-6;
};

/// RM transport v' = lambda t with lambda = -<v, t'>, RK4 on the sample grid
/// with tangent data at half-steps from cubic interpolation. After each step v
/// is re-orthogonalized against t and rescaled to |v0|.
NormalField rm_transport(const CurveSamples& c, const Vec& v0, const TransportOptions& options = {});

struct RmVerdict {
  bool verdict = false;
  double max_residual = 0.0;
};

/// Residual max_i |v' - <v', t> t| / max(|v'|, eps) with v' by grid differencing.
RmVerdict is_rm(const CurveSamples& c, const NormalField& f, double tol);

/// Frame {t, u, t x u} with u the RM transport of u0 (dimension 3). Without u0
/// the standard basis vector least aligned with t(s0) is projected and normalized.
FramedCurve rm_frame(const CurveSamples& c, const std::optional<Vec>& u0 = std::nullopt,
                     const TransportOptions& options = {});

/// Default seed for rm_frame: normalized e_j - <e_j, t> t with j = argmin |t_j|.
Vec default_normal_seed(const Vec& tangent);

RuledSurfaceMesh ruled_surface(const CurveSamples& c, const NormalField& f, double lambda_min, double lambda_max,
                               int n_rulings);

/// max_i |det[gamma', v, v']| / (|gamma'| |v| max(|v'|, eps)); samples with
/// v = 0 contribute 0.
double developability_residual(const CurveSamples& c, const NormalField& f);

struct TwistSeries {
  std::vector<double> theta;
  double total_twist = 0.0;
};

/// Signed angle from the Frenet normal to the RM field seeded with n(s0), in
/// the normal plane oriented by (n, b); unwrapped.
TwistSeries frenet_rm_twist(const CurveSamples& c);

/// Frenet normal as a NormalField (for comparisons and non-RM examples).
NormalField frenet_normal_field(const CurveSamples& c);

/// Field given explicitly at every sample; no transport data recorded.
NormalField make_field(const CurveSamples& c, std::vector<Vec> vectors);

}  // namespace rmf
