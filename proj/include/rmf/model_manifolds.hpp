#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rmf/riemannian.hpp"

namespace rmf::manifolds {

struct ChartCatalogEntry {
  std::string name;
  MetricChart chart;
  /// (point, g-unit direction, g-arclength) -> point; empty when not provided.
  std::function<Vec(const Vec&, const Vec&, double)> geodesic;
  std::vector<Isometry> isometries;
  std::string doc;
};

/// euclidean3, sphere3_stereographic, hyperbolic3_halfspace, flat_torus3,
/// warped_product_demo. Unknown names raise CatalogError listing these.
ChartCatalogEntry get_chart(std::string_view name);
std::vector<std::string> chart_names();

/// Unit 3-sphere in R^4 seen through stereographic projection from (0,0,0,1):
/// X(x) = (2x, |x|^2 - 1) / (1 + |x|^2).
namespace sphere3 {
Vec to_embedding(const Vec& x);
Mat embedding_jacobian(const Vec& x);
Vec from_embedding(const Vec& X);
/// Chart vector whose image under the Jacobian at x is the R^4 vector w
/// (w tangent to the sphere at X(x)).
Vec pull_back(const Vec& x, const Vec& w);
inline constexpr double chart_radius = 1e3;
}  // namespace sphere3

/// Transport computed in R^4: each step projects the previous vector onto the
/// orthogonal complement of span{X, T} at the next sample and restores the
/// norm; the result is pulled back to the stereographic chart.
NormalField embedding_oracle_transport(const CurveSamples& c, const Vec& v0);

}  // namespace rmf::manifolds
