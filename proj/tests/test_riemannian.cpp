#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "oracles.hpp"
#include "rmf/errors.hpp"
#include "rmf/model_manifolds.hpp"
#include "rmf/riemannian.hpp"
#include "support.hpp"

using namespace rmf;
using oracle::pi;
using oracle::V3;

namespace {

Vec random_point(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return vec3(u(rng), u(rng), u(rng));
}

MetricChart constant_chart(Mat g) {
  return MetricChart("constant", static_cast<int>(g.rows()), [g](const Vec&) { return g; }, std::nullopt,
                     [](const Vec&) { return true; }, {});
}

}  // namespace

TEST_CASE("finite-difference Christoffels match the conformal closed form") {
  std::mt19937 rng(7);
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const auto sphere = manifolds::get_chart("sphere3_stereographic");
  const oracle::ConformalMetric oh = oracle::halfspace(), os = oracle::stereographic_sphere();
  for (int k = 0; k < 20; ++k) {
    Vec x = random_point(rng, -1.0, 1.0);
    x[2] = 0.3 + std::abs(x[2]);
    const Vec u = random_point(rng, -1, 1), w = random_point(rng, -1, 1);
    for (const auto* pair : {&hyper, &sphere}) {
      const oracle::ConformalMetric& m = pair == &hyper ? oh : os;
      const Christoffel fd = christoffel_fd([&](const Vec& p) { return pair->chart.metric(p); }, x, 1e-5);
      const Vec exact = support::vec(m.gamma(support::v3(x), support::v3(u), support::v3(w)));
      CHECK((fd.contract(u, w) - exact).norm() < 1e-8 * (1.0 + exact.norm()));
      CHECK((pair->chart.christoffel(x).contract(u, w) - exact).norm() < 1e-12 * (1.0 + exact.norm()));
    }
  }
}

TEST_CASE("Levi-Civita compatibility at spot-checked points") {
  // d_k g_ij = Gamma^l_ki g_lj + Gamma^l_kj g_il, metric derivative by test-side differences.
  std::mt19937 rng(11);
  for (const char* name : {"hyperbolic3_halfspace", "sphere3_stereographic", "warped_product_demo"}) {
    const auto entry = manifolds::get_chart(name);
    for (int trial = 0; trial < 5; ++trial) {
      Vec x = random_point(rng, -0.8, 0.8);
      x[2] = 0.5 + std::abs(x[2]);
      if (std::string(name) == "warped_product_demo") x[0] = std::abs(x[0]) + 0.5;
      CAPTURE(name);
      const Christoffel gam = entry.chart.christoffel(x);
      const Mat g = entry.chart.metric(x);
      const double h = 1e-5;
      for (int k = 0; k < 3; ++k) {
        Vec e = Vec::Zero(3);
        e[k] = h;
        const Mat dg = (entry.chart.metric(x + e) - entry.chart.metric(x - e)) / (2 * h);
        Mat expected(3, 3);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int l = 0; l < 3; ++l) s += gam.upper[l](k, i) * g(l, j) + gam.upper[l](k, j) * g(i, l);
            expected(i, j) = s;
          }
        CHECK((dg - expected).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + dg.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("metric validation") {
  Mat asym = Mat::Identity(3, 3);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(constant_chart(asym).checked_metric(vec3(0, 0, 0)), ValidationError);
  Mat indefinite = Mat::Identity(3, 3);
  indefinite(2, 2) = -1.0;
  CHECK_THROWS_AS(constant_chart(indefinite).checked_metric(vec3(0, 0, 0)), ValidationError);
  Mat nearly_singular = Mat::Identity(3, 3);
  nearly_singular(2, 2) = 1e-14;
  try {
    (void)christoffel_fd([&](const Vec&) { return nearly_singular; }, vec3(0, 0, 0), 1e-5);
    FAIL("expected SingularMetricError");
  } catch (const SingularMetricError& e) {
    CHECK(e.condition() > 1e12);
  }
}

TEST_CASE("decomposition into tangent and normal parts") {
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const Vec x = vec3(0.1, 0.2, 2.0);
  const Vec t = vec3(0, 2.0, 0);  // g-unit at z = 2
  const Vec u = vec3(1.0, 3.0, -2.0);
  const AmbientDecomposition d = decompose(x, t, u, hyper.chart);
  CHECK((d.tangent + d.normal - u).norm() < 1e-15);
  CHECK(std::abs(hyper.chart.inner(x, d.normal, t)) < 1e-15);
  CHECK((d.tangent - vec3(0, 3.0, 0)).norm() < 1e-14);
  CHECK_THROWS_AS(decompose(x, vec3(0, 1, 0), u, hyper.chart), ValidationError);
}

TEST_CASE("hyperbolic transport matches the fine-step oracle") {
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const oracle::AnalyticCurve oc = oracle::rising_helix(0.5, 1.0, 0.2, 2 * pi);
  const CurveSamples c = support::unit_speed(support::from_oracle(oc), 2000, hyper.chart);
  const V3 seed(0.0, 0.0, 1.0);
  // Remove the tangential part in g at the start.
  const V3 t0 = oc.dx(0.0);
  const V3 v0 = seed - (seed.dot(t0) / t0.dot(t0)) * t0;
  const NormalField f = normal_parallel_transport(c, hyper.chart, support::vec(v0));
  const V3 expected = oracle::transport(oc, oracle::halfspace(), v0, 40000);
  CHECK((support::v3(f.vectors.back()) - expected).norm() < 1e-9);
  CHECK(c.length() == doctest::Approx(oracle::length(oc, oracle::halfspace())).epsilon(1e-12));
}

TEST_CASE("transport requires unit speed in the chart metric") {
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const CurveSamples raw = sample_curve(curves::helix(0.5, 0.2, 0.0, 3.0), 200);
  CHECK_THROWS_AS(normal_parallel_transport(raw, hyper.chart, vec3(1, 0, 0)), ValidationError);
}

TEST_CASE("curves leaving the chart domain are rejected") {
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const auto spec = support::expr({"t", "0", "1-t"}, 0.0, 2.0);
  try {
    (void)support::unit_speed(spec, 100, hyper.chart);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("hyperbolic3_halfspace") != std::string::npos);
  }
}

TEST_CASE("D-perp residual of a transported field is second order in the spacing") {
  const auto sphere = manifolds::get_chart("sphere3_stereographic");
  const auto spec = support::expr({"0.5*cos(t)", "0.5*sin(t)", "0.2*sin(2*t)"}, 0.0, 2 * pi, true);
  double previous = 0.0;
  for (int n : {500, 1000, 2000}) {
    const CurveSamples c = support::unit_speed(spec, n, sphere.chart);
    const auto basis = normal_basis(c.positions[0], c.velocities[0], sphere.chart);
    const double r = normal_connection_residual(c, normal_parallel_transport(c, sphere.chart, basis[0]), sphere.chart);
    CHECK(r < 1e-3);
    if (previous > 0.0) CHECK(previous / r > 3.0);
    previous = r;
  }
}

TEST_CASE("normal bases and manifold frames") {
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const Vec x = vec3(0.3, -0.1, 0.5);
  const Vec t = Vec(vec3(1, 2, 0.5)).normalized() * 0.5;  // g-unit at z = 0.5
  const auto basis = normal_basis(x, t, hyper.chart);
  REQUIRE(basis.size() == 2);
  const Mat g = hyper.chart.metric(x);
  Mat frame(3, 3);
  frame << t, basis[0], basis[1];
  CHECK((frame.transpose() * g * frame - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(frame.determinant() > 0.0);

  const CurveSamples c = support::unit_speed(support::from_oracle(oracle::rising_helix(0.5, 1.0, 0.2, 4.0)), 500, hyper.chart);
  const auto b0 = normal_basis(c.positions[0], c.velocities[0], hyper.chart);
  const FramedCurve fc = rm_frame_manifold(c, hyper.chart, b0);
  for (std::size_t i = 0; i < c.size(); i += 50) {
    const Mat gi = hyper.chart.metric(c.positions[i]);
    CHECK((fc.frames[i].transpose() * gi * fc.frames[i] - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
  }
  try {
    (void)rm_frame_manifold(c, hyper.chart, {b0[0], Vec(2.0 * b0[1])});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Gram") != std::string::npos);
  }
}

TEST_CASE("holonomy in a flat chart") {
  const auto flat = manifolds::get_chart("euclidean3");
  SUBCASE("planar loops give the identity") {
    for (const char* y : {"sin(t)", "0.4*sin(t)"}) {
      const auto spec = support::expr({"cos(t)", y, "0"}, 0.0, 2 * pi, true);
      const Holonomy h = normal_holonomy(support::unit_speed(spec, 1000, flat.chart), flat.chart);
      CHECK((h.matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(std::abs(h.angle) < 1e-8);
    }
  }
  SUBCASE("non-planar loops rotate by minus the total torsion") {
    const oracle::AnalyticCurve oc = oracle::trefoil(1.0);
    const Holonomy h = normal_holonomy(support::unit_speed(support::from_oracle(oc, true), 4000, flat.chart), flat.chart);
    const double expected = std::remainder(-oracle::total_torsion(oc), 2 * pi);
    CAPTURE(expected);
    CHECK(std::abs(expected) > 0.05);
    CHECK(std::abs(std::remainder(h.angle - expected, 2 * pi)) < 1e-8);
    CHECK(h.orthogonality_residual < 1e-10);
  }
  SUBCASE("open curves are refused") {
    CHECK_THROWS_AS(normal_holonomy(support::unit_speed(curves::helix(1, 1, 0, 3), 100, flat.chart), flat.chart),
                    ValidationError);
  }
}

TEST_CASE("holonomy accepts loops closed modulo the torus period") {
  const auto torus = manifolds::get_chart("flat_torus3");
  const auto spec = support::expr({"t", "1+0.1*sin(t)", "0.5"}, 0.0, 2 * pi);
  const Holonomy h = normal_holonomy(support::unit_speed(spec, 800, torus.chart), torus.chart);
  CHECK(h.matrix.rows() == 2);
  CHECK(h.orthogonality_residual < 1e-12);
}

TEST_CASE("isometries and pushforwards") {
  const auto hyper = manifolds::get_chart("hyperbolic3_halfspace");
  const Isometry* dil = nullptr;
  for (const auto& iso : hyper.isometries)
    if (iso.name == "dilation_2") dil = &iso;
  REQUIRE(dil != nullptr);
  const Vec x = vec3(0.2, 0.4, 0.7), u = vec3(1, -1, 0.5), w = vec3(0, 2, 1);
  CHECK(isometry_defect(*dil, hyper.chart, x, u, w) < 1e-10);

  // A non-isometry is detected.
  const Isometry shift{"vertical_shift", [](const Vec& p) { return Vec(p + vec3(0, 0, 1)); }, {}, {}};
  CHECK(isometry_defect(shift, hyper.chart, x, u, w) > 0.1);

  const CurveSamples c = support::unit_speed(support::from_oracle(oracle::rising_helix(0.5, 1.0, 0.2, 4.0)), 600, hyper.chart);
  const auto b0 = normal_basis(c.positions[0], c.velocities[0], hyper.chart);
  const PushedField pushed = pushforward_field(*dil, c, normal_parallel_transport(c, hyper.chart, b0[0]));
  for (std::size_t i = 0; i < c.size(); i += 60) {
    CHECK((pushed.curve.positions[i] - 2.0 * c.positions[i]).norm() < 1e-14);
    CHECK(hyper.chart.norm(pushed.curve.positions[i], pushed.curve.velocities[i]) == doctest::Approx(1.0).epsilon(1e-9));
  }
}
