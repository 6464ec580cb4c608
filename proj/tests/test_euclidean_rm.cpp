#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "rmf/errors.hpp"
#include "rmf/euclidean_rm.hpp"
#include "support.hpp"

using namespace rmf;
using oracle::pi;

namespace {
CurveSamples helix_samples(int n, double turns = 1.0) {
  return arclength_reparametrize(sample_curve(curves::helix(1.0, 1.0, 0.0, 2 * pi * turns), n));
}
}  // namespace

TEST_CASE("RM transport along the helix matches the rotating Frenet oracle") {
  const oracle::Helix h{1.0, 1.0};
  const CurveSamples c = helix_samples(2000);
  const NormalField f = rm_transport(c, support::vec(h.normal(0.0)));
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    worst = std::max(worst, (support::v3(f.vectors[i]) - h.rm_from_normal(h.t_of_s(c.params[i]))).norm());
  CHECK(worst < 1e-9);
  CHECK(f.max_drift() < 1e-12);
  // v' = lambda t with lambda = -<v, t'>; for this field lambda = -kappa cos(theta).
  for (std::size_t i = 0; i < c.size(); i += 111) {
    const double theta = -h.tau() * c.params[i];
    CHECK(f.proportionality[i] == doctest::Approx(-h.kappa() * std::cos(theta)).epsilon(1e-8));
  }
}

TEST_CASE("seed handling") {
  const CurveSamples c = helix_samples(200);
  const Vec t0 = c.velocities.front();
  SUBCASE("zero seed gives the zero field") {
    const NormalField f = rm_transport(c, Vec::Zero(3));
    for (const Vec& v : f.vectors) CHECK(v.norm() == 0.0);
  }
  SUBCASE("tangential seed is rejected with its inner product") {
    try {
      (void)rm_transport(c, vec3(1, 0, 0) + 0.5 * t0);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
  }
  SUBCASE("tiny tangential component is projected and recorded") {
    const NormalField f = rm_transport(c, vec3(1, 0, 0) + 1e-8 * t0);
    CHECK(f.initial_projection == doctest::Approx(1e-8).epsilon(1e-6));
    CHECK(std::abs(f.vectors.front().dot(t0)) < 1e-15);
  }
  SUBCASE("norm is preserved for non-unit seeds") {
    const NormalField f = rm_transport(c, vec3(3, 0, 0));
    for (const Vec& v : f.vectors) CHECK(v.norm() == doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("transport does not depend on the parametrization") {
  const auto spec = support::expr({"2*cos(t)", "sin(t)", "0.3*t^2"}, 0.0, 3.0);
  const CurveSamples raw = sample_curve(spec, 3000);
  const CurveSamples unit = arclength_reparametrize(raw);
  const Vec seed = default_normal_seed(unit.velocities.front());
  const NormalField a = rm_transport(raw, seed);
  const NormalField b = rm_transport(unit, seed);
  CHECK((a.vectors.back() - b.vectors.back()).norm() < 1e-9);
}

TEST_CASE("transport back along the reversed curve returns the seed") {
  const CurveSamples c = helix_samples(1500);
  const Vec seed = vec3(0.6, 0.0, 0.0) + 0.8 * Vec(vec3(0, 1, -1)).normalized();
  const Vec v0 = seed - seed.dot(c.velocities[0]) * c.velocities[0];
  const NormalField forward = rm_transport(c, v0);
  const NormalField backward = rm_transport(reverse(c), forward.vectors.back());
  CHECK((backward.vectors.back() - forward.vectors.front()).norm() < 1e-10);
}

TEST_CASE("RM frames") {
  SUBCASE("orthonormal with the cross product as third vector") {
    const FramedCurve fc = rm_frame(helix_samples(800));
    for (const Mat& m : fc.frames) {
      CHECK((m.transpose() * m - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("circle with the vertical seed keeps u vertical and t x u radial outward") {
    const CurveSamples c = arclength_reparametrize(sample_curve(curves::circle(1.0), 500));
    const FramedCurve fc = rm_frame(c, vec3(0, 0, 1));
    for (std::size_t i = 0; i < c.size(); i += 25) {
      const double t = c.params[i];
      CHECK((fc.frames[i].col(1) - vec3(0, 0, 1)).norm() < 1e-12);
      CHECK((fc.frames[i].col(2) - vec3(std::cos(t), std::sin(t), 0)).norm() < 1e-9);
    }
  }
  SUBCASE("non-unit seed is rejected") { CHECK_THROWS_AS(rm_frame(helix_samples(100), vec3(2, 0, 0)), ValidationError); }
  SUBCASE("two-dimensional curves are not framed") {
    const auto flat = std::make_shared<const CurveSpec>(CurveSpec::from_expressions({"t", "t^2"}, 0.0, 1.0, false));
    CHECK_THROWS_AS(rm_frame(sample_curve(flat, 50)), UnsupportedDimensionError);
  }
}

TEST_CASE("default seed uses the least aligned basis vector, lowest index on ties") {
  CHECK((default_normal_seed(vec3(0, 1, 0)) - vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((default_normal_seed(vec3(0.6, 0, 0.8)) - vec3(0, 1, 0)).norm() < 1e-15);
  const Vec t = Vec(vec3(1, 1, 0.2)).normalized();
  const Vec s = default_normal_seed(t);
  CHECK(std::abs(s.dot(t)) < 1e-15);
  CHECK(s.norm() == doctest::Approx(1.0));
  CHECK(s[2] > 0.9);
}

TEST_CASE("is_rm residual of a transported field is second order in the spacing") {
  const auto spec = curves::helix(1.0, 1.0, 0.0, 2 * pi);
  double previous = 0.0;
  for (int n : {250, 500, 1000, 2000}) {
    const CurveSamples c = arclength_reparametrize(sample_curve(spec, n));
    const RmVerdict v = is_rm(c, rm_transport(c, default_normal_seed(c.velocities[0])), 1e-3);
    CHECK(v.verdict);
    if (previous > 0.0) {
      CAPTURE(n);
      CHECK(previous / v.max_residual > 3.0);
    }
    previous = v.max_residual;
  }
}

TEST_CASE("is_rm separates RM fields from Frenet normals") {
  const CurveSamples line = sample_curve(curves::line(vec3(0, 0, 0), vec3(1, 1, 1)), 100);
  const RmVerdict constant = is_rm(line, make_field(line, std::vector<Vec>(100, Vec(vec3(1, -1, 0)))), 1e-6);
  CHECK(constant.verdict);
  CHECK(constant.max_residual < 1e-12);

  const CurveSamples c = helix_samples(1000);
  const RmVerdict frenet = is_rm(c, frenet_normal_field(c), 1e-3);
  CHECK_FALSE(frenet.verdict);
  CHECK(frenet.max_residual == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("ruled surfaces") {
  const CurveSamples c = arclength_reparametrize(sample_curve(curves::circle(1.0), 400));
  const NormalField apex = rm_transport(c, vec3(-1, 0, 1));
  const RuledSurfaceMesh cone = ruled_surface(c, apex, 0.0, 1.0, 5);
  REQUIRE(cone.lambdas.size() == 5);
  CHECK(cone.columns == c.size());
  CHECK(cone.points.size() == 5 * c.size());
  CHECK(cone.quads.size() == 4 * (c.size() - 1));
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(cone.at(0, i) == c.positions[i]);
    CHECK((cone.at(4, i) - vec3(0, 0, 1)).norm() < 1e-9);
  }
  CHECK_THROWS_AS(ruled_surface(c, apex, 0.0, 0.0, 2), ValidationError);
  CHECK_THROWS_AS(ruled_surface(c, apex, 0.0, 1.0, 1), ValidationError);
  CHECK(developability_residual(c, apex) < 1e-8);
  CHECK(developability_residual(c, make_field(c, std::vector<Vec>(c.size(), Vec::Zero(3)))) == 0.0);
}

TEST_CASE("twist between Frenet normal and RM field follows the torsion") {
  const oracle::Helix h{2.0, 0.5};
  const CurveSamples c = arclength_reparametrize(sample_curve(curves::helix(2.0, 0.5, 0.0, 5.0), 1500));
  const TwistSeries tw = frenet_rm_twist(c);
  for (std::size_t i = 0; i < c.size(); i += 100) CHECK(tw.theta[i] == doctest::Approx(-h.tau() * c.params[i]).epsilon(1e-7));
  CHECK(tw.total_twist == doctest::Approx(-h.tau() * c.length()).epsilon(1e-7));
}
