#include <cmath>
#include <random>

#include <doctest.h>

#include "reeb/errors.hpp"
#include "reeb/horseshoe.hpp"

using namespace reeb;

namespace {

// One rectangle branch X -> Y given by an affine map on a box.
SectionMapModel affine_psi(const Mat2d& L, const Vec2& c) {
  SectionMapModel m;
  m.name = "affine";
  Branch b;
  b.label = "a1";
  b.kind = BranchKind::rectangle;
  b.dom = Rect::box(0.4, 1.2, -0.1, 0.1, FiberKind::horizontal);
  b.eval = [=](const Vec2& p) -> Vec2 { return c + L * p; };
  b.diff = [=](const Vec2&) { return L; };
  b.return_time = [](const Vec2&) { return 1.0; };
  b.nominal_time = 1.0;
  b.d_dom_angle = M_PI / 2;
  b.d_im_angle = M_PI / 2;
  double x0 = 1e9, x1 = -1e9, z0 = 1e9, z1 = -1e9;
  for (double s : {0.0, 1.0})
    for (double t : {0.0, 1.0}) {
      const Vec2 q = b.eval(b.dom.at(s, t));
      x0 = std::min(x0, q.x()), x1 = std::max(x1, q.x()), z0 = std::min(z0, q.y()), z1 = std::max(z1, q.y());
    }
  b.im = Rect::box(x0, x1, z0, z1, FiberKind::horizontal);
  m.branches.push_back(b);
  return m;
}

}  // namespace

TEST_CASE("box rectangles locate exactly") {
  const Rect r = Rect::box(0, 2, -1, 1, FiberKind::vertical);
  const auto st = r.locate(Vec2(0.5, 0.0));
  REQUIRE(st);
  CHECK(st->x() == doctest::Approx(0.25));
  CHECK(st->y() == doctest::Approx(0.5));
  CHECK_FALSE(r.contains(Vec2(3, 0)));
}

TEST_CASE("cones") {
  const auto h = ConeSpec::horizontal(0.2);
  CHECK(h.contains(Vec2(1, 0.1)));
  CHECK_FALSE(h.contains(Vec2(1, 0.3)));
  const auto v = ConeSpec::vertical(0.2);
  CHECK(v.contains(Vec2(0.1, 1)));
  Mat2d L;
  L << 5, 0, 0, 0.2;
  CHECK(cone_image_margin(L, h, h) > 0);
  // The minimum sits on the cone edge (1, 0.2).
  CHECK(cone_min_stretch(L, h) == doctest::Approx(std::sqrt(25 + 0.0016) / std::sqrt(1.04)).epsilon(1e-6));
}

TEST_CASE("section geometry") {
  const double lam = 0.3;
  CHECK(q_lambda_strip(0.0, lam) == 0);
  CHECK(q_lambda_strip(M_PI + 0.1, lam) == 1);
  CHECK(q_lambda_strip(0.5, lam) == -99);
  CHECK(r_lambda_component(0.7, lam) == 0);
  CHECK(r_lambda_component(0.1, lam) == -99);
  CHECK(in_x_region(Vec2(1.0, 0.2), 0.5));
  CHECK_FALSE(in_x_region(Vec2(0.2, 0.2), 0.5));
  CHECK(in_y_region(Vec2(M_PI + 1.0, -0.2), 0.5));
}

TEST_CASE("synthetic models pass all four certificates") {
  SyntheticParams p;
  const auto phi = synthetic_bypass_map(p);
  const auto psi = synthetic_manifold_map(p);
  CHECK_NOTHROW(phi.validate());
  CHECK_NOTHROW(psi.validate());
  for (const auto& c : {verify_k_hyperbolic(psi, p.lambda, 32), verify_dominated(psi, p.mu, p.nu, p.tau, 32),
                        verify_hyperbolic_bypass(phi, p.lambda, 32),
                        verify_bypass_dominated(phi, p.nu, p.tau, p.A, p.eta, 32)}) {
    CHECK(c.passed());
    for (const auto& cond : c.conditions) {
      CAPTURE(cond.name);
      CHECK(cond.margin > 0);
    }
  }
}

TEST_CASE("infeasible parameters are refused") {
  SyntheticParams p;
  p.eta = 1.5;
  CHECK_THROWS_AS(synthetic_bypass_map(p), ParameterError);
  p = {};
  p.A = 0.1;  // A must exceed nu
  CHECK_THROWS_AS(synthetic_bypass_map(p), ParameterError);
  p = {};
  p.lambda = 0.5;
  CHECK_THROWS_AS(synthetic_manifold_map(p), ParameterError);
}

TEST_CASE("tighter tau breaks the return-time condition") {
  SyntheticParams p;
  const auto psi = synthetic_manifold_map(p);
  const auto c = verify_dominated(psi, p.mu, p.nu, 0.01, 32);
  CHECK_FALSE(c.passed());
}

// For an affine branch (x, z) -> (c + s z, d + x / s), a horizontal vector
// (1, t) goes to (s t, 1 / s), which lies in the vertical cone of width mu
// only for |t| < mu / s^2. With mu = nu = 0.3 that fails for every s > 1.
// The transposed branch (c + z / s, d + s x) needs |t| < mu s^2 instead.
TEST_CASE("affine domination examples") {
  const double mu = 0.3, nu = 0.3, tau = 1.0;
  for (double s : {5.0, 1.01}) {
    CAPTURE(s);
    Mat2d L;
    L << 0, s, 1 / s, 0;
    CHECK_FALSE(verify_dominated(affine_psi(L, Vec2(3.0, 0.0)), mu, nu, tau, 16).passed());
  }
  for (double s : {5.0, 1.01}) {
    CAPTURE(s);
    Mat2d T;
    T << 0, 1 / s, s, 0;
    CHECK(verify_dominated(affine_psi(T, Vec2(3.0, -5.0)), mu, nu, tau, 16).passed());
  }
}

TEST_CASE("composite maps and fixed points") {
  SyntheticParams p;
  const auto phi = synthetic_bypass_map(p);
  const auto psi = synthetic_manifold_map(p);
  const CompositeMap F(phi, psi, {1, 2});
  REQUIRE(F.itinerary_ok());
  const auto q = F.domain_point();
  REQUIRE(q);
  CHECK(F(*q).has_value());
  const FixedPoint fp = unique_fixed_point(F);
  CHECK(fp.residual < 1e-10);
  CHECK(fp.stretch > 2);
  CHECK(fp.orbit.size() == 2);
  CHECK(multi_seed_spread(F, fp, 10, 3) < 1e-9);
  // The cyclic shift has the shifted orbit.
  const FixedPoint g = unique_fixed_point(CompositeMap(phi, psi, {2, 1}));
  CHECK((g.p - fp.orbit[1]).norm() < 1e-9);
  CHECK(g.period == doctest::Approx(fp.period));
}

TEST_CASE("plain fixed point of a contraction-expansion map") {
  const auto F = [](const Vec2& p) { return Vec2(0.2 + 3 * (p.x() - 0.2), 0.7 + (p.y() - 0.7) / 3); };
  const auto dF = [](const Vec2&) {
    Mat2d d;
    d << 3, 0, 0, 1.0 / 3;
    return d;
  };
  const Vec2 x = unique_fixed_point_plain(F, dF, Vec2(0.5, 0.5));
  CHECK((x - Vec2(0.2, 0.7)).norm() < 1e-12);
}

TEST_CASE("points of Q_lambda escape monotonically") {
  SyntheticParams p;
  const auto phi = synthetic_bypass_map(p);
  const auto psi = synthetic_manifold_map(p);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> off(-0.14, 0.14), z(-0.49, 0.49);
  for (int i = 0; i < 100; ++i) {
    const Vec2 s((i % 3) * M_PI + off(rng), z(rng));
    const auto r = q_lambda_escape(phi, psi, s);
    CHECK(r.monotone);
    CHECK(r.exit_iteration >= 0);
  }
  CHECK_THROWS_AS(q_lambda_escape(phi, psi, Vec2(1.0, 0.0)), PreconditionError);
}

TEST_CASE("fixed-point csv") {
  SyntheticParams p;
  const auto phi = synthetic_bypass_map(p);
  const auto psi = synthetic_manifold_map(p);
  const auto orbs = horseshoe_orbits(phi, psi, 3.0, p.tau);
  REQUIRE(orbs.size() == 5);  // a1, a2, a1a1, a1a2, a2a2 have action < 3
  const auto csv = fixed_points_csv(orbs);
  CHECK(csv.rfind("word,x,z,period,cz_index\n", 0) == 0);
  CHECK(csv.find("a1 a2,") != std::string::npos);
}
