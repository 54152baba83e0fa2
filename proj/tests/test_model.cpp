#include <cmath>

#include <doctest.h>

#include "reeb/errors.hpp"
#include "reeb/model.hpp"
#include "reeb/profiles.hpp"

using namespace reeb;

TEST_CASE("profile derivatives match central differences") {
  const BumpProfile ps[] = {BumpProfile::cutoff_k(), BumpProfile::convex_l(), BumpProfile::cutoff_m(),
                            BumpProfile::slope_f(), BumpProfile::shear_g(0.2)};
  for (const auto& p : ps) {
    for (double s = -0.9; s <= 0.9; s += 0.0731) {
      const double h = 1e-6;
      const double fd = (p.eval(s + h).v - p.eval(s - h).v) / (2 * h);
      CHECK(p.eval(s).d == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("cutoff plateau and support") {
  const auto k = BumpProfile::cutoff_k(0.3, 0.7);
  CHECK(k.eval(0.0).v == 1.0);
  CHECK(k.eval(0.29).v == 1.0);
  CHECK(k.eval(0.71).v == 0.0);
  CHECK(k.eval(-0.8).v == 0.0);
  const double mid = k.eval(0.5).v;
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("convex profile second derivative") {
  const auto l = BumpProfile::convex_l(0.01, 2.0);
  CHECK(l.second_derivative_at_center() == doctest::Approx(0.04));
  const double h = 1e-4;
  const double fd2 = (l.eval(h).v - 2 * l.eval(0).v + l.eval(-h).v) / (h * h);
  CHECK(fd2 == doctest::Approx(0.04).epsilon(1e-5));
}

TEST_CASE("profiles round-trip through json") {
  const auto p = BumpProfile::shear_g(0.4, 0.07, 0.1, 0.25);
  const BumpProfile q = nlohmann::json(p).get<BumpProfile>();
  CHECK(q.family == p.family);
  CHECK(q.center == p.center);
  CHECK(q.amplitude == p.amplitude);
}

TEST_CASE("every model is contact and its Reeb field solves the defining equations") {
  for (const auto& m : {ContactModel::standard(), ContactModel::alpha_p(), ContactModel::alpha_b()}) {
    CAPTURE(to_string(m.variant()));
    CHECK(min_volume_on_grid(m, 9) > 0.0);
    for (const ChartPoint p : {ChartPoint{0, 0, 0}, ChartPoint{0.4, -0.3, 0.07}, ChartPoint{-0.6, 0.8, 2.5}}) {
      const auto r = verify_reeb(m, p);
      CHECK(r.alpha_minus_one < 1e-7);
      CHECK(r.iota_dalpha < 1e-6);
    }
  }
}

TEST_CASE("d alpha matrix is antisymmetric and matches the curl") {
  const auto m = ContactModel::alpha_b();
  const ChartPoint p{0.2, 0.5, 0.3};
  const Eigen::Matrix3d D = d_alpha_matrix(m, p);
  CHECK((D + D.transpose()).norm() < 1e-14);
  const Vec3 R = reeb_field(m, p);
  CHECK((D * R).norm() < 1e-9);
}

TEST_CASE("evaluation outside the box throws") {
  const auto m = ContactModel::standard();
  CHECK_THROWS_AS(evaluate_form(m, {5.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(reeb_field(m, {0.0, 3.0, 0.0}), DomainError);
}

TEST_CASE("variant names round-trip") {
  for (auto v : {Variant::Standard, Variant::ThickenedPerturbed_alpha_p, Variant::BypassAdapted_alpha_b,
                 Variant::SolidTorus_alpha, Variant::SolidTorus_alpha_p, Variant::SolidTorus_alpha_b})
    CHECK(variant_from_string(to_string(v)) == v);
}

TEST_CASE("model json round-trip keeps the form") {
  const auto m = ContactModel::alpha_b();
  const ContactModel n = nlohmann::json(m).get<ContactModel>();
  const ChartPoint p{0.1, -0.2, 0.05};
  CHECK((evaluate_form(m, p) - evaluate_form(n, p)).norm() < 1e-15);
}
