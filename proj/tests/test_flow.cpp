#include <cmath>
#include <variant>

#include <doctest.h>

#include "reeb/cz.hpp"
#include "reeb/flow.hpp"

using namespace reeb;

TEST_CASE("standard model flows straight up in z") {
  const auto m = ContactModel::standard();
  const auto tr = integrate(m, {0, 0, 0}, 1.0, FlowSettings{});
  CHECK(tr.exit_face == Face::none);
  CHECK(std::abs(tr.end().x) < 1e-9);
  CHECK(std::abs(tr.end().y) < 1e-9);
  CHECK(tr.end().z > 0.0);
}

TEST_CASE("forward then backward returns to the start") {
  const auto m = ContactModel::alpha_b();
  const ChartPoint p{0.1, 0.2, 0.3};
  FlowSettings s;
  const auto f = integrate(m, p, 2.0, s);
  REQUIRE(f.exit_face == Face::none);
  const auto b = integrate(m, f.end(), -2.0, s);
  CHECK((b.end().vec() - p.vec()).norm() < 1e-7);
}

TEST_CASE("linearized flow stays symplectic and matches the hyperbolic closed form") {
  const auto m = ContactModel::alpha_p();
  const double l2 = m.l_second_derivative();
  for (double T : {0.5, 1.0, 2.0, 2 * M_PI}) {
    CAPTURE(T);
    const auto path = linearized_flow(m, {0, 0, 0}, T, default_frame(m), FlowSettings{});
    CHECK(path.end().determinant() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(path.end().trace() == doctest::Approx(2 * std::cosh(T * std::sqrt(l2))).epsilon(1e-6));
  }
}

TEST_CASE("default frame is normalized") {
  const auto m = ContactModel::alpha_b();
  const ChartPoint p{0.3, -0.1, 0.2};
  const auto [e1, e2] = default_frame(m)(p);
  const Vec3 a = evaluate_form(m, p);
  CHECK(std::abs(a.dot(e1)) < 1e-12);
  CHECK(std::abs(a.dot(e2)) < 1e-12);
  CHECK(e1.dot(d_alpha_matrix(m, p) * e2) == doctest::Approx(1.0));
}

TEST_CASE("first return to a z plane") {
  const auto m = ContactModel::standard();
  const auto r = first_return(m, {0, 0, 0}, Section::plane_z(1.0, +1), FlowSettings{});
  REQUIRE(std::holds_alternative<Return>(r));
  CHECK(std::get<Return>(r).p.z == doctest::Approx(1.0));
}

TEST_CASE("flow settings validation") {
  FlowSettings s;
  s.abs_tol = -1;
  CHECK_THROWS(s.validate());
}
