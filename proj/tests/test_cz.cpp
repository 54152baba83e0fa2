#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "reeb/cz.hpp"
#include "reeb/errors.hpp"

using namespace reeb;

namespace {

SymplecticPath rotation_path(double angle, int n = 200) {
  SymplecticPath p;
  for (int i = 0; i <= n; ++i) {
    const double a = angle * i / n;
    Mat2 R;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    p.t.push_back(double(i) / n);
    p.M.push_back(R);
  }
  return p;
}

}  // namespace

TEST_CASE("rotation paths have index 2 floor(angle / 2pi) + 1") {
  for (double a : {0.3, 3.0, 6.0, 7.0, 12.0, 14.0, -0.5, -7.0}) {
    CAPTURE(a);
    CHECK(conley_zehnder(rotation_path(a)) == 2 * int(std::floor(a / (2 * M_PI))) + 1);
  }
}

TEST_CASE("hyperbolic stretch has index 0") {
  SymplecticPath p;
  for (int i = 0; i <= 50; ++i) {
    const double s = std::exp(0.04 * i);
    p.t.push_back(i);
    p.M.push_back(Mat2{{s, 0}, {0, 1 / s}});
  }
  CHECK(conley_zehnder(p) == 0);
  CHECK(classify(p.end()).type == OrbitType::hyperbolic);
  CHECK(classify(p.end()).parity == Parity::even);
}

TEST_CASE("degenerate endpoint is refused") {
  CHECK_THROWS_AS(conley_zehnder(rotation_path(2 * M_PI)), DegeneracyError);
}

TEST_CASE("index agrees with the crossing-number oracle") {
  std::mt19937_64 rng(11);
  int compared = 0;
  while (compared < 200) {
    const auto path = oracle::random_path(rng, 2 + compared % 3, 1.4);
    const auto ref = oracle::crossing_index(path);
    if (!ref) continue;
    ++compared;
    CHECK(conley_zehnder(path.sample(96)) == *ref);
  }
}

TEST_CASE("index parity matches the endpoint type") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const auto sp = oracle::random_path(rng, 2, 1.2).sample(64);
    if (std::abs(sp.end().trace() - 2) < 1e-6) continue;
    const int mu = conley_zehnder(sp);
    CHECK((classify(sp.end()).parity == Parity::odd) == (std::abs(mu) % 2 == 1));
  }
}

TEST_CASE("classify") {
  CHECK(classify(Mat2{{-3, 0}, {0, -1.0 / 3}}).negative_hyperbolic());
  const auto e = classify(Mat2{{0, -1}, {1, 0}});
  CHECK(e.type == OrbitType::elliptic);
  CHECK(e.parity == Parity::odd);
  CHECK_THROWS_AS(classify(Mat2{{2, 0}, {0, 2}}), PreconditionError);
  CHECK(is_good(classify(Mat2{{-3, 0}, {0, -1.0 / 3}}), 3));
  CHECK_FALSE(is_good(classify(Mat2{{-3, 0}, {0, -1.0 / 3}}), 2));
  CHECK(is_good(classify(Mat2{{3, 0}, {0, 1.0 / 3}}), 2));
}

TEST_CASE("mu tilde brackets the angle of M e1") {
  for (double a : {0.2, 3.5, 4.0, 7.0}) {
    const auto m = mu_tilde(rotation_path(a), 1.0);
    CHECK(m.value == int(std::ceil(a / M_PI)) - 1);
  }
}

TEST_CASE("word index sums the letter indices") {
  const std::map<std::string, int> mt{{"c1", 1}, {"d1", 0}, {"c2", 1}};
  CHECK(word_index({"c1", "d1", "c2"}, mt) == 2);
  CHECK(word_index({"c1", "c1"}, mt) == 2);
}

TEST_CASE("odd/even localization from the end angle") {
  std::mt19937_64 rng(13);
  int applicable = 0;
  for (int i = 0; i < 300; ++i) {
    const auto sp = oracle::random_path(rng, 3, 1.5).sample(96);
    if (std::abs(sp.end().trace() - 2) < 1e-6) continue;
    const Localization l = localize_index(sp);
    if (l.applicable) ++applicable;
    CHECK(l.holds());
  }
  CHECK(applicable > 50);
}

TEST_CASE("cone predicate gives the eigenvalue sign") {
  const double nu = 0.05, theta0 = M_PI / 8;
  // R e1 = -4 e1 (up to a small tilt), f = e2 fixed up to scale.
  Mat2 R{{-4, 0}, {0.1, -0.25}};
  const auto s = cone_eigen_sign(R, nu, theta0, Eigen::Vector2d(0, 1));
  REQUIRE(s);
  CHECK(*s == -1);
  CHECK(classify(R).negative_hyperbolic());
  // Stretch below 3 fails the hypotheses.
  CHECK_FALSE(cone_eigen_sign(Mat2{{2, 0}, {0, 0.5}}, nu, theta0, Eigen::Vector2d(0, 1)));
}

TEST_CASE("path csv round-trip") {
  const auto p = rotation_path(1.0, 10);
  const auto q = SymplecticPath::from_csv(p.to_csv());
  REQUIRE(q.size() == p.size());
  CHECK((q.end() - p.end()).norm() < 1e-12);
}
