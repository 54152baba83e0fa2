#include <algorithm>
#include <random>
#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "reeb/errors.hpp"
#include "reeb/words.hpp"

using namespace reeb;

TEST_CASE("Booth rotation agrees with the naive minimum") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(1, 12), sym(0, 2);
  for (int i = 0; i < 2000; ++i) {
    std::vector<int> s(len(rng));
    for (auto& c : s) c = sym(rng);
    std::vector<int> a = s, b = s;
    std::rotate(a.begin(), a.begin() + least_rotation(s), a.end());
    std::rotate(b.begin(), b.begin() + oracle::naive_least_rotation(s), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("primitive period") {
  CHECK(primitive_period(std::vector<int>{1, 2, 1, 2}) == 2);
  CHECK(primitive_period(std::vector<int>{1, 1, 1}) == 1);
  CHECK(primitive_period(std::vector<int>{1, 2, 2}) == 3);
}

TEST_CASE("canonical rotation and root") {
  const auto w = canonical_rotation({"b", "a", "b", "a"});
  CHECK(w.letters == std::vector<std::string>{"a", "b", "a", "b"});
  CHECK(w.root == std::vector<std::string>{"a", "b"});
  CHECK(w.multiplicity == 2);
  CHECK_THROWS_AS(canonical_rotation({}), PreconditionError);
}

TEST_CASE("necklace enumeration matches brute force") {
  for (int l = 1; l <= 12; ++l) {
    CAPTURE(l);
    const auto lib = compositions_up_to_cyclic(l);
    const auto ref = oracle::necklaces(l);
    CHECK(lib.size() == ref.size());
    for (const auto& c : lib) CHECK(ref.count(c) == 1);
  }
}

TEST_CASE("orbit enumeration respects the action bound and grading") {
  const auto fam = winding_chord_family(5);
  const auto recs = enumerate_orbits(fam, 20.0, 0.01);
  CHECK_FALSE(recs.empty());
  for (const auto& r : recs) {
    CHECK(r.action < 20.0);
    CHECK(r.cz == int(r.word.letters.size()));
    CHECK(r.window_lo <= r.action);
    CHECK(r.window_hi >= r.action);
  }
  CHECK(std::is_sorted(recs.begin(), recs.end(),
                       [](const OrbitRecord& a, const OrbitRecord& b) { return a.action < b.action; }));
}

TEST_CASE("even multiples of odd-index words are bad") {
  const std::vector<ChordDatum> one{{"c1", 1.0, 1, 1}};
  const auto recs = enumerate_orbits(one, 4.5, 0.0);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].good);
  CHECK_FALSE(recs[1].good);
  CHECK(recs[2].good);
  CHECK_FALSE(recs[3].good);
  CHECK(graded_block(recs, 2, false).empty());
  CHECK(graded_block(recs, 2, true).at(2) == 1);
}

TEST_CASE("action exactly at the bound is refused") {
  const std::vector<ChordDatum> one{{"c1", 1.0, 1, 1}};
  CHECK_THROWS_AS(enumerate_orbits(one, 3.0, 0.0), BoundaryError);
}

TEST_CASE("euler characteristic of a graded block") {
  CHECK(euler_characteristic({{0, 2}, {1, 3}, {2, 1}}) == 0);
  CHECK(euler_characteristic({{1, 1}}) == -1);
}

TEST_CASE("chords json round-trip through the orbit reader") {
  const nlohmann::json j = {{"chords", {{{"label", "c1"}, {"period", 6.4}, {"mu_tilde", 1}, {"winding", 1}}}}};
  const auto c = chords_from_json(j);
  REQUIRE(c.size() == 1);
  CHECK(c[0].label == "c1");
  CHECK(c[0].mu_tilde == 1);
}
