#include <set>

#include <doctest.h>

#include "reeb/chords.hpp"

using namespace reeb;

TEST_CASE("chords of the three-component arc up to two windings") {
  const auto m = ContactModel::alpha_b();
  const auto arc = AttachingArc::three_components(m);
  FlowSettings s;
  const auto res = find_chords(m, arc, 14.0, {}, s);
  REQUIRE(res.chords.size() == 2);
  std::set<std::string> labels;
  for (const auto& c : res.chords) {
    labels.insert(c.label);
    CHECK(c.period < 14.0);
    CHECK(c.transversality_margin > 0);
    const auto idx = chord_index(m, arc, c, s);
    CHECK(idx.mu.value == 1);
    CHECK(idx.path.end().determinant() == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK(labels == std::set<std::string>{"c1", "c2"});
}

TEST_CASE("the trivial arc adds chords of index zero") {
  const auto m = ContactModel::alpha_b();
  const auto arc = AttachingArc::trivial(m);
  FlowSettings s;
  const auto res = find_chords(m, arc, 8.0, {}, s);
  int d = 0;
  for (const auto& c : res.chords)
    if (c.label == "d1") {
      ++d;
      CHECK(chord_index(m, arc, c, s).mu.value == 0);
    }
  CHECK(d == 1);
}

TEST_CASE("chord json carries the fields the orbit reader needs") {
  TransverseChord c;
  c.label = "c1";
  c.period = 6.4;
  c.winding = 1;
  const auto j = chords_json({c});
  CHECK(j.at("chords").at(0).at("label") == "c1");
  CHECK(j.at("chords").at(0).at("winding") == 1);
}
