#include <doctest.h>

#include "oracles.hpp"
#include "reeb/diagrams.hpp"
#include "reeb/errors.hpp"
#include "reeb/ranks.hpp"

using namespace reeb;

TEST_CASE("diagram counts are Catalan numbers") {
  for (int n = 1; n <= 7; ++n) {
    CAPTURE(n);
    const auto ds = enumerate_diagrams(n);
    CHECK(long(ds.size()) == oracle::non_crossing_matchings(n));
    for (const auto& d : ds) CHECK(is_non_crossing(d.match));
  }
}

TEST_CASE("parallel diagram shape") {
  const auto d = ChordDiagram::parallel(4);
  CHECK(d.chords() == std::vector<std::pair<int, int>>{{0, 1}, {2, 7}, {3, 6}, {4, 5}});
  CHECK(is_parallel(d));
  CHECK_FALSE(is_parallel(ChordDiagram::from_pairs(3, {{0, 1}, {2, 3}, {4, 5}})));
}

TEST_CASE("validation rejects crossing matchings") {
  ChordDiagram d;
  d.n = 2;
  d.match = {2, 3, 0, 1};
  CHECK_THROWS_AS(d.validate(), PreconditionError);
}

TEST_CASE("json round-trip") {
  const auto d = ChordDiagram::parallel(5, -1);
  CHECK(nlohmann::json(d).get<ChordDiagram>() == d);
}

TEST_CASE("bypass on parallel diagrams drops one chord") {
  for (int n = 2; n <= 8; ++n) {
    const auto d = ChordDiagram::parallel(n, canonical_parallel_sign(n));
    const auto r = attach_bypass(d, {1, 2});
    REQUIRE(r.diagram);
    CHECK(r.diagram->n == n - 1);
    CHECK(is_parallel(*r.diagram));
    CHECK(r.boundary_components_before == 2 * n);
    CHECK(r.boundary_components_after == 2 * (n - 1));
  }
}

TEST_CASE("attachment needs adjacent points on different chords") {
  const auto d = ChordDiagram::parallel(3);
  CHECK_THROWS_AS(attach_bypass(d, {0, 3}), PreconditionError);
  const auto r = attach_bypass(d, {0, 1});  // both ends of one chord
  CHECK_FALSE(r.diagram);
  CHECK(r.rejection);
}

TEST_CASE("region census Euler characteristics add up") {
  for (int n = 1; n <= 6; ++n)
    for (const auto& d : enumerate_diagrams(n)) {
      const auto c = region_census(d);
      CHECK(int(c.regions.size()) == n + 1);
      CHECK(c.chi_plus + c.chi_minus == n + 1);
      for (std::size_t i = 0; i + 1 < c.regions.size(); ++i) CHECK(!c.regions[i].intervals.empty());
    }
}

TEST_CASE("parallel ranks") {
  for (int n = 1; n <= 12; ++n) {
    const auto r = parallel_torus_ranks(n);
    CHECK(r.n_plus + r.n_minus == n - 1);
    CHECK(r.n_plus == n / 2);
    if (n <= 9) {
      const auto c = c5_torus_ranks(ChordDiagram::parallel(n, canonical_parallel_sign(n)));
      CHECK(c.n_plus == r.n_plus);
      CHECK(c.n_minus == r.n_minus);
    }
  }
}

TEST_CASE("thickened surface loses the Gamma_0 tower") {
  const auto before = thickened_surface_ranks(4, 3);
  const auto after = after_bypass_ranks(4, 3);
  CHECK(before.classes.size() == 5);
  CHECK(after.classes.size() == 4);
  CHECK(before.primitive_total() == 5);
  CHECK(after.primitive_total() == 4);
  CHECK(before.classes[0].degrees.size() == 3);
}

TEST_CASE("block identity on attachment histories") {
  for (int n = 4; n <= 10; ++n)
    for (int k = 1; k <= n - 3; ++k)
      for (int eps : {1, -1}) {
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(eps);
        AttachmentHistory h{n, {{k, eps}}};
        const auto d = apply_attachments(h);
        CHECK(d.n == n - 1);
        const auto b = block_identity_check(d, h.sigma_plus(), h.sigma_minus(), h);
        CHECK(b.ok);
        const auto chk = check_C4_C5(d);
        if (chk.ok) {
          const auto r = c5_torus_ranks(d);
          CHECK(r.n_plus == b.dim_plus);
          CHECK(r.n_minus == b.dim_minus);
        }
      }
}

TEST_CASE("two spaced attachments") {
  AttachmentHistory h{9, {{1, 1}, {4, -1}}};
  const auto d = apply_attachments(h);
  const auto b = block_identity_check(d, h.sigma_plus(), h.sigma_minus(), h);
  CHECK(b.ok);
  CHECK(b.lhs_plus == b.rhs_plus);
  CHECK(b.lhs_minus == b.rhs_minus);
}

TEST_CASE("invalid histories are refused") {
  CHECK_THROWS_AS(apply_attachments({6, {{4, 1}}}), PreconditionError);
  CHECK_THROWS_AS(apply_attachments({9, {{1, 1}, {2, 1}}}), PreconditionError);
  const auto d = ChordDiagram::parallel(5);
  CHECK_THROWS_AS(block_identity_check(d, {}, {}, std::nullopt), PreconditionError);
}

TEST_CASE("c5 failure is reported") {
  // Three nested chords around one bigon fail the cut condition.
  const auto d = ChordDiagram::from_pairs(3, {{0, 5}, {1, 4}, {2, 3}});
  const auto chk = check_C4_C5(d);
  if (!chk.ok) {
    CHECK_FALSE(chk.reason.empty());
    CHECK_THROWS_AS(c5_torus_ranks(d), PreconditionError);
  }
}
