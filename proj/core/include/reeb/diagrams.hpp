#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace reeb {

// Non-crossing perfect matching on boundary points 0..2n-1, counterclockwise.
// Boundary interval j runs from point j to point j+1 (mod 2n); interval 0
// is the marked one and its region has sign base_sign.
struct ChordDiagram {
  int n = 0;
  std::vector<int> match;
  int base_sign = 1;

  // Throws PreconditionError if the matching is not a non-crossing involution.
  void validate() const;

  // Chords as (i, match[i]) with i < match[i], sorted.
  std::vector<std::pair<int, int>> chords() const;

  // {(0,1), (2,2n-1), (3,2n-2), ..., (n,n+1)}: bigons at intervals 0 and n.
  static ChordDiagram parallel(int n, int base_sign = 1);
  static ChordDiagram from_pairs(int n, const std::vector<std::pair<int, int>>& pairs, int base_sign = 1);

  bool operator==(const ChordDiagram& o) const { return n == o.n && match == o.match && base_sign == o.base_sign; }
};

bool is_non_crossing(const std::vector<int>& match);

// Boundary points a and a+1 (mod 2n), on two different chords.
struct ArcSpec {
  int a = 0;
  int b = 1;
};

struct Rejection {
  std::string kind;  // "overtwisted" or "trivial"
  std::string reason;
};

struct AttachResult {
  std::optional<ChordDiagram> diagram;
  std::optional<Rejection> rejection;
  int boundary_components_before = 0;
  int boundary_components_after = 0;
  std::vector<int> relabel;  // old point -> new point, -1 if removed
};

// Joins the two chord ends at a and b; the other two ends become one chord.
// Remaining points are renumbered in increasing order. Throws
// PreconditionError if a and b are not adjacent.
AttachResult attach_bypass(const ChordDiagram& d, const ArcSpec& arc);

struct Region {
  int sign = 1;
  std::vector<int> intervals;  // increasing
  std::vector<int> chords;     // chord ids = smaller endpoint
  bool bigon = false;
  bool extremal = false;
};

struct C5Witness {
  int j1 = -1, j2 = -1;     // bigon intervals holding the two cut points
  std::vector<int> i1;      // points in I1 = {j1+1, ..., j2}
};

struct RegionCensus {
  std::vector<Region> regions;  // ordered by smallest interval
  int chi_plus = 0;
  int chi_minus = 0;
  std::vector<int> region_of_interval;
};

// With a witness, the two regions holding the cut points are marked extremal.
RegionCensus region_census(const ChordDiagram& d, const std::optional<C5Witness>& w = std::nullopt);

struct C5Result {
  bool ok = false;
  std::optional<C5Witness> witness;
  std::string reason;
};

// First witness in scan order (j1, j2) with j1 < j2, or the reason none exists.
C5Result check_C4_C5(const ChordDiagram& d);

// All non-crossing matchings on 2n points, in lexicographic order of match.
std::vector<ChordDiagram> enumerate_diagrams(int n, int base_sign = 1);

// Dual tree is a path.
bool is_parallel(const ChordDiagram& d);

void to_json(nlohmann::json& j, const ChordDiagram& d);
void from_json(const nlohmann::json& j, ChordDiagram& d);
nlohmann::json census_json(const RegionCensus& c);

}  // namespace reeb
