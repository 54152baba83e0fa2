#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reeb/diagrams.hpp"

namespace reeb {

struct RankClass {
  std::string cls;          // homotopy class label
  int primitive_count = 0;  // simple orbits in the class
  std::vector<int> degrees; // one entry per listed generator (multiples included)
};

struct RankReport {
  std::string provenance;
  std::vector<RankClass> classes;
  int n_plus = 0;
  int n_minus = 0;

  int primitive_total() const;
};

// n+1 simple orbits Gamma_k x {0}, k = 0..n, all even; `multiples` covers
// listed per class.
RankReport thickened_surface_ranks(int n_components, int multiples = 1);

// Gamma_0's tower removed; classes k = 1..n remain.
RankReport after_bypass_ranks(int n_components, int multiples = 1);

// n_+ = ceil((n-1)/2), n_- = n-1-n_+.
RankReport parallel_torus_ranks(int n);

// Sign convention under which the parallel diagram reproduces
// parallel_torus_ranks: the bigon at interval n is negative.
int canonical_parallel_sign(int n);

// n_pm = chi_pm + #{mp non-extremal bigons} - #{pm bigons}. The witness is
// the first one check_C4_C5 finds. Throws PreconditionError if (C5) fails.
RankReport c5_torus_ranks(const ChordDiagram& d);

// Bypass attachments on the canonical parallel diagram with n chords.
// Orbit delta_k (k = 0..n-2) sits in region n-1-k, whose sign is (-1)^k.
// An attachment at k joins the two chords bounding that region on the side
// eps (+1: lower labels, -1: upper labels). Valid positions have
// 1 <= k <= n-3 and consecutive positions at least 3 apart.
struct Attachment {
  int k = 1;
  int eps = 1;
};

struct AttachmentHistory {
  int n = 0;
  std::vector<Attachment> steps;

  std::vector<int> sigma_plus() const;   // even positions
  std::vector<int> sigma_minus() const;  // odd positions
};

// Throws PreconditionError on an invalid sequence.
ChordDiagram apply_attachments(const AttachmentHistory& h);

struct BlockIdentity {
  bool ok = false;
  int dim_plus = 0, dim_minus = 0;
  int lhs_plus = 0, rhs_plus = 0;
  int lhs_minus = 0, rhs_minus = 0;
};

// dim(E_pm) + #sigma_pm + #{pm extremal bigon} = chi(S_pm) + #sigma_mp,
// with dim(E_+) = #{even k in [0, n-2] not in sigma_+} and dim(E_-) the odd
// counterpart. Throws PreconditionError without a history or if d does not
// come from it.
BlockIdentity block_identity_check(const ChordDiagram& d, const std::vector<int>& sigma_plus,
                                   const std::vector<int>& sigma_minus,
                                   const std::optional<AttachmentHistory>& history);

nlohmann::json rank_json(const RankReport& r);

}  // namespace reeb
