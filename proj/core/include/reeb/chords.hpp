#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reeb/cz.hpp"
#include "reeb/flow.hpp"
#include "reeb/model.hpp"

namespace reeb {

// One straight piece {x in [x_lo, x_hi], y = y_S, z = z} of an attaching arc.
// orientation is +1 when the piece is traversed in the chart's x direction
// and -1 when it is traversed backwards; it fixes the section-adapted
// trivialization at chord endpoints on this piece.
struct ArcComponent {
  std::string name;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double z = 0.0;
  int orientation = 1;
  std::string prefix = "c";  // label prefix for chords ending here
};

struct AttachingArc {
  std::vector<ArcComponent> components;

  // The arc meets three distinct dividing components: one piece through the
  // whole neighbourhood.
  static AttachingArc three_components(const ContactModel& m);
  // Adds a reversed piece over x >= 0 at height z1 inside the window where
  // the perturbation is off.
  static AttachingArc trivial(const ContactModel& m, double z1 = 0.05);
  // Same, with the extra piece half a turn away.
  static AttachingArc overtwisted(const ContactModel& m, double z1 = 3.141592653589793);
};

struct TransverseChord {
  ChartPoint start;
  ChartPoint end;
  double period = 0.0;
  int winding = 0;
  double transversality_margin = 0.0;
  std::string label;
  std::size_t from = 0;  // component indices
  std::size_t to = 0;
};

struct ChordSearchOptions {
  int grid_n = 512;
  int max_grid = 1 << 15;
  // Endpoints closer than this to the tangency locus are flagged instead of
  // returned. 0 disables the check.
  double exclusion_band = 0.0;
};

struct ChordSearch {
  std::vector<TransverseChord> chords;
  std::vector<TransverseChord> flagged;
  int grid_used = 0;
};

// Shoots from samples of each arc piece, keeps flows that come back to the
// surface within time K on some piece, and polishes each crossing of a
// lattice level z_piece + w*z_period to event_tol. The grid is doubled until
// the chord count is unchanged for two doublings.
ChordSearch find_chords(const ContactModel& m, const AttachingArc& arc, double K,
                        const ChordSearchOptions& opt, const FlowSettings& s);

struct ChordIndex {
  SymplecticPath path;  // in the section-adapted trivialization
  MuTilde mu;
  bool half_turn = false;
};

// Linearized flow along the chord in the default frame, corrected by a
// half-turn of the frame when the arc orientations seen at the two ends
// disagree. That correction is what makes the trivialization avoid the
// small translates of the chord along dy.
ChordIndex chord_index(const ContactModel& m, const AttachingArc& arc, const TransverseChord& c,
                       const FlowSettings& s);

nlohmann::json chords_json(const std::vector<TransverseChord>& chords);

}  // namespace reeb
