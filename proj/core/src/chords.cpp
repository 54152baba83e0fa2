#include "reeb/chords.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reeb/errors.hpp"
#include "reeb/parallel.hpp"

namespace reeb {

namespace {

constexpr double kPi = std::numbers::pi;

struct Shot {
  bool ok = false;
  double x = 0.0;
  Vec3 end = Vec3::Zero();
  double T = 0.0;
};

struct Bracket {
  std::size_t from, to;
  double level;
  Shot a, b;
};

class Shooter {
 public:
  Shooter(const ContactModel& m, const AttachingArc& arc, double K, const FlowSettings& s)
      : m_(m), arc_(arc), K_(K), s_(s) {
    s_.max_time = K;
  }

  Shot operator()(std::size_t c, double x) const {
    Shot out;
    out.x = x;
    const ArcComponent& comp = arc_.components[c];
    const ChartPoint p0{x, m_.box().y_S, comp.z};
    if (!m_.box().contains(p0)) return out;
    Trajectory tr = integrate(m_, p0, K_, s_, {Section::plane_y(m_.box().y_S, 1)}, true);
    if (tr.events.empty()) return out;
    const double T = tr.events.front().t;
    if (T <= 1e-6) return out;
    out.ok = true;
    out.end = tr.events.front().p.vec();
    out.T = T;
    return out;
  }

  const AttachingArc& arc() const { return arc_; }
  double period() const { return m_.box().z_period; }

  // Smallest lattice level strictly above (dir>0) or below (dir<0) z, over
  // all pieces. Returns the level and the piece index.
  std::pair<double, std::size_t> next_level(double z, int dir) const {
    const double P = period();
    double best = dir > 0 ? INFINITY : -INFINITY;
    std::size_t which = 0;
    for (std::size_t e = 0; e < arc_.components.size(); ++e) {
      const double z0 = arc_.components[e].z;
      double L;
      if (dir > 0) {
        L = z0 + P * std::floor((z - z0) / P + 1.0);
        if (L <= z) L += P;
        if (L < best) best = L, which = e;
      } else {
        L = z0 + P * std::ceil((z - z0) / P - 1.0);
        if (L >= z) L -= P;
        if (L > best) best = L, which = e;
      }
    }
    return {best, which};
  }

 private:
  const ContactModel& m_;
  const AttachingArc& arc_;
  double K_;
  FlowSettings s_;
};

// Illinois regula falsi on z_end(x) - level, bisecting whenever a trial
// shot fails to return.
std::optional<Shot> polish(const Shooter& shoot, const Bracket& br, double tol) {
  Shot a = br.a, b = br.b;
  double fa = a.end[2] - br.level, fb = b.end[2] - br.level;
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    if (std::fabs(b.x - a.x) < 1e-15) break;
    double x = (a.x * fb - b.x * fa) / (fb - fa);
    if (!(x > std::min(a.x, b.x) && x < std::max(a.x, b.x))) x = 0.5 * (a.x + b.x);
    Shot c = shoot(br.from, x);
    if (!c.ok) {
      c = shoot(br.from, 0.5 * (a.x + b.x));
      if (!c.ok) return std::nullopt;
    }
    const double fc = c.end[2] - br.level;
    if (std::fabs(fc) < tol) return c;
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  const Shot& best = std::fabs(fa) < std::fabs(fb) ? a : b;
  if (std::fabs((best.end[2] - br.level)) < 1e3 * tol) return best;
  return std::nullopt;
}

// x-positions on the piece where R is tangent to the surface.
std::vector<double> tangency_points(const ContactModel& m, const ArcComponent& c, double y) {
  std::vector<double> out;
  const int n = 2000;
  auto ry = [&](double x) { return reeb_field_unchecked(m, {x, y, c.z})[1]; };
  double xa = c.x_lo, fa = ry(xa);
  for (int i = 1; i <= n; ++i) {
    const double xb = c.x_lo + (c.x_hi - c.x_lo) * i / n;
    const double fb = ry(xb);
    if (fa == 0.0) out.push_back(xa);
    else if ((fa < 0) != (fb < 0)) {
      double lo = xa, hi = xb, flo = fa;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = ry(mid);
        if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
        else hi = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  return out;
}

std::vector<Bracket> scan(const Shooter& shoot, std::size_t c, int n) {
  const ArcComponent& comp = shoot.arc().components[c];
  std::vector<Shot> shots(n);
  parallel_for(std::size_t(n), [&](std::size_t i) {
    const double x = comp.x_lo + (double(i) + 0.5) * (comp.x_hi - comp.x_lo) / n;
    shots[i] = shoot(c, x);
  });

  std::vector<Bracket> out;
  auto add_crossings = [&](const Shot& a, const Shot& b) {
    // every lattice level strictly between the two end heights
    const double lo = std::min(a.end[2], b.end[2]), hi = std::max(a.end[2], b.end[2]);
    double z = lo;
    for (;;) {
      auto [L, e] = shoot.next_level(z, 1);
      if (L > hi) break;
      // the level may be reached on several pieces at once
      for (std::size_t k = 0; k < shoot.arc().components.size(); ++k) {
        const double z0 = shoot.arc().components[k].z;
        const double w = (L - z0) / shoot.period();
        if (std::fabs(w - std::round(w)) < 1e-12) out.push_back({c, k, L, a, b});
      }
      (void)e;
      z = L;
    }
  };
  // from a returning shot toward a non-returning one: chase levels by bisection
  auto edge = [&](Shot a, Shot b_fail) {
    for (int dir : {1, -1}) {
      Shot lo = a;
      double xb = b_fail.x;
      auto [L, e] = shoot.next_level(lo.end[2], dir);
      (void)e;
      for (int it = 0; it < 400 && std::fabs(xb - lo.x) > 1e-13; ++it) {
        const Shot mid = shoot(c, 0.5 * (lo.x + xb));
        if (!mid.ok) {
          xb = mid.x;
          continue;
        }
        if ((mid.end[2] - L) * (lo.end[2] - L) <= 0.0) {
          add_crossings(lo, mid);
          L = shoot.next_level(mid.end[2], dir).first;
        }
        lo = mid;
      }
    }
  };

  for (int i = 0; i + 1 < n; ++i) {
    const Shot& a = shots[i];
    const Shot& b = shots[i + 1];
    if (a.ok && b.ok) add_crossings(a, b);
    else if (a.ok && !b.ok) edge(a, b);
    else if (!a.ok && b.ok) edge(b, a);
  }
  return out;
}

}  // namespace

AttachingArc AttachingArc::three_components(const ContactModel& m) {
  const Box& b = m.box();
  return {{{"A", b.x_lo, b.x_hi, 0.0, 1, "c"}}};
}

AttachingArc AttachingArc::trivial(const ContactModel& m, double z1) {
  AttachingArc a = three_components(m);
  a.components.push_back({"B", 0.0, m.box().x_hi, z1, -1, "d"});
  return a;
}

AttachingArc AttachingArc::overtwisted(const ContactModel& m, double z1) { return trivial(m, z1); }

ChordSearch find_chords(const ContactModel& m, const AttachingArc& arc, double K, const ChordSearchOptions& opt,
                        const FlowSettings& s) {
  s.validate();
  if (!(K > 0)) throw ParameterError("K must be positive");
  if (arc.components.empty()) throw ParameterError("attaching arc has no pieces");
  const double y = m.box().y_S;
  Shooter shoot(m, arc, K, s);

  std::vector<std::vector<double>> tangencies;
  for (const auto& c : arc.components) tangencies.push_back(tangency_points(m, c, y));

  auto run = [&](int n) {
    std::vector<Bracket> brackets;
    for (std::size_t c = 0; c < arc.components.size(); ++c) {
      auto b = scan(shoot, c, n);
      brackets.insert(brackets.end(), b.begin(), b.end());
    }
    std::vector<std::optional<TransverseChord>> found(brackets.size());
    parallel_for(brackets.size(), [&](std::size_t i) {
      const Bracket& br = brackets[i];
      auto hit = polish(shoot, br, s.event_tol);
      if (!hit) return;
      const ArcComponent& from = arc.components[br.from];
      const ArcComponent& to = arc.components[br.to];
      if (hit->end[0] < to.x_lo || hit->end[0] > to.x_hi || hit->T >= K) return;
      TransverseChord ch;
      ch.start = {hit->x, y, from.z};
      ch.end = ChartPoint::from(hit->end);
      ch.period = hit->T;
      ch.winding = int(std::floor((ch.end.z - ch.start.z) / m.box().z_period + 1e-9));
      ch.from = br.from;
      ch.to = br.to;
      ch.label = to.prefix + std::to_string(ch.winding);
      // tangent of the image curve s -> end(s) against the arc direction dx
      const double h = 1e-6 * (from.x_hi - from.x_lo);
      const Shot p = shoot(br.from, hit->x + h), q = shoot(br.from, hit->x - h);
      if (p.ok && q.ok) {
        const double dx = p.end[0] - q.end[0], dz = p.end[2] - q.end[2];
        ch.transversality_margin = std::fabs(dz) / std::hypot(dx, dz);
      }
      found[i] = ch;
    });

    ChordSearch out;
    for (auto& f : found) {
      if (!f) continue;
      bool near = false;
      if (opt.exclusion_band > 0.0) {
        for (double xg : tangencies[f->from]) near |= std::fabs(f->start.x - xg) < opt.exclusion_band;
        for (double xg : tangencies[f->to]) near |= std::fabs(f->end.x - xg) < opt.exclusion_band;
      }
      (near ? out.flagged : out.chords).push_back(*f);
    }
    auto dedup = [&](std::vector<TransverseChord>& v) {
      std::sort(v.begin(), v.end(), [](const TransverseChord& a, const TransverseChord& b) {
        if (a.from != b.from) return a.from < b.from;
        return a.start.x < b.start.x;
      });
      std::vector<TransverseChord> keep;
      for (auto& c : v) {
        if (!keep.empty()) {
          const auto& k = keep.back();
          if (k.from == c.from && k.to == c.to && k.winding == c.winding &&
              std::fabs(k.start.x - c.start.x) < 10 * s.event_tol + 1e-9 &&
              (k.end.vec() - c.end.vec()).norm() < 10 * s.event_tol + 1e-9)
            continue;
        }
        keep.push_back(c);
      }
      std::sort(keep.begin(), keep.end(),
                [](const TransverseChord& a, const TransverseChord& b) { return a.period < b.period; });
      v = std::move(keep);
    };
    dedup(out.chords);
    dedup(out.flagged);
    out.grid_used = n;
    return out;
  };

  ChordSearch best = run(opt.grid_n);
  int stable = 0;
  for (int n = 2 * opt.grid_n; n <= opt.max_grid && stable < 2; n *= 2) {
    ChordSearch next = run(n);
    stable = next.chords.size() == best.chords.size() ? stable + 1 : 0;
    best = std::move(next);
  }
  return best;
}

ChordIndex chord_index(const ContactModel& m, const AttachingArc& arc, const TransverseChord& c,
                       const FlowSettings& s) {
  ChordIndex out;
  out.path = linearized_flow(m, c.start, c.period, default_frame(m), s);
  const int eps_in = arc.components.at(c.from).orientation;
  const int eps_out = -arc.components.at(c.to).orientation;
  out.half_turn = eps_in != eps_out;
  if (out.half_turn) {
    for (std::size_t i = 0; i < out.path.size(); ++i) {
      const double a = kPi * out.path.t[i] / c.period;
      Mat2 R;
      R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
      out.path.M[i] = R * out.path.M[i];
    }
  }
  out.mu = mu_tilde(out.path, c.period);
  return out;
}

nlohmann::json chords_json(const std::vector<TransverseChord>& chords) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : chords)
    arr.push_back({{"label", c.label},
                   {"start", {c.start.x, c.start.y, c.start.z}},
                   {"end", {c.end.x, c.end.y, c.end.z}},
                   {"period", c.period},
                   {"winding", c.winding},
                   {"margin", c.transversality_margin}});
  return {{"chords", arr}};
}

}  // namespace reeb
