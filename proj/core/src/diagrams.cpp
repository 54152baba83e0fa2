#include "reeb/diagrams.hpp"

#include <algorithm>
#include <map>

#include "reeb/errors.hpp"

namespace reeb {

namespace {

int sign_of_interval(const ChordDiagram& d, int j) { return (j % 2 == 0) ? d.base_sign : -d.base_sign; }

}  // namespace

bool is_non_crossing(const std::vector<int>& match) {
  const int N = int(match.size());
  for (int a = 0; a < N; ++a) {
    const int b = match[a];
    if (b <= a) continue;
    for (int p = a + 1; p < b; ++p)
      if (match[p] < a || match[p] > b) return false;
  }
  return true;
}

void ChordDiagram::validate() const {
  if (n < 0 || int(match.size()) != 2 * n) throw PreconditionError("diagram needs exactly 2n boundary points");
  for (int i = 0; i < 2 * n; ++i) {
    const int j = match[i];
    if (j < 0 || j >= 2 * n || j == i || match[j] != i) throw PreconditionError("diagram matching is not an involution");
  }
  if (!is_non_crossing(match)) throw PreconditionError("diagram has crossing chords");
  if (base_sign != 1 && base_sign != -1) throw PreconditionError("base_sign must be +1 or -1");
}

std::vector<std::pair<int, int>> ChordDiagram::chords() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < 2 * n; ++i)
    if (i < match[i]) out.emplace_back(i, match[i]);
  return out;
}

ChordDiagram ChordDiagram::parallel(int n, int base_sign) {
  if (n < 1) throw PreconditionError("parallel diagram needs n >= 1");
  std::vector<std::pair<int, int>> pairs{{0, 1}};
  for (int i = 1; i < n; ++i) pairs.emplace_back(i + 1, 2 * n - i);
  return from_pairs(n, pairs, base_sign);
}

ChordDiagram ChordDiagram::from_pairs(int n, const std::vector<std::pair<int, int>>& pairs, int base_sign) {
  ChordDiagram d;
  d.n = n;
  d.base_sign = base_sign;
  d.match.assign(std::size_t(2 * n), -1);
  if (int(pairs.size()) != n) throw PreconditionError("diagram needs exactly n chords");
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= 2 * n || b >= 2 * n || d.match[a] != -1 || d.match[b] != -1)
      throw PreconditionError("chord endpoints out of range or reused");
    d.match[a] = b;
    d.match[b] = a;
  }
  d.validate();
  return d;
}

AttachResult attach_bypass(const ChordDiagram& d, const ArcSpec& arc) {
  d.validate();
  const int N = 2 * d.n;
  int a = arc.a, b = arc.b;
  if (N < 2 || a < 0 || b < 0 || a >= N || b >= N) throw PreconditionError("arc endpoints out of range");
  if (a == (b + 1) % N) std::swap(a, b);
  if (b != (a + 1) % N) throw PreconditionError("arc must span two cyclically adjacent boundary points");

  AttachResult r;
  r.boundary_components_before = N;
  if (d.match[a] == b) {
    r.rejection = Rejection{"overtwisted", "both ends lie on one chord; gluing closes a dividing curve"};
    r.boundary_components_after = N;
    return r;
  }
  const int p = d.match[a], q = d.match[b];
  r.relabel.assign(std::size_t(N), -1);
  int next = 0;
  for (int i = 0; i < N; ++i)
    if (i != a && i != b) r.relabel[i] = next++;

  ChordDiagram out;
  out.n = d.n - 1;
  out.match.assign(std::size_t(2 * out.n), -1);
  for (int i = 0; i < N; ++i) {
    if (i == a || i == b || i == p || i == q) continue;
    out.match[r.relabel[i]] = r.relabel[d.match[i]];
  }
  if (out.n > 0) {
    out.match[r.relabel[p]] = r.relabel[q];
    out.match[r.relabel[q]] = r.relabel[p];
  }
  // the new marked interval starts at the old point renamed 0
  int old0 = 0;
  while (old0 < N && r.relabel[old0] != 0) ++old0;
  out.base_sign = old0 < N ? sign_of_interval(d, old0) : d.base_sign;
  out.validate();
  r.diagram = out;
  r.boundary_components_after = 2 * out.n;
  return r;
}

RegionCensus region_census(const ChordDiagram& d, const std::optional<C5Witness>& w) {
  d.validate();
  const int N = 2 * d.n;
  RegionCensus c;
  if (N == 0) {
    c.regions.push_back({d.base_sign, {}, {}, false, false});
    (d.base_sign > 0 ? c.chi_plus : c.chi_minus) = 1;
    return c;
  }
  c.region_of_interval.assign(std::size_t(N), -1);
  for (int j = 0; j < N; ++j) {
    if (c.region_of_interval[j] != -1) continue;
    Region reg;
    const int id = int(c.regions.size());
    int cur = j;
    do {
      c.region_of_interval[cur] = id;
      reg.intervals.push_back(cur);
      const int pt = (cur + 1) % N;
      reg.chords.push_back(std::min(pt, d.match[pt]));
      cur = d.match[pt];
    } while (cur != j);
    std::sort(reg.intervals.begin(), reg.intervals.end());
    std::sort(reg.chords.begin(), reg.chords.end());
    reg.chords.erase(std::unique(reg.chords.begin(), reg.chords.end()), reg.chords.end());
    reg.sign = sign_of_interval(d, reg.intervals.front());
    reg.bigon = reg.chords.size() == 1;
    c.regions.push_back(std::move(reg));
  }
  if (w) {
    c.regions[c.region_of_interval[w->j1]].extremal = true;
    c.regions[c.region_of_interval[w->j2]].extremal = true;
  }
  for (const auto& r : c.regions) (r.sign > 0 ? c.chi_plus : c.chi_minus) += 1;
  return c;
}

C5Result check_C4_C5(const ChordDiagram& d) {
  d.validate();
  const int N = 2 * d.n;
  C5Result res;
  if (d.n < 1) {
    res.reason = "empty diagram";
    return res;
  }
  const RegionCensus cen = region_census(d);
  std::vector<int> bigon_intervals;
  for (int j = 0; j < N; ++j)
    if (cen.regions[cen.region_of_interval[j]].bigon) bigon_intervals.push_back(j);
  if (bigon_intervals.size() < 2) {
    res.reason = "fewer than two bigons";
    return res;
  }
  std::string last_reason = "no partition with at most one inner chord per complementary region";
  for (std::size_t u = 0; u < bigon_intervals.size(); ++u) {
    for (std::size_t v = u + 1; v < bigon_intervals.size(); ++v) {
      const int j1 = bigon_intervals[u], j2 = bigon_intervals[v];
      auto in1 = [&](int p) { return p > j1 && p <= j2; };
      std::vector<int> cross_pts;
      std::vector<int> inner;  // smaller endpoint of chords with both ends on one side
      for (int p = 0; p < N; ++p) {
        if (in1(p) != in1(d.match[p])) cross_pts.push_back(p);
        else if (p < d.match[p]) inner.push_back(p);
      }
      // faces of the disc cut along the crossing chords; a face is traced
      // through boundary arcs that start at a crossing endpoint
      std::map<int, int> face_of_arc;
      int faces = 0;
      auto arc_start = [&](int p) {
        // the last crossing endpoint at or before p, cyclically
        int best = -1;
        for (int e : cross_pts)
          if (e <= p) best = e;
        return best == -1 ? cross_pts.back() : best;
      };
      for (int e : cross_pts) {
        if (face_of_arc.count(e)) continue;
        int cur = e;
        while (!face_of_arc.count(cur)) {
          face_of_arc[cur] = faces;
          auto it = std::upper_bound(cross_pts.begin(), cross_pts.end(), cur);
          const int nx = it == cross_pts.end() ? cross_pts.front() : *it;
          cur = d.match[nx];
        }
        ++faces;
      }
      std::map<int, int> count;
      bool ok = true;
      for (int p : inner) {
        const int f = cross_pts.empty() ? 0 : face_of_arc.at(arc_start(p));
        if (++count[f] > 1) ok = false;
      }
      if (ok) {
        C5Witness w;
        w.j1 = j1;
        w.j2 = j2;
        for (int p = j1 + 1; p <= j2; ++p) w.i1.push_back(p);
        res.ok = true;
        res.witness = w;
        return res;
      }
    }
  }
  res.reason = last_reason;
  return res;
}

std::vector<ChordDiagram> enumerate_diagrams(int n, int base_sign) {
  if (n < 0) throw PreconditionError("n must be non-negative");
  std::vector<std::vector<int>> all;
  std::vector<int> m(std::size_t(2 * n), -1);
  // match the lowest free point with every admissible partner
  auto rec = [&](auto&& self, int lo) -> void {
    while (lo < 2 * n && m[lo] != -1) ++lo;
    if (lo >= 2 * n) {
      all.push_back(m);
      return;
    }
    for (int j = lo + 1; j < 2 * n; j += 2) {
      if (m[j] != -1) continue;
      // the points strictly between lo and j must pair among themselves
      bool free_between = true;
      for (int t = lo + 1; t < j; ++t) free_between &= m[t] == -1;
      if (!free_between) continue;
      m[lo] = j;
      m[j] = lo;
      self(self, lo + 1);
      m[lo] = m[j] = -1;
    }
  };
  rec(rec, 0);
  std::sort(all.begin(), all.end());
  std::vector<ChordDiagram> out;
  for (auto& mm : all) {
    ChordDiagram d;
    d.n = n;
    d.match = mm;
    d.base_sign = base_sign;
    out.push_back(std::move(d));
  }
  return out;
}

bool is_parallel(const ChordDiagram& d) {
  const RegionCensus c = region_census(d);
  for (const auto& r : c.regions)
    if (r.intervals.size() > 2) return false;
  return true;
}

void to_json(nlohmann::json& j, const ChordDiagram& d) {
  j = nlohmann::json{{"n", d.n}, {"matching", d.chords()}, {"base_sign", d.base_sign}};
}

void from_json(const nlohmann::json& j, ChordDiagram& d) {
  const int n = j.at("n").get<int>();
  const auto pairs = j.at("matching").get<std::vector<std::pair<int, int>>>();
  d = ChordDiagram::from_pairs(n, pairs, j.value("base_sign", 1));
}

nlohmann::json census_json(const RegionCensus& c) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : c.regions)
    regions.push_back({{"sign", r.sign},
                       {"intervals", r.intervals},
                       {"chords", r.chords},
                       {"bigon", r.bigon},
                       {"extremal", r.extremal}});
  return {{"regions", regions}, {"chi_plus", c.chi_plus}, {"chi_minus", c.chi_minus}};
}

}  // namespace reeb
