#include "reeb/ranks.hpp"

#include <algorithm>

#include "reeb/errors.hpp"

namespace reeb {

namespace {

RankReport tower(const std::string& provenance, int first, int last, int multiples) {
  if (multiples < 1) throw PreconditionError("multiples cap must be >= 1");
  RankReport r;
  r.provenance = provenance;
  for (int k = first; k <= last; ++k) {
    RankClass c;
    c.cls = "Gamma_" + std::to_string(k);
    c.primitive_count = 1;
    c.degrees.assign(std::size_t(multiples), 0);  // all even
    r.classes.push_back(c);
  }
  return r;
}

int count_in(const std::vector<int>& v, int k) { return int(std::count(v.begin(), v.end(), k)); }

}  // namespace

int RankReport::primitive_total() const {
  int t = 0;
  for (const auto& c : classes) t += c.primitive_count;
  return t;
}

RankReport thickened_surface_ranks(int n_components, int multiples) {
  if (n_components < 0) throw PreconditionError("n must be >= 0");
  return tower("thickened surface", 0, n_components, multiples);
}

RankReport after_bypass_ranks(int n_components, int multiples) {
  if (n_components < 1) throw PreconditionError("the arc must meet three distinct components (n >= 1)");
  return tower("thickened surface after bypass", 1, n_components, multiples);
}

RankReport parallel_torus_ranks(int n) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  RankReport r;
  r.provenance = "parallel solid torus";
  r.n_plus = (n - 1 + 1) / 2;
  r.n_minus = n - 1 - r.n_plus;
  r.classes.push_back({"+S1", r.n_plus, std::vector<int>(std::size_t(r.n_plus), 0)});
  r.classes.push_back({"-S1", r.n_minus, std::vector<int>(std::size_t(r.n_minus), 0)});
  return r;
}

int canonical_parallel_sign(int n) { return (n % 2 == 1) ? 1 : -1; }

RankReport c5_torus_ranks(const ChordDiagram& d) {
  const C5Result chk = check_C4_C5(d);
  if (!chk.ok) throw PreconditionError("(C5) fails: " + chk.reason);
  const RegionCensus c = region_census(d, chk.witness);
  int bigons[2] = {0, 0}, non_extremal[2] = {0, 0};  // index 0: +, 1: -
  for (const auto& r : c.regions) {
    if (!r.bigon) continue;
    const int s = r.sign > 0 ? 0 : 1;
    ++bigons[s];
    if (!r.extremal) ++non_extremal[s];
  }
  RankReport out;
  out.provenance = "solid torus with (C5) diagram";
  out.n_plus = c.chi_plus + non_extremal[1] - bigons[0];
  out.n_minus = c.chi_minus + non_extremal[0] - bigons[1];
  out.classes.push_back({"+S1", out.n_plus, std::vector<int>(std::size_t(std::max(0, out.n_plus)), 0)});
  out.classes.push_back({"-S1", out.n_minus, std::vector<int>(std::size_t(std::max(0, out.n_minus)), 0)});
  return out;
}

std::vector<int> AttachmentHistory::sigma_plus() const {
  std::vector<int> s;
  for (const auto& a : steps)
    if (a.k % 2 == 0) s.push_back(a.k);
  return s;
}

std::vector<int> AttachmentHistory::sigma_minus() const {
  std::vector<int> s;
  for (const auto& a : steps)
    if (a.k % 2 != 0) s.push_back(a.k);
  return s;
}

ChordDiagram apply_attachments(const AttachmentHistory& h) {
  const int n = h.n;
  if (n < 1) throw PreconditionError("history needs n >= 1");
  for (std::size_t j = 0; j < h.steps.size(); ++j) {
    const Attachment& a = h.steps[j];
    if (a.k < 1 || a.k > n - 3) throw PreconditionError("attachment position out of range [1, n-3]");
    if (a.eps != 1 && a.eps != -1) throw PreconditionError("attachment side must be +1 or -1");
    if (j > 0 && a.k - h.steps[j - 1].k < 3) throw PreconditionError("attachment positions must increase by >= 3");
  }
  ChordDiagram d = ChordDiagram::parallel(n, canonical_parallel_sign(n));
  std::vector<int> label(std::size_t(2 * n));
  for (int i = 0; i < 2 * n; ++i) label[i] = i;
  for (const Attachment& a : h.steps) {
    const int r = n - 1 - a.k;  // region between chords (r, 2n-r+1) and (r+1, 2n-r)
    const int p = a.eps > 0 ? r : 2 * n - r;
    const int q = p + 1;
    AttachResult res = attach_bypass(d, {label[p], label[q]});
    if (!res.diagram) throw PreconditionError("attachment rejected: " + res.rejection->reason);
    for (int& l : label) l = l < 0 ? -1 : res.relabel[l];
    d = *res.diagram;
  }
  return d;
}

BlockIdentity block_identity_check(const ChordDiagram& d, const std::vector<int>& sigma_plus,
                                   const std::vector<int>& sigma_minus,
                                   const std::optional<AttachmentHistory>& history) {
  if (!history) throw PreconditionError("block identity needs the attachment history");
  if (!(apply_attachments(*history) == d)) throw PreconditionError("diagram does not come from the given history");
  const int n = history->n;
  BlockIdentity b;
  for (int k = 0; k <= n - 2; ++k) {
    if (k % 2 == 0 && !count_in(sigma_plus, k)) ++b.dim_plus;
    if (k % 2 != 0 && !count_in(sigma_minus, k)) ++b.dim_minus;
  }
  const C5Result chk = check_C4_C5(d);
  if (!chk.ok) throw PreconditionError("(C5) fails: " + chk.reason);
  const RegionCensus c = region_census(d, chk.witness);
  int ext_plus = 0, ext_minus = 0;
  for (const auto& r : c.regions)
    if (r.bigon && r.extremal) (r.sign > 0 ? ext_plus : ext_minus) += 1;
  const int sp = int(sigma_plus.size()), sm = int(sigma_minus.size());
  b.lhs_plus = b.dim_plus + sp + ext_plus;
  b.rhs_plus = c.chi_plus + sm;
  b.lhs_minus = b.dim_minus + sm + ext_minus;
  b.rhs_minus = c.chi_minus + sp;
  b.ok = b.lhs_plus == b.rhs_plus && b.lhs_minus == b.rhs_minus;
  return b;
}

nlohmann::json rank_json(const RankReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : r.classes)
    classes.push_back({{"class", c.cls}, {"primitive_count", c.primitive_count}, {"degrees", c.degrees}});
  return {{"provenance", r.provenance}, {"classes", classes}, {"n_plus", r.n_plus}, {"n_minus", r.n_minus}};
}

}  // namespace reeb
