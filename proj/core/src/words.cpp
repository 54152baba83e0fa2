#include "reeb/words.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "reeb/errors.hpp"

namespace reeb {

namespace {

template <class T>
std::vector<T> rotate_to(const std::vector<T>& s, std::size_t k) {
  std::vector<T> out(s.begin() + long(k), s.end());
  out.insert(out.end(), s.begin(), s.begin() + long(k));
  return out;
}

std::string join(const std::vector<std::string>& w, char sep) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += w[i];
  }
  return out;
}

}  // namespace

CyclicWord canonical_rotation(const std::vector<std::string>& seq) {
  if (seq.empty()) throw PreconditionError("cannot canonicalize an empty word");
  CyclicWord w;
  w.letters = rotate_to(seq, least_rotation(seq));
  const std::size_t p = primitive_period(w.letters);
  w.root.assign(w.letters.begin(), w.letters.begin() + long(p));
  w.multiplicity = int(w.letters.size() / p);
  return w;
}

std::vector<OrbitRecord> enumerate_orbits(const std::vector<ChordDatum>& chords, double K, double tau) {
  for (const auto& c : chords)
    if (!(c.period > 0.0)) throw PreconditionError("chord '" + c.label + "' has non-positive period");

  // letter order (period, label)
  std::vector<std::size_t> order(chords.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (chords[a].period != chords[b].period) return chords[a].period < chords[b].period;
    return chords[a].label < chords[b].label;
  });

  std::vector<OrbitRecord> out;
  std::vector<int> word;  // positions in `order`
  // Depth-first over letter sequences with action < K. A sequence is kept
  // exactly when it is its own least rotation, so each class appears once.
  auto dfs = [&](auto&& self, double acc) -> void {
    for (std::size_t r = 0; r < order.size(); ++r) {
      const double a = acc + chords[order[r]].period;
      if (std::fabs(a - K) < 1e-9)
        throw BoundaryError("K is within 1e-9 of an achievable action; move K slightly");
      if (a > K) continue;
      word.push_back(int(r));
      if (least_rotation(word) == 0) {
        OrbitRecord rec;
        const std::size_t p = primitive_period(word);
        int root_cz = 0;
        for (std::size_t i = 0; i < word.size(); ++i) {
          const ChordDatum& c = chords[order[std::size_t(word[i])]];
          rec.word.letters.push_back(c.label);
          rec.cz += c.mu_tilde;
          rec.homotopy += c.homotopy_weight;
          if (i < p) root_cz += c.mu_tilde;
        }
        rec.word.root.assign(rec.word.letters.begin(), rec.word.letters.begin() + long(p));
        rec.word.multiplicity = int(word.size() / p);
        rec.action = a;
        rec.parity = rec.cz % 2 == 0 ? Parity::even : Parity::odd;
        OrbitParity prim;
        prim.type = OrbitType::hyperbolic;
        prim.parity = root_cz % 2 == 0 ? Parity::even : Parity::odd;
        rec.good = is_good(prim, rec.word.multiplicity);
        const double k = double(word.size());
        rec.window_lo = a - 9.0 * k * tau;
        rec.window_hi = a + 9.0 * k * tau;
        out.push_back(std::move(rec));
      }
      self(self, a);
      word.pop_back();
    }
  };
  dfs(dfs, 0.0);

  std::map<std::string, std::size_t> rank;
  for (std::size_t r = 0; r < order.size(); ++r) rank[chords[order[r]].label] = r;
  std::stable_sort(out.begin(), out.end(), [&](const OrbitRecord& a, const OrbitRecord& b) {
    if (a.action != b.action) return a.action < b.action;
    return std::lexicographical_compare(
        a.word.letters.begin(), a.word.letters.end(), b.word.letters.begin(), b.word.letters.end(),
        [&](const std::string& x, const std::string& y) { return rank[x] < rank[y]; });
  });
  return out;
}

std::vector<std::vector<int>> compositions_up_to_cyclic(int l) {
  if (l < 1) throw PreconditionError("l must be >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> parts;
  auto rec = [&](auto&& self, int left) -> void {
    if (left == 0) {
      if (least_rotation(parts) == 0) out.push_back(parts);
      return;
    }
    for (int p = 1; p <= left; ++p) {
      parts.push_back(p);
      self(self, left - p);
      parts.pop_back();
    }
  };
  rec(rec, l);
  return out;
}

std::map<int, int> graded_block(const std::vector<OrbitRecord>& records, int homotopy, bool include_bad) {
  std::map<int, int> out;
  for (const auto& r : records) {
    if (r.homotopy != homotopy) continue;
    if (!r.good && !include_bad) continue;
    ++out[r.cz];
  }
  return out;
}

int euler_characteristic(const std::map<int, int>& block) {
  int chi = 0;
  for (const auto& [deg, n] : block) chi += (deg % 2 == 0 ? 1 : -1) * n;
  return chi;
}

std::vector<ChordDatum> winding_chord_family(int kmax, double drift) {
  std::vector<ChordDatum> out;
  for (int k = 1; k <= kmax; ++k)
    out.push_back({"c" + std::to_string(k), 2.0 * std::numbers::pi * k + drift * k, 1, k});
  return out;
}

std::string orbits_csv(const std::vector<OrbitRecord>& records) {
  std::ostringstream os;
  os.precision(17);
  os << "word,action,cz,homotopy,parity,good,window_lo,window_hi\n";
  for (const auto& r : records)
    os << join(r.word.letters, ' ') << ',' << r.action << ',' << r.cz << ',' << r.homotopy << ','
       << to_string(r.parity) << ',' << (r.good ? "true" : "false") << ',' << r.window_lo << ',' << r.window_hi
       << '\n';
  return os.str();
}

nlohmann::json orbits_json(const std::vector<OrbitRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records)
    arr.push_back({{"word", r.word.letters},
                   {"root", r.word.root},
                   {"multiplicity", r.word.multiplicity},
                   {"action", r.action},
                   {"cz", r.cz},
                   {"homotopy", r.homotopy},
                   {"parity", to_string(r.parity)},
                   {"good", r.good},
                   {"window", {r.window_lo, r.window_hi}}});
  return {{"orbits", arr}};
}

std::vector<ChordDatum> chords_from_json(const nlohmann::json& j) {
  std::vector<ChordDatum> out;
  const nlohmann::json& arr = j.is_array() ? j : j.at("chords");
  for (const auto& c : arr) {
    ChordDatum d;
    d.label = c.at("label").get<std::string>();
    d.period = c.at("period").get<double>();
    d.mu_tilde = c.value("mu_tilde", 1);
    d.homotopy_weight = c.value("homotopy_weight", c.value("winding", 0));
    out.push_back(d);
  }
  return out;
}

}  // namespace reeb
