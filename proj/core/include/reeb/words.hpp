#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reeb/cz.hpp"

namespace reeb {

struct ChordDatum {
  std::string label;
  double period = 1.0;
  int mu_tilde = 1;
  int homotopy_weight = 0;
};

struct CyclicWord {
  std::vector<std::string> letters;  // minimal rotation
  std::vector<std::string> root;     // primitive u with letters = u^r
  int multiplicity = 1;
};

struct OrbitRecord {
  CyclicWord word;
  double action = 0.0;
  int cz = 0;
  int homotopy = 0;
  Parity parity = Parity::even;
  bool good = true;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Index of the lexicographically least rotation (Booth's algorithm).
template <class T>
std::size_t least_rotation(const std::vector<T>& s) {
  const long n = long(s.size());
  if (n == 0) return 0;
  auto at = [&](long i) -> const T& { return s[std::size_t(i % n)]; };
  std::vector<long> f(std::size_t(2 * n), -1);
  long k = 0;
  for (long j = 1; j < 2 * n; ++j) {
    const T& sj = at(j);
    long i = f[std::size_t(j - k - 1)];
    while (i != -1 && !(sj == at(k + i + 1))) {
      if (sj < at(k + i + 1)) k = j - i - 1;
      i = f[std::size_t(i)];
    }
    if (!(sj == at(k + i + 1))) {  // here i == -1
      if (sj < at(k)) k = j;
      f[std::size_t(j - k)] = -1;
    } else {
      f[std::size_t(j - k)] = i + 1;
    }
  }
  return std::size_t(k % n);
}

// Length of the primitive root: the least period p dividing n.
template <class T>
std::size_t primitive_period(const std::vector<T>& s) {
  const std::size_t n = s.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = s[i] == s[i - p];
    if (ok) return p;
  }
  return n;
}

// Minimal rotation under plain string order. Throws PreconditionError on
// an empty sequence.
CyclicWord canonical_rotation(const std::vector<std::string>& seq);

// Every cyclic class of nonempty words with action < K, once each, ordered
// by action then by the canonical letter sequence. Letters are ordered by
// (period, label) for canonicalization. tau sets the period windows
// [l - 9 k tau, l + 9 k tau] with k the word length.
// Throws BoundaryError when some word has action within 1e-9 of K.
std::vector<OrbitRecord> enumerate_orbits(const std::vector<ChordDatum>& chords, double K, double tau);

// Necklaces of positive integers summing to l, each in minimal rotation.
std::vector<std::vector<int>> compositions_up_to_cyclic(int l);

// degree -> number of generators in the given homotopy class.
std::map<int, int> graded_block(const std::vector<OrbitRecord>& records, int homotopy, bool include_bad);

int euler_characteristic(const std::map<int, int>& block);

// Chords c_1, c_2, ... with homotopy weight k, chord index 1 and period
// 2*pi*k + drift*k. Stands in for the c_k family of the bypass model.
std::vector<ChordDatum> winding_chord_family(int kmax, double drift = 0.05);

std::string orbits_csv(const std::vector<OrbitRecord>& records);
nlohmann::json orbits_json(const std::vector<OrbitRecord>& records);
std::vector<ChordDatum> chords_from_json(const nlohmann::json& j);

}  // namespace reeb
