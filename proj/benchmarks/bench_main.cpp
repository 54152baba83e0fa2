#include <cmath>

#include <benchmark/benchmark.h>

#include "reeb/chords.hpp"
#include "reeb/cz.hpp"
#include "reeb/diagrams.hpp"
#include "reeb/flow.hpp"
#include "reeb/horseshoe.hpp"
#include "reeb/words.hpp"

using namespace reeb;

static void BM_LinearizedFlowOnePeriod(benchmark::State& st) {
  const auto m = ContactModel::alpha_p();
  const auto frame = default_frame(m);
  for (auto _ : st)
    benchmark::DoNotOptimize(linearized_flow(m, {0, 0, 0}, 2 * M_PI, frame, FlowSettings{}).end().trace());
}
BENCHMARK(BM_LinearizedFlowOnePeriod)->Unit(benchmark::kMillisecond);

static void BM_ConleyZehnder(benchmark::State& st) {
  SymplecticPath p;
  const int n = int(st.range(0));
  for (int i = 0; i <= n; ++i) {
    const double a = 7.0 * i / n, s = std::exp(0.3 * std::sin(a));
    Mat2 R;
    R << std::cos(a) * s, -std::sin(a) / s, std::sin(a) * s, std::cos(a) / s;
    p.t.push_back(i);
    p.M.push_back(R);
  }
  p.M.front() = Mat2::Identity();
  for (auto _ : st) benchmark::DoNotOptimize(conley_zehnder(p));
}
BENCHMARK(BM_ConleyZehnder)->Arg(256)->Arg(4096);

static void BM_ChordSearch(benchmark::State& st) {
  const auto m = ContactModel::alpha_b();
  const auto arc = AttachingArc::three_components(m);
  for (auto _ : st) benchmark::DoNotOptimize(find_chords(m, arc, double(st.range(0)), {}, FlowSettings{}).chords.size());
}
BENCHMARK(BM_ChordSearch)->Arg(14)->Arg(35)->Unit(benchmark::kMillisecond);

static void BM_EnumerateOrbits(benchmark::State& st) {
  const auto fam = winding_chord_family(int(st.range(0)) + 1);
  for (auto _ : st)
    benchmark::DoNotOptimize(enumerate_orbits(fam, 2 * M_PI * (double(st.range(0)) + 0.5), 0.0).size());
}
BENCHMARK(BM_EnumerateOrbits)->Arg(8)->Arg(14);

static void BM_EnumerateDiagrams(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_diagrams(int(st.range(0))).size());
}
BENCHMARK(BM_EnumerateDiagrams)->Arg(6)->Arg(9);

static void BM_HorseshoeFixedPoint(benchmark::State& st) {
  SyntheticParams p;
  const auto phi = synthetic_bypass_map(p), psi = synthetic_manifold_map(p);
  std::vector<int> word;
  for (int i = 0; i < st.range(0); ++i) word.push_back(1 + (i % 3 == 2));
  const CompositeMap F(phi, psi, word);
  for (auto _ : st) benchmark::DoNotOptimize(unique_fixed_point(F).p);
}
BENCHMARK(BM_HorseshoeFixedPoint)->Arg(1)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_HorseshoeCertificate(benchmark::State& st) {
  SyntheticParams p;
  const auto psi = synthetic_manifold_map(p);
  for (auto _ : st) benchmark::DoNotOptimize(verify_dominated(psi, p.mu, p.nu, p.tau, 64).passed());
}
BENCHMARK(BM_HorseshoeCertificate)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
