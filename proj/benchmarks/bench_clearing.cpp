#include <benchmark/benchmark.h>

#include "lemsim/clearing.hpp"
#include "lemsim/rng.hpp"

using namespace lemsim;

namespace {

LimitOrderSet random_set(int n, std::uint64_t seed)
{
    Rng rng(seed);
    LimitOrderSet o;
    for (int i = 0; i < n; ++i) {
        const LimitOrder x{i, ticks(800 + 10 * static_cast<std::int64_t>(rng.index(440))),
                           wh(1 + static_cast<std::int64_t>(rng.index(4000)))};
        (i % 2 ? o.sells : o.buys).push_back(x);
    }
    return o;
}

void BM_Equilibrium(benchmark::State& state)
{
    const auto o = random_set(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(clear_equilibrium(o));
}
BENCHMARK(BM_Equilibrium)->Arg(20)->Arg(200)->Arg(2000);

// n + 1 welfare solves per call.
void BM_Vcg(benchmark::State& state)
{
    const auto o = random_set(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(vcg(o));
}
BENCHMARK(BM_Vcg)->Arg(20)->Arg(200)->Arg(2000);

}  // namespace
