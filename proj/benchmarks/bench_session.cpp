#include <benchmark/benchmark.h>

#include "lemsim/sim.hpp"

using namespace lemsim;

namespace {

void BM_ZipSession(benchmark::State& state)
{
    const auto n = static_cast<int>(state.range(0));
    ZipParams params;
    Rng setup(3);
    std::vector<ZipAgent> agents;
    for (int i = 0; i < n; ++i) {
        const Side side = i % 2 ? Side::sell : Side::buy;
        agents.push_back(make_zip_agent(i, side, side == Side::buy ? 0.25 : 0.08, 0.08, 0.25, wh(500 + 37 * i), params, setup));
    }
    const double t_d = 60.0;
    const double lambda = default_lambda(agents.size(), t_d, params);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto copy = agents;
        OrderBook book;
        Rng rng(++seed);
        benchmark::DoNotOptimize(session(copy, book, t_d, lambda, rng, params));
    }
}
BENCHMARK(BM_ZipSession)->Arg(10)->Arg(40)->Arg(200);

void BM_RunDay(benchmark::State& state)
{
    ScenarioConfig c;
    c.scenario = Scenario::battery_reserve;
    c.mechanism = static_cast<Mechanism>(state.range(0));
    const auto day = prepare_day(c, 1);
    for (auto _ : state) benchmark::DoNotOptimize(run_day(day, c, 1));
}
BENCHMARK(BM_RunDay)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_PrepareDay(benchmark::State& state)
{
    ScenarioConfig c;
    for (auto _ : state) benchmark::DoNotOptimize(prepare_day(c, 1));
}
BENCHMARK(BM_PrepareDay)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
