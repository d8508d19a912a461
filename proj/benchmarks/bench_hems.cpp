#include <benchmark/benchmark.h>

#include "lemsim/hems.hpp"
#include "lemsim/profiles.hpp"

using namespace lemsim;

namespace {

HouseholdProfile one_prosumer()
{
    ProfileGenParams p;
    p.n_households = 1;
    p.n_prosumers = 1;
    return generate_population(p).front();
}

void BM_HemsDay(benchmark::State& state)
{
    const auto h = one_prosumer();
    const auto tariff = default_tariff();
    const BatterySpec battery;
    HemsOptions options;
    options.soc_steps = static_cast<int>(state.range(0));
    options.interval_slots = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(optimize_self_consumption(h, battery, tariff, options).cost);
}
BENCHMARK(BM_HemsDay)->Args({50, 15})->Args({100, 15})->Args({100, 5})->Unit(benchmark::kMillisecond);

}  // namespace
