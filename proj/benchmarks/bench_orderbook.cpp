#include <benchmark/benchmark.h>

#include <vector>

#include "lemsim/orderbook.hpp"
#include "lemsim/rng.hpp"

using namespace lemsim;

namespace {

std::vector<Order> random_orders(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Order> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({i + 1, static_cast<TraderId>(i), rng.index(2) ? Side::buy : Side::sell,
                       ticks(800 + 25 * static_cast<std::int64_t>(rng.index(160))),
                       wh(1 + static_cast<std::int64_t>(rng.index(3000))), static_cast<double>(i)});
    return out;
}

void BM_SubmitRandomFlow(benchmark::State& state)
{
    const auto orders = random_orders(static_cast<std::size_t>(state.range(0)), 42);
    for (auto _ : state) {
        OrderBook book;
        for (const auto& o : orders) benchmark::DoNotOptimize(book.submit(o));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SubmitRandomFlow)->Arg(64)->Arg(1024)->Arg(16384);

// Deep one-sided book, then one sweeping order.
void BM_SweepDeepBook(benchmark::State& state)
{
    const auto depth = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        OrderBook book;
        for (std::size_t i = 0; i < depth; ++i)
            book.submit({i + 1, 0, Side::sell, ticks(1000 + static_cast<std::int64_t>(i)), wh(10), static_cast<double>(i)});
        state.ResumeTiming();
        benchmark::DoNotOptimize(
            book.submit({depth + 1, 1, Side::buy, ticks(1000000), wh(10 * static_cast<std::int64_t>(depth)), 0.0}));
    }
}
BENCHMARK(BM_SweepDeepBook)->Arg(100)->Arg(10000);

}  // namespace
