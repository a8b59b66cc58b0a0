#include <benchmark/benchmark.h>

#include "tracebp/bcjr.hpp"
#include "tracebp/channel.hpp"
#include "tracebp/combiner.hpp"
#include "tracebp/dataset.hpp"
#include "tracebp/oracle.hpp"
#include "tracebp/rng.hpp"

using namespace tracebp;

namespace {

const ChannelParams kDatasetRates{0.017, 0.02, 0.022};

void BM_transmit(benchmark::State& state) {
    const Alphabet& dna = Alphabet::dna();
    const SourceSequence x = random_source(110, dna, 1);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(transmit(x, kDatasetRates, dna, ++seed));
}
BENCHMARK(BM_transmit);

void BM_single_trace_decode(benchmark::State& state) {
    const Alphabet& dna = Alphabet::dna();
    const int n = static_cast<int>(state.range(0));
    const SourceSequence x = random_source(n, dna, 2);
    const Trace y = transmit(x, kDatasetRates, dna, 3);
    const PriorTable priors = uniform_priors(n, dna.size());
    for (auto _ : state)
        benchmark::DoNotOptimize(decode_trace(y, n, kDatasetRates, dna, priors));
    state.SetComplexityN(n);
}
BENCHMARK(BM_single_trace_decode)->Arg(55)->Arg(110)->Arg(220)->Complexity();

void BM_combiner(benchmark::State& state) {
    const Alphabet& dna = Alphabet::dna();
    const int k = static_cast<int>(state.range(0));
    const SourceSequence x = random_source(110, dna, 4);
    const Cluster cluster = sample_cluster(x, k, kDatasetRates, dna, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(iterate(cluster, 110, kDatasetRates, dna));
}
BENCHMARK(BM_combiner)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_forward_soft(benchmark::State& state) {
    const Alphabet& dna = Alphabet::dna();
    const int k = static_cast<int>(state.range(0));
    const SourceSequence x = random_source(110, dna, 4);
    const Cluster cluster = sample_cluster(x, k, kDatasetRates, dna, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(forward_soft_baseline(cluster, 110, kDatasetRates, dna));
}
BENCHMARK(BM_forward_soft)->Arg(4)->Arg(16);

void BM_joint_trellis(benchmark::State& state) {
    const Alphabet& bin = Alphabet::binary();
    const int k = static_cast<int>(state.range(0));
    const SourceSequence x = random_source(12, bin, 6);
    const Cluster cluster = sample_cluster(x, k, ChannelParams{0.05, 0.05, 0.05}, bin, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(joint_trellis_app(cluster, 12, ChannelParams{0.05, 0.05, 0.05}, bin));
}
BENCHMARK(BM_joint_trellis)->Arg(1)->Arg(2)->Arg(3);

void BM_edit_distance(benchmark::State& state) {
    const Alphabet& dna = Alphabet::dna();
    const SourceSequence a = random_source(110, dna, 8);
    const SourceSequence b = random_source(110, dna, 9);
    for (auto _ : state)
        benchmark::DoNotOptimize(edit_distance(a.symbols, b.symbols));
}
BENCHMARK(BM_edit_distance);

} // namespace

BENCHMARK_MAIN();
