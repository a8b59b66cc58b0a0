#include <cmath>
#include <map>

#include "doctest.h"
#include "tracebp/channel.hpp"
#include "tracebp/rng.hpp"

using namespace tracebp;

TEST_CASE("noiseless channel is the identity") {
    const Alphabet& dna = Alphabet::dna();
    SourceSequence x = parse_source("ACGT", dna);
    Trace y = transmit(x, ChannelParams{}, dna, 123);
    CHECK(format_symbols(y.symbols, dna) == "ACGT");
}

TEST_CASE("transmission is deterministic under a fixed seed") {
    const Alphabet& dna = Alphabet::dna();
    SourceSequence x = random_source(64, dna, 5);
    ChannelParams p{0.05, 0.05, 0.05};
    CHECK(transmit(x, p, dna, 99) == transmit(x, p, dna, 99));
    Cluster a = sample_cluster(x, 6, p, dna, 41);
    Cluster b = sample_cluster(x, 6, p, dna, 41);
    for (int i = 0; i < 6; ++i)
        CHECK(a.traces[i] == b.traces[i]);
}

TEST_CASE("cluster of one reduces to transmit and traces are K-stable") {
    const Alphabet& dna = Alphabet::dna();
    SourceSequence x = random_source(40, dna, 17);
    ChannelParams p{0.02, 0.02, 0.02};
    Cluster one = sample_cluster(x, 1, p, dna, 7);
    CHECK(one.traces[0] == transmit(x, p, dna, derive_seed(7, 0)));

    Cluster three = sample_cluster(x, 3, p, dna, 7);
    Cluster sixteen = sample_cluster(x, 16, p, dna, 7);
    CHECK(sixteen.size() == 16);
    for (int i = 0; i < 3; ++i)
        CHECK(three.traces[i] == sixteen.traces[i]);
}

TEST_CASE("event frequencies stay within three binomial sigmas") {
    const Alphabet& dna = Alphabet::dna();
    ChannelParams p{0.05, 0.05, 0.05};
    EventLog events;
    for (int trial = 0; trial < 150; ++trial) {
        SourceSequence x = random_source(800, dna, derive_seed(1000, trial));
        transmit(x, p, dna, derive_seed(2000, trial), &events);
    }
    const auto decisions = static_cast<double>(events.size());
    REQUIRE(decisions > 1e5);
    std::map<ChannelEvent, double> counts;
    for (ChannelEvent e : events)
        counts[e] += 1.0;
    for (auto [event, rate] : {std::pair{ChannelEvent::Insert, 0.05},
                               std::pair{ChannelEvent::Delete, 0.05},
                               std::pair{ChannelEvent::Substitute, 0.05}}) {
        const double freq = counts[event] / decisions;
        const double sigma = std::sqrt(rate * (1 - rate) / decisions);
        CHECK(std::abs(freq - rate) <= 3 * sigma);
    }
}

TEST_CASE("mean output length matches N(1-pi_d)/(1-pi_i)") {
    const Alphabet& dna = Alphabet::dna();
    const int n = 200;
    const int trials = 4000;
    ChannelParams p{0.08, 0.05, 0.04};
    SourceSequence x = random_source(n, dna, 3);
    double total = 0.0;
    for (int i = 0; i < trials; ++i)
        total += transmit(x, p, dna, derive_seed(31, i)).length();
    const double mean = total / trials;
    const double expected = n * (1 - p.pi_d) / (1 - p.pi_i);
    // Per consumed symbol the emitted count is Geometric(insertions) plus a
    // Bernoulli emission, independent draws.
    const double q = (1 - p.pi_i - p.pi_d) / (1 - p.pi_i);
    const double var_per_symbol = p.pi_i / ((1 - p.pi_i) * (1 - p.pi_i)) + q * (1 - q);
    const double sigma = std::sqrt(n * var_per_symbol / trials);
    CHECK(std::abs(mean - expected) <= 3 * sigma);
}

TEST_CASE("traces within a cluster are uncorrelated") {
    const Alphabet& dna = Alphabet::dna();
    ChannelParams p{0.05, 0.05, 0.05};
    const int trials = 4000;
    SourceSequence x = random_source(50, dna, 23);
    // Correlation of the two traces' deletion counts across clusters; the
    // event logs are regenerated from the same per-trace seeds the cluster
    // sampler derives.
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < trials; ++i) {
        const std::uint64_t cluster_seed = derive_seed(77, i);
        EventLog ea, eb;
        transmit(x, p, dna, derive_seed(cluster_seed, 0), &ea);
        transmit(x, p, dna, derive_seed(cluster_seed, 1), &eb);
        auto dels = [](const EventLog& log) {
            double d = 0;
            for (ChannelEvent e : log)
                if (e == ChannelEvent::Delete)
                    d += 1;
            return d;
        };
        const double a = dels(ea), b = dels(eb);
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
    }
    const double n = trials;
    const double cov = sab / n - (sa / n) * (sb / n);
    const double va = saa / n - (sa / n) * (sa / n);
    const double vb = sbb / n - (sb / n) * (sb / n);
    const double corr = cov / std::sqrt(va * vb);
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(n));
}

TEST_CASE("dataset-rate regime keeps length spread inside the default band") {
    const Alphabet& dna = Alphabet::dna();
    ChannelParams p{0.017, 0.02, 0.022};
    SourceSequence x = random_source(110, dna, 2);
    int max_dev = 0;
    for (int i = 0; i < 500; ++i) {
        Trace y = transmit(x, p, dna, derive_seed(5, i));
        max_dev = std::max(max_dev, std::abs(y.length() - 110));
    }
    CHECK(max_dev <= 16);
}
