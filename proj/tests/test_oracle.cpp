#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "tracebp/channel.hpp"
#include "tracebp/errors.hpp"
#include "tracebp/oracle.hpp"
#include "tracebp/rng.hpp"

using namespace tracebp;

TEST_CASE("noiseless likelihood is an indicator") {
    const Alphabet& dna = Alphabet::dna();
    SourceSequence x = parse_source("ACGT", dna);
    ChannelParams clean{};
    CHECK(trace_likelihood(x, Trace{x.symbols}, clean, dna) == doctest::Approx(1.0));
    CHECK(trace_likelihood(x, parse_trace("ACGA", dna), clean, dna) == 0.0);
    CHECK(trace_likelihood(x, parse_trace("ACG", dna), clean, dna) == 0.0);
}

TEST_CASE("likelihood sums to one over output sequences") {
    const Alphabet& bin = Alphabet::binary();
    SourceSequence x = parse_source("010", bin);
    ChannelParams p{0.1, 0.1, 0.1};
    // Sum Pr(y|x) over all binary strings up to a length where the residual
    // insertion mass is negligible.
    double total = 0.0;
    for (int len = 0; len <= 12; ++len) {
        Trace y;
        y.symbols.assign(len, 0);
        for (;;) {
            total += trace_likelihood(x, y, p, bin);
            int i = len - 1;
            while (i >= 0 && ++y.symbols[i] == 2) {
                y.symbols[i] = 0;
                --i;
            }
            if (i < 0)
                break;
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("likelihood matches Monte-Carlo trace frequencies") {
    const Alphabet& bin = Alphabet::binary();
    SourceSequence x = parse_source("011", bin);
    ChannelParams p{0.1, 0.1, 0.1};
    const int samples = 1000000;
    std::map<std::string, int> counts;
    for (int i = 0; i < samples; ++i)
        ++counts[format_symbols(transmit(x, p, bin, derive_seed(123, i)).symbols, bin)];
    // Check the most frequent outputs plus a rare far-edit one.
    int checked = 0;
    for (const auto& [text, count] : counts) {
        const double freq = static_cast<double>(count) / samples;
        if (freq < 0.01)
            continue;
        const double prob = trace_likelihood(x, parse_trace(text, bin), p, bin);
        const double sigma = std::sqrt(prob * (1 - prob) / samples);
        CHECK(std::abs(freq - prob) <= 3 * sigma);
        ++checked;
    }
    CHECK(checked >= 5);
}

TEST_CASE("enumerate_app trivial cases") {
    const Alphabet& dna = Alphabet::dna();
    SourceSequence x = parse_source("ACGAC", dna);
    ChannelParams p{0.03, 0.03, 0.03};

    // Identical noiseless traces pin the posterior to the source.
    Cluster clean;
    clean.traces = {Trace{x.symbols}, Trace{x.symbols}};
    auto app = enumerate_app(clean, x.length(), ChannelParams{}, dna);
    for (int t = 0; t < x.length(); ++t) {
        CHECK(app[t][x.symbols[t]] == doctest::Approx(1.0));
        CHECK(app[t].is_normalized(1e-9));
    }

    // Trace order cannot matter: the weight is a product of likelihoods.
    Cluster noisy = sample_cluster(x, 3, p, dna, 9);
    Cluster reversed = noisy;
    std::swap(reversed.traces[0], reversed.traces[2]);
    auto a = enumerate_app(noisy, x.length(), p, dna);
    auto b = enumerate_app(reversed, x.length(), p, dna);
    for (int t = 0; t < x.length(); ++t)
        for (int s = 0; s < 4; ++s)
            CHECK(a[t][s] == b[t][s]);
}

TEST_CASE("enumerate_app refuses oversized instances") {
    Cluster c;
    c.traces.push_back(Trace{});
    CHECK_THROWS_AS(enumerate_app(c, 20, ChannelParams{}, Alphabet::dna()),
                    InstanceTooLarge);
}

TEST_CASE("joint trellis equals enumeration") {
    ChannelParams p{0.08, 0.08, 0.08};

    const Alphabet& bin = Alphabet::binary();
    SourceSequence x5 = parse_source("01101", bin);
    Cluster pair = sample_cluster(x5, 2, p, bin, 31);
    auto exact = enumerate_app(pair, 5, p, bin);
    auto joint = joint_trellis_app(pair, 5, p, bin);
    for (int t = 0; t < 5; ++t)
        for (int s = 0; s < 2; ++s)
            CHECK(joint[t][s] == doctest::Approx(exact[t][s]).epsilon(1e-9));

    const Alphabet& dna = Alphabet::dna();
    SourceSequence x4 = parse_source("GATC", dna);
    Cluster triple = sample_cluster(x4, 3, p, dna, 32);
    auto exact3 = enumerate_app(triple, 4, p, dna);
    auto joint3 = joint_trellis_app(triple, 4, p, dna);
    for (int t = 0; t < 4; ++t)
        for (int s = 0; s < 4; ++s)
            CHECK(joint3[t][s] == doctest::Approx(exact3[t][s]).epsilon(1e-9));
}

TEST_CASE("joint trellis edge counts grow like the banded product") {
    const Alphabet& dna = Alphabet::dna();
    const int n = 40;
    const int delta = 4;
    const std::vector<int> lengths{40, 41, 39};
    const double delta_sigma = (2 * dna.size() + 1) * delta;
    std::vector<double> counts;
    for (int k = 1; k <= 3; ++k)
        counts.push_back(static_cast<double>(joint_trellis_edge_count(
            std::vector<int>(lengths.begin(), lengths.begin() + k), n, dna, delta)));
    const double r21 = counts[1] / counts[0];
    const double r32 = counts[2] / counts[1];
    CHECK(r21 >= delta_sigma / 2);
    CHECK(r21 <= delta_sigma * 2);
    CHECK(r32 >= delta_sigma / 2);
    CHECK(r32 <= delta_sigma * 2);
}

TEST_CASE("joint trellis rejects too many traces") {
    const Alphabet& bin = Alphabet::binary();
    SourceSequence x = parse_source("0101", bin);
    Cluster c = sample_cluster(x, 4, ChannelParams{0.05, 0.05, 0.05}, bin, 3);
    CHECK_THROWS_AS(joint_trellis_app(c, 4, ChannelParams{0.05, 0.05, 0.05}, bin),
                    InstanceTooLarge);
}
