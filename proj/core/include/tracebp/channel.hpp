#pragma once

#include <cstdint>
#include <vector>

#include "tracebp/alphabet.hpp"

namespace tracebp {

/// Insertion/deletion/substitution probabilities of the IDS channel.
/// The remainder 1 - pi_i - pi_d - pi_s is the correct-transmission rate.
struct ChannelParams {
    double pi_i = 0.0;
    double pi_d = 0.0;
    double pi_s = 0.0;

    double pi_correct() const { return 1.0 - pi_i - pi_d - pi_s; }

    /// Throws ContractError unless each rate is in [0,1) and they leave
    /// positive probability for correct transmission.
    void validate() const;
};

/// Per-decision channel events. One decision is drawn per loop step while
/// an input symbol is on deck: insert keeps the symbol on deck, the other
/// three consume it.
enum class ChannelEvent : std::uint8_t { Insert, Delete, Substitute, Correct };

using EventLog = std::vector<ChannelEvent>;

/// Sends one sequence through the IDS channel. Events follow the on-deck
/// model: insert emits a uniform symbol without consuming, delete consumes
/// silently, substitute consumes and emits a uniform different symbol,
/// correct consumes and emits the symbol itself. The trace ends when the
/// last input symbol is consumed; no insertions trail it.
Trace transmit(const SourceSequence& x, const ChannelParams& params,
               const Alphabet& alphabet, std::uint64_t seed,
               EventLog* events = nullptr);

/// Draws K independent traces of the same source. Per-trace seeds derive
/// from the cluster seed by index, so trace k is identical across different
/// values of K.
Cluster sample_cluster(const SourceSequence& x, int k, const ChannelParams& params,
                       const Alphabet& alphabet, std::uint64_t seed);

/// Uniform random source sequence of the given length.
SourceSequence random_source(int n, const Alphabet& alphabet, std::uint64_t seed);

} // namespace tracebp
