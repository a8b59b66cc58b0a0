#include "tracebp/channel.hpp"

#include "tracebp/errors.hpp"
#include "tracebp/rng.hpp"

namespace tracebp {

void ChannelParams::validate() const {
    for (double p : {pi_i, pi_d, pi_s})
        if (!(p >= 0.0 && p < 1.0))
            throw ContractError("channel rates must lie in [0,1)");
    if (!(pi_i + pi_d + pi_s < 1.0))
        throw ContractError("pi_i + pi_d + pi_s must be < 1");
}

Trace transmit(const SourceSequence& x, const ChannelParams& params,
               const Alphabet& alphabet, std::uint64_t seed, EventLog* events) {
    params.validate();
    Rng rng(seed);
    const int sigma = alphabet.size();
    Trace y;
    y.symbols.reserve(x.symbols.size() + 8);

    for (Symbol on_deck : x.symbols) {
        for (;;) {
            const double u = rng.next_double();
            if (u < params.pi_i) {
                y.symbols.push_back(static_cast<Symbol>(rng.next_below(sigma)));
                if (events)
                    events->push_back(ChannelEvent::Insert);
                continue; // symbol stays on deck
            }
            if (u < params.pi_i + params.pi_d) {
                if (events)
                    events->push_back(ChannelEvent::Delete);
            } else if (u < params.pi_i + params.pi_d + params.pi_s) {
                auto other = static_cast<Symbol>(rng.next_below(sigma - 1));
                if (other >= on_deck)
                    ++other;
                y.symbols.push_back(other);
                if (events)
                    events->push_back(ChannelEvent::Substitute);
            } else {
                y.symbols.push_back(on_deck);
                if (events)
                    events->push_back(ChannelEvent::Correct);
            }
            break; // consumed
        }
    }
    return y;
}

Cluster sample_cluster(const SourceSequence& x, int k, const ChannelParams& params,
                       const Alphabet& alphabet, std::uint64_t seed) {
    if (k < 1)
        throw ContractError("cluster needs at least one trace");
    Cluster cluster;
    cluster.traces.reserve(k);
    for (int i = 0; i < k; ++i)
        cluster.traces.push_back(transmit(x, params, alphabet, derive_seed(seed, i)));
    cluster.reference = x;
    return cluster;
}

SourceSequence random_source(int n, const Alphabet& alphabet, std::uint64_t seed) {
    if (n < 1)
        throw ContractError("source length must be positive");
    Rng rng(seed);
    SourceSequence x;
    x.symbols.reserve(n);
    for (int i = 0; i < n; ++i)
        x.symbols.push_back(static_cast<Symbol>(rng.next_below(alphabet.size())));
    return x;
}

} // namespace tracebp
