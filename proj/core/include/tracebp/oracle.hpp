#pragma once

#include <cstdint>
#include <vector>

#include "tracebp/alphabet.hpp"
#include "tracebp/channel.hpp"
#include "tracebp/symbol_dist.hpp"

namespace tracebp {

/// Exact channel likelihood Pr(y | x) under the IDS event model, computed
/// with an edit-lattice dynamic program over (inputs consumed, outputs
/// emitted). Deliberately shares no code with the trellis decoder so the
/// two act as independent cross-checks. Follows the same convention as
/// transmit(): no insertions after the final input symbol is consumed.
double trace_likelihood(const SourceSequence& x, const Trace& y,
                        const ChannelParams& params, const Alphabet& alphabet);

/// Exact symbol posteriors Pr(x_t | y^(1..K)) by exhaustive enumeration of
/// all |alphabet|^n source sequences under a uniform source prior. Enforces
/// |alphabet|^n <= 10^7 (InstanceTooLarge).
std::vector<SymbolDist> enumerate_app(const Cluster& cluster, int n,
                                      const ChannelParams& params,
                                      const Alphabet& alphabet);

/// Symbol posteriors from BCJR over the product (joint) trellis of up to
/// three traces. Exponential in the number of traces; this is the exact
/// baseline the iterative combiner is measured against. `delta` bounds the
/// per-trace pointer drift; a negative value means unpruned windows (exact).
std::vector<SymbolDist> joint_trellis_app(const Cluster& cluster, int n,
                                          const ChannelParams& params,
                                          const Alphabet& alphabet, int delta = -1);

/// Number of labeled branches in the joint trellis at the given drift
/// bound, without running the decoder. Used for complexity measurements.
std::uint64_t joint_trellis_edge_count(const std::vector<int>& trace_lengths, int n,
                                       const Alphabet& alphabet, int delta);

} // namespace tracebp
