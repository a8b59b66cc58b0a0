#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tracebp/bcjr.hpp"
#include "tracebp/symbol_dist.hpp"

namespace tracebp {

/// Message timing within one iteration. Flooding double-buffers: every
/// decoder reads the previous iteration's messages. Sequential sweeps the
/// decoders in ring order and lets later decoders read messages refreshed
/// earlier in the same sweep. Sequential is the default: simultaneous
/// updates sustain antiphase oscillation between the two halves of an
/// even-length ring (opposite decoders lock into conflicting alignments),
/// while the sweep breaks that symmetry and converges on the same
/// instances.
enum class Schedule { Flooding, Sequential };

/// Knobs of the iterative belief combiner.
struct FusionConfig {
    /// Stop once the max pairwise total variation across per-trace symbol
    /// posteriors falls to this level.
    double epsilon_consensus = 1e-6;
    /// Iteration cap; <= 0 means max(30, 2K). The tail of contested
    /// instances needs a few dozen sweeps to settle to the threshold.
    int max_iters = 0;
    /// Floor applied after message/prior products so absorbing zeros cannot
    /// annihilate beliefs.
    double mass_floor = 1e-30;
    /// Direct message link between the first and last decoder.
    bool ring_closure = true;
    /// Blend factor toward the previous message (0 = no damping).
    double damping = 0.0;
    /// Drift bound handed to the per-trace decoders (kAutoDelta = banded
    /// default, widened per trace as needed).
    int delta = kAutoDelta;
    Schedule schedule = Schedule::Sequential;
};

/// Directed extrinsic messages between adjacent decoders. Under flooding
/// the board is double-buffered (iteration l read-only while l+1 is
/// written); the sequential sweep reads whichever entries are freshest.
struct MessageBoard {
    // [k][t]: message from decoder k toward its higher/lower ring neighbor.
    std::vector<std::vector<SymbolDist>> up;
    std::vector<std::vector<SymbolDist>> down;
};

struct DecodeReport {
    std::vector<SymbolDist> consensus_beliefs;
    SourceSequence map_sequence;
    int iterations_used = 0;
    double max_consensus_gap = 0.0;
    bool converged = false;
    std::vector<double> per_iteration_gaps;
    std::uint64_t gamma_evals = 0;
    /// Final per-decoder symbol posteriors, for consensus diagnostics.
    std::vector<std::vector<SymbolDist>> per_trace_beliefs;
};

/// Extrinsic prior fusion: left * right / source_prior, floored and
/// renormalized. Positions where everything lands on the floor (mutually
/// contradictory beliefs) come back uniform.
SymbolDist fuse_priors(const SymbolDist& left, const SymbolDist& right,
                       const SymbolDist& source_prior, double mass_floor = 1e-30);

/// Extrinsic message toward a neighbor: current belief with the belief
/// previously received from that neighbor divided out.
SymbolDist extrinsic_out(const SymbolDist& current, const SymbolDist& received,
                         double mass_floor = 1e-30);

/// Max pairwise total variation over positions and decoder pairs.
double check_consensus(const std::vector<std::vector<SymbolDist>>& per_trace_beliefs);

/// Iterative belief combining over the trace ring. Iteration 0 decodes each
/// trace under uniform priors and seeds the message board with the
/// standalone posteriors; afterwards each decoder fuses its neighbors'
/// extrinsic messages into priors, re-decodes, and emits refreshed
/// extrinsic messages, until consensus or the iteration cap.
/// Non-convergence is reported, not thrown.
DecodeReport iterate(const Cluster& cluster, int n, const ChannelParams& params,
                     const Alphabet& alphabet, const FusionConfig& config = {});

/// Single sequential pass: decoder k uses decoder k-1's full posterior as
/// its prior; the last decoder's posterior is the output. Same complexity
/// family as one combiner iteration, and order-dependent by construction.
DecodeReport forward_soft_baseline(const Cluster& cluster, int n,
                                   const ChannelParams& params, const Alphabet& alphabet,
                                   const FusionConfig& config = {});

/// Plain single-trace BCJR of the first trace, wrapped in a report.
DecodeReport single_trace_decode(const Cluster& cluster, int n, const ChannelParams& params,
                                 const Alphabet& alphabet, const FusionConfig& config = {});

/// Line record: sequence, iterations, gap, converged flag.
void write_report_line(std::ostream& os, const DecodeReport& report,
                       const Alphabet& alphabet);

/// Per-position posterior table as CSV.
void write_app_csv(std::ostream& os, const std::vector<SymbolDist>& beliefs,
                   const Alphabet& alphabet);

} // namespace tracebp
