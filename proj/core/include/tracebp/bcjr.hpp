#pragma once

#include <cstdint>
#include <vector>

#include "tracebp/symbol_dist.hpp"
#include "tracebp/trellis.hpp"

namespace tracebp {

/// One normalized prior per input position, applied on import branches.
using PriorTable = std::vector<SymbolDist>;

PriorTable uniform_priors(int n, int sigma);

/// Forward or backward state metrics. Values are max-normalized per stage;
/// log_scale accumulates the removed magnitude so true values are
/// recoverable. Buffer stages additionally keep the pre-insertion `entry`
/// values (state right after the import branch), which is the buffer-stage
/// state convention used for posteriors: paired with the chain-inclusive
/// backward values, every path is counted exactly once per stage.
struct StageMetrics {
    std::vector<double> values;
    std::vector<double> entry;
    double log_scale = 0.0;
};

struct MetricMatrix {
    std::vector<StageMetrics> stages;
    std::uint64_t gamma_evals = 0;
};

/// Branch metric: transition probability times emission weight, with the
/// position prior applied on import branches only. Returns zero for
/// branches whose emission is unsupported by the trace.
double gamma(const TrellisSpec& spec, const Branch& branch, const SymbolDist& prior,
             const Trace& trace);

/// Forward recursion from the all-consumed-nothing boundary state.
/// Throws DecodeCollapse if a stage's mass underflows to zero.
MetricMatrix forward(const TrellisSpec& spec, const PriorTable& priors, const Trace& trace);

/// Backward recursion from the terminal pointer (= trace length).
MetricMatrix backward(const TrellisSpec& spec, const PriorTable& priors, const Trace& trace);

/// Per-stage state posteriors alpha*beta, normalized within each stage.
/// stage_log_evidence holds the descaled log normalizer per stage; it is
/// the same value at every stage up to rounding, which makes it a cheap
/// internal consistency check.
struct StateAPP {
    std::vector<std::vector<double>> stages;
    std::vector<double> stage_log_evidence;
};

StateAPP state_posteriors(const TrellisSpec& spec, const MetricMatrix& alpha,
                          const MetricMatrix& beta);

/// Symbol posteriors read out at the post-consume stage of each section.
std::vector<SymbolDist> symbol_app(const TrellisSpec& spec, const StateAPP& app);

/// Same marginal read out at the buffer stages; equals symbol_app up to
/// rounding because chain marginals are exact. Exposed for tests.
std::vector<SymbolDist> symbol_app_at_buffer(const TrellisSpec& spec, const StateAPP& app);

/// Descaled log Pr(trace | priors) from the forward metrics.
double log_evidence(const TrellisSpec& spec, const MetricMatrix& alpha);

/// One full decode of a trace: spec construction, forward/backward,
/// posteriors. On DecodeCollapse the drift bound is doubled (up to the
/// unpruned bound) and the decode retried.
struct TraceDecode {
    std::vector<SymbolDist> symbol_posteriors;
    double log_evidence = 0.0;
    std::uint64_t gamma_evals = 0;
    int delta_used = 0;
};

TraceDecode decode_trace(const Trace& trace, int n, const ChannelParams& params,
                         const Alphabet& alphabet, const PriorTable& priors,
                         int delta = kAutoDelta);

} // namespace tracebp
