#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tracebp/combiner.hpp"
#include "tracebp/dataset.hpp"

namespace tracebp {

enum class DecoderKind { BeliefCombine, ForwardSoft, SingleTrace, JointOracle };

const char* decoder_name(DecoderKind kind);
std::optional<DecoderKind> parse_decoder(const std::string& name);

struct ExperimentConfig {
    std::vector<int> k_values{4};
    ChannelParams params;
    int trials = 100; // clusters per sweep point
    std::uint64_t seed = 1;
    DecoderKind decoder = DecoderKind::BeliefCombine;
    int n = 100; // synthetic source length
    int jobs = 1;
    bool timing = false; // wall-clock column; off keeps outputs byte-stable
    FusionConfig fusion;
};

struct ResultRow {
    std::string decoder;
    int k = 0;
    double pi_i = 0.0, pi_d = 0.0, pi_s = 0.0;
    int trials = 0; // successfully decoded clusters
    double mean_edit_distance = 0.0;
    double normalized_edit_rate = 0.0;
    double exact_reconstruction_rate = 0.0;
    double mean_iterations = 0.0;
    double mean_runtime_ms = 0.0;
};

/// Synthetic sweep: `trials` random sources of length n per K, clusters
/// drawn fresh from the channel. Traces are keyed by trial only, so sweeps
/// at different K share their first min(K,K') traces (paired comparisons).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Real-data sweep: for each K, draws K reads uniformly without replacement
/// from each dataset cluster with at least K reads (clusters smaller than K
/// are skipped), up to `trials` clusters.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const ClusterDataset& dataset);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);

/// Combiner work measurement across K plus joint-trellis edge counts.
struct ComplexityPoint {
    int k = 0;
    std::uint64_t gamma_evals = 0;
    double mean_iterations = 0.0;
    double wall_ms = 0.0;
};

struct ComplexityReport {
    std::vector<ComplexityPoint> points;
    double fitted_exponent = 0.0; // log-log slope of gamma_evals vs K
    std::vector<std::pair<int, std::uint64_t>> joint_edge_counts; // K = 1..3
    int delta = 0;
    double delta_sigma = 0.0; // (2|alphabet|+1) * delta reference scale
};

ComplexityReport measure_complexity(const ExperimentConfig& config);

/// One combiner-vs-enumeration comparison instance (the executable form of
/// the equivalence check).
struct VerifyInstance {
    int n = 0, k = 0, sigma = 0;
    double rate = 0.0;
    bool converged = false;
    int iterations = 0;
    double max_tv = 0.0; // max over positions of TV(combiner, oracle)
    int positions = 0;
    int map_matches = 0;
    double final_gap = 0.0; // consensus gap of the final belief tables
};

struct VerifyConfig {
    int instances = 240;
    int n_lo = 4, n_hi = 8;
    std::vector<int> alphabet_sizes{2, 4};
    std::vector<int> k_values{2, 3};
    /// Symmetric per-event rates making up the instance grid; leave empty
    /// and set fixed_params to verify one asymmetric channel point instead.
    std::vector<double> rates{0.02, 0.05, 0.10};
    std::optional<ChannelParams> fixed_params;
    std::uint64_t seed = 1;
    int jobs = 1;
    FusionConfig fusion; // delta is overridden with unpruned windows
};

std::vector<VerifyInstance> oracle_comparison(const VerifyConfig& config);

} // namespace tracebp
