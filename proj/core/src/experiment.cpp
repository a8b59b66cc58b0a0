#include "tracebp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <ostream>

#include "tracebp/errors.hpp"
#include "tracebp/oracle.hpp"
#include "tracebp/parallel.hpp"
#include "tracebp/rng.hpp"

namespace tracebp {

const char* decoder_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::BeliefCombine:
            return "belief-combine";
        case DecoderKind::ForwardSoft:
            return "forward-soft";
        case DecoderKind::SingleTrace:
            return "single-trace";
        case DecoderKind::JointOracle:
            return "joint-oracle";
    }
    return "?";
}

std::optional<DecoderKind> parse_decoder(const std::string& name) {
    for (DecoderKind kind :
         {DecoderKind::BeliefCombine, DecoderKind::ForwardSoft, DecoderKind::SingleTrace,
          DecoderKind::JointOracle})
        if (name == decoder_name(kind))
            return kind;
    return std::nullopt;
}

namespace {

struct TrialOutcome {
    bool ok = false;
    int edit = 0;
    int reference_length = 1;
    bool exact = false;
    double iterations = 0.0;
    double ms = 0.0;
    std::uint64_t gamma_evals = 0;
};

TrialOutcome decode_and_score(const Cluster& cluster, const ExperimentConfig& config,
                              const Alphabet& alphabet) {
    TrialOutcome out;
    const SourceSequence& ref = *cluster.reference;
    const int n = ref.length();
    out.reference_length = n;
    const auto start = std::chrono::steady_clock::now();
    try {
        DecodeReport report;
        switch (config.decoder) {
            case DecoderKind::BeliefCombine:
                report = iterate(cluster, n, config.params, alphabet, config.fusion);
                break;
            case DecoderKind::ForwardSoft:
                report = forward_soft_baseline(cluster, n, config.params, alphabet,
                                               config.fusion);
                break;
            case DecoderKind::SingleTrace:
                report = single_trace_decode(cluster, n, config.params, alphabet,
                                             config.fusion);
                break;
            case DecoderKind::JointOracle: {
                int delta = config.fusion.delta == kAutoDelta
                                ? default_drift_bound(n, config.params)
                                : config.fusion.delta;
                for (const Trace& y : cluster.traces)
                    delta = std::max(delta, std::abs(y.length() - n));
                auto beliefs =
                    joint_trellis_app(cluster, n, config.params, alphabet, delta);
                for (const SymbolDist& d : beliefs)
                    report.map_sequence.symbols.push_back(argmax_symbol(d));
                report.converged = true;
                break;
            }
        }
        out.edit = edit_distance(report.map_sequence.symbols, ref.symbols);
        out.exact = out.edit == 0;
        out.iterations = report.iterations_used;
        out.gamma_evals = report.gamma_evals;
        out.ok = true;
    } catch (const Error&) {
        out.ok = false; // per-cluster decode failures are recorded, not fatal
    }
    if (config.timing) {
        const auto stop = std::chrono::steady_clock::now();
        out.ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    return out;
}

ResultRow aggregate(const std::vector<TrialOutcome>& outcomes,
                    const ExperimentConfig& config, int k) {
    ResultRow row;
    row.decoder = decoder_name(config.decoder);
    row.k = k;
    row.pi_i = config.params.pi_i;
    row.pi_d = config.params.pi_d;
    row.pi_s = config.params.pi_s;
    int ok = 0;
    double edit_sum = 0.0, rate_sum = 0.0, exact_sum = 0.0, iter_sum = 0.0, ms_sum = 0.0;
    for (const TrialOutcome& o : outcomes) {
        if (!o.ok)
            continue;
        ++ok;
        edit_sum += o.edit;
        rate_sum += static_cast<double>(o.edit) / o.reference_length;
        exact_sum += o.exact ? 1.0 : 0.0;
        iter_sum += o.iterations;
        ms_sum += o.ms;
    }
    row.trials = ok;
    if (ok > 0) {
        row.mean_edit_distance = edit_sum / ok;
        row.normalized_edit_rate = rate_sum / ok;
        row.exact_reconstruction_rate = exact_sum / ok;
        row.mean_iterations = iter_sum / ok;
        row.mean_runtime_ms = ms_sum / ok;
    }
    return row;
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.decoder, a.k, a.pi_i, a.pi_d, a.pi_s) <
               std::tie(b.decoder, b.k, b.pi_i, b.pi_d, b.pi_s);
    });
}

/// K reads drawn uniformly without replacement, seeded per cluster.
Cluster subsample(const Cluster& full, int k, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> indices(full.traces.size());
    std::iota(indices.begin(), indices.end(), 0);
    Cluster out;
    out.reference = full.reference;
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.next_below(indices.size() - i));
        std::swap(indices[i], indices[j]);
        out.traces.push_back(full.traces[indices[i]]);
    }
    return out;
}

} // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    config.params.validate();
    if (config.decoder == DecoderKind::JointOracle)
        for (int k : config.k_values)
            if (k > 3)
                throw InstanceTooLarge("joint-oracle decoder refuses K > 3");
    const Alphabet& alphabet = Alphabet::dna();
    std::vector<ResultRow> rows;
    for (int k : config.k_values) {
        std::vector<TrialOutcome> outcomes(config.trials);
        parallel_for(config.trials, config.jobs, [&](int trial) {
            // Trace seeds depend on the trial only, so different K share traces.
            const SourceSequence x =
                random_source(config.n, alphabet, derive_seed(config.seed, 2 * trial));
            Cluster cluster =
                sample_cluster(x, k, config.params, alphabet,
                               derive_seed(config.seed, 2 * trial + 1));
            outcomes[trial] = decode_and_score(cluster, config, alphabet);
        });
        rows.push_back(aggregate(outcomes, config, k));
    }
    sort_rows(rows);
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const ClusterDataset& dataset) {
    config.params.validate();
    if (config.decoder == DecoderKind::JointOracle)
        for (int k : config.k_values)
            if (k > 3)
                throw InstanceTooLarge("joint-oracle decoder refuses K > 3");
    const Alphabet& alphabet = Alphabet::dna();
    std::vector<ResultRow> rows;
    for (int k : config.k_values) {
        std::vector<const Cluster*> eligible;
        for (const Cluster& c : dataset.entries)
            if (c.size() >= k && c.reference)
                eligible.push_back(&c);
        const int count = std::min<int>(config.trials, static_cast<int>(eligible.size()));
        std::vector<TrialOutcome> outcomes(count);
        parallel_for(count, config.jobs, [&](int trial) {
            Cluster cluster =
                subsample(*eligible[trial], k, derive_seed(config.seed, trial));
            outcomes[trial] = decode_and_score(cluster, config, alphabet);
        });
        rows.push_back(aggregate(outcomes, config, k));
    }
    sort_rows(rows);
    return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "decoder,k,pi_i,pi_d,pi_s,trials,mean_edit_distance,normalized_edit_rate,"
          "exact_reconstruction_rate,mean_iterations,mean_runtime_ms\n";
    char buf[256];
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6g,%.6g,%.6g,%d,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      r.decoder.c_str(), r.k, r.pi_i, r.pi_d, r.pi_s, r.trials,
                      r.mean_edit_distance, r.normalized_edit_rate,
                      r.exact_reconstruction_rate, r.mean_iterations, r.mean_runtime_ms);
        os << buf;
    }
}

ComplexityReport measure_complexity(const ExperimentConfig& config) {
    config.params.validate();
    const Alphabet& alphabet = Alphabet::dna();
    ComplexityReport report;
    report.delta = config.fusion.delta == kAutoDelta
                       ? default_drift_bound(config.n, config.params)
                       : config.fusion.delta;
    report.delta_sigma = static_cast<double>(2 * alphabet.size() + 1) * report.delta;

    for (int k : config.k_values) {
        ComplexityPoint point;
        point.k = k;
        double iter_sum = 0.0;
        int decoded = 0;
        const auto start = std::chrono::steady_clock::now();
        for (int trial = 0; trial < config.trials; ++trial) {
            const SourceSequence x =
                random_source(config.n, alphabet, derive_seed(config.seed, 2 * trial));
            Cluster cluster =
                sample_cluster(x, k, config.params, alphabet,
                               derive_seed(config.seed, 2 * trial + 1));
            DecodeReport rep = iterate(cluster, config.n, config.params, alphabet,
                                       config.fusion);
            point.gamma_evals += rep.gamma_evals;
            iter_sum += rep.iterations_used;
            ++decoded;
        }
        const auto stop = std::chrono::steady_clock::now();
        point.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        point.mean_iterations = decoded > 0 ? iter_sum / decoded : 0.0;
        report.points.push_back(point);
    }

    // Least-squares slope in log-log coordinates.
    if (report.points.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double count = static_cast<double>(report.points.size());
        for (const ComplexityPoint& p : report.points) {
            const double x = std::log(static_cast<double>(p.k));
            const double y = std::log(static_cast<double>(p.gamma_evals));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        report.fitted_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }

    // Joint-trellis growth for the small K where it is still tractable.
    const SourceSequence x =
        random_source(config.n, alphabet, derive_seed(config.seed, 0));
    const Cluster probe = sample_cluster(x, 3, config.params, alphabet,
                                         derive_seed(config.seed, 1));
    for (int k = 1; k <= 3; ++k) {
        std::vector<int> lengths;
        for (int i = 0; i < k; ++i)
            lengths.push_back(probe.traces[i].length());
        report.joint_edge_counts.emplace_back(
            k, joint_trellis_edge_count(lengths, config.n, alphabet, report.delta));
    }
    return report;
}

std::vector<VerifyInstance> oracle_comparison(const VerifyConfig& config) {
    std::vector<VerifyInstance> results(config.instances);
    struct Combo {
        int sigma, k;
        double rate;
    };
    std::vector<Combo> grid;
    std::vector<double> rates = config.rates;
    if (rates.empty())
        rates.push_back(-1.0); // fixed_params carries the channel point
    for (int sigma : config.alphabet_sizes)
        for (int k : config.k_values)
            for (double rate : rates)
                grid.push_back({sigma, k, rate});

    parallel_for(config.instances, config.jobs, [&](int idx) {
        const Combo combo = grid[idx % grid.size()];
        const Alphabet& alphabet = combo.sigma == 2 ? Alphabet::binary() : Alphabet::dna();
        Rng rng(derive_seed(config.seed, idx));
        const int n = config.n_lo + static_cast<int>(rng.next_below(
                                        config.n_hi - config.n_lo + 1));
        const ChannelParams params =
            combo.rate >= 0.0 ? ChannelParams{combo.rate, combo.rate, combo.rate}
                              : config.fixed_params.value();
        const SourceSequence x = random_source(n, alphabet, rng.next_u64());
        const Cluster cluster =
            sample_cluster(x, combo.k, params, alphabet, rng.next_u64());

        int delta = n;
        for (const Trace& y : cluster.traces)
            delta = std::max(delta, y.length());
        FusionConfig fusion = config.fusion;
        fusion.delta = delta; // unpruned windows: exactness is on trial here

        VerifyInstance inst;
        inst.n = n;
        inst.k = combo.k;
        inst.sigma = combo.sigma;
        inst.rate = combo.rate;

        const DecodeReport report = iterate(cluster, n, params, alphabet, fusion);
        const std::vector<SymbolDist> exact = enumerate_app(cluster, n, params, alphabet);
        inst.converged = report.converged;
        inst.iterations = report.iterations_used;
        inst.final_gap = report.max_consensus_gap;
        inst.positions = n;
        for (int t = 0; t < n; ++t) {
            inst.max_tv =
                std::max(inst.max_tv, tv_distance(report.consensus_beliefs[t], exact[t]));
            if (argmax_symbol(report.consensus_beliefs[t]) == argmax_symbol(exact[t]))
                ++inst.map_matches;
        }
        results[idx] = inst;
    });
    return results;
}

} // namespace tracebp
