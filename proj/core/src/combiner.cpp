#include "tracebp/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "tracebp/errors.hpp"

namespace tracebp {

namespace {

SymbolDist floored_normalize(SymbolDist d, double mass_floor) {
    bool any_above = false;
    for (int i = 0; i < d.size(); ++i) {
        if (d[i] > mass_floor)
            any_above = true;
        else
            d[i] = mass_floor;
    }
    if (!any_above)
        return SymbolDist::uniform(d.size()); // contradictory beliefs, flagged uniform
    return normalize(d);
}

} // namespace

SymbolDist fuse_priors(const SymbolDist& left, const SymbolDist& right,
                       const SymbolDist& source_prior, double mass_floor) {
    if (left.size() != right.size() || left.size() != source_prior.size())
        throw ContractError("fuse_priors: size mismatch");
    SymbolDist out(left.size());
    for (int i = 0; i < out.size(); ++i)
        out[i] = left[i] * right[i] / std::max(source_prior[i], mass_floor);
    return floored_normalize(std::move(out), mass_floor);
}

SymbolDist extrinsic_out(const SymbolDist& current, const SymbolDist& received,
                         double mass_floor) {
    if (current.size() != received.size())
        throw ContractError("extrinsic_out: size mismatch");
    SymbolDist out(current.size());
    for (int i = 0; i < out.size(); ++i)
        out[i] = current[i] / std::max(received[i], mass_floor);
    return floored_normalize(std::move(out), mass_floor);
}

double check_consensus(const std::vector<std::vector<SymbolDist>>& per_trace_beliefs) {
    const int k = static_cast<int>(per_trace_beliefs.size());
    if (k < 2)
        throw ContractError("check_consensus needs at least two belief tables");
    const std::size_t n = per_trace_beliefs.front().size();
    double worst = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            for (std::size_t t = 0; t < n; ++t)
                worst = std::max(worst,
                                 tv_distance(per_trace_beliefs[a][t], per_trace_beliefs[b][t]));
    return worst;
}

namespace {

struct Neighbors {
    std::optional<int> down; // toward decoder k-1
    std::optional<int> up;   // toward decoder k+1
};

// Ring neighborhood. K=2 degenerates to one bidirectional edge rather than
// a doubled pair, and without ring closure the ends stay open.
Neighbors neighbors_of(int k, int num_traces, bool ring_closure) {
    Neighbors nb;
    if (num_traces < 2)
        return nb;
    if (num_traces == 2) {
        if (k == 0)
            nb.up = 1;
        else
            nb.down = 0;
        return nb;
    }
    if (k > 0 || ring_closure)
        nb.down = (k - 1 + num_traces) % num_traces;
    if (k < num_traces - 1 || ring_closure)
        nb.up = (k + 1) % num_traces;
    return nb;
}

SymbolDist damped(SymbolDist fresh, const SymbolDist& previous, double damping) {
    if (damping <= 0.0)
        return fresh;
    for (int i = 0; i < fresh.size(); ++i)
        fresh[i] = (1.0 - damping) * fresh[i] + damping * previous[i];
    return normalize(fresh);
}

DecodeReport finalize(const std::vector<std::vector<SymbolDist>>& beliefs, int n, int sigma) {
    DecodeReport report;
    report.consensus_beliefs.reserve(n);
    for (int t = 0; t < n; ++t) {
        SymbolDist acc(sigma);
        for (const auto& table : beliefs)
            for (int x = 0; x < sigma; ++x)
                acc[x] += table[t][x];
        report.consensus_beliefs.push_back(normalize(acc));
    }
    report.map_sequence.symbols.reserve(n);
    for (const SymbolDist& d : report.consensus_beliefs)
        report.map_sequence.symbols.push_back(argmax_symbol(d));
    return report;
}

} // namespace

DecodeReport iterate(const Cluster& cluster, int n, const ChannelParams& params,
                     const Alphabet& alphabet, const FusionConfig& config) {
    const int k = cluster.size();
    if (k < 1)
        throw ContractError("cluster is empty");
    const int sigma = alphabet.size();
    const SymbolDist unit = SymbolDist::uniform(sigma);
    const int max_iters = config.max_iters > 0 ? config.max_iters : std::max(30, 2 * k);

    std::uint64_t gamma_total = 0;

    // Iteration 0: standalone decodes seed the message board.
    std::vector<std::vector<SymbolDist>> beliefs(k);
    const PriorTable uniform = uniform_priors(n, sigma);
    for (int i = 0; i < k; ++i) {
        TraceDecode dec =
            decode_trace(cluster.traces[i], n, params, alphabet, uniform, config.delta);
        beliefs[i] = std::move(dec.symbol_posteriors);
        gamma_total += dec.gamma_evals;
    }

    if (k == 1) {
        DecodeReport report = finalize(beliefs, n, sigma);
        report.converged = true;
        report.iterations_used = 0;
        report.max_consensus_gap = 0.0;
        report.gamma_evals = gamma_total;
        return report;
    }

    MessageBoard board;
    board.up.assign(k, std::vector<SymbolDist>());
    board.down.assign(k, std::vector<SymbolDist>());
    for (int i = 0; i < k; ++i) {
        board.up[i] = beliefs[i];
        board.down[i] = beliefs[i];
    }
    MessageBoard next = board;

    std::vector<double> gaps;
    double gap = check_consensus(beliefs);
    gaps.push_back(gap);
    bool converged = gap <= config.epsilon_consensus;
    int iterations = 0;

    const bool sequential = config.schedule == Schedule::Sequential;
    while (!converged && iterations < max_iters) {
        ++iterations;
        for (int i = 0; i < k; ++i) {
            const Neighbors nb = neighbors_of(i, k, config.ring_closure);
            // Sequential sweeps read the freshest messages; flooding reads
            // the previous iteration's buffer throughout.
            const MessageBoard& in = sequential ? next : board;
            const std::vector<SymbolDist>* from_down =
                nb.down ? &in.up[*nb.down] : nullptr;
            const std::vector<SymbolDist>* from_up = nb.up ? &in.down[*nb.up] : nullptr;

            PriorTable priors(n, unit);
            for (int t = 0; t < n; ++t)
                priors[t] = fuse_priors(from_down ? (*from_down)[t] : unit,
                                        from_up ? (*from_up)[t] : unit, unit,
                                        config.mass_floor);

            TraceDecode dec =
                decode_trace(cluster.traces[i], n, params, alphabet, priors, config.delta);
            beliefs[i] = std::move(dec.symbol_posteriors);
            gamma_total += dec.gamma_evals;

            for (int t = 0; t < n; ++t) {
                if (nb.down)
                    next.down[i][t] = damped(
                        extrinsic_out(beliefs[i][t], from_down ? (*from_down)[t] : unit,
                                      config.mass_floor),
                        board.down[i][t], config.damping);
                if (nb.up)
                    next.up[i][t] = damped(
                        extrinsic_out(beliefs[i][t], from_up ? (*from_up)[t] : unit,
                                      config.mass_floor),
                        board.up[i][t], config.damping);
            }
        }
        board = next;
        gap = check_consensus(beliefs);
        gaps.push_back(gap);
        converged = gap <= config.epsilon_consensus;
    }

    DecodeReport report = finalize(beliefs, n, sigma);
    report.converged = converged;
    report.iterations_used = iterations;
    report.max_consensus_gap = gap;
    report.per_iteration_gaps = std::move(gaps);
    report.gamma_evals = gamma_total;
    report.per_trace_beliefs = std::move(beliefs);
    return report;
}

DecodeReport forward_soft_baseline(const Cluster& cluster, int n, const ChannelParams& params,
                                   const Alphabet& alphabet, const FusionConfig& config) {
    const int k = cluster.size();
    if (k < 1)
        throw ContractError("cluster is empty");
    const int sigma = alphabet.size();

    PriorTable priors = uniform_priors(n, sigma);
    std::uint64_t gamma_total = 0;
    std::vector<SymbolDist> current;
    for (int i = 0; i < k; ++i) {
        TraceDecode dec =
            decode_trace(cluster.traces[i], n, params, alphabet, priors, config.delta);
        current = std::move(dec.symbol_posteriors);
        gamma_total += dec.gamma_evals;
        priors = current; // soft belief handed to the next decoder
    }

    DecodeReport report;
    report.consensus_beliefs = std::move(current);
    report.map_sequence.symbols.reserve(n);
    for (const SymbolDist& d : report.consensus_beliefs)
        report.map_sequence.symbols.push_back(argmax_symbol(d));
    report.converged = true;
    report.iterations_used = 0;
    report.max_consensus_gap = 0.0;
    report.gamma_evals = gamma_total;
    return report;
}

DecodeReport single_trace_decode(const Cluster& cluster, int n, const ChannelParams& params,
                                 const Alphabet& alphabet, const FusionConfig& config) {
    if (cluster.size() < 1)
        throw ContractError("cluster is empty");
    Cluster first;
    first.traces.push_back(cluster.traces.front());
    return forward_soft_baseline(first, n, params, alphabet, config);
}

void write_report_line(std::ostream& os, const DecodeReport& report,
                       const Alphabet& alphabet) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", report.max_consensus_gap);
    os << format_symbols(report.map_sequence.symbols, alphabet) << ' '
       << report.iterations_used << ' ' << buf << ' '
       << (report.converged ? "converged" : "not-converged") << '\n';
}

void write_app_csv(std::ostream& os, const std::vector<SymbolDist>& beliefs,
                   const Alphabet& alphabet) {
    os << "position";
    for (int x = 0; x < alphabet.size(); ++x)
        os << ',' << alphabet.char_at(static_cast<Symbol>(x));
    os << '\n';
    for (std::size_t t = 0; t < beliefs.size(); ++t) {
        os << (t + 1);
        for (int x = 0; x < alphabet.size(); ++x) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), ",%.6g", beliefs[t][x]);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace tracebp
