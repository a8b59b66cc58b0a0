// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 8 needs the real clustered-read dataset and is skipped
// with a message when it is not supplied.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tracebp/channel.hpp"
#include "tracebp/combiner.hpp"
#include "tracebp/dataset.hpp"
#include "tracebp/errors.hpp"
#include "tracebp/experiment.hpp"
#include "tracebp/oracle.hpp"
#include "tracebp/rng.hpp"

using namespace tracebp;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    if (!pass)
        ++g_failures;
}

void skip(int criterion, const std::string& detail) {
    std::printf("[SKIP] criterion %d: %s\n", criterion, detail.c_str());
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---- criteria 1 and 2: oracle equivalence and consensus ----

std::vector<VerifyInstance> g_verify_results;

void criterion_1_and_2() {
    const auto start = Clock::now();
    VerifyConfig config;
    config.instances = 240;
    config.seed = 20240801;
    config.fusion.max_iters = 60;
    g_verify_results = oracle_comparison(config);
    const double secs =
        std::chrono::duration<double>(Clock::now() - start).count();

    long positions = 0, matches = 0;
    int converged = 0;
    std::vector<double> max_tvs;
    for (const VerifyInstance& inst : g_verify_results) {
        if (!inst.converged)
            continue;
        ++converged;
        positions += inst.positions;
        matches += inst.map_matches;
        max_tvs.push_back(inst.max_tv);
    }
    std::sort(max_tvs.begin(), max_tvs.end());
    const double agreement =
        positions ? static_cast<double>(matches) / positions : 0.0;
    const double median_tv = max_tvs.empty() ? 1.0 : max_tvs[max_tvs.size() / 2];
    const double worst_tv = max_tvs.empty() ? 1.0 : max_tvs.back();

    const bool pass = static_cast<int>(g_verify_results.size()) >= 200 &&
                      agreement >= 0.995 && median_tv <= 1e-2 && secs < 300.0;
    report(1, pass,
           fmt("oracle equivalence: %zu instances (%d converged), MAP agreement %.4f "
               "(need >= 0.995), median max-TV %.3e (expected <= 1e-2, worst %.3e), "
               "%.1fs (budget 300s)",
               g_verify_results.size(), converged, agreement, median_tv, worst_tv, secs));

    double worst_gap = 0.0;
    for (const VerifyInstance& inst : g_verify_results)
        if (inst.converged)
            worst_gap = std::max(worst_gap, inst.final_gap);
    report(2, worst_gap <= 1e-6,
           fmt("consensus: max pairwise TV across per-trace beliefs on converged "
               "instances %.3e (need <= 1e-6)",
               worst_gap));
}

// ---- criterion 3: iteration counts ----

void criterion_3() {
    int k2 = 0, k2_fast = 0;
    for (const VerifyInstance& inst : g_verify_results)
        if (inst.k == 2) {
            ++k2;
            if (inst.converged && inst.iterations <= 5)
                ++k2_fast;
        }
    const double k2_rate = k2 ? static_cast<double>(k2_fast) / k2 : 0.0;

    const ChannelParams dataset_rates{0.017, 0.02, 0.022};
    const Alphabet& dna = Alphabet::dna();
    int total = 0, fast = 0;
    std::map<int, std::pair<int, int>> per_k;
    for (int k = 3; k <= 8; ++k) {
        for (int round = 0; round < 40; ++round) {
            SourceSequence x = random_source(110, dna, derive_seed(3100 + k, round));
            Cluster cluster =
                sample_cluster(x, k, dataset_rates, dna, derive_seed(3200 + k, round));
            FusionConfig fusion;
            fusion.max_iters = 60;
            DecodeReport r = iterate(cluster, 110, dataset_rates, dna, fusion);
            ++total;
            ++per_k[k].second;
            if (r.converged && r.iterations_used < k) {
                ++fast;
                ++per_k[k].first;
            }
        }
    }
    const double ring_rate = total ? static_cast<double>(fast) / total : 0.0;
    std::string per_k_text;
    for (auto [k, counts] : per_k)
        per_k_text += fmt(" K%d:%d/%d", k, counts.first, counts.second);

    const bool pass = k2_rate >= 0.95 && ring_rate >= 0.90;
    report(3, pass,
           fmt("iteration counts: K=2 within 5 iterations %.3f (need >= 0.95, %d/%d); "
               "K=3..8 within <K iterations %.3f (need >= 0.90;%s)",
               k2_rate, k2_fast, k2, ring_rate, per_k_text.c_str()));
}

// ---- criterion 4: complexity scaling ----

void criterion_4() {
    ExperimentConfig config;
    config.params = ChannelParams{0.017, 0.02, 0.022};
    config.trials = 4;
    config.seed = 20240804;
    config.n = 100;
    config.k_values.clear();
    for (int k = 2; k <= 16; ++k)
        config.k_values.push_back(k);
    const ComplexityReport rep = measure_complexity(config);

    const auto& joint = rep.joint_edge_counts;
    const double growth = static_cast<double>(joint[2].second) / joint[1].second;
    const double ratio = growth / rep.delta_sigma;
    const bool slope_ok = rep.fitted_exponent >= 1.7 && rep.fitted_exponent <= 2.3;
    const bool joint_ok = ratio >= 0.5 && ratio <= 2.0;
    report(4, slope_ok && joint_ok,
           fmt("complexity: gamma-eval log-log exponent %.2f (need 2.0 +- 0.3); "
               "joint-trellis edge growth K=2->3 %.1f vs delta*sigma %.1f "
               "(ratio %.2f, need within 2x)",
               rep.fitted_exponent, growth, rep.delta_sigma, ratio));
}

// ---- criterion 5: single-trace exactness ----

void criterion_5() {
    double worst = 0.0;
    int instances = 0;
    for (int round = 0; round < 100; ++round) {
        Rng rng(derive_seed(20240805, round));
        const Alphabet& alphabet =
            round % 2 == 0 ? Alphabet::binary() : Alphabet::dna();
        const int n = 2 + static_cast<int>(rng.next_below(5)); // 2..6
        const double rate = 0.02 + 0.02 * static_cast<double>(rng.next_below(5));
        const ChannelParams params{rate, rate, rate};
        const SourceSequence x = random_source(n, alphabet, rng.next_u64());
        const Trace y = transmit(x, params, alphabet, rng.next_u64());

        TraceDecode dec =
            decode_trace(y, n, params, alphabet, uniform_priors(n, alphabet.size()),
                         std::max(n, y.length()));
        Cluster single;
        single.traces.push_back(y);
        const auto exact = enumerate_app(single, n, params, alphabet);
        for (int t = 0; t < n; ++t)
            for (int s = 0; s < alphabet.size(); ++s)
                worst = std::max(worst,
                                 std::abs(dec.symbol_posteriors[t][s] - exact[t][s]));
        ++instances;
    }
    report(5, worst <= 1e-9,
           fmt("single-trace exactness: %d instances, L-inf gap vs enumeration %.3e "
               "(need <= 1e-9)",
               instances, worst));
}

// ---- criterion 6: channel statistics ----

void criterion_6() {
    const ChannelParams params{0.017, 0.02, 0.022};
    const Alphabet& dna = Alphabet::dna();
    EventLog events;
    for (int trial = 0; trial < 150; ++trial) {
        SourceSequence x = random_source(800, dna, derive_seed(20240806, 2 * trial));
        transmit(x, params, dna, derive_seed(20240806, 2 * trial + 1), &events);
    }
    const double decisions = static_cast<double>(events.size());
    std::map<ChannelEvent, double> counts;
    for (ChannelEvent e : events)
        counts[e] += 1.0;
    bool pass = decisions >= 1e5;
    std::string detail = fmt("channel statistics over %.0f decisions:", decisions);
    const std::pair<ChannelEvent, double> checks[] = {
        {ChannelEvent::Insert, params.pi_i},
        {ChannelEvent::Delete, params.pi_d},
        {ChannelEvent::Substitute, params.pi_s},
    };
    for (auto [event, rate] : checks) {
        const double freq = counts[event] / decisions;
        const double sigma = std::sqrt(rate * (1 - rate) / decisions);
        const double dev = std::abs(freq - rate) / sigma;
        detail += fmt(" %.4f vs %.3f (%.1f sigma)", freq, rate, dev);
        if (dev > 3.0)
            pass = false;
    }
    report(6, pass, detail + " (need <= 3 sigma each)");
}

// ---- criterion 7: qualitative sweep reproduction ----

void criterion_7() {
    const int n = 100;
    const int clusters = 200;
    const std::vector<int> ks{2, 4, 8};
    bool endpoints_ok = true, steps_ok = true, dominance_ok = true;
    std::string detail;
    for (double rate : {0.01, 0.02, 0.03}) {
        ExperimentConfig config;
        config.params = ChannelParams{rate, rate, rate};
        config.trials = clusters;
        config.seed = 20240807;
        config.n = n;
        config.k_values = ks;
        config.decoder = DecoderKind::BeliefCombine;
        const auto combiner_rows = run_experiment(config);
        config.decoder = DecoderKind::ForwardSoft;
        const auto baseline_rows = run_experiment(config);

        detail += fmt(" rate %.2f:", rate);
        double combiner_sum = 0.0, baseline_sum = 0.0;
        for (std::size_t i = 0; i < combiner_rows.size(); ++i) {
            const double bc = combiner_rows[i].normalized_edit_rate;
            const double fs = baseline_rows[i].normalized_edit_rate;
            detail += fmt(" K%d %.4f/%.4f", combiner_rows[i].k, bc, fs);
            combiner_sum += bc;
            baseline_sum += fs;
            if (bc > fs + 1e-12)
                dominance_ok = false;
            if (i > 0) {
                // Intermediate K steps: non-increasing within a one-sigma
                // noise band (edit counts are roughly Poisson per cluster).
                const double prev = combiner_rows[i - 1].normalized_edit_rate;
                const double band =
                    std::sqrt((bc + prev) * n / clusters) / n + 1e-12;
                if (bc > prev + band)
                    steps_ok = false;
            }
        }
        // The K=2 -> K=8 improvement is strict at every rate.
        if (combiner_rows.back().normalized_edit_rate >=
            combiner_rows.front().normalized_edit_rate)
            endpoints_ok = false;
        if (combiner_sum >= baseline_sum)
            dominance_ok = false;
    }
    report(7, endpoints_ok && steps_ok && dominance_ok,
           fmt("sweep shape over %d paired clusters per point (combiner/forward-soft "
               "normalized edit rate):%s; strict K=2->8 improvement %s, intermediate "
               "steps within noise band %s, baseline dominance %s",
               clusters, detail.c_str(), endpoints_ok ? "yes" : "NO",
               steps_ok ? "yes" : "NO", dominance_ok ? "yes" : "NO"));
}

// ---- criterion 8: real-data anchor ----

void criterion_8() {
    std::string centers = "data/centers.txt";
    std::string clusters = "data/clusters.txt";
    if (const char* env = std::getenv("TRACEBP_CENTERS"))
        centers = env;
    if (const char* env = std::getenv("TRACEBP_CLUSTERS"))
        clusters = env;
    if (!std::filesystem::exists(centers) || !std::filesystem::exists(clusters)) {
        skip(8, fmt("real-data anchor: dataset not supplied (looked for %s and %s; "
                    "set TRACEBP_CENTERS/TRACEBP_CLUSTERS to run)",
                    centers.c_str(), clusters.c_str()));
        return;
    }
    ClusterDataset dataset = load_dataset(centers, clusters, Alphabet::dna());
    ExperimentConfig config;
    config.params = ChannelParams{0.017, 0.02, 0.022};
    config.k_values = {4};
    config.trials = 300;
    config.seed = 20240808;
    const auto rows = run_experiment(config, dataset);
    const ResultRow& row = rows.front();
    const bool pass = row.trials >= 300 && row.exact_reconstruction_rate >= 0.90 &&
                      row.normalized_edit_rate <= 0.03;
    report(8, pass,
           fmt("real-data anchor: K=4 over %d clusters, exact-reconstruction %.3f "
               "(need >= 0.90), normalized edit rate %.4f (need <= 0.03)",
               row.trials, row.exact_reconstruction_rate, row.normalized_edit_rate));
}

} // namespace

int main() {
    const auto start = Clock::now();
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("acceptance finished in %.1fs with %d failing criteria\n", secs,
                g_failures);
    return g_failures;
}
