#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "tracebp/channel.hpp"
#include "tracebp/combiner.hpp"
#include "tracebp/dataset.hpp"
#include "tracebp/errors.hpp"
#include "tracebp/experiment.hpp"
#include "tracebp/oracle.hpp"
#include "tracebp/rng.hpp"

namespace fs = std::filesystem;
using namespace tracebp;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitCollapse = 4;

struct CommonOpts {
    double pi_i = 0.017;
    double pi_d = 0.02;
    double pi_s = 0.022;
    int delta = kAutoDelta;
    std::uint64_t seed = 1;
    int jobs = 0;
    double epsilon = 1e-6;
    int max_iters = 0;
    double damping = 0.0;
    bool no_ring = false;
    std::string schedule = "sequential";
};

void add_channel_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--pi", opts.pi_i, "insertion probability")->check(CLI::Range(0.0, 0.999));
    cmd->add_option("--pd", opts.pi_d, "deletion probability")->check(CLI::Range(0.0, 0.999));
    cmd->add_option("--ps", opts.pi_s, "substitution probability")
        ->check(CLI::Range(0.0, 0.999));
    cmd->add_option("--seed", opts.seed, "random seed");
}

void add_decoder_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--delta", opts.delta,
                    "drift bound (-1 = banded default, widened per trace)");
    cmd->add_option("--epsilon", opts.epsilon, "consensus threshold (max pairwise TV)");
    cmd->add_option("--max-iters", opts.max_iters, "iteration cap (0 = max(30, 2K))");
    cmd->add_option("--damping", opts.damping, "message damping factor")
        ->check(CLI::Range(0.0, 0.99));
    cmd->add_flag("--no-ring", opts.no_ring, "open the ring (chain topology)");
    cmd->add_option("--schedule", opts.schedule, "message schedule")
        ->check(CLI::IsMember({"sequential", "flooding"}));
    cmd->add_option("--jobs", opts.jobs,
                    "worker threads (0 = TRACEBP_JOBS or hardware)");
}

int resolve_jobs(int requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("TRACEBP_JOBS"))
        if (int v = std::atoi(env); v > 0)
            return v;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ChannelParams params_of(const CommonOpts& opts) {
    ChannelParams p{opts.pi_i, opts.pi_d, opts.pi_s};
    p.validate();
    return p;
}

FusionConfig fusion_of(const CommonOpts& opts) {
    FusionConfig config;
    config.epsilon_consensus = opts.epsilon;
    config.max_iters = opts.max_iters;
    config.ring_closure = !opts.no_ring;
    config.damping = opts.damping;
    config.delta = opts.delta;
    config.schedule =
        opts.schedule == "flooding" ? Schedule::Flooding : Schedule::Sequential;
    return config;
}

void write_plotdata(const std::string& out_path, const std::vector<ResultRow>& rows) {
    // One file per figure-equivalent sweep: fixed decoder and channel point,
    // K on the x-axis.
    std::string stem = out_path;
    if (auto dot = stem.rfind(".csv"); dot != std::string::npos)
        stem = stem.substr(0, dot);
    std::vector<std::string> seen;
    for (const ResultRow& r : rows) {
        char suffix[128];
        std::snprintf(suffix, sizeof(suffix), "%s_pi%g_pd%g_ps%g", r.decoder.c_str(), r.pi_i,
                      r.pi_d, r.pi_s);
        const std::string path = stem + "_" + suffix + ".csv";
        const bool fresh =
            std::find(seen.begin(), seen.end(), path) == seen.end();
        std::ofstream out(path, fresh ? std::ios::trunc : std::ios::app);
        if (fresh) {
            seen.push_back(path);
            out << "k,mean_edit_distance,normalized_edit_rate,exact_reconstruction_rate,"
                   "mean_iterations\n";
        }
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%.6g,%.6g,%.6g,%.6g\n", r.k,
                      r.mean_edit_distance, r.normalized_edit_rate,
                      r.exact_reconstruction_rate, r.mean_iterations);
        out << line;
    }
}

int run_simulate(const CommonOpts& opts, int n, int k, int trials,
                 const std::string& out_dir) {
    const Alphabet& dna = Alphabet::dna();
    const ChannelParams params = params_of(opts);
    std::vector<Cluster> clusters;
    clusters.reserve(trials);
    for (int trial = 0; trial < trials; ++trial) {
        const SourceSequence x =
            random_source(n, dna, derive_seed(opts.seed, 2 * trial));
        clusters.push_back(
            sample_cluster(x, k, params, dna, derive_seed(opts.seed, 2 * trial + 1)));
    }
    fs::create_directories(out_dir);
    std::ofstream centers(fs::path(out_dir) / "centers.txt");
    std::ofstream reads(fs::path(out_dir) / "clusters.txt");
    if (!centers || !reads)
        throw Error("cannot write into " + out_dir);
    write_centers(centers, clusters, dna);
    write_clusters(reads, clusters, dna);
    std::cerr << "wrote " << trials << " clusters (K=" << k << ", N=" << n << ") to "
              << out_dir << "\n";
    return 0;
}

int run_decode(const CommonOpts& opts, const std::string& centers,
               const std::string& clusters, const std::string& decoder_name_,
               std::vector<int> k_values, int trials, const std::string& out_path,
               const std::string& report_path, bool timing, bool emit_plotdata) {
    const auto decoder = parse_decoder(decoder_name_);
    if (!decoder) {
        std::cerr << "unknown decoder: " << decoder_name_ << "\n";
        return kExitUsage;
    }
    ClusterDataset dataset = load_dataset(centers, clusters, Alphabet::dna());
    if (dataset.dropped_reads > 0)
        std::cerr << "warning: dropped " << dataset.dropped_reads
                  << " reads with symbols outside the alphabet\n";

    ExperimentConfig config;
    config.decoder = *decoder;
    config.params = params_of(opts);
    config.trials = trials;
    config.seed = opts.seed;
    config.jobs = resolve_jobs(opts.jobs);
    config.timing = timing;
    config.fusion = fusion_of(opts);
    if (!k_values.empty()) {
        config.k_values = std::move(k_values);
    } else {
        // Use each cluster at its own size.
        int k_all = 0;
        for (const Cluster& c : dataset.entries)
            k_all = k_all == 0 ? c.size() : std::min(k_all, c.size());
        config.k_values = {k_all};
    }
    const std::vector<ResultRow> rows = run_experiment(config, dataset);

    if (out_path.empty() || out_path == "-") {
        write_csv(std::cout, rows);
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw Error("cannot write " + out_path);
        write_csv(out, rows);
        if (emit_plotdata)
            write_plotdata(out_path, rows);
    }

    if (!report_path.empty()) {
        std::ofstream rep(report_path);
        if (!rep)
            throw Error("cannot write " + report_path);
        const FusionConfig fusion = fusion_of(opts);
        for (const Cluster& cluster : dataset.entries) {
            const int n = cluster.reference->length();
            DecodeReport report =
                iterate(cluster, n, config.params, Alphabet::dna(), fusion);
            write_report_line(rep, report, Alphabet::dna());
        }
    }
    return 0;
}

int run_oracle(const CommonOpts& opts, const std::string& centers,
               const std::string& clusters, int n, int k, int limit) {
    const Alphabet& dna = Alphabet::dna();
    const ChannelParams params = params_of(opts);
    std::vector<Cluster> batch;
    if (!centers.empty()) {
        ClusterDataset dataset = load_dataset(centers, clusters, dna);
        for (const Cluster& c : dataset.entries) {
            if (static_cast<int>(batch.size()) >= limit)
                break;
            batch.push_back(c);
        }
    } else {
        for (int trial = 0; trial < limit; ++trial) {
            const SourceSequence x =
                random_source(n, dna, derive_seed(opts.seed, 2 * trial));
            batch.push_back(
                sample_cluster(x, k, params, dna, derive_seed(opts.seed, 2 * trial + 1)));
        }
    }
    const FusionConfig fusion = fusion_of(opts);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Cluster& cluster = batch[i];
        const int len = cluster.reference->length();
        const auto exact = enumerate_app(cluster, len, params, dna);
        DecodeReport report = iterate(cluster, len, params, dna, fusion);
        double max_tv = 0.0;
        int map_matches = 0;
        std::cout << "cluster " << (i + 1) << " positions " << len << "\n";
        for (int t = 0; t < len; ++t) {
            std::cout << "  t=" << (t + 1) << " oracle:";
            for (int s = 0; s < dna.size(); ++s) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), " %.4f", exact[t][s]);
                std::cout << buf;
            }
            const double tv = tv_distance(report.consensus_beliefs[t], exact[t]);
            max_tv = std::max(max_tv, tv);
            const bool match = argmax_symbol(report.consensus_beliefs[t]) ==
                               argmax_symbol(exact[t]);
            map_matches += match ? 1 : 0;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "  tv=%.2e%s", tv, match ? "" : "  MAP-DIFF");
            std::cout << buf << "\n";
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "cluster %zu: map-agreement %d/%d  max-tv %.3e  %s (%d iters)\n",
                      i + 1, map_matches, len, max_tv,
                      report.converged ? "converged" : "not-converged",
                      report.iterations_used);
        std::cout << buf;
    }
    return 0;
}

int run_verify(const CommonOpts& opts, int n, int k, int sigma, int trials) {
    VerifyConfig config;
    config.instances = trials;
    config.n_lo = config.n_hi = n;
    config.alphabet_sizes = {sigma};
    config.k_values = {k};
    config.rates = {};
    config.fixed_params = params_of(opts);
    config.seed = opts.seed;
    config.jobs = resolve_jobs(opts.jobs);
    config.fusion = fusion_of(opts);
    const auto results = oracle_comparison(config);
    long positions = 0, matches = 0;
    int converged = 0;
    double max_tv = 0.0, mean_iters = 0.0;
    std::vector<double> tvs;
    for (const VerifyInstance& inst : results) {
        if (!inst.converged)
            continue;
        ++converged;
        positions += inst.positions;
        matches += inst.map_matches;
        max_tv = std::max(max_tv, inst.max_tv);
        mean_iters += inst.iterations;
        tvs.push_back(inst.max_tv);
    }
    std::sort(tvs.begin(), tvs.end());
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "instances %d (converged %d)\nMAP agreement %.4f (%ld/%ld positions)\n"
                  "max APP tv-gap %.3e (median %.3e)\nmean iterations %.2f\n",
                  config.instances, converged,
                  positions ? static_cast<double>(matches) / positions : 0.0, matches,
                  positions, max_tv, tvs.empty() ? 0.0 : tvs[tvs.size() / 2],
                  converged ? mean_iters / converged : 0.0);
    std::cout << buf;
    return 0;
}

int run_bench(const CommonOpts& opts, int n, int k_min, int k_max, int trials,
              const std::string& out_path) {
    ExperimentConfig config;
    config.params = params_of(opts);
    config.trials = trials;
    config.seed = opts.seed;
    config.n = n;
    config.fusion = fusion_of(opts);
    config.k_values.clear();
    for (int k = k_min; k <= k_max; ++k)
        config.k_values.push_back(k);
    const ComplexityReport report = measure_complexity(config);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file)
            throw Error("cannot write " + out_path);
        os = &file;
    }
    *os << "k,gamma_evals,mean_iterations,wall_ms\n";
    for (const ComplexityPoint& p : report.points) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d,%llu,%.6g,%.6g\n", p.k,
                      static_cast<unsigned long long>(p.gamma_evals), p.mean_iterations,
                      p.wall_ms);
        *os << buf;
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf), "fitted_exponent,%.4f\ndelta,%d\ndelta_sigma,%.1f\n",
                  report.fitted_exponent, report.delta, report.delta_sigma);
    *os << buf;
    for (const auto& [k, edges] : report.joint_edge_counts) {
        std::snprintf(buf, sizeof(buf), "joint_edges_k%d,%llu\n", k,
                      static_cast<unsigned long long>(edges));
        *os << buf;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterative belief-combining trace reconstruction over IDS channels"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* simulate = app.add_subcommand("simulate", "sample clusters through the channel");
    int sim_n = 110, sim_k = 8, sim_trials = 300;
    std::string sim_out = "sim";
    add_channel_flags(simulate, opts);
    simulate->add_option("--n", sim_n, "source length")->check(CLI::PositiveNumber);
    simulate->add_option("--k", sim_k, "traces per cluster")->check(CLI::PositiveNumber);
    simulate->add_option("--trials", sim_trials, "number of clusters")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim_out, "output directory");

    auto* decode = app.add_subcommand("decode", "reconstruct sources from cluster files");
    std::string dec_centers, dec_clusters, dec_decoder = "belief-combine";
    std::string dec_out, dec_report;
    std::vector<int> dec_k;
    int dec_trials = 1000000;
    bool dec_timing = false, dec_plotdata = false;
    add_channel_flags(decode, opts);
    add_decoder_flags(decode, opts);
    decode->add_option("--centers", dec_centers, "centers file")->required();
    decode->add_option("--clusters", dec_clusters, "clusters file")->required();
    decode->add_option("--decoder", dec_decoder,
                       "belief-combine|forward-soft|single-trace|joint-oracle");
    decode->add_option("--k", dec_k, "subsample sizes (repeatable)");
    decode->add_option("--trials", dec_trials, "max clusters per point");
    decode->add_option("--out", dec_out, "result CSV path (default stdout)");
    decode->add_option("--report", dec_report, "per-cluster decode report path");
    decode->add_flag("--timing", dec_timing, "measure wall-clock (output not byte-stable)");
    decode->add_flag("--emit-plotdata", dec_plotdata, "write one CSV per sweep");

    auto* oracle = app.add_subcommand("oracle", "exact posteriors and combiner agreement");
    std::string ora_centers, ora_clusters;
    int ora_n = 6, ora_k = 2, ora_limit = 3;
    add_channel_flags(oracle, opts);
    add_decoder_flags(oracle, opts);
    oracle->add_option("--centers", ora_centers, "centers file (else synthetic)");
    oracle->add_option("--clusters", ora_clusters, "clusters file");
    oracle->add_option("--n", ora_n, "synthetic source length")->check(CLI::PositiveNumber);
    oracle->add_option("--k", ora_k, "synthetic traces per cluster")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--limit", ora_limit, "clusters to print")
        ->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand(
        "verify", "combiner vs enumeration oracle on random instances");
    int ver_n = 5, ver_k = 2, ver_sigma = 4, ver_trials = 50;
    add_channel_flags(verify, opts);
    add_decoder_flags(verify, opts);
    verify->add_option("--n", ver_n, "source length")->check(CLI::PositiveNumber);
    verify->add_option("--k", ver_k, "traces per cluster")->check(CLI::PositiveNumber);
    verify->add_option("--sigma", ver_sigma, "alphabet size (2 or 4)")
        ->check(CLI::IsMember({2, 4}));
    verify->add_option("--trials", ver_trials, "instances")->check(CLI::PositiveNumber);

    auto* bench = app.add_subcommand("bench", "combiner work scaling across K");
    int ben_n = 100, ben_kmin = 2, ben_kmax = 16, ben_trials = 5;
    std::string ben_out;
    add_channel_flags(bench, opts);
    add_decoder_flags(bench, opts);
    bench->add_option("--n", ben_n, "source length")->check(CLI::PositiveNumber);
    bench->add_option("--k-min", ben_kmin, "smallest K")->check(CLI::PositiveNumber);
    bench->add_option("--k-max", ben_kmax, "largest K")->check(CLI::PositiveNumber);
    bench->add_option("--trials", ben_trials, "clusters per K")
        ->check(CLI::PositiveNumber);
    bench->add_option("--out", ben_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(simulate))
            return run_simulate(opts, sim_n, sim_k, sim_trials, sim_out);
        if (app.got_subcommand(decode))
            return run_decode(opts, dec_centers, dec_clusters, dec_decoder, dec_k,
                              dec_trials, dec_out, dec_report, dec_timing, dec_plotdata);
        if (app.got_subcommand(oracle))
            return run_oracle(opts, ora_centers, ora_clusters, ora_n, ora_k, ora_limit);
        if (app.got_subcommand(verify))
            return run_verify(opts, ver_n, ver_k, ver_sigma, ver_trials);
        if (app.got_subcommand(bench))
            return run_bench(opts, ben_n, ben_kmin, ben_kmax, ben_trials, ben_out);
    } catch (const DecodeCollapse& e) {
        std::cerr << "decode collapse: " << e.what() << "\n";
        return kExitCollapse;
    } catch (const MismatchedCounts& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitData;
    } catch (const EmptyCluster& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitData;
    } catch (const InstanceTooLarge& e) {
        std::cerr << "instance too large: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
