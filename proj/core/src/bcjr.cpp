#include "tracebp/bcjr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "tracebp/errors.hpp"

namespace tracebp {

PriorTable uniform_priors(int n, int sigma) {
    return PriorTable(n, SymbolDist::uniform(sigma));
}

double gamma(const TrellisSpec& spec, const Branch& branch, const SymbolDist& prior,
             const Trace& trace) {
    const int sigma = spec.alphabet().size();
    switch (branch.kind) {
        case BranchKind::Import:
            return prior[*branch.to.buffered];
        case BranchKind::Insert: {
            const int p = branch.to.pointer;
            if (p < 1 || p > trace.length())
                return 0.0;
            if (trace.symbols[p - 1] != *branch.emission)
                return 0.0;
            return branch.transition_prob / sigma;
        }
        case BranchKind::Delete:
            return branch.transition_prob;
        case BranchKind::TransOrSub: {
            const int p = branch.to.pointer;
            if (p < 1 || p > trace.length())
                return 0.0;
            if (trace.symbols[p - 1] != *branch.emission)
                return 0.0;
            return branch.transition_prob;
        }
        case BranchKind::Flush:
            return branch.transition_prob;
    }
    return 0.0;
}

namespace {

void check_inputs(const TrellisSpec& spec, const PriorTable& priors, const Trace& trace) {
    if (trace.length() != spec.trace_length())
        throw ContractError("trace length does not match the spec");
    if (static_cast<int>(priors.size()) != spec.input_length())
        throw ContractError("prior table length does not match the spec");
    for (const SymbolDist& p : priors)
        if (p.size() != spec.alphabet().size() || !p.is_normalized(1e-6))
            throw ContractError("priors must be normalized over the alphabet");
}

void rescale_stage(StageMetrics& st, std::uint64_t stage_index) {
    double mx = 0.0;
    for (double v : st.values)
        mx = std::max(mx, v);
    if (mx <= 0.0)
        throw DecodeCollapse("stage " + std::to_string(stage_index) +
                             " mass underflowed to zero");
    const double inv = 1.0 / mx;
    for (double& v : st.values)
        v *= inv;
    for (double& v : st.entry)
        v *= inv;
    st.log_scale += std::log(mx);
}

} // namespace

MetricMatrix forward(const TrellisSpec& spec, const PriorTable& priors, const Trace& trace) {
    check_inputs(spec, priors, trace);
    const int n = spec.input_length();
    const int m = spec.trace_length();
    const int sigma = spec.alphabet().size();

    MetricMatrix out;
    out.stages.resize(spec.num_stages());
    std::uint64_t ops = 0;

    for (int t = 1; t <= n; ++t) {
        const int ia = 4 * (t - 1);
        const PointerWindow wa = spec.window(ia);
        const PointerWindow wb = spec.window(ia + 1);
        const PointerWindow wc = spec.window(ia + 2);
        const SymbolDist& prior = priors[t - 1];

        StageMetrics& a = out.stages[ia];
        if (t == 1) {
            a.values.assign(1, 1.0);
        } else {
            a.values = out.stages[ia - 1].values;
            a.log_scale = out.stages[ia - 1].log_scale;
        }

        StageMetrics& b = out.stages[ia + 1];
        const int bw = wb.width();
        b.log_scale = a.log_scale;
        b.entry.assign(static_cast<std::size_t>(bw) * sigma, 0.0);
        for (int x = 0; x < sigma; ++x) {
            double* ent = b.entry.data() + static_cast<std::size_t>(x) * bw;
            for (int p = wa.lo; p <= wa.hi; ++p) {
                ent[p - wb.lo] = a.values[p - wa.lo] * prior[x];
                ++ops;
            }
        }
        b.values = b.entry;
        for (int x = 0; x < sigma; ++x) {
            double* val = b.values.data() + static_cast<std::size_t>(x) * bw;
            for (int p = wb.lo + 1; p <= wb.hi; ++p) {
                const EventWeights ev = spec.event_weights(p - 1, t);
                if (ev.ins) {
                    val[p - wb.lo] += val[p - 1 - wb.lo] * ev.w_ins;
                    ++ops;
                }
            }
        }
        rescale_stage(b, ia + 1);

        StageMetrics& c = out.stages[ia + 2];
        const int cw = wc.width();
        c.log_scale = b.log_scale;
        c.values.assign(static_cast<std::size_t>(cw) * sigma, 0.0);
        for (int x = 0; x < sigma; ++x) {
            const double* bx = b.values.data() + static_cast<std::size_t>(x) * bw;
            double* cx = c.values.data() + static_cast<std::size_t>(x) * cw;
            for (int p = wc.lo; p <= wc.hi; ++p) {
                double v = 0.0;
                if (wb.contains(p)) {
                    const EventWeights ev = spec.event_weights(p, t);
                    if (ev.del) {
                        v += bx[p - wb.lo] * ev.w_del;
                        ++ops;
                    }
                }
                if (p > 0 && wb.contains(p - 1)) {
                    const EventWeights ev = spec.event_weights(p - 1, t);
                    if (ev.diag) {
                        const Symbol obs = trace.symbols[p - 1];
                        v += bx[p - 1 - wb.lo] * (obs == x ? ev.w_ok : ev.w_sub);
                        ++ops;
                    }
                }
                cx[p - wc.lo] = v;
            }
        }
        rescale_stage(c, ia + 2);

        StageMetrics& d = out.stages[ia + 3];
        d.log_scale = c.log_scale;
        d.values.assign(cw, 0.0);
        for (int x = 0; x < sigma; ++x) {
            const double* cx = c.values.data() + static_cast<std::size_t>(x) * cw;
            for (int j = 0; j < cw; ++j) {
                d.values[j] += cx[j];
                ++ops;
            }
        }
        rescale_stage(d, ia + 3);
    }

    // Guard against a trace the windows cannot terminate (caller retries).
    const StageMetrics& last = out.stages[spec.num_stages() - 1];
    const PointerWindow wl = spec.window(spec.num_stages() - 1);
    if (last.values[m - wl.lo] <= 0.0)
        throw DecodeCollapse("no forward mass at the terminal pointer");

    out.gamma_evals = ops;
    return out;
}

MetricMatrix backward(const TrellisSpec& spec, const PriorTable& priors, const Trace& trace) {
    check_inputs(spec, priors, trace);
    const int n = spec.input_length();
    const int m = spec.trace_length();
    const int sigma = spec.alphabet().size();

    MetricMatrix out;
    out.stages.resize(spec.num_stages());
    std::uint64_t ops = 0;

    for (int t = n; t >= 1; --t) {
        const int ia = 4 * (t - 1);
        const PointerWindow wa = spec.window(ia);
        const PointerWindow wb = spec.window(ia + 1);
        const PointerWindow wc = spec.window(ia + 2);
        const SymbolDist& prior = priors[t - 1];

        StageMetrics& d = out.stages[ia + 3];
        const int cw = wc.width();
        if (t == n) {
            d.values.assign(cw, 0.0);
            d.values[m - wc.lo] = 1.0;
        } else {
            d.values = out.stages[ia + 4].values;
            d.log_scale = out.stages[ia + 4].log_scale;
        }

        StageMetrics& c = out.stages[ia + 2];
        c.log_scale = d.log_scale;
        c.values.assign(static_cast<std::size_t>(cw) * sigma, 0.0);
        for (int x = 0; x < sigma; ++x) {
            double* cx = c.values.data() + static_cast<std::size_t>(x) * cw;
            for (int j = 0; j < cw; ++j) {
                cx[j] = d.values[j];
                ++ops;
            }
        }

        StageMetrics& b = out.stages[ia + 1];
        const int bw = wb.width();
        b.log_scale = c.log_scale;
        b.values.assign(static_cast<std::size_t>(bw) * sigma, 0.0);
        for (int x = 0; x < sigma; ++x) {
            const double* cx = c.values.data() + static_cast<std::size_t>(x) * cw;
            double* bx = b.values.data() + static_cast<std::size_t>(x) * bw;
            for (int p = wb.hi; p >= wb.lo; --p) {
                const EventWeights ev = spec.event_weights(p, t);
                double v = 0.0;
                if (ev.del && wc.contains(p)) {
                    v += ev.w_del * cx[p - wc.lo];
                    ++ops;
                }
                if (ev.diag && wc.contains(p + 1)) {
                    const Symbol obs = trace.symbols[p];
                    v += (obs == x ? ev.w_ok : ev.w_sub) * cx[p + 1 - wc.lo];
                    ++ops;
                }
                if (ev.ins) {
                    v += ev.w_ins * bx[p + 1 - wb.lo];
                    ++ops;
                }
                bx[p - wb.lo] = v;
            }
        }
        rescale_stage(b, ia + 1);

        StageMetrics& a = out.stages[ia];
        a.log_scale = b.log_scale;
        a.values.assign(wa.width(), 0.0);
        for (int p = wa.lo; p <= wa.hi; ++p) {
            double v = 0.0;
            for (int x = 0; x < sigma; ++x) {
                v += prior[x] * b.values[static_cast<std::size_t>(x) * bw + (p - wb.lo)];
                ++ops;
            }
            a.values[p - wa.lo] = v;
        }
        rescale_stage(a, ia);
    }

    if (out.stages[0].values[0] <= 0.0)
        throw DecodeCollapse("no backward mass at the initial state");

    out.gamma_evals = ops;
    return out;
}

StateAPP state_posteriors(const TrellisSpec& spec, const MetricMatrix& alpha,
                          const MetricMatrix& beta) {
    if (alpha.stages.size() != beta.stages.size() ||
        static_cast<int>(alpha.stages.size()) != spec.num_stages())
        throw ContractError("metric matrices do not match the spec");

    StateAPP app;
    app.stages.resize(alpha.stages.size());
    app.stage_log_evidence.resize(alpha.stages.size());
    for (int i = 0; i < spec.num_stages(); ++i) {
        const StageMetrics& a = alpha.stages[i];
        const StageMetrics& b = beta.stages[i];
        const std::vector<double>& avals =
            spec.kind_of(i) == StageKind::Buffer ? a.entry : a.values;
        if (avals.size() != b.values.size())
            throw ContractError("stage size mismatch between alpha and beta");
        std::vector<double>& post = app.stages[i];
        post.resize(avals.size());
        double total = 0.0;
        for (std::size_t j = 0; j < avals.size(); ++j) {
            post[j] = avals[j] * b.values[j];
            total += post[j];
        }
        if (total <= 0.0)
            throw DecodeCollapse("zero posterior normalizer at stage " + std::to_string(i));
        const double inv = 1.0 / total;
        for (double& v : post)
            v *= inv;
        app.stage_log_evidence[i] = std::log(total) + a.log_scale + b.log_scale;
    }
    return app;
}

namespace {

std::vector<SymbolDist> read_symbol_marginals(const TrellisSpec& spec, const StateAPP& app,
                                              int stage_offset) {
    const int sigma = spec.alphabet().size();
    std::vector<SymbolDist> out;
    out.reserve(spec.input_length());
    for (int t = 1; t <= spec.input_length(); ++t) {
        const int i = 4 * (t - 1) + stage_offset;
        const PointerWindow w = spec.window(i);
        const std::vector<double>& post = app.stages[i];
        SymbolDist dist(sigma);
        for (int x = 0; x < sigma; ++x) {
            double s = 0.0;
            for (int j = 0; j < w.width(); ++j)
                s += post[static_cast<std::size_t>(x) * w.width() + j];
            dist[x] = s;
        }
        out.push_back(normalize(dist));
    }
    return out;
}

} // namespace

std::vector<SymbolDist> symbol_app(const TrellisSpec& spec, const StateAPP& app) {
    return read_symbol_marginals(spec, app, 2);
}

std::vector<SymbolDist> symbol_app_at_buffer(const TrellisSpec& spec, const StateAPP& app) {
    return read_symbol_marginals(spec, app, 1);
}

double log_evidence(const TrellisSpec& spec, const MetricMatrix& alpha) {
    const int last = spec.num_stages() - 1;
    const PointerWindow w = spec.window(last);
    const double v = alpha.stages[last].values[spec.trace_length() - w.lo];
    return std::log(v) + alpha.stages[last].log_scale;
}

TraceDecode decode_trace(const Trace& trace, int n, const ChannelParams& params,
                         const Alphabet& alphabet, const PriorTable& priors, int delta) {
    const int m = trace.length();
    const int cap = std::max(n, m);
    int resolved = delta == kAutoDelta ? default_drift_bound(n, params) : delta;
    // Widen just enough for this trace to stay decodable.
    resolved = std::max(resolved, std::abs(m - n));
    for (;;) {
        try {
            TrellisSpec spec(n, m, resolved, alphabet, params);
            MetricMatrix alpha = forward(spec, priors, trace);
            MetricMatrix beta = backward(spec, priors, trace);
            StateAPP app = state_posteriors(spec, alpha, beta);
            TraceDecode result;
            result.symbol_posteriors = symbol_app(spec, app);
            result.log_evidence = log_evidence(spec, alpha);
            result.gamma_evals = alpha.gamma_evals + beta.gamma_evals;
            result.delta_used = resolved;
            return result;
        } catch (const DecodeCollapse&) {
            if (resolved >= cap)
                throw;
            resolved = std::min(cap, std::max(1, resolved) * 2);
        }
    }
}

} // namespace tracebp
