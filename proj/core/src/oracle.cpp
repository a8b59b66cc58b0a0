#include "tracebp/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "tracebp/errors.hpp"

namespace tracebp {

double trace_likelihood(const SourceSequence& x, const Trace& y,
                        const ChannelParams& params, const Alphabet& alphabet) {
    params.validate();
    const int n = x.length();
    const int m = y.length();
    const int sigma = alphabet.size();
    const double w_ins = params.pi_i / sigma;
    const double w_sub = params.pi_s / (sigma - 1);
    const double w_ok = params.pi_correct();

    // L[p] = Pr(first t inputs consumed, first p output symbols emitted).
    std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
    prev[0] = 1.0;
    for (int p = 1; p <= m; ++p)
        prev[p] = prev[p - 1] * w_ins; // insertions while x_1 is on deck
    for (int t = 1; t <= n; ++t) {
        const Symbol xt = x.symbols[t - 1];
        const bool pending_input = t < n; // insertions only before the last consume
        for (int p = 0; p <= m; ++p) {
            double v = prev[p] * params.pi_d;
            if (p > 0) {
                const Symbol yp = y.symbols[p - 1];
                v += prev[p - 1] * (yp == xt ? w_ok : w_sub);
                if (pending_input)
                    v += cur[p - 1] * w_ins;
            }
            cur[p] = v;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

std::vector<SymbolDist> enumerate_app(const Cluster& cluster, int n,
                                      const ChannelParams& params,
                                      const Alphabet& alphabet) {
    const int sigma = alphabet.size();
    double space = 1.0;
    for (int t = 0; t < n; ++t) {
        space *= sigma;
        if (space > 1e7)
            throw InstanceTooLarge("enumeration space exceeds 10^7 sequences");
    }

    std::vector<SymbolDist> marginals(n, SymbolDist(sigma));
    SourceSequence x;
    x.symbols.assign(n, 0);
    for (;;) {
        double w = 1.0;
        for (const Trace& y : cluster.traces) {
            w *= trace_likelihood(x, y, params, alphabet);
            if (w == 0.0)
                break;
        }
        if (w > 0.0)
            for (int t = 0; t < n; ++t)
                marginals[t][x.symbols[t]] += w;
        // odometer increment
        int t = n - 1;
        while (t >= 0 && ++x.symbols[t] == sigma) {
            x.symbols[t] = 0;
            --t;
        }
        if (t < 0)
            break;
    }
    for (auto& m : marginals)
        m = normalize(m);
    return marginals;
}

namespace {

// Pointer windows of the four-stage section layout, shared by the product
// trellis. AB stages sit before the section's consume step (nominal pointer
// t-1), CD stages after it (nominal pointer t).
struct Window {
    int lo = 0;
    int hi = -1;
    int width() const { return hi - lo + 1; }
    bool contains(int p) const { return p >= lo && p <= hi; }
};

Window ab_window(int t, int delta, int m) {
    return Window{std::max(0, t - 1 - delta), std::min(m, t - 1 + delta)};
}

Window cd_window(int t, int delta, int m) {
    return Window{std::max(0, t - delta), std::min(m, t + delta)};
}

// Per-trace branch weights out of a B state, with band-pruned event mass
// renormalized over the surviving branches. Pruning the insert branch at
// the window top (pointer+1 still inside the trace) or the delete branch at
// the window bottom removes genuinely reachable paths, so the remaining
// events are rescaled to keep a proper outgoing distribution. The zeros at
// pointer = trace length are part of the exact channel law and are left
// alone.
struct BranchWeights {
    bool ins = false, del = false, diag = false;
    double w_ins = 0.0, w_del = 0.0, factor = 1.0;
};

BranchWeights branch_weights(int p, int t, int delta, int m, const ChannelParams& params,
                             int sigma) {
    const Window ab = ab_window(t, delta, m);
    const Window cd = cd_window(t, delta, m);
    BranchWeights w;
    w.ins = p + 1 <= ab.hi;
    w.diag = p + 1 <= m;
    w.del = p >= cd.lo;
    const bool ins_band_pruned = !w.ins && p + 1 <= m;
    const bool del_band_pruned = !w.del;
    w.factor = 1.0 / (1.0 - params.pi_i * (ins_band_pruned ? 1.0 : 0.0) -
                      params.pi_d * (del_band_pruned ? 1.0 : 0.0));
    w.w_ins = params.pi_i / sigma * w.factor;
    w.w_del = params.pi_d * w.factor;
    return w;
}

double diag_weight(Symbol buffered, Symbol observed, const ChannelParams& params,
                   int sigma) {
    return buffered == observed ? params.pi_correct() : params.pi_s / (sigma - 1);
}

struct TupleSpace {
    std::array<Window, 3> windows{};
    std::array<int, 3> strides{};
    int k = 0;
    int total = 1;

    void build(const std::vector<Window>& ws) {
        k = static_cast<int>(ws.size());
        total = 1;
        for (int i = k - 1; i >= 0; --i) {
            windows[i] = ws[i];
            strides[i] = total;
            total *= ws[i].width();
        }
    }

    void decode(int idx, std::array<int, 3>& pointers) const {
        for (int i = 0; i < k; ++i) {
            pointers[i] = windows[i].lo + idx / strides[i];
            idx %= strides[i];
        }
    }

    // Index of a tuple known to be inside the space.
    int encode(const std::array<int, 3>& pointers) const {
        int idx = 0;
        for (int i = 0; i < k; ++i)
            idx += (pointers[i] - windows[i].lo) * strides[i];
        return idx;
    }
};

struct JointStage {
    TupleSpace tuples;
    bool has_symbol = false;
    std::vector<double> values; // [x * tuples.total + tuple] or [tuple]
    double log_scale = 0.0;

    int size() const { return static_cast<int>(values.size()); }
};

struct JointLayout {
    int n = 0, k = 0, sigma = 0, delta = 0;
    std::vector<int> m;
    ChannelParams params;

    TupleSpace space_at(int t, bool after_consume) const {
        std::vector<Window> ws(k);
        for (int i = 0; i < k; ++i)
            ws[i] = after_consume ? cd_window(t, delta, m[i]) : ab_window(t, delta, m[i]);
        TupleSpace s;
        s.build(ws);
        return s;
    }
};

void rescale(JointStage& stage) {
    double mx = 0.0;
    for (double v : stage.values)
        mx = std::max(mx, v);
    if (mx <= 0.0)
        throw DecodeCollapse("joint trellis stage mass vanished");
    const double inv = 1.0 / mx;
    for (double& v : stage.values)
        v *= inv;
    stage.log_scale += std::log(mx);
}

} // namespace

std::vector<SymbolDist> joint_trellis_app(const Cluster& cluster, int n,
                                          const ChannelParams& params,
                                          const Alphabet& alphabet, int delta) {
    params.validate();
    const int k = cluster.size();
    if (k < 1 || k > 3)
        throw InstanceTooLarge("joint trellis supports 1 to 3 traces");
    JointLayout lay;
    lay.n = n;
    lay.k = k;
    lay.sigma = alphabet.size();
    lay.params = params;
    for (const Trace& y : cluster.traces)
        lay.m.push_back(y.length());
    int max_m = 0;
    for (int m : lay.m)
        max_m = std::max(max_m, m);
    lay.delta = delta >= 0 ? delta : std::max(n, max_m);
    for (int m : lay.m)
        if (m < n - lay.delta || m > n + lay.delta)
            throw UnreachableTerminal("trace length outside drift bound of joint trellis");

    // Memory guard: alpha and beta across all 4n stages.
    double widest = static_cast<double>(lay.sigma);
    for (int i = 0; i < k; ++i)
        widest *= std::min(2 * lay.delta + 1, lay.m[i] + 1);
    if (widest * 4.0 * n > 8e7)
        throw InstanceTooLarge("joint trellis state space exceeds memory budget");

    const double prior = 1.0 / lay.sigma;
    const int num_stages = 4 * n;
    std::vector<JointStage> alpha(num_stages), beta(num_stages);

    auto make_stage = [&](int i) {
        const int t = i / 4 + 1;
        const int kind = i % 4;
        JointStage s;
        s.tuples = lay.space_at(t, kind >= 2);
        s.has_symbol = kind == 1 || kind == 2;
        s.values.assign(static_cast<std::size_t>(s.tuples.total) * (s.has_symbol ? lay.sigma : 1),
                        0.0);
        return s;
    };

    std::array<int, 3> ptr{};

    // ---- forward ----
    for (int i = 0; i < num_stages; ++i) {
        alpha[i] = make_stage(i);
        const int t = i / 4 + 1;
        const int kind = i % 4;
        JointStage& st = alpha[i];
        if (kind == 0) {
            if (i == 0) {
                std::array<int, 3> zero{};
                st.values[st.tuples.encode(zero)] = 1.0;
            } else {
                st.values = alpha[i - 1].values; // section boundary shares the state
                st.log_scale = alpha[i - 1].log_scale;
            }
            continue;
        }
        if (kind == 1) {
            const JointStage& prev = alpha[i - 1];
            st.log_scale = prev.log_scale;
            // import: attach the shared input symbol with its prior
            for (int x = 0; x < lay.sigma; ++x)
                for (int u = 0; u < st.tuples.total; ++u)
                    st.values[static_cast<std::size_t>(x) * st.tuples.total + u] =
                        prev.values[u] * prior;
            // canonical per-trace insertion chains, one trace at a time
            for (int tr = 0; tr < k; ++tr) {
                const int stride = st.tuples.strides[tr];
                for (int x = 0; x < lay.sigma; ++x) {
                    double* block = st.values.data() +
                                    static_cast<std::size_t>(x) * st.tuples.total;
                    for (int u = 0; u < st.tuples.total; ++u) {
                        st.tuples.decode(u, ptr);
                        if (ptr[tr] == st.tuples.windows[tr].lo)
                            continue;
                        const auto w = branch_weights(ptr[tr] - 1, t, lay.delta, lay.m[tr],
                                                      lay.params, lay.sigma);
                        if (w.ins)
                            block[u] += block[u - stride] * w.w_ins;
                    }
                }
            }
            rescale(st);
            continue;
        }
        if (kind == 2) {
            const JointStage& prev = alpha[i - 1];
            st.log_scale = prev.log_scale;
            for (int x = 0; x < lay.sigma; ++x) {
                const double* src = prev.values.data() +
                                    static_cast<std::size_t>(x) * prev.tuples.total;
                double* dst = st.values.data() + static_cast<std::size_t>(x) * st.tuples.total;
                for (int u = 0; u < prev.tuples.total; ++u) {
                    if (src[u] == 0.0)
                        continue;
                    prev.tuples.decode(u, ptr);
                    // synchronized consume: every trace deletes or advances
                    std::array<int, 3> tgt{};
                    for (int mask = 0; mask < (1 << k); ++mask) {
                        double w = src[u];
                        bool ok = true;
                        for (int tr = 0; tr < k && ok; ++tr) {
                            const auto bw = branch_weights(ptr[tr], t, lay.delta, lay.m[tr],
                                                           lay.params, lay.sigma);
                            if (mask & (1 << tr)) {
                                if (!bw.diag) {
                                    ok = false;
                                    break;
                                }
                                const Symbol obs = cluster.traces[tr].symbols[ptr[tr]];
                                w *= diag_weight(static_cast<Symbol>(x), obs, lay.params,
                                                 lay.sigma) *
                                     bw.factor;
                                tgt[tr] = ptr[tr] + 1;
                            } else {
                                if (!bw.del) {
                                    ok = false;
                                    break;
                                }
                                w *= bw.w_del;
                                tgt[tr] = ptr[tr];
                            }
                        }
                        if (ok)
                            dst[st.tuples.encode(tgt)] += w;
                    }
                }
            }
            rescale(st);
            continue;
        }
        // kind == 3: flush the shared symbol
        const JointStage& prev = alpha[i - 1];
        st.log_scale = prev.log_scale;
        for (int x = 0; x < lay.sigma; ++x) {
            const double* src = prev.values.data() +
                                static_cast<std::size_t>(x) * prev.tuples.total;
            for (int u = 0; u < st.tuples.total; ++u)
                st.values[u] += src[u];
        }
        rescale(st);
    }

    // ---- backward ----
    for (int i = num_stages - 1; i >= 0; --i) {
        beta[i] = make_stage(i);
        const int t = i / 4 + 1;
        const int kind = i % 4;
        JointStage& st = beta[i];
        if (i == num_stages - 1) {
            std::array<int, 3> terminal{};
            for (int tr = 0; tr < k; ++tr)
                terminal[tr] = lay.m[tr];
            st.values[st.tuples.encode(terminal)] = 1.0;
            continue;
        }
        const JointStage& next = beta[i + 1];
        st.log_scale = next.log_scale;
        if (kind == 3) {
            // section boundary: same state as the A stage of section t+1
            st.values = next.values;
            continue;
        }
        if (kind == 2) {
            // flush transpose
            for (int x = 0; x < lay.sigma; ++x) {
                double* dst = st.values.data() + static_cast<std::size_t>(x) * st.tuples.total;
                for (int u = 0; u < st.tuples.total; ++u)
                    dst[u] = next.values[u];
            }
            rescale(st);
            continue;
        }
        if (kind == 1) {
            // consume transpose, then insertion chains in reverse phase order
            for (int x = 0; x < lay.sigma; ++x) {
                double* dst = st.values.data() + static_cast<std::size_t>(x) * st.tuples.total;
                const double* src = next.values.data() +
                                    static_cast<std::size_t>(x) * next.tuples.total;
                for (int u = 0; u < st.tuples.total; ++u) {
                    st.tuples.decode(u, ptr);
                    std::array<int, 3> tgt{};
                    double acc = 0.0;
                    for (int mask = 0; mask < (1 << k); ++mask) {
                        double w = 1.0;
                        bool ok = true;
                        for (int tr = 0; tr < k && ok; ++tr) {
                            const auto bw = branch_weights(ptr[tr], t, lay.delta, lay.m[tr],
                                                           lay.params, lay.sigma);
                            if (mask & (1 << tr)) {
                                if (!bw.diag) {
                                    ok = false;
                                    break;
                                }
                                const Symbol obs = cluster.traces[tr].symbols[ptr[tr]];
                                w *= diag_weight(static_cast<Symbol>(x), obs, lay.params,
                                                 lay.sigma) *
                                     bw.factor;
                                tgt[tr] = ptr[tr] + 1;
                            } else {
                                if (!bw.del) {
                                    ok = false;
                                    break;
                                }
                                w *= bw.w_del;
                                tgt[tr] = ptr[tr];
                            }
                        }
                        if (ok)
                            acc += w * src[next.tuples.encode(tgt)];
                    }
                    dst[u] = acc;
                }
                for (int tr = k - 1; tr >= 0; --tr) {
                    const int stride = st.tuples.strides[tr];
                    for (int u = st.tuples.total - 1; u >= 0; --u) {
                        st.tuples.decode(u, ptr);
                        const auto bw = branch_weights(ptr[tr], t, lay.delta, lay.m[tr],
                                                       lay.params, lay.sigma);
                        if (bw.ins)
                            dst[u] += bw.w_ins * dst[u + stride];
                    }
                }
            }
            rescale(st);
            continue;
        }
        // kind == 0: import transpose
        const JointStage& nb = beta[i + 1];
        for (int u = 0; u < st.tuples.total; ++u) {
            double acc = 0.0;
            for (int x = 0; x < lay.sigma; ++x)
                acc += prior * nb.values[static_cast<std::size_t>(x) * nb.tuples.total + u];
            st.values[u] = acc;
        }
        rescale(st);
    }

    // ---- symbol posteriors at the post-consume stages ----
    std::vector<SymbolDist> out(n, SymbolDist(lay.sigma));
    for (int t = 1; t <= n; ++t) {
        const int i = 4 * (t - 1) + 2;
        const JointStage& a = alpha[i];
        const JointStage& b = beta[i];
        SymbolDist acc(lay.sigma);
        for (int x = 0; x < lay.sigma; ++x) {
            double s = 0.0;
            const double* av = a.values.data() + static_cast<std::size_t>(x) * a.tuples.total;
            const double* bv = b.values.data() + static_cast<std::size_t>(x) * b.tuples.total;
            for (int u = 0; u < a.tuples.total; ++u)
                s += av[u] * bv[u];
            acc[x] = s;
        }
        out[t - 1] = normalize(acc);
    }
    return out;
}

std::uint64_t joint_trellis_edge_count(const std::vector<int>& trace_lengths, int n,
                                       const Alphabet& alphabet, int delta) {
    const int k = static_cast<int>(trace_lengths.size());
    const int sigma = alphabet.size();
    if (delta < 0) {
        delta = n;
        for (int m : trace_lengths)
            delta = std::max(delta, m);
    }
    // Inert channel rates: branch existence does not depend on them.
    const ChannelParams probe{0.1, 0.1, 0.1};
    std::uint64_t edges = 0;
    std::array<int, 3> ptr{};
    for (int t = 1; t <= n; ++t) {
        std::vector<Window> ab(k), cd(k);
        TupleSpace ab_space, cd_space;
        for (int i = 0; i < k; ++i) {
            ab[i] = ab_window(t, delta, trace_lengths[i]);
            cd[i] = cd_window(t, delta, trace_lengths[i]);
        }
        ab_space.build(ab);
        cd_space.build(cd);
        edges += static_cast<std::uint64_t>(ab_space.total) * sigma; // imports
        edges += static_cast<std::uint64_t>(cd_space.total) * sigma; // flushes
        for (int u = 0; u < ab_space.total; ++u) {
            ab_space.decode(u, ptr);
            std::uint64_t consume_combos = 1;
            std::uint64_t inserts = 0;
            for (int tr = 0; tr < k; ++tr) {
                const auto bw = branch_weights(ptr[tr], t, delta, trace_lengths[tr], probe,
                                               sigma);
                if (bw.ins)
                    inserts += sigma; // parallel labeled insertion branches
                consume_combos *= (bw.del ? 1 : 0) + (bw.diag ? sigma : 0);
            }
            edges += static_cast<std::uint64_t>(sigma) * (inserts + consume_combos);
        }
    }
    return edges;
}

} // namespace tracebp
