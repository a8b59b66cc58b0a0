#include "tracebp/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "tracebp/errors.hpp"

namespace tracebp {

int default_drift_bound(int n, const ChannelParams& params) {
    const int scaled =
        static_cast<int>(std::ceil(4.0 * std::sqrt(n * (params.pi_i + params.pi_d))));
    return std::min(std::max(8, scaled), std::max(1, n - 1));
}

TrellisSpec::TrellisSpec(int n, int trace_length, int delta, const Alphabet& alphabet,
                         const ChannelParams& params)
    : n_(n), m_(trace_length), delta_(delta), alphabet_(&alphabet), params_(params) {
    params_.validate();
    if (n_ < 1)
        throw ContractError("trellis needs at least one input position");
    if (m_ < 0)
        throw ContractError("negative trace length");
    if (delta_ < 0)
        throw ContractError("drift bound must be non-negative");
    if (m_ < n_ - delta_ || m_ > n_ + delta_)
        throw UnreachableTerminal("trace length outside drift bound");
}

PointerWindow TrellisSpec::window(int stage) const {
    const int t = section_of(stage);
    const StageKind k = kind_of(stage);
    if (stage == 0)
        return PointerWindow{0, 0};
    if (k == StageKind::PointerIn || k == StageKind::Buffer)
        return PointerWindow{std::max(0, t - 1 - delta_), std::min(m_, t - 1 + delta_)};
    return PointerWindow{std::max(0, t - delta_), std::min(m_, t + delta_)};
}

EventWeights TrellisSpec::event_weights(int p, int t) const {
    const PointerWindow ab = window(4 * (t - 1) + 1);
    const PointerWindow cd = window(4 * (t - 1) + 2);
    const int sigma = alphabet_->size();
    EventWeights w;
    w.ins = p + 1 <= ab.hi;
    w.del = p >= cd.lo;
    w.diag = p + 1 <= m_;
    const bool ins_band_pruned = !w.ins && p + 1 <= m_;
    const bool del_band_pruned = !w.del;
    w.factor = 1.0 / (1.0 - (ins_band_pruned ? params_.pi_i : 0.0) -
                      (del_band_pruned ? params_.pi_d : 0.0));
    w.w_ins = params_.pi_i / sigma * w.factor;
    w.w_del = params_.pi_d * w.factor;
    w.w_ok = params_.pi_correct() * w.factor;
    w.w_sub = params_.pi_s / (sigma - 1) * w.factor;
    return w;
}

std::vector<TrellisState> TrellisSpec::states_at(int stage) const {
    const PointerWindow win = window(stage);
    std::vector<TrellisState> states;
    if (carries_symbol(stage)) {
        states.reserve(static_cast<std::size_t>(win.width()) * alphabet_->size());
        for (int p = win.lo; p <= win.hi; ++p)
            for (int x = 0; x < alphabet_->size(); ++x)
                states.push_back(TrellisState{p, static_cast<Symbol>(x)});
    } else {
        states.reserve(win.width());
        for (int p = win.lo; p <= win.hi; ++p)
            states.push_back(TrellisState{p, std::nullopt});
    }
    return states;
}

std::vector<Branch> TrellisSpec::branches_into(int stage) const {
    std::vector<Branch> out;
    const int t = section_of(stage);
    const StageKind k = kind_of(stage);
    const int sigma = alphabet_->size();
    const PointerWindow win = window(stage);

    if (k == StageKind::PointerIn)
        return out; // boundary or shared with the previous PointerOut stage

    if (k == StageKind::Buffer) {
        const PointerWindow from_win = window(stage - 1);
        for (int p = win.lo; p <= win.hi; ++p) {
            for (int x = 0; x < sigma; ++x) {
                const auto sym = static_cast<Symbol>(x);
                if (from_win.contains(p))
                    out.push_back(Branch{stage - 1, stage, TrellisState{p, std::nullopt},
                                         TrellisState{p, sym}, std::nullopt,
                                         BranchKind::Import, 1.0});
                if (p > win.lo) {
                    const EventWeights w = event_weights(p - 1, t);
                    if (w.ins)
                        for (int e = 0; e < sigma; ++e)
                            out.push_back(Branch{stage, stage, TrellisState{p - 1, sym},
                                                 TrellisState{p, sym},
                                                 static_cast<Symbol>(e), BranchKind::Insert,
                                                 params_.pi_i * w.factor});
                }
            }
        }
        return out;
    }

    if (k == StageKind::Consume) {
        const PointerWindow from_win = window(stage - 1);
        for (int p = win.lo; p <= win.hi; ++p) {
            for (int x = 0; x < sigma; ++x) {
                const auto sym = static_cast<Symbol>(x);
                if (from_win.contains(p)) {
                    const EventWeights w = event_weights(p, t);
                    if (w.del)
                        out.push_back(Branch{stage - 1, stage, TrellisState{p, sym},
                                             TrellisState{p, sym}, std::nullopt,
                                             BranchKind::Delete, w.w_del});
                }
                if (p > 0 && from_win.contains(p - 1)) {
                    const EventWeights w = event_weights(p - 1, t);
                    if (w.diag)
                        for (int e = 0; e < sigma; ++e)
                            out.push_back(Branch{stage - 1, stage, TrellisState{p - 1, sym},
                                                 TrellisState{p, sym},
                                                 static_cast<Symbol>(e),
                                                 BranchKind::TransOrSub,
                                                 e == x ? w.w_ok : w.w_sub});
                }
            }
        }
        return out;
    }

    // Flush into the PointerOut stage.
    for (int p = win.lo; p <= win.hi; ++p)
        for (int x = 0; x < sigma; ++x)
            out.push_back(Branch{stage - 1, stage, TrellisState{p, static_cast<Symbol>(x)},
                                 TrellisState{p, std::nullopt}, std::nullopt,
                                 BranchKind::Flush, 1.0});
    return out;
}

std::uint64_t TrellisSpec::edge_count() const {
    std::uint64_t edges = 0;
    for (int i = 0; i < num_stages(); ++i)
        edges += branches_into(i).size();
    return edges;
}

void TrellisSpec::export_section_edges(int t, std::ostream& os) const {
    auto state_str = [&](const TrellisState& s) {
        std::string str = "(" + std::to_string(s.pointer);
        if (s.buffered)
            str += std::string(",") + alphabet_->char_at(*s.buffered);
        return str + ")";
    };
    static const char* kind_names[] = {"import", "insert", "delete", "trans_or_sub",
                                       "flush"};
    for (int i = 4 * (t - 1); i < 4 * t; ++i) {
        for (const Branch& b : branches_into(i)) {
            os << state_str(b.from) << ' '
               << (b.emission ? std::string(1, alphabet_->char_at(*b.emission)) : "-") << ' '
               << state_str(b.to) << ' ' << kind_names[static_cast<int>(b.kind)];
            char buf[32];
            std::snprintf(buf, sizeof(buf), " %.9g", b.transition_prob);
            os << buf << '\n';
        }
    }
}

} // namespace tracebp
