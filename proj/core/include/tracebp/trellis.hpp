#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tracebp/alphabet.hpp"
#include "tracebp/channel.hpp"

namespace tracebp {

/// Sentinel drift bound: let the callee pick (decoders use the banded
/// default below, exact reference decoders use unpruned windows).
inline constexpr int kAutoDelta = -1;

/// Banded drift bound heuristic for a decode at the given length and rates,
/// clamped to stay below the input length.
int default_drift_bound(int n, const ChannelParams& params);

/// Role of a trellis stage inside its four-stage section. Section t covers
/// stages 4(t-1) .. 4t-1: a pointer-only stage, the buffered stage where the
/// input symbol is imported and insertions accumulate, the post-consume
/// stage, and the pointer-only stage that opens the next section.
enum class StageKind : std::uint8_t { PointerIn, Buffer, Consume, PointerOut };

enum class BranchKind : std::uint8_t { Import, Insert, Delete, TransOrSub, Flush };

/// State at one stage: the output pointer (symbols of the trace accounted
/// for so far) and, at Buffer/Consume stages, the buffered input symbol.
struct TrellisState {
    int pointer = 0;
    std::optional<Symbol> buffered;

    bool operator==(const TrellisState&) const = default;
};

struct Branch {
    int from_stage = 0;
    int to_stage = 0;
    TrellisState from;
    TrellisState to;
    std::optional<Symbol> emission;
    BranchKind kind = BranchKind::Import;
    double transition_prob = 0.0;
};

/// Inclusive pointer range admitted at a stage.
struct PointerWindow {
    int lo = 0;
    int hi = -1;
    int width() const { return hi - lo + 1; }
    bool contains(int p) const { return p >= lo && p <= hi; }
};

/// Survivorship and weights of the event branches out of one Buffer-stage
/// state. Band-pruned event mass (insertion cut at the window top while the
/// trace continues, deletion cut at the window bottom) is renormalized over
/// the surviving branches; the structural zeros at pointer = trace length
/// are part of the exact channel law and stay as they are.
struct EventWeights {
    bool ins = false;
    bool del = false;
    bool diag = false;
    double factor = 1.0; // renormalization over surviving events
    double w_ins = 0.0;  // pi_i * factor / sigma, observation weight included
    double w_del = 0.0;  // pi_d * factor
    double w_ok = 0.0;   // correct-transmission weight * factor
    double w_sub = 0.0;  // per-substitution-branch weight * factor
};

/// Pointer-based per-trace trellis: dimensions, drift windows, and branch
/// structure. The section template is periodic in t; only windows differ,
/// so states and branches are generated on demand.
class TrellisSpec {
public:
    /// Throws UnreachableTerminal when the trace length cannot be reached
    /// under the drift bound, ContractError on invalid arguments.
    TrellisSpec(int n, int trace_length, int delta, const Alphabet& alphabet,
                const ChannelParams& params);

    int input_length() const { return n_; }
    int trace_length() const { return m_; }
    int delta() const { return delta_; }
    const Alphabet& alphabet() const { return *alphabet_; }
    const ChannelParams& params() const { return params_; }

    int num_stages() const { return 4 * n_; }
    /// Input position t in 1..n of stage i.
    int section_of(int stage) const { return stage / 4 + 1; }
    StageKind kind_of(int stage) const { return static_cast<StageKind>(stage % 4); }
    bool carries_symbol(int stage) const {
        auto k = kind_of(stage);
        return k == StageKind::Buffer || k == StageKind::Consume;
    }

    PointerWindow window(int stage) const;

    /// Event branch weights out of Buffer-stage state (p, .) of section t.
    EventWeights event_weights(int p, int t) const;

    std::vector<TrellisState> states_at(int stage) const;

    /// All branches terminating at `stage`, including the within-stage
    /// insertion branches of Buffer stages. Parallel branches are listed
    /// one per emission label, as drawn in the channel model. PointerIn
    /// stages of sections t >= 2 share their state with the PointerOut
    /// stage before them and have no branches of their own.
    std::vector<Branch> branches_into(int stage) const;

    /// Number of labeled branches over the whole trellis.
    std::uint64_t edge_count() const;

    /// Line-oriented dump of one section's branches for golden-file tests.
    void export_section_edges(int t, std::ostream& os) const;

private:
    int n_;
    int m_;
    int delta_;
    const Alphabet* alphabet_;
    ChannelParams params_;
};

} // namespace tracebp
