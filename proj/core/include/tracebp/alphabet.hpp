#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tracebp {

/// Index of a symbol within an Alphabet.
using Symbol = std::uint8_t;

/// Ordered set of distinct channel symbols. Symbol values used throughout
/// the library are indices into this ordering.
class Alphabet {
public:
    /// Builds an alphabet from its character list. Requires at least two
    /// distinct characters.
    explicit Alphabet(std::string_view chars);

    /// The default DNA alphabet {A,C,G,T}.
    static const Alphabet& dna();
    /// Binary alphabet {0,1}, handy for small exact tests.
    static const Alphabet& binary();

    int size() const { return static_cast<int>(chars_.size()); }
    char char_at(Symbol s) const { return chars_[s]; }

    /// Index of a character, or nullopt if it is not in the alphabet.
    std::optional<Symbol> index_of(char c) const;

    const std::string& chars() const { return chars_; }

    bool operator==(const Alphabet& other) const { return chars_ == other.chars_; }

private:
    std::string chars_;
    std::array<std::int16_t, 256> lookup_{};
};

/// Sequence written into the channel; entries are alphabet indices.
struct SourceSequence {
    std::vector<Symbol> symbols;

    int length() const { return static_cast<int>(symbols.size()); }
    bool operator==(const SourceSequence&) const = default;
};

/// One noisy channel output attributed to a source sequence.
struct Trace {
    std::vector<Symbol> symbols;

    int length() const { return static_cast<int>(symbols.size()); }
    bool operator==(const Trace&) const = default;
};

/// K traces attributed to one (possibly known) source sequence.
struct Cluster {
    std::vector<Trace> traces;
    std::optional<SourceSequence> reference;

    int size() const { return static_cast<int>(traces.size()); }
};

/// Parses an uppercase string into symbol indices. Throws ContractError on
/// characters outside the alphabet.
std::vector<Symbol> parse_symbols(std::string_view text, const Alphabet& alphabet);

/// Renders symbol indices as their alphabet characters.
std::string format_symbols(const std::vector<Symbol>& symbols, const Alphabet& alphabet);

SourceSequence parse_source(std::string_view text, const Alphabet& alphabet);
Trace parse_trace(std::string_view text, const Alphabet& alphabet);

} // namespace tracebp
