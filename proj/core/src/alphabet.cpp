#include "tracebp/alphabet.hpp"

#include <array>

#include "tracebp/errors.hpp"

namespace tracebp {

Alphabet::Alphabet(std::string_view chars) : chars_(chars) {
    if (chars_.size() < 2)
        throw ContractError("alphabet needs at least two symbols");
    if (chars_.size() > 255)
        throw ContractError("alphabet too large");
    lookup_.fill(-1);
    for (std::size_t i = 0; i < chars_.size(); ++i) {
        auto c = static_cast<unsigned char>(chars_[i]);
        if (lookup_[c] >= 0)
            throw ContractError("alphabet symbols must be distinct");
        lookup_[c] = static_cast<std::int16_t>(i);
    }
}

const Alphabet& Alphabet::dna() {
    static const Alphabet a("ACGT");
    return a;
}

const Alphabet& Alphabet::binary() {
    static const Alphabet a("01");
    return a;
}

std::optional<Symbol> Alphabet::index_of(char c) const {
    std::int16_t i = lookup_[static_cast<unsigned char>(c)];
    if (i < 0)
        return std::nullopt;
    return static_cast<Symbol>(i);
}

std::vector<Symbol> parse_symbols(std::string_view text, const Alphabet& alphabet) {
    std::vector<Symbol> out;
    out.reserve(text.size());
    for (char c : text) {
        auto s = alphabet.index_of(c);
        if (!s)
            throw ContractError(std::string("symbol outside alphabet: '") + c + "'");
        out.push_back(*s);
    }
    return out;
}

std::string format_symbols(const std::vector<Symbol>& symbols, const Alphabet& alphabet) {
    std::string out;
    out.reserve(symbols.size());
    for (Symbol s : symbols)
        out.push_back(alphabet.char_at(s));
    return out;
}

SourceSequence parse_source(std::string_view text, const Alphabet& alphabet) {
    return SourceSequence{parse_symbols(text, alphabet)};
}

Trace parse_trace(std::string_view text, const Alphabet& alphabet) {
    return Trace{parse_symbols(text, alphabet)};
}

} // namespace tracebp
