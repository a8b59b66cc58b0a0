#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "tracebp/alphabet.hpp"

namespace tracebp {

/// Probability vector over the alphabet for one input position. Holds
/// linear-domain masses; most call sites keep it normalized.
class SymbolDist {
public:
    SymbolDist() = default;
    explicit SymbolDist(int size) : mass_(static_cast<std::size_t>(size), 0.0) {}
    SymbolDist(std::initializer_list<double> init) : mass_(init) {}
    explicit SymbolDist(std::vector<double> mass) : mass_(std::move(mass)) {}

    static SymbolDist uniform(int size);
    /// All mass on one symbol.
    static SymbolDist delta(int size, Symbol s);

    int size() const { return static_cast<int>(mass_.size()); }
    double operator[](std::size_t i) const { return mass_[i]; }
    double& operator[](std::size_t i) { return mass_[i]; }

    double sum() const;
    bool is_normalized(double tol = 1e-9) const;

    const std::vector<double>& mass() const { return mass_; }

private:
    std::vector<double> mass_;
};

/// Rescales so the entries sum to 1. Throws ZeroMassError on all-zero input
/// (or any NaN), which signals numerical collapse upstream.
SymbolDist normalize(const SymbolDist& d);

/// Total variation distance 0.5 * sum |a_i - b_i|. Requires both inputs
/// normalized (ContractError otherwise).
double tv_distance(const SymbolDist& a, const SymbolDist& b);

/// Index of the largest mass; ties break toward the smallest alphabet index.
Symbol argmax_symbol(const SymbolDist& d);

} // namespace tracebp
