#include "tracebp/symbol_dist.hpp"

#include <cmath>

#include "tracebp/errors.hpp"

namespace tracebp {

SymbolDist SymbolDist::uniform(int size) {
    SymbolDist d(size);
    const double p = 1.0 / size;
    for (int i = 0; i < size; ++i)
        d[i] = p;
    return d;
}

SymbolDist SymbolDist::delta(int size, Symbol s) {
    SymbolDist d(size);
    d[s] = 1.0;
    return d;
}

double SymbolDist::sum() const {
    double total = 0.0;
    for (double m : mass_)
        total += m;
    return total;
}

bool SymbolDist::is_normalized(double tol) const {
    for (double m : mass_)
        if (!(m >= 0.0))
            return false;
    return std::abs(sum() - 1.0) <= tol;
}

SymbolDist normalize(const SymbolDist& d) {
    double total = 0.0;
    for (int i = 0; i < d.size(); ++i) {
        if (std::isnan(d[i]) || d[i] < 0.0)
            throw ZeroMassError("distribution has NaN or negative mass");
        total += d[i];
    }
    if (total <= 0.0)
        throw ZeroMassError("cannot normalize all-zero mass");
    SymbolDist out(d.size());
    for (int i = 0; i < d.size(); ++i)
        out[i] = d[i] / total;
    return out;
}

double tv_distance(const SymbolDist& a, const SymbolDist& b) {
    if (a.size() != b.size())
        throw ContractError("tv_distance: size mismatch");
    if (!a.is_normalized() || !b.is_normalized())
        throw ContractError("tv_distance: inputs must be normalized");
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i)
        acc += std::abs(a[i] - b[i]);
    return 0.5 * acc;
}

Symbol argmax_symbol(const SymbolDist& d) {
    int best = 0;
    for (int i = 1; i < d.size(); ++i)
        if (d[i] > d[best])
            best = i;
    return static_cast<Symbol>(best);
}

} // namespace tracebp
