#include <cmath>

#include "doctest.h"
#include "tracebp/errors.hpp"
#include "tracebp/rng.hpp"
#include "tracebp/symbol_dist.hpp"

using namespace tracebp;

namespace {

SymbolDist random_dist(Rng& rng, int size) {
    SymbolDist d(size);
    for (int i = 0; i < size; ++i)
        d[i] = rng.next_double() + 1e-3;
    return normalize(d);
}

} // namespace

TEST_CASE("normalize basic examples") {
    SymbolDist u = normalize(SymbolDist{1, 1, 1, 1});
    for (int i = 0; i < 4; ++i)
        CHECK(u[i] == doctest::Approx(0.25));

    SymbolDist d = normalize(SymbolDist{2, 0, 0, 0});
    CHECK(d[0] == doctest::Approx(1.0));
    CHECK(d[1] == 0.0);

    SymbolDist already{0.3, 0.1, 0.1, 0.5};
    SymbolDist same = normalize(already);
    for (int i = 0; i < 4; ++i)
        CHECK(same[i] == doctest::Approx(already[i]).epsilon(1e-12));
}

TEST_CASE("normalize rejects all-zero mass") {
    CHECK_THROWS_AS(normalize(SymbolDist{0, 0, 0, 0}), ZeroMassError);
    CHECK_THROWS_AS(normalize(SymbolDist{0, -1, 0, 0}), ZeroMassError);
}

TEST_CASE("normalize is idempotent and scale invariant") {
    Rng rng(7);
    for (int round = 0; round < 50; ++round) {
        SymbolDist d(4);
        for (int i = 0; i < 4; ++i)
            d[i] = rng.next_double();
        const double c = rng.next_double() * 10 + 0.1;
        SymbolDist scaled(4);
        for (int i = 0; i < 4; ++i)
            scaled[i] = c * d[i];
        SymbolDist a = normalize(d);
        SymbolDist b = normalize(scaled);
        SymbolDist again = normalize(a);
        for (int i = 0; i < 4; ++i) {
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
            CHECK(a[i] == doctest::Approx(again[i]).epsilon(1e-12));
        }
        CHECK(argmax_symbol(a) == argmax_symbol(d));
    }
}

TEST_CASE("tv_distance examples") {
    SymbolDist a{1, 0, 0, 0};
    SymbolDist b{0, 1, 0, 0};
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, b) == 1.0);

    // Half the absolute difference summed over the four entries:
    // 2*|0.5-0.25| + 2*|0-0.25| = 1, so the distance is 0.5.
    SymbolDist half{0.5, 0.5, 0, 0};
    CHECK(tv_distance(half, SymbolDist::uniform(4)) == doctest::Approx(0.5));
}

TEST_CASE("tv_distance rejects unnormalized input") {
    CHECK_THROWS_AS(tv_distance(SymbolDist{1, 1, 0, 0}, SymbolDist::uniform(4)),
                    ContractError);
}

TEST_CASE("tv_distance symmetry and triangle inequality") {
    Rng rng(11);
    for (int round = 0; round < 200; ++round) {
        SymbolDist a = random_dist(rng, 4);
        SymbolDist b = random_dist(rng, 4);
        SymbolDist c = random_dist(rng, 4);
        CHECK(tv_distance(a, b) == doctest::Approx(tv_distance(b, a)).epsilon(1e-12));
        CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
    }
}

TEST_CASE("argmax tie-breaking is lexicographic") {
    CHECK(argmax_symbol(SymbolDist{0.1, 0.7, 0.1, 0.1}) == 1);
    CHECK(argmax_symbol(SymbolDist::uniform(4)) == 0);
    CHECK(argmax_symbol(SymbolDist{0.4, 0.4, 0.1, 0.1}) == 0);
}
