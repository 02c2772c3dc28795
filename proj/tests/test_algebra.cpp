#include <doctest.h>

#include "maxplus/algebra.hpp"
#include "maxplus/rng.hpp"

using namespace maxplus;

TEST_CASE("idempotency and identities") {
    const MaxPlusScalar a(1.5), zero = MaxPlusScalar::zero(), one = MaxPlusScalar::one();
    CHECK(oplus(a, a) == a);
    CHECK(oplus(a, zero) == a);
    CHECK(oplus(zero, a) == a);
    CHECK(otimes(a, zero) == zero);
    CHECK(otimes(zero, a) == zero);
    CHECK(otimes(a, one) == a);
    CHECK(zero.is_zero());
    CHECK(!a.is_zero());
}

TEST_CASE("no NaN from the additive identity") {
    const MaxPlusScalar zero = MaxPlusScalar::zero();
    const MaxPlusScalar big(kPlusInf);
    const MaxPlusScalar prod = otimes(zero, big);  // naive -inf + inf would be NaN
    CHECK(prod.is_zero());
    CHECK(!std::isnan(prod.value()));
}

TEST_CASE("commutativity, associativity, distributivity on random values") {
    Rng rng(7, 0);
    for (int it = 0; it < 500; ++it) {
        // dyadic draws keep ordinary + exact so the ring laws hold bit for bit
        auto draw = [&]() {
            if (rng.uniform() < 0.15) return MaxPlusScalar::zero();
            return MaxPlusScalar((rng.uniform_int(641) - 320) / 32.0);
        };
        const MaxPlusScalar a = draw(), b = draw(), c = draw();
        CHECK(oplus(a, b) == oplus(b, a));
        CHECK(oplus(oplus(a, b), c) == oplus(a, oplus(b, c)));
        CHECK(otimes(a, b) == otimes(b, a));
        CHECK(otimes(otimes(a, b), c) == otimes(a, otimes(b, c)));
        // distributivity: a (x) (b (+) c) = (a (x) b) (+) (a (x) c)
        CHECK(otimes(a, oplus(b, c)) == oplus(otimes(a, b), otimes(a, c)));
    }
}
