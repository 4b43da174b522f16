#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isoslope/coeff.hpp"

using namespace isoslope;

static CoeffRing R(int p, int e, int N) { return CoeffRing{p, e, N}; }

TEST_CASE("base-p digit canonical form") {
    CoeffRing r = R(3, 1, 6);
    Coeff a(r, 7); // 7 = 1 + 2*3
    CHECK(a.digit(0) == 1);
    CHECK(a.digit(1) == 2);
    CHECK(a.str() == "1+2*pi");
    CHECK(Coeff(r, 0).is_zero());
    CHECK(Coeff(r, 27).val() == 3);
}

TEST_CASE("carries propagate e slots when pi^e = p") {
    CoeffRing r = R(2, 2, 8);
    Coeff two(r, 2); // p = pi^2
    CHECK(two.val() == 2);
    CHECK(two.str() == "pi^2");
    Coeff s = Coeff(r, 1) + Coeff(r, 1);
    CHECK(s == two);
}

TEST_CASE("arithmetic matches integer arithmetic mod p^N") {
    CoeffRing r = R(5, 1, 4); // mod 5^4 = 625
    for (long long a : {0LL, 3LL, 124LL, 601LL})
        for (long long b : {1LL, 7LL, 99LL, 624LL}) {
            CHECK(Coeff(r, a) + Coeff(r, b) == Coeff(r, (a + b) % 625));
            CHECK(Coeff(r, a) * Coeff(r, b) == Coeff(r, (a * b) % 625));
            CHECK(Coeff(r, a) - Coeff(r, b) == Coeff(r, ((a - b) % 625 + 625) % 625));
        }
}

TEST_CASE("units invert exactly") {
    CoeffRing r = R(3, 2, 10);
    for (long long v : {1LL, 2LL, 4LL, 7LL, 100LL}) {
        Coeff a(r, v);
        if (!a.is_unit()) continue;
        CHECK(a * a.inv() == Coeff::one(r));
    }
    CHECK_THROWS_AS(Coeff(r, 3).inv(), Error);
}

TEST_CASE("pi shifts and exact division") {
    CoeffRing r = R(2, 3, 9); // pi^3 = 2
    Coeff a(r, 4);            // pi^6
    CHECK(a.val() == 6);
    CHECK(a.pi_shift(-6) == Coeff::one(r));
    CHECK_THROWS_AS(Coeff(r, 1).pi_shift(-1), Error);
    Coeff b = Coeff::pi_pow(r, 2, 3); // 3*pi^2
    CHECK(div_exact(b, Coeff::pi_pow(r, 2)) == Coeff(r, 3));
}

TEST_CASE("ring validation") {
    CHECK_THROWS_AS(R(4, 1, 4).validate(), Error);   // not prime
    CHECK_THROWS_AS(R(101, 1, 4).validate(), Error); // too large
    CHECK_THROWS_AS(R(2, 0, 4).validate(), Error);
    CHECK_THROWS_AS(R(2, 1, 0).validate(), Error);
    CHECK_NOTHROW(R(97, 6, 256).validate());
}

TEST_CASE("mod_inverse") {
    for (int p : {2, 3, 5, 7, 97})
        for (int u = 1; u < p; ++u) CHECK((u * mod_inverse(u, p)) % p == 1);
}
