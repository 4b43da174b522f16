#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isoslope/fcrystal.hpp"

using namespace isoslope;

namespace {

PrecisionProfile prof(int p, int e, int N, int K, long long lo = -4096, long long hi = 64) {
    PrecisionProfile pr;
    pr.ring = CoeffRing{p, e, N};
    pr.K = K;
    pr.t_lo = Rat(lo);
    pr.t_hi = Rat(hi);
    return pr;
}

Series mono(const PrecisionProfile& pr, const Rat& e, long long c) {
    return Series::monomial(pr, e, Coeff(pr.ring, c));
}

FModule module(const PrecisionProfile& pr, SeriesMat a, RingClaim claim = RingClaim::omega) {
    FModule m;
    m.rank = (int)a.size();
    m.A = std::move(a);
    m.claim = claim;
    m.validate();
    return m;
}

// the standard unipotent-by-twist extension [[1, t],[0, p]]
FModule dwork_example(const PrecisionProfile& pr) {
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 1);
    a[0][1] = mono(pr, Rat(1), 1);
    a[1][1] = Series::constant(pr, Coeff(pr.ring, pr.ring.p));
    return module(pr, a);
}

} // namespace

TEST_CASE("constant-at-zero conjugation recovers the classical unit root series") {
    auto pr = prof(2, 1, 12, 0, -16, 16);
    FModule m = dwork_example(pr);
    auto d = dwork_trick(m, 9);
    // off-diagonal entry u with p*u = u^sigma + t: u = t/p + t^p/p^2 + t^(p^2)/p^3
    CHECK(d.denom[1] == 1);
    CHECK(d.coeffs[1][0][1] == Coeff::one(pr.ring));
    CHECK(d.denom[2] == 2);
    CHECK(d.coeffs[2][0][1] == Coeff::one(pr.ring));
    CHECK(d.coeffs[3][0][1].is_zero());
    CHECK(d.denom[4] == 3);
    CHECK(d.coeffs[4][0][1] == Coeff::one(pr.ring));
    CHECK(d.denom[8] == 4);
    CHECK(d.max_denom == 4);
    // diagonal stays the identity
    CHECK(d.coeffs[0][0][0] == Coeff::one(pr.ring));
    for (int m2 = 1; m2 < 9; ++m2) CHECK(d.coeffs[m2][0][0].is_zero());
    CHECK(d.verify(m) >= pr.ring.N - d.max_denom);
    CHECK(d.entry_str(0, 1, pr).find("pi^-1") != std::string::npos);
}

TEST_CASE("unit-root rank one: binary partition coefficients, no denominators") {
    auto pr = prof(2, 1, 8, 0, -8, 8);
    SeriesMat a{{mono(pr, Rat(0), 1) + mono(pr, Rat(1), 1)}}; // 1 + t
    auto d = dwork_trick(module(pr, a), 8);
    // U = prod_k (1 + t^(2^k)): every coefficient is 1 (binary expansions are unique)
    for (int m = 0; m < 8; ++m) {
        CHECK(d.denom[m] == 0);
        CHECK(d.coeffs[m][0][0] == Coeff::one(pr.ring));
    }
    CHECK(d.verify(module(pr, a)) >= pr.ring.N);
}

TEST_CASE("denominator growth against the precision budget") {
    auto pr = prof(2, 1, 5, 0, -8, 8);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 1);
    a[0][1] = mono(pr, Rat(1), 1);
    a[1][1] = Series::constant(pr, Coeff(pr.ring, 4)); // u = t/4 + t^2/16 + ...
    CHECK_THROWS_AS(dwork_trick(module(pr, a), 8), Error);
}

TEST_CASE("degenerate inputs for the conjugation") {
    auto pr = prof(2, 1, 6, 0, -4, 4);
    SeriesMat a{{mono(pr, Rat(1), 1)}};
    CHECK_THROWS_AS(dwork_trick(module(pr, a), 3), Error); // A(0) = 0
    SeriesMat b{{mono(pr, Rat(0), 1)}};
    CHECK_THROWS_AS(dwork_trick(module(pr, b), 9), Error); // t-window too small
}

TEST_CASE("pole-part/positive-part factorization") {
    auto pr = prof(2, 1, 8, 1, -32, 32);
    auto check_shape = [&](const Series& d) {
        auto ef = ef_factorize(d);
        CHECK((ef.e * ef.f - d).is_zero());
        CHECK(ef.f.part_constant() == Coeff::one(pr.ring));
        CHECK(ef.f.part_negative().is_zero());
        for (const auto& [ex, c] : ef.e.monomials()) CHECK(ex <= Rat(0));
        CHECK(ef.e.claim() == RingClaim::gamma_con);
    };
    check_shape(mono(pr, Rat(0), 1) + mono(pr, Rat(-1), 1));            // pure pole side
    check_shape(mono(pr, Rat(0), 1) + mono(pr, Rat(1), 1));             // pure tail side
    check_shape(mono(pr, Rat(0), 1) + mono(pr, Rat(1), 2) + mono(pr, Rat(-1), 2));
    check_shape(mono(pr, Rat(0), 1) + mono(pr, Rat(-1, 2), 2) + mono(pr, Rat(3), 6));
    CHECK_THROWS_AS(ef_factorize(mono(pr, Rat(1), 2)), Error);          // Gauss valuation 1
    CHECK_THROWS_AS(ef_factorize(Series::zero(pr)), Error);
}

TEST_CASE("descending a twisted line to the polynomial side") {
    auto pr = prof(2, 1, 8, 0, -32, 32);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 1);
    a[1][1] = mono(pr, Rat(0), 2);
    FModule m = module(pr, a);
    // v = (1 + p t^-1) e2: an eigenvector over Gamma_con, unit e-factor divides out
    SeriesVec v{Series::zero(pr), mono(pr, Rat(0), 1) + mono(pr, Rat(-1), 2)};
    auto sd = descend_submodule(m, v);
    CHECK(sd.direct_summand);
    CHECK(sd.isogeny_power == 0);
    CHECK(sd.generator[1].part_constant().is_unit());
    CHECK(sd.eigenvalue.gauss_val() == 1); // a slope-1 line
    CHECK((sd.eigenvalue - Series::constant(pr, Coeff(pr.ring, 2))).is_zero());
    CHECK(sd.residual_val >= pr.ring.N);
    // the descended eigen relation is exact: A g^sigma = k g
    SeriesVec lhs = mat_vec(m.A, vec_frobenius(sd.generator, 1));
    SeriesVec rhs = sd.generator;
    for (auto& s : rhs) s = s * sd.eigenvalue;
    CHECK(vec_is_zero(vec_sub(lhs, rhs)));
    // global pi content counts toward the isogeny
    auto sd2 = descend_submodule(m, vec_scalar(v, Coeff(pr.ring, 2)));
    CHECK(sd2.isogeny_power == 1);
    // not an eigenvector at all
    SeriesVec bad{mono(pr, Rat(0), 1), mono(pr, Rat(0), 1)};
    CHECK_THROWS_AS(descend_submodule(m, bad), Error);
}

TEST_CASE("descent through an isogeny when no integral complement exists") {
    auto pr = prof(2, 1, 10, 0, -64, 8);
    FModule m = dwork_example(pr);
    // pi^4 * (u, 1) with u = t/2 + t^2/4 + t^4/8 + t^8/16: exact in-window eigenvector
    Series g0 = mono(pr, Rat(1), 8) + mono(pr, Rat(2), 4) + mono(pr, Rat(4), 2) + mono(pr, Rat(8), 1);
    SeriesVec v{g0, Series::constant(pr, Coeff(pr.ring, 16))};
    CHECK(eigen_residual(m.A, v, Coeff(pr.ring, 2)) >= pr.ring.N);
    auto sd = descend_submodule(m, v);
    CHECK(!sd.direct_summand); // only isogenous to a direct factor
    CHECK((sd.eigenvalue - Series::constant(pr, Coeff(pr.ring, 2))).is_zero());
    CHECK(sd.residual_val >= pr.ring.N);
}

TEST_CASE("extension with constant class splits integrally") {
    auto pr = prof(2, 1, 10, 0);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 2);
    a[0][1] = mono(pr, Rat(0), 1);
    a[1][1] = mono(pr, Rat(0), 1);
    FModule m = module(pr, a, RingClaim::gamma_con);
    SeriesVec e1{Series::constant(pr, Coeff::one(pr.ring)), Series::zero(pr)};
    auto r = split_extension(m, e1);
    CHECK(r.split);
    CHECK(r.isogeny_power == 0);
    CHECK(r.sub_slopes.slopes == std::vector<Rat>{Rat(1)});
    CHECK(r.quot_slopes.slopes == std::vector<Rat>{Rat(0)});
    // the complement is honestly F-fixed: p d^sigma - d = -1 gives d = 1
    REQUIRE(r.complement.size() == 2);
    CHECK(eigen_residual(m.A, r.complement, Coeff::one(pr.ring)) >= pr.ring.N);
    CHECK((r.d - Series::constant(pr, Coeff::one(pr.ring))).is_zero());
}

TEST_CASE("extension with a pole class only splits after leaving the overconvergent ring") {
    auto pr = prof(2, 1, 10, 0, -4096, 8);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 2);
    a[0][1] = mono(pr, Rat(-1), 1);
    a[1][1] = mono(pr, Rat(0), 1);
    FModule m = module(pr, a, RingClaim::gamma);
    SeriesVec e1{Series::constant(pr, Coeff::one(pr.ring)), Series::zero(pr)};
    auto r = split_extension(m, e1);
    CHECK(!r.split);
    CHECK(r.diagnostic.find("Gamma_con") != std::string::npos);
    // d = -(t^-1 + p t^-p + ...): correct Gamma solution, no overconvergence witness
    CHECK(r.d.coeff_at(Rat(-1)) == Coeff(pr.ring, -1));
    CHECK(r.d.coeff_at(Rat(-2)) == Coeff(pr.ring, -2));
    CHECK(!r.witness.has_value());
}

TEST_CASE("splitting requires the sub slope on top") {
    auto pr = prof(2, 1, 8, 0);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 1);
    a[1][1] = mono(pr, Rat(0), 2);
    SeriesVec e1{Series::constant(pr, Coeff::one(pr.ring)), Series::zero(pr)};
    CHECK_THROWS_AS(split_extension(module(pr, a, RingClaim::gamma_con), e1), Error);
}

TEST_CASE("two-slope descent with a polynomial class") {
    auto pr = prof(2, 1, 8, 0, -64, 16);
    SeriesMat h = mat_zero(pr, 2, 2);
    h[0][0] = mono(pr, Rat(0), 2);
    h[0][1] = mono(pr, Rat(1), 1); // c = t
    h[1][1] = mono(pr, Rat(0), 1);
    MorphismCandidate f;
    f.source = module(pr, h, RingClaim::gamma);
    f.target = f.source;
    f.f = mat_identity(pr, 2);
    // the compatible connection: b = -(t + 4 t^2 + 16 t^4 + 64 t^8)
    Series b = -(mono(pr, Rat(1), 1) + mono(pr, Rat(2), 4) + mono(pr, Rat(4), 16) +
                 mono(pr, Rat(8), 64));
    NablaStructure nab{mat_zero(pr, 2, 2)};
    nab.G[0][1] = b;
    auto r = descend_morphism_twoslope(f, nab);
    CHECK(r.ok);
    CHECK(r.d.coeff_at(Rat(1)) == Coeff(pr.ring, 1));
    CHECK(r.d.coeff_at(Rat(2)) == Coeff(pr.ring, 2));
    CHECK((r.b - b).is_zero());
    CHECK((r.d.nabla() + r.b).is_zero());
    CHECK(r.witness_d.has_value());
    REQUIRE(r.morphism.eigenvalue.has_value());
    CHECK(*r.morphism.eigenvalue == Coeff::one(pr.ring));

    // a connection that disagrees with the unique derived solution is rejected
    NablaStructure wrong{mat_zero(pr, 2, 2)};
    wrong.G[0][1] = b + mono(pr, Rat(1), 1);
    CHECK_THROWS_AS(descend_morphism_twoslope(f, wrong), Error);
}

TEST_CASE("two-slope descent reports honest failure for a pole class") {
    // N = 12 so the represented pole data of d drops below the witness threshold
    auto pr = prof(2, 1, 12, 0, -4096, 8);
    SeriesMat h = mat_zero(pr, 2, 2);
    h[0][0] = mono(pr, Rat(0), 2);
    h[0][1] = mono(pr, Rat(-1), 1); // c = t^-1
    h[1][1] = mono(pr, Rat(0), 1);
    MorphismCandidate f;
    f.source = module(pr, h, RingClaim::gamma);
    f.target = f.source;
    f.f = mat_identity(pr, 2);
    // b = nabla-side solution: 4 b^sigma - b = nabla(c) = -t^-1
    Series b = mono(pr, Rat(-1), 1) + mono(pr, Rat(-2), 4) + mono(pr, Rat(-4), 16) +
               mono(pr, Rat(-8), 64) + mono(pr, Rat(-16), 256) + mono(pr, Rat(-32), 1024);
    NablaStructure nab{mat_zero(pr, 2, 2)};
    nab.G[0][1] = b;
    auto r = descend_morphism_twoslope(f, nab);
    CHECK(!r.ok);
    CHECK(!r.diagnostic.empty());
    CHECK(!r.witness_d.has_value());
    CHECK(r.d.coeff_at(Rat(-1)) == Coeff(pr.ring, 1));
}

TEST_CASE("two-slope descent trivial branch and rank guard") {
    auto pr = prof(2, 1, 8, 0);
    SeriesMat h = mat_zero(pr, 2, 2);
    h[0][0] = mono(pr, Rat(0), 1);
    h[0][1] = mono(pr, Rat(1), 3);
    h[1][1] = mono(pr, Rat(0), 2);
    MorphismCandidate f;
    f.source = module(pr, h, RingClaim::gamma);
    f.target = f.source;
    f.f = mat_identity(pr, 2);
    NablaStructure nab{mat_zero(pr, 2, 2)};
    auto r = descend_morphism_twoslope(f, nab); // v(lam) < v(mu): already descended
    CHECK(r.ok);
    CHECK(r.d.is_zero());

    MorphismCandidate big;
    big.source = module(pr, mat_identity(pr, 3), RingClaim::gamma);
    big.target = big.source;
    big.f = mat_identity(pr, 3);
    CHECK_THROWS_AS(descend_morphism_twoslope(big, nab), Error);
}

TEST_CASE("full descent report on a split diagonal") {
    auto pr = prof(2, 1, 8, 0);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 1);
    a[1][1] = mono(pr, Rat(0), 2);
    FModule m = module(pr, a);
    SeriesVec v{Series::zero(pr), Series::constant(pr, Coeff::one(pr.ring))};
    auto rep = descend_morphism_omega(m, v, Coeff(pr.ring, 2));
    CHECK(rep.ok);
    REQUIRE(rep.steps.size() == 5);
    for (const auto& st : rep.steps) CHECK(st.ok);
    CHECK(rep.descended.size() == 2);
}

TEST_CASE("descent report stops at a repeated extremal slope") {
    auto pr = prof(2, 1, 8, 0);
    SeriesMat a = mat_zero(pr, 3, 3);
    a[0][0] = mono(pr, Rat(0), 1);
    a[1][1] = mono(pr, Rat(0), 2);
    a[2][2] = mono(pr, Rat(0), 2);
    FModule m = module(pr, a);
    SeriesVec v{Series::zero(pr), Series::constant(pr, Coeff::one(pr.ring)), Series::zero(pr)};
    auto rep = descend_morphism_omega(m, v, Coeff(pr.ring, 2));
    CHECK(!rep.ok);
    REQUIRE(rep.steps.size() >= 2);
    CHECK(rep.steps[0].ok);
    CHECK(!rep.steps[1].ok);
}

TEST_CASE("kernel analysis of an extremal-eigenvalue functional") {
    auto pr = prof(2, 1, 8, 0);
    SeriesMat a = mat_zero(pr, 2, 2);
    a[0][0] = mono(pr, Rat(0), 1);
    a[1][1] = mono(pr, Rat(0), 2);
    FModule m = module(pr, a, RingClaim::gamma_con);
    SeriesVec top{Series::zero(pr), Series::constant(pr, Coeff::one(pr.ring))};
    auto k = morphism_kernel_analysis(m, top, Coeff(pr.ring, 2), true);
    CHECK(k.slope == Rat(1));
    CHECK(k.multiplicity_one);
    CHECK(k.generator[1].part_constant() == Coeff::one(pr.ring));
    SeriesVec bot{Series::constant(pr, Coeff::one(pr.ring)), Series::zero(pr)};
    auto k2 = morphism_kernel_analysis(m, bot, Coeff::one(pr.ring), false);
    CHECK(k2.slope == Rat(0));
    // wrong extremality mode
    CHECK_THROWS_AS(morphism_kernel_analysis(m, bot, Coeff::one(pr.ring), true), Error);
    // repeated slope
    SeriesMat a3 = mat_zero(pr, 3, 3);
    a3[0][0] = mono(pr, Rat(0), 1);
    a3[1][1] = mono(pr, Rat(0), 1);
    a3[2][2] = mono(pr, Rat(0), 2);
    SeriesVec phi3{Series::constant(pr, Coeff::one(pr.ring)), Series::zero(pr), Series::zero(pr)};
    CHECK_THROWS_AS(
        morphism_kernel_analysis(module(pr, a3, RingClaim::gamma_con), phi3, Coeff::one(pr.ring), false),
        Error);
}
