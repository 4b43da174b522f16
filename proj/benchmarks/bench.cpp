#include <benchmark/benchmark.h>

#include "isoslope/fcrystal.hpp"
#include "isoslope/sigma_solve.hpp"

using namespace isoslope;

namespace {

PrecisionProfile prof(int p, int e, int N, int K, long long lo = -1024, long long hi = 64) {
    PrecisionProfile pr;
    pr.ring = CoeffRing{p, e, N};
    pr.K = K;
    pr.t_lo = Rat(lo);
    pr.t_hi = Rat(hi);
    return pr;
}

Series dense_series(const PrecisionProfile& pr, int terms, int stride) {
    Series s = Series::zero(pr, RingClaim::gamma);
    for (int k = 0; k < terms; ++k)
        s.add_monomial(Rat(-k * stride), Coeff(pr.ring, 1 + (k * 7 + 3) % 11));
    return s;
}

void bm_series_mul(benchmark::State& state) {
    auto pr = prof(3, 1, 16, 0, -4096, 64);
    Series a = dense_series(pr, (int)state.range(0), 3);
    Series b = dense_series(pr, (int)state.range(0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(bm_series_mul)->Arg(16)->Arg(64)->Arg(128);

void bm_newton_slopes(benchmark::State& state) {
    auto pr = prof(2, 1, (int)state.range(0), 0, -256, 64);
    FModule m;
    m.rank = 3;
    m.A = mat_zero(pr, 3, 3);
    m.A[0][0] = Series::constant(pr, Coeff::one(pr.ring));
    m.A[0][1] = Series::monomial(pr, Rat(-1), Coeff::one(pr.ring));
    m.A[1][1] = Series::constant(pr, Coeff(pr.ring, 2));
    m.A[1][2] = Series::monomial(pr, Rat(1), Coeff::one(pr.ring));
    m.A[2][2] = Series::constant(pr, Coeff(pr.ring, 4));
    m.claim = RingClaim::gamma;
    for (auto _ : state) benchmark::DoNotOptimize(newton_slopes(m));
}
BENCHMARK(bm_newton_slopes)->Arg(8)->Arg(16)->Arg(24);

void bm_sigma_linear(benchmark::State& state) {
    auto pr = prof(2, 1, (int)state.range(0), 0, -65536, 64);
    SigmaLinearProblem pb{Coeff(pr.ring, 2), Coeff::one(pr.ring),
                          Series::monomial(pr, Rat(-1), Coeff(pr.ring, -1))};
    for (auto _ : state) benchmark::DoNotOptimize(solve_sigma_linear(pb));
}
BENCHMARK(bm_sigma_linear)->Arg(8)->Arg(16)->Arg(32);

} // namespace

BENCHMARK_MAIN();
