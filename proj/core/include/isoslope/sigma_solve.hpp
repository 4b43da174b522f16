#pragma once

#include <optional>
#include <vector>

#include "isoslope/series.hpp"

namespace isoslope {

// Global iteration cap for the fixed-point solvers.  Defaults to 4*N*e;
// overridable through the ISOSLOPE_MAX_ITER environment variable (read by
// the CLI driver, not here).
struct SolverConfig {
    int max_iter_override = 0; // 0 = use 4*N*e
    int max_iter(const CoeffRing& r) const {
        return max_iter_override > 0 ? max_iter_override : 4 * r.N * r.e;
    }
};

SolverConfig& solver_config();

// ---------------------------------------------------------------------------
// Residue-level (mod pi) equations.  Two orientations appear in the slope
// filtration lifts:
//   ascending:  gamma * x^p - x = rhs      (Artin-Schreier side, Gamma^sep)
//   descending: x^p - gamma * x = rhs      (inverse-Frobenius side, Gamma^perf)
// gamma is an element of F_p; gamma = 0 degenerates to negation / p-th root.
//
// Pole chains that would need exponent level K+1 stop at the boundary and the
// uncancelled tail is reported in `deferred`:  the exact identity is
//   gamma * x^p - x = rhs - deferred   (resp. x^p - gamma*x = rhs - deferred).
struct ResidueSolution {
    Series x;
    Series deferred;
};

struct ResidueSolveOptions {
    // Forbid denominator growth and deferral entirely; used when the solution
    // must stay in the ambient ring (unipotence over Gamma_con).
    bool strict = false;
};

ResidueSolution residue_solve_ascending(int gamma, const Series& rhs,
                                        const ResidueSolveOptions& opt = {});
ResidueSolution residue_solve_descending(int gamma, const Series& rhs,
                                         const ResidueSolveOptions& opt = {});

// x^p - x = cbar mod pi.  cbar must be a residue (N = 1) series; a monomial of
// negative exponent already at max depth with p-indivisible numerator is an
// ExponentLevelExceeded error, per the level budget contract.
ResidueSolution artin_schreier_solve(const Series& cbar,
                                     const ResidueSolveOptions& opt = {});

// Affine triangular residue systems, rows i = n..1:
//   ascending:  (B x^p)_i - x_i = r_i
//   descending: x_i^p - (B x)_i = r_i
// B must be upper triangular with constant diagonal residues.
//
// When gamma = 1 at row `row`, a constant rhs term there is unsolvable over
// F_p; it is an eigenvalue digit, not an obstruction.  With an absorb spec the
// solver shifts the whole system by s * basis (s reported back) instead of
// failing; basis must be 1 at `row` and 0 below it.
struct ResidueAbsorb {
    int row = -1;
    const std::vector<Series>* basis = nullptr;
    int s = 0; // out: F_p scalar folded into the eigenvalue by the caller
};

std::vector<Series> residue_affine_ascending(const std::vector<std::vector<Series>>& B,
                                             const std::vector<Series>& r,
                                             const ResidueSolveOptions& opt = {},
                                             Series* deferred_total = nullptr,
                                             ResidueAbsorb* absorb = nullptr);
std::vector<Series> residue_affine_descending(const std::vector<std::vector<Series>>& B,
                                              const std::vector<Series>& r,
                                              const ResidueSolveOptions& opt = {},
                                              Series* deferred_total = nullptr,
                                              ResidueAbsorb* absorb = nullptr);

// Nonzero homogeneous solution (fixed vector seed): picks the lowest pivot row
// with diagonal residue 1, seeds it with 1 and solves the rows above.  Tries
// higher pivots on failure.  pivot_out receives the chosen row.
std::vector<Series> residue_fixed_vector(const std::vector<std::vector<Series>>& B,
                                         bool descending, int* pivot_out,
                                         const ResidueSolveOptions& opt = {});

// ---------------------------------------------------------------------------
// lambda * d^sigma_t - mu * d = c with lambda, mu in O.
struct SigmaLinearProblem {
    Coeff lam;
    Coeff mu;
    Series rhs;
};

struct SigmaLinearSolution {
    Series d;
    int regime = 0; // 1: contraction, 2: inverse Frobenius, 3: digit lift
};

SigmaLinearSolution solve_sigma_linear(const SigmaLinearProblem& prob);

// ---------------------------------------------------------------------------
// Eigenvector lift: given A with lam^-1 A integral and triangular residue,
// and v0 with A v0^sigma = lam v0 mod pi, produce v with
// A v^sigma = lam v mod pi^j_target.
//
// The residue step only pins the eigenvalue mod pi.  With pivot >= 0 (the row
// where v0 is the constant 1) the lift absorbs per-digit constant
// obstructions into a unit scale u, so the relation solved is
// A v^sigma = (lam * u) v; u is reported through lam_scale.
std::vector<Series> eigen_lift(const std::vector<std::vector<Series>>& A, const Coeff& lam,
                               const std::vector<Series>& v0, int j_target,
                               const ResidueSolveOptions& opt = {}, int pivot = -1,
                               Coeff* lam_scale = nullptr);

// ---------------------------------------------------------------------------
// Gamma^alg(c) membership relative to a finite approximant catalog.
struct GalgCWitness {
    Rat c;
    std::vector<Rat> table; // f_0 .. f_L, p-valuation scale, capped at N/e
    bool ok = false;
    bool catalog_relative = true; // lower bound on the sup over all of Gamma^sep
};

GalgCWitness galg_c_membership(const Series& x, const Rat& c,
                               const std::vector<Series>& approximants, int L);

} // namespace isoslope
