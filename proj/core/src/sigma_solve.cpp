#include "isoslope/sigma_solve.hpp"

#include <algorithm>
#include <set>

namespace isoslope {

SolverConfig& solver_config() {
    static SolverConfig cfg;
    return cfg;
}

namespace {

// Can the pole chain step exp -> exp/p stay on the lattice?
bool can_divide_exponent(const PrecisionProfile& prof, const Rat& exp) {
    Rat next = exp / Rat(prof.ring.p);
    return prof.exponent_in_level(next);
}

int fp_inv(int a, int p) { return mod_inverse(a, p); }

struct NegChainResult {
    Series x;
    Series deferred;
    bool deepened = false;
};

// Cancel the negative-exponent part of rhs by pole chains.  Each solution
// term sits at exp/p; reinject is the F_p factor multiplying the solution
// term when it reappears on the right side (gamma for ascending, gamma for
// descending; see the residual identities in the header).
NegChainResult solve_neg_chain(const Series& rhs_neg, int lead_inv, int reinject,
                               const std::set<Rat>& original_exps,
                               const ResidueSolveOptions& opt) {
    const PrecisionProfile& prof = rhs_neg.profile();
    const int p = prof.ring.p;
    NegChainResult out;
    out.x = Series::zero(prof, RingClaim::tower);
    out.deferred = Series::zero(prof, RingClaim::tower);
    Series R = rhs_neg;
    while (!R.is_zero()) {
        auto it = R.monomials().begin(); // most negative exponent
        Rat w = it->first;
        int c = it->second.residue();
        if (!can_divide_exponent(prof, w)) {
            if (original_exps.count(w))
                throw Error(ErrorCode::ExponentLevelExceeded,
                            "pole t^(" + w.str() + ") needs exponent level K+1");
            if (opt.strict)
                throw Error(ErrorCode::ExponentLevelExceeded,
                            "pole chain at t^(" + w.str() + ") leaves the ambient ring");
            out.deferred.add_monomial(w, it->second);
            R = R - Series::monomial(prof, w, it->second);
            continue;
        }
        Rat u = w / Rat(p);
        if (opt.strict && u.den > w.den)
            throw Error(ErrorCode::ExponentLevelExceeded,
                        "pole chain at t^(" + w.str() + ") leaves the ambient ring");
        if (u.den > w.den) out.deepened = true;
        int a = (int)(((long long)c * lead_inv) % p);
        Coeff ac(prof.ring, a);
        out.x.add_monomial(u, ac);
        Series delta = Series::zero(prof, RingClaim::tower);
        delta.add_monomial(w, -it->second);
        if (reinject) delta.add_monomial(u, Coeff(prof.ring, (reinject * a) % p));
        R = R + delta;
    }
    return out;
}

void require_residue(const Series& s, const char* who) {
    if (s.profile().ring.N != 1)
        throw Error(ErrorCode::IncompatibleProfiles,
                    std::string(who) + " expects a residue (N=1) series");
}

Series frob_p(const Series& s) { return s.frobenius(1); } // x^p mod pi

} // namespace

ResidueSolution residue_solve_ascending(int gamma, const Series& rhs,
                                        const ResidueSolveOptions& opt) {
    require_residue(rhs, "residue_solve_ascending");
    const PrecisionProfile& prof = rhs.profile();
    const int p = prof.ring.p;
    gamma = ((gamma % p) + p) % p;

    ResidueSolution out;
    out.x = Series::zero(prof, RingClaim::tower);
    out.deferred = Series::zero(prof, RingClaim::tower);

    // gamma = 0: -x = rhs.
    if (gamma == 0) {
        out.x = -rhs;
        return out;
    }

    // negative part: pole chains through gamma * x^p
    Series rneg = rhs.part_negative();
    if (!rneg.is_zero()) {
        std::set<Rat> orig;
        for (const auto& [e, c] : rneg.monomials()) orig.insert(e);
        auto chain = solve_neg_chain(rneg, fp_inv(gamma, p), /*reinject=*/1, orig, opt);
        out.x = out.x + chain.x;
        out.deferred = out.deferred + chain.deferred;
        Provenance pr;
        pr.uses_artin_schreier = true;
        out.x.merge_provenance(pr);
    }

    // constant part: x0 * (gamma - 1) = c0 in F_p
    int c0 = rhs.part_constant().residue();
    if (gamma != 1) {
        int x0 = (int)(((long long)c0 * fp_inv((gamma - 1 + p) % p, p)) % p);
        out.x.add_monomial(Rat(0), Coeff(prof.ring, x0));
    } else if (c0 != 0) {
        throw Error(ErrorCode::NoSolutionAtLevel,
                    "x^p - x = c with nonzero constant term has no prime-field solution");
    }

    // positive part: x = gamma * x^p - r, t-adically contracting
    Series rpos = rhs.part_positive();
    if (!rpos.is_zero()) {
        Coeff g(prof.ring, gamma);
        Series y = Series::zero(prof, RingClaim::tower);
        int guard = 4 * (int)rpos.monomials().size() + 200;
        for (int it = 0; it < guard; ++it) {
            Series next = frob_p(y).scalar_mul(g) - rpos;
            bool same = (next - y).is_zero();
            y = next;
            if (same) break;
        }
        out.x = out.x + y;
        Provenance pr;
        pr.uses_artin_schreier = true;
        out.x.merge_provenance(pr);
    }
    return out;
}

ResidueSolution residue_solve_descending(int gamma, const Series& rhs,
                                         const ResidueSolveOptions& opt) {
    require_residue(rhs, "residue_solve_descending");
    const PrecisionProfile& prof = rhs.profile();
    const int p = prof.ring.p;
    gamma = ((gamma % p) + p) % p;

    ResidueSolution out;
    out.x = Series::zero(prof, RingClaim::tower);
    out.deferred = Series::zero(prof, RingClaim::tower);

    // negative part: chains through x^p (coefficient 1), reinjecting gamma*x
    Series rneg = rhs.part_negative();
    if (!rneg.is_zero()) {
        std::set<Rat> orig;
        for (const auto& [e, c] : rneg.monomials()) orig.insert(e);
        auto chain = solve_neg_chain(rneg, 1, gamma, orig, opt);
        out.x = out.x + chain.x;
        out.deferred = out.deferred + chain.deferred;
        if (chain.deepened) {
            Provenance pr;
            pr.uses_p_root = true;
            out.x.merge_provenance(pr);
        }
    }

    // constant part: x0 * (1 - gamma) = c0
    int c0 = rhs.part_constant().residue();
    if (gamma != 1) {
        int x0 = (int)(((long long)c0 * fp_inv((1 - gamma + p) % p, p)) % p);
        out.x.add_monomial(Rat(0), Coeff(prof.ring, x0));
    } else if (c0 != 0) {
        throw Error(ErrorCode::NoSolutionAtLevel,
                    "x^p - x = c with nonzero constant term has no prime-field solution");
    }

    // positive part
    Series rpos = rhs.part_positive();
    if (!rpos.is_zero()) {
        if (gamma == 0) {
            // exact p-th root
            try {
                Series root = rpos.frobenius(-1);
                out.x = out.x + root;
            } catch (const Error& err) {
                if (err.code() != ErrorCode::ExponentLevelExceeded || opt.strict) throw;
                // defer monomials that cannot be rooted at this level
                for (const auto& [e, c] : rpos.monomials()) {
                    Rat u = e / Rat(p);
                    if (prof.exponent_in_level(u))
                        out.x.add_monomial(u, c);
                    else
                        out.deferred.add_monomial(e, -c);
                }
                Provenance pr;
                pr.uses_p_root = true;
                out.x.merge_provenance(pr);
            }
        } else {
            Coeff ginv(prof.ring, fp_inv(gamma, p));
            Series y = Series::zero(prof, RingClaim::tower);
            int guard = 4 * (int)rpos.monomials().size() + 200;
            for (int it = 0; it < guard; ++it) {
                Series next = (frob_p(y) - rpos).scalar_mul(ginv);
                bool same = (next - y).is_zero();
                y = next;
                if (same) break;
            }
            out.x = out.x + y;
        }
    }
    return out;
}

ResidueSolution artin_schreier_solve(const Series& cbar, const ResidueSolveOptions& opt) {
    Series r = cbar.profile().ring.N == 1 ? cbar : cbar.residue();
    auto sol = residue_solve_ascending(1, r, opt);
    return sol;
}

namespace {

std::vector<Series> residue_affine_triangular(const std::vector<std::vector<Series>>& B,
                                              const std::vector<Series>& r, bool descending,
                                              const ResidueSolveOptions& opt,
                                              Series* deferred_total, ResidueAbsorb* absorb) {
    const int n = (int)r.size();
    const PrecisionProfile& prof = r[0].profile();
    const int p = prof.ring.p;
    // diagonal residues must be constants
    std::vector<int> gamma(n, 0);
    for (int i = 0; i < n; ++i) {
        const Series& d = B[i][i];
        for (const auto& [e, c] : d.monomials())
            if (e != Rat(0))
                throw Error(ErrorCode::NoSolutionAtLevel,
                            "residue system has a non-constant diagonal entry");
        gamma[i] = d.part_constant().residue();
        for (int j = 0; j < i; ++j)
            if (!B[i][j].is_zero())
                throw Error(ErrorCode::NoSolutionAtLevel,
                            "residue system is not upper triangular");
    }
    std::vector<Series> x(n, Series::zero(prof, RingClaim::tower));
    for (int i = n - 1; i >= 0; --i) {
        Series rhs = r[i];
        for (int j = i + 1; j < n; ++j) {
            if (B[i][j].is_zero() || x[j].is_zero()) continue;
            if (descending)
                rhs = rhs + B[i][j] * x[j];
            else
                rhs = rhs - B[i][j] * frob_p(x[j]);
        }
        if (absorb && absorb->row == i && gamma[i] == 1) {
            int c0 = rhs.part_constant().residue();
            absorb->s = (p - c0) % p;
        }
        if (absorb && absorb->s && i <= absorb->row)
            rhs = rhs + (*absorb->basis)[i].scalar_mul(Coeff(prof.ring, absorb->s));
        ResidueSolution sol = descending ? residue_solve_descending(gamma[i], rhs, opt)
                                         : residue_solve_ascending(gamma[i], rhs, opt);
        x[i] = sol.x;
        if (deferred_total && !sol.deferred.is_zero())
            *deferred_total = *deferred_total + sol.deferred;
    }
    return x;
}

} // namespace

std::vector<Series> residue_affine_ascending(const std::vector<std::vector<Series>>& B,
                                             const std::vector<Series>& r,
                                             const ResidueSolveOptions& opt,
                                             Series* deferred_total, ResidueAbsorb* absorb) {
    return residue_affine_triangular(B, r, false, opt, deferred_total, absorb);
}

std::vector<Series> residue_affine_descending(const std::vector<std::vector<Series>>& B,
                                              const std::vector<Series>& r,
                                              const ResidueSolveOptions& opt,
                                              Series* deferred_total, ResidueAbsorb* absorb) {
    return residue_affine_triangular(B, r, true, opt, deferred_total, absorb);
}

std::vector<Series> residue_fixed_vector(const std::vector<std::vector<Series>>& B,
                                         bool descending, int* pivot_out,
                                         const ResidueSolveOptions& opt) {
    const int n = (int)B.size();
    const PrecisionProfile& prof = B[0][0].profile();
    std::optional<Error> last;
    for (int pivot = n - 1; pivot >= 0; --pivot) {
        int g = B[pivot][pivot].part_constant().residue();
        bool diag_const = true;
        for (const auto& [e, c] : B[pivot][pivot].monomials())
            if (e != Rat(0)) diag_const = false;
        if (!diag_const || g != 1) continue;
        try {
            std::vector<Series> x(n, Series::zero(prof, RingClaim::tower));
            x[pivot] = Series::constant(prof, Coeff::one(prof.ring));
            // rows above the pivot, affine
            for (int i = pivot - 1; i >= 0; --i) {
                Series rhs = Series::zero(prof, RingClaim::tower);
                bool diag_ok = true;
                for (const auto& [e, c] : B[i][i].monomials())
                    if (e != Rat(0)) diag_ok = false;
                if (!diag_ok)
                    throw Error(ErrorCode::NoSolutionAtLevel,
                                "non-constant diagonal residue above pivot");
                for (int j = 0; j < i; ++j)
                    if (!B[i][j].is_zero())
                        throw Error(ErrorCode::NoSolutionAtLevel,
                                    "residue system is not upper triangular");
                for (int j = i + 1; j < n; ++j) {
                    if (B[i][j].is_zero() || x[j].is_zero()) continue;
                    if (descending)
                        rhs = rhs + B[i][j] * x[j];
                    else
                        rhs = rhs - B[i][j] * frob_p(x[j]);
                }
                int gi = B[i][i].part_constant().residue();
                ResidueSolution sol = descending ? residue_solve_descending(gi, rhs, opt)
                                                 : residue_solve_ascending(gi, rhs, opt);
                if (!sol.deferred.is_zero() && opt.strict)
                    throw Error(ErrorCode::ExponentLevelExceeded, "deferred residue in strict mode");
                x[i] = sol.x;
            }
            if (pivot_out) *pivot_out = pivot;
            return x;
        } catch (const Error& err) {
            last = err;
        }
    }
    if (last) throw *last;
    throw Error(ErrorCode::NoSolutionAtLevel,
                "no diagonal residue equal to 1; no fixed vector at this eigenvalue normalization");
}

SigmaLinearSolution solve_sigma_linear(const SigmaLinearProblem& prob) {
    const Coeff& lam = prob.lam;
    const Coeff& mu = prob.mu;
    const Series& c = prob.rhs;
    const PrecisionProfile& prof = c.profile();
    const int N = prof.ring.N;
    int vl = lam.val(), vm = mu.val();
    if (vl >= N && vm >= N)
        throw Error(ErrorCode::InvariantViolation, "lambda and mu are both zero");

    SigmaLinearSolution out;
    int cap = solver_config().max_iter(prof.ring);

    if (vl > vm) {
        // contraction: d = mu^-1 (lambda d^sigma - c)
        out.regime = 1;
        Series d = Series::zero(prof, c.claim());
        for (int it = 0; it < cap; ++it) {
            Series next = (d.frobenius(1).scalar_mul(lam) - c).div_coeff(mu);
            bool same = (next - d).is_zero();
            d = next;
            if (same) { out.d = d; return out; }
        }
        throw Error(ErrorCode::PrecisionExhausted, "regime-i iteration did not stabilize");
    }
    if (vl < vm) {
        // inverse Frobenius: d = sigma^-1( lambda^-1 (mu d + c) )
        out.regime = 2;
        Series d = Series::zero(prof, c.claim());
        for (int it = 0; it < cap; ++it) {
            Series next = (d.scalar_mul(mu) + c).div_coeff(lam).frobenius(-1);
            bool same = (next - d).is_zero();
            d = next;
            if (same) { out.d = d; return out; }
        }
        throw Error(ErrorCode::PrecisionExhausted, "regime-ii iteration did not stabilize");
    }

    // equal valuations: pi-digit lift, each digit an Artin-Schreier equation
    out.regime = 3;
    if (c.gauss_val() < vl)
        throw Error(ErrorCode::NoSolutionAtLevel,
                    "right-hand side valuation below the common valuation of lambda, mu");
    Coeff lamh = lam.pi_shift(-vl), muh = mu.pi_shift(-vl);
    Series ch = c.pi_shift(-vl);
    const int p = prof.ring.p;
    int budget = N - vl;
    Series d = Series::zero(prof, c.claim());
    int mu0_inv = mod_inverse(muh.residue(), p);
    int gamma = (int)(((long long)lamh.residue() * mu0_inv) % p);
    for (int j = 0; j < budget; ++j) {
        Series r = d.frobenius(1).scalar_mul(lamh) - d.scalar_mul(muh) - ch;
        if (r.is_zero()) break;
        if (r.gauss_val() < j)
            throw Error(ErrorCode::PrecisionExhausted, "digit lift lost a digit");
        Series digit_rhs = (-r).pi_shift(-j).residue().scalar_mul(
            Coeff(residue_profile(prof).ring, mu0_inv));
        ResidueSolution sol = residue_solve_ascending(gamma, digit_rhs);
        if (!sol.deferred.is_zero())
            throw Error(ErrorCode::NoSolutionAtLevel,
                        "digit equation unsolvable at this exponent level");
        Series lifted = Series::lift_residue(sol.x, prof).pi_shift(j);
        d = d + lifted;
    }
    out.d = d;
    return out;
}

std::vector<Series> eigen_lift(const std::vector<std::vector<Series>>& A, const Coeff& lam,
                               const std::vector<Series>& v0, int j_target,
                               const ResidueSolveOptions& opt, int pivot, Coeff* lam_scale) {
    const int n = (int)v0.size();
    const PrecisionProfile& prof = v0[0].profile();
    const int vl = lam.val();
    if (j_target > prof.ring.N - vl)
        throw Error(ErrorCode::PrecisionExhausted,
                    "j_target exceeds precision available after dividing by lambda");

    // B = lambda^-1 A, entries known mod pi^(N - v(lambda))
    std::vector<std::vector<Series>> B(n, std::vector<Series>(n));
    std::vector<std::vector<Series>> Bbar(n, std::vector<Series>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            B[i][j] = A[i][j].div_coeff(lam);
            Bbar[i][j] = B[i][j].residue();
        }

    Coeff u = Coeff::one(prof.ring);
    std::vector<Series> wbar;
    if (pivot >= 0) {
        wbar.reserve(n);
        for (int i = 0; i < n; ++i) wbar.push_back(v0[i].residue());
    }

    std::vector<Series> w = v0;
    for (int j = 1; j < j_target; ++j) {
        // residual B w^sigma - u w, zero mod pi^j by induction
        std::vector<Series> r(n, Series::zero(prof, RingClaim::tower));
        bool clean = true;
        for (int i = 0; i < n; ++i) {
            Series acc = -w[i].scalar_mul(u);
            for (int k = 0; k < n; ++k)
                if (!B[i][k].is_zero()) acc = acc + B[i][k] * w[k].frobenius(1);
            r[i] = acc;
            if (!acc.is_zero()) clean = false;
        }
        if (clean) break;
        std::vector<Series> cbar(n, Series::zero(residue_profile(prof), RingClaim::tower));
        for (int i = 0; i < n; ++i) {
            if (r[i].is_zero()) continue;
            if (r[i].gauss_val() < j)
                throw Error(ErrorCode::PrecisionExhausted, "eigen_lift residual below expected digit");
            cbar[i] = (-r[i]).pi_shift(-j).residue();
        }
        ResidueAbsorb ab;
        ab.row = pivot;
        ab.basis = &wbar;
        std::vector<Series> x =
            residue_affine_ascending(Bbar, cbar, opt, nullptr, pivot >= 0 ? &ab : nullptr);
        if (ab.s) u = u + Coeff::pi_pow(prof.ring, j, ab.s);
        for (int i = 0; i < n; ++i)
            w[i] = w[i] + Series::lift_residue(x[i], prof).pi_shift(j);
    }
    if (lam_scale) *lam_scale = u;
    return w;
}

GalgCWitness galg_c_membership(const Series& x, const Rat& c,
                               const std::vector<Series>& approximants, int L) {
    if (approximants.empty())
        throw Error(ErrorCode::EmptyCatalog, "approximant catalog is empty");
    for (const auto& r : approximants)
        if (r.provenance().uses_p_root)
            throw Error(ErrorCode::InvariantViolation,
                        "approximants must be sep-pure (no uses_p_root provenance)");
    const auto& ring = x.profile().ring;
    Rat cap(ring.N, ring.e);
    GalgCWitness out;
    out.c = c;
    out.ok = true;
    Series xs = x;
    for (int l = 0; l <= L; ++l) {
        Rat best(-1000000, 1);
        for (const auto& r : approximants) {
            Series diff = xs - r;
            int v = diff.gauss_val();
            Rat f = v >= ring.N ? cap : Rat(v, ring.e);
            if (best < f) best = f;
            if (best == cap) break;
        }
        out.table.push_back(best);
        if (best < c * Rat(l)) out.ok = false;
        if (l < L) xs = xs.frobenius(1);
    }
    return out;
}

} // namespace isoslope
