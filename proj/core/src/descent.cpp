#include "isoslope/fcrystal.hpp"

#include <algorithm>

namespace isoslope {

namespace {

using CMat = std::vector<std::vector<Coeff>>;

CMat cmat_zero(const CoeffRing& r, int n) {
    return CMat(n, std::vector<Coeff>(n, Coeff::zero(r)));
}

CMat cmat_mul(const CMat& a, const CMat& b) {
    int n = (int)a.size();
    CMat out = cmat_zero(a[0][0].ring(), n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Coeff acc = Coeff::zero(a[0][0].ring());
            for (int k = 0; k < n; ++k) acc = acc + a[i][k] * b[k][j];
            out[i][j] = acc;
        }
    return out;
}

CMat cmat_strike(const CMat& a, int row, int col) {
    CMat out;
    for (int i = 0; i < (int)a.size(); ++i) {
        if (i == row) continue;
        std::vector<Coeff> line;
        for (int j = 0; j < (int)a.size(); ++j)
            if (j != col) line.push_back(a[i][j]);
        out.push_back(std::move(line));
    }
    return out;
}

Coeff cmat_det(const CMat& a) {
    int n = (int)a.size();
    if (n == 1) return a[0][0];
    Coeff acc = Coeff::zero(a[0][0].ring());
    for (int j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        Coeff term = a[0][j] * cmat_det(cmat_strike(a, 0, j));
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

CMat cmat_adjugate(const CMat& a) {
    int n = (int)a.size();
    const CoeffRing& r = a[0][0].ring();
    if (n == 1) return {{Coeff::one(r)}};
    CMat adj = cmat_zero(r, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Coeff c = cmat_det(cmat_strike(a, i, j));
            if ((i + j) % 2 == 1) c = -c;
            adj[j][i] = c;
        }
    return adj;
}

bool cmat_is_zero(const CMat& a) {
    for (const auto& row : a)
        for (const auto& c : row)
            if (!c.is_zero()) return false;
    return true;
}

int cmat_min_val(const CMat& a) {
    int v = a[0][0].ring().N;
    for (const auto& row : a)
        for (const auto& c : row) v = std::min(v, c.val());
    return v;
}

CMat cmat_pi_shift(const CMat& a, int k) {
    CMat out = a;
    for (auto& row : out)
        for (auto& c : row) c = c.pi_shift(k);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Dwork's trick

int DworkResult::verify(const FModule& M) const {
    const PrecisionProfile& prof = M.profile();
    const CoeffRing& ring = prof.ring;
    const int p = ring.p;
    int worst = ring.N;
    // t^j coefficient matrices of A
    std::vector<CMat> Aj;
    for (int j = 0; j < t_prec; ++j) {
        CMat m = cmat_zero(ring, M.rank);
        for (int a = 0; a < M.rank; ++a)
            for (int b = 0; b < M.rank; ++b) m[a][b] = M.A[a][b].coeff_at(Rat(j));
        Aj.push_back(std::move(m));
    }
    for (int m = 0; m < t_prec; ++m) {
        int delta = denom[m];
        for (int k = 0; p * k <= m; ++k)
            if (m - p * k < t_prec) delta = std::max(delta, denom[k]);
        CMat lhs = cmat_zero(ring, M.rank);
        for (int k = 0; p * k <= m; ++k) {
            int j = m - p * k;
            if (j >= t_prec) continue;
            CMat term = cmat_mul(Aj[j], cmat_pi_shift(coeffs[k], delta - denom[k]));
            for (int a = 0; a < M.rank; ++a)
                for (int b = 0; b < M.rank; ++b) lhs[a][b] = lhs[a][b] + term[a][b];
        }
        CMat rhs = cmat_mul(cmat_pi_shift(coeffs[m], delta - denom[m]), A0);
        for (int a = 0; a < M.rank; ++a)
            for (int b = 0; b < M.rank; ++b) {
                Coeff diff = lhs[a][b] - rhs[a][b];
                worst = std::min(worst, diff.val());
            }
    }
    return worst;
}

std::string DworkResult::entry_str(int i, int j, const PrecisionProfile&) const {
    std::string out;
    for (int m = 0; m < t_prec; ++m) {
        const Coeff& c = coeffs[m][i][j];
        if (c.is_zero()) continue;
        if (!out.empty()) out += " + ";
        std::string term;
        if (denom[m] > 0) term += "pi^-" + std::to_string(denom[m]) + "*";
        term += "(" + c.str() + ")";
        if (m > 0) term += "*t^" + std::to_string(m);
        out += term;
    }
    return out.empty() ? "0" : out;
}

DworkResult dwork_trick(const FModule& M, int t_prec) {
    M.validate();
    if (M.claim != RingClaim::omega)
        throw Error(ErrorCode::IncompatibleProfiles, "Dwork's trick needs an omega crystal");
    const PrecisionProfile& prof = M.profile();
    const CoeffRing& ring = prof.ring;
    const int p = ring.p, N = ring.N;
    if (t_prec < 1) t_prec = 1;
    if (Rat(t_prec - 1) > prof.t_hi)
        throw Error(ErrorCode::WindowOverflow,
                    "t-window ceiling " + prof.t_hi.str() + " below requested t-precision");

    const int n = M.rank;
    std::vector<CMat> Aj;
    for (int j = 0; j < t_prec; ++j) {
        CMat m = cmat_zero(ring, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) m[a][b] = M.A[a][b].coeff_at(Rat(j));
        Aj.push_back(std::move(m));
    }

    CMat A0 = Aj[0];
    Coeff d0 = cmat_det(A0);
    int s = d0.val();
    if (s >= N)
        throw Error(ErrorCode::SingularAtZero, "A(0) is not invertible up to isogeny");
    // A0^-1 = pi^-s * C
    Coeff uinv = d0.pi_shift(-s).inv();
    CMat C = cmat_adjugate(A0);
    for (auto& row : C)
        for (auto& c : row) c = c * uinv;

    DworkResult out;
    out.t_prec = t_prec;
    out.A0 = A0;
    CMat id = cmat_zero(ring, n);
    for (int i = 0; i < n; ++i) id[i][i] = Coeff::one(ring);
    out.coeffs.push_back(id);
    out.denom.push_back(0);

    for (int m = 1; m < t_prec; ++m) {
        int dmax = 0;
        bool any = false;
        for (int k = 0; p * k <= m; ++k) {
            int j = m - p * k;
            if (j >= t_prec || k >= m || cmat_is_zero(Aj[j])) continue;
            dmax = std::max(dmax, out.denom[k]);
            any = true;
        }
        CMat num = cmat_zero(ring, n);
        int den = 0;
        if (any) {
            for (int k = 0; p * k <= m; ++k) {
                int j = m - p * k;
                if (j >= t_prec || k >= m || cmat_is_zero(Aj[j])) continue;
                CMat term = cmat_mul(Aj[j], cmat_pi_shift(out.coeffs[k], dmax - out.denom[k]));
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) num[a][b] = num[a][b] + term[a][b];
            }
            num = cmat_mul(num, C);
            den = dmax + s;
            // drop common pi content
            int g = std::min(cmat_min_val(num), den);
            if (g > 0 && !cmat_is_zero(num)) {
                num = cmat_pi_shift(num, -g);
                den -= g;
            }
            if (cmat_is_zero(num)) den = 0;
            if (den >= N)
                throw Error(ErrorCode::PrecisionExhausted,
                            "Dwork denominators exhausted the pi-precision budget at degree " +
                                std::to_string(m));
        }
        out.coeffs.push_back(std::move(num));
        out.denom.push_back(den);
        out.max_denom = std::max(out.max_denom, den);
    }
    return out;
}

// ---------------------------------------------------------------------------
// e*f factorization

EfFactorization ef_factorize(const Series& d) {
    const PrecisionProfile& prof = d.profile();
    const CoeffRing& ring = prof.ring;
    if (d.is_zero()) throw Error(ErrorCode::NotAUnit, "zero series");
    if (d.gauss_val() != 0)
        throw Error(ErrorCode::NotAUnit,
                    "Gauss valuation " + std::to_string(d.gauss_val()) + " != 0");
    auto [lexp, lc] = d.leading();

    Series one = Series::constant(prof, Coeff::one(ring));
    Series e_acc = Series::monomial(prof, lexp, lc);
    Series f_acc = one;
    int cap = solver_config().max_iter(ring);
    Series r = d;
    bool done = false;
    for (int it = 0; it < cap; ++it) {
        Series prod = e_acc * f_acc;
        if ((prod - d).is_zero()) { done = true; break; }
        r = d * prod.invert_unit() - one;
        if (r.is_zero()) { done = true; break; }
        Series rle = r.part_negative() + Series::constant(prof, r.part_constant());
        Series rgt = r.part_positive();
        if (!rle.is_zero()) e_acc = e_acc * (one + rle);
        if (!rgt.is_zero()) f_acc = f_acc * (one + rgt);
    }
    if (!done)
        throw Error(ErrorCode::NonConvergent,
                    "factor corrections stopped contracting; residual " + r.str());

    Coeff c0 = f_acc.part_constant();
    if (c0 != Coeff::one(ring)) {
        e_acc = e_acc.scalar_mul(c0);
        f_acc = f_acc.scalar_mul(c0.inv());
    }
    EfFactorization out;
    out.e = e_acc;
    out.e.set_claim(RingClaim::gamma_con);
    out.f = f_acc;
    out.f.set_claim(RingClaim::gamma_an_con);
    return out;
}

// ---------------------------------------------------------------------------
// submodule descent to Omega

namespace {

bool omega_supported(const Series& s) {
    for (const auto& [e, c] : s.monomials())
        if (!e.is_integer() || e < Rat(0)) return false;
    return true;
}

} // namespace

SubmoduleDescent descend_submodule(const FModule& M, const SeriesVec& v_in) {
    M.validate();
    if (M.claim != RingClaim::omega)
        throw Error(ErrorCode::IncompatibleProfiles, "descend_submodule needs an omega crystal");
    if ((int)v_in.size() != M.rank)
        throw Error(ErrorCode::NotRankOne, "expected a single rank-1 generator vector");
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N;

    SeriesVec v = v_in;
    int s0 = N;
    for (const auto& s : v) s0 = std::min(s0, s.gauss_val());
    if (s0 >= N) throw Error(ErrorCode::NotRankOne, "zero generator");
    if (s0 > 0)
        for (auto& s : v) s = s.pi_shift(-s0);

    // eigenvalue over Gamma from a unit coordinate
    SeriesVec Avs = mat_vec(M.A, vec_frobenius(v, 1));
    Series c;
    bool have_c = false;
    for (int i = 0; i < M.rank && !have_c; ++i) {
        if (v[i].gauss_val() != 0) continue;
        try {
            c = Avs[i] * v[i].invert_unit();
            have_c = true;
        } catch (const Error&) {
        }
    }
    if (!have_c)
        throw Error(ErrorCode::NotAnEigenvector, "no invertible coordinate to read the eigenvalue");
    {
        SeriesVec resid = vec_sub(Avs, vec_scalar_series(v, c));
        for (const auto& s : resid)
            if (s.gauss_val() < N)
                throw Error(ErrorCode::NotAnEigenvector,
                            "F v != c v: residual valuation " + std::to_string(s.gauss_val()));
    }

    // candidate coordinates, most unit-like first
    std::vector<int> order(M.rank);
    for (int i = 0; i < M.rank; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return v[a].gauss_val() < v[b].gauss_val(); });

    std::string why = "no coordinate produced an Omega generator";
    for (int i : order) {
        int mi = v[i].gauss_val();
        if (mi >= N) continue;
        try {
            Series dcand = v[i].pi_shift(-mi);
            EfFactorization ef = ef_factorize(dcand);
            Series einv = ef.e.invert_unit();
            SeriesVec w(M.rank);
            for (int j = 0; j < M.rank; ++j) w[j] = v[j] * einv;
            int m = N;
            for (const auto& s : w) m = std::min(m, s.gauss_val());
            SeriesVec g(M.rank);
            bool supported = true;
            for (int j = 0; j < M.rank; ++j) {
                g[j] = w[j].pi_shift(-m);
                if (!omega_supported(g[j])) supported = false;
            }
            if (!supported) { why = "generator kept negative exponents"; continue; }
            Series k = c * ef.e * ef.e.frobenius(1).invert_unit();
            if (!omega_supported(k)) { why = "eigenvalue kept negative exponents"; continue; }
            for (auto& s : g) s.set_claim(RingClaim::omega);
            k.set_claim(RingClaim::omega);

            SeriesVec gres = vec_sub(mat_vec(M.A, vec_frobenius(g, 1)), vec_scalar_series(g, k));
            int rv = N;
            for (const auto& s : gres) rv = std::min(rv, s.gauss_val());
            if (rv < N) { why = "descended eigen relation residual valuation " + std::to_string(rv); continue; }

            SubmoduleDescent out;
            out.generator = g;
            out.eigenvalue = k;
            out.e_factor = ef.e;
            out.isogeny_power = s0 + m;
            out.residual_val = rv;
            out.direct_summand = false;
            for (const auto& s : g)
                if (s.coeff_at(Rat(0)).is_unit()) out.direct_summand = true;
            return out;
        } catch (const Error& err) {
            why = err.what();
        }
    }
    throw Error(ErrorCode::NonConvergent, why);
}

// ---------------------------------------------------------------------------
// extension splitting

SplitResult split_extension(const FModule& M, const SeriesVec& sub_basis) {
    M.validate();
    if ((int)sub_basis.size() != M.rank)
        throw Error(ErrorCode::InvariantViolation, "sub_basis dimension mismatch");
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N, r = M.rank;

    SeriesVec v = sub_basis;
    int content = N;
    for (const auto& s : v) content = std::min(content, s.gauss_val());
    if (content >= N) throw Error(ErrorCode::InvariantViolation, "sub_basis is zero");
    if (content > 0)
        for (auto& s : v) s = s.pi_shift(-content);

    int i0 = -1;
    for (int i = 0; i < r && i0 < 0; ++i)
        if (v[i].gauss_val() == 0) i0 = i;
    if (i0 < 0) throw Error(ErrorCode::InvariantViolation, "sub_basis has no unit coordinate");

    // F-stability: A v^sigma = a v
    SeriesVec Avs = mat_vec(M.A, vec_frobenius(v, 1));
    Series a = Avs[i0] * v[i0].invert_unit();
    {
        SeriesVec resid = vec_sub(Avs, vec_scalar_series(v, a));
        for (const auto& s : resid)
            if (s.gauss_val() < N)
                throw Error(ErrorCode::InvariantViolation,
                            "sub_basis is not F-stable: residual valuation " +
                                std::to_string(s.gauss_val()));
    }

    // P = [v | e_j (j != i0)]
    SeriesMat P = mat_zero(prof, r, r);
    for (int i = 0; i < r; ++i) P[i][0] = v[i];
    {
        int col = 1;
        for (int j = 0; j < r; ++j) {
            if (j == i0) continue;
            P[j][col] = Series::constant(prof, Coeff::one(prof.ring));
            ++col;
        }
    }
    SeriesMat Pinv = scaled_inverse(P, Coeff::one(prof.ring)).B;
    SeriesMat Ap = mat_mul(Pinv, mat_mul(M.A, mat_frobenius(P, 1)));

    Series A1 = Ap[0][0];
    SeriesMat A2(r - 1, std::vector<Series>(r - 1));
    std::vector<Series> C(r - 1);
    for (int i = 1; i < r; ++i)
        for (int j = 1; j < r; ++j) A2[i - 1][j - 1] = Ap[i][j];
    for (int j = 1; j < r; ++j) C[j - 1] = Ap[0][j];

    SplitResult out;
    {
        FModule sub;
        sub.rank = 1;
        sub.A = {{A1}};
        sub.claim = RingClaim::tower;
        out.sub_slopes = newton_slopes(sub);
        FModule quot;
        quot.rank = r - 1;
        quot.A = A2;
        quot.claim = RingClaim::tower;
        out.quot_slopes = newton_slopes(quot);
    }
    if (!(out.sub_slopes.min() > out.quot_slopes.max()))
        throw Error(ErrorCode::SlopeOrderViolated,
                    "sub slopes " + out.sub_slopes.str() + " do not exceed quotient slopes " +
                        out.quot_slopes.str());

    // A1 X^sigma - X A2 = C with X a 1 x (r-1) row; isogeny ladder on rho
    Series detA2 = det(A2);
    int s = detA2.gauss_val();
    SeriesMat B2 = scaled_inverse(A2, Coeff::pi_pow(prof.ring, s)).B;
    int cap = solver_config().max_iter(prof.ring);

    std::vector<Series> X;
    int rho_used = 0;
    bool solved = false;
    for (int rho = 0; rho <= N / 2 && !solved; rho += std::max(1, prof.ring.e)) {
        std::vector<Series> Cr(r - 1);
        for (int j = 0; j < r - 1; ++j) Cr[j] = C[j].pi_shift(rho);
        std::vector<Series> Y(r - 1, Series::zero(prof, RingClaim::tower));
        try {
            for (int it = 0; it < cap; ++it) {
                // next = (A1 Y^sigma - Cr) * A2^-1
                std::vector<Series> t(r - 1);
                for (int j = 0; j < r - 1; ++j)
                    t[j] = A1 * Y[j].frobenius(1) - Cr[j];
                std::vector<Series> next(r - 1, Series::zero(prof, RingClaim::tower));
                for (int j = 0; j < r - 1; ++j) {
                    Series acc = Series::zero(prof, RingClaim::tower);
                    for (int k = 0; k < r - 1; ++k)
                        if (!B2[k][j].is_zero()) acc = acc + t[k] * B2[k][j];
                    next[j] = acc.pi_shift(-s);
                }
                bool same = true;
                for (int j = 0; j < r - 1; ++j)
                    if (!(next[j] - Y[j]).is_zero()) same = false;
                Y = next;
                if (same) { solved = true; break; }
            }
        } catch (const Error&) {
            continue; // not integral at this rho; climb the ladder
        }
        if (solved) { X = Y; rho_used = rho; }
    }
    if (!solved)
        throw Error(ErrorCode::NonConvergent, "splitting iteration did not stabilize");
    out.isogeny_power = rho_used;

    out.d = X[0];
    out.witness = out.d.ovc_certify();
    bool all_wit = true;
    for (const auto& x : X)
        if (!x.ovc_certify()) all_wit = false;
    out.split = all_wit;
    if (!all_wit)
        out.diagnostic = "splits over Gamma, not over Gamma_con; evidence d = " + out.d.str();

    // complement generators: P * (-X_j ; e_j)
    for (int j = 0; j < r - 1; ++j) {
        SeriesVec col(r, Series::zero(prof, RingClaim::tower));
        col[0] = -X[j];
        col[1 + j] = Series::constant(prof, Coeff::one(prof.ring));
        SeriesVec orig = mat_vec(P, col);
        for (const auto& entry : orig) out.complement.push_back(entry);
    }
    return out;
}

// ---------------------------------------------------------------------------
// two-slope morphism descent

TwoSlopeDescent descend_morphism_twoslope(const MorphismCandidate& f, const NablaStructure& nabla) {
    const FModule& H = f.source;
    H.validate();
    if (H.rank != 2)
        throw Error(ErrorCode::TooManySlopes,
                    "implemented normal form is the rank-2 Hom block (apply exterior/dual reductions first)");
    const PrecisionProfile& prof = H.profile();
    const CoeffRing& ring = prof.ring;
    const int N = ring.N;

    auto is_const = [](const Series& s) {
        for (const auto& [e, c] : s.monomials())
            if (e != Rat(0)) return false;
        return true;
    };
    if (!H.A[1][0].is_zero() || !is_const(H.A[0][0]) || !is_const(H.A[1][1]))
        throw Error(ErrorCode::InvariantViolation,
                    "Hom block must be upper triangular with constant diagonal");
    Coeff lam = H.A[0][0].part_constant();
    Coeff mu = H.A[1][1].part_constant();
    Series c = H.A[0][1];

    TwoSlopeDescent out;

    if (lam.val() < mu.val()) {
        // eigenvector e1 at the lower eigenvalue; the coupled equation
        // mu d^sigma - lam d = 0 forces d = 0: already over Gamma_con.
        out.ok = true;
        out.d = Series::zero(prof, RingClaim::gamma_con);
        out.b = Series::zero(prof, RingClaim::gamma_con);
        out.witness_d = out.d.ovc_certify();
        out.witness_b = out.b.ovc_certify();
        out.morphism = f;
        out.morphism.f = {{Series::constant(prof, Coeff::one(ring))},
                          {Series::zero(prof, RingClaim::gamma_con)}};
        out.morphism.eigenvalue = lam;
        return out;
    }

    int compat = check_fnabla_compat(H, nabla);
    if (compat < N)
        throw Error(ErrorCode::HorizontalityViolated,
                    "(F,nabla) compatibility residual has valuation " + std::to_string(compat));
    if (!nabla.G[0][0].is_zero() || !nabla.G[1][0].is_zero() || !nabla.G[1][1].is_zero())
        throw Error(ErrorCode::InvariantViolation,
                    "nabla structure must be strictly upper triangular in the normal form");

    // (1)  lam d^sigma - mu d = -c
    SigmaLinearProblem p1{lam, mu, -c};
    out.d = solve_sigma_linear(p1).d;

    // (2)  p lam b^sigma - mu b = nabla(c)
    Series cp = c.nabla();
    Coeff plam = lam * Coeff(ring, ring.p);
    SigmaLinearProblem p2{plam, mu, cp};
    out.b = solve_sigma_linear(p2).d;

    if (!nabla.G[0][1].is_zero() && !(nabla.G[0][1] - out.b).is_zero())
        throw Error(ErrorCode::HorizontalityViolated,
                    "nabla structure disagrees with the derived equation's unique solution");

    // (3)  nabla d = -b, coefficientwise (i * a_i = -b_i)
    if (!(out.d.nabla() + out.b).is_zero())
        throw Error(ErrorCode::HorizontalityViolated,
                    "nabla d does not match the integrated derived solution");

    out.witness_b = out.b.ovc_certify();
    out.witness_d = out.d.ovc_certify();
    if (!out.witness_d) {
        out.ok = false;
        out.diagnostic = "no overconvergence witness for d = " + out.d.str();
        return out;
    }
    out.ok = true;
    out.morphism = f;
    Series dcon = out.d;
    dcon.set_claim(RingClaim::gamma_con);
    out.morphism.f = {{dcon}, {Series::constant(prof, Coeff::one(ring))}};
    out.morphism.eigenvalue = mu;
    return out;
}

// ---------------------------------------------------------------------------
// Omega morphism descent (verification pipeline)

OmegaDescentReport descend_morphism_omega(const FModule& M, const SeriesVec& v, const Coeff& lam) {
    M.validate();
    const int N = M.profile().ring.N, e = M.profile().ring.e;
    OmegaDescentReport rep;

    {
        OmegaDescentStep st{"equivariance", false, ""};
        int rv = eigen_residual(M.A, v, lam);
        st.ok = rv >= N;
        st.detail = "F v - lam v residual valuation " + std::to_string(rv);
        rep.steps.push_back(st);
        if (!st.ok) { rep.ok = false; return rep; }
    }

    SlopeVector sv = newton_slopes(M);
    Rat l(lam.val(), e);
    {
        OmegaDescentStep st{"eigenvalue-slope", false, ""};
        int mult = 0;
        for (const auto& s : sv.slopes)
            if (s == l) ++mult;
        st.ok = (l == sv.min() || l == sv.max()) && mult == 1;
        st.detail = "slope " + l.str() + " multiplicity " + std::to_string(mult) + " in " + sv.str();
        rep.steps.push_back(st);
        if (!st.ok) { rep.ok = false; return rep; }
    }

    SubmoduleDescent sd;
    {
        OmegaDescentStep st{"submodule-descent", false, ""};
        try {
            sd = descend_submodule(M, v);
            st.ok = true;
            st.detail = "Omega after isogeny/rescaling pi^" + std::to_string(sd.isogeny_power) +
                        ", e-factor " + sd.e_factor.str();
            rep.isogeny_power = sd.isogeny_power;
        } catch (const Error& err) {
            st.detail = std::string(error_code_name(err.code())) + ": " + err.what();
        }
        rep.steps.push_back(st);
        if (!st.ok) { rep.ok = false; return rep; }
    }

    {
        OmegaDescentStep st{"splitting", false, ""};
        if (M.rank >= 2 && l == sv.max() && sv.min() != sv.max()) {
            try {
                SplitResult sr = split_extension(M, sd.generator);
                st.ok = sr.split;
                st.detail = sr.split ? "complement certified overconvergent" : sr.diagnostic;
            } catch (const Error& err) {
                st.detail = std::string(error_code_name(err.code())) + ": " + err.what();
            }
        } else {
            st.ok = true;
            st.detail = "not applicable (minimal slope, isoclinic, or rank 1)";
        }
        rep.steps.push_back(st);
        if (!st.ok) { rep.ok = false; return rep; }
    }

    {
        OmegaDescentStep st{"omega-membership", true, ""};
        st.detail = "generator coordinates supported on t^(>=0), residual valuation " +
                    std::to_string(sd.residual_val);
        rep.steps.push_back(st);
        rep.descended = sd.generator;
    }
    rep.ok = true;
    return rep;
}

// ---------------------------------------------------------------------------

KernelAnalysis morphism_kernel_analysis(const FModule& M, const SeriesVec& phi, const Coeff& lam,
                                        bool top_mode) {
    M.validate();
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N, e = prof.ring.e;
    if ((int)phi.size() != M.rank)
        throw Error(ErrorCode::InvariantViolation, "phi dimension mismatch");

    // phi(F e_j) = lam * phi(e_j)^sigma
    for (int j = 0; j < M.rank; ++j) {
        Series lhs = Series::zero(prof, RingClaim::tower);
        for (int i = 0; i < M.rank; ++i)
            if (!M.A[i][j].is_zero()) lhs = lhs + M.A[i][j] * phi[i];
        Series resid = lhs - phi[j].frobenius(1).scalar_mul(lam);
        if (resid.gauss_val() < N)
            throw Error(ErrorCode::EigenvalueMismatch,
                        "phi(F e_" + std::to_string(j) + ") != lam phi(e_" + std::to_string(j) +
                            ")^sigma: residual valuation " + std::to_string(resid.gauss_val()));
    }

    SlopeVector sv = newton_slopes(M);
    Rat l(lam.val(), e);
    Rat target = top_mode ? sv.max() : sv.min();
    if (l != target)
        throw Error(ErrorCode::EigenvalueMismatch,
                    "v(lam)/e = " + l.str() + " is not the extremal slope " + target.str());
    int mult = 0;
    for (const auto& s : sv.slopes)
        if (s == l) ++mult;
    if (mult != 1)
        throw Error(ErrorCode::MultiplicityViolation,
                    "slope " + l.str() + " has multiplicity " + std::to_string(mult));

    int i0 = 0, best = N + 1;
    for (int i = 0; i < M.rank; ++i)
        if (phi[i].gauss_val() < best) { best = phi[i].gauss_val(); i0 = i; }
    if (best > N)
        throw Error(ErrorCode::InvariantViolation, "phi is zero");

    KernelAnalysis out;
    out.slope = l;
    out.multiplicity_one = true;
    out.lambda = lam;
    out.generator.assign(M.rank, Series::zero(prof, RingClaim::tower));
    Series unit_part = phi[i0].pi_shift(-best);
    out.generator[i0] = unit_part.invert_unit();
    return out;
}

} // namespace isoslope
