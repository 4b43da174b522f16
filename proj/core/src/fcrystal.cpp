#include "isoslope/fcrystal.hpp"

#include <algorithm>

namespace isoslope {

namespace {

long long factorial(int n) {
    long long r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

bool is_const_series(const Series& s) {
    for (const auto& [e, c] : s.monomials())
        if (e != Rat(0)) return false;
    return true;
}

// Lower convex hull values for points (0, S_0=0), (1, S_1), ..., (r, S_r).
void convexify_partial_sums(std::vector<Rat>& S) {
    const int r = (int)S.size() - 1;
    // Andrew scan on exact rationals
    std::vector<int> hull;
    for (int i = 0; i <= r; ++i) {
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            // cross product (b-a) x (i-b) <= 0 means b is above the chord
            Rat lhs = (S[b] - S[a]) * Rat(i - b);
            Rat rhs = (S[i] - S[b]) * Rat(b - a);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<Rat> out(S.size());
    for (size_t h = 0; h + 1 < hull.size(); ++h) {
        int a = hull[h], b = hull[h + 1];
        for (int i = a; i <= b; ++i)
            out[i] = S[a] + (S[b] - S[a]) * Rat(i - a) / Rat(b - a);
    }
    out[r] = S[r];
    S = out;
}

} // namespace

void FModule::validate() const {
    if (rank < 1 || (int)A.size() != rank)
        throw Error(ErrorCode::InvariantViolation, "FModule rank does not match matrix");
    for (const auto& row : A)
        if ((int)row.size() != rank)
            throw Error(ErrorCode::InvariantViolation, "FModule matrix is not square");
    if (claim == RingClaim::omega) {
        for (const auto& row : A)
            for (const auto& s : row)
                for (const auto& [e, c] : s.monomials())
                    if (!e.is_integer() || e < Rat(0))
                        throw Error(ErrorCode::InvariantViolation,
                                    "omega claim with exponent t^(" + e.str() + ")");
    }
}

bool SlopeVector::all_equal() const {
    for (const auto& s : slopes)
        if (s != slopes[0]) return false;
    return true;
}

std::string SlopeVector::str() const {
    std::string out = "(";
    for (size_t i = 0; i < slopes.size(); ++i) {
        if (i) out += ", ";
        out += slopes[i].str();
    }
    return out + ")";
}

SlopeVector Filtration::slope_vector() const {
    SlopeVector sv;
    for (const auto& st : stages) sv.slopes.push_back(st.slope);
    std::sort(sv.slopes.begin(), sv.slopes.end());
    return sv;
}

int eigen_residual(const SeriesMat& A, const SeriesVec& v, const Coeff& lam) {
    SeriesVec lhs = mat_vec(A, vec_frobenius(v, 1));
    SeriesVec rhs = vec_scalar(v, lam);
    SeriesVec diff = vec_sub(lhs, rhs);
    int val = v[0].profile().ring.N;
    for (const auto& s : diff) val = std::min(val, s.gauss_val());
    return val;
}

// ---------------------------------------------------------------------------

SlopeVector newton_slopes(const FModule& M) {
    M.validate();
    const int r = M.rank;
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N, e = prof.ring.e;

    Series dA = det(M.A);
    int vdet = dA.gauss_val();
    if (vdet >= N)
        throw Error(ErrorCode::Unstable, "determinant of A vanishes at working precision");
    Rat total(vdet, e);

    if (r == 1) {
        SlopeVector sv;
        sv.slopes.push_back(total);
        return sv;
    }

    const long long D = (long long)e * factorial(r); // slope denominator bound
    const long long n_max = 4LL * r * N + 8;

    std::vector<SeriesMat> An; // An[k] = A * A^sigma * ... * A^{sigma^k}
    An.push_back(M.A);
    auto extend = [&](long long upto) {
        while ((long long)An.size() < upto)
            An.push_back(mat_mul(An.back(), mat_frobenius(M.A, (int)An.size())));
    };
    auto wvals = [&](long long n) {
        extend(n);
        const SeriesMat& X = An[n - 1];
        std::vector<int> w(r + 1, 0);
        for (int i = 1; i < r; ++i) w[i] = minor_min_val(X, i);
        // the top minor is the determinant, multiplicative under the twisted
        // product, so its valuation is known exactly at any n
        w[r] = (int)(n * vdet);
        return w;
    };

    std::vector<Rat> prev;
    std::vector<Rat> candidate;
    bool have_prev = false, have_candidate = false;
    for (long long n = 1; 2 * n <= n_max; ++n) {
        // the difference w(2n) - w(n) cancels the bounded offset in
        // w_i(n) = n * (slope partial sum) + O(1)
        auto w1 = wvals(n), w2 = wvals(2 * n);
        bool censored = false;
        for (int i = 1; i < r; ++i)
            if (w2[i] >= N) censored = true;
        if (censored) break;
        std::vector<Rat> S(r + 1, Rat(0));
        for (int i = 1; i <= r; ++i) S[i] = Rat(w2[i] - w1[i], n * e);
        convexify_partial_sums(S);
        std::vector<Rat> sl(r);
        for (int i = 1; i <= r; ++i) sl[i - 1] = round_to_denominator(S[i] - S[i - 1], D);
        std::sort(sl.begin(), sl.end());
        Rat sum(0);
        for (const auto& s : sl) sum = sum + s;
        bool detok = (sum == total);
        if (detok && have_prev && sl == prev) {
            SlopeVector sv;
            sv.slopes = sl;
            return sv;
        }
        if (detok) {
            candidate = sl;
            have_candidate = true;
        }
        prev = sl;
        have_prev = true;
    }
    // precision-limited: accept the last determinant-consistent estimate
    if (have_candidate) {
        SlopeVector sv;
        sv.slopes = candidate;
        return sv;
    }
    throw Error(ErrorCode::Unstable,
                "slope estimates did not stabilize before exhausting pi-precision");
}

// ---------------------------------------------------------------------------

namespace {

// P = identity with column `col` replaced by v; det = v[col] (must be a unit).
SeriesMat column_replacement(const PrecisionProfile& prof, const SeriesVec& v, int col) {
    SeriesMat P = mat_identity(prof, (int)v.size());
    for (size_t i = 0; i < v.size(); ++i) P[i][col] = v[i];
    return P;
}

SeriesMat strike_index(const SeriesMat& A, int idx) {
    SeriesMat out;
    for (int i = 0; i < (int)A.size(); ++i) {
        if (i == idx) continue;
        std::vector<Series> row;
        for (int j = 0; j < (int)A.size(); ++j)
            if (j != idx) row.push_back(A[i][j]);
        out.push_back(std::move(row));
    }
    return out;
}

int integral_eigenvalue_exponent(const Rat& slope, int e) {
    Rat w = slope * Rat(e);
    if (!w.is_integer() || w < Rat(0)) {
        long long need = (long long)e * w.den;
        throw Error(ErrorCode::NeedsRamification,
                    w < Rat(0)
                        ? "eigenvalue pi^(" + w.str() + ") is not integral; apply a Tate twist first"
                        : "eigenvalue pi^(" + w.str() + ") needs ramification index e = " +
                              std::to_string(need));
    }
    return (int)w.num;
}

// v^sigma = B v digit lift (inverse-Frobenius side).  Each digit chain costs
// exponent levels, so the lift may run out of levels before j_target digits;
// *digits_out reports how many digits are actually certified.  As in
// eigen_lift, per-digit constant obstructions at the pivot row are eigenvalue
// digits and accumulate into *u_out:  w^sigma = u B w.
SeriesVec eigen_lift_descending(const SeriesMat& B, const SeriesVec& v0, int j_target,
                                int* digits_out, int pivot = -1, Coeff* u_out = nullptr,
                                const ResidueSolveOptions& opt = {}) {
    const int n = (int)v0.size();
    const PrecisionProfile& prof = v0[0].profile();
    SeriesMat Bbar = mat_residue(B);
    SeriesVec w = v0;
    Coeff u = Coeff::one(prof.ring);
    std::vector<Series> wbar_sig; // shift direction is w-bar^sigma here
    if (pivot >= 0) {
        wbar_sig.reserve(n);
        for (int i = 0; i < n; ++i) wbar_sig.push_back(v0[i].residue().frobenius(1));
    }
    if (digits_out) *digits_out = j_target;
    for (int j = 1; j < j_target; ++j) {
        SeriesVec r(n, Series::zero(prof, RingClaim::tower));
        bool clean = true;
        for (int i = 0; i < n; ++i) {
            Series acc = w[i].frobenius(1);
            Series bw = Series::zero(prof, RingClaim::tower);
            for (int k = 0; k < n; ++k)
                if (!B[i][k].is_zero()) bw = bw + B[i][k] * w[k];
            acc = acc - bw.scalar_mul(u);
            r[i] = acc;
            if (!acc.is_zero()) clean = false;
        }
        if (clean) break;
        std::vector<Series> cbar(n, Series::zero(residue_profile(prof), RingClaim::tower));
        for (int i = 0; i < n; ++i) {
            if (r[i].is_zero()) continue;
            if (r[i].gauss_val() < j)
                throw Error(ErrorCode::PrecisionExhausted, "descending lift residual below expected digit");
            cbar[i] = (-r[i]).pi_shift(-j).residue();
        }
        ResidueAbsorb ab;
        ab.row = pivot;
        ab.basis = &wbar_sig;
        std::vector<Series> x;
        try {
            x = residue_affine_descending(Bbar, cbar, opt, nullptr, pivot >= 0 ? &ab : nullptr);
        } catch (const Error& err) {
            // the exact ring has unbounded exponent levels: exhausting the
            // profile's K mid-lift is a truncation artifact, not an obstruction
            if (err.code() != ErrorCode::ExponentLevelExceeded) throw;
            if (digits_out) *digits_out = j;
            break;
        }
        if (ab.s) u = u + Coeff::pi_pow(prof.ring, j, ab.s);
        for (int i = 0; i < n; ++i)
            w[i] = w[i] + Series::lift_residue(x[i], prof).pi_shift(j);
    }
    if (u_out) *u_out = u;
    return w;
}

Provenance vector_provenance(const SeriesVec& v) {
    Provenance pr;
    for (const auto& s : v) pr = pr.merged(s.provenance());
    return pr;
}

} // namespace

Filtration ascending_filtration(const FModule& M) {
    M.validate();
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N, e = prof.ring.e;

    Filtration out;
    FModule cur = M;
    SeriesMat E = mat_identity(prof, M.rank); // cur basis -> original coordinates

    while (cur.rank >= 1) {
        SlopeVector sv = newton_slopes(cur);
        Rat l1 = sv.min();
        int w = integral_eigenvalue_exponent(l1, e);

        SeriesMat B0(cur.rank, std::vector<Series>(cur.rank));
        try {
            for (int i = 0; i < cur.rank; ++i)
                for (int j = 0; j < cur.rank; ++j) B0[i][j] = cur.A[i][j].pi_shift(-w);
        } catch (const Error&) {
            throw Error(ErrorCode::Unstable,
                        "Frobenius matrix is not divisible by pi^" + std::to_string(w) +
                            " in this basis");
        }
        SeriesMat Bbar = mat_residue(B0);

        bool found = false;
        std::optional<Error> last;
        for (int piv = cur.rank - 1; piv >= 0 && !found; --piv) {
            if (!is_const_series(Bbar[piv][piv])) continue;
            int g = Bbar[piv][piv].part_constant().residue();
            if (g == 0) continue;
            Coeff gl(prof.ring, g);
            Coeff lam = gl.pi_shift(w);
            SeriesMat Bs = mat_scalar(Bbar, Coeff(residue_profile(prof).ring, mod_inverse(g, prof.ring.p)));
            try {
                int pv = 0;
                SeriesVec v0bar = residue_fixed_vector(Bs, false, &pv);
                SeriesVec v0(cur.rank, Series::zero(prof, RingClaim::tower));
                for (int i = 0; i < cur.rank; ++i) v0[i] = Series::lift_residue(v0bar[i], prof);
                Coeff usc = Coeff::one(prof.ring);
                SeriesVec v = eigen_lift(cur.A, lam, v0, N - w, {}, pv, &usc);
                lam = lam * usc;
                Provenance pr = vector_provenance(v);
                if (pr.uses_p_root)
                    throw Error(ErrorCode::NoSolutionAtLevel,
                                "ascending stage required an inverse-Frobenius step");

                FiltrationStage st;
                st.slope = l1;
                st.lambda = lam;
                st.certified_precision = N - w;
                st.residual_val = eigen_residual(cur.A, v, lam);
                st.prov = pr;
                for (const auto& s : v) {
                    auto wit = s.ovc_certify();
                    if (!wit) st.gamma_only = true;
                    st.witnesses.push_back(wit);
                }
                st.basis = mat_vec(E, v);
                out.stages.push_back(std::move(st));

                if (cur.rank == 1) return out;
                SeriesMat P = column_replacement(prof, v, pv);
                SeriesMat Pinv = scaled_inverse(P, Coeff::one(prof.ring)).B;
                SeriesMat Ap = mat_mul(Pinv, mat_mul(cur.A, mat_frobenius(P, 1)));
                SeriesMat EP = mat_mul(E, P);
                // drop the stage column/row
                SeriesMat Enew;
                for (int i = 0; i < (int)EP.size(); ++i) {
                    std::vector<Series> row;
                    for (int j = 0; j < cur.rank; ++j)
                        if (j != pv) row.push_back(EP[i][j]);
                    Enew.push_back(std::move(row));
                }
                E = std::move(Enew);
                cur.A = strike_index(Ap, pv);
                cur.rank -= 1;
                cur.claim = RingClaim::tower;
                found = true;
            } catch (const Error& err) {
                last = err;
            }
        }
        if (!found) {
            if (last) throw *last;
            throw Error(ErrorCode::NoSolutionAtLevel,
                        "no unit diagonal residue at the minimal slope; basis not adapted");
        }
    }
    return out;
}

Filtration descending_filtration(const FModule& M) {
    M.validate();
    if (M.claim != RingClaim::gamma_con && M.claim != RingClaim::omega &&
        M.claim != RingClaim::gamma)
        throw Error(ErrorCode::IncompatibleProfiles,
                    "descending filtration expects a gamma_con or omega crystal");
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N, e = prof.ring.e, p = prof.ring.p;

    Filtration out;
    FModule cur = M;
    SeriesMat E = mat_identity(prof, M.rank);

    while (cur.rank >= 1) {
        SlopeVector sv = newton_slopes(cur);
        Rat ltop = sv.max();
        int w = integral_eigenvalue_exponent(ltop, e);

        ScaledInverse si;
        try {
            si = scaled_inverse(cur.A, Coeff::pi_pow(prof.ring, w));
        } catch (const Error&) {
            throw Error(ErrorCode::Unstable,
                        "pi^" + std::to_string(w) + " * A^-1 is not integral in this basis");
        }
        SeriesMat Bbar = mat_residue(si.B);

        bool found = false;
        std::optional<Error> last;
        for (int piv = cur.rank - 1; piv >= 0 && !found; --piv) {
            if (!is_const_series(Bbar[piv][piv])) continue;
            int g = Bbar[piv][piv].part_constant().residue();
            if (g == 0) continue;
            // normalize the pivot diagonal to 1:  v^sigma = Bs v, Bs = B / g
            Coeff glift(prof.ring, g);
            Coeff lam = glift.inv().pi_shift(w); // A v^sigma = lam v
            SeriesMat Bs = mat_scalar(si.B, glift.inv());
            SeriesMat Bsbar = mat_residue(Bs);
            try {
                int pv = 0;
                SeriesVec v0bar = residue_fixed_vector(Bsbar, true, &pv);
                SeriesVec v0(cur.rank, Series::zero(prof, RingClaim::tower));
                for (int i = 0; i < cur.rank; ++i) v0[i] = Series::lift_residue(v0bar[i], prof);
                int digits = si.precision;
                Coeff usc = Coeff::one(prof.ring);
                SeriesVec v = eigen_lift_descending(Bs, v0, si.precision, &digits, pv, &usc);
                lam = lam * usc;

                FiltrationStage st;
                st.slope = ltop;
                st.lambda = lam;
                st.certified_precision = digits;
                st.residual_val = eigen_residual(cur.A, v, lam);
                st.prov = vector_provenance(v);
                for (const auto& s : v) {
                    auto wit = s.ovc_certify();
                    if (!wit) st.gamma_only = true;
                    st.witnesses.push_back(wit);
                }

                // the lemma's a-priori bound, with (c, d) measured from Bs
                Rat bc(0), bd(0);
                bool have_d = false;
                for (const auto& row : Bs)
                    for (const auto& s : row) {
                        auto v0n = s.semi_valuation(0);
                        if (v0n && (!have_d || *v0n < bd)) { bd = *v0n; have_d = true; }
                    }
                if (bd > Rat(0)) bd = Rat(0);
                for (int n = 1; n < N; ++n)
                    for (const auto& row : Bs)
                        for (const auto& s : row) {
                            auto vn = s.semi_valuation(n);
                            if (!vn) continue;
                            Rat c_needed = (bd - *vn) / Rat(n);
                            if (bc < c_needed) bc = c_needed;
                        }
                st.bound_checked = true;
                st.bound_c = bc;
                st.bound_d = bd;
                for (const auto& s : v)
                    for (int n = 0; n < N; ++n) {
                        auto vn = s.semi_valuation(n);
                        if (!vn) continue;
                        Rat lower = (-bc * Rat(n) + bd) / Rat(p - 1);
                        if (*vn < lower)
                            throw Error(ErrorCode::BoundViolated,
                                        "eigenvector semi-valuation v_" + std::to_string(n) +
                                            " = " + vn->str() + " breaks the contracted bound " +
                                            lower.str());
                    }

                st.basis = mat_vec(E, v);
                out.stages.push_back(std::move(st));

                if (cur.rank == 1) return out;
                SeriesMat P = column_replacement(prof, v, pv);
                SeriesMat Pinv = scaled_inverse(P, Coeff::one(prof.ring)).B;
                SeriesMat Ap = mat_mul(Pinv, mat_mul(cur.A, mat_frobenius(P, 1)));
                SeriesMat EP = mat_mul(E, P);
                SeriesMat Enew;
                for (int i = 0; i < (int)EP.size(); ++i) {
                    std::vector<Series> row;
                    for (int j = 0; j < cur.rank; ++j)
                        if (j != pv) row.push_back(EP[i][j]);
                    Enew.push_back(std::move(row));
                }
                E = std::move(Enew);
                cur.A = strike_index(Ap, pv);
                cur.rank -= 1;
                cur.claim = RingClaim::tower;
                found = true;
            } catch (const Error& err) {
                if (err.code() == ErrorCode::BoundViolated) throw;
                last = err;
            }
        }
        if (!found) {
            if (last) throw *last;
            throw Error(ErrorCode::NoSolutionAtLevel,
                        "no unit diagonal residue at the top slope; basis not adapted");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Coeff> constant_decompose(const FModule& M, const SeriesVec& v, const Coeff& lam) {
    M.validate();
    const int N = M.profile().ring.N;
    std::vector<Coeff> lams;
    for (int i = 0; i < M.rank; ++i) {
        for (int j = 0; j < M.rank; ++j)
            if (i != j && !M.A[i][j].is_zero())
                throw Error(ErrorCode::IncompatibleProfiles, "constant_decompose expects diagonal A");
        if (!is_const_series(M.A[i][i]))
            throw Error(ErrorCode::IncompatibleProfiles, "constant_decompose expects constant A");
        lams.push_back(M.A[i][i].part_constant());
    }
    std::vector<Coeff> out;
    for (int i = 0; i < M.rank; ++i) {
        if (!is_const_series(v[i]))
            throw Error(ErrorCode::NotAnEigenvector,
                        "coordinate " + std::to_string(i) + " is not constant mod pi^" +
                            std::to_string(N));
        Coeff ci = v[i].part_constant();
        if (!ci.is_zero()) {
            if (lam.val() != lams[i].val())
                throw Error(ErrorCode::NotAnEigenvector,
                            "coordinate " + std::to_string(i) +
                                " must vanish: eigenvalue valuations differ");
            if (lams[i] * ci != lam * ci)
                throw Error(ErrorCode::NotAnEigenvector,
                            "coordinate " + std::to_string(i) + " breaks the eigen relation");
        }
        out.push_back(ci);
    }
    return out;
}

// ---------------------------------------------------------------------------

UnipotenceResult unipotence_test(const FModule& M) {
    M.validate();
    const PrecisionProfile& prof = M.profile();
    const int N = prof.ring.N;

    UnipotenceResult out;
    out.slopes = newton_slopes(M);
    for (const auto& s : out.slopes.slopes)
        if (s != Rat(0)) {
            out.obstruction = "nonzero slopes " + out.slopes.str();
            return out;
        }

    ResidueSolveOptions strict;
    strict.strict = true;

    FModule cur = M;
    SeriesMat E = mat_identity(prof, M.rank);
    std::vector<SeriesVec> flags;
    while (cur.rank >= 1) {
        SeriesMat Bbar = mat_residue(cur.A);
        SeriesVec v;
        int pv = 0;
        try {
            SeriesVec v0bar = residue_fixed_vector(Bbar, false, &pv, strict);
            SeriesVec v0(cur.rank, Series::zero(prof, RingClaim::tower));
            for (int i = 0; i < cur.rank; ++i) v0[i] = Series::lift_residue(v0bar[i], prof);
            v = eigen_lift(cur.A, Coeff::one(prof.ring), v0, N, strict);
        } catch (const Error& err) {
            out.obstruction = std::string(error_code_name(err.code())) + ": " + err.what();
            return out;
        }
        flags.push_back(mat_vec(E, v));
        if (cur.rank == 1) break;
        SeriesMat P = column_replacement(prof, v, pv);
        SeriesMat Pinv = scaled_inverse(P, Coeff::one(prof.ring)).B;
        SeriesMat Ap = mat_mul(Pinv, mat_mul(cur.A, mat_frobenius(P, 1)));
        SeriesMat EP = mat_mul(E, P);
        SeriesMat Enew;
        for (int i = 0; i < (int)EP.size(); ++i) {
            std::vector<Series> row;
            for (int j = 0; j < cur.rank; ++j)
                if (j != pv) row.push_back(EP[i][j]);
            Enew.push_back(std::move(row));
        }
        E = std::move(Enew);
        cur.A = strike_index(Ap, pv);
        cur.rank -= 1;
    }

    // flag basis: stage vectors in reverse extraction order give the unit
    // upper-triangular form (first extracted = first flag vector).
    out.flag_basis = mat_zero(prof, M.rank, M.rank);
    for (int j = 0; j < M.rank; ++j)
        for (int i = 0; i < M.rank; ++i) out.flag_basis[i][j] = flags[j][i];
    // verify unit-upper-triangular Frobenius in the flag basis
    SeriesMat Pfull = out.flag_basis;
    SeriesMat T = mat_mul(scaled_inverse(Pfull, Coeff::one(prof.ring)).B,
                          mat_mul(M.A, mat_frobenius(Pfull, 1)));
    for (int i = 0; i < M.rank; ++i) {
        Series diag = T[i][i] - Series::constant(prof, Coeff::one(prof.ring));
        if (diag.gauss_val() < N)
            throw Error(ErrorCode::InvariantViolation, "flag basis diagonal is not 1");
        for (int j = 0; j < i; ++j)
            if (T[i][j].gauss_val() < N)
                throw Error(ErrorCode::InvariantViolation, "flag basis is not upper triangular");
    }
    out.unipotent = true;
    return out;
}

// ---------------------------------------------------------------------------

int check_fnabla_compat(const FModule& M, const NablaStructure& nabla) {
    M.validate();
    const PrecisionProfile& prof = M.profile();
    const int n = M.rank;
    SeriesMat nablaA(n, std::vector<Series>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) nablaA[i][j] = M.A[i][j].nabla();
    Coeff pc(prof.ring, prof.ring.p);
    SeriesMat rhs = mat_scalar(mat_mul(M.A, mat_frobenius(nabla.G, 1)), pc);
    SeriesMat resid = mat_sub(mat_add(nablaA, mat_mul(nabla.G, M.A)), rhs);
    return mat_gauss_val(resid);
}

// ---------------------------------------------------------------------------

FModule direct_sum(const FModule& a, const FModule& b) {
    const PrecisionProfile& prof = a.profile();
    if (prof != b.profile())
        throw Error(ErrorCode::IncompatibleProfiles, "direct_sum profile mismatch");
    FModule out;
    out.rank = a.rank + b.rank;
    out.claim = std::max(a.claim, b.claim);
    out.twist = 0;
    out.A = mat_zero(prof, out.rank, out.rank);
    for (int i = 0; i < a.rank; ++i)
        for (int j = 0; j < a.rank; ++j) out.A[i][j] = a.A[i][j];
    for (int i = 0; i < b.rank; ++i)
        for (int j = 0; j < b.rank; ++j) out.A[a.rank + i][a.rank + j] = b.A[i][j];
    return out;
}

FModule tate_twist(const FModule& m, int l) {
    FModule out = m;
    out.twist += l;
    Coeff f = Coeff::pi_pow(m.profile().ring, m.profile().ring.e * l);
    for (auto& row : out.A)
        for (auto& s : row) s = s.scalar_mul(f);
    return out;
}

FModule exterior_power(const FModule& m, int k) {
    if (k < 1 || k > m.rank)
        throw Error(ErrorCode::InvariantViolation, "exterior power index out of range");
    FModule out;
    out.A = exterior_power_matrix(m.A, k);
    out.rank = (int)out.A.size();
    out.claim = m.claim;
    out.twist = 0;
    return out;
}

FModule dual(const FModule& m, int l) {
    Coeff lam = Coeff::pi_pow(m.profile().ring, m.profile().ring.e * l);
    FModule out;
    out.A = mat_transpose(scaled_inverse(m.A, lam).B);
    out.rank = m.rank;
    out.claim = m.claim;
    out.twist = -m.twist + l;
    return out;
}

} // namespace isoslope
