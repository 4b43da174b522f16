#include "isoslope/matrix.hpp"

#include <algorithm>

namespace isoslope {

SeriesMat mat_zero(const PrecisionProfile& prof, int rows, int cols) {
    SeriesMat m(rows);
    for (auto& row : m) row.assign(cols, Series::zero(prof, RingClaim::omega));
    return m;
}

SeriesMat mat_identity(const PrecisionProfile& prof, int n) {
    SeriesMat m = mat_zero(prof, n, n);
    for (int i = 0; i < n; ++i)
        m[i][i] = Series::constant(prof, Coeff::one(prof.ring));
    return m;
}

SeriesMat mat_add(const SeriesMat& a, const SeriesMat& b) {
    SeriesMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

SeriesMat mat_sub(const SeriesMat& a, const SeriesMat& b) {
    SeriesMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] = a[i][j] - b[i][j];
    return r;
}

SeriesMat mat_mul(const SeriesMat& a, const SeriesMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    SeriesMat r(n);
    for (size_t i = 0; i < n; ++i) {
        r[i].reserve(m);
        for (size_t j = 0; j < m; ++j) {
            Series s = a[i][0] * b[0][j];
            for (size_t l = 1; l < k; ++l) s = s + a[i][l] * b[l][j];
            r[i].push_back(s);
        }
    }
    return r;
}

SeriesVec mat_vec(const SeriesMat& a, const SeriesVec& v) {
    SeriesVec r;
    r.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        Series s = a[i][0] * v[0];
        for (size_t l = 1; l < v.size(); ++l) s = s + a[i][l] * v[l];
        r.push_back(s);
    }
    return r;
}

SeriesMat mat_scalar(const SeriesMat& a, const Coeff& c) {
    SeriesMat r = a;
    for (auto& row : r)
        for (auto& s : row) s = s.scalar_mul(c);
    return r;
}

SeriesMat mat_frobenius(const SeriesMat& a, int n) {
    SeriesMat r = a;
    for (auto& row : r)
        for (auto& s : row) s = s.frobenius(n);
    return r;
}

SeriesVec vec_frobenius(const SeriesVec& v, int n) {
    SeriesVec r = v;
    for (auto& s : r) s = s.frobenius(n);
    return r;
}

SeriesVec vec_add(const SeriesVec& a, const SeriesVec& b) {
    SeriesVec r = a;
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

SeriesVec vec_sub(const SeriesVec& a, const SeriesVec& b) {
    SeriesVec r = a;
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

SeriesVec vec_scalar(const SeriesVec& a, const Coeff& c) {
    SeriesVec r = a;
    for (auto& s : r) s = s.scalar_mul(c);
    return r;
}

SeriesVec vec_scalar_series(const SeriesVec& a, const Series& s) {
    SeriesVec r = a;
    for (auto& x : r) x = x * s;
    return r;
}

bool vec_is_zero(const SeriesVec& v) {
    for (const auto& s : v)
        if (!s.is_zero()) return false;
    return true;
}

SeriesMat mat_residue(const SeriesMat& a) {
    SeriesMat r = a;
    for (auto& row : r)
        for (auto& s : row) s = s.residue();
    return r;
}

SeriesMat mat_transpose(const SeriesMat& a) {
    size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    SeriesMat r(m);
    for (size_t j = 0; j < m; ++j) {
        r[j].reserve(n);
        for (size_t i = 0; i < n; ++i) r[j].push_back(a[i][j]);
    }
    return r;
}

namespace {

SeriesMat strike(const SeriesMat& a, size_t row, size_t col) {
    SeriesMat r;
    for (size_t i = 0; i < a.size(); ++i) {
        if (i == row) continue;
        std::vector<Series> line;
        for (size_t j = 0; j < a[i].size(); ++j)
            if (j != col) line.push_back(a[i][j]);
        r.push_back(std::move(line));
    }
    return r;
}

} // namespace

Series det(const SeriesMat& a) {
    size_t n = a.size();
    if (n == 1) return a[0][0];
    const PrecisionProfile& prof = a[0][0].profile();
    Series acc = Series::zero(prof, RingClaim::omega);
    for (size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        Series term = a[0][j] * det(strike(a, 0, j));
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

SeriesMat adjugate(const SeriesMat& a) {
    size_t n = a.size();
    const PrecisionProfile& prof = a[0][0].profile();
    if (n == 1) return {{Series::constant(prof, Coeff::one(prof.ring))}};
    SeriesMat adj = mat_zero(prof, (int)n, (int)n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Series c = det(strike(a, i, j));
            if ((i + j) % 2 == 1) c = -c;
            adj[j][i] = c; // transpose of the cofactor matrix
        }
    return adj;
}

int mat_gauss_val(const SeriesMat& a) {
    int v = a.empty() ? 0 : a[0][0].profile().ring.N;
    for (const auto& row : a)
        for (const auto& s : row) v = std::min(v, s.gauss_val());
    return v;
}

ScaledInverse scaled_inverse(const SeriesMat& a, const Coeff& lam) {
    const PrecisionProfile& prof = a[0][0].profile();
    const int N = prof.ring.N;
    Series d = det(a);
    int vd = d.gauss_val();
    if (vd >= N) throw Error(ErrorCode::NotAUnit, "scaled_inverse: determinant is zero at working precision");
    Series du = d.pi_shift(-vd);                 // unit part of det
    Series duinv = du.invert_unit();
    SeriesMat adj = adjugate(a);
    int w = lam.val();
    Coeff u = lam.pi_shift(-w); // unit part of lambda
    ScaledInverse out;
    // entries: adj * u * duinv * pi^(w - vd)
    int shift = w - vd;
    out.B.resize(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < a.size(); ++j) {
            Series entry = (adj[i][j] * duinv).scalar_mul(u);
            entry = entry.pi_shift(shift); // throws PrecisionExhausted if not integral
            out.B[i].push_back(entry);
        }
    }
    out.precision = shift < 0 ? N + shift : N;
    return out;
}

namespace {

void subsets_rec(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if ((int)cur.size() == k) { out.push_back(cur); return; }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        subsets_rec(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    subsets_rec(n, k, 0, cur, out);
    return out;
}

Series submatrix_det(const SeriesMat& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    SeriesMat sub;
    for (int i : rows) {
        std::vector<Series> line;
        for (int j : cols) line.push_back(a[i][j]);
        sub.push_back(std::move(line));
    }
    return det(sub);
}

} // namespace

int minor_min_val(const SeriesMat& a, int k) {
    int n = (int)a.size();
    const int N = a[0][0].profile().ring.N;
    auto idx = subsets(n, k);
    int best = N;
    for (const auto& rows : idx)
        for (const auto& cols : idx) {
            Series m = submatrix_det(a, rows, cols);
            best = std::min(best, m.gauss_val());
            if (best == 0) return 0;
        }
    return best;
}

SeriesMat exterior_power_matrix(const SeriesMat& a, int k) {
    int n = (int)a.size();
    auto idx = subsets(n, k);
    const PrecisionProfile& prof = a[0][0].profile();
    SeriesMat r = mat_zero(prof, (int)idx.size(), (int)idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j)
            r[i][j] = submatrix_det(a, idx[i], idx[j]);
    return r;
}

} // namespace isoslope
