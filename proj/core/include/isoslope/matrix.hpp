#pragma once

#include <vector>

#include "isoslope/series.hpp"

namespace isoslope {

using SeriesVec = std::vector<Series>;
using SeriesMat = std::vector<std::vector<Series>>;

SeriesMat mat_zero(const PrecisionProfile& prof, int rows, int cols);
SeriesMat mat_identity(const PrecisionProfile& prof, int n);

SeriesMat mat_add(const SeriesMat& a, const SeriesMat& b);
SeriesMat mat_sub(const SeriesMat& a, const SeriesMat& b);
SeriesMat mat_mul(const SeriesMat& a, const SeriesMat& b);
SeriesVec mat_vec(const SeriesMat& a, const SeriesVec& v);
SeriesMat mat_scalar(const SeriesMat& a, const Coeff& c);
SeriesMat mat_frobenius(const SeriesMat& a, int n);
SeriesVec vec_frobenius(const SeriesVec& v, int n);
SeriesVec vec_add(const SeriesVec& a, const SeriesVec& b);
SeriesVec vec_sub(const SeriesVec& a, const SeriesVec& b);
SeriesVec vec_scalar(const SeriesVec& a, const Coeff& c);
SeriesVec vec_scalar_series(const SeriesVec& a, const Series& s);
bool vec_is_zero(const SeriesVec& v);

SeriesMat mat_residue(const SeriesMat& a);
SeriesMat mat_transpose(const SeriesMat& a);

// Laplace expansion; fine at desk rank.
Series det(const SeriesMat& a);
SeriesMat adjugate(const SeriesMat& a);

// min Gauss valuation over entries (N for the zero matrix)
int mat_gauss_val(const SeriesMat& a);

// lam * A^-1 for lam = pi^w * u.  Throws PrecisionExhausted when entries of
// lam * adj(A)/det(A) are not integral at the available precision; the
// returned precision field is the number of trusted pi-digits.
struct ScaledInverse {
    SeriesMat B;
    int precision;
};
ScaledInverse scaled_inverse(const SeriesMat& a, const Coeff& lam);

// min over i x i minors' Gauss valuations (capped at N)
int minor_min_val(const SeriesMat& a, int k);

// Exterior power matrix on the lex-ordered k-subset basis.
SeriesMat exterior_power_matrix(const SeriesMat& a, int k);

} // namespace isoslope
