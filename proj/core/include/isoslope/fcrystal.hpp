#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isoslope/matrix.hpp"
#include "isoslope/sigma_solve.hpp"

namespace isoslope {

// F e_j = sum_i A[i][j] e_i; on coordinate vectors F acts as v -> A v^sigma_t.
struct FModule {
    int rank = 1;
    SeriesMat A;
    RingClaim claim = RingClaim::gamma_con;
    int twist = 0;

    const PrecisionProfile& profile() const { return A[0][0].profile(); }
    void validate() const;
};

// nabla e_j = sum_i G[i][j] e_i, extended by nabla(x m) = (nabla x) m + x nabla m.
struct NablaStructure {
    SeriesMat G;
};

struct SlopeVector {
    std::vector<Rat> slopes; // nondecreasing, length = rank

    Rat min() const { return slopes.front(); }
    Rat max() const { return slopes.back(); }
    bool all_equal() const;
    std::string str() const;
};

struct FiltrationStage {
    SeriesVec basis;      // one vector per stage, in the original coordinates
    Rat slope;
    Coeff lambda;         // eigenvalue used for the stage lift
    int residual_val = 0; // Gauss valuation of A v^sigma - lambda v (>= certified_precision when clean)
    int certified_precision = 0;
    std::vector<std::optional<OvcWitness>> witnesses; // per coordinate
    Provenance prov;
    bool gamma_only = false; // an ovc certification failed on some coordinate

    // descending side: the lemma's a-priori semi-valuation bound, measured
    // from B = lambda * A^-1 as v_n(B_jk) >= -c*n + d.
    bool bound_checked = false;
    Rat bound_c;
    Rat bound_d;
};

struct Filtration {
    std::vector<FiltrationStage> stages;
    SlopeVector slope_vector() const;
};

struct MorphismCandidate {
    FModule source;
    FModule target;
    SeriesMat f;          // target-rank x source-rank
    std::optional<Coeff> eigenvalue; // lambda when viewed inside Hom = source* (x) target
};

// ---------------------------------------------------------------------------

SlopeVector newton_slopes(const FModule& M);

Filtration ascending_filtration(const FModule& M);
Filtration descending_filtration(const FModule& M);

// A diagonal with constant entries; v with A v^sigma = lam v mod precision.
std::vector<Coeff> constant_decompose(const FModule& M, const SeriesVec& v, const Coeff& lam);

// U = sum_m pi^-denom[m] * coeffs[m] * t^m with A U^sigma = U A(0) mod t^t_prec.
struct DworkResult {
    std::vector<std::vector<std::vector<Coeff>>> coeffs; // [m][i][j]
    std::vector<int> denom;                              // pi-denominator per degree
    std::vector<std::vector<Coeff>> A0;
    int t_prec = 0;
    int max_denom = 0;

    // residual Gauss valuation of A U^sigma - U A0 compared degree by degree
    int verify(const FModule& M) const;
    // numerator of the (i,j) entry's t^m coefficient over the common pi-denominator
    std::string entry_str(int i, int j, const PrecisionProfile& prof) const;
};

DworkResult dwork_trick(const FModule& M, int t_prec);

struct EfFactorization {
    Series e; // Gamma_con side: exponents <= 0 up to a single monomial t^v factor
    Series f; // Omega_an side: exponents >= 0, f(0) = 1
};

EfFactorization ef_factorize(const Series& d);

struct SubmoduleDescent {
    SeriesVec generator;       // over Omega, original coordinates
    Series eigenvalue;         // k with F g = k g, k over Omega
    Series e_factor;           // the Gamma_con^* unit divided out of v
    int isogeny_power = 0;     // pi-power cleared from v before descending
    int residual_val = 0;      // Gauss valuation of A g^sigma - k g
    bool direct_summand = false;
};

SubmoduleDescent descend_submodule(const FModule& M, const SeriesVec& v);

struct SplitResult {
    bool split = false;
    SeriesVec complement;      // complement generator(s) in original coordinates
    Series d;                  // the sigma-linear solution in normal form
    std::optional<OvcWitness> witness;
    int isogeny_power = 0;
    std::string diagnostic;    // set when !split: evidence description
    SlopeVector sub_slopes;
    SlopeVector quot_slopes;
};

SplitResult split_extension(const FModule& M, const SeriesVec& sub_basis);

struct TwoSlopeDescent {
    bool ok = false;
    Series d;                  // off-diagonal of the descended morphism
    Series b;                  // nabla d, solved independently
    std::optional<OvcWitness> witness_d;
    std::optional<OvcWitness> witness_b;
    std::string diagnostic;
    MorphismCandidate morphism;
};

TwoSlopeDescent descend_morphism_twoslope(const MorphismCandidate& f, const NablaStructure& nabla);

struct OmegaDescentStep {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct OmegaDescentReport {
    bool ok = false;
    std::vector<OmegaDescentStep> steps;
    int isogeny_power = 0;
    SeriesVec descended; // v rewritten over Omega when ok
};

OmegaDescentReport descend_morphism_omega(const FModule& M, const SeriesVec& v, const Coeff& lam);

struct KernelAnalysis {
    Rat slope;
    bool multiplicity_one = false;
    SeriesVec generator; // of phi^-1(Gamma_con approximation)
    Coeff lambda;
};

KernelAnalysis morphism_kernel_analysis(const FModule& M, const SeriesVec& phi, const Coeff& lam,
                                        bool top_mode = true);

struct UnipotenceResult {
    bool unipotent = false;
    SeriesMat flag_basis; // columns = flag vectors (unit upper triangular Frobenius)
    SlopeVector slopes;
    std::string obstruction;      // empty when unipotent
    std::optional<Series> evidence;
};

UnipotenceResult unipotence_test(const FModule& M);

// Gauss valuation of nabla(A) + G*A - p*A*G^sigma; >= N means compatible.
int check_fnabla_compat(const FModule& M, const NablaStructure& nabla);

// ---------------------------------------------------------------------------
// Constructions.
FModule direct_sum(const FModule& a, const FModule& b);
FModule tate_twist(const FModule& m, int l);
FModule exterior_power(const FModule& m, int k);
FModule dual(const FModule& m, int l); // M*(l): A -> p^l (A^-1)^T

// Residual of the eigen relation A v^sigma - lam v (Gauss valuation; N if 0).
int eigen_residual(const SeriesMat& A, const SeriesVec& v, const Coeff& lam);

} // namespace isoslope
