#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isoslope/coeff.hpp"
#include "isoslope/rational.hpp"

namespace isoslope {

// Where an element claims to live in the ring tower.  Ordered from the most
// restrictive claim to the most general one; arithmetic takes the weakest
// claim consistent with its inputs and the exponents of the result.
enum class RingClaim { omega, gamma_con, gamma, gamma_an_con, tower };

const char* ring_claim_name(RingClaim c);
RingClaim ring_claim_from_name(const std::string& s);

struct PrecisionProfile {
    CoeffRing ring;
    int K = 0;        // exponents lie in p^-K * Z
    Rat t_lo{-16, 1}; // window floor
    Rat t_hi{16, 1};  // window ceiling

    void validate() const;
    long long level_denominator() const { return ipow(ring.p, K); }
    bool exponent_in_level(const Rat& e) const { return level_denominator() % e.den == 0; }
    bool exponent_in_window(const Rat& e) const { return t_lo <= e && e <= t_hi; }

    friend bool operator==(const PrecisionProfile& a, const PrecisionProfile& b) {
        return a.ring == b.ring && a.K == b.K && a.t_lo == b.t_lo && a.t_hi == b.t_hi;
    }
    friend bool operator!=(const PrecisionProfile& a, const PrecisionProfile& b) { return !(a == b); }
};

struct Provenance {
    bool uses_p_root = false;
    bool uses_artin_schreier = false;

    Provenance merged(const Provenance& o) const {
        return {uses_p_root || o.uses_p_root, uses_artin_schreier || o.uses_artin_schreier};
    }
    std::string str() const;
};

// Overconvergence certificate: claims v_pi(x_{-i}) >= a*i - b for every
// represented monomial of negative exponent -i.
struct OvcWitness {
    Rat a;
    Rat b;
    bool window_limited = false;
};

// Sparse truncated generalized Laurent series: finitely many monomials with
// exponents in p^-K * Z inside the window, coefficients in O/pi^N.
class Series {
public:
    Series() = default;
    explicit Series(const PrecisionProfile& prof, RingClaim claim = RingClaim::gamma)
        : prof_(prof), claim_(claim) {}

    static Series zero(const PrecisionProfile& prof, RingClaim claim = RingClaim::gamma);
    static Series constant(const PrecisionProfile& prof, const Coeff& c,
                           RingClaim claim = RingClaim::omega);
    static Series monomial(const PrecisionProfile& prof, const Rat& exp, const Coeff& c);

    const PrecisionProfile& profile() const { return prof_; }
    const std::map<Rat, Coeff>& monomials() const { return mono_; }
    RingClaim claim() const { return claim_; }
    void set_claim(RingClaim c) { claim_ = c; }
    Provenance provenance() const { return prov_; }
    void merge_provenance(const Provenance& p) { prov_ = prov_.merged(p); }
    bool truncated() const { return truncated_; }
    void mark_truncated() { truncated_ = true; }

    bool is_zero() const { return mono_.empty(); }
    Coeff coeff_at(const Rat& exp) const;
    // Insert/accumulate a monomial (window and level checked; out-of-window
    // content sets the truncation flag instead of being stored).
    void add_monomial(const Rat& exp, const Coeff& c);

    // Gauss valuation: min pi-valuation over coefficients; N for zero.
    int gauss_val() const;
    // Leading monomial: among minimal-valuation monomials, the one of least
    // exponent.  Throws NotAUnit on the zero series.
    std::pair<Rat, Coeff> leading() const;

    Series operator-() const;
    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);
    friend Series operator*(const Series& a, const Series& b);
    Series scalar_mul(const Coeff& c) const;
    // Newton-iteration inverse of a unit (leading coefficient a unit mod pi).
    Series invert_unit(int max_iter = 0) const;
    // Divide every coefficient by a constant (precision drops by val(c)).
    Series div_coeff(const Coeff& c) const;
    // Multiply every coefficient by pi^k (k < 0 requires exact divisibility).
    Series pi_shift(int k) const;

    // sigma_t^n: exponents multiply by p^n.  n < 0 deepens the exponent level
    // and sets uses_p_root when a non-integral exponent appears.
    Series frobenius(int n) const;
    // nabla = t d/dt on monomials.
    Series nabla() const;

    // min{ exponent i : v_pi(coeff_i) <= n }, +infinity (nullopt) if none.
    std::optional<Rat> semi_valuation(int n) const;

    // Newton-polygon overconvergence certification.  a_min <= 0 selects the
    // default threshold 1/(4*e*max(K,1)*N).
    std::optional<OvcWitness> ovc_certify(const Rat& a_min = Rat(0)) const;

    // Keep only monomials representable in the (smaller) target profile and
    // reduce coefficients to its precision.
    Series truncated_to(const PrecisionProfile& prof) const;

    // Reduce mod pi (same p/e, N = 1); used by the residue-level solvers.
    Series residue() const;
    // Lift a residue series back to this profile's full precision.
    static Series lift_residue(const Series& r, const PrecisionProfile& prof);

    // Split by exponent sign.
    Series part_negative() const;
    Series part_positive() const;
    Coeff part_constant() const;

    std::string str() const; // canonical literal

private:
    void check_compatible(const Series& o) const;
    static RingClaim weaker(RingClaim a, RingClaim b);
    void normalize_claim();

    PrecisionProfile prof_;
    std::map<Rat, Coeff> mono_;
    Provenance prov_;
    RingClaim claim_ = RingClaim::gamma;
    bool truncated_ = false;
};

// Residue profile (N = 1) for a given profile.
PrecisionProfile residue_profile(const PrecisionProfile& prof);

} // namespace isoslope
