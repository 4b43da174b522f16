#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isoslope/error.hpp"

namespace isoslope {

// The coefficient ring O/pi^N where O = Z[pi]/(pi^e - p).  sigma acts as the
// identity on O, so O = O_0 throughout.
struct CoeffRing {
    int p = 2;  // prime, 2 <= p <= 97
    int e = 1;  // ramification index, pi^e = p
    int N = 8;  // pi-adic precision

    void validate() const;
    friend bool operator==(const CoeffRing& a, const CoeffRing& b) {
        return a.p == b.p && a.e == b.e && a.N == b.N;
    }
    friend bool operator!=(const CoeffRing& a, const CoeffRing& b) { return !(a == b); }
};

// Element of O/pi^N in canonical form: N base-p-reduced pi-digits,
// x = sum_i d[i] pi^i with 0 <= d[i] < p.  Carries propagate e slots up
// since p = pi^e.
class Coeff {
public:
    Coeff() = default;
    explicit Coeff(const CoeffRing& ring) : ring_(ring), digits_(ring.N, 0) {}
    Coeff(const CoeffRing& ring, long long value);

    static Coeff zero(const CoeffRing& r) { return Coeff(r); }
    static Coeff one(const CoeffRing& r) { return Coeff(r, 1); }
    // pi^k * u
    static Coeff pi_pow(const CoeffRing& r, int k, long long u = 1);

    const CoeffRing& ring() const { return ring_; }

    bool is_zero() const;
    // pi-adic valuation in [0, N]; N for zero.
    int val() const;
    bool is_unit() const { return val() == 0; }

    int digit(int i) const { return digits_[i]; }

    Coeff operator-() const;
    friend Coeff operator+(const Coeff& a, const Coeff& b);
    friend Coeff operator-(const Coeff& a, const Coeff& b);
    friend Coeff operator*(const Coeff& a, const Coeff& b);
    friend bool operator==(const Coeff& a, const Coeff& b);
    friend bool operator!=(const Coeff& a, const Coeff& b) { return !(a == b); }

    // Multiplicative inverse; throws NotAUnit on non-units.
    Coeff inv() const;
    // Multiply by pi^k.  Negative k requires val() >= -k (exact division),
    // and the top |k| digits of the result are unknown, hence zeroed; callers
    // doing this are responsible for tracking the precision loss.
    Coeff pi_shift(int k) const;
    // a / b where val(a) >= val(b); precision of the result drops by val(b).
    friend Coeff div_exact(const Coeff& a, const Coeff& b);

    // Reduce mod pi^m (m <= N), keeping the same ring but zeroing digits >= m.
    Coeff truncated(int m) const;
    // Reinterpret in another ring with the same p, e and smaller-or-equal N.
    Coeff to_ring(const CoeffRing& r) const;

    // Residue digit in F_p (digit 0).
    int residue() const { return digits_.empty() ? 0 : digits_[0]; }

    // Canonical literal, e.g. "0", "1", "2*pi", "1+2*pi^3".
    std::string str() const;

private:
    void check_same_ring(const Coeff& other) const;
    void canonicalize(std::vector<long long>& raw);

    CoeffRing ring_;
    std::vector<int> digits_;
};

// Solve u*x = 1 mod p for integer u with p prime.
int mod_inverse(int u, int p);

} // namespace isoslope
