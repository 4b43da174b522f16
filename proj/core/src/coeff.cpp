#include "isoslope/coeff.hpp"

#include <algorithm>

namespace isoslope {

namespace {
bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}
} // namespace

void CoeffRing::validate() const {
    if (!is_prime(p) || p > 97)
        throw Error(ErrorCode::InvariantViolation, "p must be a prime <= 97, got " + std::to_string(p));
    if (e < 1 || e > 6)
        throw Error(ErrorCode::InvariantViolation, "ramification index e must be in [1,6]");
    if (N < 1 || N > 256)
        throw Error(ErrorCode::InvariantViolation, "precision N must be in [1,256]");
}

int mod_inverse(int u, int p) {
    u %= p;
    if (u < 0) u += p;
    if (u == 0) throw Error(ErrorCode::NotAUnit, "zero has no inverse mod p");
    // extended Euclid
    int a = u, b = p, x0 = 1, x1 = 0;
    while (b) {
        int q = a / b;
        int t = a - q * b; a = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
    }
    x0 %= p;
    if (x0 < 0) x0 += p;
    return x0;
}

Coeff::Coeff(const CoeffRing& ring, long long value) : ring_(ring), digits_(ring.N, 0) {
    bool neg = value < 0;
    unsigned long long v = neg ? -(unsigned long long)value : value;
    std::vector<long long> raw(ring_.N, 0);
    // value = sum b_j p^j -> digits at positions j*e
    for (int pos = 0; v != 0 && pos < ring_.N; pos += ring_.e) {
        raw[pos] = (long long)(v % ring_.p);
        v /= ring_.p;
    }
    canonicalize(raw);
    if (neg) *this = -*this;
}

Coeff Coeff::pi_pow(const CoeffRing& r, int k, long long u) {
    Coeff c(r, u);
    return c.pi_shift(k);
}

void Coeff::canonicalize(std::vector<long long>& raw) {
    const int p = ring_.p, e = ring_.e, N = ring_.N;
    for (int i = 0; i < N; ++i) {
        long long d = raw[i];
        long long carry = d / p;
        d %= p;
        if (d < 0) { d += p; carry -= 1; }
        raw[i] = d;
        if (carry != 0 && i + e < N) raw[i + e] += carry;
    }
    digits_.assign(N, 0);
    for (int i = 0; i < N; ++i) digits_[i] = (int)raw[i];
}

void Coeff::check_same_ring(const Coeff& other) const {
    if (ring_ != other.ring_)
        throw Error(ErrorCode::IncompatibleProfiles, "coefficient rings differ");
}

bool Coeff::is_zero() const {
    for (int d : digits_) if (d) return false;
    return true;
}

int Coeff::val() const {
    for (int i = 0; i < (int)digits_.size(); ++i)
        if (digits_[i]) return i;
    return ring_.N;
}

Coeff Coeff::operator-() const {
    Coeff r(ring_);
    std::vector<long long> raw(digits_.begin(), digits_.end());
    for (auto& d : raw) d = -d;
    r.canonicalize(raw);
    return r;
}

Coeff operator+(const Coeff& a, const Coeff& b) {
    a.check_same_ring(b);
    Coeff r(a.ring_);
    std::vector<long long> raw(a.ring_.N, 0);
    for (int i = 0; i < a.ring_.N; ++i) raw[i] = (long long)a.digits_[i] + b.digits_[i];
    r.canonicalize(raw);
    return r;
}

Coeff operator-(const Coeff& a, const Coeff& b) {
    a.check_same_ring(b);
    Coeff r(a.ring_);
    std::vector<long long> raw(a.ring_.N, 0);
    for (int i = 0; i < a.ring_.N; ++i) raw[i] = (long long)a.digits_[i] - b.digits_[i];
    r.canonicalize(raw);
    return r;
}

Coeff operator*(const Coeff& a, const Coeff& b) {
    a.check_same_ring(b);
    Coeff r(a.ring_);
    const int N = a.ring_.N;
    std::vector<long long> raw(N, 0);
    for (int i = 0; i < N; ++i) {
        if (!a.digits_[i]) continue;
        for (int j = 0; j + i < N; ++j)
            raw[i + j] += (long long)a.digits_[i] * b.digits_[j];
    }
    r.canonicalize(raw);
    return r;
}

bool operator==(const Coeff& a, const Coeff& b) {
    return a.ring_ == b.ring_ && a.digits_ == b.digits_;
}

Coeff Coeff::inv() const {
    if (!is_unit()) throw Error(ErrorCode::NotAUnit, "coefficient is not a unit mod pi");
    Coeff x(ring_, mod_inverse(digits_[0], ring_.p));
    Coeff two(ring_, 2);
    // Newton: x <- x(2 - ux); valuation of 1 - ux doubles each step.
    for (int it = 0; it < 10 && (*this * x - Coeff::one(ring_)).val() < ring_.N; ++it)
        x = x * (two - *this * x);
    return x;
}

Coeff Coeff::pi_shift(int k) const {
    Coeff r(ring_);
    const int N = ring_.N;
    if (k >= 0) {
        for (int i = 0; i + k < N; ++i) r.digits_[i + k] = digits_[i];
    } else {
        int s = -k;
        if (val() < s)
            throw Error(ErrorCode::PrecisionExhausted,
                        "pi_shift: valuation " + std::to_string(val()) + " < " + std::to_string(s));
        for (int i = s; i < N; ++i) r.digits_[i - s] = digits_[i];
    }
    return r;
}

Coeff div_exact(const Coeff& a, const Coeff& b) {
    a.check_same_ring(b);
    int w = b.val();
    if (w >= b.ring_.N) throw Error(ErrorCode::NotAUnit, "division by zero coefficient");
    if (a.val() < w)
        throw Error(ErrorCode::PrecisionExhausted, "div_exact: dividend valuation too small");
    return a.pi_shift(-w) * b.pi_shift(-w).inv();
}

Coeff Coeff::truncated(int m) const {
    Coeff r = *this;
    for (int i = std::max(m, 0); i < ring_.N; ++i) r.digits_[i] = 0;
    return r;
}

Coeff Coeff::to_ring(const CoeffRing& r) const {
    if (r.p != ring_.p || r.e != ring_.e)
        throw Error(ErrorCode::IncompatibleProfiles, "to_ring: p or e differs");
    Coeff out(r);
    for (int i = 0; i < std::min(r.N, ring_.N); ++i) out.digits_[i] = digits_[i];
    return out;
}

std::string Coeff::str() const {
    std::string s;
    for (int i = 0; i < ring_.N; ++i) {
        if (!digits_[i]) continue;
        if (!s.empty()) s += "+";
        if (i == 0) {
            s += std::to_string(digits_[i]);
        } else {
            if (digits_[i] != 1) s += std::to_string(digits_[i]) + "*";
            s += (i == 1) ? "pi" : "pi^" + std::to_string(i);
        }
    }
    return s.empty() ? "0" : s;
}

} // namespace isoslope
