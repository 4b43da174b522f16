#include "isoslope/series.hpp"

#include <algorithm>

namespace isoslope {

const char* ring_claim_name(RingClaim c) {
    switch (c) {
    case RingClaim::omega: return "omega";
    case RingClaim::gamma_con: return "gamma_con";
    case RingClaim::gamma: return "gamma";
    case RingClaim::gamma_an_con: return "gamma_an_con";
    case RingClaim::tower: return "tower";
    }
    return "?";
}

RingClaim ring_claim_from_name(const std::string& s) {
    if (s == "omega") return RingClaim::omega;
    if (s == "gamma_con") return RingClaim::gamma_con;
    if (s == "gamma") return RingClaim::gamma;
    if (s == "gamma_an_con") return RingClaim::gamma_an_con;
    if (s == "tower") return RingClaim::tower;
    throw Error(ErrorCode::ParseError, "unknown ring claim '" + s + "'");
}

std::string Provenance::str() const {
    std::string s;
    if (uses_p_root) s += "p_root";
    if (uses_artin_schreier) s += s.empty() ? "artin_schreier" : ",artin_schreier";
    return s.empty() ? "none" : s;
}

void PrecisionProfile::validate() const {
    ring.validate();
    if (K < 0 || K > 6)
        throw Error(ErrorCode::InvariantViolation, "exponent level K must be in [0,6]");
    if (!(t_lo < Rat(0) && Rat(0) < t_hi))
        throw Error(ErrorCode::InvariantViolation, "window must satisfy t_lo < 0 < t_hi");
    long long den = level_denominator();
    if (den % t_lo.den != 0 || den % t_hi.den != 0)
        throw Error(ErrorCode::InvariantViolation, "window endpoints must lie on the level lattice");
}

PrecisionProfile residue_profile(const PrecisionProfile& prof) {
    PrecisionProfile r = prof;
    r.ring.N = 1;
    return r;
}

Series Series::zero(const PrecisionProfile& prof, RingClaim claim) {
    return Series(prof, claim);
}

Series Series::constant(const PrecisionProfile& prof, const Coeff& c, RingClaim claim) {
    Series s(prof, claim);
    s.add_monomial(Rat(0), c);
    return s;
}

Series Series::monomial(const PrecisionProfile& prof, const Rat& exp, const Coeff& c) {
    Series s(prof, RingClaim::gamma);
    s.add_monomial(exp, c);
    s.normalize_claim();
    return s;
}

Coeff Series::coeff_at(const Rat& exp) const {
    auto it = mono_.find(exp);
    return it == mono_.end() ? Coeff::zero(prof_.ring) : it->second;
}

void Series::add_monomial(const Rat& exp, const Coeff& c) {
    if (c.is_zero()) return;
    if (!prof_.exponent_in_level(exp))
        throw Error(ErrorCode::ExponentLevelExceeded,
                    "exponent " + exp.str() + " not in p^-" + std::to_string(prof_.K) + " lattice");
    if (!prof_.exponent_in_window(exp)) {
        truncated_ = true;
        return;
    }
    auto it = mono_.find(exp);
    if (it == mono_.end()) {
        mono_.emplace(exp, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) mono_.erase(it);
    }
}

int Series::gauss_val() const {
    int v = prof_.ring.N;
    for (const auto& [e, c] : mono_) v = std::min(v, c.val());
    return v;
}

std::pair<Rat, Coeff> Series::leading() const {
    if (mono_.empty()) throw Error(ErrorCode::NotAUnit, "zero series has no leading term");
    int v = gauss_val();
    for (const auto& [e, c] : mono_)
        if (c.val() == v) return {e, c};
    throw Error(ErrorCode::NotAUnit, "unreachable");
}

void Series::check_compatible(const Series& o) const {
    if (prof_ != o.prof_)
        throw Error(ErrorCode::IncompatibleProfiles, "series profiles differ");
}

RingClaim Series::weaker(RingClaim a, RingClaim b) {
    return (int)a >= (int)b ? a : b;
}

void Series::normalize_claim() {
    bool has_frac = false, has_neg = false;
    for (const auto& [e, c] : mono_) {
        if (!e.is_integer()) has_frac = true;
        if (e < Rat(0)) has_neg = true;
    }
    if (has_frac) {
        claim_ = RingClaim::tower;
    } else if (claim_ == RingClaim::omega && has_neg) {
        claim_ = RingClaim::gamma_con;
    } else if (claim_ == RingClaim::tower && !has_frac) {
        // keep tower: the claim is about provenance, not just exponents
    }
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& [e, c] : r.mono_) c = -c;
    return r;
}

Series operator+(const Series& a, const Series& b) {
    a.check_compatible(b);
    Series r = a;
    r.claim_ = Series::weaker(a.claim_, b.claim_);
    r.prov_ = a.prov_.merged(b.prov_);
    r.truncated_ = a.truncated_ || b.truncated_;
    for (const auto& [e, c] : b.mono_) r.add_monomial(e, c);
    r.normalize_claim();
    return r;
}

Series operator-(const Series& a, const Series& b) { return a + (-b); }

Series operator*(const Series& a, const Series& b) {
    a.check_compatible(b);
    Series r(a.prof_, Series::weaker(a.claim_, b.claim_));
    r.prov_ = a.prov_.merged(b.prov_);
    r.truncated_ = a.truncated_ || b.truncated_;
    for (const auto& [ea, ca] : a.mono_)
        for (const auto& [eb, cb] : b.mono_)
            r.add_monomial(ea + eb, ca * cb);
    r.normalize_claim();
    return r;
}

Series Series::scalar_mul(const Coeff& c) const {
    Series r(prof_, claim_);
    r.prov_ = prov_;
    r.truncated_ = truncated_;
    for (const auto& [e, x] : mono_) r.add_monomial(e, x * c);
    r.normalize_claim();
    return r;
}

Series Series::invert_unit(int max_iter) const {
    if (gauss_val() != 0)
        throw Error(ErrorCode::NotAUnit, "no unit-coefficient monomial (Gauss valuation > 0)");
    if (max_iter <= 0) max_iter = 48;
    auto [lexp, lc] = leading();
    Series inv = Series::monomial(prof_, -lexp, lc.inv());
    inv.prov_ = prov_;
    Series one = Series::constant(prof_, Coeff::one(prof_.ring), RingClaim::omega);
    Series two = Series::constant(prof_, Coeff(prof_.ring, 2), RingClaim::omega);
    for (int it = 0; it < max_iter; ++it) {
        Series resid = one - *this * inv;
        // resid may hold a boundary monomial that no in-window correction can
        // cancel (the correction would live past t_hi); a fixed point of the
        // Newton map is then the best representable inverse
        Series next = inv * (two - *this * inv);
        if (resid.is_zero() || (next - inv).is_zero()) {
            if (!resid.is_zero()) inv.mark_truncated();
            inv.claim_ = weaker(claim_, inv.claim_);
            inv.normalize_claim();
            return inv;
        }
        inv = next;
    }
    throw Error(ErrorCode::WindowOverflow, "Newton inverse did not stabilize inside the window");
}

Series Series::div_coeff(const Coeff& c) const {
    int w = c.val();
    if (w >= prof_.ring.N) throw Error(ErrorCode::NotAUnit, "division by zero coefficient");
    Series r(prof_, claim_);
    r.prov_ = prov_;
    r.truncated_ = truncated_;
    for (const auto& [e, x] : mono_) r.add_monomial(e, div_exact(x, c));
    return r;
}

Series Series::pi_shift(int k) const {
    Series r(prof_, claim_);
    r.prov_ = prov_;
    r.truncated_ = truncated_;
    for (const auto& [e, x] : mono_) r.add_monomial(e, x.pi_shift(k));
    return r;
}

Series Series::frobenius(int n) const {
    Series r(prof_, claim_);
    r.prov_ = prov_;
    r.truncated_ = truncated_;
    if (n >= 0) {
        long long f = ipow(prof_.ring.p, n);
        for (const auto& [e, c] : mono_) r.add_monomial(e * Rat(f), c);
    } else {
        long long f = ipow(prof_.ring.p, -n);
        bool fractional = false;
        for (const auto& [e, c] : mono_) {
            Rat ne = e / Rat(f);
            if (!prof_.exponent_in_level(ne))
                throw Error(ErrorCode::ExponentLevelExceeded,
                            "sigma_t^" + std::to_string(n) + " pushes exponent " + e.str() +
                                " past level K=" + std::to_string(prof_.K));
            if (!ne.is_integer()) fractional = true;
            r.add_monomial(ne, c);
        }
        if (fractional) r.prov_.uses_p_root = true;
    }
    r.normalize_claim();
    return r;
}

Series Series::nabla() const {
    Series r(prof_, claim_);
    r.prov_ = prov_;
    r.truncated_ = truncated_;
    const int p = prof_.ring.p, e = prof_.ring.e;
    for (const auto& [exp, c] : mono_) {
        Coeff scaled = c * Coeff(prof_.ring, exp.num);
        if (exp.den > 1) {
            int k = 0;
            for (long long d = exp.den; d > 1; d /= p) ++k;
            scaled = scaled.pi_shift(-k * e); // throws PrecisionExhausted when underdetermined
        }
        r.add_monomial(exp, scaled);
    }
    return r;
}

std::optional<Rat> Series::semi_valuation(int n) const {
    for (const auto& [e, c] : mono_)
        if (c.val() <= n) return e;
    return std::nullopt;
}

std::optional<OvcWitness> Series::ovc_certify(const Rat& a_min_in) const {
    const auto& ring = prof_.ring;
    Rat a_min = a_min_in;
    if (!(Rat(0) < a_min))
        a_min = Rat(1, 4LL * ring.e * std::max(prof_.K, 1) * ring.N);
    Rat a_cap((long long)ring.N * ring.e);

    // points (i, v): pole order and coefficient valuation
    std::vector<std::pair<Rat, int>> pts;
    for (const auto& [e, c] : mono_)
        if (e < Rat(0)) pts.push_back({-e, c.val()});
    std::sort(pts.begin(), pts.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    Rat a = a_cap;
    if (pts.size() >= 2) {
        // lower convex hull; the witness slope is the smallest segment
        // steepness, which is what survives extrapolation past truncation
        std::vector<std::pair<Rat, int>> hull;
        for (const auto& pt : pts) {
            while (hull.size() >= 2) {
                const auto& p1 = hull[hull.size() - 2];
                const auto& p2 = hull[hull.size() - 1];
                // keep convex: slope(p1,p2) <= slope(p2,pt)
                Rat s12 = Rat(p2.second - p1.second) / (p2.first - p1.first);
                Rat s2n = Rat(pt.second - p2.second) / (pt.first - p2.first);
                if (s2n < s12) hull.pop_back(); else break;
            }
            while (!hull.empty() && hull.back().first == pt.first) hull.pop_back();
            hull.push_back(pt);
        }
        for (size_t i = 1; i < hull.size(); ++i) {
            Rat s = Rat(hull[i].second - hull[i - 1].second) / (hull[i].first - hull[i - 1].first);
            if (s < Rat(0)) s = -s;
            a = std::min(a, s);
        }
    }
    if (!pts.empty() && !(a > a_min)) return std::nullopt;

    Rat b(0);
    for (const auto& [i, v] : pts) {
        Rat slack = a * i - Rat(v);
        if (b < slack) b = slack;
    }
    OvcWitness w;
    w.a = a;
    w.b = b;
    w.window_limited = truncated_;
    return w;
}

Series Series::truncated_to(const PrecisionProfile& prof) const {
    Series r(prof, claim_);
    r.prov_ = prov_;
    for (const auto& [e, c] : mono_) {
        if (!prof.exponent_in_level(e)) continue;
        if (!prof.exponent_in_window(e)) continue;
        Coeff rc = c.to_ring(prof.ring);
        if (!rc.is_zero()) r.add_monomial(e, rc);
    }
    return r;
}

Series Series::residue() const {
    PrecisionProfile rp = residue_profile(prof_);
    return truncated_to(rp);
}

Series Series::lift_residue(const Series& r, const PrecisionProfile& prof) {
    Series out(prof, r.claim());
    out.prov_ = r.prov_;
    for (const auto& [e, c] : r.monomials())
        out.add_monomial(e, Coeff(prof.ring, c.residue()));
    return out;
}

Series Series::part_negative() const {
    Series r(prof_, claim_);
    r.prov_ = prov_;
    for (const auto& [e, c] : mono_)
        if (e < Rat(0)) r.add_monomial(e, c);
    r.normalize_claim();
    return r;
}

Series Series::part_positive() const {
    Series r(prof_, claim_);
    r.prov_ = prov_;
    for (const auto& [e, c] : mono_)
        if (e > Rat(0)) r.add_monomial(e, c);
    r.normalize_claim();
    return r;
}

Coeff Series::part_constant() const { return coeff_at(Rat(0)); }

std::string Series::str() const {
    if (mono_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : mono_) {
        if (!s.empty()) s += " + ";
        std::string cs = c.str();
        bool compound = cs.find('+') != std::string::npos;
        if (e == Rat(0)) {
            s += compound ? "(" + cs + ")" : cs;
            continue;
        }
        std::string tp;
        if (e == Rat(1)) tp = "t";
        else if (e.is_integer() && e > Rat(0)) tp = "t^" + std::to_string(e.num);
        else tp = "t^(" + e.str() + ")";
        if (cs == "1") s += tp;
        else if (compound) s += "(" + cs + ")*" + tp;
        else s += cs + "*" + tp;
    }
    return s;
}

} // namespace isoslope
