#pragma once

// Weierstrass curves over Q: invariants, the group law, reduction types,
// torsion triviality by point counting, canonical heights and regulators.

#include "ecbound/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecbound {

/// One named item of a hypothesis checklist.
struct CheckItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline bool all_passed(const std::vector<CheckItem>& items) {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

// ---------------------------------------------------------------------------
// Group law over an arbitrary field type

inline bool is_zero_value(const Rational& x) { return x == 0; }

template <class F>
    requires requires(const F& f) { f.is_zero(); }
bool is_zero_value(const F& f) {
    return f.is_zero();
}

template <class F>
struct AffinePoint {
    bool infinity = true;
    F x{};
    F y{};

    static AffinePoint at_infinity() { return {}; }
    static AffinePoint affine(F x_, F y_) { return {false, std::move(x_), std::move(y_)}; }
};

template <class F>
struct WeierstrassCoefficients {
    F a1, a2, a3, a4, a6;
};

/// y^2 + a1 xy + a3 y - (x^3 + a2 x^2 + a4 x + a6), evaluated at an affine point.
template <class F>
F weierstrass_residual(const WeierstrassCoefficients<F>& c, const F& x, const F& y) {
    const F x2 = x * x;
    return y * y + c.a1 * x * y + c.a3 * y - (x2 * x + c.a2 * x2 + c.a4 * x + c.a6);
}

template <class F>
AffinePoint<F> weierstrass_negate(const WeierstrassCoefficients<F>& c, const AffinePoint<F>& pt) {
    if (pt.infinity) return pt;
    return AffinePoint<F>::affine(pt.x, -pt.y - c.a1 * pt.x - c.a3);
}

/// Chord-tangent addition; equality tests are "zero at the known precision" for p-adic fields.
template <class F>
AffinePoint<F> weierstrass_add(const WeierstrassCoefficients<F>& c, const AffinePoint<F>& p1,
                               const AffinePoint<F>& p2) {
    if (p1.infinity) return p2;
    if (p2.infinity) return p1;
    const F dx = p2.x - p1.x;
    F lambda;
    F nu;
    if (is_zero_value(dx)) {
        const F denom = p1.y + p2.y + c.a1 * p2.x + c.a3;
        if (is_zero_value(denom)) return AffinePoint<F>::at_infinity();
        const F x = p1.x;
        const F y = p1.y;
        const F x2 = x * x;
        const F tangent_den = y + y + c.a1 * x + c.a3;
        lambda = (x2 + x2 + x2 + c.a2 * x + c.a2 * x + c.a4 - c.a1 * y) / tangent_den;
        nu = (-(x2 * x) + c.a4 * x + c.a6 + c.a6 - c.a3 * y) / tangent_den;
    } else {
        lambda = (p2.y - p1.y) / dx;
        nu = (p1.y * p2.x - p2.y * p1.x) / dx;
    }
    const F x3 = lambda * lambda + c.a1 * lambda - c.a2 - p1.x - p2.x;
    const F y3 = -(lambda + c.a1) * x3 - nu - c.a3;
    return AffinePoint<F>::affine(x3, y3);
}

// ---------------------------------------------------------------------------
// Curves over Q

using RationalPoint = AffinePoint<Rational>;

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integral coefficients and derived invariants.
struct WeierstrassCurve {
    Integer a1, a2, a3, a4, a6;
    Integer b2, b4, b6, b8;
    Integer c4, c6;
    Integer discriminant;
    Rational j;

    WeierstrassCoefficients<Rational> coefficients() const {
        return {Rational(a1), Rational(a2), Rational(a3), Rational(a4), Rational(a6)};
    }
};

inline WeierstrassCurve compute_invariants(const Integer& a1, const Integer& a2, const Integer& a3,
                                           const Integer& a4, const Integer& a6) {
    WeierstrassCurve e{a1, a2, a3, a4, a6, 0, 0, 0, 0, 0, 0, 0, 0};
    e.b2 = a1 * a1 + 4 * a2;
    e.b4 = 2 * a4 + a1 * a3;
    e.b6 = a3 * a3 + 4 * a6;
    e.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    e.c4 = e.b2 * e.b2 - 24 * e.b4;
    e.c6 = -e.b2 * e.b2 * e.b2 + 36 * e.b2 * e.b4 - 216 * e.b6;
    e.discriminant = -e.b2 * e.b2 * e.b8 - 8 * e.b4 * e.b4 * e.b4 - 27 * e.b6 * e.b6 + 9 * e.b2 * e.b4 * e.b6;
    if (e.discriminant == 0) throw std::domain_error("singular curve");
    e.j = Rational(e.c4 * e.c4 * e.c4, e.discriminant);
    e.j.canonicalize();
    return e;
}

/// The two standard consistency identities 4 b8 = b2 b6 - b4^2 and 1728 Delta = c4^3 - c6^2.
inline bool invariants_consistent(const WeierstrassCurve& e) {
    return 4 * e.b8 == e.b2 * e.b6 - e.b4 * e.b4 &&
           1728 * e.discriminant == e.c4 * e.c4 * e.c4 - e.c6 * e.c6;
}

inline bool is_on_curve(const WeierstrassCurve& e, const RationalPoint& pt) {
    if (pt.infinity) return true;
    return weierstrass_residual(e.coefficients(), pt.x, pt.y) == 0;
}

inline void require_on_curve(const WeierstrassCurve& e, const RationalPoint& pt) {
    if (!is_on_curve(e, pt)) throw std::invalid_argument("point not on curve");
}

inline RationalPoint negate_point(const WeierstrassCurve& e, const RationalPoint& pt) {
    require_on_curve(e, pt);
    return weierstrass_negate(e.coefficients(), pt);
}

inline RationalPoint add_points(const WeierstrassCurve& e, const RationalPoint& p1, const RationalPoint& p2) {
    require_on_curve(e, p1);
    require_on_curve(e, p2);
    return weierstrass_add(e.coefficients(), p1, p2);
}

inline RationalPoint double_point(const WeierstrassCurve& e, const RationalPoint& pt) { return add_points(e, pt, pt); }

inline RationalPoint scalar_multiply(const WeierstrassCurve& e, const RationalPoint& pt, long k) {
    require_on_curve(e, pt);
    const auto c = e.coefficients();
    RationalPoint base = k < 0 ? weierstrass_negate(c, pt) : pt;
    unsigned long n = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
    RationalPoint acc = RationalPoint::at_infinity();
    while (n > 0) {
        if ((n & 1UL) != 0) acc = weierstrass_add(c, acc, base);
        base = weierstrass_add(c, base, base);
        n >>= 1U;
    }
    return acc;
}

inline std::string point_to_string(const RationalPoint& pt) {
    if (pt.infinity) return "O";
    return "(" + pt.x.get_str() + "," + pt.y.get_str() + ")";
}

// ---------------------------------------------------------------------------
// Reduction

enum class ReductionKind { good, split_multiplicative, nonsplit_multiplicative, additive };

inline std::string to_string(ReductionKind k) {
    switch (k) {
        case ReductionKind::good: return "good";
        case ReductionKind::split_multiplicative: return "multiplicative-split";
        case ReductionKind::nonsplit_multiplicative: return "multiplicative-nonsplit";
        case ReductionKind::additive: return "additive";
    }
    return "?";
}

struct ReductionInfo {
    long prime = 0;
    ReductionKind kind = ReductionKind::good;
    long disc_valuation = 0;

    bool multiplicative() const {
        return kind == ReductionKind::split_multiplicative || kind == ReductionKind::nonsplit_multiplicative;
    }
};

/// Reduction type at a prime; multiplicative reduction is split iff -c6 is a nonzero square mod l.
inline ReductionInfo reduction_type(const WeierstrassCurve& e, long ell) {
    if (ell < 2 || !is_prime(ell)) throw std::invalid_argument("reduction_type expects a prime");
    ReductionInfo info;
    info.prime = ell;
    const Integer L = ell;
    if (mpz_divisible_p(e.discriminant.get_mpz_t(), L.get_mpz_t()) == 0) {
        info.kind = ReductionKind::good;
        return info;
    }
    info.disc_valuation = ordp(e.discriminant, ell);
    if (ell == 2 || ell == 3) throw std::invalid_argument("reduction type at 2 or 3 not supported");
    if (mpz_divisible_p(e.c4.get_mpz_t(), L.get_mpz_t()) != 0) {
        info.kind = ReductionKind::additive;
        return info;
    }
    info.kind = legendre(-e.c6, ell) == 1 ? ReductionKind::split_multiplicative
                                          : ReductionKind::nonsplit_multiplicative;
    return info;
}

struct PrimeConductorReport {
    long p = 0;
    long k = 0;  // ord_p(Delta)
    ReductionKind kind = ReductionKind::good;
    std::vector<CheckItem> items;
    bool passed() const { return all_passed(items); }
};

namespace detail {

// |n| = p^k for a prime p and 1 <= k <= kmax; returns (p, k).
inline std::optional<std::pair<Integer, long>> prime_power_root(const Integer& n, long kmax) {
    const Integer a = abs(n);
    if (a < 2) return std::nullopt;
    for (long k = 1; k <= kmax; ++k) {
        Integer r;
        if (mpz_root(r.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(k)) != 0 && is_prime(r)) {
            return std::make_pair(r, k);
        }
    }
    return std::nullopt;
}

inline std::string small_factorization(const Integer& n) {
    Integer a = abs(n);
    std::ostringstream os;
    if (n < 0) os << "-";
    bool first = true;
    for (long d = 2; d < 100000 && a > 1; ++d) {
        long e = 0;
        while (mpz_divisible_ui_p(a.get_mpz_t(), static_cast<unsigned long>(d)) != 0) {
            mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(d));
            ++e;
        }
        if (e > 0) {
            os << (first ? "" : "*") << d;
            if (e > 1) os << "^" << e;
            first = false;
        }
    }
    if (a > 1) os << (first ? "" : "*") << a.get_str();
    return os.str();
}

}  // namespace detail

/**
 * Prime-conductor checklist: |Delta| = p^k with 1 <= k <= 5, multiplicative
 * reduction at p, p >= 11 and p != 13, a minimal model (no unscaling), and
 * p not dividing ord_p(Delta).
 */
inline PrimeConductorReport check_prime_conductor(const WeierstrassCurve& e) {
    PrimeConductorReport r;
    const auto root = detail::prime_power_root(e.discriminant, 64);
    {
        CheckItem it{"discriminant_prime_power", root.has_value(), ""};
        it.detail = "Delta = " + e.discriminant.get_str() + " = " + detail::small_factorization(e.discriminant);
        r.items.push_back(it);
    }
    if (!root || !mpz_fits_slong_p(root->first.get_mpz_t())) {
        for (const char* name : {"discriminant_divides_p5", "multiplicative_at_p", "p_at_least_11_not_13",
                                 "minimal_model", "p_not_dividing_ord_delta"}) {
            r.items.push_back({name, false, "no single prime p with |Delta| = p^k"});
        }
        return r;
    }
    r.p = root->first.get_si();
    r.k = root->second;
    r.items.push_back({"discriminant_divides_p5", r.k >= 1 && r.k <= 5,
                       "ord_p(Delta) = " + std::to_string(r.k) + " at p = " + std::to_string(r.p)});
    if (r.p == 2 || r.p == 3) {
        r.items.push_back({"multiplicative_at_p", false, "p = " + std::to_string(r.p) + " not supported"});
    } else {
        const auto info = reduction_type(e, r.p);
        r.kind = info.kind;
        r.items.push_back({"multiplicative_at_p", info.multiplicative(), to_string(info.kind)});
    }
    r.items.push_back({"p_at_least_11_not_13", r.p >= 11 && r.p != 13, "p = " + std::to_string(r.p)});
    {
        // An unscaling by l needs l^4 | c4, l^6 | c6 and l^12 | Delta; only l = p can divide Delta.
        const Integer l = r.p;
        const bool scalable = mpz_divisible_p(e.c4.get_mpz_t(), pow_int(l, 4).get_mpz_t()) != 0 &&
                              mpz_divisible_p(e.c6.get_mpz_t(), pow_int(l, 6).get_mpz_t()) != 0 &&
                              mpz_divisible_p(e.discriminant.get_mpz_t(), pow_int(l, 12).get_mpz_t()) != 0;
        r.items.push_back({"minimal_model", !scalable, scalable ? "model admits an unscaling at p" : "minimal at p"});
    }
    r.items.push_back({"p_not_dividing_ord_delta", r.k % r.p != 0,
                       "ord_p(Delta) = " + std::to_string(r.k) + ", p = " + std::to_string(r.p)});
    return r;
}

// ---------------------------------------------------------------------------
// Torsion

/// #E(F_l) for an odd prime l of good reduction, by exhaustive count over x.
inline long count_points(const WeierstrassCurve& e, long ell) {
    if (ell < 3 || !is_prime(ell)) throw std::invalid_argument("count_points expects an odd prime");
    if (mpz_divisible_ui_p(e.discriminant.get_mpz_t(), static_cast<unsigned long>(ell)) != 0) {
        throw std::invalid_argument("prime " + std::to_string(ell) + " divides the discriminant");
    }
    long count = 1;
    for (long x = 0; x < ell; ++x) {
        const Integer X = x;
        const Integer lin = e.a1 * X + e.a3;
        const Integer disc = lin * lin + 4 * (X * X * X + e.a2 * X * X + e.a4 * X + e.a6);
        count += 1 + legendre(disc, ell);
    }
    return count;
}

struct TorsionCheck {
    bool trivial = false;
    long gcd = 0;
    std::vector<std::pair<long, long>> counts;  // (l, #E(F_l))
};

/// Torsion injects into E(F_l) for odd good l, so gcd of the counts = 1 forces trivial torsion.
inline TorsionCheck torsion_is_trivial(const WeierstrassCurve& e, const std::vector<long>& primes) {
    std::vector<long> odd;
    for (long l : primes)
        if (l != 2) odd.push_back(l);
    if (odd.size() < 3) throw std::invalid_argument("torsion check needs at least 3 odd primes of good reduction");
    TorsionCheck t;
    for (long l : odd) {
        const long n = count_points(e, l);
        t.counts.emplace_back(l, n);
        t.gcd = std::gcd(t.gcd, n);
    }
    t.trivial = t.gcd == 1;
    return t;
}

/// The first `count` odd primes not dividing the discriminant.
inline std::vector<long> good_odd_primes(const WeierstrassCurve& e, std::size_t count) {
    std::vector<long> out;
    for (long l = 3; out.size() < count; l += 2) {
        if (!is_prime(l)) continue;
        if (mpz_divisible_ui_p(e.discriminant.get_mpz_t(), static_cast<unsigned long>(l)) != 0) continue;
        out.push_back(l);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Heights

/// Naive logarithmic height of the x-coordinate, log max(|num|, |den|); 0 at infinity.
inline double naive_height(const RationalPoint& pt) {
    if (pt.infinity) return 0.0;
    const Integer num = abs(pt.x.get_num());
    const Integer den = pt.x.get_den();
    const Integer& big = num > den ? num : den;
    return big == 1 ? 0.0 : log_abs(big);
}

/**
 * Bound C with |h(x(P)) - hhat(P)| <= C, from Silverman's difference
 * estimate scaled to the normalization hhat = lim 4^{-k} h(x(2^k P)).
 */
inline double height_difference_bound(const WeierstrassCurve& e) {
    auto h = [](const Rational& x) {
        if (x == 0) return 0.0;
        return std::max(log_abs(x.get_num()), log_abs(x.get_den()));
    };
    auto h_inf = [](double x) { return std::log(std::max(1.0, std::fabs(x))); };
    const double hj = h(e.j);
    const double mu = log_abs(e.discriminant) / 12.0 + h_inf(e.j.get_d()) / 12.0 +
                      h_inf(e.b2.get_d() / 12.0) / 2.0 + (e.b2 != 0 ? std::log(2.0) / 2.0 : 0.0);
    return 2.0 * (hj / 8.0 + mu + 1.07);
}

struct HeightEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    int doublings = 0;
    bool torsion = false;
};

/// 4^{-k} h(x(2^k P)) with error bound C / 4^k; torsion (a doubling cycle) gives 0 with the flag set.
inline HeightEstimate canonical_height(const WeierstrassCurve& e, const RationalPoint& pt, int doublings) {
    if (doublings < 4) throw std::invalid_argument("canonical height needs at least 4 doublings");
    if (doublings > 8) throw std::invalid_argument("doublings capped at 8");
    require_on_curve(e, pt);
    HeightEstimate est;
    est.doublings = doublings;
    if (pt.infinity) return est;
    const auto c = e.coefficients();
    std::vector<RationalPoint> seen{pt};
    RationalPoint cur = pt;
    for (int i = 0; i < doublings; ++i) {
        cur = weierstrass_add(c, cur, cur);
        const bool cycle = cur.infinity || std::any_of(seen.begin(), seen.end(), [&](const RationalPoint& s) {
                               return !s.infinity && s.x == cur.x && s.y == cur.y;
                           });
        if (cycle) {
            est.torsion = true;
            return est;
        }
        seen.push_back(cur);
    }
    const double scale = std::ldexp(1.0, -2 * doublings);
    est.value = naive_height(cur) * scale;
    est.error_bound = height_difference_bound(e) * scale;
    return est;
}

/// Closed real interval, used to certify the sign of a determinant.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval around(double v, double r) { return {v - r, v + r}; }
    double mid() const { return 0.5 * (lo + hi); }
    double radius() const { return 0.5 * (hi - lo); }

    friend Interval operator+(Interval a, Interval b) { return widen({a.lo + b.lo, a.hi + b.hi}); }
    friend Interval operator-(Interval a, Interval b) { return widen({a.lo - b.hi, a.hi - b.lo}); }
    friend Interval operator*(Interval a, Interval b) {
        const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return widen({*std::min_element(c, c + 4), *std::max_element(c, c + 4)});
    }

private:
    // outward rounding slack
    static Interval widen(Interval x) {
        const double eps = 4e-16 * std::max(std::fabs(x.lo), std::fabs(x.hi)) + 1e-300;
        return {x.lo - eps, x.hi + eps};
    }
};

inline Interval interval_determinant(const std::vector<std::vector<Interval>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return {1.0, 1.0};
    if (n == 1) return m[0][0];
    Interval total{0.0, 0.0};
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<std::vector<Interval>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Interval> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != col) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        const Interval term = m[0][col] * interval_determinant(minor);
        total = (col % 2 == 0) ? total + term : total - term;
    }
    return total;
}

struct HeightData {
    std::vector<HeightEstimate> heights;
    std::vector<std::vector<Interval>> pairing;  // <P_i, P_j> as intervals
    double regulator = 1.0;
    double error_bound = 0.0;
};

/// Gram determinant of the Neron-Tate pairing <P,Q> = (hhat(P+Q) - hhat(P) - hhat(Q)) / 2.
inline HeightData regulator(const WeierstrassCurve& e, const std::vector<RationalPoint>& points, int doublings = 7) {
    HeightData out;
    const std::size_t r = points.size();
    for (const auto& pt : points) out.heights.push_back(canonical_height(e, pt, doublings));
    out.pairing.assign(r, std::vector<Interval>(r));
    for (std::size_t i = 0; i < r; ++i) {
        out.pairing[i][i] = Interval::around(out.heights[i].value, out.heights[i].error_bound);
        for (std::size_t j = i + 1; j < r; ++j) {
            const auto sum = canonical_height(e, add_points(e, points[i], points[j]), doublings);
            const Interval pij = Interval::around(
                (sum.value - out.heights[i].value - out.heights[j].value) / 2.0,
                (sum.error_bound + out.heights[i].error_bound + out.heights[j].error_bound) / 2.0);
            out.pairing[i][j] = pij;
            out.pairing[j][i] = pij;
        }
    }
    const Interval det = interval_determinant(out.pairing);
    out.regulator = det.mid();
    out.error_bound = det.radius();
    if (det.lo <= 0.0) throw precision_error("independence unverified at this precision");
    return out;
}

}  // namespace ecbound
