#pragma once

// Tate curves E_q: y^2 + xy = x^3 + a4(q) x + a6(q), the parameter q recovered
// from a j-invariant of negative valuation, and the uniformization
// phi: F^* / q^Z -> E_q(F) for F = Q_p or the unramified quadratic extension.

#include "ecbound/elliptic.hpp"
#include "ecbound/padic.hpp"
#include "ecbound/quadext.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ecbound {

// ---------------------------------------------------------------------------
// Integer q-series

using IntSeries = std::vector<Integer>;

inline Integer divisor_sigma(long n, unsigned long k) {
    Integer s = 0;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        s += pow_int(d, k);
        if (d * d != n) s += pow_int(n / d, k);
    }
    return s;
}

inline IntSeries series_mul(const IntSeries& a, const IntSeries& b, std::size_t len) {
    IntSeries c(len, 0);
    for (std::size_t i = 0; i < a.size() && i < len; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j < len; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

/// 1/a for a series with constant term 1.
inline IntSeries series_inverse(const IntSeries& a, std::size_t len) {
    if (a.empty() || a[0] != 1) throw std::invalid_argument("series_inverse needs constant term 1");
    IntSeries b(len, 0);
    b[0] = 1;
    for (std::size_t n = 1; n < len; ++n) {
        Integer s = 0;
        for (std::size_t i = 1; i <= n && i < a.size(); ++i) s += a[i] * b[n - i];
        b[n] = -s;
    }
    return b;
}

/**
 * Coefficients of q*j(q) = E4(q)^3 / prod (1 - q^n)^24, so that
 * j(q) = 1/q + 744 + 196884 q + ...; entry k is the coefficient of q^(k-1) in j.
 */
inline IntSeries j_coefficients(std::size_t count) {
    const std::size_t len = count;
    IntSeries e4(len, 0);
    e4[0] = 1;
    for (std::size_t n = 1; n < len; ++n) e4[n] = 240 * divisor_sigma(static_cast<long>(n), 3);
    const IntSeries e4_cubed = series_mul(series_mul(e4, e4, len), e4, len);
    IntSeries prod(len, 0);
    prod[0] = 1;
    for (std::size_t n = 1; n < len; ++n) {
        IntSeries factor(len, 0);
        factor[0] = 1;
        factor[n] = -1;
        for (int i = 0; i < 24; ++i) prod = series_mul(prod, factor, len);
    }
    return series_mul(e4_cubed, series_inverse(prod, len), len);
}

/**
 * Coefficients b_1, b_2, ... of q = sum b_k t^k with t = 1/j, by Lagrange
 * inversion: b_k = [q^(k-1)] (q j(q))^k / k. Entry 0 of the result is b_1.
 */
inline IntSeries j_reversion_coefficients(std::size_t count) {
    const IntSeries P = j_coefficients(count);
    IntSeries out;
    IntSeries power(count, 0);
    power[0] = 1;
    for (std::size_t k = 1; k <= count; ++k) {
        power = series_mul(power, P, count);
        const Integer& c = power[k - 1];
        if (mpz_divisible_ui_p(c.get_mpz_t(), k) == 0) throw std::logic_error("non-integral reversion coefficient");
        out.push_back(c / static_cast<unsigned long>(k));
    }
    return out;
}

inline constexpr std::size_t kReversionSeedTerms = 8;

// ---------------------------------------------------------------------------
// Tate parameter

struct TateParameter {
    PadicNumber q;
    long precision = 0;  // relative digits of q
    long terms = 0;      // truncation T of the j-series used

    long prime() const { return q.prime(); }
    long order() const { return q.valuation(); }
};

namespace detail {

inline PadicNumber constant(long p, const Integer& c, long prec) { return PadicNumber::from_integer(p, c, prec); }

// Horner evaluation of sum_{k<len} coeffs[k] q^k.
inline PadicNumber eval_poly(const IntSeries& coeffs, std::size_t len, const PadicNumber& q, long prec) {
    const long p = q.prime();
    PadicNumber acc = constant(p, coeffs[len - 1], prec);
    for (std::size_t k = len - 1; k-- > 0;) acc = acc * q + constant(p, coeffs[k], prec);
    return acc;
}

// Number of q-series terms T with T * ord(q) past the absolute target.
inline long series_terms(long ord_q, long target) { return std::max<long>(1, target / ord_q + 2); }

}  // namespace detail

/// j(q) = P(q)/q evaluated from the integer q-expansion, truncated past the precision of q.
inline PadicNumber j_from_q_series(const PadicNumber& q) {
    if (q.is_zero() || q.valuation() < 1) throw std::invalid_argument("Tate parameter must have positive valuation");
    const long m = q.valuation();
    const long T = detail::series_terms(m, q.precision());
    const IntSeries P = j_coefficients(static_cast<std::size_t>(T + 1));
    return detail::eval_poly(P, P.size(), q, q.precision() + 2) / q;
}

/// j(q) = E4(q)^3 / (q prod (1 - q^n)^24) evaluated directly in Q_p.
inline PadicNumber j_from_product_formula(const PadicNumber& q) {
    if (q.is_zero() || q.valuation() < 1) throw std::invalid_argument("Tate parameter must have positive valuation");
    const long p = q.prime();
    const long N = q.precision();
    const long m = q.valuation();
    const long T = detail::series_terms(m, N);
    PadicNumber e4 = PadicNumber::one(p, N + 2);
    PadicNumber prod = PadicNumber::one(p, N + 2);
    PadicNumber qn = PadicNumber::one(p, N + 2);
    for (long n = 1; n <= T; ++n) {
        qn = qn * q;
        e4 += qn * detail::constant(p, 240 * divisor_sigma(n, 3), N + 2);
        prod = prod * (PadicNumber::one(p, N + 2) - qn).pow(24);
    }
    return e4 * e4 * e4 / (q * prod);
}

/**
 * q with j(q) = j: seed from the first eight reversion coefficients, then
 * Newton iteration on j(q) - j until the correction vanishes at precision.
 */
inline TateParameter tate_parameter_from_j(const PadicNumber& j, long precision) {
    if (j.is_zero() || j.valuation() >= 0) throw std::domain_error("not multiplicative: |j| <= 1");
    const long p = j.prime();
    const long m = -j.valuation();
    const long N = std::min(precision, j.precision());
    const PadicNumber jj = j.with_precision(N);
    const PadicNumber t = jj.inverse();

    static const IntSeries seed_coeffs = j_reversion_coefficients(kReversionSeedTerms);
    PadicNumber q = PadicNumber::zero(p, m + N);
    PadicNumber tk = t;
    for (std::size_t k = 0; k < seed_coeffs.size(); ++k) {
        q += tk * detail::constant(p, seed_coeffs[k], N + 2);
        tk = tk * t;
    }

    const long T = detail::series_terms(m, N);
    const IntSeries P = j_coefficients(static_cast<std::size_t>(T + 1));
    IntSeries dP(P.size(), 0);  // coefficients of P'(q)
    for (std::size_t k = 1; k < P.size(); ++k) dP[k - 1] = P[k] * static_cast<unsigned long>(k);

    for (int iter = 0; iter < 64; ++iter) {
        const PadicNumber Pq = detail::eval_poly(P, P.size(), q, N + 2);
        const PadicNumber residual = Pq / q - jj;
        if (residual.is_zero()) break;
        const PadicNumber dPq = detail::eval_poly(dP, dP.size() - 1, q, N + 2);
        const PadicNumber deriv = (q * dPq - Pq) / (q * q);
        const PadicNumber step = residual / deriv;
        if (step.is_zero() || step.valuation() >= m + N) break;
        q = (q - step).truncated_absolute(m + N);
    }
    q = q.truncated_absolute(m + N);
    if (q.is_zero() || q.valuation() != m) throw precision_error("Tate parameter lost precision");
    return {q, q.precision(), T};
}

// ---------------------------------------------------------------------------
// Coefficients of E_q

struct TateCoefficients {
    PadicNumber a4;
    PadicNumber a6;
    PadicNumber s3;
    PadicNumber s5;
    long terms = 0;
};

/// s_k(q) = sum_{n>=1} sigma_k(n) q^n truncated at relative precision `prec` of the leading term.
inline PadicNumber eisenstein_tail(const PadicNumber& q, unsigned long k, long prec) {
    const long p = q.prime();
    const long m = q.valuation();
    const long T = detail::series_terms(m, m + prec);
    PadicNumber s = PadicNumber::zero(p, m + prec);
    PadicNumber qn = PadicNumber::one(p, prec + 2);
    for (long n = 1; n <= T; ++n) {
        qn = qn * q;
        s += qn * detail::constant(p, divisor_sigma(n, k), prec + 2);
    }
    return s;
}

/// a4 = -5 s3, a6 = -(5 s3 + 7 s5)/12, each an integer q-series.
inline TateCoefficients eq_coefficients(const TateParameter& tp) {
    const PadicNumber& q = tp.q;
    if (q.is_zero() || q.valuation() < 1) throw std::invalid_argument("Tate parameter must have positive valuation");
    const long p = q.prime();
    const long m = q.valuation();
    const long N = q.precision();
    const long T = detail::series_terms(m, m + N);
    PadicNumber a4 = PadicNumber::zero(p, m + N);
    PadicNumber a6 = PadicNumber::zero(p, m + N);
    PadicNumber qn = PadicNumber::one(p, N + 2);
    for (long n = 1; n <= T; ++n) {
        qn = qn * q;
        const Integer s3 = divisor_sigma(n, 3);
        const Integer s5 = divisor_sigma(n, 5);
        const Integer c6 = 5 * s3 + 7 * s5;
        if (mpz_divisible_ui_p(c6.get_mpz_t(), 12) == 0) throw std::logic_error("a6 coefficient not integral");
        a4 += qn * detail::constant(p, -5 * s3, N + 2);
        a6 += qn * detail::constant(p, -(c6 / 12), N + 2);
    }
    return {a4, a6, eisenstein_tail(q, 3, N), eisenstein_tail(q, 5, N), T};
}

/// c4 and c6 of E_q: 1 + 240 s3 and -1 + 504 s5.
inline std::pair<PadicNumber, PadicNumber> tate_c4_c6(const TateCoefficients& c) {
    const long p = c.s3.prime();
    const long N = c.s3.absolute_precision();
    return {PadicNumber::one(p, N) + c.s3.scaled(240), -PadicNumber::one(p, N) + c.s5.scaled(504)};
}

// ---------------------------------------------------------------------------
// Field-generic helpers for F in {PadicNumber, QuadExtElement}

inline PadicNumber embed_like(const PadicNumber&, const PadicNumber& v) { return v; }
inline QuadExtElement embed_like(const QuadExtElement& model, const PadicNumber& v) {
    return QuadExtElement::embed(v, model.nonresidue());
}

template <class F>
F one_like(const F& model, long prec) {
    return embed_like(model, PadicNumber::one(model.prime(), prec));
}

/// 1 in F, the extension being Q_p(sqrt d) for the smallest non-residue d.
template <class F>
F field_one(long p, long prec);

template <>
inline PadicNumber field_one<PadicNumber>(long p, long prec) {
    return PadicNumber::one(p, prec);
}

template <>
inline QuadExtElement field_one<QuadExtElement>(long p, long prec) {
    return QuadExtElement::one(p, smallest_nonresidue(p), prec);
}

template <class F>
WeierstrassCoefficients<F> tate_weierstrass(const TateCoefficients& c, const F& model) {
    const long p = model.prime();
    const long prec = c.a4.absolute_precision() + 2;
    const F zero = embed_like(model, PadicNumber::zero(p, prec));
    return {one_like(model, prec), zero, zero, embed_like(model, c.a4), embed_like(model, c.a6)};
}

/// A class in F^* / q^Z, represented with 0 <= ord(u) < ord(q).
template <class F>
struct TatePoint {
    F u;
    bool identity = false;
};

/// Moves u into the fundamental annulus 0 <= ord(u) < ord(q).
template <class F>
F normalize_modulo_q(const F& u, const PadicNumber& q) {
    if (u.is_zero()) throw std::domain_error("zero is not in the multiplicative group");
    const long m = q.valuation();
    long k = u.valuation() / m;
    if (u.valuation() < 0 && u.valuation() % m != 0) --k;
    if (k == 0) return u;
    return u / embed_like(u, q.pow(k));
}

template <class F>
TatePoint<F> make_tate_point(const F& u, const PadicNumber& q) {
    const F v = normalize_modulo_q(u, q);
    const bool ident = v.valuation() == 0 && (v - one_like(v, v.precision())).is_zero();
    return {v, ident};
}

namespace detail {

template <class F>
F f_term(const F& w) {
    const F d = one_like(w, w.precision()) - w;
    return w / (d * d);
}

template <class F>
F g_term(const F& w) {
    const F d = one_like(w, w.precision()) - w;
    return (w * w) / (d * d * d);
}

// sum_{n>=1} n q^n / (1 - q^n), terms below absolute precision `target`.
inline PadicNumber s1_tail(const PadicNumber& q, long target, long prec) {
    const long p = q.prime();
    const long m = q.valuation();
    PadicNumber s = PadicNumber::zero(p, target);
    PadicNumber qn = PadicNumber::one(p, prec);
    for (long n = 1; n * m < target; ++n) {
        qn = qn * q;
        s += qn.scaled(n) / (PadicNumber::one(p, prec) - qn);
    }
    return s;
}

// The n != 0 parts of X(u,q), Y(u,q) for normalized u, down to absolute precision `target`.
template <class F>
std::pair<F, F> phi_tail(const F& u, const PadicNumber& q, long target) {
    const long p = q.prime();
    const long m = q.valuation();
    const long s = u.valuation();
    const long prec = std::max<long>(u.precision(), q.precision()) + 2;
    const PadicNumber s1 = s1_tail(q, target, prec);
    F rx = embed_like(u, s1.scaled(-2));
    F ry = embed_like(u, s1);
    const F uinv = u.inverse();
    PadicNumber qn = PadicNumber::one(p, prec);
    for (long n = 1; n * m - s < target; ++n) {
        qn = qn * q;
        const F qnf = embed_like(u, qn);
        const F inner = qnf * uinv;  // q^n / u
        rx += f_term(inner);
        ry -= inner / ((one_like(u, prec) - inner) * (one_like(u, prec) - inner) * (one_like(u, prec) - inner));
        if (n * m + s < target) {
            const F outer = qnf * u;
            rx += f_term(outer);
            ry += g_term(outer);
        }
    }
    return {rx, ry};
}

}  // namespace detail

/// phi(u) = (X(u,q), Y(u,q)) on E_q; the identity class maps to the point at infinity.
template <class F>
AffinePoint<F> phi(const F& u_in, const PadicNumber& q) {
    if (q.is_zero() || q.valuation() < 1) throw std::invalid_argument("Tate parameter must have positive valuation");
    const TatePoint<F> tp = make_tate_point(u_in, q);
    if (tp.identity) return AffinePoint<F>::at_infinity();
    const F& u = tp.u;
    const F w = one_like(u, u.precision() + 2) - u;
    if (u.valuation() == 0 && w.valuation() > 0 && w.precision() < 2) {
        throw precision_error("insufficient precision near identity");
    }
    const F x0 = u / (w * w);
    const F y0 = (u * u) / (w * w * w);
    const long target = std::max(x0.absolute_precision(), y0.absolute_precision());
    const auto [rx, ry] = detail::phi_tail(u, q, target);
    return AffinePoint<F>::affine(x0 + rx, y0 + ry);
}

/// True when both coordinates agree on every digit known for both.
template <class F>
bool same_point(const AffinePoint<F>& a, const AffinePoint<F>& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x.agrees_with(b.x) && a.y.agrees_with(b.y);
}

namespace detail {

// u = ya / (xa + ya) = 1 - xa / (xa + ya); near u = 1 the second form keeps the digits of 1 - u.
template <class F>
F solve_linear(const F& xa, const F& ya) {
    const F s = xa + ya;
    const F direct = ya / s;
    const F w = xa / s;
    if (w.is_zero() || w.valuation() <= 0) return direct;
    const F alt = one_like(w, w.absolute_precision()) - w;
    return alt.precision() > direct.precision() ? alt : direct;
}

// Fixed point of u = (y - Ry(u)) / ((x - Rx(u)) + (y - Ry(u))), exact in the limit q -> 0.
template <class F>
F invert_by_iteration(const AffinePoint<F>& pt, const PadicNumber& q) {
    const long N = std::min(pt.x.precision(), pt.y.precision());
    const long target = std::max(pt.x.absolute_precision(), pt.y.absolute_precision());
    F u = solve_linear(pt.x, pt.y);
    const long rounds = N / q.valuation() + 4;
    for (long i = 0; i < rounds; ++i) {
        const F un = normalize_modulo_q(u, q);
        const auto [rx, ry] = phi_tail(un, q, target + 2);
        u = solve_linear(pt.x - rx, pt.y - ry);
    }
    return u;
}

}  // namespace detail

/**
 * u with phi(u) = pt, normalized modulo q^Z. Tried directly and through -pt
 * (u -> 1/u), then confirmed by evaluating phi forward.
 */
template <class F>
TatePoint<F> phi_inverse(const AffinePoint<F>& pt, const PadicNumber& q, const TateCoefficients& coeffs) {
    if (pt.infinity) return {field_one<F>(q.prime(), q.precision()), true};
    const auto curve = tate_weierstrass(coeffs, pt.x);
    if (!is_zero_value(weierstrass_residual(curve, pt.x, pt.y))) {
        throw std::invalid_argument("point does not satisfy the Tate curve equation");
    }
    const AffinePoint<F> neg = weierstrass_negate(curve, pt);
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            F u = attempt == 0 ? detail::invert_by_iteration(pt, q) : detail::invert_by_iteration(neg, q).inverse();
            const TatePoint<F> cand = make_tate_point(u, q);
            if (cand.identity) continue;
            if (same_point(phi(cand.u, q), pt)) return cand;
        } catch (const std::domain_error&) {
        } catch (const precision_error&) {
        }
    }
    throw precision_error("inversion failed: raise precision");
}

}  // namespace ecbound
