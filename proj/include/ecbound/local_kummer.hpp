#pragma once

// Kummer classes of local points: Q_p^*/(Q_p^*)^{p^n} in the split case, the
// norm-restricted group H/H^{p^n} inside the unramified quadratic extension
// in the non-split case, and the resulting local Kummer degrees.

#include "ecbound/elliptic.hpp"
#include "ecbound/padic.hpp"
#include "ecbound/quadext.hpp"
#include "ecbound/tate_curve.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecbound {

enum class KummerBasis {
    split_pq,  // <p> x <1+p>
    split_q,   // <q> x <1+p>
    nonsplit,  // <q> x <u>
};

inline std::string to_string(KummerBasis b) {
    switch (b) {
        case KummerBasis::split_pq: return "SPLIT_PQ";
        case KummerBasis::split_q: return "SPLIT_Q";
        case KummerBasis::nonsplit: return "NONSPLIT";
    }
    return "?";
}

/// Coordinates (alpha, beta) in (Z/p^n)^2 against the basis named by the tag.
struct KummerClass {
    long prime = 3;
    long n = 1;
    Integer alpha = 0;
    Integer beta = 0;
    KummerBasis basis = KummerBasis::split_pq;

    Integer modulus() const { return pow_int(prime, static_cast<unsigned long>(n)); }

    static KummerClass make(long p, long n, const Integer& a, const Integer& b, KummerBasis basis) {
        const Integer m = pow_int(p, static_cast<unsigned long>(n));
        return {p, n, mod(a, m), mod(b, m), basis};
    }

    static KummerClass trivial(long p, long n, KummerBasis basis) { return make(p, n, 0, 0, basis); }

    bool is_trivial() const { return alpha == 0 && beta == 0; }

    KummerClass scaled(const Integer& k) const { return make(prime, n, alpha * k, beta * k, basis); }

    friend KummerClass operator+(const KummerClass& a, const KummerClass& b) {
        if (a.prime != b.prime || a.n != b.n || a.basis != b.basis) throw std::invalid_argument("basis mismatch");
        return make(a.prime, a.n, a.alpha + b.alpha, a.beta + b.beta, a.basis);
    }

    friend bool operator==(const KummerClass& a, const KummerClass& b) {
        return a.prime == b.prime && a.n == b.n && a.basis == b.basis && a.alpha == b.alpha && a.beta == b.beta;
    }

    std::string to_string() const {
        return "(" + alpha.get_str() + ", " + beta.get_str() + ") mod " + std::to_string(prime) + "^" +
               std::to_string(n) + " [" + ecbound::to_string(basis) + "]";
    }
};

namespace detail {

inline void require_class_precision(long precision, long n) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (precision < n + 2) {
        throw precision_error("insufficient precision: need " + std::to_string(n + 2) + " digits, have " +
                              std::to_string(precision));
    }
}

}  // namespace detail

/// alpha = ord_p(x), beta = exponent of the one-unit part on 1+p; the Teichmuller part is a p^n-th power.
inline KummerClass split_kummer_class(const PadicNumber& x, long n) {
    if (x.is_zero()) throw std::domain_error("Kummer class of zero");
    detail::require_class_precision(x.precision(), n);
    const UnitDecomposition d = unit_decompose(x);
    return KummerClass::make(x.prime(), n, d.valuation, d.one_unit_exponent, KummerBasis::split_pq);
}

/// Change of basis <p> x <1+p>  ->  <q> x <1+p>.
inline KummerClass rebase_to_q(const KummerClass& c, const PadicNumber& q, long n) {
    if (c.basis != KummerBasis::split_pq) throw std::invalid_argument("rebase_to_q expects SPLIT_PQ classes");
    const long k = q.valuation();
    if (k % c.prime == 0) throw std::domain_error("q does not generate: p | ord_p(q)");
    const KummerClass cq = split_kummer_class(q, n);
    const Integer m = c.modulus();
    const Integer kinv = inverse_mod(Integer(k), m);
    const Integer a = c.alpha * kinv;
    return KummerClass::make(c.prime, n, a, c.beta - a * cq.beta, KummerBasis::split_q);
}

inline std::vector<KummerClass> rebase_to_q(const std::vector<KummerClass>& cs, const PadicNumber& q, long n) {
    std::vector<KummerClass> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(rebase_to_q(c, q, n));
    return out;
}

struct LocalDegreeResult {
    long prime = 3;
    long n = 1;
    long exponent = 0;  // degree = p^exponent
    Integer degree = 1;
    bool cyclic = true;
    KummerClass generator;
};

namespace detail {

// Order of the subgroup generated by the beta coordinates in Z/p^n, the <q> line being quotiented out.
inline LocalDegreeResult degree_modulo_q_line(const std::vector<KummerClass>& cs, long p, long n, KummerBasis want) {
    LocalDegreeResult r;
    r.prime = p;
    r.n = n;
    r.generator = KummerClass::trivial(p, n, want);
    long best = n;
    for (const auto& c : cs) {
        if (c.basis != want || c.prime != p || c.n != n) throw std::invalid_argument("basis mismatch");
        const long v = c.beta == 0 ? n : std::min(n, ordp(c.beta, p));
        if (v < best) {
            best = v;
            r.generator = c;
        }
    }
    r.exponent = n - best;
    r.degree = pow_int(p, static_cast<unsigned long>(r.exponent));
    r.cyclic = true;
    return r;
}

}  // namespace detail

inline LocalDegreeResult local_degree_split(const std::vector<KummerClass>& classes, long p, long n) {
    return detail::degree_modulo_q_line(classes, p, n, KummerBasis::split_q);
}

inline LocalDegreeResult local_degree_nonsplit(const std::vector<KummerClass>& classes, long p, long n) {
    return detail::degree_modulo_q_line(classes, p, n, KummerBasis::nonsplit);
}

// ---------------------------------------------------------------------------
// Non-split case

/// Whether N(x) lies in q^Z: valuation a multiple of ord(q) and N(x) q^{-j} = 1.
inline bool nonsplit_membership(const QuadExtElement& x, const PadicNumber& q) {
    if (x.is_zero()) throw std::domain_error("membership of zero");
    const PadicNumber nx = x.norm();
    const long m = q.valuation();
    if (nx.valuation() % m != 0) return false;
    const PadicNumber ratio = nx / q.pow(nx.valuation() / m);
    const PadicNumber diff = ratio - PadicNumber::one(q.prime(), ratio.precision());
    if (!diff.is_zero()) return false;
    if (diff.absolute_precision() < 2) throw precision_error("precision insufficient to decide membership");
    return true;
}

struct NormKernelBasis {
    PadicNumber q;
    QuadExtElement u;
    long n = 1;
    long index_h_h0 = 1;               // [H : q^Z x U_{M,1}]
    std::optional<QuadExtElement> t;   // norm q, present iff ord(q) is even
    Integer log_unit = 0;              // sqrt(d)-coefficient of log(u^{p+1}) divided by p, a unit
    long log_precision = 0;            // log_unit known modulo p^log_precision

    long prime() const { return q.prime(); }
    long nonresidue() const { return u.nonresidue(); }
};

namespace detail {

// sqrt(d)-coefficient of log(y^{p+1}) for a norm-one unit y, with its absolute precision.
inline std::pair<Integer, long> norm_one_log_coefficient(const QuadExtElement& y) {
    const long p = y.prime();
    if (y.is_zero() || y.valuation() != 0) throw std::domain_error("expected a unit of M");
    const QuadExtElement z = y.pow(p + 1);
    const long N = z.precision();
    const auto [a, b] = quad_log(z, N);
    if (mod(a, pow_int(p, static_cast<unsigned long>(N))) != 0) {
        throw std::logic_error("norm-one element has a logarithm with nonzero trace");
    }
    return {b, N};
}

}  // namespace detail

/// Generator u = (1+p sqrt d)/(1-p sqrt d) of U_{M,1} modulo p^n-th powers, with the H_0 bookkeeping.
inline NormKernelBasis nonsplit_basis(const PadicNumber& q, long d, long n, long precision) {
    const long p = q.prime();
    if (q.is_zero() || q.valuation() < 1) throw std::invalid_argument("Tate parameter must have positive valuation");
    if (legendre(d, p) != -1) throw std::invalid_argument("d must be a quadratic non-residue");
    detail::require_class_precision(precision, n);
    const QuadExtElement ps = QuadExtElement::from_components(p, d, 1, p, precision);
    const QuadExtElement ms = QuadExtElement::from_components(p, d, 1, -p, precision);
    NormKernelBasis b;
    b.q = q;
    b.n = n;
    b.u = ps / ms;
    if (!(quad_norm(b.u) - PadicNumber::one(p, precision)).is_zero()) throw std::logic_error("generator norm is not 1");
    const auto [c, N] = detail::norm_one_log_coefficient(b.u);
    if (c == 0 || ordp(c, p) != 1) throw std::logic_error("generator is a p-th power at working precision");
    b.log_unit = c / p;
    b.log_precision = N - 1;
    const long nu = q.valuation();
    b.index_h_h0 = nu % 2 == 0 ? 2 : 1;
    if (nu % 2 == 0) {
        const PadicNumber scale = PadicNumber::from_parts(p, nu, 1, q.precision());
        const QuadExtElement w = solve_norm(q / scale, d);
        b.t = QuadExtElement::embed(PadicNumber::from_parts(p, nu / 2, 1, w.precision()), d) * w;
    }
    return b;
}

inline NormKernelBasis nonsplit_basis(const PadicNumber& q, long d, long n) {
    return nonsplit_basis(q, d, n, q.precision());
}

/**
 * x = q^alpha u^beta modulo H^{p^n}. With N(x) = q^j, the element y = x^2 q^{-j}
 * has norm one, so 2 alpha = j and 2 beta = log(y)/log(u), 2 being invertible mod p^n.
 */
inline KummerClass nonsplit_class(const QuadExtElement& x, const NormKernelBasis& basis) {
    const long p = basis.prime();
    const long n = basis.n;
    if (!nonsplit_membership(x, basis.q)) throw std::domain_error("element is not in H: norm outside q^Z");
    const long j = x.norm().valuation() / basis.q.valuation();
    const QuadExtElement y = (x * x) / QuadExtElement::embed(basis.q.pow(j), basis.nonresidue());
    detail::require_class_precision(y.precision(), n);
    const auto [c, N] = detail::norm_one_log_coefficient(y);
    const long prec = std::min(N, basis.log_precision + 1) - 1;
    if (prec < n) throw precision_error("insufficient precision for the norm-one logarithm");
    const Integer mp = pow_int(p, static_cast<unsigned long>(prec));
    if (c != 0 && ordp(c, p) < 1) throw std::logic_error("logarithm of a one-unit is not divisible by p");
    const Integer beta2 = mod((c / p) * inverse_mod(basis.log_unit, mp), mp);
    const Integer m = pow_int(p, static_cast<unsigned long>(n));
    const Integer half = inverse_mod(2, m);
    return KummerClass::make(p, n, Integer(j) * half, beta2 * half, KummerBasis::nonsplit);
}

// ---------------------------------------------------------------------------
// From rational points to local classes

/// Tate-curve data of a curve with multiplicative reduction at p, and the isomorphism E -> E_q.
struct LocalUniformization {
    long p = 0;
    long precision = 0;
    long disc_valuation = 0;  // ord_p(Delta) = ord_p(q)
    bool split = true;
    long d = 0;               // non-residue defining M
    TateParameter tate;
    TateCoefficients coeffs;
    PadicNumber gamma;        // lambda^2 for the scaling (X, Y) -> (lambda^2 X, lambda^3 Y)
    PadicNumber lambda_root;  // lambda (split) or lambda / sqrt(d) (non-split)
    std::optional<NormKernelBasis> norm_basis;
};

inline LocalUniformization local_uniformization(const WeierstrassCurve& e, long p, long precision, long n) {
    const ReductionInfo info = reduction_type(e, p);
    if (!info.multiplicative()) throw std::domain_error("curve does not have multiplicative reduction at p");
    LocalUniformization lu;
    lu.p = p;
    lu.precision = precision;
    lu.disc_valuation = info.disc_valuation;
    lu.d = smallest_nonresidue(p);
    const PadicNumber j = PadicNumber::from_rational(p, e.j, precision);
    lu.tate = tate_parameter_from_j(j, precision);
    if (lu.tate.order() != info.disc_valuation) throw std::logic_error("ord(q) differs from ord(Delta)");
    lu.coeffs = eq_coefficients(lu.tate);
    const auto [c4q, c6q] = tate_c4_c6(lu.coeffs);
    const PadicNumber c4 = PadicNumber::from_rational(p, Rational(e.c4), precision);
    const PadicNumber c6 = PadicNumber::from_rational(p, Rational(e.c6), precision);
    lu.gamma = (c6q / c6) * (c4 / c4q);
    if (lu.gamma.valuation() != 0) throw std::logic_error("scaling factor is not a unit");
    if (auto r = lu.gamma.sqrt()) {
        lu.split = true;
        lu.lambda_root = *r;
    } else {
        lu.split = false;
        auto s = (lu.gamma / PadicNumber::from_integer(p, lu.d, precision)).sqrt();
        if (!s) throw std::logic_error("gamma/d is not a square");
        lu.lambda_root = *s;
    }
    const bool split_expected = info.kind == ReductionKind::split_multiplicative;
    if (lu.split != split_expected) throw std::logic_error("Tate scaling disagrees with the reduction type");
    if (!lu.split) lu.norm_basis = nonsplit_basis(lu.tate.q, lu.d, n, precision);
    return lu;
}

namespace detail {

// (X, Y) = (36x + 3b2, 108(2y + a1 x + a3)) on Y^2 = X^3 - 27 c4 X - 54 c6.
inline std::pair<Rational, Rational> short_model(const WeierstrassCurve& e, const RationalPoint& pt) {
    const Rational X = 36 * pt.x + 3 * Rational(e.b2);
    const Rational Y = 108 * (2 * pt.y + Rational(e.a1) * pt.x + Rational(e.a3));
    return {X, Y};
}

template <class F>
AffinePoint<F> to_tate_coordinates(const F& Xs, const F& Ys, long p, long prec) {
    const F three = embed_like(Xs, PadicNumber::from_integer(p, 3, prec));
    const F inv36 = embed_like(Xs, PadicNumber::from_rational(p, Rational(1, 36), prec));
    const F inv108 = embed_like(Xs, PadicNumber::from_rational(p, Rational(1, 108), prec));
    const F half = embed_like(Xs, PadicNumber::from_rational(p, Rational(1, 2), prec));
    const F xq = (Xs - three) * inv36;
    const F yq = (Ys * inv108 - xq) * half;
    return AffinePoint<F>::affine(xq, yq);
}

template <class F>
void require_on_tate_curve(const AffinePoint<F>& pt, const TateCoefficients& c) {
    if (pt.infinity) return;
    if (!is_zero_value(weierstrass_residual(tate_weierstrass(c, pt.x), pt.x, pt.y))) {
        throw precision_error("transported point misses the Tate curve: raise precision");
    }
}

}  // namespace detail

/// Image of a rational point on E_q(Q_p) (split reduction).
inline AffinePoint<PadicNumber> transport_split(const WeierstrassCurve& e, const LocalUniformization& lu,
                                                const RationalPoint& pt) {
    if (!lu.split) throw std::logic_error("transport_split on a non-split curve");
    require_on_curve(e, pt);
    if (pt.infinity) return AffinePoint<PadicNumber>::at_infinity();
    const auto [X, Y] = detail::short_model(e, pt);
    const long p = lu.p;
    const long N = lu.precision;
    const PadicNumber Xs = PadicNumber::from_rational(p, X, N) * lu.gamma;
    const PadicNumber Ys = PadicNumber::from_rational(p, Y, N) * lu.gamma * lu.lambda_root;
    auto out = detail::to_tate_coordinates(Xs, Ys, p, N + 2);
    detail::require_on_tate_curve(out, lu.coeffs);
    return out;
}

/// Image of a rational point on E_q(M) (non-split reduction: E is the twist of E_q by M).
inline AffinePoint<QuadExtElement> transport_nonsplit(const WeierstrassCurve& e, const LocalUniformization& lu,
                                                      const RationalPoint& pt) {
    if (lu.split) throw std::logic_error("transport_nonsplit on a split curve");
    require_on_curve(e, pt);
    if (pt.infinity) return AffinePoint<QuadExtElement>::at_infinity();
    const auto [X, Y] = detail::short_model(e, pt);
    const long p = lu.p;
    const long N = lu.precision;
    const QuadExtElement lambda =
        QuadExtElement::embed(lu.lambda_root, lu.d) * QuadExtElement::sqrt_d(p, lu.d, N + 2);
    const QuadExtElement Xs = QuadExtElement::embed(PadicNumber::from_rational(p, X, N) * lu.gamma, lu.d);
    const QuadExtElement Ys =
        QuadExtElement::embed(PadicNumber::from_rational(p, Y, N) * lu.gamma, lu.d) * lambda;
    auto out = detail::to_tate_coordinates(Xs, Ys, p, N + 2);
    detail::require_on_tate_curve(out, lu.coeffs);
    return out;
}

namespace detail {

inline KummerClass direct_local_class(const WeierstrassCurve& e, const LocalUniformization& lu,
                                      const RationalPoint& pt, long n) {
    const PadicNumber& q = lu.tate.q;
    if (lu.split) {
        const auto tp = phi_inverse(transport_split(e, lu, pt), q, lu.coeffs);
        if (tp.identity) return KummerClass::trivial(lu.p, n, KummerBasis::split_q);
        return rebase_to_q(split_kummer_class(tp.u, n), q, n);
    }
    const auto tp = phi_inverse(transport_nonsplit(e, lu, pt), q, lu.coeffs);
    if (tp.identity) return KummerClass::trivial(lu.p, n, KummerBasis::nonsplit);
    return nonsplit_class(tp.u, *lu.norm_basis);
}

}  // namespace detail

/**
 * Class of P in the split (SPLIT_Q) or non-split (NONSPLIT) Kummer group.
 * Points reducing to the node are handled through [k]P, k = ord_p(Delta),
 * which lands on the identity component; k is prime to p.
 */
inline KummerClass point_to_local_class(const WeierstrassCurve& e, const LocalUniformization& lu,
                                        const RationalPoint& pt, long n) {
    const KummerBasis basis = lu.split ? KummerBasis::split_q : KummerBasis::nonsplit;
    require_on_curve(e, pt);
    if (pt.infinity) return KummerClass::trivial(lu.p, n, basis);
    try {
        return detail::direct_local_class(e, lu, pt, n);
    } catch (const precision_error&) {
        const long k = lu.disc_valuation;
        if (k <= 1 || k % lu.p == 0) throw;
        const RationalPoint kp = scalar_multiply(e, pt, k);
        if (kp.infinity) return KummerClass::trivial(lu.p, n, basis);
        const KummerClass c = detail::direct_local_class(e, lu, kp, n);
        const Integer m = pow_int(lu.p, static_cast<unsigned long>(n));
        return c.scaled(inverse_mod(Integer(k), m));
    }
}

inline LocalDegreeResult local_degree(const WeierstrassCurve& e, const LocalUniformization& lu,
                                      const std::vector<RationalPoint>& points, long n) {
    std::vector<KummerClass> classes;
    for (const auto& pt : points) classes.push_back(point_to_local_class(e, lu, pt, n));
    return lu.split ? local_degree_split(classes, lu.p, n) : local_degree_nonsplit(classes, lu.p, n);
}

}  // namespace ecbound
