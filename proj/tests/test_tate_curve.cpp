#include "ecbound/tate_curve.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ecbound;

namespace {

// Known Fourier coefficients of j(q) q: 1, 744, 196884, ...
const std::vector<long> kJ = {1, 744, 196884, 21493760, 864299970, 20245856256L, 333202640600L};

IntSeries truncated_mul(const IntSeries& a, const IntSeries& b, std::size_t len) {
    IntSeries c(len, Integer(0));
    for (std::size_t i = 0; i < len && i < a.size(); ++i)
        for (std::size_t j = 0; i + j < len && j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

PadicNumber random_unit(std::mt19937_64& rng, long p, long N) {
    const Integer m = pow_int(p, N);
    Integer u = rng() % m.get_ui();
    if (u % p == 0) u += 1;
    return PadicNumber::from_parts(p, 0, u, N);
}

// q * prod (1 - q^n)^24, summed directly.
PadicNumber delta_product(const PadicNumber& q, long terms) {
    const long p = q.prime();
    const long N = q.precision() + 2;
    PadicNumber prod = PadicNumber::one(p, N);
    PadicNumber qn = PadicNumber::one(p, N);
    for (long n = 1; n <= terms; ++n) {
        qn = qn * q;
        prod = prod * (PadicNumber::one(p, N) - qn).pow(24);
    }
    return q * prod;
}

PadicNumber weierstrass_discriminant(const PadicNumber& a4, const PadicNumber& a6) {
    // y^2 + xy = x^3 + a4 x + a6: b2 = 1, b4 = 2 a4, b6 = 4 a6, b8 = a6 - a4^2
    const long p = a4.prime();
    const long N = a4.absolute_precision() + 4;
    const auto one = PadicNumber::one(p, N);
    const auto b2 = one;
    const auto b4 = a4.scaled(2);
    const auto b6 = a6.scaled(4);
    const auto b8 = a6 - a4 * a4;
    return -(b2 * b2 * b8) - (b4 * b4 * b4).scaled(8) - (b6 * b6).scaled(27) + (b2 * b4 * b6).scaled(9);
}

}  // namespace

TEST(JSeries, CoefficientsMatchKnownValues) {
    const auto c = j_coefficients(kJ.size());
    for (std::size_t i = 0; i < kJ.size(); ++i) EXPECT_EQ(c[i], kJ[i]) << i;
}

TEST(JSeries, ReversionComposesToIdentity) {
    // with t = 1/j and q(t) = sum b_k t^k:  q(t) = t * (1 + 744 q + 196884 q^2 + ...)(q(t))
    const std::size_t len = kJ.size() + 1;
    const auto b = j_reversion_coefficients(len - 1);
    EXPECT_EQ(b[0], 1);
    EXPECT_EQ(b[1], 744);
    EXPECT_EQ(b[2], 750420);
    EXPECT_EQ(b[3], 872769632);
    IntSeries qt(len, Integer(0));
    for (std::size_t k = 0; k + 1 < len; ++k) qt[k + 1] = b[k];
    IntSeries sum(len, Integer(0));
    IntSeries power(len, Integer(0));
    power[0] = 1;
    for (std::size_t i = 0; i < kJ.size(); ++i) {
        for (std::size_t k = 0; k < len; ++k) sum[k] += power[k] * kJ[i];
        power = truncated_mul(power, qt, len);
    }
    IntSeries rhs(len, Integer(0));
    for (std::size_t k = 0; k + 1 < len; ++k) rhs[k + 1] = sum[k];
    EXPECT_EQ(qt, rhs);
}

TEST(TateParameter, RoundTripAgainstProductFormula) {
    std::mt19937_64 rng(21);
    for (long p : {5L, 11L})
        for (long ord : {-1L, -2L, -3L})
            for (int i = 0; i < 7; ++i) {
                const auto j = PadicNumber::from_parts(p, ord, random_unit(rng, p, 8).unit(), 8);
                const TateParameter tp = tate_parameter_from_j(j, 8);
                EXPECT_EQ(tp.order(), -ord);
                EXPECT_GE(tp.q.precision(), 8);
                const auto back = j_from_product_formula(tp.q);
                EXPECT_GE(back.precision(), 8);
                EXPECT_TRUE(back.agrees_with(j));
                EXPECT_TRUE(j_from_q_series(tp.q).agrees_with(j));
            }
}

TEST(TateParameter, RejectsIntegralJ) {
    EXPECT_THROW(tate_parameter_from_j(PadicNumber::from_integer(5, 7, 8), 8), std::domain_error);
    EXPECT_THROW(tate_parameter_from_j(PadicNumber::from_integer(5, 25, 8), 8), std::domain_error);
}

TEST(TateParameter, Curve5077HasOrderOne) {
    const auto j = PadicNumber::from_rational(5077, Rational(Integer(37933056), Integer(5077)), 8);
    const auto tp = tate_parameter_from_j(j, 8);
    EXPECT_EQ(tp.order(), 1);
}

TEST(TateCoefficients, LeadingTermsAndDiscriminant) {
    std::mt19937_64 rng(22);
    for (long p : {5L, 7L})
        for (long ord : {1L, 2L}) {
            const auto q = PadicNumber::from_parts(p, ord, random_unit(rng, p, 8).unit(), 8);
            const auto c = eq_coefficients({q, 8, 0});
            const auto qq = q * q;
            EXPECT_GE((c.a4 + q.scaled(5)).valuation(), qq.valuation());
            EXPECT_GE((c.a6 + q).valuation(), qq.valuation());
            // 12 a6 = -(5 s3 + 7 s5)
            EXPECT_TRUE((c.a6.scaled(12) + c.s3.scaled(5) + c.s5.scaled(7)).is_zero() ||
                        (c.a6.scaled(12) + c.s3.scaled(5) + c.s5.scaled(7)).valuation() >= ord + 8);
            const auto disc = weierstrass_discriminant(c.a4, c.a6);
            const auto oracle = delta_product(q, 12);
            EXPECT_EQ(disc.valuation(), ord);
            EXPECT_GE(disc.precision(), 7);
            EXPECT_TRUE(disc.agrees_with(oracle));
            const auto [c4, c6] = tate_c4_c6(c);
            EXPECT_TRUE((c4 * c4 * c4 / disc).agrees_with(j_from_product_formula(q)));
            EXPECT_TRUE((c4 * c4 * c4 - c6 * c6).agrees_with(disc.scaled(1728)));
        }
}

TEST(Phi, PointsLieOnTheCurveAndRespectSymmetries) {
    std::mt19937_64 rng(23);
    const long p = 5;
    const auto q = PadicNumber::from_parts(p, 1, random_unit(rng, p, 10).unit(), 10);
    const auto c = eq_coefficients({q, 10, 0});
    const auto curve = tate_weierstrass(c, q);
    for (int i = 0; i < 30; ++i) {
        const auto u = random_unit(rng, p, 10);
        const auto P = phi(u, q);
        if (P.infinity) continue;
        EXPECT_TRUE(weierstrass_residual(curve, P.x, P.y).is_zero());
        EXPECT_TRUE(same_point(phi(u * q, q), P));
        EXPECT_TRUE(same_point(phi(u.inverse(), q), weierstrass_negate(curve, P)));
    }
    EXPECT_TRUE(phi(q.pow(3), q).infinity);
    EXPECT_TRUE(phi(PadicNumber::one(p, 10), q).infinity);
}

TEST(Phi, HomomorphismAndInverse) {
    std::mt19937_64 rng(24);
    const long p = 5;
    const long N = 8;
    const auto q = PadicNumber::from_parts(p, 1, random_unit(rng, p, N).unit(), N);
    const auto c = eq_coefficients({q, N, 0});
    const auto curve = tate_weierstrass(c, q);
    for (int i = 0; i < 100; ++i) {
        const auto u1 = random_unit(rng, p, N);
        const auto u2 = random_unit(rng, p, N);
        const auto P12 = phi(u1 * u2, q);
        EXPECT_TRUE(same_point(weierstrass_add(curve, phi(u1, q), phi(u2, q)), P12));
        const auto inv = phi_inverse(phi(u1, q), q, c);
        EXPECT_FALSE(inv.identity);
        EXPECT_TRUE(inv.u.agrees_with(u1));
        EXPECT_GE(inv.u.precision(), N - 1);
    }
}

TEST(Phi, InverseInTheQuadraticExtension) {
    std::mt19937_64 rng(25);
    const long p = 5;
    const long N = 8;
    const long d = smallest_nonresidue(p);
    const auto q = PadicNumber::from_parts(p, 1, random_unit(rng, p, N).unit(), N);
    const auto c = eq_coefficients({q, N, 0});
    const Integer m = pow_int(p, N);
    for (int i = 0; i < 20; ++i) {
        const auto u = QuadExtElement::from_components(p, d, rng() % m.get_ui(), 1 + p * (rng() % 1000), N);
        if (u.valuation() != 0) continue;
        const auto P = phi(u, q);
        EXPECT_TRUE(weierstrass_residual(tate_weierstrass(c, u), P.x, P.y).is_zero());
        EXPECT_TRUE(phi_inverse(P, q, c).u.agrees_with(u));
    }
}

TEST(Phi, InverseKeepsDigitsNearTheIdentity) {
    const long p = 5;
    const long N = 8;
    const auto q = PadicNumber::from_parts(p, 1, 3, N);
    const auto c = eq_coefficients({q, N, 0});
    for (long k = 1; k <= 6; ++k) {
        const auto u = PadicNumber::from_integer(p, 1 + 2 * pow_int(p, k), N);
        const auto inv = phi_inverse(phi(u, q), q, c);
        EXPECT_TRUE(inv.u.agrees_with(u));
        EXPECT_GE(inv.u.precision(), N - 1) << k;
    }
}

TEST(Phi, IdentityAndPrecisionFailures) {
    const long p = 5;
    const auto q = PadicNumber::from_parts(p, 1, 2, 8);
    const auto c = eq_coefficients({q, 8, 0});
    EXPECT_TRUE(phi_inverse(AffinePoint<PadicNumber>::at_infinity(), q, c).identity);
    EXPECT_THROW(phi(PadicNumber::from_parts(p, 0, 1 + 78125, 8), q), precision_error);
    EXPECT_THROW(phi(PadicNumber::one(p, 8), PadicNumber::from_parts(p, 0, 2, 8)), std::invalid_argument);
    const auto bad = AffinePoint<PadicNumber>::affine(PadicNumber::one(p, 8), PadicNumber::one(p, 8));
    EXPECT_THROW(phi_inverse(bad, q, c), std::invalid_argument);
}
