#include "ecbound/elliptic.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ecbound;

namespace {

WeierstrassCurve c5077() { return compute_invariants(0, 0, 1, -7, 6); }
WeierstrassCurve c37() { return compute_invariants(0, 0, 1, -1, 0); }
WeierstrassCurve c389() { return compute_invariants(0, 1, 1, -2, 0); }
WeierstrassCurve c11() { return compute_invariants(0, -1, 1, -10, -20); }

RationalPoint pt(long x, long y) { return RationalPoint::affine(Rational(x), Rational(y)); }

// Affine points of y^2 + a1 xy + a3 y = x^3 + ... over F_l by scanning all pairs, plus infinity.
long count_oracle(const WeierstrassCurve& e, long l) {
    auto r = [l](const Integer& v) { return mod(v, Integer(l)).get_si(); };
    const long a1 = r(e.a1), a2 = r(e.a2), a3 = r(e.a3), a4 = r(e.a4), a6 = r(e.a6);
    long n = 1;
    for (long x = 0; x < l; ++x)
        for (long y = 0; y < l; ++y) {
            const long lhs = (y * y + a1 * x * y + a3 * y) % l;
            const long rhs = (((x * x % l) * x) + a2 * x * x + a4 * x + a6) % l;
            if ((lhs - rhs) % l == 0) ++n;
        }
    return n;
}

bool euler_criterion_square(const Integer& a, long l) {
    return powmod(mod(a, Integer(l)), Integer((l - 1) / 2), Integer(l)) == 1;
}

std::vector<RationalPoint> small_combinations(const WeierstrassCurve& e, const std::vector<RationalPoint>& gens) {
    std::vector<RationalPoint> out;
    for (long i = -2; i <= 2; ++i)
        for (long j = -1; j <= 1; ++j)
            for (long k = -1; k <= 1; ++k)
                out.push_back(add_points(
                    e, scalar_multiply(e, gens[0], i),
                    add_points(e, scalar_multiply(e, gens[1], j), scalar_multiply(e, gens[2], k))));
    return out;
}

bool same(const RationalPoint& a, const RationalPoint& b) {
    return a.infinity == b.infinity && (a.infinity || (a.x == b.x && a.y == b.y));
}

}  // namespace

TEST(Invariants, Curve5077) {
    const auto e = c5077();
    EXPECT_EQ(e.discriminant, 5077);
    EXPECT_EQ(e.c4, 336);
    EXPECT_EQ(e.c6, -216 * 25);  // b2 = 0, b6 = 1 + 24
    EXPECT_EQ(e.j, Rational(Integer(37933056), Integer(5077)));
    EXPECT_EQ(Integer(37933056), Integer(4096) * 27 * 343);
    EXPECT_TRUE(invariants_consistent(e));
    EXPECT_EQ(c37().discriminant, 37);
    EXPECT_EQ(c389().discriminant, 389);
    EXPECT_EQ(c11().discriminant, -161051);
    EXPECT_EQ(compute_invariants(0, 0, 0, 0, 1).discriminant, -432);
    EXPECT_THROW(compute_invariants(0, 0, 0, 0, 0), std::domain_error);
}

TEST(GroupLaw, DoublingMatchesImplicitDerivative) {
    // (2y + 1) y' = 3x^2 - 7 gives slope -7/5 at (0,2); the line meets the cubic again at x = 49/25
    const auto e = c5077();
    const Rational lam(-7, 5);
    const Rational x3 = lam * lam;
    const Rational y3 = -(lam * x3 + 2) - 1;
    const auto d = double_point(e, pt(0, 2));
    EXPECT_EQ(d.x, Rational(49, 25));
    EXPECT_EQ(d.x, x3);
    EXPECT_EQ(d.y, y3);
    EXPECT_EQ(d.y, Rational(-32, 125));
    EXPECT_TRUE(is_on_curve(e, d));
}

TEST(GroupLaw, AbelianGroupAxioms) {
    const auto e = c5077();
    const auto pts = small_combinations(e, {pt(0, 2), pt(1, 0), pt(2, 0)});
    int triples = 0;
    for (std::size_t i = 0; i < pts.size() && triples < 200; i += 3)
        for (std::size_t j = 1; j < pts.size() && triples < 200; j += 7)
            for (std::size_t k = 2; k < pts.size() && triples < 200; k += 11, ++triples) {
                const auto& a = pts[i];
                const auto& b = pts[j];
                const auto& c = pts[k];
                EXPECT_TRUE(same(add_points(e, add_points(e, a, b), c), add_points(e, a, add_points(e, b, c))));
            }
    EXPECT_EQ(triples, 200);
    for (const auto& a : pts) {
        EXPECT_TRUE(is_on_curve(e, a));
        EXPECT_TRUE(same(add_points(e, a, RationalPoint::at_infinity()), a));
        EXPECT_TRUE(add_points(e, a, negate_point(e, a)).infinity);
        EXPECT_TRUE(same(add_points(e, a, pts[5]), add_points(e, pts[5], a)));
    }
    EXPECT_THROW(add_points(e, pt(0, 0), pt(0, 2)), std::invalid_argument);
}

TEST(GroupLaw, ScalarMultiplication) {
    const auto e = c37();
    const auto P = pt(0, 0);
    RationalPoint acc = RationalPoint::at_infinity();
    for (long k = 0; k <= 12; ++k) {
        EXPECT_TRUE(same(scalar_multiply(e, P, k), acc));
        EXPECT_TRUE(same(scalar_multiply(e, P, -k), negate_point(e, acc)));
        acc = add_points(e, acc, P);
    }
}

TEST(Reduction, NonsplitAt5077) {
    const auto r = reduction_type(c5077(), 5077);
    EXPECT_EQ(r.kind, ReductionKind::nonsplit_multiplicative);
    EXPECT_EQ(r.disc_valuation, 1);
    EXPECT_EQ(to_string(r.kind), "multiplicative-nonsplit");
    EXPECT_EQ(reduction_type(c5077(), 11).kind, ReductionKind::good);
}

TEST(Reduction, Curve37MatchesEulerCriterion) {
    const auto e = c37();
    EXPECT_EQ(-e.c6, 216);
    const bool square = euler_criterion_square(-e.c6, 37);
    EXPECT_EQ(reduction_type(e, 37).kind,
              square ? ReductionKind::split_multiplicative : ReductionKind::nonsplit_multiplicative);
    EXPECT_EQ(reduction_type(c389(), 389).kind, euler_criterion_square(-c389().c6, 389)
                                                     ? ReductionKind::split_multiplicative
                                                     : ReductionKind::nonsplit_multiplicative);
}

TEST(Reduction, PartitionOfSmallPrimes) {
    for (const auto& e : {c5077(), c37(), c389(), c11()}) {
        for (long l = 5; l <= 100; ++l) {
            if (!is_prime(l)) continue;
            const auto r = reduction_type(e, l);
            const bool bad = e.discriminant % l == 0;
            EXPECT_EQ(r.kind == ReductionKind::good, !bad);
            if (bad && e.c4 % l != 0) {
                EXPECT_TRUE(r.multiplicative());
            }
        }
    }
    EXPECT_THROW(reduction_type(compute_invariants(0, 0, 0, 0, 1), 2), std::invalid_argument);
    EXPECT_THROW(reduction_type(c5077(), 12), std::invalid_argument);
}

TEST(PrimeConductor, Examples) {
    const auto r = check_prime_conductor(c5077());
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.p, 5077);
    EXPECT_EQ(r.k, 1);
    EXPECT_TRUE(check_prime_conductor(c37()).passed());
    const auto bad = check_prime_conductor(compute_invariants(0, 0, 0, 0, 1));
    EXPECT_FALSE(bad.passed());
    EXPECT_FALSE(bad.items.front().passed);
    EXPECT_EQ(bad.items.front().name, "discriminant_prime_power");
    // -11^5 is a prime power; 11a1 is rejected later, by its torsion
    const auto r11 = check_prime_conductor(c11());
    EXPECT_EQ(r11.p, 11);
    EXPECT_EQ(r11.k, 5);
}

TEST(PointCounts, MatchBruteForceAndHasse) {
    for (const auto& e : {c5077(), c37(), c389()})
        for (long l = 3; l < 80; ++l) {
            if (!is_prime(l) || e.discriminant % l == 0) continue;
            const long n = count_points(e, l);
            EXPECT_EQ(n, count_oracle(e, l));
            EXPECT_LE(std::abs(n - (l + 1)), 2.0 * std::sqrt(static_cast<double>(l)));
        }
}

TEST(Torsion, TrivialityCertificates) {
    const auto e = c5077();
    EXPECT_TRUE(torsion_is_trivial(e, {3, 5, 7, 11}).trivial);
    const auto t11 = torsion_is_trivial(c11(), good_odd_primes(c11(), 10));
    EXPECT_FALSE(t11.trivial);
    EXPECT_EQ(t11.gcd % 5, 0);
    EXPECT_THROW(torsion_is_trivial(e, {3, 5}), std::invalid_argument);
    EXPECT_THROW(torsion_is_trivial(c37(), {3, 5, 37}), std::invalid_argument);
    for (long l : good_odd_primes(e, 10)) EXPECT_NE(e.discriminant % l, 0);
}

TEST(Heights, TorsionAndIdentity) {
    const auto e = c11();
    const auto T = pt(5, 5);
    ASSERT_TRUE(is_on_curve(e, T));
    const auto h = canonical_height(e, T, 6);
    EXPECT_TRUE(h.torsion);
    EXPECT_EQ(h.value, 0.0);
    EXPECT_EQ(canonical_height(c5077(), RationalPoint::at_infinity(), 6).value, 0.0);
    EXPECT_THROW(canonical_height(c5077(), pt(0, 2), 3), std::invalid_argument);
    EXPECT_THROW(canonical_height(c5077(), pt(0, 1), 6), std::invalid_argument);
}

TEST(Heights, QuadraticityWithinErrorBounds) {
    const auto e = c5077();
    for (const auto& P : {pt(0, 2), pt(1, 0), pt(2, 0)}) {
        const auto h1 = canonical_height(e, P, 6);
        for (long m : {2L, 3L}) {
            const auto hm = canonical_height(e, scalar_multiply(e, P, m), 6);
            EXPECT_LE(std::fabs(hm.value - double(m * m) * h1.value),
                      hm.error_bound + double(m * m) * h1.error_bound);
        }
        const auto h7 = canonical_height(e, P, 7);
        EXPECT_LE(std::fabs(h7.value - h1.value), h7.error_bound + h1.error_bound);
        EXPECT_GT(h1.value - h1.error_bound, 0.0);
    }
}

TEST(Heights, Curve37Generator) {
    // reference value 0.0511114082...
    const auto h = canonical_height(c37(), pt(0, 0), 8);
    EXPECT_LE(std::fabs(h.value - 0.0511114082), h.error_bound);
}

TEST(Regulator, PositiveAndDegenerate) {
    const auto e = c5077();
    const auto reg = regulator(e, {pt(0, 2), pt(1, 0), pt(2, 0)});
    EXPECT_GT(reg.regulator - reg.error_bound, 0.0);
    EXPECT_LE(std::fabs(reg.regulator - 0.4171435587), reg.error_bound);
    const auto P = pt(0, 2);
    EXPECT_THROW(regulator(e, {P, double_point(e, P)}), precision_error);
    const auto single = regulator(e, {P});
    EXPECT_NEAR(single.regulator, canonical_height(e, P, 7).value, 1e-12);
}

TEST(Interval, DeterminantEnclosesExactValue) {
    const std::vector<std::vector<Interval>> m{{{1.9, 2.1}, {0.9, 1.1}}, {{0.9, 1.1}, {2.9, 3.1}}};
    const auto d = interval_determinant(m);
    EXPECT_LE(d.lo, 5.0);
    EXPECT_GE(d.hi, 5.0);
    EXPECT_LE(d.lo, 1.9 * 2.9 - 1.1 * 1.1);
    EXPECT_GE(d.hi, 2.1 * 3.1 - 0.9 * 0.9);
}
