#pragma once

// Elements of Q_p to finite relative precision, and the unit-group
// decomposition Q_p* = <p> x mu_{p-1} x (1 + pZ_p).

#include "ecbound/arith.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ecbound {

/**
 * A p-adic number p^v * unit, the unit known modulo p^N (relative precision N).
 *
 * Zero is represented by the absolute bound it is known to: a zero with
 * absolute precision A stands for "some element of p^A Z_p". Multiplication
 * is exact on the relative digits; addition loses precision exactly when
 * the leading digits cancel.
 */
class PadicNumber {
public:
    PadicNumber() = default;

    static PadicNumber zero(long p, long absolute_precision) {
        require_odd_prime(p);
        PadicNumber z;
        z.p_ = p;
        z.zero_ = true;
        z.val_ = absolute_precision;
        z.prec_ = 0;
        return z;
    }

    /// p^valuation * unit with the unit reduced modulo p^precision.
    static PadicNumber from_parts(long p, long valuation, const Integer& unit, long precision) {
        require_odd_prime(p);
        if (precision < 1) throw std::invalid_argument("relative precision must be positive");
        PadicNumber x;
        x.p_ = p;
        x.zero_ = false;
        x.val_ = valuation;
        x.prec_ = precision;
        x.unit_ = mod(unit, pow_int(p, static_cast<unsigned long>(precision)));
        if (mpz_divisible_ui_p(x.unit_.get_mpz_t(), static_cast<unsigned long>(p)) != 0) {
            throw std::invalid_argument("unit part divisible by p");
        }
        return x;
    }

    /// Exact rational, rounded to the given relative precision.
    static PadicNumber from_rational(long p, const Rational& value, long precision) {
        if (value == 0) return zero(p, precision);
        const Integer num = value.get_num();
        const Integer den = value.get_den();
        const long v = ordp(num, p) - ordp(den, p);
        const Integer m = pow_int(p, static_cast<unsigned long>(precision));
        const Integer u = strip_p(num, p) * inverse_mod(strip_p(den, p), m);
        return from_parts(p, v, u, precision);
    }

    static PadicNumber from_integer(long p, const Integer& value, long precision) {
        return from_rational(p, Rational(value), precision);
    }

    static PadicNumber one(long p, long precision) { return from_parts(p, 0, 1, precision); }

    long prime() const { return p_; }
    bool is_zero() const { return zero_; }
    /// Exact valuation for nonzero values; the known lower bound for zero.
    long valuation() const { return val_; }
    /// Relative precision; 0 for zero.
    long precision() const { return prec_; }
    long absolute_precision() const { return zero_ ? val_ : val_ + prec_; }
    const Integer& unit() const { return unit_; }
    Integer unit_modulus() const { return pow_int(p_, static_cast<unsigned long>(prec_)); }

    /// Residue of an integral value modulo p^k, k at most the absolute precision.
    Integer residue(long k) const {
        if (k > absolute_precision()) throw precision_error("residue requested beyond known digits");
        if (k <= 0) return 0;
        if (zero_ || val_ >= k) return 0;
        if (val_ < 0) throw std::domain_error("residue of a non-integral p-adic number");
        const Integer m = pow_int(p_, static_cast<unsigned long>(k));
        return mod(pow_int(p_, static_cast<unsigned long>(val_)) * unit_, m);
    }

    /// Same value with absolute precision capped at `abs`.
    PadicNumber truncated_absolute(long abs) const {
        if (zero_) return zero(p_, std::min(abs, val_));
        if (abs <= val_) return zero(p_, abs);
        return from_parts(p_, val_, unit_, std::min(prec_, abs - val_));
    }

    PadicNumber with_precision(long precision) const {
        if (zero_) return *this;
        return from_parts(p_, val_, unit_, std::min(prec_, precision));
    }

    PadicNumber operator-() const {
        if (zero_) return *this;
        return from_parts(p_, val_, -unit_, prec_);
    }

    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
        a.check_compatible(b);
        const long abs = std::min(a.absolute_precision(), b.absolute_precision());
        if (a.zero_ && b.zero_) return zero(a.p_, abs);
        if (a.zero_) return b.truncated_absolute(abs);
        if (b.zero_) return a.truncated_absolute(abs);
        const long v = std::min(a.val_, b.val_);
        if (abs <= v) return zero(a.p_, abs);
        const Integer m = pow_int(a.p_, static_cast<unsigned long>(abs - v));
        Integer s = a.unit_ * pow_int(a.p_, static_cast<unsigned long>(a.val_ - v)) +
                    b.unit_ * pow_int(a.p_, static_cast<unsigned long>(b.val_ - v));
        s = mod(s, m);
        if (s == 0) return zero(a.p_, abs);
        const long k = ordp(s, a.p_);
        return from_parts(a.p_, v + k, strip_p(s, a.p_), abs - v - k);
    }

    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
        a.check_compatible(b);
        if (a.zero_ && b.zero_) return zero(a.p_, a.val_ + b.val_);
        if (a.zero_) return zero(a.p_, a.val_ + b.val_);
        if (b.zero_) return zero(a.p_, a.val_ + b.val_);
        const long prec = std::min(a.prec_, b.prec_);
        return from_parts(a.p_, a.val_ + b.val_, a.unit_ * b.unit_, prec);
    }

    PadicNumber inverse() const {
        if (zero_) throw std::domain_error("division by zero in Q_p");
        return from_parts(p_, -val_, inverse_mod(unit_, unit_modulus()), prec_);
    }

    friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) { return a * b.inverse(); }

    PadicNumber& operator+=(const PadicNumber& o) { return *this = *this + o; }
    PadicNumber& operator-=(const PadicNumber& o) { return *this = *this - o; }
    PadicNumber& operator*=(const PadicNumber& o) { return *this = *this * o; }

    PadicNumber pow(const Integer& e) const {
        if (zero_) {
            if (e <= 0) throw std::domain_error("non-positive power of zero");
            return zero(p_, val_ * e.get_si());
        }
        const long v = val_ * e.get_si();
        return from_parts(p_, v, powmod(unit_, e, unit_modulus()), prec_);
    }

    /// Multiply by an integer constant, keeping relative precision.
    PadicNumber scaled(const Integer& c) const { return *this * from_integer(p_, c, std::max<long>(prec_, 1)); }

    /// Square root in Q_p if one exists (even valuation, residue square unit).
    std::optional<PadicNumber> sqrt() const {
        if (zero_) return zero(p_, val_ / 2);
        if (val_ % 2 != 0) return std::nullopt;
        const Integer u0 = mod(unit_, p_);
        if (legendre(u0, p_) != 1) return std::nullopt;
        Integer r = sqrt_mod_prime(u0.get_si(), p_);
        for (long cur = 1; cur < prec_;) {
            cur = std::min(2 * cur, prec_);
            const Integer m = pow_int(p_, static_cast<unsigned long>(cur));
            r = mod((r + unit_ * inverse_mod(r, m)) * inverse_mod(2, m), m);
        }
        return from_parts(p_, val_ / 2, r, prec_);
    }

    /// True when the two values agree on every digit known for both.
    bool agrees_with(const PadicNumber& o) const { return (*this - o).is_zero(); }

    std::string to_string() const {
        std::ostringstream os;
        if (zero_) {
            os << "O(" << p_ << "^" << val_ << ")";
        } else {
            os << p_ << "^" << val_ << "*" << unit_.get_str() << " + O(" << p_ << "^" << absolute_precision()
               << ")";
        }
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const PadicNumber& x) { return os << x.to_string(); }

private:
    void check_compatible(const PadicNumber& o) const {
        if (p_ != o.p_) throw std::invalid_argument("mixing p-adic numbers of different primes");
    }

    long p_ = 3;
    bool zero_ = true;
    long val_ = 0;
    long prec_ = 0;
    Integer unit_ = 0;
};

/// ord_p of a nonzero rational.
inline long ordp(long x, long p) { return ordp(Integer(x), p); }

struct UnitDecomposition {
    long prime = 3;
    long valuation = 0;
    long teich_index = 0;          // mod p-1, against the lift of the smallest primitive root
    Integer one_unit_exponent = 0;  // mod p^(precision-1)
    long precision = 2;
};

/// Teichmuller lift of a mod p, by iterating x -> x^p modulo p^N.
inline PadicNumber teichmuller(long a, long p, long precision) {
    require_odd_prime(p);
    if (((a % p) + p) % p == 0) throw std::domain_error("Teichmuller lift of a residue divisible by p");
    const Integer m = pow_int(p, static_cast<unsigned long>(precision));
    Integer x = mod(a, m);
    const Integer P = p;
    for (long i = 0; i < precision; ++i) x = powmod(x, P, m);
    return PadicNumber::from_parts(p, 0, x, precision);
}

namespace detail {

// sum_{k>=1} (-1)^{k+1} z^k / k  modulo p^N, for z = 0 mod p given mod p^N.
inline Integer log_one_unit_series(const Integer& z, long p, long precision) {
    const Integer m = pow_int(p, static_cast<unsigned long>(precision));
    Integer total = 0;
    if (mod(z, m) == 0) return 0;
    auto floor_log = [p](long k) {
        long e = 0;
        for (long t = k / p; t > 0; t /= p) ++e;
        return e;
    };
    for (long k = 1; k - floor_log(k) < precision + 1; ++k) {
        const long e = ordp_factorial(k, p) - ordp_factorial(k - 1, p);
        const Integer pe = pow_int(p, static_cast<unsigned long>(e));
        const Integer wide = m * pe;
        Integer zk;
        mpz_powm_ui(zk.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(k), wide.get_mpz_t());
        mpz_divexact(zk.get_mpz_t(), zk.get_mpz_t(), pe.get_mpz_t());
        const Integer kprime = k / pe;
        Integer term = mod(zk * inverse_mod(kprime, m), m);
        if (k % 2 == 0) term = -term;
        total = mod(total + term, m);
    }
    return total;
}

}  // namespace detail

/// p-adic logarithm of a one-unit, to absolute precision min(N, precision of u).
inline PadicNumber padic_log(const PadicNumber& u, long precision) {
    const long p = u.prime();
    if (u.is_zero() || u.valuation() != 0 || mod(u.unit(), p) != 1) {
        throw std::domain_error("padic_log requires u = 1 mod p");
    }
    const long n = std::min(precision, u.precision());
    const Integer m = pow_int(p, static_cast<unsigned long>(n));
    const Integer l = detail::log_one_unit_series(mod(u.unit() - 1, m), p, n);
    if (l == 0) return PadicNumber::zero(p, n);
    const long k = ordp(l, p);
    return PadicNumber::from_parts(p, k, strip_p(l, p), n - k);
}

/**
 * Coordinates of x in <p> x mu_{p-1} x <1+p>. The one-unit exponent is
 * log(w)/log(1+p), both logarithms having valuation >= 1 with ord(log(1+p)) = 1,
 * so the quotient is a unit computation modulo p^(N-1).
 */
inline UnitDecomposition unit_decompose(const PadicNumber& x) {
    if (x.is_zero()) throw std::domain_error("unit decomposition of zero");
    const long p = x.prime();
    const long n = x.precision();
    if (n < 2) throw precision_error("insufficient precision for one-unit logarithm");
    const Integer m = pow_int(p, static_cast<unsigned long>(n));
    const long g = smallest_primitive_root(p);
    const long t = discrete_log_mod_p(g, mod(x.unit(), p).get_si(), p);
    const PadicNumber omega = teichmuller(g, p, n).pow(t);
    const Integer w = mod(x.unit() * inverse_mod(omega.unit(), m), m);

    const Integer log_w = detail::log_one_unit_series(mod(w - 1, m), p, n);
    const Integer log_gen = detail::log_one_unit_series(Integer(p), p, n);
    const Integer m1 = pow_int(p, static_cast<unsigned long>(n - 1));
    const Integer num = log_w / p;  // exact: log_w = 0 mod p
    const Integer den = log_gen / p;
    UnitDecomposition d;
    d.prime = p;
    d.valuation = x.valuation();
    d.teich_index = t;
    d.one_unit_exponent = mod(num * inverse_mod(den, m1), m1);
    d.precision = n;
    return d;
}

/// p^v * omega^t * (1+p)^a at relative precision N.
inline PadicNumber reassemble(const UnitDecomposition& d) {
    const long p = d.prime;
    const long g = smallest_primitive_root(p);
    const Integer m = pow_int(p, static_cast<unsigned long>(d.precision));
    const PadicNumber omega = teichmuller(g, p, d.precision).pow(d.teich_index);
    const Integer one_unit = powmod(Integer(1 + p), d.one_unit_exponent, m);
    return PadicNumber::from_parts(p, d.valuation, omega.unit() * one_unit, d.precision);
}

}  // namespace ecbound
