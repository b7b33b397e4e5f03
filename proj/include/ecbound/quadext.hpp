#pragma once

// The unramified quadratic extension M = Q_p(sqrt d), d the smallest
// quadratic non-residue mod p. Elements are p^v * (a + b sqrt d) with (a, b)
// known modulo p^N and not both divisible by p.

#include "ecbound/padic.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace ecbound {

class QuadExtElement {
public:
    QuadExtElement() = default;

    static QuadExtElement zero(long p, long d, long absolute_precision) {
        require_odd_prime(p);
        QuadExtElement z;
        z.p_ = p;
        z.d_ = d;
        z.zero_ = true;
        z.val_ = absolute_precision;
        z.prec_ = 0;
        return z;
    }

    /// p^valuation * (a + b sqrt d); (a, b) may carry extra factors of p.
    static QuadExtElement from_parts(long p, long d, long valuation, const Integer& a, const Integer& b,
                                     long precision) {
        require_odd_prime(p);
        if (precision < 1) throw std::invalid_argument("relative precision must be positive");
        const Integer m = pow_int(p, static_cast<unsigned long>(precision));
        Integer ra = mod(a, m);
        Integer rb = mod(b, m);
        if (ra == 0 && rb == 0) return zero(p, d, valuation + precision);
        const long k = std::min(ra == 0 ? precision : ordp(ra, p), rb == 0 ? precision : ordp(rb, p));
        QuadExtElement x;
        x.p_ = p;
        x.d_ = d;
        x.zero_ = false;
        x.val_ = valuation + k;
        x.prec_ = precision - k;
        const Integer pk = pow_int(p, static_cast<unsigned long>(k));
        const Integer mm = pow_int(p, static_cast<unsigned long>(x.prec_));
        x.a_ = mod(ra / pk, mm);
        x.b_ = mod(rb / pk, mm);
        return x;
    }

    static QuadExtElement from_components(long p, long d, const Integer& a, const Integer& b, long precision) {
        return from_parts(p, d, 0, a, b, precision);
    }

    static QuadExtElement embed(const PadicNumber& x, long d) {
        if (x.is_zero()) return zero(x.prime(), d, x.valuation());
        return from_parts(x.prime(), d, x.valuation(), x.unit(), 0, x.precision());
    }

    static QuadExtElement sqrt_d(long p, long d, long precision) { return from_parts(p, d, 0, 0, 1, precision); }

    static QuadExtElement one(long p, long d, long precision) { return from_parts(p, d, 0, 1, 0, precision); }

    long prime() const { return p_; }
    long nonresidue() const { return d_; }
    bool is_zero() const { return zero_; }
    long valuation() const { return val_; }
    long precision() const { return prec_; }
    long absolute_precision() const { return zero_ ? val_ : val_ + prec_; }
    /// Unit-part components (a, b).
    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    Integer unit_modulus() const { return pow_int(p_, static_cast<unsigned long>(prec_)); }

    /// Components of an integral value modulo p^k.
    std::pair<Integer, Integer> components(long k) const {
        if (k > absolute_precision()) throw precision_error("components requested beyond known digits");
        if (k <= 0 || zero_ || val_ >= k) return {0, 0};
        if (val_ < 0) throw std::domain_error("components of a non-integral element");
        const Integer m = pow_int(p_, static_cast<unsigned long>(k));
        const Integer s = pow_int(p_, static_cast<unsigned long>(val_));
        return {mod(s * a_, m), mod(s * b_, m)};
    }

    QuadExtElement truncated_absolute(long abs) const {
        if (zero_) return zero(p_, d_, std::min(abs, val_));
        if (abs <= val_) return zero(p_, d_, abs);
        return from_parts(p_, d_, val_, a_, b_, std::min(prec_, abs - val_));
    }

    QuadExtElement with_precision(long precision) const {
        if (zero_) return *this;
        return from_parts(p_, d_, val_, a_, b_, std::min(prec_, precision));
    }

    QuadExtElement conj() const {
        if (zero_) return *this;
        return from_parts(p_, d_, val_, a_, -b_, prec_);
    }

    QuadExtElement operator-() const {
        if (zero_) return *this;
        return from_parts(p_, d_, val_, -a_, -b_, prec_);
    }

    friend QuadExtElement operator+(const QuadExtElement& x, const QuadExtElement& y) {
        x.check_compatible(y);
        const long abs = std::min(x.absolute_precision(), y.absolute_precision());
        if (x.zero_ && y.zero_) return zero(x.p_, x.d_, abs);
        if (x.zero_) return y.truncated_absolute(abs);
        if (y.zero_) return x.truncated_absolute(abs);
        const long v = std::min(x.val_, y.val_);
        if (abs <= v) return zero(x.p_, x.d_, abs);
        const Integer sx = pow_int(x.p_, static_cast<unsigned long>(x.val_ - v));
        const Integer sy = pow_int(x.p_, static_cast<unsigned long>(y.val_ - v));
        return from_parts(x.p_, x.d_, v, x.a_ * sx + y.a_ * sy, x.b_ * sx + y.b_ * sy, abs - v);
    }

    friend QuadExtElement operator-(const QuadExtElement& x, const QuadExtElement& y) { return x + (-y); }

    friend QuadExtElement operator*(const QuadExtElement& x, const QuadExtElement& y) {
        x.check_compatible(y);
        if (x.zero_ || y.zero_) return zero(x.p_, x.d_, x.val_ + y.val_);
        const long prec = std::min(x.prec_, y.prec_);
        const Integer a = x.a_ * y.a_ + x.d_ * x.b_ * y.b_;
        const Integer b = x.a_ * y.b_ + x.b_ * y.a_;
        return from_parts(x.p_, x.d_, x.val_ + y.val_, a, b, prec);
    }

    /// Norm to Q_p: a^2 - d b^2, with valuation 2v (always even: M/Q_p is unramified).
    PadicNumber norm() const {
        if (zero_) return PadicNumber::zero(p_, 2 * val_);
        const Integer n = a_ * a_ - d_ * b_ * b_;
        return PadicNumber::from_parts(p_, 2 * val_, n, prec_);
    }

    QuadExtElement inverse() const {
        if (zero_) throw std::domain_error("division by zero in M");
        const Integer m = unit_modulus();
        const Integer ninv = inverse_mod(a_ * a_ - d_ * b_ * b_, m);
        return from_parts(p_, d_, -val_, a_ * ninv, -b_ * ninv, prec_);
    }

    friend QuadExtElement operator/(const QuadExtElement& x, const QuadExtElement& y) { return x * y.inverse(); }

    QuadExtElement& operator+=(const QuadExtElement& o) { return *this = *this + o; }
    QuadExtElement& operator-=(const QuadExtElement& o) { return *this = *this - o; }
    QuadExtElement& operator*=(const QuadExtElement& o) { return *this = *this * o; }

    QuadExtElement pow(const Integer& e) const {
        if (e < 0) return inverse().pow(-e);
        QuadExtElement result = one(p_, d_, zero_ ? 1 : prec_);
        if (zero_) {
            if (e == 0) return result;
            return zero(p_, d_, val_ * e.get_si());
        }
        QuadExtElement base = *this;
        Integer k = e;
        while (k > 0) {
            if (mpz_odd_p(k.get_mpz_t()) != 0) result = result * base;
            base = base * base;
            k >>= 1;
        }
        return result;
    }

    /// True if the sqrt(d)-component vanishes at the known precision.
    bool is_rational() const { return zero_ || mod(b_, unit_modulus()) == 0; }

    PadicNumber to_padic() const {
        if (!is_rational()) throw std::domain_error("element does not lie in Q_p");
        if (zero_) return PadicNumber::zero(p_, val_);
        return PadicNumber::from_parts(p_, val_, a_, prec_);
    }

    bool agrees_with(const QuadExtElement& o) const { return (*this - o).is_zero(); }

    std::string to_string() const {
        std::ostringstream os;
        if (zero_) {
            os << "O(" << p_ << "^" << val_ << ")";
        } else {
            os << p_ << "^" << val_ << "*(" << a_.get_str() << " + " << b_.get_str() << "*sqrt(" << d_
               << ")) + O(" << p_ << "^" << absolute_precision() << ")";
        }
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadExtElement& x) { return os << x.to_string(); }

private:
    void check_compatible(const QuadExtElement& o) const {
        if (p_ != o.p_ || d_ != o.d_) throw std::invalid_argument("mixing elements of different extensions");
    }

    long p_ = 3;
    long d_ = 2;
    bool zero_ = true;
    long val_ = 0;
    long prec_ = 0;
    Integer a_ = 0;
    Integer b_ = 0;
};

/// Norm a^2 - d b^2 of a nonzero element of M.
inline PadicNumber quad_norm(const QuadExtElement& x) {
    if (x.is_zero()) throw std::domain_error("norm of zero");
    return x.norm();
}

namespace detail {

// log(1 + z) for z = (za, zb) = 0 mod p, both components modulo p^N.
inline std::pair<Integer, Integer> log_one_unit_series_quad(const Integer& za, const Integer& zb, long d, long p,
                                                            long precision) {
    const Integer m = pow_int(p, static_cast<unsigned long>(precision));
    Integer ta = 0;
    Integer tb = 0;
    auto floor_log = [p](long k) {
        long e = 0;
        for (long t = k / p; t > 0; t /= p) ++e;
        return e;
    };
    for (long k = 1; k - floor_log(k) < precision + 1; ++k) {
        const long e = ordp_factorial(k, p) - ordp_factorial(k - 1, p);
        const Integer pe = pow_int(p, static_cast<unsigned long>(e));
        const Integer wide = m * pe;
        // (za + zb sqrt d)^k modulo p^(N+e)
        Integer pa = 1;
        Integer pb = 0;
        Integer ba = za;
        Integer bb = zb;
        for (long kk = k; kk > 0; kk >>= 1) {
            if ((kk & 1) != 0) {
                const Integer na = mod(pa * ba + d * pb * bb, wide);
                const Integer nb = mod(pa * bb + pb * ba, wide);
                pa = na;
                pb = nb;
            }
            const Integer na = mod(ba * ba + d * bb * bb, wide);
            const Integer nb = mod(2 * ba * bb, wide);
            ba = na;
            bb = nb;
        }
        mpz_divexact(pa.get_mpz_t(), pa.get_mpz_t(), pe.get_mpz_t());
        mpz_divexact(pb.get_mpz_t(), pb.get_mpz_t(), pe.get_mpz_t());
        const Integer kinv = inverse_mod(Integer(k / pe.get_si()), m);
        Integer sa = mod(pa * kinv, m);
        Integer sb = mod(pb * kinv, m);
        if (k % 2 == 0) {
            sa = -sa;
            sb = -sb;
        }
        ta = mod(ta + sa, m);
        tb = mod(tb + sb, m);
    }
    return {ta, tb};
}

}  // namespace detail

/// Logarithm of a one-unit of M, returned as (a, b) components modulo p^N.
inline std::pair<Integer, Integer> quad_log(const QuadExtElement& x, long precision) {
    const long p = x.prime();
    if (x.is_zero() || x.valuation() != 0 || mod(x.a(), p) != 1 || mod(x.b(), p) != 0) {
        throw std::domain_error("quad_log requires x = 1 mod p");
    }
    const long n = std::min(precision, x.precision());
    const Integer m = pow_int(p, static_cast<unsigned long>(n));
    return detail::log_one_unit_series_quad(mod(x.a() - 1, m), mod(x.b(), m), x.nonresidue(), p, n);
}

/// A unit w of M with norm(w) = v, for a unit v of Q_p (surjectivity of the norm on units).
inline QuadExtElement solve_norm(const PadicNumber& v, long d) {
    if (v.is_zero() || v.valuation() != 0) throw std::domain_error("solve_norm expects a unit target");
    const long p = v.prime();
    const long n = v.precision();
    const long v0 = mod(v.unit(), p).get_si();
    long a0 = -1;
    long b0 = -1;
    for (long b = 0; b < p && a0 < 0; ++b) {
        const long t = static_cast<long>((v0 + static_cast<__int128>(d) * b % p * b) % p);
        if (t != 0 && legendre(t, p) == 1) {
            a0 = sqrt_mod_prime(t, p);
            b0 = b;
        }
    }
    if (a0 < 0) throw std::logic_error("no residue solution of the norm equation");
    Integer a = a0;
    const Integer b = b0;
    for (long cur = 1; cur < n;) {
        cur = std::min(2 * cur, n);
        const Integer m = pow_int(p, static_cast<unsigned long>(cur));
        const Integer defect = mod(v.unit() - (a * a - d * b * b), m);
        a = mod(a + defect * inverse_mod(2 * a, m), m);
    }
    return QuadExtElement::from_components(p, d, a, b, n);
}

}  // namespace ecbound
