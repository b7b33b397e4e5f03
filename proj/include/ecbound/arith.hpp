#pragma once

// Integer and modular helpers shared by every module. Big integers are GMP
// values; primes are machine integers since every prime handled here is small
// enough to enumerate residues of.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ecbound {

using Integer = mpz_class;
using Rational = mpq_class;

/// Thrown when a computation cannot be carried out at the requested
/// precision or enumeration budget. The CLI maps it to exit code 3.
class precision_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Integer pow_int(long base, unsigned long exponent) {
    Integer r;
    if (base >= 0) {
        mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), exponent);
    } else {
        Integer b = base;
        mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), exponent);
    }
    return r;
}

inline Integer pow_int(const Integer& base, unsigned long exponent) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
    return r;
}

/// Canonical representative of a in [0, m).
inline Integer mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Integer inverse_mod(const Integer& a, const Integer& m) {
    Integer r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw std::domain_error("element is not invertible modulo " + m.get_str());
    }
    return r;
}

/// x mod m for a rational whose denominator is a unit mod m.
inline Integer mod_rational(const Rational& x, const Integer& m) {
    return mod(Integer(x.get_num()) * inverse_mod(Integer(x.get_den()), m), m);
}

inline Integer powmod(const Integer& base, const Integer& exponent, const Integer& m) {
    Integer r;
    if (exponent < 0) {
        Integer inv = inverse_mod(base, m);
        Integer e = -exponent;
        mpz_powm(r.get_mpz_t(), inv.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    } else {
        mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), m.get_mpz_t());
    }
    return r;
}

inline long ordp(const Integer& x, long p) {
    if (x == 0) throw std::domain_error("valuation of zero undefined");
    Integer t = x;
    long v = 0;
    const Integer pp = p;
    while (mpz_divisible_p(t.get_mpz_t(), pp.get_mpz_t()) != 0) {
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), pp.get_mpz_t());
        ++v;
    }
    return v;
}

/// p-adic valuation of a nonzero rational.
inline long ordp(const Rational& x, long p) {
    if (x == 0) throw std::domain_error("valuation of zero undefined");
    return ordp(Integer(x.get_num()), p) - ordp(Integer(x.get_den()), p);
}

/// Strips every factor p from x; returns the cofactor.
inline Integer strip_p(const Integer& x, long p) {
    Integer t = x;
    const Integer pp = p;
    while (t != 0 && mpz_divisible_p(t.get_mpz_t(), pp.get_mpz_t()) != 0) {
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), pp.get_mpz_t());
    }
    return t;
}

/// Legendre's formula: ord_p(j!) = sum over i >= 1 of floor(j / p^i).
inline long ordp_factorial(long j, long p) {
    if (j < 0) throw std::invalid_argument("ordp_factorial: negative argument");
    long total = 0;
    for (long q = j / p; q > 0; q /= p) total += q;
    return total;
}

inline bool is_prime(long n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (long d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline bool is_prime(const Integer& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline void require_odd_prime(long p) {
    if (p < 3 || !is_prime(p)) {
        throw std::invalid_argument("expected an odd prime, got " + std::to_string(p));
    }
}

/// Trial-division factorization of a small positive integer.
inline std::vector<std::pair<long, int>> factor_small(long n) {
    std::vector<std::pair<long, int>> out;
    for (long d = 2; d * d <= n; ++d) {
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e > 0) out.emplace_back(d, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(const Integer& a, long p) {
    Integer pp = p;
    Integer r = mod(a, pp);
    return mpz_legendre(r.get_mpz_t(), pp.get_mpz_t());
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
inline long sqrt_mod_prime(long a, long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (legendre(a, p) != 1) throw std::domain_error("not a square modulo p");
    const Integer P = p;
    auto pw = [&](long b, const Integer& e) { return powmod(b, e, P).get_si(); };
    long q = p - 1;
    long s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    if (s == 1) return pw(a, (p + 1) / 4);
    long z = 2;
    while (legendre(z, p) != -1) ++z;
    long m = s;
    long c = pw(z, q);
    long t = pw(a, q);
    long r = pw(a, (q + 1) / 2);
    while (t != 1) {
        long i = 0;
        long t2 = t;
        while (t2 != 1) {
            t2 = static_cast<long>((static_cast<__int128>(t2) * t2) % p);
            ++i;
        }
        long b = c;
        for (long j = 0; j < m - i - 1; ++j) b = static_cast<long>((static_cast<__int128>(b) * b) % p);
        m = i;
        c = static_cast<long>((static_cast<__int128>(b) * b) % p);
        t = static_cast<long>((static_cast<__int128>(t) * c) % p);
        r = static_cast<long>((static_cast<__int128>(r) * b) % p);
    }
    return r;
}

inline long smallest_primitive_root(long p) {
    require_odd_prime(p);
    const auto factors = factor_small(p - 1);
    const Integer P = p;
    for (long g = 2; g < p; ++g) {
        bool ok = true;
        for (const auto& [f, e] : factors) {
            if (powmod(g, (p - 1) / f, P) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("no primitive root found");
}

inline long smallest_nonresidue(long p) {
    require_odd_prime(p);
    for (long d = 2; d < p; ++d)
        if (legendre(d, p) == -1) return d;
    throw std::logic_error("no quadratic non-residue found");
}

/// Discrete logarithm of a to base g modulo p, g a primitive root
/// (baby-step giant-step). Returns x in [0, p-1) with g^x = a.
inline long discrete_log_mod_p(long g, long a, long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw std::domain_error("discrete log of zero");
    const long order = p - 1;
    const long m = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(order))));
    std::unordered_map<long, long> baby;
    baby.reserve(static_cast<std::size_t>(m) * 2);
    long cur = 1;
    for (long j = 0; j < m; ++j) {
        baby.emplace(cur, j);
        cur = static_cast<long>((static_cast<__int128>(cur) * g) % p);
    }
    const long giant = powmod(inverse_mod(g, p), m, p).get_si();
    long gamma = a;
    for (long i = 0; i <= m; ++i) {
        if (auto it = baby.find(gamma); it != baby.end()) return (i * m + it->second) % order;
        gamma = static_cast<long>((static_cast<__int128>(gamma) * giant) % p);
    }
    throw std::domain_error("discrete log does not exist");
}

/// log of |x| for a big integer, accurate to double precision.
inline double log_abs(const Integer& x) {
    if (x == 0) throw std::domain_error("log of zero");
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace ecbound
