#pragma once

// 2x2 matrices over Z/p^m, the congruence filtration H_n = 1 + p^n M_2(Z_p),
// and the exhaustive group-theoretic checks built on them.

#include "ecbound/arith.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace ecbound {

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

namespace detail {

inline std::uint64_t upow(std::uint64_t b, unsigned e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

// Saturating p^e, used for budget estimates.
inline double fpow(double b, double e) { return std::pow(b, e); }

}  // namespace detail

class Mat2ModPn {
public:
    Mat2ModPn() = default;

    Mat2ModPn(long p, int m, std::array<std::int64_t, 4> entries) : p_(p), m_(m) {
        if (m < 1) throw std::invalid_argument("modulus exponent must be positive");
        if (detail::fpow(static_cast<double>(p), m) > 4e18) throw std::invalid_argument("modulus too large");
        mod_ = detail::upow(static_cast<std::uint64_t>(p), static_cast<unsigned>(m));
        for (int i = 0; i < 4; ++i) {
            const auto mm = static_cast<std::int64_t>(mod_);
            std::int64_t v = entries[i] % mm;
            if (v < 0) v += mm;
            e_[i] = static_cast<std::uint64_t>(v);
        }
    }

    static Mat2ModPn identity(long p, int m) { return {p, m, {1, 0, 0, 1}}; }

    /// The matrix unit E_ij (0-based row and column).
    static Mat2ModPn unit(long p, int m, int i, int j) {
        std::array<std::int64_t, 4> e{0, 0, 0, 0};
        e[static_cast<std::size_t>(2 * i + j)] = 1;
        return {p, m, e};
    }

    long prime() const { return p_; }
    int exponent() const { return m_; }
    std::uint64_t modulus() const { return mod_; }
    std::uint64_t operator()(int i, int j) const { return e_[static_cast<std::size_t>(2 * i + j)]; }
    const std::array<std::uint64_t, 4>& entries() const { return e_; }

    friend bool operator==(const Mat2ModPn& x, const Mat2ModPn& y) {
        return x.p_ == y.p_ && x.m_ == y.m_ && x.e_ == y.e_;
    }

    friend Mat2ModPn operator*(const Mat2ModPn& x, const Mat2ModPn& y) {
        x.check(y);
        const auto m = x.mod_;
        auto mm = [m](std::uint64_t a, std::uint64_t b) { return detail::mulmod(a, b, m); };
        Mat2ModPn r = x;
        r.e_[0] = (mm(x.e_[0], y.e_[0]) + mm(x.e_[1], y.e_[2])) % m;
        r.e_[1] = (mm(x.e_[0], y.e_[1]) + mm(x.e_[1], y.e_[3])) % m;
        r.e_[2] = (mm(x.e_[2], y.e_[0]) + mm(x.e_[3], y.e_[2])) % m;
        r.e_[3] = (mm(x.e_[2], y.e_[1]) + mm(x.e_[3], y.e_[3])) % m;
        return r;
    }

    friend Mat2ModPn operator+(const Mat2ModPn& x, const Mat2ModPn& y) {
        x.check(y);
        Mat2ModPn r = x;
        for (int i = 0; i < 4; ++i) r.e_[i] = (x.e_[i] + y.e_[i]) % x.mod_;
        return r;
    }

    friend Mat2ModPn operator-(const Mat2ModPn& x, const Mat2ModPn& y) {
        x.check(y);
        Mat2ModPn r = x;
        for (int i = 0; i < 4; ++i) r.e_[i] = (x.e_[i] + x.mod_ - y.e_[i]) % x.mod_;
        return r;
    }

    Mat2ModPn scaled(std::uint64_t c) const {
        Mat2ModPn r = *this;
        c %= mod_;
        for (auto& v : r.e_) v = detail::mulmod(v, c, mod_);
        return r;
    }

    Mat2ModPn pow(std::uint64_t k) const {
        Mat2ModPn result = identity(p_, m_);
        Mat2ModPn base = *this;
        while (k > 0) {
            if ((k & 1U) != 0) result = result * base;
            base = base * base;
            k >>= 1U;
        }
        return result;
    }

    std::uint64_t det() const {
        return (detail::mulmod(e_[0], e_[3], mod_) + mod_ - detail::mulmod(e_[1], e_[2], mod_)) % mod_;
    }

    std::uint64_t trace() const { return (e_[0] + e_[3]) % mod_; }

    /// Inverse of an invertible matrix (det a unit).
    Mat2ModPn inverse() const {
        const Integer di = inverse_mod(Integer(static_cast<unsigned long>(det())), Integer(static_cast<unsigned long>(mod_)));
        const auto dinv = static_cast<std::uint64_t>(di.get_ui());
        Mat2ModPn adj = *this;
        adj.e_ = {e_[3], (mod_ - e_[1]) % mod_, (mod_ - e_[2]) % mod_, e_[0]};
        return adj.scaled(dinv);
    }

    /// Reduction to a smaller modulus p^k.
    Mat2ModPn reduced(int k) const {
        if (k > m_) throw std::invalid_argument("cannot reduce to a larger modulus");
        return {p_, k,
                {static_cast<std::int64_t>(e_[0]), static_cast<std::int64_t>(e_[1]),
                 static_cast<std::int64_t>(e_[2]), static_cast<std::int64_t>(e_[3])}};
    }

    /// Dense index in [0, modulus^4).
    std::uint64_t index() const { return e_[0] + mod_ * (e_[1] + mod_ * (e_[2] + mod_ * e_[3])); }

    std::string to_string() const {
        return "[[" + std::to_string(e_[0]) + "," + std::to_string(e_[1]) + "],[" + std::to_string(e_[2]) + "," +
               std::to_string(e_[3]) + "]] mod " + std::to_string(p_) + "^" + std::to_string(m_);
    }

private:
    void check(const Mat2ModPn& o) const {
        if (p_ != o.p_ || m_ != o.m_) throw std::invalid_argument("matrices over different rings");
    }

    long p_ = 3;
    int m_ = 1;
    std::uint64_t mod_ = 3;
    std::array<std::uint64_t, 4> e_{1, 0, 0, 1};
};

/// X in H_n, i.e. X = identity mod p^n.
inline bool in_filtration(const Mat2ModPn& x, int n) {
    if (n < 1) throw std::invalid_argument("filtration level must be positive");
    if (n > x.exponent()) throw std::invalid_argument("filtration level exceeds working modulus");
    const auto pn = detail::upow(static_cast<std::uint64_t>(x.prime()), static_cast<unsigned>(n));
    return x(0, 0) % pn == 1 % pn && x(0, 1) % pn == 0 && x(1, 0) % pn == 0 && x(1, 1) % pn == 1 % pn;
}

/// One coefficient of the binomial series (1 + p^{2n} M)^{1/p^n} = sum_j c_j M^j.
struct RootSeriesTerm {
    long index = 0;
    Rational coefficient;  // binom(1/p^n, j) * p^{2nj}, exact
    long valuation = 0;    // ord_p(c_j) = n j - ord_p(j!)
};

/**
 * Terms j >= j0 have ord_p(c_j) > j (n - 1/(p-1)) >= m, so they vanish mod p^m.
 * j0 = ceil(m (p-1) / (n (p-1) - 1)).
 */
inline long root_series_truncation(long p, int n, int m) {
    const long num = static_cast<long>(m) * (p - 1);
    const long den = static_cast<long>(n) * (p - 1) - 1;
    return (num + den - 1) / den;
}

inline std::vector<RootSeriesTerm> root_series_terms(long p, int n, int m) {
    require_odd_prime(p);
    const long count = root_series_truncation(p, n, m);
    const Rational inv_pn(Integer(1), pow_int(p, static_cast<unsigned long>(n)));
    const Integer p2n = pow_int(p, static_cast<unsigned long>(2 * n));
    std::vector<RootSeriesTerm> out;
    Rational binom = 1;
    Integer scale = 1;
    for (long j = 0; j < count; ++j) {
        if (j > 0) {
            binom *= (inv_pn - (j - 1)) / Rational(j);
            binom.canonicalize();
            scale *= p2n;
        }
        RootSeriesTerm t;
        t.index = j;
        t.coefficient = binom * scale;
        t.coefficient.canonicalize();
        t.valuation = t.coefficient == 0 ? 0 : ordp(t.coefficient, p);
        const long expected = static_cast<long>(n) * j - ordp_factorial(j, p);
        if (ordp(Integer(t.coefficient.get_den()), p) != 0 || t.valuation != expected) {
            throw std::logic_error("root series coefficient valuation disagrees with ord_p(j!)");
        }
        out.push_back(t);
    }
    return out;
}

/// Y in H_n with Y^{p^n} = X mod p^m, for X in H_{2n}; the truncated binomial series.
inline Mat2ModPn matrix_pn_root(const Mat2ModPn& x, int n) {
    const long p = x.prime();
    const int m = x.exponent();
    require_odd_prime(p);
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (m < 2 * n) throw std::invalid_argument("modulus exponent must be at least 2n");
    if (!in_filtration(x, 2 * n)) throw std::domain_error("series diverges outside H_{2n}");
    const auto mod = x.modulus();
    const auto p2n = detail::upow(static_cast<std::uint64_t>(p), static_cast<unsigned>(2 * n));
    // M = (X - 1) / p^{2n}, any integral lift
    const Mat2ModPn diff = x - Mat2ModPn::identity(p, m);
    Mat2ModPn big_m(p, m,
                    {static_cast<std::int64_t>(diff(0, 0) / p2n), static_cast<std::int64_t>(diff(0, 1) / p2n),
                     static_cast<std::int64_t>(diff(1, 0) / p2n), static_cast<std::int64_t>(diff(1, 1) / p2n)});
    const Integer modulus(static_cast<unsigned long>(mod));
    Mat2ModPn result(p, m, {0, 0, 0, 0});
    Mat2ModPn power = Mat2ModPn::identity(p, m);
    for (const auto& term : root_series_terms(p, n, m)) {
        const Integer c = mod_rational(term.coefficient, modulus);
        result = result + power.scaled(c.get_ui());
        power = power * big_m;
    }
    return result;
}

struct FiltrationCensus {
    bool holds = false;
    std::uint64_t enumerated = 0;   // |H_n mod p^m|
    std::uint64_t image_size = 0;   // distinct p^n-th powers
    std::uint64_t target_size = 0;  // |H_{2n} mod p^m|
};

/**
 * Exhaustive check of H_n^{p^n} = H_{2n} modulo p^m: raise every element of
 * H_n mod p^m to the p^n-th power and compare the image with H_{2n} mod p^m.
 */
inline FiltrationCensus filtration_power_census(long p, int n, int m,
                                                std::uint64_t budget = kEnumerationBudget) {
    require_odd_prime(p);
    if (n < 1 || m < 2 * n) throw std::invalid_argument("need n >= 1 and m >= 2n");
    const double estimate = detail::fpow(static_cast<double>(p), 4.0 * (m - n));
    if (estimate > static_cast<double>(budget)) {
        throw budget_error("enumeration of H_n mod p^m needs " + std::to_string(static_cast<long double>(estimate)) +
                           " elements, budget is " + std::to_string(budget));
    }
    const auto P = static_cast<std::uint64_t>(p);
    const auto side = detail::upow(P, static_cast<unsigned>(m - n));
    const auto target_side = detail::upow(P, static_cast<unsigned>(m - 2 * n));
    const auto pn = detail::upow(P, static_cast<unsigned>(n));
    const auto p2n = detail::upow(P, static_cast<unsigned>(2 * n));
    FiltrationCensus c;
    c.target_size = target_side * target_side * target_side * target_side;
    std::vector<bool> hit(c.target_size, false);
    bool contained = true;
    const auto id = Mat2ModPn::identity(p, m);
    for (std::uint64_t i0 = 0; i0 < side; ++i0)
        for (std::uint64_t i1 = 0; i1 < side; ++i1)
            for (std::uint64_t i2 = 0; i2 < side; ++i2)
                for (std::uint64_t i3 = 0; i3 < side; ++i3) {
                    const Mat2ModPn x(p, m,
                                      {static_cast<std::int64_t>(1 + pn * i0), static_cast<std::int64_t>(pn * i1),
                                       static_cast<std::int64_t>(pn * i2), static_cast<std::int64_t>(1 + pn * i3)});
                    ++c.enumerated;
                    const Mat2ModPn y = x.pow(pn);
                    if (!in_filtration(y, 2 * n)) {
                        contained = false;
                        continue;
                    }
                    const Mat2ModPn d = y - id;
                    const std::uint64_t idx = d(0, 0) / p2n + target_side * (d(0, 1) / p2n + target_side *
                                                                  (d(1, 0) / p2n + target_side * (d(1, 1) / p2n)));
                    if (!hit[idx]) {
                        hit[idx] = true;
                        ++c.image_size;
                    }
                }
    c.holds = contained && c.image_size == c.target_size;
    return c;
}

inline bool verify_filtration_power_identity(long p, int n, int m, std::uint64_t budget = kEnumerationBudget) {
    return filtration_power_census(p, n, m, budget).holds;
}

// ---------------------------------------------------------------------------
// SL_2(Z/p^n) and its commutator subgroup

namespace detail {

using ElementSet = std::unordered_set<std::uint64_t>;

// Subgroup generated by `gens` (finite, so closing under right multiplication suffices).
inline std::vector<Mat2ModPn> closure(const std::vector<Mat2ModPn>& gens, long p, int m, std::uint64_t budget) {
    const auto id = Mat2ModPn::identity(p, m);
    std::vector<Mat2ModPn> elems{id};
    ElementSet seen{id.index()};
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const auto& g : gens) {
            Mat2ModPn h = elems[i] * g;
            if (seen.insert(h.index()).second) {
                elems.push_back(h);
                if (elems.size() > budget) throw budget_error("subgroup closure exceeded the enumeration budget");
            }
        }
    }
    return elems;
}

}  // namespace detail

struct CommutatorCensus {
    std::uint64_t group_order = 0;       // |SL_2(Z/p^n)|, counted
    std::uint64_t commutator_order = 0;  // |[G, G]|
    bool perfect() const { return group_order == commutator_order; }
};

/// Count of determinant-one matrices mod p^n, by direct enumeration.
inline std::uint64_t count_sl2(long p, int n, std::uint64_t budget = kEnumerationBudget) {
    const auto N = detail::upow(static_cast<std::uint64_t>(p), static_cast<unsigned>(n));
    if (detail::fpow(static_cast<double>(N), 4) > static_cast<double>(budget)) {
        throw budget_error("enumerating M_2(Z/" + std::to_string(N) + ") exceeds the budget");
    }
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < N; ++a)
        for (std::uint64_t b = 0; b < N; ++b)
            for (std::uint64_t c = 0; c < N; ++c)
                for (std::uint64_t d = 0; d < N; ++d)
                    if ((detail::mulmod(a, d, N) + N - detail::mulmod(b, c, N)) % N == 1 % N) ++count;
    return count;
}

/**
 * Order of [G, G] for G = SL_2(Z/p^n): the normal closure of the commutators
 * of the elementary generators, which generate G over the local ring Z/p^n.
 */
inline CommutatorCensus commutator_subgroup_order(long p, int n, std::uint64_t budget = kEnumerationBudget) {
    require_odd_prime(p);
    const std::vector<Mat2ModPn> gens{Mat2ModPn(p, n, {1, 1, 0, 1}), Mat2ModPn(p, n, {1, 0, 1, 1})};
    CommutatorCensus census;
    census.group_order = count_sl2(p, n, budget);
    const auto whole = detail::closure(gens, p, n, budget);
    if (whole.size() != census.group_order) throw std::logic_error("elementary matrices failed to generate SL_2");

    std::vector<Mat2ModPn> normal_gens;
    for (const auto& s : gens)
        for (const auto& t : gens) normal_gens.push_back(s * t * s.inverse() * t.inverse());
    auto sub = detail::closure(normal_gens, p, n, budget);
    detail::ElementSet members;
    for (const auto& h : sub) members.insert(h.index());
    for (bool changed = true; changed;) {
        changed = false;
        const auto current = normal_gens;
        for (const auto& h : current) {
            for (const auto& s : gens) {
                const Mat2ModPn c = s * h * s.inverse();
                if (members.count(c.index()) == 0) {
                    normal_gens.push_back(c);
                    sub = detail::closure(normal_gens, p, n, budget);
                    members.clear();
                    for (const auto& e : sub) members.insert(e.index());
                    changed = true;
                }
            }
        }
    }
    census.commutator_order = sub.size();
    return census;
}

// ---------------------------------------------------------------------------
// Conjugation-stable subspaces of M_2(F_p)

using MatFp = std::array<long, 4>;

/// An F_p-subspace of M_2(F_p) with basis in reduced row-echelon form
/// (coordinates ordered as the entries a, b, c, d).
struct SubspaceModP {
    long prime = 3;
    std::vector<MatFp> basis;
    int dimension() const { return static_cast<int>(basis.size()); }
    friend bool operator==(const SubspaceModP& x, const SubspaceModP& y) {
        return x.prime == y.prime && x.basis == y.basis;
    }
};

namespace detail {

inline long modp(long v, long p) {
    v %= p;
    return v < 0 ? v + p : v;
}

inline long inv_modp(long a, long p) { return inverse_mod(Integer(a), Integer(p)).get_si(); }

inline std::vector<MatFp> row_reduce(std::vector<MatFp> rows, long p) {
    std::size_t rank = 0;
    for (int col = 0; col < 4 && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && modp(rows[pivot][col], p) == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        const long inv = inv_modp(modp(rows[rank][col], p), p);
        for (auto& v : rows[rank]) v = modp(v * inv, p);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank) continue;
            const long f = modp(rows[r][col], p);
            if (f == 0) continue;
            for (int k = 0; k < 4; ++k) rows[r][k] = modp(rows[r][k] - f * rows[rank][k], p);
        }
        ++rank;
    }
    rows.resize(rank);
    return rows;
}

inline MatFp conjugate(const MatFp& g, const MatFp& x, long p) {
    // g x g^{-1}
    const long det = modp(g[0] * g[3] - g[1] * g[2], p);
    const long di = inv_modp(det, p);
    const MatFp ginv{modp(g[3] * di, p), modp(-g[1] * di, p), modp(-g[2] * di, p), modp(g[0] * di, p)};
    auto mul = [p](const MatFp& u, const MatFp& v) {
        return MatFp{modp(u[0] * v[0] + u[1] * v[2], p), modp(u[0] * v[1] + u[1] * v[3], p),
                     modp(u[2] * v[0] + u[3] * v[2], p), modp(u[2] * v[1] + u[3] * v[3], p)};
    };
    return mul(mul(g, x), ginv);
}

inline std::vector<MatFp> gl2_generators(long p) {
    const long g = smallest_primitive_root(p);
    return {MatFp{1, 1, 0, 1}, MatFp{1, 0, 1, 1}, MatFp{g, 0, 0, 1}};
}

// Smallest subspace containing `seed` and stable under conjugation by `gens`.
inline std::vector<MatFp> stable_span(std::vector<MatFp> seed, const std::vector<MatFp>& gens, long p) {
    auto basis = row_reduce(std::move(seed), p);
    for (bool grown = true; grown;) {
        grown = false;
        const auto current = basis;
        for (const auto& v : current) {
            for (const auto& g : gens) {
                auto candidate = basis;
                candidate.push_back(conjugate(g, v, p));
                candidate = row_reduce(std::move(candidate), p);
                if (candidate.size() > basis.size()) {
                    basis = std::move(candidate);
                    grown = true;
                }
            }
        }
    }
    return basis;
}

}  // namespace detail

/**
 * Every GL_2(F_p)-stable subspace of M_2(F_p) under conjugation. Cyclic
 * submodules are generated from every seed (up to scalars); every submodule is
 * a sum of cyclic ones, so closing the collection under sums is complete.
 */
inline std::vector<SubspaceModP> conjugation_stable_subspaces(long p) {
    require_odd_prime(p);
    if (p > 13) throw std::invalid_argument("subspace enumeration supports p <= 13");
    const auto gens = detail::gl2_generators(p);
    std::set<std::vector<MatFp>> found;
    found.insert(std::vector<MatFp>{});
    for (long a = 0; a < p; ++a)
        for (long b = 0; b < p; ++b)
            for (long c = 0; c < p; ++c)
                for (long d = 0; d < p; ++d) {
                    const MatFp x{a, b, c, d};
                    const auto lead = std::find_if(x.begin(), x.end(), [](long v) { return v != 0; });
                    if (lead == x.end() || *lead != 1) continue;
                    found.insert(detail::stable_span({x}, gens, p));
                }
    for (bool grown = true; grown;) {
        grown = false;
        const std::vector<std::vector<MatFp>> current(found.begin(), found.end());
        for (std::size_t i = 0; i < current.size(); ++i)
            for (std::size_t j = i + 1; j < current.size(); ++j) {
                auto rows = current[i];
                rows.insert(rows.end(), current[j].begin(), current[j].end());
                if (found.insert(detail::row_reduce(std::move(rows), p)).second) grown = true;
            }
    }
    std::vector<SubspaceModP> out;
    for (const auto& b : found) out.push_back(SubspaceModP{p, b});
    std::stable_sort(out.begin(), out.end(),
                     [](const SubspaceModP& x, const SubspaceModP& y) { return x.dimension() < y.dimension(); });
    return out;
}

/// Membership of a matrix in a subspace (rank test).
inline bool subspace_contains(const SubspaceModP& s, const MatFp& x) {
    auto rows = s.basis;
    rows.push_back(x);
    return detail::row_reduce(std::move(rows), s.prime).size() == s.basis.size();
}

/// Closure under conjugation by every element of GL_2(F_p) (full sweep).
inline bool is_conjugation_stable(const SubspaceModP& s) {
    const long p = s.prime;
    for (long a = 0; a < p; ++a)
        for (long b = 0; b < p; ++b)
            for (long c = 0; c < p; ++c)
                for (long d = 0; d < p; ++d) {
                    if (detail::modp(a * d - b * c, p) == 0) continue;
                    const MatFp g{a, b, c, d};
                    for (const auto& v : s.basis)
                        if (!subspace_contains(s, detail::conjugate(g, v, p))) return false;
                }
    return true;
}

}  // namespace ecbound
