#pragma once

// Self-checks dispatched by `ecbound lemmas`: each runs a small exhaustive or
// sampled verification and reports pass/fail with its timing.

#include "ecbound/local_kummer.hpp"
#include "ecbound/matrix_groups.hpp"
#include "ecbound/padic.hpp"
#include "ecbound/quadext.hpp"
#include "ecbound/tate_curve.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ecbound {

struct LemmaResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteReport {
    std::vector<LemmaResult> results;
    bool passed() const {
        for (const auto& r : results)
            if (!r.passed) return false;
        return true;
    }
};

struct SuiteParams {
    std::optional<long> p;
    long n = 1;
    std::uint64_t budget = kEnumerationBudget;
};

namespace detail {

// Runs one check; budget and precision errors propagate (they are not lemma failures).
inline void run_check(SuiteReport& rep, const std::string& suite, const std::string& name,
                      const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    LemmaResult r{suite, name, false, "", 0.0};
    try {
        auto [ok, detail] = body();
        r.passed = ok;
        r.detail = std::move(detail);
    } catch (const budget_error&) {
        throw;
    } catch (const precision_error&) {
        throw;
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.results.push_back(std::move(r));
}

inline std::uint64_t pow_u(long p, long e) {
    std::uint64_t r = 1;
    for (long i = 0; i < e; ++i) r *= static_cast<std::uint64_t>(p);
    return r;
}

inline void padic_suite(SuiteReport& rep, const SuiteParams& prm) {
    const std::vector<long> primes = prm.p ? std::vector<long>{*prm.p} : std::vector<long>{3, 5, 7, 11};
    for (long p : primes) require_odd_prime(p);
    run_check(rep, "padic", "factorial_valuation_bound", [&] {
        // ord_p(j!) < j/(p-1), and equality with the valuation of the product itself
        for (long p : primes) {
            Integer fact = 1;
            for (long j = 1; j <= 400; ++j) {
                fact *= j;
                const long v = ordp_factorial(j, p);
                if (v != ordp(fact, p)) return std::make_pair(false, "Legendre sum wrong at p=" + std::to_string(p));
                if (!(v * (p - 1) < j)) return std::make_pair(false, "bound fails at j=" + std::to_string(j));
            }
        }
        return std::make_pair(true, std::string("j = 1..400"));
    });
    run_check(rep, "padic", "unit_decomposition_round_trip", [&] {
        std::mt19937_64 rng(20240611);
        for (long p : primes) {
            const long N = 6;
            const Integer m = pow_int(p, N);
            for (int i = 0; i < 200; ++i) {
                Integer u = rng() % m.get_ui();
                if (u % p == 0) u += 1;
                const long v = static_cast<long>(rng() % 7) - 3;
                const PadicNumber x = PadicNumber::from_parts(p, v, u, N);
                if (!reassemble(unit_decompose(x)).agrees_with(x)) {
                    return std::make_pair(false, "round trip fails for " + x.to_string());
                }
            }
        }
        return std::make_pair(true, std::string("200 samples per prime"));
    });
    run_check(rep, "padic", "quotient_by_pn_powers", [&] {
        // Q_p^*/(Q_p^*)^{p^n} has p^{2n} classes: count them on p^v * units mod p^{n+2}
        for (long p : primes) {
            const long n = std::min<long>(prm.n, 2);
            const long N = n + 2;
            const auto m = pow_u(p, N);
            if (m * static_cast<std::uint64_t>(pow_u(p, n)) > prm.budget) throw budget_error("quotient census over budget");
            std::set<std::pair<std::string, std::string>> seen;
            for (long v = 0; v < static_cast<long>(pow_u(p, n)); ++v)
                for (std::uint64_t u = 1; u < m; ++u) {
                    if (u % static_cast<std::uint64_t>(p) == 0) continue;
                    const auto c = split_kummer_class(PadicNumber::from_parts(p, v, Integer(u), N), n);
                    seen.insert({c.alpha.get_str(), c.beta.get_str()});
                }
            if (seen.size() != pow_u(p, 2 * n)) return std::make_pair(false, "wrong class count at p=" + std::to_string(p));
        }
        return std::make_pair(true, std::string("p^{2n} classes"));
    });
}

inline void matrix_suite(SuiteReport& rep, const SuiteParams& prm) {
    const long p = prm.p.value_or(3);
    const int n = static_cast<int>(prm.n);
    require_odd_prime(p);
    for (int m : {2 * n, 2 * n + 1}) {
        run_check(rep, "matrix", "filtration_powers(" + std::to_string(p) + "," + std::to_string(n) + "," +
                                     std::to_string(m) + ")",
                  [&, m] {
                      const auto c = filtration_power_census(p, n, m, prm.budget);
                      return std::make_pair(c.holds, std::to_string(c.enumerated) + " matrices, image " +
                                                         std::to_string(c.image_size) + " of " +
                                                         std::to_string(c.target_size));
                  });
    }
    run_check(rep, "matrix", "pn_root_series", [&] {
        const int m = 2 * n + 2;
        std::mt19937_64 rng(7);
        const auto mod = pow_u(p, m);
        const auto p2n = pow_u(p, 2 * n);
        for (int i = 0; i < 100; ++i) {
            const auto r = [&] { return static_cast<std::int64_t>(p2n * (rng() % (mod / p2n))); };
            const Mat2ModPn x(p, m, {1 + r(), r(), r(), 1 + r()});
            const Mat2ModPn y = matrix_pn_root(x, n);
            if (!in_filtration(y, n) || !(y.pow(pow_u(p, n)) == x)) {
                return std::make_pair(false, "root fails for " + x.to_string());
            }
        }
        return std::make_pair(true, std::string("100 samples mod p^") + std::to_string(m));
    });
    run_check(rep, "matrix", "sl2_commutator", [&] {
        const auto c = commutator_subgroup_order(p, 1, prm.budget);
        const bool expect_perfect = p >= 5;
        return std::make_pair(c.perfect() == expect_perfect,
                              "|SL_2| = " + std::to_string(c.group_order) + ", |[G,G]| = " +
                                  std::to_string(c.commutator_order));
    });
    if (p <= 13) {
        run_check(rep, "matrix", "conjugation_stable_subspaces", [&] {
            const auto subs = conjugation_stable_subspaces(p);
            std::ostringstream os;
            os << subs.size() << " subspaces, dims";
            std::vector<int> dims;
            for (const auto& s : subs) {
                dims.push_back(s.dimension());
                os << ' ' << s.dimension();
            }
            bool ok = dims == std::vector<int>{0, 1, 3, 4};
            for (const auto& s : subs) ok = ok && is_conjugation_stable(s);
            return std::make_pair(ok, os.str());
        });
    }
}

inline void kummer_suite(SuiteReport& rep, const SuiteParams& prm) {
    const long p = prm.p.value_or(3);
    const long n = prm.n;
    require_odd_prime(p);
    const long N = n + 2;
    const auto m = pow_u(p, N);
    const auto pn = pow_u(p, n);
    if (m * m > prm.budget) throw budget_error("Kummer coset census over budget");
    run_check(rep, "kummer", "split_cosets", [&] {
        // x (1+p)^{-beta} must be a p^n-th power modulo p^N, and the classes must number p^n
        std::set<std::uint64_t> powers;
        const Integer M(static_cast<unsigned long>(m));
        for (std::uint64_t y = 1; y < m; ++y)
            if (y % static_cast<std::uint64_t>(p) != 0) powers.insert(powmod(Integer(y), Integer(pn), M).get_ui());
        std::set<std::string> classes;
        for (std::uint64_t x = 1; x < m; ++x) {
            if (x % static_cast<std::uint64_t>(p) == 0) continue;
            const auto c = split_kummer_class(PadicNumber::from_parts(p, 0, Integer(x), N), static_cast<long>(n));
            const Integer rest = mod(Integer(x) * powmod(Integer(1 + p), -c.beta, M), M);
            if (powers.count(rest.get_ui()) == 0) return std::make_pair(false, "coset mismatch at " + std::to_string(x));
            classes.insert(c.beta.get_str());
        }
        return std::make_pair(classes.size() == pn, std::to_string(classes.size()) + " unit classes");
    });
    run_check(rep, "kummer", "norm_one_cosets", [&] {
        const long d = smallest_nonresidue(p);
        const PadicNumber q = PadicNumber::from_parts(p, 1, 1, N);
        const NormKernelBasis basis = nonsplit_basis(q, d, n, N);
        const Integer M(static_cast<unsigned long>(m));
        std::vector<QuadExtElement> norm_one;
        for (std::uint64_t a = 0; a < m; ++a)
            for (std::uint64_t b = 0; b < m; ++b) {
                if (mod(Integer(a) * a - Integer(d) * b * b, M) != 1) continue;
                norm_one.push_back(QuadExtElement::from_components(p, d, Integer(a), Integer(b), N));
            }
        std::set<std::pair<std::string, std::string>> pn_powers;
        for (const auto& y : norm_one) {
            const auto [a, b] = y.pow(Integer(pn)).components(N);
            pn_powers.insert({a.get_str(), b.get_str()});
        }
        std::set<std::string> classes;
        for (const auto& x : norm_one) {
            const auto c = nonsplit_class(x, basis);
            if (c.alpha != 0) return std::make_pair(false, std::string("norm-one element with q-component"));
            const auto [a, b] = (x * basis.u.pow(-c.beta)).components(N);
            if (pn_powers.count({a.get_str(), b.get_str()}) == 0) {
                return std::make_pair(false, "coset mismatch at " + x.to_string());
            }
            classes.insert(c.beta.get_str());
        }
        std::ostringstream os;
        os << norm_one.size() << " norm-one units, " << classes.size() << " classes";
        return std::make_pair(classes.size() == pn && norm_one.size() == (p + 1) * m / p, os.str());
    });
}

inline void tate_suite(SuiteReport& rep, const SuiteParams& prm) {
    const long p = prm.p.value_or(5);
    require_odd_prime(p);
    const long N = 8;
    run_check(rep, "tate", "j_round_trip", [&] {
        std::mt19937_64 rng(11);
        const Integer M = pow_int(p, N);
        for (long ord : {1L, 2L, 3L}) {
            for (int i = 0; i < 10; ++i) {
                Integer u = rng() % M.get_ui();
                if (u % p == 0) u += 1;
                const PadicNumber j = PadicNumber::from_parts(p, -ord, u, N);
                const TateParameter tp = tate_parameter_from_j(j, N);
                const PadicNumber back = j_from_q_series(tp.q);
                if (tp.order() != ord || back.precision() < N || !back.agrees_with(j)) {
                    return std::make_pair(false, "round trip fails for j = " + j.to_string());
                }
            }
        }
        return std::make_pair(true, std::string("30 samples, 8 digits"));
    });
    run_check(rep, "tate", "phi_homomorphism_and_inverse", [&] {
        std::mt19937_64 rng(12);
        const PadicNumber q = PadicNumber::from_parts(p, 1, 1 + static_cast<long>(rng() % 97) * p, N);
        const TateCoefficients c = eq_coefficients({q, N, 0});
        const auto curve = tate_weierstrass(c, q);
        const Integer M = pow_int(p, N);
        int checked = 0;
        while (checked < 40) {
            Integer a = rng() % M.get_ui();
            Integer b = rng() % M.get_ui();
            if (a % p == 0 || b % p == 0 || a % p == 1 || b % p == 1 || (a * b) % p == 1) continue;
            const PadicNumber u1 = PadicNumber::from_parts(p, 0, a, N);
            const PadicNumber u2 = PadicNumber::from_parts(p, 0, b, N);
            const auto sum = weierstrass_add(curve, phi(u1, q), phi(u2, q));
            if (!same_point(sum, phi(u1 * u2, q))) return std::make_pair(false, std::string("phi not additive"));
            const auto inv = phi_inverse(phi(u1, q), q, c);
            if (!inv.u.agrees_with(u1)) return std::make_pair(false, std::string("phi_inverse mismatch"));
            ++checked;
        }
        return std::make_pair(true, std::string("40 unit pairs"));
    });
}

}  // namespace detail

inline SuiteReport run_lemma_suite(const std::string& suite, const SuiteParams& params) {
    SuiteReport rep;
    if (params.n < 1) throw std::invalid_argument("n must be at least 1");
    const bool all = suite == "all";
    if (!all && suite != "padic" && suite != "matrix" && suite != "kummer" && suite != "tate") {
        throw std::invalid_argument("unknown suite '" + suite + "'");
    }
    if (all || suite == "padic") detail::padic_suite(rep, params);
    if (all || suite == "matrix") detail::matrix_suite(rep, params);
    if (all || suite == "kummer") detail::kummer_suite(rep, params);
    if (all || suite == "tate") detail::tate_suite(rep, params);
    return rep;
}

inline std::string render_suite(const SuiteReport& rep) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    for (const auto& r : rep.results) {
        os << "[" << (r.passed ? "pass" : "FAIL") << "] " << r.suite << "/" << r.name << " (" << r.seconds << " s)";
        if (!r.detail.empty()) os << ": " << r.detail;
        os << "\n";
    }
    os << (rep.passed() ? "all lemma checks passed" : "lemma check failure") << "\n";
    return os.str();
}

}  // namespace ecbound
