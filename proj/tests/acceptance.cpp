// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Usage: acceptance <path to ecbound> <path to curves file>

#include "ecbound/ecbound.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace ecbound;

namespace {

std::string g_cli;
std::string g_curves;

struct Run {
    int code = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    Run r;
    const std::string cmd = "'" + g_cli + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    for (std::size_t k; (k = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, k);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

struct Outcome {
    bool ok = true;
    std::string note;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            note = what;
        }
    }
};

int g_failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < limit_seconds, "runtime " + std::to_string(secs) + " s over limit");
    if (!o.ok) ++g_failures;
    std::printf("criterion %d: %s - %s (%.2f s)%s%s\n", id, o.ok ? "PASS" : "FAIL", title.c_str(), secs,
                o.ok ? "" : ": ", o.note.c_str());
    std::fflush(stdout);
}

PadicNumber random_unit(std::mt19937_64& rng, long p, long N) {
    const Integer m = pow_int(p, N);
    Integer u = rng() % m.get_ui();
    if (u % p == 0) u += 1;
    return PadicNumber::from_parts(p, 0, u, N);
}

struct Gauss {
    long a, b;
    friend bool operator<(const Gauss& x, const Gauss& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); }
    friend bool operator==(const Gauss& x, const Gauss& y) { return x.a == y.a && x.b == y.b; }
};

long md(long v, long m) { return ((v % m) + m) % m; }

Gauss gmul(const Gauss& x, const Gauss& y, long d, long m) {
    return {md(x.a * y.a + d * x.b * y.b, m), md(x.a * y.b + x.b * y.a, m)};
}

void end_to_end(Outcome& o) {
    for (long n = 1; n <= 4; ++n) {
        const auto r = run_cli("bound --curves '" + g_curves + "' --label 5077a1 --n " + std::to_string(n) +
                               " --format machine");
        const auto kv = key_values(r.out);
        const std::string tag = "n=" + std::to_string(n) + ": ";
        o.require(r.code == 0, tag + "exit code " + std::to_string(r.code));
        o.require(kv.count("exponent") && kv.at("exponent") == std::to_string(2 * n), tag + "exponent");
        o.require(kv.count("class_divisor") && kv.at("class_divisor") == "5077^" + std::to_string(2 * n),
                  tag + "class divisor");
        o.require(kv.count("reduction") && kv.at("reduction") == "multiplicative-nonsplit", tag + "reduction");
        int checks = 0;
        for (const auto& [k, v] : kv)
            if (k.rfind("check.", 0) == 0) {
                ++checks;
                o.require(v == "pass", tag + k + " failed");
            }
        o.require(checks >= 11, tag + "checklist incomplete");
    }
}

void filtration(Outcome& o) {
    for (auto [p, n, m] : {std::tuple{3L, 1, 2}, std::tuple{3L, 1, 3}, std::tuple{5L, 1, 3}})
        o.require(verify_filtration_power_identity(p, n, m),
                  "identity fails at (" + std::to_string(p) + "," + std::to_string(n) + "," + std::to_string(m) + ")");
    o.require(filtration_power_census(5, 1, 3).enumerated == 390625, "(5,1,3) did not enumerate 5^8 matrices");
}

void roots(Outcome& o) {
    std::mt19937_64 rng(2024);
    for (auto [p, n, m] : {std::tuple{5L, 1, 4}, std::tuple{7L, 1, 3}}) {
        const auto step = static_cast<std::int64_t>(p * p);
        const auto range = detail::upow(static_cast<std::uint64_t>(p), static_cast<unsigned>(m - 2));
        for (int i = 0; i < 200; ++i) {
            auto r = [&] { return static_cast<std::int64_t>(rng() % range) * step; };
            const Mat2ModPn x(p, m, {1 + r(), r(), r(), 1 + r()});
            const Mat2ModPn y = matrix_pn_root(x, n);
            o.require(in_filtration(y, n) && y.pow(static_cast<std::uint64_t>(p)) == x,
                      "root fails for " + x.to_string());
        }
    }
}

void perfectness(Outcome& o) {
    for (long p : {5L, 7L, 11L}) {
        const auto c = commutator_subgroup_order(p, 1);
        o.require(c.group_order == static_cast<std::uint64_t>(p * (p * p - 1)), "SL2 order at " + std::to_string(p));
        o.require(c.perfect(), "not perfect at p = " + std::to_string(p));
    }
    const auto c3 = commutator_subgroup_order(3, 1);
    o.require(c3.commutator_order < c3.group_order, "perfect at p = 3");
}

void subspaces(Outcome& o) {
    const auto subs = conjugation_stable_subspaces(5);
    o.require(subs.size() == 4, "expected 4 subspaces, found " + std::to_string(subs.size()));
    std::multiset<int> dims;
    for (const auto& s : subs) {
        dims.insert(s.dimension());
        if (s.dimension() == 1) o.require(subspace_contains(s, {1, 0, 0, 1}), "line is not the scalars");
        if (s.dimension() == 3) {
            o.require(subspace_contains(s, {1, 0, 0, 4}) && subspace_contains(s, {0, 1, 0, 0}) &&
                          subspace_contains(s, {0, 0, 1, 0}),
                      "hyperplane is not trace zero");
        }
    }
    o.require(dims == std::multiset<int>{0, 1, 3, 4}, "dimensions differ from {0,1,3,4}");
    o.require(!is_conjugation_stable(SubspaceModP{5, {{1, 0, 0, 0}, {0, 0, 0, 1}}}), "diagonal matrices stable");
}

void unit_groups(Outcome& o) {
    const long m = 27;
    // Q_3^* mod cubes against cubes of units mod 27
    std::set<long> cubes;
    for (long y = 1; y < m; ++y)
        if (y % 3 != 0) cubes.insert(y * y * y % m);
    std::vector<std::pair<long, long>> elems;
    for (long v = 0; v < 2; ++v)
        for (long w = 1; w < m; ++w)
            if (w % 3 != 0) elems.emplace_back(v, w);
    for (const auto& [v1, w1] : elems)
        for (const auto& [v2, w2] : elems) {
            const bool same = split_kummer_class(PadicNumber::from_parts(3, v1, w1, 3), 1) ==
                              split_kummer_class(PadicNumber::from_parts(3, v2, w2, 3), 1);
            const long ratio = w1 * inverse_mod(Integer(w2), Integer(m)).get_si() % m;
            o.require(same == (v1 == v2 && cubes.count(ratio) > 0), "split coset table disagrees");
        }

    // norm-one units of Z_3[sqrt 2] mod 27 and H = q^Z x U_{M,1} with q = 3
    const long d = 2;
    std::vector<Gauss> units;
    for (long a = 0; a < m; ++a)
        for (long b = 0; b < m; ++b)
            if (md(a * a - d * b * b, m) == 1) units.push_back({a, b});
    o.require(units.size() == 36, "expected 36 norm-one units mod 27");
    std::set<Gauss> ucubes;
    for (const auto& y : units) ucubes.insert(gmul(gmul(y, y, d, m), y, d, m));
    auto quotient = [&](const Gauss& x, const Gauss& y) {
        for (const auto& z : units)
            if (gmul(z, y, d, m) == x) return z;
        return Gauss{0, 0};
    };
    const auto q = PadicNumber::from_integer(3, 3, 3);
    const auto basis = nonsplit_basis(q, d, 1, 3);
    std::vector<std::pair<long, Gauss>> h;
    for (long a = 0; a < 3; ++a)
        for (const auto& w : units) h.emplace_back(a, w);
    std::vector<KummerClass> cls;
    for (const auto& [a, w] : h)
        cls.push_back(nonsplit_class(
            QuadExtElement::embed(q.pow(a), d) * QuadExtElement::from_components(3, d, w.a, w.b, 3), basis));
    std::set<std::pair<Integer, Integer>> distinct;
    for (std::size_t i = 0; i < h.size(); ++i) {
        distinct.insert({cls[i].alpha, cls[i].beta});
        for (std::size_t j = 0; j < h.size(); ++j) {
            const bool oracle = h[i].first == h[j].first && ucubes.count(quotient(h[i].second, h[j].second)) > 0;
            o.require((cls[i] == cls[j]) == oracle, "norm-one coset table disagrees");
        }
    }
    o.require(distinct.size() == 9, "H/H^3 does not have 9 classes");
    o.require(nonsplit_class(QuadExtElement::embed(q, d), basis) == KummerClass::make(3, 1, 1, 0, KummerBasis::nonsplit),
              "class of q is not (1,0)");
    o.require(nonsplit_class(basis.u, basis) == KummerClass::make(3, 1, 0, 1, KummerBasis::nonsplit),
              "class of u is not (0,1)");
}

void tate_round_trip(Outcome& o) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20; ++i) {
        const long p = i % 2 == 0 ? 5 : 11;
        const long ord = -(1 + i % 3);
        const auto j = PadicNumber::from_parts(p, ord, random_unit(rng, p, 8).unit(), 8);
        const auto tp = tate_parameter_from_j(j, 8);
        const auto back = j_from_product_formula(tp.q);
        o.require(tp.order() == -ord, "ord q");
        o.require(back.precision() >= 8 && back.agrees_with(j) && back.valuation() == ord,
                  "j not reproduced to 8 digits");
    }
    const auto e = compute_invariants(0, 0, 1, -7, 6);
    const auto tp = tate_parameter_from_j(PadicNumber::from_rational(5077, e.j, 8), 8);
    o.require(tp.order() == 1 && ordp(e.discriminant, 5077) == 1, "ord_5077 q differs from ord Delta");
}

void phi_checks(Outcome& o) {
    std::mt19937_64 rng(88);
    const long p = 5;
    const long N = 8;
    const auto q = PadicNumber::from_parts(p, 1, random_unit(rng, p, N).unit(), N);
    const auto c = eq_coefficients({q, N, 0});
    const auto curve = tate_weierstrass(c, q);
    for (int i = 0; i < 100; ++i) {
        const auto u1 = random_unit(rng, p, N);
        const auto u2 = random_unit(rng, p, N);
        const auto lhs = phi(u1 * u2, q);
        const auto rhs = weierstrass_add(curve, phi(u1, q), phi(u2, q));
        o.require(same_point(lhs, rhs), "phi not additive");
        const auto inv = phi_inverse(phi(u1, q), q, c);
        o.require(!inv.identity && inv.u.agrees_with(u1) && inv.u.precision() >= N - 1, "phi_inverse mismatch");
    }
}

void heights(Outcome& o) {
    const auto e = compute_invariants(0, 0, 1, -7, 6);
    const std::vector<RationalPoint> gens{RationalPoint::affine(Rational(0), Rational(2)),
                                          RationalPoint::affine(Rational(1), Rational(0)),
                                          RationalPoint::affine(Rational(2), Rational(0))};
    for (const auto& P : gens) {
        const auto h1 = canonical_height(e, P, 6);
        const auto h2 = canonical_height(e, double_point(e, P), 6);
        o.require(std::fabs(h2.value - 4 * h1.value) <= h2.error_bound + 4 * h1.error_bound,
                  "quadraticity outside error bounds");
    }
    const auto reg = regulator(e, gens);
    o.require(reg.regulator - reg.error_bound > 0, "regulator interval contains 0");
}

void negative_controls(Outcome& o) {
    struct Case {
        std::string label, check;
    };
    for (const auto& c : {Case{"11a1", "torsion_trivial"}, Case{"d432", "prime_conductor"},
                          Case{"389a1", "nontrivial_bound"}}) {
        const auto r = run_cli("bound --curves '" + g_curves + "' --label " + c.label + " --n 1 --format machine");
        const auto kv = key_values(r.out);
        o.require(r.code == 1, c.label + ": exit code " + std::to_string(r.code));
        o.require(kv.count("check." + c.check) && kv.at("check." + c.check) == "fail",
                  c.label + ": " + c.check + " not reported failing");
        o.require(r.out.find("failed: " + c.check) != std::string::npos, c.label + ": failing check not named");
        if (c.label == "389a1") o.require(kv.count("exponent") && kv.at("exponent") == "0", "rank 2 exponent");
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <ecbound binary> <curves file>\n";
        return 2;
    }
    g_cli = argv[1];
    g_curves = argv[2];
    criterion(1, "5077a1 bound for n = 1..4 gives 5077^{2n}", 5, end_to_end);
    criterion(2, "filtration power identity by exhaustion", 60, filtration);
    criterion(3, "matrix p^n-th roots are exact", 10, roots);
    criterion(4, "SL2 perfect for p = 5, 7, 11 and not for p = 3", 60, perfectness);
    criterion(5, "conjugation-stable subspaces of M2(F5)", 30, subspaces);
    criterion(6, "unit-group coset tables mod 27", 30, unit_groups);
    criterion(7, "Tate parameter round trip", 30, tate_round_trip);
    criterion(8, "phi homomorphism and inverse", 30, phi_checks);
    criterion(9, "height quadraticity and positive regulator", 60, heights);
    criterion(10, "negative controls exit 1 with a named check", 30, negative_controls);
    return g_failures == 0 ? 0 : 1;
}
