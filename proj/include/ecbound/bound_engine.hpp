#pragma once

// Curve records, the hypothesis checklist, and the class-number divisibility
// bound p^{max(0,(2r-4)n)} | h(Q(E[p^n])) with its report rendering.

#include "ecbound/elliptic.hpp"
#include "ecbound/local_kummer.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecbound {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& source, long line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// Raised by compute_bound when a hypothesis fails; names the failing item.
class hypothesis_error : public std::runtime_error {
public:
    hypothesis_error(const std::string& item, const std::string& detail)
        : std::runtime_error("hypothesis failed: " + item + (detail.empty() ? "" : " (" + detail + ")")), item_(item) {}
    const std::string& item() const { return item_; }

private:
    std::string item_;
};

struct CurveRecord {
    std::string label;
    Integer a1, a2, a3, a4, a6;
    long rank = 0;
    std::vector<RationalPoint> generators;

    WeierstrassCurve curve() const { return compute_invariants(a1, a2, a3, a4, a6); }
};

// ---------------------------------------------------------------------------
// Ingestion

namespace detail {

inline std::optional<Rational> parse_rational(const std::string& tok) {
    static const std::regex re(R"(^([+-]?)(\d+)(?:/(\d+))?$)");
    std::smatch m;
    if (!std::regex_match(tok, m, re)) return std::nullopt;
    const Integer num((m[1].str() == "-" ? "-" : "") + m[2].str());
    const Integer den(m[3].matched ? m[3].str() : "1");
    if (den == 0) return std::nullopt;
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string rational_token(const Rational& r) {
    return r.get_den() == 1 ? r.get_num().get_str() : r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace detail

/// Records from curve-file text; `source` labels error messages.
inline std::vector<CurveRecord> parse_curve_text(const std::string& text, const std::string& source = "<input>") {
    std::vector<CurveRecord> out;
    std::set<std::string> labels;
    std::istringstream in(text);
    std::string raw;
    long lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        std::istringstream ts(line);
        std::vector<std::string> tok;
        for (std::string t; ts >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() < 7) throw parse_error(source, lineno, "expected: label a1 a2 a3 a4 a6 rank [x y]...");
        CurveRecord rec;
        rec.label = tok[0];
        Integer* coeffs[5] = {&rec.a1, &rec.a2, &rec.a3, &rec.a4, &rec.a6};
        for (int i = 0; i < 5; ++i) {
            const auto v = detail::parse_rational(tok[static_cast<std::size_t>(i + 1)]);
            if (!v || v->get_den() != 1) {
                throw parse_error(source, lineno, "coefficient a" + std::string("12346").substr(static_cast<std::size_t>(i), 1) +
                                                      " is not an integer: '" + tok[static_cast<std::size_t>(i + 1)] + "'");
            }
            *coeffs[i] = v->get_num();
        }
        const auto rank = detail::parse_rational(tok[6]);
        if (!rank || rank->get_den() != 1 || *rank < 0 || *rank > 64) {
            throw parse_error(source, lineno, "rank is not a small non-negative integer: '" + tok[6] + "'");
        }
        rec.rank = rank->get_num().get_si();
        if (tok.size() != static_cast<std::size_t>(7 + 2 * rec.rank)) {
            throw parse_error(source, lineno, "rank " + std::to_string(rec.rank) + " needs " +
                                                  std::to_string(2 * rec.rank) + " coordinates, found " +
                                                  std::to_string(tok.size() - 7));
        }
        for (long i = 0; i < rec.rank; ++i) {
            const auto x = detail::parse_rational(tok[static_cast<std::size_t>(7 + 2 * i)]);
            const auto y = detail::parse_rational(tok[static_cast<std::size_t>(8 + 2 * i)]);
            if (!x || !y) throw parse_error(source, lineno, "malformed coordinate of generator " + std::to_string(i + 1));
            rec.generators.push_back(RationalPoint::affine(*x, *y));
        }
        if (!labels.insert(rec.label).second) throw parse_error(source, lineno, "duplicate label '" + rec.label + "'");
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<CurveRecord> parse_curve_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_curve_text(ss.str(), path);
}

/// One curve-file line for a record (inverse of parsing).
inline std::string render_record(const CurveRecord& r) {
    std::ostringstream os;
    os << r.label << ' ' << r.a1 << ' ' << r.a2 << ' ' << r.a3 << ' ' << r.a4 << ' ' << r.a6 << ' ' << r.rank;
    for (const auto& g : r.generators) os << ' ' << detail::rational_token(g.x) << ' ' << detail::rational_token(g.y);
    return os.str();
}

inline const CurveRecord& find_record(const std::vector<CurveRecord>& records, const std::string& label) {
    for (const auto& r : records)
        if (r.label == label) return r;
    throw std::invalid_argument("no curve labelled '" + label + "'");
}

// ---------------------------------------------------------------------------
// Hypotheses

struct HypothesisReport {
    std::string label;
    long p = 0;
    long k = 0;
    ReductionKind reduction = ReductionKind::good;
    std::vector<CheckItem> items;
    std::vector<std::string> derived_facts;
    std::optional<HeightData> heights;

    bool passed() const { return all_passed(items); }
    const CheckItem* first_failure() const {
        for (const auto& c : items)
            if (!c.passed) return &c;
        return nullptr;
    }
};

inline constexpr int kRegulatorDoublings = 7;

inline HypothesisReport verify_hypotheses(const CurveRecord& rec) {
    HypothesisReport rep;
    rep.label = rec.label;
    WeierstrassCurve e;
    try {
        e = rec.curve();
    } catch (const std::domain_error& err) {
        rep.items.push_back({"invariants", false, err.what()});
        return rep;
    }
    rep.items.push_back({"invariants", invariants_consistent(e),
                         "c4 = " + e.c4.get_str() + ", c6 = " + e.c6.get_str() + ", Delta = " +
                             e.discriminant.get_str() + ", j = " + e.j.get_str()});

    const PrimeConductorReport pc = check_prime_conductor(e);
    rep.p = pc.p;
    rep.k = pc.k;
    rep.reduction = pc.kind;
    auto item = [&](const std::string& name) {
        for (const auto& c : pc.items)
            if (c.name == name) return c;
        throw std::logic_error("missing checklist item " + name);
    };
    const CheckItem prime_power = item("discriminant_prime_power");
    const CheckItem mult = item("multiplicative_at_p");
    const CheckItem minimal = item("minimal_model");
    const bool conductor_ok = prime_power.passed && mult.passed && minimal.passed;
    rep.items.push_back({"prime_conductor", conductor_ok,
                         conductor_ok ? "conductor " + std::to_string(pc.p)
                                      : (!prime_power.passed ? prime_power.detail
                                                             : (!mult.passed ? "reduction at p: " + mult.detail
                                                                             : minimal.detail))});
    rep.items.push_back(prime_power);
    rep.items.push_back(mult);
    rep.items.push_back(minimal);
    rep.items.push_back(item("p_at_least_11_not_13"));
    rep.items.push_back(item("discriminant_divides_p5"));
    rep.items.push_back(item("p_not_dividing_ord_delta"));

    {
        CheckItem on{"generators_on_curve", true, ""};
        on.detail = std::to_string(rec.generators.size()) + " generator(s) for claimed rank " + std::to_string(rec.rank);
        if (static_cast<long>(rec.generators.size()) != rec.rank) on.passed = false;
        for (std::size_t i = 0; i < rec.generators.size(); ++i) {
            if (!is_on_curve(e, rec.generators[i])) {
                on.passed = false;
                on.detail = "generator " + std::to_string(i + 1) + " " + point_to_string(rec.generators[i]) +
                            " is not on the curve";
                break;
            }
        }
        rep.items.push_back(on);
    }
    const bool points_ok = rep.items.back().passed;

    {
        CheckItem tor{"torsion_trivial", false, ""};
        const auto t = torsion_is_trivial(e, good_odd_primes(e, 10));
        tor.passed = t.trivial;
        std::ostringstream os;
        os << "gcd #E(F_l) = " << t.gcd << " over l in {";
        for (std::size_t i = 0; i < t.counts.size(); ++i) os << (i ? "," : "") << t.counts[i].first;
        os << "}";
        tor.detail = os.str();
        rep.items.push_back(tor);
    }

    {
        CheckItem reg{"regulator_positive", false, ""};
        if (!points_ok) {
            reg.detail = "skipped: generators not on curve";
        } else if (rec.generators.empty()) {
            reg.passed = true;
            reg.detail = "rank 0: empty regulator = 1";
        } else {
            try {
                HeightData hd = regulator(e, rec.generators, kRegulatorDoublings);
                std::ostringstream os;
                os.precision(6);
                os << "Reg = " << hd.regulator << " +/- " << hd.error_bound;
                reg.passed = true;
                reg.detail = os.str();
                rep.heights = std::move(hd);
            } catch (const precision_error& err) {
                reg.detail = err.what();
            }
        }
        rep.items.push_back(reg);
    }

    if (conductor_ok && pc.p > 0) {
        rep.derived_facts.push_back("semistable with prime conductor p = " + std::to_string(pc.p) +
                                    " > (sqrt2+1)^2: Gal(Q(E[p])/Q) = GL_2(Z/p) by Serre's theorem (recorded, not "
                                    "recomputed)");
    }
    rep.derived_facts.push_back("rank and generators are certified input; independence checked by the regulator");
    return rep;
}

// ---------------------------------------------------------------------------
// Bound

struct BoundReport {
    std::string label;
    long p = 0;
    long r = 0;
    long n = 0;
    long kappa_lower = 0;             // max(0, (2r-4)n)
    long global_kummer_exponent = 0;  // 2nr
    long inertia_exponent = 0;        // 4n
    ReductionKind reduction = ReductionKind::good;
    std::vector<CheckItem> checklist;
    std::vector<std::string> derived_facts;
    std::optional<LocalDegreeResult> local;

    bool all_checks_pass() const { return all_passed(checklist); }
    bool trivial() const { return kappa_lower == 0; }
};

/// Kummer classes of the generators at p with their local degree, which must divide p^n.
inline CheckItem local_kummer_check(const WeierstrassCurve& e, const CurveRecord& rec, long p, long n, long precision,
                                    std::optional<LocalDegreeResult>& out) {
    const LocalUniformization lu = local_uniformization(e, p, precision, n);
    const LocalDegreeResult res = local_degree(e, lu, rec.generators, n);
    out = res;
    const bool divides = res.exponent <= n && res.cyclic;
    std::ostringstream os;
    os << (lu.split ? "split" : "non-split") << " Tate parameter ord_p(q) = " << lu.tate.order()
       << "; local Kummer degree p^" << res.exponent << " divides p^" << n << ", cyclic";
    return {"local_kummer_degree", divides && lu.tate.order() == lu.disc_valuation, os.str()};
}

/**
 * Certificate p^{max(0,(2r-4)n)} | h(Q(E[p^n])). Throws hypothesis_error on the
 * first failed hypothesis. A rank of at most 2 gives exponent 0; the report
 * then carries a failing "nontrivial_bound" item.
 */
inline BoundReport compute_bound(const CurveRecord& rec, long n, long precision) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    const HypothesisReport hyp = verify_hypotheses(rec);
    if (const CheckItem* bad = hyp.first_failure()) throw hypothesis_error(bad->name, bad->detail);
    BoundReport b;
    b.label = rec.label;
    b.p = hyp.p;
    b.r = rec.rank;
    b.n = n;
    b.kappa_lower = std::max<long>(0, (2 * b.r - 4) * n);
    b.global_kummer_exponent = 2 * n * b.r;
    b.inertia_exponent = 4 * n;
    b.reduction = hyp.reduction;
    b.checklist = hyp.items;
    b.derived_facts = hyp.derived_facts;
    if (b.global_kummer_exponent - b.inertia_exponent != (2 * b.r - 4) * n) throw std::logic_error("exponent mismatch");

    const WeierstrassCurve e = rec.curve();
    b.checklist.push_back(local_kummer_check(e, rec, b.p, n, precision, b.local));
    b.checklist.push_back({"nontrivial_bound", b.kappa_lower > 0,
                           b.kappa_lower > 0 ? "(2r-4)n = " + std::to_string(b.kappa_lower)
                                             : "rank " + std::to_string(b.r) + " <= 2: (2r-4)n = " +
                                                   std::to_string((2 * b.r - 4) * n) + ", bound clamped to p^0 = 1"});
    return b;
}

inline long default_precision(long n) {
    if (const char* env = std::getenv("ECBOUND_PRECISION")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        throw std::invalid_argument("ECBOUND_PRECISION must be a positive integer");
    }
    return n + 4;
}

inline BoundReport compute_bound(const CurveRecord& rec, long n) { return compute_bound(rec, n, default_precision(n)); }

inline std::string power_string(long p, long e) {
    if (e == 0) return "1";
    return std::to_string(p) + "^" + std::to_string(e);
}

enum class ReportFormat { text, machine };

inline std::string render_report(const BoundReport& b, ReportFormat fmt) {
    std::ostringstream os;
    if (fmt == ReportFormat::machine) {
        os << "label=" << b.label << "\n";
        os << "p=" << b.p << "\n";
        os << "rank=" << b.r << "\n";
        os << "n=" << b.n << "\n";
        os << "reduction=" << to_string(b.reduction) << "\n";
        os << "exponent=" << b.kappa_lower << "\n";
        os << "class_divisor=" << power_string(b.p, b.kappa_lower) << "\n";
        os << "global_kummer_degree=" << power_string(b.p, b.global_kummer_exponent) << "\n";
        os << "inertia_bound=" << power_string(b.p, b.inertia_exponent) << "\n";
        if (b.local) os << "local_kummer_degree=" << power_string(b.p, b.local->exponent) << "\n";
        for (const auto& c : b.checklist) os << "check." << c.name << "=" << (c.passed ? "pass" : "fail") << "\n";
        os << "status=" << (b.all_checks_pass() ? "ok" : "fail") << "\n";
        return os.str();
    }
    os << "curve " << b.label << ": prime conductor p = " << b.p << ", rank r = " << b.r << ", n = " << b.n << "\n";
    os << "reduction at p: " << to_string(b.reduction) << "\n\n";
    os << "hypothesis checklist:\n";
    for (const auto& c : b.checklist) {
        os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    os << "\nderived facts:\n";
    for (const auto& f : b.derived_facts) os << "  - " << f << "\n";
    os << "\nbound:\n";
    os << "  [L_n:K_n] = " << power_string(b.p, b.global_kummer_exponent) << " (2nr = " << b.global_kummer_exponent
       << ")\n";
    os << "  #inertia <= " << power_string(b.p, b.inertia_exponent) << " (4n = " << b.inertia_exponent << ")\n";
    os << "  kappa_n >= max(0, (2r-4)n) = " << b.kappa_lower << "\n";
    if (b.trivial()) {
        os << "  the inequality is vacuous for r <= 2; class divisor 1 is trivially true\n";
    } else {
        os << "  " << power_string(b.p, b.kappa_lower) << " divides the class number of Q(E[" << b.p << "^" << b.n
           << "])\n";
    }
    return os.str();
}

inline std::string render_hypotheses(const HypothesisReport& h) {
    std::ostringstream os;
    os << "curve " << h.label;
    if (h.p > 0) os << ": p = " << h.p << ", ord_p(Delta) = " << h.k << ", reduction " << to_string(h.reduction);
    os << "\n";
    for (const auto& c : h.items) {
        os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    for (const auto& f : h.derived_facts) os << "  - " << f << "\n";
    os << "status: " << (h.passed() ? "all hypotheses hold" : "hypothesis failure") << "\n";
    return os.str();
}

}  // namespace ecbound
