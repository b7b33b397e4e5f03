// ecbound: hypothesis verification, class-number divisibility bounds, lemma
// self-checks and local Kummer degrees for curves of prime conductor.
//
// Exit codes: 0 success, 1 hypothesis or lemma failure, 2 parse error,
// 3 insufficient precision or enumeration budget.

#include "ecbound/ecbound.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kParse = 2;
constexpr int kPrecision = 3;

using namespace ecbound;

std::string machine_hypotheses(const HypothesisReport& h) {
    std::string out = "label=" + h.label + "\np=" + std::to_string(h.p) + "\n";
    for (const auto& c : h.items) out += "check." + c.name + "=" + (c.passed ? "pass" : "fail") + "\n";
    out += std::string("status=") + (h.passed() ? "ok" : "fail") + "\n";
    return out;
}

int cmd_verify(const std::string& file, const std::string& label) {
    const auto records = parse_curve_file(file);
    bool ok = true;
    for (const auto& rec : records) {
        if (!label.empty() && rec.label != label) continue;
        const HypothesisReport h = verify_hypotheses(rec);
        std::cout << render_hypotheses(h);
        ok = ok && h.passed();
    }
    if (!label.empty()) find_record(records, label);
    return ok ? kOk : kFailure;
}

int cmd_bound(const std::string& file, const std::string& label, long n, const std::string& format) {
    const auto records = parse_curve_file(file);
    const CurveRecord& rec = find_record(records, label);
    const ReportFormat fmt = format == "machine" ? ReportFormat::machine : ReportFormat::text;
    const HypothesisReport h = verify_hypotheses(rec);
    if (!h.passed()) {
        std::cout << (fmt == ReportFormat::machine ? machine_hypotheses(h) : render_hypotheses(h));
        std::cerr << "ecbound: hypothesis failed: " << h.first_failure()->name << "\n";
        return kFailure;
    }
    const BoundReport b = compute_bound(rec, n);
    std::cout << render_report(b, fmt);
    if (!b.all_checks_pass()) {
        for (const auto& c : b.checklist)
            if (!c.passed) std::cerr << "ecbound: check failed: " << c.name << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_lemmas(const std::string& suite, long p, long n, std::uint64_t budget) {
    SuiteParams prm;
    if (p > 0) prm.p = p;
    prm.n = n;
    prm.budget = budget;
    const SuiteReport rep = run_lemma_suite(suite, prm);
    std::cout << render_suite(rep);
    return rep.passed() ? kOk : kFailure;
}

int cmd_local_degree(const std::string& file, const std::string& label, long n, long precision) {
    const auto records = parse_curve_file(file);
    const CurveRecord& rec = find_record(records, label);
    const WeierstrassCurve e = rec.curve();
    const PrimeConductorReport pc = check_prime_conductor(e);
    if (pc.p == 0 || !reduction_type(e, pc.p).multiplicative()) {
        std::cerr << "ecbound: " << label << " has no single prime of multiplicative reduction\n";
        return kFailure;
    }
    if (precision <= 0) precision = default_precision(n);
    const LocalUniformization lu = local_uniformization(e, pc.p, precision, n);
    std::cout << "curve " << label << " at p = " << pc.p << " (" << (lu.split ? "split" : "non-split")
              << "), n = " << n << ", precision " << precision << "\n";
    std::cout << "q = " << lu.tate.q << "\n";
    if (lu.norm_basis) {
        std::cout << "u = " << lu.norm_basis->u << "\n";
        std::cout << "[H:H0] = " << lu.norm_basis->index_h_h0 << "\n";
    }
    std::vector<KummerClass> classes;
    for (std::size_t i = 0; i < rec.generators.size(); ++i) {
        classes.push_back(point_to_local_class(e, lu, rec.generators[i], n));
        std::cout << "class(P" << i + 1 << ") = " << classes.back().to_string() << "\n";
    }
    const LocalDegreeResult r =
        lu.split ? local_degree_split(classes, pc.p, n) : local_degree_nonsplit(classes, pc.p, n);
    std::cout << "local_degree=" << power_string(pc.p, r.exponent) << "\n";
    std::cout << "cyclic=" << (r.cyclic ? "true" : "false") << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-number divisibility certificates for elliptic curves of prime conductor"};
    app.require_subcommand(1);

    std::string curves;
    std::string label;
    long n = 1;
    std::string format = "text";
    std::string suite = "all";
    long p = 0;
    std::uint64_t budget = kEnumerationBudget;
    long precision = 0;

    auto* verify = app.add_subcommand("verify", "check every hypothesis for the curves in a file");
    verify->add_option("--curves", curves, "curve file")->required();
    verify->add_option("--label", label, "restrict to one curve");

    auto* bound = app.add_subcommand("bound", "certify the class-number divisibility bound");
    bound->add_option("--curves", curves, "curve file")->required();
    bound->add_option("--label", label, "curve label")->required();
    bound->add_option("--n", n, "level n >= 1")->required()->check(CLI::PositiveNumber);
    bound->add_option("--format", format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

    auto* lemmas = app.add_subcommand("lemmas", "run the exhaustive lemma checks");
    lemmas->add_option("--suite", suite, "all, matrix, kummer, tate or padic")
        ->check(CLI::IsMember({"all", "matrix", "kummer", "tate", "padic"}));
    lemmas->add_option("--p", p, "prime")->check(CLI::PositiveNumber);
    lemmas->add_option("--n", n, "level n >= 1")->check(CLI::PositiveNumber);
    lemmas->add_option("--budget", budget, "enumeration budget");

    auto* local = app.add_subcommand("local-degree", "local Kummer classes and degree at the conductor");
    local->add_option("--curves", curves, "curve file")->required();
    local->add_option("--label", label, "curve label")->required();
    local->add_option("--n", n, "level n >= 1")->required()->check(CLI::PositiveNumber);
    local->add_option("--precision", precision, "p-adic digits")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }

    try {
        if (*verify) return cmd_verify(curves, label);
        if (*bound) return cmd_bound(curves, label, n, format);
        if (*lemmas) return cmd_lemmas(suite, p, n, budget);
        if (*local) return cmd_local_degree(curves, label, n, precision);
    } catch (const parse_error& e) {
        std::cerr << "ecbound: parse error: " << e.what() << "\n";
        return kParse;
    } catch (const precision_error& e) {
        std::cerr << "ecbound: " << e.what() << "\n";
        return kPrecision;
    } catch (const budget_error& e) {
        std::cerr << "ecbound: " << e.what() << "\n";
        return kPrecision;
    } catch (const hypothesis_error& e) {
        std::cerr << "ecbound: " << e.what() << "\n";
        return kFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ecbound: " << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "ecbound: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
