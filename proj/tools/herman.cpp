// Command-line front end: builds an ExperimentSpec from flags, runs it, and
// persists the JSON report (plus an optional CSV projection).
//
// Exit codes: 0 all asserted invariants pass, 1 invariant violation (witness
// in the report), 2 usage error, 3 capacity/resource error.

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "herman/errors.hpp"
#include "herman/rational.hpp"
#include "herman/report.hpp"

namespace {

using herman::reports::ExperimentSpec;

/// "p/q" or a decimal literal; rejects trailing garbage.
double parse_base(const std::string& text) {
    if (text.find('/') != std::string::npos) {
        herman::Rational q(text);
        q.canonicalize();
        return herman::to_double(q);
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw herman::DomainError("bad --base value: " + text);
    return v;
}

struct CommonFlags {
    std::string out;
    bool force = false;
    std::string csv;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--out", flags.out, "Report path (default: <report dir>/<command>-<hash>.json)");
    cmd->add_flag("--force", flags.force, "Overwrite an existing report");
    cmd->add_option("--csv", flags.csv, "Also render the tabular payload as CSV");
}

int execute(const ExperimentSpec& spec) {
    using namespace herman::reports;
    const Report report = run(spec);
    const auto path = resolve_out_path(spec);
    write_report(report, path, spec.force);
    if (spec.csv_path) render_csv(report, *spec.csv_path);

    for (const auto& check : report.results["checks"])
        std::printf("[%s] %s: %s\n", check["pass"].get<bool>() ? "ok" : "FAIL",
                    check["name"].get<std::string>().c_str(),
                    check["witness"].get<std::string>().c_str());
    std::printf("report: %s\n", path.string().c_str());
    return exit_code(report);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification lab for Herman's self-stabilizing token ring"};
    app.require_subcommand(1);

    // shared option storage; each subcommand binds the subset it uses
    int n = 0, n_min = 3, n_max = 0;
    std::vector<int> tokens, gap_triple;
    long runs = 100000;
    long long seed = 1;
    std::string base;
    double step = 1.0 / 1200.0, delta = 0.03;
    long t_max = -1;
    bool exact_arith = false, float_arith = false, argmax = false;
    std::string functional = "ET";
    CommonFlags common;

    auto* exact = app.add_subcommand("exact", "Exact hitting-time functionals at fixed N");
    exact->add_option("--n", n, "Ring size N")->required();
    exact->add_option("--functional", functional, "ET or EaT")->check(CLI::IsMember({"ET", "EaT"}));
    exact->add_option("--base", base, "Base a for EaT (number, or p/q in --exact mode)");
    exact->add_flag("--argmax", argmax, "Report all maximizers of E(T)");
    exact->add_flag("--exact", exact_arith, "Exact rational arithmetic");
    exact->add_flag("--float", float_arith, "Floating arithmetic (default)");
    add_common(exact, common);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of E(T) and E(a^T)");
    simulate->add_option("--n", n, "Ring size N")->required();
    simulate->add_option("--tokens", tokens, "Occupied nodes (default: equidistant)")->delimiter(',');
    simulate->add_option("--gaps", gap_triple, "Gap triple a,b,c (canonicalized to start at node 1)")
        ->delimiter(',');
    simulate->add_option("--runs", runs, "Number of runs");
    simulate->add_option("--seed", seed, "Master seed");
    simulate->add_option("--base", base, "Base a for E(a^T) (default 1/(1-eps))");
    simulate->add_option("--t-max", t_max, "Per-run step cap (default 40 N^2)");
    add_common(simulate, common);

    auto* recursion = app.add_subcommand("verify-recursion",
                                         "Exhaustive one-step recursion check for psi");
    recursion->add_option("--n-max", n_max, "Check every doubled ring up to 2N = 2*n_max")
        ->default_val(8);
    add_common(recursion, common);

    auto* conjecture = app.add_subcommand("verify-conjecture",
                                          "argmax E(T) = equidistant class; bound 4N^2/27");
    conjecture->add_option("--n", n_min, "Smallest N")->default_val(3);
    conjecture->add_option("--n-max", n_max, "Largest N")->required();
    conjecture->add_flag("--exact", exact_arith, "Exact rational arithmetic");
    conjecture->add_flag("--float", float_arith, "Floating arithmetic (default)");
    add_common(conjecture, common);

    auto* scan_q = app.add_subcommand("scan-q", "Grid minimum of the ratio landscape Q(u,v)");
    scan_q->add_option("--step", step, "Lattice step")->default_val(1.0 / 1200.0);
    scan_q->add_option("--delta", delta, "Exclusion radius around the two flagged points")
        ->default_val(0.03);
    add_common(scan_q, common);

    auto* scan_ratio = app.add_subcommand("scan-ratio", "min phi/psi over all 3-token states");
    scan_ratio->add_option("--n", n_min, "Smallest N")->default_val(3);
    scan_ratio->add_option("--n-max", n_max, "Largest N")->default_val(200);
    add_common(scan_ratio, common);

    auto* distribution = app.add_subcommand("distribution", "Exact P(T <= t) by forward iteration");
    distribution->add_option("--n", n, "Ring size N")->required();
    distribution->add_option("--tokens", tokens, "Occupied nodes (default: equidistant)")
        ->delimiter(',');
    distribution->add_option("--gaps", gap_triple, "Gap triple a,b,c")->delimiter(',');
    distribution->add_option("--t-max", t_max, "Horizon (default 40 N^2)");
    add_common(distribution, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help/error text
        return code == 0 ? 0 : 2;    // flag mistakes are usage errors
    }

    ExperimentSpec spec;
    spec.out_path = common.out;
    spec.force = common.force;
    if (!common.csv.empty()) spec.csv_path = common.csv;
    auto& p = spec.parameters;

    try {
        if (exact_arith && float_arith) throw herman::DomainError("pick one of --exact/--float");
        const char* mode = exact_arith ? "exact" : "float";

        if (app.got_subcommand(exact)) {
            spec.command = "exact";
            p["n"] = n;
            p["functional"] = functional;
            p["mode"] = mode;
            p["argmax"] = argmax;
            if (!base.empty()) {
                if (exact_arith)
                    p["base"] = base; // rational p/q string
                else
                    p["base"] = parse_base(base);
            }
        } else if (app.got_subcommand(simulate)) {
            spec.command = "simulate";
            p["n"] = n;
            p["runs"] = runs;
            p["seed"] = seed;
            if (!tokens.empty()) p["tokens"] = tokens;
            if (!gap_triple.empty()) p["gaps"] = gap_triple;
            if (!base.empty()) p["base"] = parse_base(base);
            if (t_max >= 0) p["t_max"] = t_max;
        } else if (app.got_subcommand(recursion)) {
            spec.command = "verify-recursion";
            p["n_max"] = n_max;
        } else if (app.got_subcommand(conjecture)) {
            spec.command = "verify-conjecture";
            p["n_min"] = n_min;
            p["n_max"] = n_max;
            p["mode"] = mode;
        } else if (app.got_subcommand(scan_q)) {
            spec.command = "scan-q";
            p["step"] = step;
            p["delta"] = delta;
        } else if (app.got_subcommand(scan_ratio)) {
            spec.command = "scan-ratio";
            p["n_min"] = n_min;
            p["n_max"] = n_max;
        } else if (app.got_subcommand(distribution)) {
            spec.command = "distribution";
            p["n"] = n;
            if (!tokens.empty()) p["tokens"] = tokens;
            if (!gap_triple.empty()) p["gaps"] = gap_triple;
            if (t_max >= 0) p["t_max"] = t_max;
        }
        return execute(spec);
    } catch (const herman::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 3;
    } catch (const herman::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) { // DomainError and bad numeric input
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
