#include "herman/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "herman/errors.hpp"
#include "herman/exact_engine.hpp"
#include "herman/kernels.hpp"
#include "herman/lemma_lab.hpp"
#include "herman/montecarlo.hpp"
#include "herman/potentials.hpp"
#include "herman/ring.hpp"

namespace herman::reports {

namespace {

std::string now_iso8601_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fnv1a64_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json config_to_json(const RingConfig& config) {
    return json{{"n", config.n_nodes()}, {"tokens", config.occupied()}};
}

std::string tokens_string(const RingConfig& config) {
    std::string s;
    for (int node : config.occupied()) {
        if (!s.empty()) s += ' ';
        s += std::to_string(node);
    }
    return s;
}

/// Configuration from parameters: explicit tokens, a gap triple canonicalized
/// to start at node 1, or the equidistant default.
RingConfig config_from_params(const json& params, int n) {
    if (params.contains("tokens") && !params["tokens"].is_null())
        return RingConfig(n, params["tokens"].get<std::vector<int>>());
    if (params.contains("gaps") && !params["gaps"].is_null()) {
        const auto g = params["gaps"].get<std::vector<int>>();
        if (g.size() != 3) throw DomainError("gaps: expected exactly three arc lengths");
        const GapTriple triple = make_gap_triple(g[0], g[1], g[2]);
        if (triple.n_nodes() != n) throw DomainError("gaps: a+b+c must equal N");
        return RingConfig(n, {1, 1 + g[0], 1 + g[0] + g[1]});
    }
    return equidistant_config(n);
}

struct CheckList {
    json checks = json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, const std::string& witness) {
        checks.push_back(json{{"name", name}, {"pass", pass}, {"witness", witness}});
        all_pass = all_pass && pass;
    }
};

int param_int(const json& params, const char* key, long long def,
              long long lo = std::numeric_limits<long long>::min()) {
    const long long v = params.contains(key) && !params[key].is_null()
                            ? params[key].get<long long>()
                            : def;
    if (v < lo) throw DomainError(std::string("parameter ") + key + " out of range");
    return static_cast<int>(v);
}

double param_double(const json& params, const char* key, double def) {
    return params.contains(key) && !params[key].is_null() ? params[key].get<double>() : def;
}

json sorted_gaps_json(const RingConfig& config) {
    const GapTriple g = gaps(config);
    std::vector<int> v{g.a, g.b, g.c};
    std::sort(v.begin(), v.end());
    return json(v);
}

std::string gaps_string(const GapTriple& g) {
    return std::to_string(g.a) + ' ' + std::to_string(g.b) + ' ' + std::to_string(g.c);
}

// --- command handlers --------------------------------------------------------

void run_exact(const json& params, json& results, json& provenance, CheckList& checks) {
    const int n = param_int(params, "n", -1, 1);
    const bool exact_mode = params.value("mode", "float") == std::string("exact");
    const std::string functional = params.value("functional", "ET");
    const bool want_argmax = params.value("argmax", false);

    exact::SolveResult solve;
    std::string base_str;
    if (functional == "ET") {
        solve = exact::expected_hitting_time(n, exact_mode ? exact::Mode::rational
                                                           : exact::Mode::floating);
    } else if (functional == "EaT") {
        if (exact_mode) {
            if (!params.contains("base") || !params["base"].is_string())
                throw DomainError("exact EaT: rational mode needs base as a \"p/q\" string");
            Rational base(params["base"].get<std::string>());
            base.canonicalize();
            base_str = to_string(base);
            solve = exact::expected_exponential(n, base);
        } else {
            const double def = 1.0 / (1.0 - protocol_epsilon(n));
            double base = def;
            if (params.contains("base") && !params["base"].is_null()) {
                if (params["base"].is_string()) {
                    Rational b(params["base"].get<std::string>());
                    b.canonicalize();
                    base = to_double(b);
                } else {
                    base = params["base"].get<double>();
                }
            }
            base_str = format_double(base);
            solve = exact::expected_exponential(n, base);
        }
    } else {
        throw DomainError("exact: functional must be ET or EaT");
    }
    provenance["arithmetic"] = exact_mode ? "rational" : "float";
    if (!base_str.empty()) results["base"] = base_str;

    json columns = json::array({"n", "tokens", "token_count", "value"});
    if (exact_mode) columns.push_back("value_exact");
    json rows = json::array();
    bool finite = true;
    for (std::size_t i = 0; i < solve.entries.size(); ++i) {
        const auto& e = solve.entries[i];
        const RingConfig cfg = ring_config_from_word(n, e.word);
        json row = json::array({n, tokens_string(cfg), e.token_count, e.value});
        if (exact_mode) row.push_back(to_string(solve.exact_values[i]));
        rows.push_back(std::move(row));
        finite = finite && std::isfinite(e.value);
    }
    results["table"] = json{{"columns", columns}, {"rows", rows}};
    results["functional"] = solve.functional;
    checks.add("values_finite", finite, finite ? "all values finite" : "non-finite value present");

    if (functional == "ET" && exact_mode) {
        // closed form 4abc/N on every 3-token configuration, exact
        long checked = 0;
        long mismatches = 0;
        for (std::size_t i = 0; i < solve.entries.size(); ++i) {
            if (solve.entries[i].token_count != 3) continue;
            const RingConfig cfg = ring_config_from_word(n, solve.entries[i].word);
            const GapTriple g = gaps(cfg);
            Rational want(4L * g.a * g.b * g.c, n);
            want.canonicalize();
            ++checked;
            if (solve.exact_values[i] != want) ++mismatches;
        }
        checks.add("closed_form_4abc_over_N", mismatches == 0,
                   std::to_string(checked) + " configs checked, " + std::to_string(mismatches) +
                       " mismatches");
    }

    if (want_argmax) {
        const auto argmax = exact::argmax_expected_T(n, exact_mode ? exact::Mode::rational
                                                                   : exact::Mode::floating);
        json arg = json::array();
        for (const auto& cfg : argmax.argmax) arg.push_back(config_to_json(cfg));
        results["argmax"] = arg;
        results["max_value"] = argmax.max_value;
        if (exact_mode) results["max_value_exact"] = to_string(argmax.max_exact);
        const double bound = 4.0 * n * n / 27.0;
        checks.add("max_ET_within_4NN_over_27", argmax.max_value <= bound + 1e-9,
                   "max " + format_double(argmax.max_value) + " vs bound " + format_double(bound));
    }
}

void run_simulate(const json& params, json& results, json& provenance, CheckList& checks) {
    const int n = param_int(params, "n", -1, 1);
    const RingConfig initial = config_from_params(params, n);
    mc::SimPlan plan{initial,
                     param_int(params, "runs", 100000, 1),
                     static_cast<mc::u64>(params.value("seed", 1LL)),
                     {},
                     std::nullopt};
    const double base = param_double(params, "base", 1.0 / (1.0 - protocol_epsilon(n)));
    plan.functionals = {{mc::FunctionalSpec::Kind::hitting_time, 0.0},
                        {mc::FunctionalSpec::Kind::exponential, base}};
    if (params.contains("t_max") && !params["t_max"].is_null())
        plan.t_cap = static_cast<mc::u32>(params["t_max"].get<long>());

    provenance["seed"] = plan.seed;
    provenance["arithmetic"] = "float";
    results["initial"] = config_to_json(initial);
    results["t_max"] = plan.t_cap ? *plan.t_cap : mc::default_t_cap(n);

    try {
        const auto estimates = mc::estimate(plan);
        json rows = json::array();
        for (const auto& e : estimates)
            rows.push_back(json::array(
                {e.functional, e.mean, e.variance, e.std_error, e.runs, e.censored}));
        results["table"] =
            json{{"columns", json::array({"functional", "mean", "variance", "std_error",
                                          "runs_used", "censored"})},
                 {"rows", rows}};
        const double frac =
            static_cast<double>(estimates.front().censored) / static_cast<double>(plan.runs);
        results["censored_fraction"] = frac;
        checks.add("estimates_formed", true,
                   std::to_string(plan.runs) + " runs, censored fraction " + format_double(frac));
    } catch (const EstimationError& e) {
        results["censored_fraction"] = 1.0;
        checks.add("estimates_formed", false, e.what());
    }
}

void run_verify_recursion(const json& params, json& results, json& provenance, CheckList& checks) {
    const int n_max = param_int(params, "n_max", 8, 1);
    provenance["arithmetic"] = "float";

    double worst = 0.0;
    json worst_config;
    long configs = 0;
    json rows = json::array();
    for (int m = 2; m <= 2 * n_max; m += 2) {
        double m_worst = 0.0;
        long m_configs = 0;
        const int slots = m / 2;
        for (int parity = 0; parity < 2; ++parity) {
            // positions parity: 1 -> odd nodes 1,3,..; 0 -> even nodes 2,4,..
            for (std::uint64_t bits = 1; bits < (1ull << slots); ++bits) {
                if (std::popcount(bits) % 2 == 0) continue;
                std::vector<int> pos;
                for (int s = 0; s < slots; ++s)
                    if ((bits >> s) & 1ull) pos.push_back(2 * s + (parity == 1 ? 1 : 2));
                const DoubledConfig cfg(m, std::move(pos));
                const double r = recursion_residual(cfg);
                ++m_configs;
                if (r > m_worst) m_worst = r;
                if (r > worst) {
                    worst = r;
                    worst_config = json{{"m", m}, {"positions", cfg.positions()}};
                }
            }
        }
        configs += m_configs;
        rows.push_back(json::array({m, m_configs, m_worst}));
    }
    results["table"] =
        json{{"columns", json::array({"doubled_nodes", "configs", "max_residual"})}, {"rows", rows}};
    results["max_residual"] = worst;
    results["worst_config"] = worst_config;
    results["configs_checked"] = configs;
    checks.add("recursion_residual_below_1e-10", worst < 1e-10,
               "max residual " + format_double(worst) + " over " + std::to_string(configs) +
                   " configs");
}

void run_verify_conjecture(const json& params, json& results, json& provenance, CheckList& checks) {
    const int n_min = param_int(params, "n_min", 3, 3);
    const int n_max = param_int(params, "n_max", 10, 3);
    if (n_max < n_min) throw DomainError("verify-conjecture: empty N range");
    const bool exact_mode = params.value("mode", "float") == std::string("exact");
    provenance["arithmetic"] = exact_mode ? "rational" : "float";

    json rows = json::array();
    bool class_ok = true;
    bool bound_ok = true;
    bool equality_ok = true;
    for (int n = n_min; n <= n_max; ++n) {
        const auto argmax =
            exact::argmax_expected_T(n, exact_mode ? exact::Mode::rational : exact::Mode::floating);
        const json expected_gaps = sorted_gaps_json(equidistant_config(n));
        bool all_match = !argmax.argmax.empty();
        for (const auto& cfg : argmax.argmax)
            all_match = all_match && cfg.token_count() == 3 && sorted_gaps_json(cfg) == expected_gaps;
        // every rotation of the equidistant gap class must be present
        long expected_count = 0;
        for (const auto& cfg : exact::enumerate_configs(n, 3))
            if (sorted_gaps_json(cfg) == expected_gaps) ++expected_count;
        all_match = all_match && static_cast<long>(argmax.argmax.size()) == expected_count;

        const double bound = 4.0 * n * n / 27.0;
        const bool below = argmax.max_value <= bound + 1e-9;
        const bool attains = std::abs(argmax.max_value - bound) <= 1e-9;
        const bool equality_correct = attains == (n % 3 == 0);

        class_ok = class_ok && all_match;
        bound_ok = bound_ok && below;
        equality_ok = equality_ok && equality_correct;
        std::vector<int> eg = expected_gaps.get<std::vector<int>>();
        rows.push_back(json::array({n, argmax.max_value, bound,
                                    static_cast<long>(argmax.argmax.size()),
                                    gaps_string({eg[0], eg[1], eg[2]}), attains}));
    }
    results["table"] = json{
        {"columns", json::array({"n", "max_ET", "bound_4NN_over_27", "argmax_count",
                                 "equidistant_gaps", "attains_bound"})},
        {"rows", rows}};
    checks.add("argmax_is_equidistant_class", class_ok, "N range " + std::to_string(n_min) + ".." +
                                                            std::to_string(n_max));
    checks.add("max_ET_within_bound", bound_ok, "tolerance 1e-9");
    checks.add("bound_attained_iff_3_divides_N", equality_ok, "tolerance 1e-9");
}

void run_scan_q(const json& params, json& results, json& provenance, CheckList& checks) {
    const double step = param_double(params, "step", 1.0 / 1200.0);
    const double delta = param_double(params, "delta", 0.03);
    const double delta_corner = param_double(params, "delta_corner", delta);
    provenance["arithmetic"] = "float";

    const auto scan = lemmas::q_grid_min(step, delta, delta_corner);
    results["step"] = scan.step;
    results["delta_origin"] = scan.delta_origin;
    results["delta_corner"] = scan.delta_corner;
    results["min_value"] = scan.min_value;
    results["argmin"] = json::array({scan.argmin_u, scan.argmin_v});
    results["max_gradient_sampled"] = scan.max_gradient;
    results["points"] = scan.points;

    // downsampled grid for the CSV projection
    json rows = json::array();
    const long cells = std::lround(1.0 / step);
    const long stride = std::max<long>(1, cells / 60);
    for (long i = 0; i <= cells; i += stride) {
        const double u = -1.0 / 3.0 + i * step;
        for (long j = 0; j <= cells; j += stride) {
            const double v = -1.0 / 3.0 + j * step;
            if (!lemmas::q_in_domain(u, v)) continue;
            const auto q = lemmas::q_value(u, v);
            if (q.singular) continue;
            rows.push_back(json::array({u, v, q.value}));
        }
    }
    results["table"] = json{{"columns", json::array({"u", "v", "Q"})}, {"rows", rows}};

    checks.add("grid_min_at_least_constant", scan.min_value >= lemmas::ratio_lower_bound(),
               "min " + format_double(scan.min_value) + " vs " +
                   format_double(lemmas::ratio_lower_bound()));
}

void run_scan_ratio(const json& params, json& results, json& provenance, CheckList& checks) {
    const int n_min = param_int(params, "n_min", 3, 3);
    const int n_max = param_int(params, "n_max", 200, 3);
    if (n_max < n_min) throw DomainError("scan-ratio: empty N range");
    provenance["arithmetic"] = "float";

    json rows = json::array();
    double global_min = std::numeric_limits<double>::infinity();
    json global_argmin;
    long evaluated = 0;
    for (int n = n_min; n <= n_max; ++n) {
        const auto scan = lemmas::phi_psi_ratio_scan(n, n);
        evaluated += scan.evaluated;
        rows.push_back(json::array({n, scan.min_ratio, gaps_string(scan.argmin_gaps)}));
        if (scan.min_ratio < global_min) {
            global_min = scan.min_ratio;
            global_argmin = json{{"n", n},
                                 {"gaps", json::array({scan.argmin_gaps.a, scan.argmin_gaps.b,
                                                       scan.argmin_gaps.c})}};
        }
    }
    results["table"] =
        json{{"columns", json::array({"n", "min_ratio", "argmin_gaps"})}, {"rows", rows}};
    results["min_ratio"] = global_min;
    results["argmin"] = global_argmin;
    results["evaluated"] = evaluated;
    checks.add("ratio_min_at_least_constant", global_min >= lemmas::ratio_lower_bound(),
               "min " + format_double(global_min) + " vs " +
                   format_double(lemmas::ratio_lower_bound()));
}

void run_distribution(const json& params, json& results, json& provenance, CheckList& checks) {
    const int n = param_int(params, "n", -1, 1);
    const RingConfig initial = config_from_params(params, n);
    const long t_max = params.contains("t_max") && !params["t_max"].is_null()
                           ? params["t_max"].get<long>()
                           : exact::default_t_max(n);
    provenance["arithmetic"] = "float";
    results["initial"] = config_to_json(initial);

    const auto cdf = exact::hitting_time_distribution(initial, t_max);
    json rows = json::array();
    bool monotone = true;
    bool in_range = true;
    for (std::size_t t = 0; t < cdf.size(); ++t) {
        rows.push_back(json::array({static_cast<long>(t), cdf[t]}));
        if (t > 0) monotone = monotone && cdf[t] >= cdf[t - 1];
        in_range = in_range && cdf[t] >= 0.0 && cdf[t] <= 1.0;
    }
    results["table"] = json{{"columns", json::array({"t", "p_le_t"})}, {"rows", rows}};
    results["final_p"] = cdf.back();
    checks.add("cdf_monotone", monotone, "P(T<=t) nondecreasing over t=0.." + std::to_string(t_max));
    checks.add("cdf_in_unit_interval", in_range, "final P " + format_double(cdf.back()));
}

} // namespace

Report run(const ExperimentSpec& spec) {
    Report report;
    report.spec = spec;
    report.tool_version = std::string(kToolName) + " " + kToolVersion;
    report.timestamp = now_iso8601_utc();
    report.provenance["kernel_isa"] = kernels::isa_name(kernels::active_isa());

    CheckList checks;
    const json& params = spec.parameters;
    if (spec.command == "exact")
        run_exact(params, report.results, report.provenance, checks);
    else if (spec.command == "simulate")
        run_simulate(params, report.results, report.provenance, checks);
    else if (spec.command == "verify-recursion")
        run_verify_recursion(params, report.results, report.provenance, checks);
    else if (spec.command == "verify-conjecture")
        run_verify_conjecture(params, report.results, report.provenance, checks);
    else if (spec.command == "scan-q")
        run_scan_q(params, report.results, report.provenance, checks);
    else if (spec.command == "scan-ratio")
        run_scan_ratio(params, report.results, report.provenance, checks);
    else if (spec.command == "distribution")
        run_distribution(params, report.results, report.provenance, checks);
    else
        throw DomainError("unknown command: " + spec.command);

    report.results["checks"] = checks.checks;
    report.pass = checks.all_pass;
    return report;
}

json to_json(const Report& report) {
    return json{{"command", report.spec.command}, {"parameters", report.spec.parameters},
                {"tool_version", report.tool_version}, {"timestamp", report.timestamp},
                {"results", report.results},          {"provenance", report.provenance},
                {"pass", report.pass}};
}

Report report_from_json(const json& j) {
    Report report;
    report.spec.command = j.at("command").get<std::string>();
    report.spec.parameters = j.at("parameters");
    report.tool_version = j.at("tool_version").get<std::string>();
    report.timestamp = j.at("timestamp").get<std::string>();
    report.results = j.at("results");
    report.provenance = j.at("provenance");
    report.pass = j.at("pass").get<bool>();
    return report;
}

std::string spec_hash(const ExperimentSpec& spec) {
    const json key{{"command", spec.command}, {"parameters", spec.parameters}};
    return fnv1a64_hex(key.dump());
}

std::filesystem::path resolve_out_path(const ExperimentSpec& spec) {
    if (!spec.out_path.empty()) return spec.out_path;
    const char* env = std::getenv(kReportDirEnv);
    const std::filesystem::path dir = env && *env ? env : "reports";
    return dir / (spec.command + "-" + spec_hash(spec) + ".json");
}

void write_report(const Report& report, const std::filesystem::path& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw DomainError("report exists, pass --force to overwrite: " + path.string());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << to_json(report).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

void render_csv(const Report& report, const std::filesystem::path& path) {
    if (!report.results.contains("table"))
        throw DomainError("render_csv: report has no tabular payload");
    const json& table = report.results["table"];
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    const json& columns = table.at("columns");
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << (i ? "," : "") << columns[i].get<std::string>();
    out << '\n';
    for (const json& row : table.at("rows")) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            const json& cell = row[i];
            if (cell.is_number_float())
                out << format_double(cell.get<double>());
            else if (cell.is_string())
                out << cell.get<std::string>();
            else
                out << cell.dump();
        }
        out << '\n';
    }
}

int exit_code(const Report& report) { return report.pass ? 0 : 1; }

} // namespace herman::reports
