#include "herman/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <vector>

#include "herman/errors.hpp"

namespace herman::mc {

namespace {

/// Fixed-topology pairwise reduction: the result depends only on the input
/// order, never on thread count or chunking.
double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double pairwise_logsumexp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    if (v.size() == 1) return v[0];
    const std::size_t half = v.size() / 2;
    const double a = pairwise_logsumexp(v.first(half));
    const double b = pairwise_logsumexp(v.subspan(half));
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

struct Moments {
    double mean;
    double variance;
};

Moments moments_linear(const std::vector<double>& xs) {
    const double r = static_cast<double>(xs.size());
    const double s1 = pairwise_sum(xs);
    const double mean = s1 / r;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - mean;
        sq[i] = d * d;
    }
    const double var = xs.size() > 1 ? pairwise_sum(sq) / (r - 1.0) : 0.0;
    return {mean, std::max(var, 0.0)};
}

/// Same statistics from log-domain samples, for a^T values that would
/// overflow double. Results may still be inf if the mean itself does not fit.
Moments moments_logspace(const std::vector<double>& logs) {
    const double r = static_cast<double>(logs.size());
    const double log_mean = pairwise_logsumexp(logs) - std::log(r);
    std::vector<double> doubled(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) doubled[i] = 2.0 * logs[i];
    const double log_m2 = pairwise_logsumexp(doubled) - std::log(r);
    const double mean = std::exp(log_mean);
    double variance = 0.0;
    if (logs.size() > 1) {
        // var = (E[x^2] - mean^2) * r/(r-1), assembled in log space
        const double diff = log_m2 + std::log1p(-std::exp(std::min(2.0 * log_mean - log_m2, 0.0)));
        variance = std::exp(diff) * r / (r - 1.0);
    }
    return {mean, std::max(variance, 0.0)};
}

} // namespace

std::string FunctionalSpec::tag() const {
    if (kind == Kind::hitting_time) return "ET";
    char buf[48];
    std::snprintf(buf, sizeof buf, "EaT(%.17g)", base);
    return buf;
}

u32 default_t_cap(int n_nodes) { return static_cast<u32>(40L * n_nodes * n_nodes); }

u32 simulate_T(const RingConfig& config, u64 master_seed, u64 run_index, u32 t_cap) {
    u32 t = 0;
    kernels::simulate_runs(occupancy_word(config), config.n_nodes(), master_seed, run_index,
                           t_cap, std::span<u32>(&t, 1));
    return t;
}

std::vector<Estimate> estimate(const SimPlan& plan, int threads) {
    if (plan.runs < 1) throw DomainError("estimate: run count must be >= 1");
    if (plan.functionals.empty()) throw DomainError("estimate: no functionals requested");
    const int n = plan.initial.n_nodes();
    const u64 occ = occupancy_word(plan.initial);
    const u32 t_cap = plan.t_cap.value_or(default_t_cap(n));

    std::vector<u32> samples(static_cast<std::size_t>(plan.runs));
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp<int>(workers, 1, static_cast<int>((plan.runs + 4095) / 4096));
    if (workers <= 1) {
        kernels::simulate_runs(occ, n, plan.seed, 0, t_cap, samples);
    } else {
        // disjoint contiguous slices; per-run streams make scheduling irrelevant
        std::vector<std::thread> pool;
        const long chunk = (plan.runs + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long lo = w * chunk;
            const long hi = std::min<long>(plan.runs, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                kernels::simulate_runs(occ, n, plan.seed, static_cast<u64>(lo), t_cap,
                                       std::span<u32>(samples).subspan(lo, hi - lo));
            });
        }
        for (auto& th : pool) th.join();
    }

    const long censored = std::count(samples.begin(), samples.end(), kCensored);
    const long used = plan.runs - censored;
    if (used == 0)
        throw EstimationError("estimate: every run hit the step cap t_cap=" + std::to_string(t_cap));

    std::vector<Estimate> estimates;
    for (const FunctionalSpec& spec : plan.functionals) {
        Estimate est;
        est.functional = spec.tag();
        est.runs = used;
        est.censored = censored;
        est.seed = plan.seed;

        Moments m{};
        if (spec.kind == FunctionalSpec::Kind::hitting_time) {
            std::vector<double> xs;
            xs.reserve(used);
            for (u32 t : samples)
                if (t != kCensored) xs.push_back(static_cast<double>(t));
            m = moments_linear(xs);
        } else {
            if (!(spec.base > 0)) throw DomainError("estimate: exponential base must be positive");
            const double log_base = std::log(spec.base);
            if (log_base * static_cast<double>(t_cap) > 700.0) {
                std::vector<double> logs;
                logs.reserve(used);
                for (u32 t : samples)
                    if (t != kCensored) logs.push_back(log_base * static_cast<double>(t));
                m = moments_logspace(logs);
            } else {
                std::vector<double> xs;
                xs.reserve(used);
                for (u32 t : samples)
                    if (t != kCensored) xs.push_back(std::exp(log_base * static_cast<double>(t)));
                m = moments_linear(xs);
            }
        }
        est.mean = m.mean;
        est.variance = m.variance;
        est.std_error = std::sqrt(m.variance / static_cast<double>(used));
        estimates.push_back(std::move(est));
    }
    return estimates;
}

} // namespace herman::mc
