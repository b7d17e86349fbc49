#include "herman/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "herman/errors.hpp"
#include "herman/potentials.hpp"

namespace herman::lemmas {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThird = 1.0 / 3.0;

// The domain boundary itself belongs to the scan; admit a hair of slack so
// lattice points that land on it after rounding are not dropped.
constexpr double kEdgeSlack = 1e-12;

double q_numerator(double u, double v) {
    return 4.5 * (u * u + v * v + (u + v) * (u + v)) + 27.0 * (u * u * v + u * v * v);
}

double q_denominator_direct(double u, double v) {
    return 3.0 - std::cos(kPi * u) - std::cos(kPi * v) - std::cos(kPi * (u + v)) +
           std::sqrt(3.0) * (std::sin(kPi * u) * (1.0 - std::cos(kPi * v)) +
                             std::sin(kPi * v) * (1.0 - std::cos(kPi * u)));
}

/// Same denominator in the factored even form; stable under cancellation
/// because every term is a product of O(1) factors with x^2 weights.
double q_denominator_factored(double u, double v) {
    const double s = u + v;
    return factor_f(u) * u * u + factor_f(v) * v * v + factor_f(s) * s * s +
           std::sqrt(3.0) * (factor_g(u) * factor_f(v) * u * v * v +
                             factor_g(v) * factor_f(u) * u * u * v);
}

} // namespace

double ratio_lower_bound() { return 27.0 / (0.9 * 4.0 * kPi * kPi); }

double factor_f(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        // (1 - cos(pi x))/x^2 = pi^2/2 - pi^4 x^2/24 + pi^6 x^4/720 - ...
        const double p2 = kPi * kPi;
        const double x2 = x * x;
        return p2 / 2.0 - p2 * p2 * x2 / 24.0 + p2 * p2 * p2 * x2 * x2 / 720.0;
    }
    return (1.0 - std::cos(kPi * x)) / (x * x);
}

double factor_g(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        // sin(pi x)/x = pi - pi^3 x^2/6 + pi^5 x^4/120 - ...
        const double p2 = kPi * kPi;
        const double x2 = x * x;
        return kPi * (1.0 - p2 * x2 / 6.0 + p2 * p2 * x2 * x2 / 120.0);
    }
    return std::sin(kPi * x) / x;
}

bool q_in_domain(double u, double v) {
    return u >= -kThird - kEdgeSlack && u <= 2.0 * kThird + kEdgeSlack &&
           v >= -kThird - kEdgeSlack && v <= 2.0 * kThird + kEdgeSlack &&
           u + v <= kThird + kEdgeSlack;
}

QEval q_value(double u, double v) {
    if (!q_in_domain(u, v)) throw DomainError("q_value: (u,v) outside the domain");
    // flagged points: numerator and denominator both vanish at the origin;
    // the corner is flagged alongside it and simply skipped by scans.
    if ((u == 0.0 && v == 0.0) ||
        (std::abs(u + kThird) < 1e-15 && std::abs(v + kThird) < 1e-15))
        return {0.0, true};
    const double num = q_numerator(u, v);
    const double den = std::abs(u) + std::abs(v) < 1e-6 ? q_denominator_factored(u, v)
                                                        : q_denominator_direct(u, v);
    return {num / den, false};
}

ScanReport q_grid_min(double step, double delta_origin, double delta_corner) {
    if (!(step > 0)) throw DomainError("q_grid_min: step must be positive");

    ScanReport report;
    report.step = step;
    report.delta_origin = delta_origin;
    report.delta_corner = delta_corner;
    report.min_value = std::numeric_limits<double>::infinity();

    auto included = [&](double u, double v) {
        if (!q_in_domain(u, v)) return false;
        if (std::hypot(u, v) < delta_origin) return false;
        if (std::hypot(u + kThird, v + kThird) < delta_corner) return false;
        return true;
    };
    auto eval = [&](double u, double v, double& out) {
        const QEval q = q_value(u, v);
        out = q.value;
        return !q.singular;
    };

    // lattice anchored at -1/3 so the boundary rows are sampled
    const long cells = std::lround(1.0 / step);
    for (long i = 0; i <= cells; ++i) {
        const double u = -kThird + i * step;
        if (u > 2.0 * kThird + kEdgeSlack) break;
        for (long j = 0; j <= cells; ++j) {
            const double v = -kThird + j * step;
            if (u + v > kThird + kEdgeSlack) break;
            if (!included(u, v)) continue;
            double q;
            if (!eval(u, v, q)) continue;
            ++report.points;
            if (q < report.min_value ||
                (q == report.min_value && std::pair{u, v} < std::pair{report.argmin_u, report.argmin_v})) {
                report.min_value = q;
                report.argmin_u = u;
                report.argmin_v = v;
            }
        }
    }

    // sampled central-difference gradient magnitudes, as a diagnostic only
    const double h = step / 2.0;
    const long stride = std::max<long>(1, cells / 64);
    for (long i = 0; i <= cells; i += stride) {
        const double u = -kThird + i * step;
        for (long j = 0; j <= cells; j += stride) {
            const double v = -kThird + j * step;
            if (!included(u, v)) continue;
            if (!included(u - h, v) || !included(u + h, v) || !included(u, v - h) ||
                !included(u, v + h))
                continue;
            double qe, qw, qn, qs;
            if (!eval(u + h, v, qe) || !eval(u - h, v, qw) || !eval(u, v + h, qn) ||
                !eval(u, v - h, qs))
                continue;
            const double grad = std::hypot((qe - qw) / (2 * h), (qn - qs) / (2 * h));
            report.max_gradient = std::max(report.max_gradient, grad);
        }
    }
    return report;
}

RatioScan phi_psi_ratio_scan(int n_min, int n_max) {
    if (n_min < 3) throw DomainError("phi_psi_ratio_scan: N_min must be >= 3");
    if (n_max < n_min) throw DomainError("phi_psi_ratio_scan: empty N range");

    RatioScan scan;
    scan.min_ratio = std::numeric_limits<double>::infinity();
    for (int n = n_min; n <= n_max; ++n) {
        for (int a = 1; a <= n - 2; ++a) {
            for (int b = 1; a + b <= n - 1; ++b) {
                const GapTriple g{a, b, n - a - b};
                // psi of the 3-token state anchored at node 1 with these gaps
                const RingConfig config(n, {1, 1 + a, 1 + a + b});
                const double psi_value = psi_of_ring(config);
                if (psi_value < 1e-14) {
                    ++scan.skipped_zero_psi;
                    continue;
                }
                const double ratio = to_double(phi_exact(g)) / psi_value;
                ++scan.evaluated;
                if (ratio < scan.min_ratio) {
                    scan.min_ratio = ratio;
                    scan.argmin_n = n;
                    scan.argmin_gaps = g;
                }
            }
        }
    }
    return scan;
}

FgRanges fg_range_check(long samples) {
    if (samples < 1000) throw DomainError("fg_range_check: need at least 10^3 samples");

    FgRanges result;
    result.f_min = result.g_min = std::numeric_limits<double>::infinity();
    result.f_max = result.g_max = -std::numeric_limits<double>::infinity();

    const double lo = -kThird;
    const double hi = 2.0 * kThird;
    for (long i = 0; i <= samples; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / samples;
        if (x == 0.0) continue;
        const double f = factor_f(x);
        const double g = factor_g(x);
        result.f_min = std::min(result.f_min, f);
        result.f_max = std::max(result.f_max, f);
        result.g_min = std::min(result.g_min, g);
        result.g_max = std::max(result.g_max, g);
        ++result.samples;
    }

    const double slack = 1e-12;
    const double f_lo = 27.0 / 8.0;
    const double f_hi = kPi * kPi / 2.0;
    const double g_lo = 3.0 * std::sqrt(3.0) / 4.0;
    const double g_hi = kPi;
    result.pass = result.f_min >= f_lo - slack && result.f_max <= f_hi + slack &&
                  result.g_min >= g_lo - slack && result.g_max <= g_hi + slack;
    return result;
}

} // namespace herman::lemmas
