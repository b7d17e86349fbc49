#pragma once

#include "herman/ring.hpp"

namespace herman::lemmas {

// ---------------------------------------------------------------------------
// Numerical certification that phi >= c * psi on 3-token states, with
// c = 27/(0.9*4*pi^2) ~ 0.7599, two independent routes:
//
//   * continuous — the ratio re-parametrized around the equidistant point as
//     Q(u,v) on the triangle u,v in [-1/3,2/3], u+v <= 1/3, scanned on a
//     dense grid minus small neighborhoods of the two flagged points;
//   * discrete   — phi/psi over every gap triple for a range of N.
//
// Plus range checks for the auxiliary even factors
//   f(x) = (1-cos(pi x))/x^2 in [27/8, pi^2/2],
//   g(x) = sin(pi x)/x       in [3*sqrt(3)/4, pi]      on [-1/3, 2/3].
// ---------------------------------------------------------------------------

/// 27 / (0.9 * 4 * pi^2)
double ratio_lower_bound();

double factor_f(double x);
double factor_g(double x);

bool q_in_domain(double u, double v);

struct QEval {
    double value = 0;
    bool singular = false; // (0,0) and (-1/3,-1/3) are flagged, not evaluated
};
/// Q(u,v): cubic numerator over the trigonometric denominator; evaluated in
/// the factored f/g form near the origin to dodge cancellation.
/// DomainError outside the domain.
QEval q_value(double u, double v);

struct ScanReport {
    double step = 0;
    double delta_origin = 0;
    double delta_corner = 0;
    double min_value = 0;
    double argmin_u = 0;
    double argmin_v = 0;
    double max_gradient = 0; // sampled finite-difference diagnostic, not a proof
    long points = 0;
};
/// Minimum of Q over the step-lattice anchored at -1/3, inside the domain,
/// outside the two exclusion balls. Deterministic tie-break: smallest value,
/// then lexicographically smallest (u,v).
ScanReport q_grid_min(double step, double delta_origin, double delta_corner);

struct RatioScan {
    double min_ratio = 0;
    int argmin_n = 0;
    GapTriple argmin_gaps;
    long evaluated = 0;
    long skipped_zero_psi = 0;
};
/// min over N in [n_min, n_max] and every gap triple of phi/psi, skipping
/// psi < 1e-14 (equidistant states contribute 0/0).
RatioScan phi_psi_ratio_scan(int n_min, int n_max);

struct FgRanges {
    bool pass = false;
    double f_min = 0, f_max = 0;
    double g_min = 0, g_max = 0;
    long samples = 0;
};
/// Samples f and g over [-1/3, 2/3] \ {0} and checks the stated ranges
/// (endpoints included up to 1e-12 rounding slack).
FgRanges fg_range_check(long samples);

} // namespace herman::lemmas
