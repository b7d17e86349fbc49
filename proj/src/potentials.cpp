#include "herman/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "herman/errors.hpp"

namespace herman {

namespace {
constexpr double kPi = std::numbers::pi;
}

double protocol_epsilon(int n_nodes) {
    if (n_nodes < 1) throw DomainError("protocol_epsilon: N must be >= 1");
    const double s = std::sin(kPi / (2.0 * n_nodes));
    return s * s;
}

double doubled_epsilon(int n_nodes_doubled) {
    if (n_nodes_doubled < 2 || n_nodes_doubled % 2 != 0)
        throw DomainError("doubled_epsilon: node count must be even and >= 2");
    const double s = std::sin(kPi / n_nodes_doubled);
    return s * s;
}

Rational phi_exact(const GapTriple& g) {
    if (g.a < 1 || g.b < 1 || g.c < 1) throw DomainError("phi: gaps must be >= 1");
    const long n = g.n_nodes();
    const long n3 = n * n * n;
    Rational q(n3 - 27L * g.a * g.b * g.c, n3);
    q.canonicalize();
    return q;
}

double phi(const GapTriple& g) {
    if (g.a < 1 || g.b < 1 || g.c < 1) throw DomainError("phi: gaps must be >= 1");
    const double n = g.n_nodes();
    const double n3 = n * n * n;
    return (n3 - 27.0 * g.a * g.b * g.c) / n3;
}

double psi_of_positions(std::span<const int> positions, int n_nodes_doubled) {
    if (n_nodes_doubled < 2 || n_nodes_doubled % 2 != 0)
        throw DomainError("psi: doubled node count must be even and >= 2");
    if (positions.size() == 1) return 1.0; // unit-vector modulus
    const double scale = kPi / n_nodes_doubled;
    double re = 0.0;
    double im = 0.0;
    double sign = -1.0; // (-1)^j with j starting at 1
    for (int p : positions) {
        re += sign * std::cos(scale * p);
        im += sign * std::sin(scale * p);
        sign = -sign;
    }
    return re * re + im * im;
}

double psi(const DoubledConfig& config) {
    return psi_of_positions(config.positions(), config.n_nodes_doubled());
}

double psi_of_ring(const RingConfig& config) { return psi(to_doubled(config)); }

namespace {

/// psi after moving positions by the signed unit steps in `mask`, with
/// pairwise annihilation. Works on raw arrays to keep the 2^K mask loop lean.
double stepped_psi(const std::vector<int>& pos, int m, std::uint32_t mask) {
    int buf[32];
    const int k = static_cast<int>(pos.size());
    for (int j = 0; j < k; ++j) {
        const int d = (mask >> j) & 1u ? 1 : -1;
        buf[j] = (pos[j] - 1 + d + m) % m + 1;
    }
    std::sort(buf, buf + k);
    int out[32];
    int n_out = 0;
    for (int j = 0; j < k;) {
        if (j + 1 < k && buf[j] == buf[j + 1]) {
            j += 2;
        } else {
            out[n_out++] = buf[j++];
        }
    }
    return psi_of_positions(std::span<const int>(out, static_cast<std::size_t>(n_out)), m);
}

} // namespace

double one_step_expected_psi(const DoubledConfig& config) {
    const int k = config.token_count();
    if (k > 24) throw CapacityError("one_step_expected_psi: 2^K masks not enumerable for K > 24");
    const int m = config.n_nodes_doubled();
    const std::uint32_t n_masks = 1u << k;
    long double sum = 0.0L;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
        sum += stepped_psi(config.positions(), m, mask);
    return static_cast<double>(sum / n_masks);
}

double recursion_residual(const DoubledConfig& config) {
    const double eps = doubled_epsilon(config.n_nodes_doubled());
    const double expected = (1.0 - eps) * psi(config) + eps * config.token_count();
    return std::abs(one_step_expected_psi(config) - expected);
}

} // namespace herman
