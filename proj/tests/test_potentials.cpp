#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "herman/potentials.hpp"

using namespace herman;
using doctest::Approx;

namespace {

std::vector<DoubledConfig> all_doubled_configs(int m) {
    std::vector<DoubledConfig> out;
    const int slots = m / 2;
    for (int parity = 0; parity < 2; ++parity)
        for (std::uint64_t bits = 1; bits < (1ull << slots); ++bits) {
            if (std::popcount(bits) % 2 == 0) continue;
            std::vector<int> pos;
            for (int s = 0; s < slots; ++s)
                if ((bits >> s) & 1ull) pos.push_back(2 * s + (parity == 1 ? 1 : 2));
            out.emplace_back(m, std::move(pos));
        }
    return out;
}

/// K equally spaced tokens exist iff K | M with even spacing M/K.
bool is_equidistant(const DoubledConfig& c) {
    const int k = c.token_count();
    if (k < 3 || c.n_nodes_doubled() % k != 0) return false;
    const int spacing = c.n_nodes_doubled() / k;
    if (spacing % 2 != 0) return false;
    for (int j = 1; j < k; ++j)
        if (c.positions()[j] - c.positions()[j - 1] != spacing) return false;
    return true;
}

} // namespace

TEST_CASE("epsilon values and bounds") {
    CHECK(protocol_epsilon(3) == Approx(0.25).epsilon(1e-15)); // sin^2(pi/6)
    CHECK(doubled_epsilon(6) == Approx(0.25).epsilon(1e-15));
    CHECK(doubled_epsilon(10) == Approx(protocol_epsilon(5)).epsilon(1e-15));

    // 0 < eps <= 1/4 and eps >= 0.9 * pi^2 / (4 N^2), for every N in 3..10^6
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double prev = 0.26;
    for (int n = 3; n <= 1'000'000; ++n) {
        const double eps = protocol_epsilon(n);
        if (!(eps > 0.0 && eps <= 0.25 && eps < prev && eps >= 0.9 * pi2 / (4.0 * n * n))) {
            CHECK_MESSAGE(false, "epsilon bound violated at N = ", n);
            break;
        }
        prev = eps;
    }
}

TEST_CASE("phi values") {
    CHECK(phi_exact({3, 3, 3}) == 0);
    CHECK(phi_exact({1, 1, 1}) == 0);
    CHECK(phi_exact({1, 1, 3}) == Rational(44, 125));
    CHECK(phi({1, 1, 3}) == Approx(0.352).epsilon(1e-12));
    CHECK_THROWS_AS(phi_exact({0, 2, 3}), DomainError);

    // AM-GM: phi >= 0, equality iff a = b = c
    for (int n = 3; n <= 40; ++n)
        for (int a = 1; a <= n - 2; ++a)
            for (int b = 1; a + b <= n - 1; ++b) {
                const Rational v = phi_exact({a, b, n - a - b});
                CHECK(v >= 0);
                CHECK(v < 1);
                CHECK((v == 0) == (a == b && b == n - a - b));
            }
}

TEST_CASE("psi values") {
    for (int m : {2, 6, 10, 64})
        for (int p = 1; p <= m; ++p) CHECK(psi(DoubledConfig(m, {p})) == 1.0);
    CHECK(psi(DoubledConfig(6, {1, 3, 5})) == Approx(0.0).scale(1).epsilon(1e-12));
    const double golden = (3.0 - std::sqrt(5.0)) / 2.0;
    CHECK(psi(DoubledConfig(10, {1, 3, 5})) == Approx(golden).epsilon(1e-12));
}

TEST_CASE("one-step expectation oracle") {
    CHECK(one_step_expected_psi(DoubledConfig(8, {3})) == 1.0);
    CHECK(one_step_expected_psi(DoubledConfig(6, {1, 3, 5})) == Approx(0.75).epsilon(1e-12));
    const double eps10 = doubled_epsilon(10);
    const DoubledConfig c(10, {1, 3, 5});
    CHECK(one_step_expected_psi(c) ==
          Approx((1.0 - eps10) * psi(c) + 3.0 * eps10).epsilon(1e-12));
    CHECK_THROWS_AS(
        one_step_expected_psi(DoubledConfig(64, std::vector<int>{
                                  1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25,
                                  27, 29, 31, 33, 35, 37, 39, 41, 43, 45, 47, 49})),
        CapacityError);
}

TEST_CASE("recursion residual vanishes, exhaustive 2N <= 16") {
    CHECK(recursion_residual(DoubledConfig(12, {5})) == Approx(0.0).scale(1).epsilon(1e-15));
    double worst = 0.0;
    for (int m = 2; m <= 16; m += 2)
        for (const auto& config : all_doubled_configs(m))
            worst = std::max(worst, recursion_residual(config));
    CHECK(worst < 1e-10);
}

TEST_CASE("psi is rotation invariant") {
    for (int m : {6, 10, 14}) {
        for (const auto& config : all_doubled_configs(m)) {
            const double base = psi(config);
            for (int shift = 1; shift < m; ++shift)
                CHECK(psi(rotated(config, shift)) == Approx(base).scale(1).epsilon(1e-12));
        }
    }
}

TEST_CASE("inserting a same-node pair leaves psi unchanged") {
    for (int m : {6, 10, 16}) {
        for (const auto& config : all_doubled_configs(m)) {
            const double base = psi(config);
            const int parity_node = config.parity() == 1 ? 1 : 2;
            for (int node = parity_node; node <= m; node += 2) {
                std::vector<int> padded = config.positions();
                const auto at = std::lower_bound(padded.begin(), padded.end(), node);
                padded.insert(at, 2, node);
                CHECK(psi_of_positions(padded, m) == Approx(base).scale(1).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("psi bounds and extremes, exhaustive 2N <= 16") {
    for (int m = 2; m <= 16; m += 2) {
        for (const auto& config : all_doubled_configs(m)) {
            const double v = psi(config);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
            if (config.token_count() == 1) {
                CHECK(v == 1.0);
            } else {
                CHECK(v < 1.0 - 1e-6);
            }
            if (is_equidistant(config)) {
                CHECK(v <= 1e-12);
            } else if (config.token_count() >= 3) {
                CHECK(v > 1e-9); // positive away from the equidistant states
            }
        }
    }
}
