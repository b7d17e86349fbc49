#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

#include "herman/exact_engine.hpp"
#include "herman/potentials.hpp"

using namespace herman;
using doctest::Approx;
namespace ex = herman::exact;

TEST_CASE("enumerate_configs") {
    const auto only = ex::enumerate_configs(3, 3);
    REQUIRE(only.size() == 1);
    CHECK(only[0] == RingConfig(3, {1, 2, 3}));
    CHECK(ex::enumerate_configs(5, 3).size() == 10);
    CHECK(ex::enumerate_configs(9, 5).size() == 126);
    CHECK_THROWS_AS(ex::enumerate_configs(6, 2), DomainError);
    CHECK_THROWS_AS(ex::enumerate_configs(4, 5), DomainError);
    CHECK_THROWS_AS(ex::enumerate_configs(64, 33), CapacityError);
}

TEST_CASE("transition rows are distributions (independent reconstruction)") {
    // rebuild every transition from step_original and check masses sum to one
    for (int n : {4, 6, 7}) {
        for (int k = 3; k <= n; k += 2) {
            for (const auto& config : ex::enumerate_configs(n, k)) {
                std::map<std::uint64_t, int> successors;
                for (std::uint32_t bits = 0; bits < (1u << k); ++bits)
                    ++successors[occupancy_word(step_original(config, MoveMask::from_bits(bits, k)))];
                long total = 0;
                for (const auto& [word, count] : successors) {
                    CHECK(std::popcount(word) <= k);
                    total += count;
                }
                CHECK(total == (1L << k));
            }
        }
    }
}

TEST_CASE("expected hitting time, closed form") {
    const auto r3 = ex::expected_hitting_time(3, ex::Mode::rational);
    CHECK(r3.exact_value(RingConfig(3, {1, 2, 3})) == Rational(4, 3));
    CHECK(r3.exact_value(RingConfig(3, {2})) == 0);

    const auto r5 = ex::expected_hitting_time(5, ex::Mode::rational);
    CHECK(r5.exact_value(RingConfig(5, {1, 2, 3})) == Rational(12, 5)); // gaps (1,1,3)

    // every 3-token configuration matches 4abc/N exactly, N <= 9
    for (int n = 3; n <= 9; ++n) {
        const auto solve = ex::expected_hitting_time(n, ex::Mode::rational, 3);
        for (const auto& config : ex::enumerate_configs(n, 3)) {
            const auto g = gaps(config);
            Rational want(4L * g.a * g.b * g.c, n);
            want.canonicalize();
            CHECK(solve.exact_value(config) == want);
        }
    }
}

TEST_CASE("rational and float solvers agree") {
    for (int n : {5, 7, 9}) {
        const auto exact_solve = ex::expected_hitting_time(n, ex::Mode::rational);
        const auto float_solve = ex::expected_hitting_time(n, ex::Mode::floating);
        REQUIRE(exact_solve.entries.size() == float_solve.entries.size());
        for (std::size_t i = 0; i < exact_solve.entries.size(); ++i)
            CHECK(std::abs(to_double(exact_solve.exact_values[i]) - float_solve.entries[i].value) <
                  1e-9);
    }
}

TEST_CASE("expected exponential") {
    const auto anchor = ex::expected_exponential(3, Rational(4, 3));
    CHECK(anchor.exact_value(RingConfig(3, {1, 2, 3})) == Rational(3, 2));
    CHECK(anchor.exact_value(RingConfig(3, {1})) == 1);

    // Theorem 4 equality case at N = 9
    const double a9 = 1.0 / (1.0 - protocol_epsilon(9));
    const auto g9 = ex::expected_exponential(9, a9);
    CHECK(g9.value(equidistant_config(9)) == Approx(1.5).epsilon(1e-9));

    CHECK_THROWS_AS(ex::expected_exponential(3, 5.0), DivergenceError);
    CHECK_THROWS_AS(ex::expected_exponential(3, Rational(5)), DivergenceError);
    CHECK_THROWS_AS(ex::expected_exponential(3, -1.0), DomainError);
    CHECK_NOTHROW(ex::expected_exponential(3, 3.9)); // inside the radius at N = 3
}

TEST_CASE("hitting time distribution") {
    CHECK(ex::hitting_time_distribution(RingConfig(6, {4}), 3) ==
          std::vector<double>{1.0, 1.0, 1.0, 1.0});

    const auto cdf = ex::hitting_time_distribution(RingConfig(3, {1, 2, 3}), 12);
    for (int t = 0; t <= 12; ++t)
        CHECK(cdf[t] == Approx(1.0 - std::pow(0.25, t)).scale(1).epsilon(1e-12));

    CHECK(ex::hitting_time_distribution(RingConfig(7, {1, 3, 4}), 0) ==
          std::vector<double>{0.0});
}

TEST_CASE("distribution mass reproduces E(T)") {
    std::mt19937 rng(3);
    for (int n = 3; n <= 8; ++n) {
        const auto solve = ex::expected_hitting_time(n, ex::Mode::floating);
        const auto configs = ex::enumerate_configs(n, n % 2 == 1 ? n : n - 1);
        std::vector<RingConfig> sample{equidistant_config(n), configs[rng() % configs.size()]};
        for (const auto& config : sample) {
            const long horizon = ex::default_t_max(n);
            const auto cdf = ex::hitting_time_distribution(config, horizon);
            double expectation = 0.0;
            for (long t = 1; t <= horizon; ++t) expectation += t * (cdf[t] - cdf[t - 1]);
            CHECK(expectation == Approx(solve.value(config)).epsilon(1e-6));
        }
    }
}

TEST_CASE("tau functionals") {
    const auto absorbed = ex::expected_tau_functionals(RingConfig(9, {1, 4, 7}));
    CHECK(absorbed.expected_tau == 0.0);
    CHECK(absorbed.expected_psi_tau == Approx(psi_of_ring(RingConfig(9, {1, 4, 7}))));

    // the switch-point inequality E(psi(X_tau)) >= 4 eps E(tau) + psi(X_0),
    // exhaustive over every >= 5-token configuration at N = 5..7
    for (int n = 5; n <= 7; ++n) {
        const auto [tau, psi_tau] = ex::expected_tau_functionals_all(n);
        const double eps = protocol_epsilon(n);
        for (int k = 5; k <= n; k += 2) {
            for (const auto& config : ex::enumerate_configs(n, k)) {
                const double lhs = psi_tau.value(config);
                const double rhs = 4.0 * eps * tau.value(config) + psi_of_ring(config);
                CHECK(lhs >= rhs - 1e-9);
                CHECK(tau.value(config) > 0.0);
            }
        }
    }
}

TEST_CASE("argmax of E(T)") {
    auto sorted_gaps = [](const RingConfig& c) {
        const auto g = gaps(c);
        std::array<int, 3> a{g.a, g.b, g.c};
        std::sort(a.begin(), a.end());
        return a;
    };

    const auto m5 = ex::argmax_expected_T(5, ex::Mode::rational);
    CHECK(m5.max_exact == Rational(16, 5));
    for (const auto& c : m5.argmax) CHECK(sorted_gaps(c) == std::array<int, 3>{1, 2, 2});

    const auto m7 = ex::argmax_expected_T(7, ex::Mode::rational);
    CHECK(m7.max_exact == Rational(48, 7));
    for (const auto& c : m7.argmax) CHECK(sorted_gaps(c) == std::array<int, 3>{2, 2, 3});

    const auto m9 = ex::argmax_expected_T(9, ex::Mode::floating);
    CHECK(m9.max_value == Approx(12.0).epsilon(1e-12));
    CHECK(m9.argmax.size() == 3); // {1,4,7} and its two rotations
    for (const auto& c : m9.argmax) CHECK(sorted_gaps(c) == std::array<int, 3>{3, 3, 3});
}

TEST_CASE("capacity guards") {
    CHECK_THROWS_AS(ex::expected_hitting_time(40, ex::Mode::floating), CapacityError);
    CHECK_THROWS_AS(ex::expected_hitting_time(70, ex::Mode::floating), CapacityError);
}
