#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "herman/lemma_lab.hpp"
#include "herman/potentials.hpp"

using namespace herman;
using doctest::Approx;
namespace lab = herman::lemmas;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kThird = 1.0 / 3.0;
} // namespace

TEST_CASE("q_value singularities and domain") {
    CHECK(lab::q_value(0.0, 0.0).singular);
    CHECK(lab::q_value(-kThird, -kThird).singular);
    CHECK_FALSE(lab::q_value(0.1, 0.1).singular);
    CHECK_THROWS_AS(lab::q_value(0.4, 0.4), DomainError);  // u+v > 1/3
    CHECK_THROWS_AS(lab::q_value(-0.5, 0.0), DomainError); // u < -1/3

    // the cubic numerator equals 1 at the flagged corner
    const double u = -kThird, v = -kThird;
    const double num = 4.5 * (u * u + v * v + (u + v) * (u + v)) + 27.0 * (u * u * v + u * v * v);
    CHECK(num == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("q_value line limit toward the origin") {
    // along u = v the ratio tends to 9/pi^2
    const double limit = 9.0 / (kPi * kPi);
    CHECK(lab::q_value(1e-4, 1e-4).value == Approx(limit).epsilon(1e-3));
    CHECK(lab::q_value(1e-5, 1e-5).value == Approx(limit).epsilon(1e-4));
    CHECK(lab::q_value(-1e-5, -1e-5).value == Approx(limit).epsilon(1e-4));
    // on the c = 0 edge both numerator and denominator collapse to 1
    CHECK(lab::q_value(0.2, kThird - 0.2).value == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("factored f and g") {
    CHECK(lab::factor_f(2.0 / 3.0) == Approx(27.0 / 8.0).epsilon(1e-13));
    CHECK(lab::factor_g(2.0 / 3.0) == Approx(3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-13));
    CHECK(lab::factor_f(1e-9) == Approx(kPi * kPi / 2.0).epsilon(1e-13));
    CHECK(lab::factor_g(1e-9) == Approx(kPi).epsilon(1e-13));
    CHECK(lab::factor_f(-0.25) == lab::factor_f(0.25)); // even
    CHECK(lab::factor_g(-0.25) == lab::factor_g(0.25));

    // series and direct evaluation meet smoothly at the switchover; the direct
    // form itself carries ~1e-8 relative cancellation noise this close to zero
    for (double x : {0.99e-4, 1.01e-4}) {
        CHECK(lab::factor_f(x) == Approx((1.0 - std::cos(kPi * x)) / (x * x)).epsilon(1e-7));
        CHECK(lab::factor_g(x) == Approx(std::sin(kPi * x) / x).epsilon(1e-10));
    }
    CHECK(std::abs(lab::factor_f(0.99e-4) - lab::factor_f(1.01e-4)) < 1e-8);
    CHECK(std::abs(lab::factor_g(0.99e-4) - lab::factor_g(1.01e-4)) < 1e-8);
}

TEST_CASE("fg ranges") {
    const auto r = lab::fg_range_check(5000);
    CHECK(r.pass);
    CHECK(r.f_min == Approx(27.0 / 8.0).epsilon(1e-9));
    CHECK(r.f_max <= kPi * kPi / 2.0 + 1e-12);
    CHECK(r.g_min == Approx(3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-9));
    CHECK(r.g_max <= kPi + 1e-12);
    CHECK_THROWS_AS(lab::fg_range_check(100), DomainError);
}

TEST_CASE("Q is symmetric and positive on the domain") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coord(-kThird, 2.0 * kThird);
    int tried = 0;
    while (tried < 2000) {
        const double u = coord(rng);
        const double v = coord(rng);
        if (!lab::q_in_domain(u, v)) continue;
        ++tried;
        const auto quv = lab::q_value(u, v);
        const auto qvu = lab::q_value(v, u);
        if (quv.singular) continue;
        CHECK(quv.value == Approx(qvu.value).epsilon(1e-12));
        CHECK(quv.value > 0.0);
    }
}

TEST_CASE("discrete ratio equals Q at the gap coordinates") {
    for (int n : {5, 9, 16, 31, 40}) {
        for (int a = 1; a <= n - 2; ++a) {
            for (int b = 1; a + b <= n - 1; ++b) {
                const int c = n - a - b;
                const RingConfig config(n, {1, 1 + a, 1 + a + b});
                const double psi_v = psi_of_ring(config);
                if (psi_v < 1e-14) continue;
                const double ratio = phi({a, b, c}) / psi_v;
                const auto q = lab::q_value(static_cast<double>(a) / n - kThird,
                                            static_cast<double>(b) / n - kThird);
                REQUIRE_FALSE(q.singular);
                CHECK(ratio == Approx(q.value).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("grid scan") {
    const auto scan = lab::q_grid_min(1.0 / 240.0, 0.03, 0.03);
    CHECK(scan.points > 20000);
    CHECK(scan.min_value >= lab::ratio_lower_bound());
    CHECK(scan.min_value < 1.0);
    CHECK(lab::q_in_domain(scan.argmin_u, scan.argmin_v));
    CHECK(scan.max_gradient > 0.0);

    // refinement stability
    const auto finer = lab::q_grid_min(1.0 / 480.0, 0.03, 0.03);
    CHECK(std::abs(finer.min_value - scan.min_value) < 1e-3);

    // shrinking the origin exclusion to one lattice cell keeps the minimum
    // in the 9/pi^2 neighborhood, still above the constant
    const auto tight = lab::q_grid_min(1.0 / 240.0, 1.0 / 240.0, 0.03);
    CHECK(tight.min_value >= lab::ratio_lower_bound());
    CHECK(tight.min_value < 0.92);

    CHECK_THROWS_AS(lab::q_grid_min(0.0, 0.03, 0.03), DomainError);
}

TEST_CASE("discrete ratio scan") {
    const auto scan = lab::phi_psi_ratio_scan(3, 60);
    CHECK(scan.min_ratio >= lab::ratio_lower_bound());
    CHECK(scan.skipped_zero_psi > 0);
    // the argmin sits where the gaps flatten, consistent with Q there
    const auto g = scan.argmin_gaps;
    const int an = scan.argmin_n;
    CHECK(scan.min_ratio ==
          doctest::Approx(lab::q_value(static_cast<double>(g.a) / an - kThird,
                                       static_cast<double>(g.b) / an - kThird)
                              .value)
              .epsilon(1e-9));

    // re-derive the N = 5 minimum directly
    const auto n5 = lab::phi_psi_ratio_scan(5, 5);
    double expect = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; a + b <= 4; ++b)
            expect = std::min(expect, phi({a, b, 5 - a - b}) /
                                          psi_of_ring(RingConfig(5, {1, 1 + a, 1 + a + b})));
    CHECK(n5.min_ratio == Approx(expect).epsilon(1e-15));
    CHECK(n5.min_ratio >= lab::ratio_lower_bound());

    CHECK_THROWS_AS(lab::phi_psi_ratio_scan(2, 10), DomainError);
    CHECK_THROWS_AS(lab::phi_psi_ratio_scan(10, 9), DomainError);
}
