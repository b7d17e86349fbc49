#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "herman/rational.hpp"
#include "herman/ring.hpp"

namespace herman::exact {

// ---------------------------------------------------------------------------
// Exact hitting-time functionals at small N.
//
// The token count never increases, so the configuration space stratifies
// into levels k = 1, 3, 5, ... Each functional is obtained by solving one
// dense linear system per level, in increasing k, with the already-solved
// lower levels feeding the right-hand side. Two arithmetic modes:
//
//   rational — GMP rationals, plain Gaussian elimination, exact results;
//   floating — doubles, Eigen partial-pivot LU, reproducible direct solves.
// ---------------------------------------------------------------------------

enum class Mode { rational, floating };

/// All C(n,k) configurations with k tokens on n nodes, ascending occupancy
/// word order. CapacityError when C(n,k) exceeds the build's limits.
std::vector<RingConfig> enumerate_configs(int n_nodes, int k);

/// Per-configuration values of one functional at fixed N, every odd token
/// count. Entries ordered by (token count, occupancy word).
struct SolveResult {
    std::string functional;
    Mode mode = Mode::floating;
    int n_nodes = 0;

    struct Entry {
        std::uint64_t word; // occupancy word of the configuration
        int token_count;
        double value;
    };
    std::vector<Entry> entries;
    /// Parallel to `entries` in rational mode; empty in floating mode.
    std::vector<Rational> exact_values;

    double value(const RingConfig& config) const;
    const Rational& exact_value(const RingConfig& config) const;
    std::size_t index_of(std::uint64_t word) const; // throws DomainError if absent
};

/// E(T): expected number of steps to reach a one-token state. Zero on
/// one-token configurations. max_token_count = 0 solves every level;
/// a positive odd value stops the sweep there (lower levels never depend
/// on higher ones, so a partial solve is still exact).
SolveResult expected_hitting_time(int n_nodes, Mode mode, int max_token_count = 0);

/// E(a^T) with real base a > 0 (floating mode). DivergenceError if a level
/// solve produces a negative or non-finite value (base outside the
/// convergence region).
SolveResult expected_exponential(int n_nodes, double base);
/// E(a^T) with exact rational base (rational mode), e.g. 4/3 at N = 3.
SolveResult expected_exponential(int n_nodes, const Rational& base);

/// P(T <= t) for t = 0..t_max, by forward iteration of the exact
/// distribution over configurations. Nondecreasing, -> 1.
std::vector<double> hitting_time_distribution(const RingConfig& config, long t_max);

/// Default distribution horizon: ceil(40 * N^2).
long default_t_max(int n_nodes);

/// Functionals of tau = first time the token count drops to <= 3 (the
/// potential switch point; a 5-token state can annihilate two pairs at once
/// and land directly on one token, which also ends tau).
///   expected_tau:     E(tau), zero on configs with <= 3 tokens.
///   expected_psi_tau: E(psi(X_tau)) with boundary psi on the absorbed state.
struct TauFunctionals {
    double expected_tau;
    double expected_psi_tau;
};
TauFunctionals expected_tau_functionals(const RingConfig& config);
/// Both tau functionals for every config at fixed N (one level sweep).
std::pair<SolveResult, SolveResult> expected_tau_functionals_all(int n_nodes);

/// All maximizers of E(T) over every odd-count configuration.
struct ArgmaxResult {
    Mode mode;
    double max_value = 0;
    Rational max_exact;                 // rational mode only
    std::vector<RingConfig> argmax;     // ties within 1e-9 in floating mode
};
ArgmaxResult argmax_expected_T(int n_nodes, Mode mode);

} // namespace herman::exact
