#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herman/kernels.hpp"
#include "herman/ring.hpp"

namespace herman::mc {

using kernels::kCensored;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

// Seeded simulation for N beyond exact reach (N <= 64). Runs are keyed by
// (master seed, run index) so estimates are bit-identical regardless of
// thread count, batching, or kernel ISA.

struct FunctionalSpec {
    enum class Kind { hitting_time, exponential };
    Kind kind = Kind::hitting_time;
    double base = 0; // for exponential: E(base^T)

    std::string tag() const;
};

struct SimPlan {
    RingConfig initial;
    long runs = 1;
    u64 seed = 0;
    std::vector<FunctionalSpec> functionals;
    std::optional<u32> t_cap; // default: 40 * N^2
};

struct Estimate {
    std::string functional;
    double mean = 0;
    double variance = 0;  // unbiased sample variance
    double std_error = 0; // sqrt(variance / runs_used)
    long runs = 0;        // runs contributing (censored runs excluded)
    long censored = 0;
    u64 seed = 0;
};

u32 default_t_cap(int n_nodes);

/// One exact sample of T, or kCensored if the run exceeds t_cap.
u32 simulate_T(const RingConfig& config, u64 master_seed, u64 run_index, u32 t_cap);

/// All requested functionals from one simulated sample set. Reduction is a
/// fixed pairwise tree, so results do not depend on the thread count
/// (threads = 0 picks the hardware default). DomainError if every run is
/// censored.
std::vector<Estimate> estimate(const SimPlan& plan, int threads = 0);

} // namespace herman::mc
