#include "herman/kernels.hpp"

#include <atomic>
#include <bit>

#include "herman/errors.hpp"

namespace herman::kernels {

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "?";
}

Isa detect_best_isa() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
    return Isa::scalar;
}

namespace {
std::atomic<Isa>& isa_slot() {
    static std::atomic<Isa> slot{detect_best_isa()};
    return slot;
}
} // namespace

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (isa == Isa::avx2 && detect_best_isa() != Isa::avx2)
        throw DomainError("set_isa: this CPU does not support avx2");
    isa_slot().store(isa, std::memory_order_relaxed);
}

void step_batch_scalar(std::span<u64> occupancy, std::span<const u64> coins, int n_nodes) {
    for (std::size_t i = 0; i < occupancy.size(); ++i)
        occupancy[i] = step_bits(occupancy[i], coins[i], n_nodes);
}

void simulate_runs_scalar(u64 occupancy, int n_nodes, u64 master_seed, u64 first_run,
                          u32 t_cap, std::span<u32> t_out) {
    for (std::size_t i = 0; i < t_out.size(); ++i) {
        const u64 key = run_key(master_seed, first_run + i);
        u64 occ = occupancy;
        u32 t = 0;
        while (std::popcount(occ) > 1 && t < t_cap) {
            occ = step_bits(occ, coin_word(key, t), n_nodes);
            ++t;
        }
        t_out[i] = std::popcount(occ) == 1 ? t : kCensored;
    }
}

void step_batch(std::span<u64> occupancy, std::span<const u64> coins, int n_nodes) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_isa() == Isa::avx2) {
        step_batch_avx2(occupancy, coins, n_nodes);
        return;
    }
#endif
    step_batch_scalar(occupancy, coins, n_nodes);
}

void simulate_runs(u64 occupancy, int n_nodes, u64 master_seed, u64 first_run,
                   u32 t_cap, std::span<u32> t_out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_isa() == Isa::avx2) {
        simulate_runs_avx2(occupancy, n_nodes, master_seed, first_run, t_cap, t_out);
        return;
    }
#endif
    simulate_runs_scalar(occupancy, n_nodes, master_seed, first_run, t_cap, t_out);
}

} // namespace herman::kernels
