#pragma once

#include <cstdint>
#include <span>

namespace herman::kernels {

// ===========================================================================
// Bit-parallel protocol step
//
// A ring of N <= 64 nodes lives in one word: bit i = node i+1. One step of
// the whole ring is three bitwise ops plus a rotate:
//
//     movers = occ & coins
//     next   = (occ & ~coins) ^ rotl_ring(movers)
//
// XOR implements annihilation: a node can be targeted by at most one stayer
// and one mover, so a doubly-hit node cancels to zero.
//
// The scalar versions are the reference; the AVX2 variants below run several
// independent rings per vector and are selected at runtime. All variants are
// bit-identical by contract (equivalence-tested).
// ===========================================================================

using u32 = std::uint32_t;
using u64 = std::uint64_t;

constexpr u64 ring_mask(int n_nodes) {
    return n_nodes >= 64 ? ~u64{0} : ((u64{1} << n_nodes) - 1);
}

/// One step of an N-bit ring. Coins bits outside the occupancy are ignored.
constexpr u64 step_bits(u64 occupancy, u64 coins, int n_nodes) {
    const u64 movers = occupancy & coins;
    const u64 moved = n_nodes == 1 ? movers
                                   : (((movers << 1) | (movers >> (n_nodes - 1))) & ring_mask(n_nodes));
    return (occupancy & ~coins) ^ moved;
}

// --- counter-based coin stream ---------------------------------------------
//
// One fresh 64-bit word per (master seed, run, step), from nested SplitMix64
// finalizers. Pure function of the counter triple, so replay is exact and
// results do not depend on scheduling or batch shape.

constexpr u64 kGolden = 0x9E3779B97F4A7C15ull;

constexpr u64 mix64(u64 z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Per-run substream key.
constexpr u64 run_key(u64 master_seed, u64 run_index) {
    return mix64(master_seed + kGolden * (run_index + 1));
}

/// Coins for the step t -> t+1 of one run.
constexpr u64 coin_word(u64 key, u64 step_index) {
    return mix64(key + kGolden * (step_index + 1));
}

// --- runtime ISA selection ---------------------------------------------------

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
/// Best ISA this CPU supports.
Isa detect_best_isa();
/// Currently selected ISA (defaults to detect_best_isa() on first use).
Isa active_isa();
/// Force a specific ISA; DomainError if the CPU does not support it.
void set_isa(Isa isa);

// --- batch kernels -----------------------------------------------------------

/// In-place step of many independent rings sharing one N.
void step_batch(std::span<u64> occupancy, std::span<const u64> coins, int n_nodes);
void step_batch_scalar(std::span<u64> occupancy, std::span<const u64> coins, int n_nodes);

/// Sentinel for runs still unabsorbed at the step cap.
inline constexpr u32 kCensored = 0xFFFFFFFFu;

/// Simulate runs [first_run, first_run + t_out.size()) from the same initial
/// occupancy until one token remains, writing the absorption time of each run
/// (or kCensored if it exceeds t_cap). Outputs are bit-identical across ISAs.
void simulate_runs(u64 occupancy, int n_nodes, u64 master_seed, u64 first_run,
                   u32 t_cap, std::span<u32> t_out);
void simulate_runs_scalar(u64 occupancy, int n_nodes, u64 master_seed, u64 first_run,
                          u32 t_cap, std::span<u32> t_out);

#if defined(__x86_64__) || defined(_M_X64)
void step_batch_avx2(std::span<u64> occupancy, std::span<const u64> coins, int n_nodes);
void simulate_runs_avx2(u64 occupancy, int n_nodes, u64 master_seed, u64 first_run,
                        u32 t_cap, std::span<u32> t_out);
#endif

} // namespace herman::kernels
