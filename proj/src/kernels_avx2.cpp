// AVX2 variants of the ring-step kernels: four independent rings per vector.
// Bit-identical to the scalar reference — the coin stream is a pure function
// of (seed, run, step), so lanes never interact.
//
// This translation unit is compiled with -mavx2 and must only be entered
// through the runtime dispatcher.

#include "herman/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>

namespace herman::kernels {

namespace {

/// 64-bit low multiply from 32-bit halves (AVX2 has no _mm256_mullo_epi64).
inline __m256i mullo64(__m256i a, __m256i b) {
    const __m256i lo = _mm256_mul_epu32(a, b);
    const __m256i a_hi = _mm256_srli_epi64(a, 32);
    const __m256i b_hi = _mm256_srli_epi64(b, 32);
    const __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(a_hi, b), _mm256_mul_epu32(a, b_hi));
    return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64_vec(__m256i z) {
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
    z = mullo64(z, _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull)));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
    z = mullo64(z, _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull)));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
    return z;
}

/// Per-64-bit-lane popcount via the nibble LUT + psadbw reduction.
inline __m256i popcount64_vec(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low = _mm256_set1_epi8(0x0F);
    const __m256i lo = _mm256_and_si256(v, low);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
    const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

inline __m256i step_bits_vec(__m256i occ, __m256i coins, int n_nodes, __m256i ring) {
    const __m256i movers = _mm256_and_si256(occ, coins);
    __m256i moved;
    if (n_nodes == 1) {
        moved = movers;
    } else {
        moved = _mm256_or_si256(_mm256_slli_epi64(movers, 1), _mm256_srli_epi64(movers, n_nodes - 1));
        moved = _mm256_and_si256(moved, ring);
    }
    return _mm256_xor_si256(_mm256_andnot_si256(coins, occ), moved);
}

} // namespace

void step_batch_avx2(std::span<u64> occupancy, std::span<const u64> coins, int n_nodes) {
    const __m256i ring = _mm256_set1_epi64x(static_cast<long long>(ring_mask(n_nodes)));
    std::size_t i = 0;
    for (; i + 4 <= occupancy.size(); i += 4) {
        const __m256i occ = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&occupancy[i]));
        const __m256i cns = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&coins[i]));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(&occupancy[i]),
                            step_bits_vec(occ, cns, n_nodes, ring));
    }
    for (; i < occupancy.size(); ++i)
        occupancy[i] = step_bits(occupancy[i], coins[i], n_nodes);
}

void simulate_runs_avx2(u64 occupancy, int n_nodes, u64 master_seed, u64 first_run,
                        u32 t_cap, std::span<u32> t_out) {
    const __m256i ring = _mm256_set1_epi64x(static_cast<long long>(ring_mask(n_nodes)));
    const __m256i one = _mm256_set1_epi64x(1);

    std::size_t i = 0;
    for (; i + 4 <= t_out.size(); i += 4) {
        alignas(32) u64 keys[4];
        for (int lane = 0; lane < 4; ++lane) keys[lane] = run_key(master_seed, first_run + i + lane);
        const __m256i key = _mm256_load_si256(reinterpret_cast<const __m256i*>(keys));

        __m256i occ = _mm256_set1_epi64x(static_cast<long long>(occupancy));
        __m256i done = _mm256_cmpeq_epi64(popcount64_vec(occ), one);
        __m256i t_abs = _mm256_setzero_si256();

        // Absorbed lanes keep stepping harmlessly (a one-token word only
        // rotates); their absorption time is latched in t_abs.
        for (u32 t = 0; t < t_cap; ++t) {
            if (_mm256_movemask_epi8(done) == -1) break;
            const __m256i ctr = _mm256_add_epi64(
                key, _mm256_set1_epi64x(static_cast<long long>(kGolden * (static_cast<u64>(t) + 1))));
            occ = step_bits_vec(occ, mix64_vec(ctr), n_nodes, ring);
            const __m256i is_one = _mm256_cmpeq_epi64(popcount64_vec(occ), one);
            const __m256i newly = _mm256_andnot_si256(done, is_one);
            t_abs = _mm256_blendv_epi8(t_abs, _mm256_set1_epi64x(static_cast<long long>(t) + 1), newly);
            done = _mm256_or_si256(done, newly);
        }

        alignas(32) u64 times[4];
        alignas(32) u64 flags[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(times), t_abs);
        _mm256_store_si256(reinterpret_cast<__m256i*>(flags), done);
        for (int lane = 0; lane < 4; ++lane)
            t_out[i + lane] = flags[lane] ? static_cast<u32>(times[lane]) : kCensored;
    }
    if (i < t_out.size())
        simulate_runs_scalar(occupancy, n_nodes, master_seed, first_run + i, t_cap, t_out.subspan(i));
}

} // namespace herman::kernels

#endif // x86_64
