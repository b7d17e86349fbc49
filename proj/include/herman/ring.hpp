#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "herman/errors.hpp"

namespace herman {

// ---------------------------------------------------------------------------
// Configurations of the token ring, in two coordinate systems:
//
//  * RingConfig    — the protocol's own view: N nodes numbered 1..N, a token
//                    on an odd number of distinct nodes. Each step, every
//                    token stays or advances clockwise (node k -> k%N+1);
//                    two tokens meeting on a node annihilate.
//  * DoubledConfig — the symmetrized view on 2N nodes: every token moves
//                    +1 or -1 each step, so all positions share one parity
//                    and the parity flips on every step.
//
// Both are immutable values; all operations below are pure functions.
// ---------------------------------------------------------------------------

/// Per-token move decisions, one bit per token in ascending-position order
/// (up to 64 tokens). Bit set = advance clockwise (+1 on the doubled ring),
/// clear = stay (-1).
struct MoveMask {
    std::uint64_t bits = 0;
    int count = 0;

    static MoveMask all_stay(int token_count) { return from_bits(0, token_count); }
    static MoveMask all_move(int token_count) {
        return from_bits(token_count >= 64 ? ~std::uint64_t{0}
                                           : ((std::uint64_t{1} << token_count) - 1),
                         token_count);
    }
    static MoveMask from_bits(std::uint64_t bits, int token_count) {
        if (token_count < 0 || token_count > 64)
            throw DomainError("MoveMask: supports up to 64 tokens");
        return {bits, token_count};
    }

    bool moves(int token_index) const { return (bits >> token_index) & 1u; }
};

class RingConfig {
public:
    /// Validates: 1 <= N, token count odd and <= N, nodes distinct in 1..N.
    RingConfig(int n_nodes, std::vector<int> occupied);

    int n_nodes() const { return n_; }
    int token_count() const { return static_cast<int>(nodes_.size()); }
    /// Occupied nodes, ascending, 1-based.
    const std::vector<int>& occupied() const { return nodes_; }

    friend bool operator==(const RingConfig&, const RingConfig&) = default;

private:
    int n_;
    std::vector<int> nodes_;
};

class DoubledConfig {
public:
    /// Validates: even node count >= 2, odd token count, positions strictly
    /// increasing in 1..2N and all congruent mod 2.
    DoubledConfig(int n_nodes_doubled, std::vector<int> positions);

    int n_nodes_doubled() const { return m_; }
    int token_count() const { return static_cast<int>(pos_.size()); }
    const std::vector<int>& positions() const { return pos_; }
    /// Common parity of all positions: positions ≡ parity (mod 2).
    int parity() const { return pos_.front() & 1; }

    friend bool operator==(const DoubledConfig&, const DoubledConfig&) = default;

private:
    int m_;
    std::vector<int> pos_;
};

/// The three inter-token arc lengths of a 3-token state, in original-node
/// units, listed in circular order from the lowest-indexed token. a+b+c = N.
struct GapTriple {
    int a = 0;
    int b = 0;
    int c = 0;

    int n_nodes() const { return a + b + c; }
    friend bool operator==(const GapTriple&, const GapTriple&) = default;
};

/// Validated construction: all gaps >= 1.
GapTriple make_gap_triple(int a, int b, int c);

// --- operations ------------------------------------------------------------

/// Gap triple of a 3-token configuration. DomainError if token count != 3.
GapTriple gaps(const RingConfig& config);

/// One protocol step: masked tokens advance one node clockwise, the rest
/// stay; a node holding two tokens afterwards loses both.
RingConfig step_original(const RingConfig& config, MoveMask mask);

/// One symmetrized step: masked tokens move +1, the rest -1, mod 2N;
/// coinciding tokens annihilate pairwise. Output parity is flipped.
DoubledConfig step_symmetrized(const DoubledConfig& config, MoveMask mask);

/// Viewpoint change: node k of the original ring becomes node 2k of the
/// doubled ring (even parity). Round trip is the identity.
DoubledConfig to_doubled(const RingConfig& config);

/// Inverse of to_doubled; defined only on even-parity configs (odd parity
/// would map to half-integer original nodes). DomainError otherwise.
RingConfig from_doubled(const DoubledConfig& config);

/// The 3-token configuration whose gaps are the nearest integers to N/3
/// summing to N, anchored at node 1. DomainError if N < 3.
RingConfig equidistant_config(int n_nodes);

/// All tokens shifted by `shift` nodes clockwise (any sign).
RingConfig rotated(const RingConfig& config, int shift);
DoubledConfig rotated(const DoubledConfig& config, int shift);

// --- bitmask bridge (N <= 64) ------------------------------------------------

/// Occupancy word: bit k-1 set iff node k holds a token. CapacityError if N > 64.
std::uint64_t occupancy_word(const RingConfig& config);
RingConfig ring_config_from_word(int n_nodes, std::uint64_t word);

} // namespace herman
