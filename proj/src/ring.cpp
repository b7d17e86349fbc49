#include "herman/ring.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace herman {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

/// Drop pairs of equal adjacent values from a sorted list (annihilation).
/// At most two tokens can coincide on a node, so pairwise removal is exact.
std::vector<int> annihilate_sorted(std::vector<int> v) {
    std::vector<int> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size();) {
        if (i + 1 < v.size() && v[i] == v[i + 1]) {
            i += 2;
        } else {
            out.push_back(v[i]);
            ++i;
        }
    }
    return out;
}

} // namespace

RingConfig::RingConfig(int n_nodes, std::vector<int> occupied) : n_(n_nodes), nodes_(std::move(occupied)) {
    require(n_ >= 1, "RingConfig: need at least one node");
    std::sort(nodes_.begin(), nodes_.end());
    require(!nodes_.empty() && nodes_.size() % 2 == 1, "RingConfig: token count must be odd and >= 1");
    require(static_cast<int>(nodes_.size()) <= n_, "RingConfig: more tokens than nodes");
    require(nodes_.front() >= 1 && nodes_.back() <= n_, "RingConfig: node index out of range");
    require(std::adjacent_find(nodes_.begin(), nodes_.end()) == nodes_.end(),
            "RingConfig: node indices must be distinct");
}

DoubledConfig::DoubledConfig(int n_nodes_doubled, std::vector<int> positions)
    : m_(n_nodes_doubled), pos_(std::move(positions)) {
    require(m_ >= 2 && m_ % 2 == 0, "DoubledConfig: node count must be even and >= 2");
    std::sort(pos_.begin(), pos_.end());
    require(!pos_.empty() && pos_.size() % 2 == 1, "DoubledConfig: token count must be odd and >= 1");
    require(pos_.front() >= 1 && pos_.back() <= m_, "DoubledConfig: position out of range");
    require(std::adjacent_find(pos_.begin(), pos_.end()) == pos_.end(),
            "DoubledConfig: positions must be strictly increasing");
    const int parity = pos_.front() & 1;
    for (int p : pos_) require((p & 1) == parity, "DoubledConfig: positions must share one parity");
}

GapTriple make_gap_triple(int a, int b, int c) {
    if (a < 1 || b < 1 || c < 1) throw DomainError("GapTriple: gaps must be >= 1");
    return GapTriple{a, b, c};
}

GapTriple gaps(const RingConfig& config) {
    if (config.token_count() != 3) throw DomainError("gaps: configuration must have exactly 3 tokens");
    const auto& p = config.occupied();
    const int n = config.n_nodes();
    return GapTriple{p[1] - p[0], p[2] - p[1], p[0] + n - p[2]};
}

RingConfig step_original(const RingConfig& config, MoveMask mask) {
    require(mask.count == config.token_count(), "step_original: mask length must equal token count");
    const int n = config.n_nodes();
    std::vector<int> next;
    next.reserve(config.token_count());
    int i = 0;
    for (int node : config.occupied()) {
        next.push_back(mask.moves(i) ? node % n + 1 : node);
        ++i;
    }
    std::sort(next.begin(), next.end());
    return RingConfig(n, annihilate_sorted(std::move(next)));
}

DoubledConfig step_symmetrized(const DoubledConfig& config, MoveMask mask) {
    require(mask.count == config.token_count(), "step_symmetrized: mask length must equal token count");
    const int m = config.n_nodes_doubled();
    std::vector<int> next;
    next.reserve(config.token_count());
    int i = 0;
    for (int pos : config.positions()) {
        const int d = mask.moves(i) ? 1 : -1;
        next.push_back((pos - 1 + d + m) % m + 1);
        ++i;
    }
    std::sort(next.begin(), next.end());
    return DoubledConfig(m, annihilate_sorted(std::move(next)));
}

DoubledConfig to_doubled(const RingConfig& config) {
    std::vector<int> pos;
    pos.reserve(config.token_count());
    for (int node : config.occupied()) pos.push_back(2 * node);
    return DoubledConfig(2 * config.n_nodes(), std::move(pos));
}

RingConfig from_doubled(const DoubledConfig& config) {
    if (config.parity() != 0)
        throw DomainError("from_doubled: odd-parity positions map to half-integer nodes");
    std::vector<int> nodes;
    nodes.reserve(config.token_count());
    for (int pos : config.positions()) nodes.push_back(pos / 2);
    return RingConfig(config.n_nodes_doubled() / 2, std::move(nodes));
}

RingConfig equidistant_config(int n_nodes) {
    if (n_nodes < 3) throw DomainError("equidistant_config: need N >= 3");
    const int q = n_nodes / 3;
    const int r = n_nodes % 3;
    // gaps ascending: (q,q,q), (q,q,q+1) or (q,q+1,q+1)
    const int g1 = q;
    const int g2 = r == 2 ? q + 1 : q;
    return RingConfig(n_nodes, {1, 1 + g1, 1 + g1 + g2});
}

RingConfig rotated(const RingConfig& config, int shift) {
    const int n = config.n_nodes();
    std::vector<int> nodes;
    nodes.reserve(config.token_count());
    for (int node : config.occupied()) nodes.push_back(((node - 1 + shift) % n + n) % n + 1);
    return RingConfig(n, std::move(nodes));
}

DoubledConfig rotated(const DoubledConfig& config, int shift) {
    const int m = config.n_nodes_doubled();
    std::vector<int> pos;
    pos.reserve(config.token_count());
    for (int p : config.positions()) pos.push_back(((p - 1 + shift) % m + m) % m + 1);
    return DoubledConfig(m, std::move(pos));
}

std::uint64_t occupancy_word(const RingConfig& config) {
    if (config.n_nodes() > 64) throw CapacityError("occupancy_word: word kernels require N <= 64");
    std::uint64_t word = 0;
    for (int node : config.occupied()) word |= std::uint64_t{1} << (node - 1);
    return word;
}

RingConfig ring_config_from_word(int n_nodes, std::uint64_t word) {
    if (n_nodes > 64) throw CapacityError("ring_config_from_word: word kernels require N <= 64");
    std::vector<int> nodes;
    nodes.reserve(std::popcount(word));
    for (int bit = 0; bit < n_nodes; ++bit)
        if ((word >> bit) & 1u) nodes.push_back(bit + 1);
    return RingConfig(n_nodes, std::move(nodes));
}

} // namespace herman
