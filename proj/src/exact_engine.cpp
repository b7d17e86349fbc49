#include "herman/exact_engine.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "herman/errors.hpp"
#include "herman/kernels.hpp"
#include "herman/potentials.hpp"

namespace herman::exact {

namespace {

using u64 = std::uint64_t;

// Sizing: dense per-level solves and enumerable transition fan-out.
constexpr long kMaxConfigsPerLevel = 20'000; // ~N <= 15 for the widest level
constexpr long kMaxTransitions = 9'000'000;  // sum_k C(N,k) 2^k = (3^N + 1)/2

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long r = 1;
    for (int i = 1; i <= k; ++i) {
        if (r > (1L << 45)) return 1L << 60; // saturate before the multiply can wrap
        r = r * (n - k + i) / i;
    }
    return r;
}

long transition_budget(int n) {
    long total = 0;
    for (int k = 3; k <= n; k += 2) {
        const long level = binom(n, k);
        if (level > kMaxConfigsPerLevel) return -1;
        if (k > 30 || (level << k) > kMaxTransitions) return -1;
        total += level << k;
        if (total > kMaxTransitions) return -1;
    }
    return total;
}

/// Ascending k-subset words of n bits (Gosper's hack).
std::vector<u64> enumerate_words(int n, int k) {
    std::vector<u64> words;
    words.reserve(binom(n, k));
    if (k == 0 || k > n) return words;
    u64 w = (u64{1} << k) - 1;
    const u64 limit = kernels::ring_mask(n);
    while (true) {
        words.push_back(w);
        if (k == n) break;
        const u64 low = w & (~w + 1);
        const u64 ripple = w + low;
        if (ripple < w || ripple > limit) break; // wrapped past the top bit, or done
        w = ripple | (((w ^ ripple) >> 2) / low);
    }
    return words;
}

/// Coins word with the mask's bits scattered onto the occupied positions
/// (token order = ascending node index).
u64 scatter_coins(u64 occupancy, std::uint32_t mask) {
    u64 coins = 0;
    int token = 0;
    for (u64 bits = occupancy; bits; bits &= bits - 1, ++token)
        if ((mask >> token) & 1u) coins |= bits & (~bits + 1);
    return coins;
}

struct Level {
    int k = 0;
    std::vector<u64> words; // ascending
    // merged successor list per state: (successor word, number of coin masks)
    std::vector<std::vector<std::pair<u64, int>>> rows;

    int index_of(u64 word) const {
        const auto it = std::lower_bound(words.begin(), words.end(), word);
        return static_cast<int>(it - words.begin());
    }
};

Level build_level(int n, int k, bool with_rows) {
    Level level;
    level.k = k;
    level.words = enumerate_words(n, k);
    if (!with_rows) return level;
    level.rows.resize(level.words.size());
    const std::uint32_t n_masks = 1u << k;
    std::vector<u64> succ;
    for (std::size_t i = 0; i < level.words.size(); ++i) {
        succ.clear();
        for (std::uint32_t mask = 0; mask < n_masks; ++mask)
            succ.push_back(kernels::step_bits(level.words[i], scatter_coins(level.words[i], mask), n));
        std::sort(succ.begin(), succ.end());
        auto& row = level.rows[i];
        long check = 0;
        for (std::size_t j = 0; j < succ.size();) {
            std::size_t j2 = j;
            while (j2 < succ.size() && succ[j2] == succ[j]) ++j2;
            row.emplace_back(succ[j], static_cast<int>(j2 - j));
            check += static_cast<long>(j2 - j);
            j = j2;
        }
        if (check != static_cast<long>(n_masks))
            throw std::logic_error("exact_engine: transition row does not sum to one");
    }
    return level;
}

void require_feasible(int n) {
    if (n < 1) throw DomainError("exact_engine: N must be >= 1");
    if (n > 64) throw CapacityError("exact_engine: word representation requires N <= 64");
    if (transition_budget(n) < 0)
        throw CapacityError("exact_engine: state space too large at N = " + std::to_string(n));
}

// --- dense solvers -----------------------------------------------------------

std::vector<double> solve_dense_double(Eigen::MatrixXd& m, Eigen::VectorXd& rhs) {
    const Eigen::VectorXd x = m.partialPivLu().solve(rhs);
    return {x.data(), x.data() + x.size()};
}

std::vector<Rational> solve_dense_rational(std::vector<std::vector<Rational>> m, std::vector<Rational> b) {
    const int n = static_cast<int>(m.size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::logic_error("exact_engine: singular level system");
        std::swap(m[piv], m[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            const Rational f = m[r][col] / m[col][col];
            for (int c = col + 1; c < n; ++c)
                if (m[col][c] != 0) m[r][c] -= f * m[col][c];
            m[r][col] = 0;
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (int r = n - 1; r >= 0; --r) {
        Rational s = b[r];
        for (int c = r + 1; c < n; ++c)
            if (m[r][c] != 0) s -= m[r][c] * x[c];
        x[r] = s / m[r][r];
    }
    return x;
}

// --- generic level sweep -------------------------------------------------------
//
// Every functional below is of the shape
//     v(x) = add(x) + coeff * sum_y P(x -> y) v(y)
// on transient states, with known boundary values on absorbed states,
// solved level by level.

struct FloatSweep {
    double coeff = 1.0;
    double add = 0.0;
    int absorb_below = 3; // states with token count < absorb_below are boundary
    std::function<double(u64)> boundary;

    std::unordered_map<u64, double> solved;

    void run_level(const Level& level) {
        const int size = static_cast<int>(level.words.size());
        const double p_unit = std::ldexp(1.0, -level.k); // 1 / 2^k
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(size, size);
        Eigen::VectorXd rhs = Eigen::VectorXd::Constant(size, add);
        for (int i = 0; i < size; ++i) {
            for (const auto& [succ, mult] : level.rows[i]) {
                const double p = coeff * mult * p_unit;
                if (std::popcount(succ) == level.k) {
                    m(i, level.index_of(succ)) -= p;
                } else if (std::popcount(succ) < absorb_below) {
                    rhs(i) += p * boundary(succ);
                } else {
                    rhs(i) += p * solved.at(succ);
                }
            }
        }
        const std::vector<double> x = solve_dense_double(m, rhs);
        for (int i = 0; i < size; ++i) solved.emplace(level.words[i], x[i]);
    }
};

struct RationalSweep {
    Rational coeff = 1;
    Rational add = 0;
    int absorb_below = 3;
    std::function<Rational(u64)> boundary;

    std::unordered_map<u64, Rational> solved;

    void run_level(const Level& level) {
        const int size = static_cast<int>(level.words.size());
        Rational p_unit(1, 1L << level.k);
        p_unit.canonicalize();
        std::vector<std::vector<Rational>> m(size, std::vector<Rational>(size, Rational(0)));
        std::vector<Rational> rhs(size, add);
        for (int i = 0; i < size; ++i) {
            m[i][i] = 1;
            for (const auto& [succ, mult] : level.rows[i]) {
                const Rational p = coeff * mult * p_unit;
                if (std::popcount(succ) == level.k) {
                    m[i][level.index_of(succ)] -= p;
                } else if (std::popcount(succ) < absorb_below) {
                    rhs[i] += p * boundary(succ);
                } else {
                    rhs[i] += p * solved.at(succ);
                }
            }
        }
        std::vector<Rational> x = solve_dense_rational(std::move(m), std::move(rhs));
        for (int i = 0; i < size; ++i) solved.emplace(level.words[i], std::move(x[i]));
    }
};

void push_entries(SolveResult& result, int k, const std::vector<u64>& words,
                  const std::function<double(u64)>& value,
                  const std::function<Rational(u64)>* exact) {
    for (u64 w : words) {
        result.entries.push_back({w, k, value(w)});
        if (exact) result.exact_values.push_back((*exact)(w));
    }
}

} // namespace

std::vector<RingConfig> enumerate_configs(int n_nodes, int k) {
    if (k < 1 || k % 2 == 0) throw DomainError("enumerate_configs: token count must be odd and >= 1");
    if (k > n_nodes) throw DomainError("enumerate_configs: more tokens than nodes");
    if (n_nodes > 64) throw CapacityError("enumerate_configs: N <= 64 required");
    if (binom(n_nodes, k) > 2'000'000) throw CapacityError("enumerate_configs: C(N,k) too large");
    std::vector<RingConfig> configs;
    for (u64 w : enumerate_words(n_nodes, k)) configs.push_back(ring_config_from_word(n_nodes, w));
    return configs;
}

long default_t_max(int n_nodes) { return 40L * n_nodes * n_nodes; }

double SolveResult::value(const RingConfig& config) const {
    return entries[index_of(occupancy_word(config))].value;
}

const Rational& SolveResult::exact_value(const RingConfig& config) const {
    if (exact_values.empty()) throw DomainError("SolveResult: no exact values in floating mode");
    return exact_values[index_of(occupancy_word(config))];
}

std::size_t SolveResult::index_of(u64 word) const {
    const int k = std::popcount(word);
    const auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{k, word},
                                     [](const Entry& e, const std::pair<int, u64>& key) {
                                         return std::pair{e.token_count, e.word} < key;
                                     });
    if (it == entries.end() || it->token_count != k || it->word != word)
        throw DomainError("SolveResult: configuration not present");
    return static_cast<std::size_t>(it - entries.begin());
}

namespace {

/// Shared driver: sweep levels 3,5,..,max_k with both-mode plumbing.
SolveResult sweep_levels(int n, Mode mode, std::string tag, int max_k,
                         double f_coeff, double f_add, std::function<double(u64)> f_boundary,
                         Rational r_coeff, Rational r_add, std::function<Rational(u64)> r_boundary,
                         int absorb_below,
                         const std::function<void(int, const std::vector<double>&)>* level_check) {
    require_feasible(n);
    SolveResult result;
    result.functional = std::move(tag);
    result.mode = mode;
    result.n_nodes = n;

    FloatSweep fs{f_coeff, f_add, absorb_below, std::move(f_boundary), {}};
    RationalSweep rs{std::move(r_coeff), std::move(r_add), absorb_below, std::move(r_boundary), {}};

    for (int k = 1; k <= std::min(n, max_k); k += 2) {
        Level level = build_level(n, k, k >= absorb_below);
        if (k < absorb_below) {
            // boundary level: emit the known values directly
            std::function<double(u64)> fv = [&](u64 w) { return fs.boundary(w); };
            std::function<Rational(u64)> rv = [&](u64 w) { return rs.boundary(w); };
            push_entries(result, k, level.words, fv, mode == Mode::rational ? &rv : nullptr);
            continue;
        }
        if (mode == Mode::rational) {
            rs.run_level(level);
            std::function<double(u64)> fv = [&](u64 w) { return to_double(rs.solved.at(w)); };
            std::function<Rational(u64)> rv = [&](u64 w) { return rs.solved.at(w); };
            push_entries(result, k, level.words, fv, &rv);
        } else {
            fs.run_level(level);
            std::function<double(u64)> fv = [&](u64 w) { return fs.solved.at(w); };
            push_entries(result, k, level.words, fv, nullptr);
            if (level_check) {
                std::vector<double> vals;
                vals.reserve(level.words.size());
                for (u64 w : level.words) vals.push_back(fs.solved.at(w));
                (*level_check)(k, vals);
            }
        }
    }
    return result;
}

} // namespace

SolveResult expected_hitting_time(int n_nodes, Mode mode, int max_token_count) {
    if (max_token_count < 0 || (max_token_count % 2 == 0 && max_token_count != 0))
        throw DomainError("expected_hitting_time: max_token_count must be odd or 0");
    return sweep_levels(
        n_nodes, mode, "ET", max_token_count == 0 ? n_nodes : max_token_count,
        1.0, 1.0, [](u64) { return 0.0; },
        Rational(1), Rational(1), [](u64) { return Rational(0); },
        /*absorb_below=*/3, nullptr);
}

SolveResult expected_exponential(int n_nodes, double base) {
    if (!(base > 0)) throw DomainError("expected_exponential: base must be positive");
    std::function<void(int, const std::vector<double>&)> check = [&](int k, const std::vector<double>& vals) {
        for (double v : vals)
            if (!std::isfinite(v) || v < 0)
                throw DivergenceError("expected_exponential: level " + std::to_string(k) +
                                      " produced a negative or non-finite value; base " +
                                      std::to_string(base) + " is outside the convergence region");
    };
    auto result = sweep_levels(
        n_nodes, Mode::floating, "EaT", n_nodes,
        base, 0.0, [](u64) { return 1.0; },
        Rational(1), Rational(0), [](u64) { return Rational(1); },
        /*absorb_below=*/3, &check);
    return result;
}

SolveResult expected_exponential(int n_nodes, const Rational& base) {
    if (base <= 0) throw DomainError("expected_exponential: base must be positive");
    auto result = sweep_levels(
        n_nodes, Mode::rational, "EaT", n_nodes,
        to_double(base), 0.0, [](u64) { return 1.0; },
        base, Rational(0), [](u64) { return Rational(1); },
        /*absorb_below=*/3, nullptr);
    for (const Rational& v : result.exact_values)
        if (v <= 0)
            throw DivergenceError("expected_exponential: non-positive exact value; base outside the "
                                  "convergence region");
    return result;
}

std::vector<double> hitting_time_distribution(const RingConfig& config, long t_max) {
    const int n = config.n_nodes();
    require_feasible(n);
    if (t_max < 0) throw DomainError("hitting_time_distribution: t_max must be >= 0");

    // token count never increases: only levels up to the initial count matter
    std::vector<Level> levels;
    std::unordered_map<u64, std::pair<int, int>> where; // word -> (level slot, index)
    for (int k = 3; k <= config.token_count(); k += 2) {
        levels.push_back(build_level(n, k, true));
        const auto& lv = levels.back();
        for (std::size_t i = 0; i < lv.words.size(); ++i)
            where.emplace(lv.words[i], std::pair{static_cast<int>(levels.size()) - 1, static_cast<int>(i)});
    }

    std::vector<std::vector<double>> p(levels.size());
    for (std::size_t s = 0; s < levels.size(); ++s) p[s].assign(levels[s].words.size(), 0.0);

    double absorbed = 0.0;
    if (config.token_count() == 1) {
        absorbed = 1.0;
    } else {
        const auto [slot, idx] = where.at(occupancy_word(config));
        p[slot][idx] = 1.0;
    }

    std::vector<double> cdf;
    cdf.reserve(t_max + 1);
    cdf.push_back(absorbed);
    std::vector<std::vector<double>> q(p.size());
    for (long t = 1; t <= t_max; ++t) {
        if (1.0 - absorbed <= 0.0) {
            cdf.push_back(absorbed);
            continue;
        }
        for (std::size_t s = 0; s < p.size(); ++s) q[s].assign(p[s].size(), 0.0);
        for (std::size_t s = 0; s < levels.size(); ++s) {
            const Level& lv = levels[s];
            const double p_unit = std::ldexp(1.0, -lv.k);
            for (std::size_t i = 0; i < lv.words.size(); ++i) {
                const double mass = p[s][i];
                if (mass == 0.0) continue;
                for (const auto& [succ, mult] : lv.rows[i]) {
                    const double flow = mass * mult * p_unit;
                    if (std::popcount(succ) == 1) {
                        absorbed += flow;
                    } else {
                        const auto [slot, idx] = where.at(succ);
                        q[slot][idx] += flow;
                    }
                }
            }
        }
        p.swap(q);
        cdf.push_back(std::min(absorbed, 1.0));
    }
    return cdf;
}

std::pair<SolveResult, SolveResult> expected_tau_functionals_all(int n_nodes) {
    // boundary: any state with <= 3 tokens; tau = 0 there, psi value attached.
    auto psi_boundary = [n_nodes](u64 w) { return psi_of_ring(ring_config_from_word(n_nodes, w)); };
    SolveResult tau = sweep_levels(
        n_nodes, Mode::floating, "Etau", n_nodes,
        1.0, 1.0, [](u64) { return 0.0; },
        Rational(1), Rational(1), [](u64) { return Rational(0); },
        /*absorb_below=*/5, nullptr);
    SolveResult psi_tau = sweep_levels(
        n_nodes, Mode::floating, "EPsiTau", n_nodes,
        1.0, 0.0, psi_boundary,
        Rational(1), Rational(0), [](u64) { return Rational(0); },
        /*absorb_below=*/5, nullptr);
    return {std::move(tau), std::move(psi_tau)};
}

TauFunctionals expected_tau_functionals(const RingConfig& config) {
    if (config.token_count() <= 3) return {0.0, psi_of_ring(config)};
    const auto [tau, psi_tau] = expected_tau_functionals_all(config.n_nodes());
    return {tau.value(config), psi_tau.value(config)};
}

ArgmaxResult argmax_expected_T(int n_nodes, Mode mode) {
    const SolveResult solve = expected_hitting_time(n_nodes, mode);
    ArgmaxResult result;
    result.mode = mode;

    if (mode == Mode::rational) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < solve.exact_values.size(); ++i)
            if (solve.exact_values[i] > solve.exact_values[best]) best = i;
        result.max_exact = solve.exact_values[best];
        result.max_value = to_double(result.max_exact);
        for (std::size_t i = 0; i < solve.entries.size(); ++i)
            if (solve.exact_values[i] == result.max_exact)
                result.argmax.push_back(ring_config_from_word(n_nodes, solve.entries[i].word));
        Rational bound(4L * n_nodes * n_nodes, 27);
        bound.canonicalize();
        if (result.max_exact > bound) throw std::logic_error("argmax_expected_T: bound 4N^2/27 violated");
    } else {
        double best = 0.0;
        for (const auto& e : solve.entries) best = std::max(best, e.value);
        result.max_value = best;
        for (const auto& e : solve.entries)
            if (e.value >= best - 1e-9)
                result.argmax.push_back(ring_config_from_word(n_nodes, e.word));
        if (best > 4.0 * n_nodes * n_nodes / 27.0 + 1e-9)
            throw std::logic_error("argmax_expected_T: bound 4N^2/27 violated");
    }
    return result;
}

} // namespace herman::exact
