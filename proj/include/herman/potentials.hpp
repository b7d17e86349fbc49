#pragma once

#include <span>

#include "herman/rational.hpp"
#include "herman/ring.hpp"

namespace herman {

// ---------------------------------------------------------------------------
// The two potentials on configurations and the one-step contraction rate.
//
//   phi: 3-token states, (N^3 - 27abc)/N^3. Zero exactly at a=b=c.
//   psi: any doubled-ring state, |sum_j exp(i*pi*x(j)/(2N)) * (-1)^j|^2 with
//        tokens enumerated in ascending position. In [0,1]; 1 iff one token;
//        0 at equidistant states.
//
// The one-step expectation of psi satisfies
//        E[psi(next)] = (1 - eps) * psi + eps * K,   eps = sin^2(pi/(2N)),
// which one_step_expected_psi / recursion_residual verify by brute force
// over all 2^K move masks.
// ---------------------------------------------------------------------------

/// Contraction rate sin^2(pi/(2N)) for an N-node ring.
double protocol_epsilon(int n_nodes);
/// Same rate addressed by the doubled node count M = 2N: sin^2(pi/M).
double doubled_epsilon(int n_nodes_doubled);

/// (N^3 - 27abc)/N^3, exact.
Rational phi_exact(const GapTriple& g);
double phi(const GapTriple& g);

double psi(const DoubledConfig& config);
/// psi on a raw ascending position list (duplicates allowed, so the
/// pair-insertion identity can be probed directly). A single position
/// returns exactly 1.
double psi_of_positions(std::span<const int> positions, int n_nodes_doubled);
/// psi of an original-ring state, through the doubling map.
double psi_of_ring(const RingConfig& config);

/// Exhaustive mask average of psi after one symmetrized step.
/// CapacityError if the token count exceeds 24.
double one_step_expected_psi(const DoubledConfig& config);

/// | one_step_expected_psi(x) - ((1-eps)*psi(x) + eps*K) |
double recursion_residual(const DoubledConfig& config);

} // namespace herman
