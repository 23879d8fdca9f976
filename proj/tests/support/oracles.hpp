#pragma once

#include <cstdint>
#include <vector>

#include "relbc/geometry.hpp"

namespace relbc::testing {

// Independent planar embedding of the six-party layout, kept separate from
// the library's formula-based derivations on purpose: Alice at the origin,
// Bob opposite the bisector of theta, agents on the two rays, each B behind
// its A.
struct OraclePoints {
    double alice[2], bob[2], a0[2], a1[2], b0[2], b1[2];
};
OraclePoints oracle_place(const ProtocolLayout& layout);

double oracle_dist(const double* p, const double* q);

// Brute-force commit-point maximization: scan psi over [0, theta0+theta1],
// bisect the feasibility boundary in d for each angle, keep the best. The
// feasibility test substitutes the raw constraints, so this shares no code
// with the closed-form solver.
double grid_commit_point(const ProtocolLayout& layout, const TimingObservations& obs,
                         int n_psi = 2001);

// Scan of the B0-B1 segment for the point whose travel-time difference to the
// two agents matches the observed arrival gap; returns its distance from Bob.
double segment_max_point(const ProtocolLayout& layout, const TimingObservations& obs,
                         int n_steps = 1000000);

// Exhaustive subset counting of 1 + sum_{k=1}^{cutoff} (2^k - 1) C(n, k):
// every subset of an n-set is enumerated and bucketed by size. n <= 20.
std::vector<std::uint64_t> enumerate_comb_factors(unsigned n);

// Closed-form Poisson tail P[X >= 2] for mean lambda.
double poisson_tail_ge2(double lambda);

}  // namespace relbc::testing
