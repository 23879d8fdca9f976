#pragma once

#include <cstdint>

namespace relbc {

// Per-link signal speed as a fraction of c (1.0 free space, 1/1.5 fiber).
struct ChannelSpeedFactors {
    double alice_bob = 1.0;
    double alice_a0 = 1.0;
    double alice_a1 = 1.0;
    double a0_b0 = 1.0;
    double a1_b1 = 1.0;
};

// Planar layout of the six parties. Alice/Bob, A0/B0 and A1/B1 are co-located
// pairs; A0 and A1 sit on the two rays leaving Alice that open the angle
// theta, each B_i collinear beyond its A_i. Bob sits opposite the bisector of
// theta. All distances in meters, theta in radians.
struct ProtocolLayout {
    double d_alice_bob = 0.8;
    double d_alice_a0 = 9300.0;
    double d_alice_a1 = 12300.0;
    double d_a0_b0 = 0.8;
    double d_a1_b1 = 0.8;
    double theta = 2.8797932657906435;  // 165 degrees
    ChannelSpeedFactors speed;

    void validate() const;  // throws std::invalid_argument
};

// Observed timing of one run: t0 is the instant Bob sends his first signal,
// t_b0 / t_b1 the instants B0 / B1 receive the last signal from A0 / A1.
// Seconds, common clock.
struct TimingObservations {
    double t0 = 0.0;
    double t_b0 = 0.0;
    double t_b1 = 0.0;

    void validate() const;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct PartyPositions {
    Vec2 alice, bob, a0, a1, b0, b1;
};

// Canonical planar embedding of the layout: Alice at the origin, the bisector
// of theta along +x, Bob on the -x axis.
PartyPositions party_positions(const ProtocolLayout& layout);

double distance(Vec2 a, Vec2 b);

struct DerivedDistances {
    double d_bob_b0 = 0.0;
    double d_bob_b1 = 0.0;
    double theta0 = 0.0;  // angle B0-Bob-bisector
    double theta1 = 0.0;  // angle B1-Bob-bisector
    double d_b0_b1 = 0.0;
};

// Distances and angles seen from Bob:
//   d_bob_bi = sqrt(d_ab^2 + (d_alice_ai + d_ai_bi)^2 + 2 d_ab (d_alice_ai + d_ai_bi) cos(theta/2))
//   theta_i  = arccos([d_ab + (d_alice_ai + d_ai_bi) cos(theta/2)] / d_bob_bi)
// plus the law-of-cosines distance between B0 and B1. Throws std::domain_error
// for a degenerate layout (all distances zero) where the angles are undefined.
DerivedDistances derived_distances(const ProtocolLayout& layout);

// Auxiliary planar distances used by the exclusion predicates.
struct AuxDistances {
    double d_a0_a1 = 0.0;
    double d_bob_a0 = 0.0;
    double d_bob_a1 = 0.0;
    double d_a0_b1 = 0.0;
    double d_a1_b0 = 0.0;
};

AuxDistances aux_distances(const ProtocolLayout& layout);

// Latest commitment instant consistent with the observations in the common
// simplified form: t_max = (t_b0 + t_b1 - d_a0_a1/c)/2 - t0. Requires
// d_a0_a1 > 0.
double t_max_simple(const TimingObservations& obs, double d_a0_a1);

struct CommitPointMax {
    double q = 0.0;                // split fraction of the B0-B1 segment
    double d_bob_pcommit_max = 0.0;
};

// The farthest point from Bob where a commitment could still reach both B0
// and B1 on schedule lies on the segment B0-B1, split so that the two travel
// times differ by exactly t_b1 - t_b0:
//   q = (1 - c (t_b1 - t_b0) / d_b0_b1) / 2
//   d = sqrt(xi^2 + (d_bob_b1 - delta)^2),  xi = (1-q) d_bob_b0 sin(theta0+theta1),
//   delta = (1-q) d_b0_b1 cos(beta),  beta the angle Bob-B1-B0.
// Throws std::domain_error when q falls outside [0, 1] (timings incompatible
// with a split point on the segment).
CommitPointMax commit_point_max(const ProtocolLayout& layout, const TimingObservations& obs);

struct CommitPointSolution {
    double d_bob_pcommit = 0.0;
    double psi = 0.0;             // angle B0-Bob-P of the solution
    double t_commit_upper = 0.0;  // seconds after t0
    bool at_max_point = false;
};

// Maximizes the commitment-point distance from Bob over the wedge
// psi in [0, theta0+theta1] subject to both light-cone constraints
//   d + sqrt(d_bob_bi^2 + d^2 - 2 d_bob_bi d cos(angle_i)) <= c (t_bi - t0)
// and the cap min[c(t_b0-t0), c(t_b1-t0), d_bob_pcommit_max]. If the cap at
// the max point is what binds, the adversary can sit there and wait, so
// t_commit_upper follows the waiting deadline; otherwise it is d/c, the
// minimum flight time to the solution point. An infeasible constraint set
// degenerates to "commit at Bob's position at t0" (d = 0, t = 0).
CommitPointSolution solve_commit_point(const ProtocolLayout& layout, const TimingObservations& obs);

struct LocationExclusion {
    bool a0_excluded = false;
    bool a1_excluded = false;
};

// Exact exclusion predicates: commitment at A_i is ruled out when
//   d_bob_a0 + d_a0_b1 > c (t_b1 - t0)   (for A0)
//   d_bob_a1 + d_a1_b0 > c (t_b0 - t0)   (for A1)
LocationExclusion location_exclusion(const ProtocolLayout& layout, const TimingObservations& obs);

// Short-distance approximation of the same predicates:
//   d_alice_ai + d_a0_a1 > c (t_b(1-i) - t0)
LocationExclusion location_exclusion_approx(const ProtocolLayout& layout, const TimingObservations& obs);

}  // namespace relbc
