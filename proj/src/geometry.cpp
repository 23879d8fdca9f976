#include "relbc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relbc/units.hpp"

namespace relbc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// cosine clamped into arccos domain against roundoff
double safe_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

}  // namespace

void ProtocolLayout::validate() const {
    if (d_alice_bob < 0 || d_alice_a0 < 0 || d_alice_a1 < 0 || d_a0_b0 < 0 || d_a1_b1 < 0)
        throw std::invalid_argument("layout: distances must be nonnegative");
    if (!(theta > 0.0) || theta > kPi)
        throw std::invalid_argument("layout: theta must lie in (0, pi]");
    for (double f : {speed.alice_bob, speed.alice_a0, speed.alice_a1, speed.a0_b0, speed.a1_b1})
        if (!(f > 0.0) || f > 1.0)
            throw std::invalid_argument("layout: channel speed factors must lie in (0, 1]");
}

void TimingObservations::validate() const {
    if (!(t_b0 > t0) || !(t_b1 > t0))
        throw std::invalid_argument("timing: t_b0 and t_b1 must be later than t0");
}

PartyPositions party_positions(const ProtocolLayout& layout) {
    const double half = layout.theta / 2.0;
    const double c0 = std::cos(half), s0 = std::sin(half);
    PartyPositions p;
    p.alice = {0.0, 0.0};
    p.bob = {-layout.d_alice_bob, 0.0};
    p.a0 = {layout.d_alice_a0 * c0, layout.d_alice_a0 * s0};
    p.a1 = {layout.d_alice_a1 * c0, -layout.d_alice_a1 * s0};
    const double l0 = layout.d_alice_a0 + layout.d_a0_b0;
    const double l1 = layout.d_alice_a1 + layout.d_a1_b1;
    p.b0 = {l0 * c0, l0 * s0};
    p.b1 = {l1 * c0, -l1 * s0};
    return p;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

DerivedDistances derived_distances(const ProtocolLayout& layout) {
    layout.validate();
    const double ch = std::cos(layout.theta / 2.0);
    const double dab = layout.d_alice_bob;
    const double l0 = layout.d_alice_a0 + layout.d_a0_b0;
    const double l1 = layout.d_alice_a1 + layout.d_a1_b1;

    DerivedDistances d;
    d.d_bob_b0 = std::sqrt(dab * dab + l0 * l0 + 2.0 * dab * l0 * ch);
    d.d_bob_b1 = std::sqrt(dab * dab + l1 * l1 + 2.0 * dab * l1 * ch);
    if (d.d_bob_b0 <= 0.0 || d.d_bob_b1 <= 0.0)
        throw std::domain_error("derived_distances: degenerate layout, angles undefined");
    d.theta0 = safe_acos((dab + l0 * ch) / d.d_bob_b0);
    d.theta1 = safe_acos((dab + l1 * ch) / d.d_bob_b1);
    d.d_b0_b1 = std::sqrt(d.d_bob_b0 * d.d_bob_b0 + d.d_bob_b1 * d.d_bob_b1 -
                          2.0 * d.d_bob_b0 * d.d_bob_b1 * std::cos(d.theta0 + d.theta1));
    return d;
}

AuxDistances aux_distances(const ProtocolLayout& layout) {
    const PartyPositions p = party_positions(layout);
    AuxDistances a;
    a.d_a0_a1 = distance(p.a0, p.a1);
    a.d_bob_a0 = distance(p.bob, p.a0);
    a.d_bob_a1 = distance(p.bob, p.a1);
    a.d_a0_b1 = distance(p.a0, p.b1);
    a.d_a1_b0 = distance(p.a1, p.b0);
    return a;
}

double t_max_simple(const TimingObservations& obs, double d_a0_a1) {
    if (!(d_a0_a1 > 0.0)) throw std::invalid_argument("t_max_simple: d_a0_a1 must be positive");
    return 0.5 * (obs.t_b0 + obs.t_b1 - d_a0_a1 / kSpeedOfLight) - obs.t0;
}

namespace {

// Max-point distance from Bob for a given split fraction q of the B0-B1
// segment. Exact for any q since beta uses the signed law-of-cosines cosine
// (identical to arcsin-derived beta whenever that angle is acute).
double max_point_distance(const DerivedDistances& d, double q) {
    const double alpha = d.theta0 + d.theta1;
    const double cos_beta =
        (d.d_bob_b1 * d.d_bob_b1 + d.d_b0_b1 * d.d_b0_b1 - d.d_bob_b0 * d.d_bob_b0) /
        (2.0 * d.d_bob_b1 * d.d_b0_b1);
    const double xi = (1.0 - q) * d.d_bob_b0 * std::sin(alpha);
    const double delta = (1.0 - q) * d.d_b0_b1 * std::clamp(cos_beta, -1.0, 1.0);
    return std::sqrt(xi * xi + (d.d_bob_b1 - delta) * (d.d_bob_b1 - delta));
}

// Largest d >= 0 with d + sqrt(r^2 + d^2 - 2 r d cos(angle)) <= reach,
// or -1 when even d = 0 violates it.
double max_feasible_distance(double reach, double r, double angle) {
    if (reach < r) return -1.0;
    const double denom = reach - r * std::cos(angle);
    if (denom <= 0.0) return reach;  // only possible when reach == r and angle == 0
    return std::min((reach * reach - r * r) / (2.0 * denom), reach);
}

}  // namespace

CommitPointMax commit_point_max(const ProtocolLayout& layout, const TimingObservations& obs) {
    obs.validate();
    const DerivedDistances d = derived_distances(layout);
    if (!(d.d_b0_b1 > kSpeedOfLight * std::abs(obs.t_b1 - obs.t_b0)))
        throw std::domain_error("commit_point_max: timing inconsistent with geometry (q outside [0,1])");
    CommitPointMax out;
    out.q = 0.5 * (1.0 - kSpeedOfLight * (obs.t_b1 - obs.t_b0) / d.d_b0_b1);
    out.d_bob_pcommit_max = max_point_distance(d, out.q);
    return out;
}

CommitPointSolution solve_commit_point(const ProtocolLayout& layout, const TimingObservations& obs) {
    obs.validate();
    const DerivedDistances d = derived_distances(layout);
    const double reach0 = kSpeedOfLight * (obs.t_b0 - obs.t0);
    const double reach1 = kSpeedOfLight * (obs.t_b1 - obs.t0);
    const double alpha = d.theta0 + d.theta1;

    CommitPointSolution sol;
    if (reach0 < d.d_bob_b0 || reach1 < d.d_bob_b1) {
        // even Bob's own position cannot explain the observations in time
        return sol;  // d = 0, t_commit_upper = 0
    }

    // Split point of the B0-B1 segment; endpoint-clamped when one reveal is so
    // late that the balanced point leaves the segment.
    const double q_raw = 0.5 * (1.0 - kSpeedOfLight * (obs.t_b1 - obs.t_b0) / d.d_b0_b1);
    const double q = clamp01(q_raw);
    const double d_max = max_point_distance(d, q);
    const double cap = std::min({reach0, reach1, d_max});

    const auto d_of_psi = [&](double psi) {
        const double d0 = max_feasible_distance(reach0, d.d_bob_b0, psi);
        const double d1 = max_feasible_distance(reach1, d.d_bob_b1, alpha - psi);
        if (d0 < 0.0 || d1 < 0.0) return -1.0;
        return std::min({d0, d1, cap});
    };

    // coarse grid, then golden-section refinement around the best angle
    constexpr int kGrid = 10000;
    double best_psi = 0.0, best_d = -1.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double psi = alpha * i / kGrid;
        const double dv = d_of_psi(psi);
        if (dv > best_d) {
            best_d = dv;
            best_psi = psi;
        }
    }
    if (best_d < 0.0) return sol;

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(0.0, best_psi - alpha / kGrid);
    double hi = std::min(alpha, best_psi + alpha / kGrid);
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = d_of_psi(x1), f2 = d_of_psi(x2);
    while (hi - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = d_of_psi(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = d_of_psi(x1);
        }
    }
    const double psi_star = (f1 > f2) ? x1 : x2;
    const double d_star = std::max(best_d, std::max(f1, f2));

    sol.d_bob_pcommit = d_star;
    sol.at_max_point = d_star >= d_max - 1e-6;
    if (sol.at_max_point) {
        sol.d_bob_pcommit = d_max;
        if (q_raw >= 0.0 && q_raw <= 1.0) {
            // exact form of the waiting deadline at the max point
            sol.t_commit_upper =
                0.5 * (obs.t_b0 + obs.t_b1 - d.d_b0_b1 / kSpeedOfLight) - obs.t0;
        } else {
            // clamped split: the max point is an endpoint of the segment
            sol.t_commit_upper = std::min(obs.t_b0 - obs.t0 - q * d.d_b0_b1 / kSpeedOfLight,
                                          obs.t_b1 - obs.t0 - (1.0 - q) * d.d_b0_b1 / kSpeedOfLight);
        }
        // angle of the max point seen from Bob
        const double leg = q * d.d_b0_b1;
        if (d_max > 0.0 && d.d_bob_b0 > 0.0)
            sol.psi = safe_acos((d_max * d_max + d.d_bob_b0 * d.d_bob_b0 - leg * leg) /
                                (2.0 * d_max * d.d_bob_b0));
    } else {
        sol.t_commit_upper = d_star / kSpeedOfLight;
        sol.psi = psi_star;
    }
    return sol;
}

LocationExclusion location_exclusion(const ProtocolLayout& layout, const TimingObservations& obs) {
    obs.validate();
    const AuxDistances a = aux_distances(layout);
    LocationExclusion e;
    e.a0_excluded = a.d_bob_a0 + a.d_a0_b1 > kSpeedOfLight * (obs.t_b1 - obs.t0);
    e.a1_excluded = a.d_bob_a1 + a.d_a1_b0 > kSpeedOfLight * (obs.t_b0 - obs.t0);
    return e;
}

LocationExclusion location_exclusion_approx(const ProtocolLayout& layout, const TimingObservations& obs) {
    obs.validate();
    const AuxDistances a = aux_distances(layout);
    LocationExclusion e;
    e.a0_excluded = layout.d_alice_a0 + a.d_a0_a1 > kSpeedOfLight * (obs.t_b1 - obs.t0);
    e.a1_excluded = layout.d_alice_a1 + a.d_a0_a1 > kSpeedOfLight * (obs.t_b0 - obs.t0);
    return e;
}

}  // namespace relbc
