#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "relbc/units.hpp"

namespace relbc::testing {

OraclePoints oracle_place(const ProtocolLayout& layout) {
    OraclePoints p{};
    const double h = layout.theta / 2.0;
    p.alice[0] = 0.0;
    p.alice[1] = 0.0;
    p.bob[0] = -layout.d_alice_bob;
    p.bob[1] = 0.0;
    p.a0[0] = layout.d_alice_a0 * std::cos(h);
    p.a0[1] = layout.d_alice_a0 * std::sin(h);
    p.a1[0] = layout.d_alice_a1 * std::cos(h);
    p.a1[1] = -layout.d_alice_a1 * std::sin(h);
    p.b0[0] = (layout.d_alice_a0 + layout.d_a0_b0) * std::cos(h);
    p.b0[1] = (layout.d_alice_a0 + layout.d_a0_b0) * std::sin(h);
    p.b1[0] = (layout.d_alice_a1 + layout.d_a1_b1) * std::cos(h);
    p.b1[1] = -(layout.d_alice_a1 + layout.d_a1_b1) * std::sin(h);
    return p;
}

double oracle_dist(const double* p, const double* q) {
    return std::hypot(p[0] - q[0], p[1] - q[1]);
}

double grid_commit_point(const ProtocolLayout& layout, const TimingObservations& obs, int n_psi) {
    const OraclePoints pts = oracle_place(layout);
    const double r0 = oracle_dist(pts.bob, pts.b0);
    const double r1 = oracle_dist(pts.bob, pts.b1);
    const double reach0 = kSpeedOfLight * (obs.t_b0 - obs.t0);
    const double reach1 = kSpeedOfLight * (obs.t_b1 - obs.t0);
    const double alpha = std::acos(std::clamp(
        ((pts.b0[0] - pts.bob[0]) * (pts.b1[0] - pts.bob[0]) +
         (pts.b0[1] - pts.bob[1]) * (pts.b1[1] - pts.bob[1])) /
            (r0 * r1),
        -1.0, 1.0));

    const auto feasible = [&](double psi, double d) {
        const double p0 = d + std::sqrt(r0 * r0 + d * d - 2.0 * r0 * d * std::cos(psi));
        const double p1 = d + std::sqrt(r1 * r1 + d * d - 2.0 * r1 * d * std::cos(alpha - psi));
        return p0 <= reach0 && p1 <= reach1;
    };

    // the max-point cap mirrors the constraint geometry: never look past the
    // balanced split point on the B0-B1 segment or past either reach
    const double d01 = oracle_dist(pts.b0, pts.b1);
    const double q = std::clamp(
        0.5 * (1.0 - kSpeedOfLight * (obs.t_b1 - obs.t_b0) / d01), 0.0, 1.0);
    const double px = pts.b0[0] + q * (pts.b1[0] - pts.b0[0]);
    const double py = pts.b0[1] + q * (pts.b1[1] - pts.b0[1]);
    const double pmax[2] = {px, py};
    const double cap = std::min({reach0, reach1, oracle_dist(pts.bob, pmax)});

    double best = feasible(0.0, 0.0) ? 0.0 : -1.0;
    for (int i = 0; i < n_psi; ++i) {
        const double psi = alpha * i / (n_psi - 1);
        if (!feasible(psi, 0.0)) continue;
        double lo = 0.0, hi = cap;
        if (feasible(psi, hi)) {
            best = std::max(best, hi);
            continue;
        }
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (feasible(psi, mid))
                lo = mid;
            else
                hi = mid;
        }
        best = std::max(best, lo);
    }
    return best;
}

double segment_max_point(const ProtocolLayout& layout, const TimingObservations& obs,
                         int n_steps) {
    const OraclePoints pts = oracle_place(layout);
    const double want = kSpeedOfLight * (obs.t_b1 - obs.t_b0);
    double best_err = std::numeric_limits<double>::infinity();
    double best_d = 0.0;
    for (int i = 0; i <= n_steps; ++i) {
        const double u = static_cast<double>(i) / n_steps;
        const double p[2] = {pts.b0[0] + u * (pts.b1[0] - pts.b0[0]),
                             pts.b0[1] + u * (pts.b1[1] - pts.b0[1])};
        const double err = std::abs((oracle_dist(p, pts.b1) - oracle_dist(p, pts.b0)) - want);
        if (err < best_err) {
            best_err = err;
            best_d = oracle_dist(p, pts.bob);
        }
    }
    return best_d;
}

std::vector<std::uint64_t> enumerate_comb_factors(unsigned n) {
    std::vector<std::uint64_t> by_size(n + 1, 0);
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t mask = 0; mask < total; ++mask)
        by_size[std::popcount(mask)]++;
    // factor(m) = 1 + sum_{k=1..m} (2^k - 1) * (number of size-k subsets)
    std::vector<std::uint64_t> factors(n + 1, 0);
    std::uint64_t acc = 1;
    factors[0] = acc;
    for (unsigned k = 1; k <= n; ++k) {
        acc += ((1ull << k) - 1) * by_size[k];
        factors[k] = acc;
    }
    return factors;
}

double poisson_tail_ge2(double lambda) { return 1.0 - (1.0 + lambda) * std::exp(-lambda); }

}  // namespace relbc::testing
