#include <doctest.h>

#include <cmath>

#include "relbc/geometry.hpp"
#include "relbc/rng.hpp"
#include "relbc/units.hpp"
#include "support/oracles.hpp"

using namespace relbc;
namespace oracle = relbc::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

ProtocolLayout paper_layout(bool zero_offsets = true) {
    ProtocolLayout l;
    l.d_alice_bob = zero_offsets ? 0.0 : 0.8;
    l.d_alice_a0 = 9300.0;
    l.d_alice_a1 = 12300.0;
    l.d_a0_b0 = zero_offsets ? 0.0 : 0.8;
    l.d_a1_b1 = zero_offsets ? 0.0 : 0.8;
    l.theta = 165.0 * kPi / 180.0;
    return l;
}

TimingObservations exp1_obs() { return TimingObservations{1.53e-6, 92.85e-6, 102.74e-6}; }

ProtocolLayout random_layout(RandomStream& rng) {
    ProtocolLayout l;
    l.d_alice_bob = rng.uniform(0.0, 50.0);
    l.d_alice_a0 = rng.uniform(1000.0, 20000.0);
    l.d_alice_a1 = rng.uniform(1000.0, 20000.0);
    l.d_a0_b0 = rng.uniform(0.0, 50.0);
    l.d_a1_b1 = rng.uniform(0.0, 50.0);
    l.theta = rng.uniform(0.3, kPi);
    return l;
}

// timings with enough slack to be realizable but tight enough to bind
TimingObservations random_obs(const ProtocolLayout& l, RandomStream& rng) {
    const DerivedDistances d = derived_distances(l);
    TimingObservations obs;
    obs.t0 = rng.uniform(0.0, 5e-6);
    obs.t_b0 = obs.t0 + d.d_bob_b0 / kSpeedOfLight * rng.uniform(1.0, 3.0);
    obs.t_b1 = obs.t0 + d.d_bob_b1 / kSpeedOfLight * rng.uniform(1.0, 3.0);
    return obs;
}

}  // namespace

TEST_CASE("derived distances reproduce the planar embedding") {
    RandomStream rng(42);
    for (int i = 0; i < 200; ++i) {
        const ProtocolLayout l = random_layout(rng);
        const DerivedDistances d = derived_distances(l);
        const oracle::OraclePoints pts = oracle::oracle_place(l);
        CHECK(d.d_bob_b0 == doctest::Approx(oracle::oracle_dist(pts.bob, pts.b0)).epsilon(1e-12));
        CHECK(d.d_bob_b1 == doctest::Approx(oracle::oracle_dist(pts.bob, pts.b1)).epsilon(1e-12));
        CHECK(d.d_b0_b1 == doctest::Approx(oracle::oracle_dist(pts.b0, pts.b1)).epsilon(1e-9));
        CHECK(d.theta0 + d.theta1 <= kPi + 1e-12);
    }
}

TEST_CASE("paper layout arm separation") {
    const DerivedDistances d = derived_distances(paper_layout());
    // 9.3 km and 12.3 km arms at 165 degrees
    CHECK(d.d_b0_b1 == doctest::Approx(21418.7887).epsilon(1e-6));
    CHECK(to_km(d.d_b0_b1) == doctest::Approx(21.42).epsilon(1e-3));
}

TEST_CASE("collinear symmetric layout gives 2d separation") {
    ProtocolLayout l;
    l.d_alice_bob = 0.0;
    l.d_alice_a0 = l.d_alice_a1 = 5000.0;
    l.d_a0_b0 = l.d_a1_b1 = 0.0;
    l.theta = kPi;
    const DerivedDistances d = derived_distances(l);
    CHECK(d.d_b0_b1 == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("degenerate offsets collapse onto the agent ray") {
    ProtocolLayout l = paper_layout();
    l.d_alice_bob = 0.0;
    l.d_a0_b0 = 0.0;
    const DerivedDistances d = derived_distances(l);
    CHECK(d.d_bob_b0 == doctest::Approx(l.d_alice_a0).epsilon(1e-12));
    CHECK(d.theta0 == doctest::Approx(l.theta / 2.0).epsilon(1e-12));
}

TEST_CASE("fully degenerate layout is rejected") {
    ProtocolLayout l;
    l.d_alice_bob = l.d_alice_a0 = l.d_alice_a1 = l.d_a0_b0 = l.d_a1_b1 = 0.0;
    l.theta = 1.0;
    CHECK_THROWS_AS(derived_distances(l), std::domain_error);
}

TEST_CASE("t_max_simple reproduces the reference runs") {
    const double d01 = derived_distances(paper_layout()).d_b0_b1;
    struct Row {
        double tb0, tb1, expect_us;
    };
    // the eight reference timing rows
    const Row rows[] = {{92.85, 102.74, 60.54}, {93.02, 102.85, 60.68}, {92.99, 102.92, 60.70},
                        {92.98, 102.93, 60.70}, {93.18, 103.22, 60.94}, {92.97, 102.84, 60.65},
                        {93.12, 103.08, 60.84}, {93.24, 103.10, 60.91}};
    for (const Row& r : rows) {
        const TimingObservations obs{1.53e-6, r.tb0 * 1e-6, r.tb1 * 1e-6};
        CHECK(to_us(t_max_simple(obs, d01)) == doctest::Approx(r.expect_us).epsilon(0.0009));
    }
}

TEST_CASE("t_max_simple forces commitment at t0 when light time saturates") {
    const TimingObservations obs{1.0e-6, 10.0e-6, 10.0e-6};
    const double d = kSpeedOfLight * 2.0 * (10.0e-6 - 1.0e-6);
    CHECK(t_max_simple(obs, d) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(t_max_simple(obs, 0.0), std::invalid_argument);
}

TEST_CASE("t_max_simple monotonicity") {
    RandomStream rng(7);
    for (int i = 0; i < 100; ++i) {
        const TimingObservations obs{0.0, rng.uniform(1e-6, 1e-4), rng.uniform(1e-6, 1e-4)};
        const double d = rng.uniform(100.0, 50000.0);
        const double base = t_max_simple(obs, d);
        CHECK(t_max_simple(obs, d * 1.1) < base);
        TimingObservations later = obs;
        later.t_b0 += 1e-6;
        CHECK(t_max_simple(later, d) > base);
        later = obs;
        later.t_b1 += 1e-6;
        CHECK(t_max_simple(later, d) > base);
    }
}

TEST_CASE("commit point max: equal arrivals split the segment in half") {
    const ProtocolLayout l = paper_layout(false);
    const TimingObservations obs{0.0, 100e-6, 100e-6};
    const CommitPointMax m = commit_point_max(l, obs);
    CHECK(m.q == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("commit point max: isoceles midpoint closed form") {
    ProtocolLayout l;
    l.d_alice_bob = 100.0;
    l.d_alice_a0 = l.d_alice_a1 = 8000.0;
    l.d_a0_b0 = l.d_a1_b1 = 10.0;
    l.theta = 2.0;
    const TimingObservations obs{0.0, 80e-6, 80e-6};
    const DerivedDistances d = derived_distances(l);
    const CommitPointMax m = commit_point_max(l, obs);
    const double expected = std::sqrt(d.d_bob_b0 * d.d_bob_b0 - 0.25 * d.d_b0_b1 * d.d_b0_b1);
    CHECK(m.d_bob_pcommit_max == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("commit point max agrees with the segment scan on the reference run") {
    const ProtocolLayout l = paper_layout(false);
    const TimingObservations obs = exp1_obs();
    const CommitPointMax m = commit_point_max(l, obs);
    const double brute = oracle::segment_max_point(l, obs, 200000);
    CHECK(m.d_bob_pcommit_max == doctest::Approx(brute).epsilon(1e-4));
    // the two split distances recombine to the full segment
    const DerivedDistances d = derived_distances(l);
    CHECK(m.q * d.d_b0_b1 + (1.0 - m.q) * d.d_b0_b1 == doctest::Approx(d.d_b0_b1).epsilon(1e-15));
    CHECK(m.q >= 0.0);
    CHECK(m.q <= 1.0);
}

TEST_CASE("commit point max rejects arrival gaps wider than the segment") {
    const ProtocolLayout l = paper_layout(false);
    // 200 us arrival difference >> 21.4 km light time
    const TimingObservations obs{0.0, 50e-6, 250e-6};
    CHECK_THROWS_AS(commit_point_max(l, obs), std::domain_error);
}

TEST_CASE("solver hits the max point under generous timings") {
    const ProtocolLayout l = paper_layout(false);
    const TimingObservations obs{1.53e-6, 300e-6, 305e-6};
    const CommitPointSolution sol = solve_commit_point(l, obs);
    const DerivedDistances d = derived_distances(l);
    CHECK(sol.at_max_point);
    const double hgf = 0.5 * (obs.t_b0 + obs.t_b1 - d.d_b0_b1 / kSpeedOfLight) - obs.t0;
    CHECK(sol.t_commit_upper == doctest::Approx(hgf).epsilon(1e-12));
}

TEST_CASE("solver matches the simple bound on the reference geometry") {
    const CommitPointSolution sol = solve_commit_point(paper_layout(false), exp1_obs());
    CHECK(sol.at_max_point);
    CHECK(to_us(sol.t_commit_upper) == doctest::Approx(60.54).epsilon(0.5 / 60.54));
}

TEST_CASE("with zero pair offsets the exact bound equals t_max_simple") {
    const ProtocolLayout l = paper_layout(true);
    const TimingObservations obs = exp1_obs();
    const CommitPointSolution sol = solve_commit_point(l, obs);
    const DerivedDistances d = derived_distances(l);
    CHECK(sol.at_max_point);
    CHECK(sol.t_commit_upper == doctest::Approx(t_max_simple(obs, d.d_b0_b1)).epsilon(1e-14));
}

TEST_CASE("infeasible observations degenerate to committing at Bob at t0") {
    const ProtocolLayout l = paper_layout(false);
    // reveal observed sooner than light could cross the arms
    const TimingObservations obs{0.0, 1e-6, 1e-6};
    const CommitPointSolution sol = solve_commit_point(l, obs);
    CHECK(sol.d_bob_pcommit == 0.0);
    CHECK(sol.t_commit_upper == 0.0);
    CHECK_FALSE(sol.at_max_point);
}

TEST_CASE("solution never violates the substituted constraints") {
    RandomStream rng(2024);
    for (int i = 0; i < 40; ++i) {
        const ProtocolLayout l = random_layout(rng);
        const TimingObservations obs = random_obs(l, rng);
        const DerivedDistances d = derived_distances(l);
        const CommitPointSolution sol = solve_commit_point(l, obs);
        const double dd = sol.d_bob_pcommit;
        const double psi = sol.psi;
        const double lhs0 =
            dd + std::sqrt(d.d_bob_b0 * d.d_bob_b0 + dd * dd -
                           2.0 * d.d_bob_b0 * dd * std::cos(psi));
        const double lhs1 = dd + std::sqrt(d.d_bob_b1 * d.d_bob_b1 + dd * dd -
                                           2.0 * d.d_bob_b1 * dd *
                                               std::cos(d.theta0 + d.theta1 - psi));
        CHECK(lhs0 <= kSpeedOfLight * (obs.t_b0 - obs.t0) + 1e-3);
        CHECK(lhs1 <= kSpeedOfLight * (obs.t_b1 - obs.t0) + 1e-3);
    }
}

TEST_CASE("solver agrees with the brute-force grid within a meter") {
    RandomStream rng(99);
    int tested = 0;
    while (tested < 20) {
        const ProtocolLayout l = random_layout(rng);
        const TimingObservations obs = random_obs(l, rng);
        const CommitPointSolution sol = solve_commit_point(l, obs);
        const double brute = oracle::grid_commit_point(l, obs, 2001);
        CHECK(std::abs(sol.d_bob_pcommit - brute) < 1.0);
        ++tested;
    }
}

TEST_CASE("location exclusion on the reference run") {
    const LocationExclusion e = location_exclusion(paper_layout(), exp1_obs());
    CHECK(e.a0_excluded);
    CHECK(e.a1_excluded);
    const LocationExclusion ea = location_exclusion_approx(paper_layout(), exp1_obs());
    CHECK(ea.a0_excluded);
    CHECK(ea.a1_excluded);
}

TEST_CASE("location exclusion time-budget limits") {
    const ProtocolLayout l = paper_layout();
    TimingObservations obs = exp1_obs();
    obs.t_b1 = 1.0;  // effectively unbounded budget
    CHECK_FALSE(location_exclusion(l, obs).a0_excluded);
    obs.t_b1 = obs.t0 + 1e-12;  // no budget at all
    CHECK(location_exclusion(l, obs).a0_excluded);
}
