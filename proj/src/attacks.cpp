#include "relbc/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "relbc/rng.hpp"
#include "relbc/units.hpp"

namespace relbc {

const char* to_string(AttackStrategy s) {
    switch (s) {
        case AttackStrategy::strong_pulse_double_click: return "strong_pulse_double_click";
        case AttackStrategy::dead_time_two_pulse: return "dead_time_two_pulse";
        case AttackStrategy::dead_time_three_pulse: return "dead_time_three_pulse";
        case AttackStrategy::multi_photon_split: return "multi_photon_split";
        case AttackStrategy::delayed_commit: return "delayed_commit";
    }
    return "?";
}

Attacker attacker_of(AttackStrategy s) {
    switch (s) {
        case AttackStrategy::strong_pulse_double_click:
        case AttackStrategy::dead_time_two_pulse:
        case AttackStrategy::dead_time_three_pulse: return Attacker::bob;
        case AttackStrategy::multi_photon_split:
        case AttackStrategy::delayed_commit: return Attacker::alice;
    }
    return Attacker::bob;
}

namespace {

// Bob's maximum-likelihood basis guess from the number of retained events he
// was told about, given what his pulse pattern predicts for each basis.
Basis guess_basis(std::size_t observed, std::size_t expect_rect, std::size_t expect_diag,
                  RandomStream& rng) {
    const auto dr = observed > expect_rect ? observed - expect_rect : expect_rect - observed;
    const auto dd = observed > expect_diag ? observed - expect_diag : expect_diag - observed;
    if (dr < dd) return Basis::rect;
    if (dd < dr) return Basis::diag;
    return rng.bit() ? Basis::diag : Basis::rect;
}

std::size_t run_pattern(const std::vector<PulseRecord>& pattern, Basis alice_basis,
                        const DetectorModel& det, const FpgaPolicy& policy, double gate,
                        RandomStream& rng) {
    const auto raw = simulate_detection(pattern, alice_basis, det, 0.0, gate, 0.0, rng);
    const auto events = postselect_clicks(raw, det, policy, rng);
    std::size_t retained = 0;
    for (const auto& e : events)
        if (e.retained) ++retained;
    return retained;
}

AttackOutcome finish_guess_outcome(std::uint64_t trials, std::uint64_t successes) {
    AttackOutcome out;
    out.trials = trials;
    out.success_count = successes;
    out.estimated_probability = trials ? static_cast<double>(successes) / trials : 0.0;
    out.ci95 = wilson95(successes, trials);
    // basis-guess guarantee: no better than chance, within 3 sigma
    const double sigma = trials ? std::sqrt(0.25 / static_cast<double>(trials)) : 0.0;
    out.guarantee_respected = out.estimated_probability <= 0.5 + 3.0 * sigma;
    return out;
}

}  // namespace

AttackOutcome bob_double_click_attack(const DoubleClickAttackParams& params,
                                      const DetectorModel& det, std::uint64_t seed) {
    det.validate();
    if (!(params.intensity >= 0.0))
        throw std::invalid_argument("double_click attack: intensity must be nonnegative");
    FpgaPolicy policy = hardened_policy(det);
    policy.double_rule = params.countermeasure == DoubleClickCountermeasure::discard_doubles
                             ? DoubleClickRule::discard
                             : DoubleClickRule::random_assign;
    const bool discard = policy.double_rule == DoubleClickRule::discard;
    const std::size_t expect_rect = 1;
    const std::size_t expect_diag = discard ? 0 : 1;

    std::uint64_t successes = 0;
    for (std::uint64_t t = 0; t < params.trials; ++t) {
        RandomStream rng(mix_seed(seed, t));
        const Basis alice_basis = rng.bit() ? Basis::diag : Basis::rect;
        std::vector<PulseRecord> pattern(1);
        pattern[0] = PulseRecord{0, Basis::rect, 0, rng.poisson(params.intensity), 0.0};
        const std::size_t n = run_pattern(pattern, alice_basis, det, policy, 20e-9, rng);
        if (guess_basis(n, expect_rect, expect_diag, rng) == alice_basis) ++successes;
    }
    return finish_guess_outcome(params.trials, successes);
}

AttackOutcome bob_dead_time_attack(const DeadTimeAttackParams& params, const DetectorModel& det,
                                   std::uint64_t seed) {
    det.validate();
    FpgaPolicy policy;  // double clicks randomly assigned in every variant
    switch (params.countermeasure) {
        case DeadTimeCountermeasure::none:
            policy = FpgaPolicy{DoubleClickRule::random_assign, 0.0, 0.0};
            break;
        case DeadTimeCountermeasure::naive_separation:
            policy = FpgaPolicy{DoubleClickRule::random_assign, det.dead_time, 0.0};
            break;
        case DeadTimeCountermeasure::quiet_period_2tdead:
            policy = hardened_policy(det);
            break;
    }

    const double td = det.dead_time;
    const double gap = params.separation > 0.0 ? params.separation : 0.5 * td;
    std::vector<PulseRecord> pattern;
    if (params.three_pulse) {
        pattern = {PulseRecord{0, Basis::rect, 0, 0, 0.0},
                   PulseRecord{1, Basis::rect, 1, 0, gap},
                   PulseRecord{2, Basis::rect, 1, 0, 1.05 * td}};
    } else {
        pattern = {PulseRecord{0, Basis::rect, 0, 0, 0.0},
                   PulseRecord{1, Basis::rect, 1, 0, gap}};
    }

    // retained-count fingerprint of the pattern per basis
    std::size_t expect_rect, expect_diag;
    if (params.three_pulse) {
        switch (params.countermeasure) {
            case DeadTimeCountermeasure::none: expect_rect = 2; expect_diag = 2; break;
            case DeadTimeCountermeasure::naive_separation: expect_rect = 1; expect_diag = 2; break;
            default: expect_rect = 1; expect_diag = 1; break;
        }
    } else {
        switch (params.countermeasure) {
            case DeadTimeCountermeasure::none: expect_rect = 2; expect_diag = 1; break;
            default: expect_rect = 1; expect_diag = 1; break;
        }
    }

    std::uint64_t successes = 0;
    for (std::uint64_t t = 0; t < params.trials; ++t) {
        RandomStream rng(mix_seed(seed, t));
        const Basis alice_basis = rng.bit() ? Basis::diag : Basis::rect;
        auto pulses = pattern;
        for (auto& p : pulses) p.photon_number = rng.poisson(params.intensity);
        const std::size_t n = run_pattern(pulses, alice_basis, det, policy, 20e-9, rng);
        if (guess_basis(n, expect_rect, expect_diag, rng) == alice_basis) ++successes;
    }
    return finish_guess_outcome(params.trials, successes);
}

AttackOutcome alice_multi_photon_attack(const MultiPhotonAttackParams& params,
                                        const SourceParams& src, const SecurityParams& sec,
                                        std::uint64_t seed) {
    src.validate();
    sec.validate();
    AttackOutcome out;
    out.trials = params.trials;
    out.eps_b = sec.n_tol >= 2 ? epsilon_b_bound(sec).eps_b : 1.0;

    std::uint64_t acc0 = 0, acc1 = 0, both = 0;
    double detections_total = 0.0;
    for (std::uint64_t t = 0; t < params.trials; ++t) {
        RandomStream rng(mix_seed(seed, 1000 + t));
        const auto pulses = generate_pulse_train(src, mix_seed(seed, t));

        // QND photon-number measurement: keep multi-photon pulses, measure one
        // photon in each basis, hand both outcome sets to the agents.
        Declaration open0, open1;
        std::vector<std::uint32_t> reported;
        for (const auto& p : pulses) {
            if (p.photon_number < 2) continue;
            reported.push_back(p.index);
            open0.indices.push_back(p.index);
            open1.indices.push_back(p.index);
            open0.bits.push_back(p.basis == Basis::rect ? p.bit
                                                        : static_cast<std::uint8_t>(rng.bit()));
            open1.bits.push_back(p.basis == Basis::diag ? p.bit
                                                        : static_cast<std::uint8_t>(rng.bit()));
        }
        detections_total += static_cast<double>(reported.size());

        VerifyInputs in;
        in.bob_pulses = pulses;
        in.reported_detected = reported;
        in.estimation_enabled = params.estimation_enabled;
        in.from_a0 = open0;
        in.from_a1 = open0;
        const bool ok0 = verify(sec, in).accepted;
        in.from_a0 = open1;
        in.from_a1 = open1;
        const bool ok1 = verify(sec, in).accepted;
        acc0 += ok0;
        acc1 += ok1;
        both += ok0 && ok1;
    }

    out.success_count = both;
    out.estimated_probability = params.trials ? static_cast<double>(both) / params.trials : 0.0;
    out.ci95 = wilson95(both, params.trials);
    out.p0 = params.trials ? static_cast<double>(acc0) / params.trials : 0.0;
    out.p1 = params.trials ? static_cast<double>(acc1) / params.trials : 0.0;
    out.mean_detections = params.trials ? detections_total / params.trials : 0.0;
    const double n = static_cast<double>(std::max<std::uint64_t>(params.trials, 1));
    const double sigma =
        std::sqrt(out.p0 * (1.0 - out.p0) / n + out.p1 * (1.0 - out.p1) / n);
    out.guarantee_respected = out.p0 + out.p1 - 1.0 <= out.eps_b + 3.0 * sigma;
    return out;
}

AttackOutcome alice_delayed_commit_attack(const DelayedCommitParams& params,
                                          const ProtocolLayout& layout, std::uint64_t seed) {
    layout.validate();
    const PartyPositions pos = party_positions(layout);
    const DerivedDistances der = derived_distances(layout);
    const double r_cap = 1.2 * std::max(der.d_bob_b0, der.d_bob_b1);

    AttackOutcome out;
    out.trials = params.trials;
    out.max_commit_gap = -std::numeric_limits<double>::infinity();

    std::uint64_t sound = 0;
    for (std::uint64_t t = 0; t < params.trials; ++t) {
        RandomStream rng(mix_seed(seed, t));
        // commitment point in the wedge spanned by Bob->B0 and Bob->B1
        const double phi = rng.uniform(-der.theta1, der.theta0);
        const double r = rng.uniform(0.0, r_cap);
        const Vec2 p{pos.bob.x + r * std::cos(phi), pos.bob.y + r * std::sin(phi)};

        const double t_arrive = r / kSpeedOfLight;
        const double t_commit = t_arrive + rng.uniform(0.0, params.max_wait);
        const double delay_b0 =
            rng.bernoulli(params.agent_delay_prob) ? rng.uniform(0.0, params.max_agent_delay) : 0.0;
        const double delay_b1 =
            rng.bernoulli(params.agent_delay_prob) ? rng.uniform(0.0, params.max_agent_delay) : 0.0;

        TimingObservations obs;
        obs.t0 = params.t0;
        obs.t_b0 = params.t0 + t_commit + distance(p, pos.b0) / kSpeedOfLight + delay_b0;
        obs.t_b1 = params.t0 + t_commit + distance(p, pos.b1) / kSpeedOfLight + delay_b1;

        const CommitPointSolution sol = solve_commit_point(layout, obs);
        const double gap = t_commit - sol.t_commit_upper;
        out.max_commit_gap = std::max(out.max_commit_gap, gap);
        if (gap <= 2e-9) ++sound;
    }
    if (params.trials == 0) out.max_commit_gap = 0.0;
    out.success_count = sound;
    out.estimated_probability = params.trials ? static_cast<double>(sound) / params.trials : 0.0;
    out.ci95 = wilson95(sound, params.trials);
    out.guarantee_respected = sound == params.trials;
    return out;
}

PointCommitCheck check_commit_at_point(const ProtocolLayout& layout, Vec2 point,
                                       const TimingObservations& target) {
    target.validate();
    const PartyPositions pos = party_positions(layout);
    PointCommitCheck chk;
    const double deadline0 = target.t_b0 - target.t0 - distance(point, pos.b0) / kSpeedOfLight;
    const double deadline1 = target.t_b1 - target.t0 - distance(point, pos.b1) / kSpeedOfLight;
    chk.latest_commit = std::min(deadline0, deadline1);
    const double arrival = distance(point, pos.bob) / kSpeedOfLight;
    chk.feasible = chk.latest_commit >= arrival;
    chk.exclusions = location_exclusion(layout, target);
    return chk;
}

}  // namespace relbc
