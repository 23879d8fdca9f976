#pragma once

#include <cstdint>

#include "relbc/geometry.hpp"
#include "relbc/photonics.hpp"
#include "relbc/security.hpp"
#include "relbc/stats.hpp"

namespace relbc {

enum class AttackStrategy : std::uint8_t {
    strong_pulse_double_click,
    dead_time_two_pulse,
    dead_time_three_pulse,
    multi_photon_split,
    delayed_commit,
};
const char* to_string(AttackStrategy s);

enum class Attacker : std::uint8_t { alice, bob };
Attacker attacker_of(AttackStrategy s);

enum class DoubleClickCountermeasure : std::uint8_t { discard_doubles, random_assign };
enum class DeadTimeCountermeasure : std::uint8_t { none, naive_separation, quiet_period_2tdead };

struct AttackOutcome {
    std::uint64_t trials = 0;
    std::uint64_t success_count = 0;
    double estimated_probability = 0.0;
    WilsonInterval ci95;
    bool guarantee_respected = true;

    // strategy-specific extras
    double p0 = 0.0;               // multi-photon: per-bit acceptance rates
    double p1 = 0.0;
    double eps_b = 0.0;            // bound the empirical cheating is compared against
    double mean_detections = 0.0;  // multi-photon: average reported detections
    double max_commit_gap = 0.0;   // delayed commit: max(actual - bound), seconds
};

// Bob probes the committed basis with one very strong horizontally polarized
// pulse per trial: rectilinear measurement sees a single click, diagonal a
// double click. Discarding doubles leaks the basis through the detection
// report; random assignment does not.
struct DoubleClickAttackParams {
    DoubleClickCountermeasure countermeasure = DoubleClickCountermeasure::random_assign;
    double intensity = 1000.0;
    std::uint64_t trials = 10000;
};
AttackOutcome bob_double_click_attack(const DoubleClickAttackParams& params,
                                      const DetectorModel& det, std::uint64_t seed);

// Bob exploits detector dead time. Two-pulse variant: H then V inside one
// dead time (beats an FPGA that reports every click). Three-pulse variant:
// H at t, V at t + dead/2, V slightly after t + dead (beats the rule that
// merely spaces accepted clicks by more than the dead time). The deployed
// countermeasure retains a click only after 2 * dead_time of silence.
struct DeadTimeAttackParams {
    bool three_pulse = true;
    DeadTimeCountermeasure countermeasure = DeadTimeCountermeasure::quiet_period_2tdead;
    double intensity = 1000.0;
    std::uint64_t trials = 10000;
    double separation = 0.0;  // first-to-second pulse gap; 0 = dead_time / 2
};
AttackOutcome bob_dead_time_attack(const DeadTimeAttackParams& params, const DetectorModel& det,
                                   std::uint64_t seed);

// Alice measures the photon number of every pulse nondestructively, keeps
// only multi-photon pulses and measures one photon in each basis, then lets
// the agents unveil either bit. p0/p1 report how often each opening passes
// verification; the estimation step is what starves this strategy.
struct MultiPhotonAttackParams {
    std::uint64_t trials = 20;
    bool estimation_enabled = true;
};
AttackOutcome alice_multi_photon_attack(const MultiPhotonAttackParams& params,
                                        const SourceParams& src, const SecurityParams& sec,
                                        std::uint64_t seed);

// Alice stores the signals in a quantum memory, rides at light speed to a
// commitment point, commits as late as the reveal deadlines allow and
// forwards the results at light speed. Soundness demands her actual commit
// time never exceeds the verifier's bound computed from the observed arrival
// times.
struct DelayedCommitParams {
    std::uint64_t trials = 1000;
    double t0 = 1.53e-6;
    double max_wait = 50e-6;        // waiting budget beyond light-speed arrival
    double agent_delay_prob = 0.25; // chance of an artificial per-agent reveal delay
    double max_agent_delay = 200e-6;
};
AttackOutcome alice_delayed_commit_attack(const DelayedCommitParams& params,
                                          const ProtocolLayout& layout, std::uint64_t seed);

// Feasibility of committing at a fixed point while hitting a target reveal
// schedule; used to test claims like "these observations rule out the agent
// locations".
struct PointCommitCheck {
    bool feasible = false;
    double latest_commit = 0.0;  // seconds after t0
    LocationExclusion exclusions;
};
PointCommitCheck check_commit_at_point(const ProtocolLayout& layout, Vec2 point,
                                       const TimingObservations& target);

}  // namespace relbc
