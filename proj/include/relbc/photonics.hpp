#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relbc/rng.hpp"

namespace relbc {

enum class Basis : std::uint8_t { rect = 0, diag = 1 };
const char* to_string(Basis b);

struct SourceParams {
    double mu = 0.183;                   // mean photon number per pulse
    double intensity_fluctuation = 0.10; // per-pulse mean drawn in mu*(1 +- this)
    double rep_rate = 50e6;              // pulses per second, per train
    std::uint32_t n_pulses = 2838;       // pulses per train
    std::uint32_t n_parallel = 2;        // parallel trains

    std::uint32_t total_pulses() const { return n_pulses * n_parallel; }
    void validate() const;
};

struct DetectorModel {
    double efficiency = 0.5;                // SPD detection efficiency
    double dark_rate = 100.0;               // counts per second, per detector
    double dead_time = 30e-9;               // seconds
    double extra_optics_efficiency = 0.9;   // transmission + collection
    double double_event_window = 60e-9;     // later of two events this close is dropped

    double total_efficiency() const { return efficiency * extra_optics_efficiency; }
    void validate() const;
};

struct PulseRecord {
    std::uint32_t index = 0;       // global index; trains are laid out back to back
    Basis basis = Basis::rect;
    std::uint8_t bit = 0;
    std::uint32_t photon_number = 0;
    double emit_time = 0.0;        // seconds
};

enum class ClickType : std::uint8_t { single_click, double_click, dark };
const char* to_string(ClickType t);

struct DetectionEvent {
    std::uint32_t pulse_index = 0;
    double click_time = 0.0;
    std::uint8_t outcome_bit = 0;
    ClickType raw_click_type = ClickType::single_click;
    bool retained = false;
};

// One pulse train per parallel system, basis and bit uniform i.i.d.,
// photon_number ~ Poisson(mu (1 + f)) with f uniform in [-delta, +delta] per
// pulse. emit_time = (index within train)/rep_rate + start_time.
std::vector<PulseRecord> generate_pulse_train(const SourceParams& src, std::uint64_t rng_seed,
                                              double start_time = 0.0);

// Raw per-pulse click pair before any dead-time or FPGA logic.
struct RawClick {
    std::uint32_t pulse_index = 0;
    double time = 0.0;
    bool det0 = false;        // detector for outcome bit 0 (H or +)
    bool det1 = false;        // detector for outcome bit 1 (V or -)
    bool photon0 = false;     // clicks caused by photons vs dark counts
    bool photon1 = false;
};

// Measures one pulse with both detectors live. Matched basis routes each
// photon to the correct detector with probability 1 - baseline_error;
// conjugate basis routes 50/50. Each photon is then seen with probability
// efficiency * extra_optics_efficiency; dark clicks are added per detector
// with probability dark_rate * gate_duration.
RawClick measure_pulse(const PulseRecord& pulse, Basis alice_basis, const DetectorModel& det,
                       double baseline_error, double gate_duration, RandomStream& rng);

// Full train measurement with per-detector dead-time gating: a detector that
// clicked at t stays blind until t + dead_time.
std::vector<RawClick> simulate_detection(std::span<const PulseRecord> pulses, Basis alice_basis,
                                         const DetectorModel& det, double baseline_error,
                                         double gate_duration, double arrival_delay,
                                         RandomStream& rng);

enum class DoubleClickRule : std::uint8_t { random_assign, discard };

// FPGA post-processing policy. quiet_window is the minimum click-free period
// (across both detectors) required before a click may be retained;
// later_event_window drops any click that close after a retained one. Zero
// disables the respective rule.
struct FpgaPolicy {
    DoubleClickRule double_rule = DoubleClickRule::random_assign;
    double quiet_window = 0.0;
    double later_event_window = 0.0;
};

// The countermeasure set actually deployed: random double-click assignment,
// 2 * dead_time quiet period, 60 ns later-event rule.
FpgaPolicy hardened_policy(const DetectorModel& det);

// Resolves double clicks (random bit or discard), applies the later-event
// window and the quiet-period rule. Clicks must be time-ordered. Every raw
// click yields an event; dropped ones carry retained = false.
std::vector<DetectionEvent> postselect_clicks(std::span<const RawClick> clicks,
                                              const DetectorModel& det, const FpgaPolicy& policy,
                                              RandomStream& rng);

inline std::vector<std::uint32_t> retained_indices(std::span<const DetectionEvent> events) {
    std::vector<std::uint32_t> out;
    for (const auto& e : events)
        if (e.retained) out.push_back(e.pulse_index);
    return out;
}

}  // namespace relbc
