#include "relbc/photonics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace relbc {

const char* to_string(Basis b) { return b == Basis::rect ? "rect" : "diag"; }

const char* to_string(ClickType t) {
    switch (t) {
        case ClickType::single_click: return "single";
        case ClickType::double_click: return "double";
        case ClickType::dark: return "dark";
    }
    return "?";
}

void SourceParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("source: mu must be positive");
    if (!(intensity_fluctuation >= 0.0) || intensity_fluctuation >= 1.0)
        throw std::invalid_argument("source: intensity_fluctuation must lie in [0, 1)");
    if (!(rep_rate > 0.0)) throw std::invalid_argument("source: rep_rate must be positive");
    if (n_pulses == 0 || n_parallel == 0)
        throw std::invalid_argument("source: pulse counts must be positive");
}

void DetectorModel::validate() const {
    if (!(efficiency >= 0.0) || efficiency > 1.0 || !(extra_optics_efficiency >= 0.0) ||
        extra_optics_efficiency > 1.0)
        throw std::invalid_argument("detector: efficiencies must lie in [0, 1]");
    if (!(dead_time > 0.0)) throw std::invalid_argument("detector: dead_time must be positive");
    if (dark_rate < 0.0) throw std::invalid_argument("detector: dark_rate must be nonnegative");
    if (double_event_window < 0.0)
        throw std::invalid_argument("detector: double_event_window must be nonnegative");
}

std::vector<PulseRecord> generate_pulse_train(const SourceParams& src, std::uint64_t rng_seed,
                                              double start_time) {
    src.validate();
    RandomStream rng(rng_seed);
    std::vector<PulseRecord> pulses;
    pulses.reserve(src.total_pulses());
    const double period = 1.0 / src.rep_rate;
    for (std::uint32_t train = 0; train < src.n_parallel; ++train) {
        for (std::uint32_t k = 0; k < src.n_pulses; ++k) {
            PulseRecord p;
            p.index = train * src.n_pulses + k;
            p.basis = rng.bit() ? Basis::diag : Basis::rect;
            p.bit = static_cast<std::uint8_t>(rng.bit());
            const double f = src.intensity_fluctuation > 0.0
                                 ? rng.uniform(-src.intensity_fluctuation, src.intensity_fluctuation)
                                 : 0.0;
            p.photon_number = rng.poisson(src.mu * (1.0 + f));
            p.emit_time = start_time + k * period;
            pulses.push_back(p);
        }
    }
    return pulses;
}

RawClick measure_pulse(const PulseRecord& pulse, Basis alice_basis, const DetectorModel& det,
                       double baseline_error, double gate_duration, RandomStream& rng) {
    RawClick click;
    click.pulse_index = pulse.index;
    click.time = pulse.emit_time;

    const double eta = det.total_efficiency();
    for (std::uint32_t i = 0; i < pulse.photon_number; ++i) {
        int detector;
        if (pulse.basis == alice_basis) {
            detector = rng.bernoulli(baseline_error) ? 1 - pulse.bit : pulse.bit;
        } else {
            detector = rng.bit();
        }
        if (!rng.bernoulli(eta)) continue;
        if (detector == 0)
            click.det0 = click.photon0 = true;
        else
            click.det1 = click.photon1 = true;
    }
    const double p_dark = det.dark_rate * gate_duration;
    if (p_dark > 0.0) {
        if (rng.bernoulli(p_dark)) click.det0 = true;
        if (rng.bernoulli(p_dark)) click.det1 = true;
    }
    return click;
}

std::vector<RawClick> simulate_detection(std::span<const PulseRecord> pulses, Basis alice_basis,
                                         const DetectorModel& det, double baseline_error,
                                         double gate_duration, double arrival_delay,
                                         RandomStream& rng) {
    det.validate();
    std::vector<RawClick> clicks;
    double dead_until[2] = {-1.0, -1.0};
    for (const PulseRecord& pulse : pulses) {
        RawClick c = measure_pulse(pulse, alice_basis, det, baseline_error, gate_duration, rng);
        c.time = pulse.emit_time + arrival_delay;
        if (c.det0 && c.time < dead_until[0]) c.det0 = c.photon0 = false;
        if (c.det1 && c.time < dead_until[1]) c.det1 = c.photon1 = false;
        if (!c.det0 && !c.det1) continue;
        if (c.det0) dead_until[0] = c.time + det.dead_time;
        if (c.det1) dead_until[1] = c.time + det.dead_time;
        clicks.push_back(c);
    }
    return clicks;
}

FpgaPolicy hardened_policy(const DetectorModel& det) {
    return FpgaPolicy{DoubleClickRule::random_assign, 2.0 * det.dead_time,
                      det.double_event_window};
}

std::vector<DetectionEvent> postselect_clicks(std::span<const RawClick> clicks,
                                              const DetectorModel& det, const FpgaPolicy& policy,
                                              RandomStream& rng) {
    (void)det;
    std::vector<DetectionEvent> events;
    events.reserve(clicks.size());
    double last_click_time = -std::numeric_limits<double>::infinity();
    double last_retained_time = -std::numeric_limits<double>::infinity();
    for (const RawClick& c : clicks) {
        if (c.time < last_click_time)
            throw std::invalid_argument("postselect_clicks: clicks must be time-ordered");
        DetectionEvent e;
        e.pulse_index = c.pulse_index;
        e.click_time = c.time;

        const bool is_double = c.det0 && c.det1;
        const bool photon_caused = c.photon0 || c.photon1;
        e.raw_click_type = is_double ? ClickType::double_click
                                     : (photon_caused ? ClickType::single_click : ClickType::dark);
        bool keep = true;
        if (is_double) {
            if (policy.double_rule == DoubleClickRule::random_assign)
                e.outcome_bit = static_cast<std::uint8_t>(rng.bit());
            else
                keep = false;
        } else {
            e.outcome_bit = c.det1 ? 1 : 0;
        }
        if (policy.quiet_window > 0.0 && c.time - last_click_time < policy.quiet_window)
            keep = false;
        if (policy.later_event_window > 0.0 &&
            c.time - last_retained_time < policy.later_event_window)
            keep = false;
        e.retained = keep;
        if (keep) last_retained_time = c.time;
        last_click_time = c.time;
        events.push_back(e);
    }
    return events;
}

}  // namespace relbc
