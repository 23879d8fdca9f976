#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "relbc/attacks.hpp"
#include "relbc/geometry.hpp"
#include "relbc/photonics.hpp"
#include "relbc/protocol.hpp"
#include "relbc/security.hpp"

namespace relbc {

// Bad key, bad value or malformed file; carries the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Parses "9.3km", "30ns", "50MHz", "1.5%", "165deg", plain numbers, ... into
// SI units (meters, seconds, hertz, radians, plain fractions).
double parse_quantity(const std::string& text);

struct AttackSettings {
    std::string strategy = "strong_pulse_double_click";
    std::string countermeasure = "random_assign";
    double intensity = 1000.0;
    std::uint64_t trials = 10000;
    bool estimation_enabled = true;
    double max_wait = 50e-6;
    double separation = 0.0;  // dead-time attack pulse gap; 0 = dead_time / 2
};

struct SweepSettings {
    std::uint32_t start = 0;  // start == 0 disables the sweep
    std::uint32_t stop = 0;
    std::uint32_t step = 10;
};

// Full resolved run configuration; defaults reproduce the reference
// experiment (9.3 km / 12.3 km arms at 165 degrees, mu = 0.183 +- 10%,
// 2 x 2838 pulses at 50 MHz, 45% total efficiency, 100 cps dark counts,
// 30 ns dead time, 60 ns double-event window, N_tol = 107, E_tol = 1.5%,
// eps_rect = eps_diag = 0.21e-2).
struct RunConfig {
    ProtocolLayout layout;
    SourceParams source;
    DetectorModel detector;
    SecurityParams security;  // mu / fluctuation mirrored from source on resolve()
    ProtocolConfig protocol;
    int committed_bit = -1;  // -1 = alternate per repetition
    std::uint64_t seed = 11;
    std::uint32_t repetitions = 8;
    AttackSettings attack;
    SweepSettings sweep;
    TimingObservations timing{1.53e-6, 92.85e-6, 102.74e-6};

    // pushes source parameters into the security block and validates
    void resolve();
};

RunConfig default_config();

// Applies one "section.key = value" assignment. Unknown keys or unparsable
// values raise ConfigError with the field path.
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Flat key = value file; '#' starts a comment, blank lines ignored.
void load_config_file(RunConfig& cfg, const std::string& path);

// The resolved configuration as an ordered key -> value map (audit trail
// embedded in every report).
std::map<std::string, double> config_numbers(const RunConfig& cfg);
std::map<std::string, std::string> config_strings(const RunConfig& cfg);

}  // namespace relbc
