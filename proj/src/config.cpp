#include "relbc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace relbc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct UnitSuffix {
    const char* suffix;
    double scale;
};

// longest match first
constexpr UnitSuffix kUnits[] = {
    {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0},
    {"cps", 1.0}, {"deg", kPi / 180.0}, {"rad", 1.0},
    {"km", 1e3},  {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12},
    {"%", 0.01},  {"m", 1.0},   {"s", 1.0},
};

}  // namespace

double parse_quantity(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty quantity");
    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) throw std::invalid_argument("not a number: '" + s + "'");
    std::string suffix = trim(std::string(end));
    if (suffix.empty()) return value;
    for (const auto& u : kUnits)
        if (suffix == u.suffix) return value * u.scale;
    throw std::invalid_argument("unknown unit suffix '" + suffix + "'");
}

void RunConfig::resolve() {
    security.mu = source.mu;
    security.intensity_fluctuation = source.intensity_fluctuation;
    layout.validate();
    source.validate();
    detector.validate();
    security.validate();
    if (committed_bit < -1 || committed_bit > 1)
        throw ConfigError("run.committed_bit", "must be 0, 1 or alternate");
}

RunConfig default_config() { return RunConfig{}; }

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

double qty(const std::string& field, const std::string& value) {
    try {
        return parse_quantity(value);
    } catch (const std::exception& e) {
        throw ConfigError(field, e.what());
    }
}

std::uint64_t integer(const std::string& field, const std::string& value) {
    const double v = qty(field, value);
    if (v < 0 || std::abs(v - std::nearbyint(v)) > 1e-9)
        throw ConfigError(field, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(std::llround(v));
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"layout.d_alice_bob", [](RunConfig& c, const std::string& v) { c.layout.d_alice_bob = qty("layout.d_alice_bob", v); }},
        {"layout.d_alice_a0", [](RunConfig& c, const std::string& v) { c.layout.d_alice_a0 = qty("layout.d_alice_a0", v); }},
        {"layout.d_alice_a1", [](RunConfig& c, const std::string& v) { c.layout.d_alice_a1 = qty("layout.d_alice_a1", v); }},
        {"layout.d_a0_b0", [](RunConfig& c, const std::string& v) { c.layout.d_a0_b0 = qty("layout.d_a0_b0", v); }},
        {"layout.d_a1_b1", [](RunConfig& c, const std::string& v) { c.layout.d_a1_b1 = qty("layout.d_a1_b1", v); }},
        {"layout.theta", [](RunConfig& c, const std::string& v) { c.layout.theta = qty("layout.theta", v); }},
        {"layout.speed_alice_bob", [](RunConfig& c, const std::string& v) { c.layout.speed.alice_bob = qty("layout.speed_alice_bob", v); }},
        {"layout.speed_alice_a0", [](RunConfig& c, const std::string& v) { c.layout.speed.alice_a0 = qty("layout.speed_alice_a0", v); }},
        {"layout.speed_alice_a1", [](RunConfig& c, const std::string& v) { c.layout.speed.alice_a1 = qty("layout.speed_alice_a1", v); }},
        {"layout.speed_a0_b0", [](RunConfig& c, const std::string& v) { c.layout.speed.a0_b0 = qty("layout.speed_a0_b0", v); }},
        {"layout.speed_a1_b1", [](RunConfig& c, const std::string& v) { c.layout.speed.a1_b1 = qty("layout.speed_a1_b1", v); }},
        {"source.mu", [](RunConfig& c, const std::string& v) { c.source.mu = qty("source.mu", v); }},
        {"source.intensity_fluctuation", [](RunConfig& c, const std::string& v) { c.source.intensity_fluctuation = qty("source.intensity_fluctuation", v); }},
        {"source.rep_rate", [](RunConfig& c, const std::string& v) { c.source.rep_rate = qty("source.rep_rate", v); }},
        {"source.n_pulses", [](RunConfig& c, const std::string& v) { c.source.n_pulses = static_cast<std::uint32_t>(integer("source.n_pulses", v)); }},
        {"source.n_parallel", [](RunConfig& c, const std::string& v) { c.source.n_parallel = static_cast<std::uint32_t>(integer("source.n_parallel", v)); }},
        {"detector.efficiency", [](RunConfig& c, const std::string& v) { c.detector.efficiency = qty("detector.efficiency", v); }},
        {"detector.extra_optics_efficiency", [](RunConfig& c, const std::string& v) { c.detector.extra_optics_efficiency = qty("detector.extra_optics_efficiency", v); }},
        {"detector.dark_rate", [](RunConfig& c, const std::string& v) { c.detector.dark_rate = qty("detector.dark_rate", v); }},
        {"detector.dead_time", [](RunConfig& c, const std::string& v) { c.detector.dead_time = qty("detector.dead_time", v); }},
        {"detector.double_event_window", [](RunConfig& c, const std::string& v) { c.detector.double_event_window = qty("detector.double_event_window", v); }},
        {"security.n_tol", [](RunConfig& c, const std::string& v) { c.security.n_tol = static_cast<std::uint32_t>(integer("security.n_tol", v)); }},
        {"security.e_tol", [](RunConfig& c, const std::string& v) { c.security.e_tol = qty("security.e_tol", v); }},
        {"security.eps_rect", [](RunConfig& c, const std::string& v) { c.security.eps_rect = qty("security.eps_rect", v); }},
        {"security.eps_diag", [](RunConfig& c, const std::string& v) { c.security.eps_diag = qty("security.eps_diag", v); }},
        {"protocol.t0", [](RunConfig& c, const std::string& v) { c.protocol.t0 = qty("protocol.t0", v); }},
        {"protocol.classical_bitrate", [](RunConfig& c, const std::string& v) { c.protocol.classical_bitrate = qty("protocol.classical_bitrate", v); }},
        {"protocol.processing_delay", [](RunConfig& c, const std::string& v) { c.protocol.processing_delay = qty("protocol.processing_delay", v); }},
        {"protocol.reveal_hold", [](RunConfig& c, const std::string& v) { c.protocol.reveal_hold = qty("protocol.reveal_hold", v); }},
        {"protocol.baseline_error", [](RunConfig& c, const std::string& v) { c.protocol.baseline_error = qty("protocol.baseline_error", v); }},
        {"protocol.otp_key_bits", [](RunConfig& c, const std::string& v) { c.protocol.otp_key_bits = integer("protocol.otp_key_bits", v); }},
        {"run.committed_bit", [](RunConfig& c, const std::string& v) {
             if (trim(v) == "alternate") { c.committed_bit = -1; return; }
             const auto b = integer("run.committed_bit", v);
             if (b > 1) throw ConfigError("run.committed_bit", "must be 0, 1 or alternate");
             c.committed_bit = static_cast<int>(b);
         }},
        {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = integer("run.seed", v); }},
        {"run.repetitions", [](RunConfig& c, const std::string& v) { c.repetitions = static_cast<std::uint32_t>(integer("run.repetitions", v)); }},
        {"attack.strategy", [](RunConfig& c, const std::string& v) { c.attack.strategy = trim(v); }},
        {"attack.countermeasure", [](RunConfig& c, const std::string& v) { c.attack.countermeasure = trim(v); }},
        {"attack.intensity", [](RunConfig& c, const std::string& v) { c.attack.intensity = qty("attack.intensity", v); }},
        {"attack.trials", [](RunConfig& c, const std::string& v) { c.attack.trials = integer("attack.trials", v); }},
        {"attack.estimation", [](RunConfig& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "on" || t == "true" || t == "1") c.attack.estimation_enabled = true;
             else if (t == "off" || t == "false" || t == "0") c.attack.estimation_enabled = false;
             else throw ConfigError("attack.estimation", "expected on/off");
         }},
        {"attack.max_wait", [](RunConfig& c, const std::string& v) { c.attack.max_wait = qty("attack.max_wait", v); }},
        {"attack.separation", [](RunConfig& c, const std::string& v) { c.attack.separation = qty("attack.separation", v); }},
        {"bound.sweep_start", [](RunConfig& c, const std::string& v) { c.sweep.start = static_cast<std::uint32_t>(integer("bound.sweep_start", v)); }},
        {"bound.sweep_stop", [](RunConfig& c, const std::string& v) { c.sweep.stop = static_cast<std::uint32_t>(integer("bound.sweep_stop", v)); }},
        {"bound.sweep_step", [](RunConfig& c, const std::string& v) { c.sweep.step = static_cast<std::uint32_t>(integer("bound.sweep_step", v)); }},
        {"timing.t0", [](RunConfig& c, const std::string& v) { c.timing.t0 = qty("timing.t0", v); }},
        {"timing.t_b0", [](RunConfig& c, const std::string& v) { c.timing.t_b0 = qty("timing.t_b0", v); }},
        {"timing.t_b1", [](RunConfig& c, const std::string& v) { c.timing.t_b1 = qty("timing.t_b1", v); }},
    };
    return table;
}

}  // namespace

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    const auto it = setters().find(k);
    if (it == setters().end()) throw ConfigError(k, "unknown configuration key");
    it->second(cfg, trim(value));
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno), "expected key = value");
        apply_kv(cfg, t.substr(0, eq), t.substr(eq + 1));
    }
}

std::map<std::string, double> config_numbers(const RunConfig& c) {
    return {
        {"layout.d_alice_bob", c.layout.d_alice_bob},
        {"layout.d_alice_a0", c.layout.d_alice_a0},
        {"layout.d_alice_a1", c.layout.d_alice_a1},
        {"layout.d_a0_b0", c.layout.d_a0_b0},
        {"layout.d_a1_b1", c.layout.d_a1_b1},
        {"layout.theta", c.layout.theta},
        {"layout.speed_alice_bob", c.layout.speed.alice_bob},
        {"layout.speed_alice_a0", c.layout.speed.alice_a0},
        {"layout.speed_alice_a1", c.layout.speed.alice_a1},
        {"layout.speed_a0_b0", c.layout.speed.a0_b0},
        {"layout.speed_a1_b1", c.layout.speed.a1_b1},
        {"source.mu", c.source.mu},
        {"source.intensity_fluctuation", c.source.intensity_fluctuation},
        {"source.rep_rate", c.source.rep_rate},
        {"source.n_pulses", static_cast<double>(c.source.n_pulses)},
        {"source.n_parallel", static_cast<double>(c.source.n_parallel)},
        {"detector.efficiency", c.detector.efficiency},
        {"detector.extra_optics_efficiency", c.detector.extra_optics_efficiency},
        {"detector.dark_rate", c.detector.dark_rate},
        {"detector.dead_time", c.detector.dead_time},
        {"detector.double_event_window", c.detector.double_event_window},
        {"security.n_tol", static_cast<double>(c.security.n_tol)},
        {"security.e_tol", c.security.e_tol},
        {"security.eps_rect", c.security.eps_rect},
        {"security.eps_diag", c.security.eps_diag},
        {"protocol.t0", c.protocol.t0},
        {"protocol.classical_bitrate", c.protocol.classical_bitrate},
        {"protocol.processing_delay", c.protocol.processing_delay},
        {"protocol.reveal_hold", c.protocol.reveal_hold},
        {"protocol.baseline_error", c.protocol.baseline_error},
        {"protocol.otp_key_bits", static_cast<double>(c.protocol.otp_key_bits)},
        {"run.committed_bit", static_cast<double>(c.committed_bit)},
        {"run.seed", static_cast<double>(c.seed)},
        {"run.repetitions", static_cast<double>(c.repetitions)},
        {"attack.intensity", c.attack.intensity},
        {"attack.trials", static_cast<double>(c.attack.trials)},
        {"attack.estimation", c.attack.estimation_enabled ? 1.0 : 0.0},
        {"attack.max_wait", c.attack.max_wait},
        {"attack.separation", c.attack.separation},
        {"bound.sweep_start", static_cast<double>(c.sweep.start)},
        {"bound.sweep_stop", static_cast<double>(c.sweep.stop)},
        {"bound.sweep_step", static_cast<double>(c.sweep.step)},
        {"timing.t0", c.timing.t0},
        {"timing.t_b0", c.timing.t_b0},
        {"timing.t_b1", c.timing.t_b1},
    };
}

std::map<std::string, std::string> config_strings(const RunConfig& c) {
    return {
        {"attack.strategy", c.attack.strategy},
        {"attack.countermeasure", c.attack.countermeasure},
    };
}

}  // namespace relbc
