#include "relbc/report.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include "relbc/units.hpp"

namespace relbc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    for (const auto& [k, v] : config_numbers(cfg)) j[k] = v;
    for (const auto& [k, v] : config_strings(cfg)) j[k] = v;
    return j;
}

ordered_json bound_json(const BindingBound& b) {
    ordered_json j;
    j["eps_b"] = b.eps_b;
    j["delta_star"] = b.delta_star;
    j["entropy_term"] = b.entropy_term;
    j["exponential_term"] = b.exponential_term;
    j["combinatorial_factor"] = b.combinatorial_factor;
    return j;
}

void append_row(std::string& table, const std::vector<std::string>& cells,
                const std::vector<int>& widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%*s", widths[i], cells[i].c_str());
        table += buf;
        if (i + 1 < cells.size()) table += "  ";
    }
    table += '\n';
}

}  // namespace

Report make_run_report(const RunConfig& config) {
    RunConfig cfg = config;
    cfg.resolve();

    Report rep;
    rep.json["report"] = "run";
    rep.json["config"] = config_json(cfg);

    const BindingBound bound = epsilon_b_bound(cfg.security);
    rep.json["bound"] = bound_json(bound);

    const AuxDistances aux = aux_distances(cfg.layout);
    rep.json["derived"]["d_a0_a1_m"] = aux.d_a0_a1;
    rep.json["derived"]["train_span_us"] =
        to_us((cfg.source.n_pulses - 1) / cfg.source.rep_rate);
    rep.json["derived"]["train_window_us"] = to_us(cfg.source.n_pulses / cfg.source.rep_rate);

    const std::vector<int> widths = {4, 9, 8, 8, 6, 7, 7, 10, 10, 10, 10, 8};
    std::string& table = rep.table;
    append_row(table,
               {"run", "committed", "deduced", "accepted", "n_e,i", "n_rect", "n_diag",
                "t_B0(us)", "t_B1(us)", "t_cmt(us)", "t_unv(us)", "reason"},
               widths);

    ordered_json runs = ordered_json::array();
    for (std::uint32_t r = 0; r < cfg.repetitions; ++r) {
        const int bit = cfg.committed_bit == -1 ? static_cast<int>(r % 2) : cfg.committed_bit;
        const std::uint64_t run_seed = mix_seed(cfg.seed, r);
        const HonestRunResult res = run_honest_protocol(cfg.layout, cfg.source, cfg.detector,
                                                        cfg.security, cfg.protocol, bit, run_seed);
        const auto& v = res.verdict;
        const auto& tr = res.transcript;
        const double t_commit = t_max_simple(tr.observations, aux.d_a0_a1);
        const std::uint32_t n_e_committed = bit == 0 ? v.estimation.n_e_rect : v.estimation.n_e_diag;

        ordered_json one;
        one["run"] = r;
        one["seed"] = run_seed;
        one["bit_committed"] = bit;
        one["accepted"] = v.accepted;
        if (v.deduced_bit)
            one["bit_deduced"] = *v.deduced_bit;
        else
            one["bit_deduced"] = nullptr;
        one["reason"] = to_string(v.reason);
        one["ambiguous"] = v.ambiguous;
        one["n_e_rect"] = v.estimation.n_e_rect;
        one["n_e_diag"] = v.estimation.n_e_diag;
        one["n_e_committed"] = n_e_committed;
        one["n_rect"] = v.estimation.n_rect;
        one["n_diag"] = v.estimation.n_diag;
        one["n_detect_rect"] = v.estimation.n_detect_rect;
        one["n_detect_diag"] = v.estimation.n_detect_diag;
        one["n_sent_rect"] = v.estimation.n_sent_rect;
        one["n_sent_diag"] = v.estimation.n_sent_diag;
        one["delta_multi_rect"] = v.estimation.delta_multi_rect;
        one["delta_multi_diag"] = v.estimation.delta_multi_diag;
        one["p_multi"] = v.estimation.p_multi;
        one["t_b0_us"] = to_us(tr.observations.t_b0);
        one["t_b1_us"] = to_us(tr.observations.t_b1);
        one["t_commit_us"] = to_us(t_commit);
        one["t_commit_upper_us"] = to_us(v.t_commit_upper);
        one["t_unveil_us"] = to_us(tr.t_unveil);
        one["basis_choice_us"] = to_us(tr.basis_choice_time);
        one["a0_excluded"] = v.a0_excluded;
        one["a1_excluded"] = v.a1_excluded;
        runs.push_back(one);

        append_row(table,
                   {std::to_string(r), std::to_string(bit),
                    v.deduced_bit ? std::to_string(*v.deduced_bit) : "-",
                    v.accepted ? "yes" : "no", std::to_string(n_e_committed),
                    std::to_string(v.estimation.n_rect), std::to_string(v.estimation.n_diag),
                    fmt("%.2f", to_us(tr.observations.t_b0)),
                    fmt("%.2f", to_us(tr.observations.t_b1)), fmt("%.2f", to_us(t_commit)),
                    fmt("%.2f", to_us(tr.t_unveil)), to_string(v.reason)},
                   widths);
    }
    rep.json["runs"] = runs;
    table += "eps_b = " + fmt("%.4g", bound.eps_b) +
             " (delta* = " + fmt("%.4f", bound.delta_star) + ") for N_tol = " +
             std::to_string(cfg.security.n_tol) + ", E_tol = " + fmt("%.3g", cfg.security.e_tol) +
             "\n";
    return rep;
}

Report make_bound_report(const RunConfig& config) {
    RunConfig cfg = config;
    cfg.resolve();

    Report rep;
    rep.json["report"] = "bound";
    rep.json["config"] = config_json(cfg);

    const BindingBound b = epsilon_b_bound(cfg.security);
    rep.json["bound"] = bound_json(b);
    const double p_multi = p_multi_bound(cfg.security.mu, cfg.security.intensity_fluctuation);
    rep.json["estimation"]["p_multi"] = p_multi;
    const std::uint64_t n_sent = cfg.source.n_pulses;
    rep.json["estimation"]["n_sent_per_basis"] = n_sent;
    const double dm = solve_delta_multi(p_multi, n_sent, cfg.security.eps_rect);
    rep.json["estimation"]["delta_multi"] = dm;

    std::string& t = rep.table;
    t += "eps_b             = " + fmt("%.6f", b.eps_b) + "\n";
    t += "delta*            = " + fmt("%.6f", b.delta_star) + "\n";
    t += "entropy term      = " + fmt("%.6e", b.entropy_term) + "\n";
    t += "exponential term  = " + fmt("%.6e", b.exponential_term) + "\n";
    t += "combinatorial fac = " + fmt("%.6g", b.combinatorial_factor) + "\n";
    t += "p_multi           = " + fmt("%.6f", p_multi) + "\n";
    t += "delta_multi       = " + fmt("%.6f", dm) + "\n";

    if (cfg.sweep.start > 0 && cfg.sweep.stop >= cfg.sweep.start) {
        ordered_json sweep = ordered_json::array();
        t += "\n n_tol      eps_b     delta*\n";
        SecurityParams sp = cfg.security;
        for (std::uint32_t n = cfg.sweep.start; n <= cfg.sweep.stop;
             n += std::max<std::uint32_t>(cfg.sweep.step, 1)) {
            sp.n_tol = n;
            const BindingBound bb = epsilon_b_bound(sp);
            ordered_json row;
            row["n_tol"] = n;
            row["eps_b"] = bb.eps_b;
            row["delta_star"] = bb.delta_star;
            sweep.push_back(row);
            t += fmt("%6.0f", static_cast<double>(n)) + "  " + fmt("%9.4g", bb.eps_b) + "  " +
                 fmt("%.4f", bb.delta_star) + "\n";
        }
        rep.json["sweep"] = sweep;
    }
    return rep;
}

Report make_geometry_report(const RunConfig& config) {
    RunConfig cfg = config;
    cfg.resolve();
    cfg.timing.validate();

    Report rep;
    rep.json["report"] = "geometry";
    rep.json["config"] = config_json(cfg);

    const DerivedDistances d = derived_distances(cfg.layout);
    const AuxDistances aux = aux_distances(cfg.layout);
    rep.json["derived"]["d_bob_b0_m"] = d.d_bob_b0;
    rep.json["derived"]["d_bob_b1_m"] = d.d_bob_b1;
    rep.json["derived"]["theta0_rad"] = d.theta0;
    rep.json["derived"]["theta1_rad"] = d.theta1;
    rep.json["derived"]["d_b0_b1_m"] = d.d_b0_b1;
    rep.json["derived"]["d_a0_a1_m"] = aux.d_a0_a1;

    const double tmax = t_max_simple(cfg.timing, aux.d_a0_a1);
    rep.json["t_max_simple_us"] = to_us(tmax);

    const CommitPointSolution sol = solve_commit_point(cfg.layout, cfg.timing);
    rep.json["commit_point"]["d_bob_pcommit_m"] = sol.d_bob_pcommit;
    rep.json["commit_point"]["psi_rad"] = sol.psi;
    rep.json["commit_point"]["t_commit_upper_us"] = to_us(sol.t_commit_upper);
    rep.json["commit_point"]["at_max_point"] = sol.at_max_point;

    const LocationExclusion ex = location_exclusion(cfg.layout, cfg.timing);
    const LocationExclusion exa = location_exclusion_approx(cfg.layout, cfg.timing);
    rep.json["exclusion"]["a0_excluded"] = ex.a0_excluded;
    rep.json["exclusion"]["a1_excluded"] = ex.a1_excluded;
    rep.json["exclusion"]["a0_excluded_approx"] = exa.a0_excluded;
    rep.json["exclusion"]["a1_excluded_approx"] = exa.a1_excluded;

    std::string& t = rep.table;
    t += "d_bob_b0          = " + fmt("%.3f", to_km(d.d_bob_b0)) + " km\n";
    t += "d_bob_b1          = " + fmt("%.3f", to_km(d.d_bob_b1)) + " km\n";
    t += "d_b0_b1           = " + fmt("%.3f", to_km(d.d_b0_b1)) + " km\n";
    t += "d_a0_a1           = " + fmt("%.3f", to_km(aux.d_a0_a1)) + " km\n";
    t += "t_max (simple)    = " + fmt("%.3f", to_us(tmax)) + " us\n";
    t += "t_commit_upper    = " + fmt("%.3f", to_us(sol.t_commit_upper)) + " us\n";
    t += "d_bob_pcommit     = " + fmt("%.3f", to_km(sol.d_bob_pcommit)) + " km\n";
    t += std::string("at_max_point      = ") + (sol.at_max_point ? "yes" : "no") + "\n";
    t += std::string("a0_excluded       = ") + (ex.a0_excluded ? "yes" : "no") + "\n";
    t += std::string("a1_excluded       = ") + (ex.a1_excluded ? "yes" : "no") + "\n";
    return rep;
}

Report make_attack_report(const RunConfig& config) {
    RunConfig cfg = config;
    cfg.resolve();

    Report rep;
    rep.json["report"] = "attack";
    rep.json["config"] = config_json(cfg);

    const std::string& strat = cfg.attack.strategy;
    AttackOutcome out;
    if (strat == "strong_pulse_double_click") {
        DoubleClickAttackParams p;
        p.intensity = cfg.attack.intensity;
        p.trials = cfg.attack.trials;
        if (cfg.attack.countermeasure == "discard_doubles")
            p.countermeasure = DoubleClickCountermeasure::discard_doubles;
        else if (cfg.attack.countermeasure == "random_assign")
            p.countermeasure = DoubleClickCountermeasure::random_assign;
        else
            throw ConfigError("attack.countermeasure", "expected discard_doubles or random_assign");
        out = bob_double_click_attack(p, cfg.detector, cfg.seed);
    } else if (strat == "dead_time_two_pulse" || strat == "dead_time_three_pulse") {
        DeadTimeAttackParams p;
        p.three_pulse = strat == "dead_time_three_pulse";
        p.intensity = cfg.attack.intensity;
        p.trials = cfg.attack.trials;
        p.separation = cfg.attack.separation;
        if (cfg.attack.countermeasure == "none")
            p.countermeasure = DeadTimeCountermeasure::none;
        else if (cfg.attack.countermeasure == "naive_separation")
            p.countermeasure = DeadTimeCountermeasure::naive_separation;
        else if (cfg.attack.countermeasure == "quiet_period_2tdead")
            p.countermeasure = DeadTimeCountermeasure::quiet_period_2tdead;
        else
            throw ConfigError("attack.countermeasure",
                              "expected none, naive_separation or quiet_period_2tdead");
        out = bob_dead_time_attack(p, cfg.detector, cfg.seed);
    } else if (strat == "multi_photon_split") {
        MultiPhotonAttackParams p;
        p.trials = cfg.attack.trials;
        p.estimation_enabled = cfg.attack.estimation_enabled;
        out = alice_multi_photon_attack(p, cfg.source, cfg.security, cfg.seed);
        rep.json["outcome"]["p0"] = out.p0;
        rep.json["outcome"]["p1"] = out.p1;
        rep.json["outcome"]["mean_detections"] = out.mean_detections;
        rep.json["outcome"]["eps_b"] = out.eps_b;
    } else if (strat == "delayed_commit") {
        DelayedCommitParams p;
        p.trials = cfg.attack.trials;
        p.t0 = cfg.protocol.t0;
        p.max_wait = cfg.attack.max_wait;
        out = alice_delayed_commit_attack(p, cfg.layout, cfg.seed);
        rep.json["outcome"]["max_commit_gap_us"] = to_us(out.max_commit_gap);
    } else {
        throw ConfigError("attack.strategy", "unknown strategy '" + strat + "'");
    }

    const bool bob_attacks = strat == "strong_pulse_double_click" ||
                             strat == "dead_time_two_pulse" || strat == "dead_time_three_pulse";
    rep.json["outcome"]["strategy"] = strat;
    rep.json["outcome"]["attacker"] = bob_attacks ? "Bob" : "Alice";
    rep.json["outcome"]["trials"] = out.trials;
    rep.json["outcome"]["success_count"] = out.success_count;
    rep.json["outcome"]["estimated_probability"] = out.estimated_probability;
    rep.json["outcome"]["wilson95_low"] = out.ci95.low;
    rep.json["outcome"]["wilson95_high"] = out.ci95.high;
    rep.json["outcome"]["guarantee_respected"] = out.guarantee_respected;

    std::string& t = rep.table;
    t += "strategy            = " + strat + "\n";
    t += "countermeasure      = " + cfg.attack.countermeasure + "\n";
    t += "trials              = " + std::to_string(out.trials) + "\n";
    t += "successes           = " + std::to_string(out.success_count) + "\n";
    t += "estimated prob      = " + fmt("%.4f", out.estimated_probability) + "\n";
    t += "wilson 95% interval = [" + fmt("%.4f", out.ci95.low) + ", " + fmt("%.4f", out.ci95.high) +
         "]\n";
    t += std::string("guarantee respected = ") + (out.guarantee_respected ? "yes" : "no") + "\n";
    return rep;
}

}  // namespace relbc
