#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relbc/config.hpp"
#include "relbc/report.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> reps;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value configuration file");
    cmd->add_option("--set", opts.sets, "override: section.key=value (repeatable)");
    cmd->add_option("--out,-o", opts.out_path, "write the JSON report to this path");
    cmd->add_option("--seed", opts.seed, "master random seed");
    cmd->add_option("--reps", opts.reps, "number of honest repetitions");
}

relbc::RunConfig build_config(const CommonOpts& opts) {
    relbc::RunConfig cfg = relbc::default_config();
    if (!opts.config_path.empty()) relbc::load_config_file(cfg, opts.config_path);
    for (const std::string& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw relbc::ConfigError(kv, "expected key=value");
        relbc::apply_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.reps) cfg.repetitions = *opts.reps;
    return cfg;
}

// Table to stdout, JSON document to --out. The JSON is written only after the
// whole report succeeded, so a failing run leaves no partial output.
int emit(const relbc::Report& report, const CommonOpts& opts) {
    std::cout << report.table;
    if (!opts.out_path.empty()) {
        std::ofstream out(opts.out_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write " << opts.out_path << "\n";
            return 1;
        }
        out << report.json.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relativistic bit-commitment simulator and security engine"};
    app.require_subcommand(1);

    CommonOpts run_opts, bound_opts, geo_opts, attack_opts;
    CLI::App* run = app.add_subcommand("run", "execute honest protocol repetitions");
    add_common(run, run_opts);
    CLI::App* bound = app.add_subcommand("bound", "compute the binding bound eps_b");
    add_common(bound, bound_opts);
    std::string sweep_spec;
    bound->add_option("--sweep", sweep_spec, "N_tol sweep as start:stop[:step]");
    CLI::App* geometry = app.add_subcommand("geometry", "commit-time bound and exclusions");
    add_common(geometry, geo_opts);
    std::string t0_s, tb0_s, tb1_s;
    geometry->add_option("--t0", t0_s, "observed t0 (e.g. 1.53us)");
    geometry->add_option("--tb0", tb0_s, "observed t_B0");
    geometry->add_option("--tb1", tb1_s, "observed t_B1");
    CLI::App* attack = app.add_subcommand("attack", "run a cheating strategy harness");
    add_common(attack, attack_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            return emit(relbc::make_run_report(build_config(run_opts)), run_opts);
        }
        if (bound->parsed()) {
            relbc::RunConfig cfg = build_config(bound_opts);
            if (!sweep_spec.empty()) {
                unsigned start = 0, stop = 0, step = 10;
                const int n = std::sscanf(sweep_spec.c_str(), "%u:%u:%u", &start, &stop, &step);
                if (n < 2) throw relbc::ConfigError("--sweep", "expected start:stop[:step]");
                cfg.sweep = {start, stop, step};
            }
            return emit(relbc::make_bound_report(cfg), bound_opts);
        }
        if (geometry->parsed()) {
            relbc::RunConfig cfg = build_config(geo_opts);
            if (!t0_s.empty()) cfg.timing.t0 = relbc::parse_quantity(t0_s);
            if (!tb0_s.empty()) cfg.timing.t_b0 = relbc::parse_quantity(tb0_s);
            if (!tb1_s.empty()) cfg.timing.t_b1 = relbc::parse_quantity(tb1_s);
            return emit(relbc::make_geometry_report(cfg), geo_opts);
        }
        if (attack->parsed()) {
            return emit(relbc::make_attack_report(build_config(attack_opts)), attack_opts);
        }
    } catch (const relbc::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
