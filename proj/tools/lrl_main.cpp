#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lrl/errors.hpp"
#include "lrl/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool has_seed = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("config", args.config_path, "experiment config file")->required();
    sub->add_option("--out", args.out_override, "override output.path");
    sub->add_option("--seed", args.seed_override, "override sampling.seed")
        ->each([&args](const std::string&) { args.has_seed = true; });
}

lrl::ExperimentConfig load(const CommonArgs& args) {
    lrl::ExperimentConfig cfg = lrl::load_config(args.config_path);
    if (!args.out_override.empty()) cfg.output_path = args.out_override;
    if (args.has_seed) cfg.seed = args.seed_override;
    return cfg;
}

void echo_config(const lrl::ExperimentConfig& cfg) {
    std::istringstream lines(cfg.echo());
    std::string line;
    while (std::getline(lines, line)) std::cout << "# " << line << '\n';
}

int run_csv_command(const lrl::ExperimentConfig& cfg, const std::string& default_name,
                    const std::function<lrl::RunSummary(std::ostream&)>& body) {
    const std::string path = cfg.output_path.empty() ? default_name : cfg.output_path;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file '" << path << "'\n";
        return lrl::exit_usage;
    }
    const lrl::RunSummary summary = body(out);
    out.close();
    if (!out) {
        std::cerr << "error: failed writing '" << path << "'\n";
        return lrl::exit_usage;
    }
    echo_config(cfg);
    std::cout << "wrote " << summary.rows << " rows to " << path << "\n";
    std::cout << (summary.all_pass ? "all rows pass\n" : "some rows FAIL\n");
    return summary.all_pass ? lrl::exit_ok : lrl::exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lrl - oscillator-lattice locality toolkit"};
    app.require_subcommand(1);

    CommonArgs kernels_args, sweep_args, verify_args, bounds_args;
    std::string mode_str = "harmonic";

    CLI::App* kernels = app.add_subcommand("kernels", "propagation kernel tables with decay margins");
    add_common(kernels, kernels_args);
    CLI::App* sweep = app.add_subcommand("sweep", "bracket-vs-envelope sweep over the schedule");
    add_common(sweep, sweep_args);
    sweep->add_option("--mode", mode_str, "harmonic|anharmonic|multisite")
        ->check(CLI::IsMember({"harmonic", "anharmonic", "multisite"}))
        ->required();
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
    add_common(verify, verify_args);
    CLI::App* bounds = app.add_subcommand("bounds", "print constants and velocities");
    add_common(bounds, bounds_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? lrl::exit_ok : lrl::exit_usage;
    }

    try {
        if (kernels->parsed()) {
            const auto cfg = load(kernels_args);
            return run_csv_command(cfg, "kernels.csv",
                                   [&](std::ostream& out) { return lrl::run_kernels(cfg, out); });
        }
        if (sweep->parsed()) {
            const auto cfg = load(sweep_args);
            const lrl::SweepMode mode =
                mode_str == "harmonic"
                    ? lrl::SweepMode::harmonic
                    : mode_str == "anharmonic" ? lrl::SweepMode::anharmonic
                                               : lrl::SweepMode::multisite;
            return run_csv_command(cfg, "sweep.csv", [&](std::ostream& out) {
                return lrl::run_sweep(cfg, mode, out);
            });
        }
        if (verify->parsed()) {
            const auto cfg = load(verify_args);
            if (!cfg.output_path.empty()) {
                std::ofstream out(cfg.output_path, std::ios::binary);
                if (!out) {
                    std::cerr << "error: cannot open output file '" << cfg.output_path << "'\n";
                    return lrl::exit_usage;
                }
                return lrl::run_verify(cfg, out) ? lrl::exit_ok : lrl::exit_check_failed;
            }
            return lrl::run_verify(cfg, std::cout) ? lrl::exit_ok : lrl::exit_check_failed;
        }
        if (bounds->parsed()) {
            const auto cfg = load(bounds_args);
            if (!cfg.output_path.empty()) {
                std::ofstream out(cfg.output_path, std::ios::binary);
                if (!out) {
                    std::cerr << "error: cannot open output file '" << cfg.output_path << "'\n";
                    return lrl::exit_usage;
                }
                lrl::run_bounds(cfg, out);
            } else {
                lrl::run_bounds(cfg, std::cout);
            }
            return lrl::exit_ok;
        }
    } catch (const lrl::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrl::exit_usage;
    } catch (const lrl::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrl::exit_divergence;
    } catch (const lrl::AssumptionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrl::exit_check_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrl::exit_usage;
    }
    return lrl::exit_usage;
}
