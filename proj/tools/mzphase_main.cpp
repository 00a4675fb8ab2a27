#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "mzphase/config.hpp"
#include "mzphase/experiment.hpp"
#include "mzphase/version.hpp"

namespace {

// exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical failure
constexpr int kConfigError = 2;
constexpr int kIoError = 3;
constexpr int kNumericalError = 4;

void print_summary(const mzphase::RunResult& result) {
    std::printf("%s: %zu sweep point(s) -> %s/\n", result.name.c_str(),
                result.rows.size(), result.config.outputs.directory.c_str());
    for (const auto& row : result.rows) {
        if (row.total_photons) {
            std::printf("  N=%-8g", *row.total_photons);
        } else {
            std::printf("  nu=%-7llu", static_cast<unsigned long long>(row.nu));
        }
        std::printf(" bias=(%+.3e, %+.3e) rmse=(%.3e, %.3e) crb=(%.3e, %.3e)"
                    " fail=%.3f\n",
                    row.bias_s, row.bias_d, row.rmse_s, row.rmse_d, row.crb_s,
                    row.crb_d, row.fail_rate);
    }
    if (result.fit_s && result.fit_d) {
        std::printf("  log-log slopes: rmse_s %.4f +/- %.4f, rmse_d %.4f +/- %.4f\n",
                    result.fit_s->slope, result.fit_s->slope_stderr,
                    result.fit_d->slope, result.fit_d->slope_stderr);
    }
    if (result.combo_bound) {
        std::printf("  combination bound: %.6e\n", *result.combo_bound);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-phase MZI estimation experiments"};
    app.set_version_flag("--version", std::string(mzphase::version));
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a configured experiment");
    std::string kind;
    run->add_option("kind", kind, "Experiment kind: fig2, fig3 or custom")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "custom"}));
    std::string config_path;
    run->add_option("--config", config_path, "Scenario config file (INI)")
        ->required();
    std::string out_dir;
    run->add_option("--out", out_dir, "Output directory (overrides config)");
    std::uint64_t seed = 0;
    auto* seed_opt = run->add_option("--seed", seed, "Base RNG seed (overrides config)");
    unsigned threads = 0;
    run->add_option("--threads", threads, "Worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigError;
    }

    try {
        mzphase::ScenarioConfig config = mzphase::parse_config_file(config_path);
        if (!out_dir.empty()) config.outputs.directory = out_dir;
        if (seed_opt->count() > 0) config.run.seed = seed;
        if (threads > 0) config.run.threads = threads;
        const mzphase::RunResult result = mzphase::run_and_emit(kind, config);
        print_summary(result);
        return 0;
    } catch (const mzphase::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const mzphase::OutputError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kIoError;
    } catch (const mzphase::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}
