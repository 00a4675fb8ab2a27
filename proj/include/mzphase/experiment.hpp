#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mzphase/config.hpp"
#include "mzphase/fisher.hpp"

namespace mzphase {

/// Raised on output I/O problems (unwritable directory, failed write).
/// Mapped to exit code 3 by the CLI.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a run hits a non-recoverable numerical problem.
/// Mapped to exit code 4 by the CLI.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One sweep point of a batch run. CSV columns, in order:
/// nu, bias_s, bias_d, rmse_s, rmse_d, crb_s, crb_d, fail_rate, seed
/// plus a trailing N column for total-photon sweeps.
struct SweepRow {
    std::uint64_t nu = 0;
    double bias_s = 0.0;
    double bias_d = 0.0;
    double rmse_s = 0.0;
    double rmse_d = 0.0;
    double stderr_s = 0.0;
    double stderr_d = 0.0;
    double crb_s = 0.0;       // standard-deviation bounds, not variances
    double crb_d = 0.0;
    double fail_rate = 0.0;
    std::uint64_t seed = 0;   // derived seed of this sweep point
    std::optional<double> total_photons;  // N column (fig3-style runs)
};

struct ScalingFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
};

struct RunResult {
    std::string name;  // fig2 | fig3 | custom
    std::string estimator_path;  // closed_form | numeric_mle
    std::vector<SweepRow> rows;
    ScenarioConfig config;  // fully resolved configuration
    std::optional<ScalingFit> fit_s;  // log rmse vs log N (fig3-style)
    std::optional<ScalingFit> fit_d;
    std::optional<ExactFim> fim;            // custom runs: FIM at truth
    std::optional<FisherMatrix> fim_asymptotic;
    std::optional<double> combo_bound;      // pseudo-inverse Phi bound
};

/// nu sweep at fixed probe (defaults: alpha1 = 0, |alpha2|^2 = 10, r = 1.7,
/// symmetric tuned LO). Per point: bias/rmse of the closed-form estimators
/// over the configured repetitions, asymptotic CRBs, failure rate.
RunResult run_fig2(const ScenarioConfig& config);

/// Total-photon sweep with N_c = N_s = N/2 derived per point
/// (alpha2 = sqrt(N/2), sinh^2 r = N/2, alpha1 = 0), plus least-squares
/// slopes of log rmse vs log N for both parameters (sweeps of three or
/// more points).
RunResult run_fig3(const ScenarioConfig& config);

/// Arbitrary scenario: any probe (alpha1 != 0 switches estimation to the
/// numeric MLE), tuned or explicit LOs, nu or N sweep axis. Additionally
/// evaluates the exact and asymptotic FIMs at the truth and, when
/// combo weights are configured, the pseudo-inverse combination bound.
RunResult run_custom(const ScenarioConfig& config);

/// CSV with a header row, '.' decimal separator, 17 significant digits.
void write_csv(const RunResult& result, const std::filesystem::path& path);

/// Sidecar metadata: resolved config, seed, tool version, per-column
/// provenance, fit/FIM extras. JSON text.
void write_metadata(const RunResult& result, const std::filesystem::path& path);

/// Self-contained SVG plots (no display server): bias vs sweep axis and
/// rmse vs sweep axis with the CRB reference curves; log-log axes for
/// total-photon sweeps. Returns the written file paths.
std::vector<std::filesystem::path> emit_plots(const RunResult& result,
                                              const std::filesystem::path& directory);

/// Runs the configured experiment and writes every enabled output into
/// config.outputs.directory. Returns the result table.
RunResult run_and_emit(const std::string& kind, const ScenarioConfig& config);

}  // namespace mzphase
