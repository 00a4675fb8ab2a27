#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mzphase {

/// Raised on malformed or inconsistent configuration; the message names the
/// offending section.key. Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { none, nu, total_photons };

/// Scenario for an experiment run, read from an INI-style file with
/// [section] headers and key = value lines. Defaults reproduce the reference
/// study configurations; every resolved value is echoed into the run
/// metadata.
struct ScenarioConfig {
    struct Probe {
        double alpha1 = 0.0;
        double alpha2 = 3.16227766016837933;  // |alpha2|^2 = 10
        double r = 1.7;
    } probe;

    struct Truth {
        double phi_s = 0.7;
        double phi_d = 1.1;
    } truth;

    struct Lo {
        bool tuned = true;
        double k1 = 0.25;
        double k2 = 0.25;
        double theta1 = 0.0;  // explicit mode
        double theta2 = 0.0;
    } lo;

    struct Run {
        std::uint64_t nu = 2000;
        std::uint64_t repetitions = 200;
        std::uint64_t seed = 20240901;
        unsigned threads = 0;  // 0: hardware concurrency
    } run;

    struct Sweep {
        SweepAxis axis = SweepAxis::none;
        std::vector<double> values;
    } sweep;

    struct Outputs {
        std::string directory = "out";
        bool csv = true;
        bool metadata = true;
        bool plots = true;
    } outputs;

    /// Optional (w_s, w_d) for the pseudo-inverse linear-combination bound
    /// emitted by custom runs.
    std::optional<std::pair<double, double>> combo_weights;
};

/// Parses an INI-style config file. Unknown sections or keys are errors, as
/// are non-numeric values where numbers are expected.
ScenarioConfig parse_config_file(const std::filesystem::path& path);

/// Same, from an in-memory string (the origin name is used in messages).
ScenarioConfig parse_config(const std::string& text,
                            const std::string& origin = "<string>");

}  // namespace mzphase
