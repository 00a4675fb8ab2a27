#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mzphase/experiment.hpp"
#include "mzphase/homodyne.hpp"

using namespace mzphase;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir =
        fs::temp_directory_path() / ("mzphase_test_" + tag + "_" +
                                     std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ScenarioConfig tiny_fig2_config() {
    ScenarioConfig cfg;
    cfg.run.repetitions = 12;
    cfg.run.seed = 31337;
    cfg.sweep.axis = SweepAxis::nu;
    cfg.sweep.values = {100, 200};
    cfg.outputs.plots = false;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults from an empty file") {
        const ScenarioConfig cfg = parse_config("", "empty");
        CHECK(cfg.probe.alpha1 == 0.0);
        CHECK(cfg.probe.alpha2 * cfg.probe.alpha2 == doctest::Approx(10.0));
        CHECK(cfg.probe.r == 1.7);
        CHECK(cfg.truth.phi_s == 0.7);
        CHECK(cfg.truth.phi_d == 1.1);
        CHECK(cfg.lo.tuned);
        CHECK(cfg.lo.k1 == 0.25);
        CHECK(cfg.run.nu == 2000);
    }
    SUBCASE("full file round trip") {
        const std::string text = R"(
# scenario
[probe]
alpha1 = 0.5
alpha2 = 2.0
r = 0.9

[truth]
phi_s = 0.3
phi_d = 0.8

[lo]
mode = explicit
theta1 = 1.0
theta2 = -0.5

[run]
nu = 400
repetitions = 16
seed = 99
threads = 2

[sweep]
axis = nu
values = 100, 200, 400

[outputs]
directory = results
formats = csv, meta

[combo]
weight_s = 0.6
weight_d = 0.8
)";
        const ScenarioConfig cfg = parse_config(text, "full");
        CHECK(cfg.probe.alpha1 == 0.5);
        CHECK_FALSE(cfg.lo.tuned);
        CHECK(cfg.lo.theta1 == 1.0);
        CHECK(cfg.run.threads == 2);
        CHECK(cfg.sweep.axis == SweepAxis::nu);
        CHECK(cfg.sweep.values == std::vector<double>{100, 200, 400});
        CHECK(cfg.outputs.directory == "results");
        CHECK(cfg.outputs.csv);
        CHECK(cfg.outputs.metadata);
        CHECK_FALSE(cfg.outputs.plots);
        REQUIRE(cfg.combo_weights.has_value());
        CHECK(cfg.combo_weights->first == 0.6);
    }
    SUBCASE("errors name the offending field") {
        CHECK_THROWS_WITH_AS(parse_config("[probe]\nalpha1 = abc\n", "t"),
                             doctest::Contains("alpha1"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[sweep]\naxis = sideways\n", "t"),
                             doctest::Contains("axis"), ConfigError);
        CHECK_THROWS_WITH_AS(
            parse_config("[sweep]\naxis = nu\nvalues = 100, 50\n", "t"),
            doctest::Contains("increasing"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[probe]\nbogus = 1\n", "t"),
                             doctest::Contains("bogus"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[warp]\nspeed = 9\n", "t"),
                             doctest::Contains("warp"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("[lo]\nmode = explicit\n", "t"),
                             doctest::Contains("theta1"), ConfigError);
        CHECK_THROWS_AS(parse_config_file("/nonexistent/mzphase.ini"), ConfigError);
    }
}

TEST_CASE("fig2 runner basics") {
    const ScenarioConfig cfg = tiny_fig2_config();
    const RunResult result = run_fig2(cfg);
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].nu == 100);
    CHECK(result.rows[1].nu == 200);

    // CRB columns are pure functions of the configuration
    const double n_s = std::sinh(1.7) * std::sinh(1.7);
    const double q = 2.0;  // 16 k^2 + 1 at k = 1/4
    for (const auto& row : result.rows) {
        const double nu = static_cast<double>(row.nu);
        CHECK(row.crb_s ==
              doctest::Approx(std::sqrt(q * q / (128.0 * n_s * n_s * 0.0625 * nu)))
                  .epsilon(1e-12));
        CHECK(row.crb_d ==
              doctest::Approx(std::sqrt(q / (4.0 * 10.0 * n_s * nu))).epsilon(1e-12));
        CHECK(row.fail_rate == 0.0);
        CHECK(std::isfinite(row.rmse_s));
    }

    SUBCASE("identical results independent of worker count") {
        ScenarioConfig one = cfg;
        one.run.threads = 1;
        ScenarioConfig four = cfg;
        four.run.threads = 4;
        const RunResult a = run_fig2(one);
        const RunResult b = run_fig2(four);
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].bias_s == b.rows[i].bias_s);  // bitwise
            CHECK(a.rows[i].rmse_d == b.rows[i].rmse_d);
            CHECK(a.rows[i].seed == b.rows[i].seed);
        }
    }
    SUBCASE("estimation regime is validated") {
        ScenarioConfig bad = cfg;
        bad.probe.alpha1 = 0.3;
        CHECK_THROWS_WITH_AS(run_fig2(bad), doctest::Contains("alpha1"),
                             ConfigError);
        ScenarioConfig asym = cfg;
        asym.lo.k2 = 0.1;
        CHECK_THROWS_AS(run_fig2(asym), ConfigError);
    }
}

TEST_CASE("fig3 runner derives the probe and fits the scaling") {
    ScenarioConfig cfg;
    cfg.run.nu = 400;
    cfg.run.repetitions = 20;
    cfg.run.seed = 7;
    cfg.sweep.axis = SweepAxis::total_photons;
    cfg.sweep.values = {8, 16, 32, 64};
    cfg.outputs.plots = false;
    const RunResult result = run_fig3(cfg);
    REQUIRE(result.rows.size() == 4);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        REQUIRE(result.rows[i].total_photons.has_value());
        CHECK(*result.rows[i].total_photons == cfg.sweep.values[i]);
        // N_c = N_s = N/2 makes the two bounds coincide at k = 1/4
        CHECK(result.rows[i].crb_s ==
              doctest::Approx(result.rows[i].crb_d).epsilon(1e-12));
    }
    REQUIRE(result.fit_s.has_value());
    REQUIRE(result.fit_d.has_value());
    // rough scaling check at desk size; tight bounds live in the acceptance run
    CHECK(result.fit_d->slope < -0.6);
    CHECK(result.fit_d->slope > -1.4);
}

TEST_CASE("photon-sweep point N = 20 saturates the difference-phase bound") {
    ScenarioConfig cfg;
    cfg.run.nu = 2000;
    cfg.run.repetitions = 200;
    cfg.run.seed = 20;
    cfg.sweep.axis = SweepAxis::total_photons;
    cfg.sweep.values = {20};
    cfg.outputs.plots = false;
    const RunResult result = run_fig3(cfg);
    REQUIRE(result.rows.size() == 1);
    CHECK_FALSE(result.fit_s.has_value());  // no slope from a single point
    const SweepRow& row = result.rows.front();
    // N_c = N_s = 10, k = 1/4: bound sqrt(2 / (400 * 2000)) ~ 1.581e-3
    const double bound = std::sqrt(2.0 / (400.0 * 2000.0));
    CHECK(row.crb_d == doctest::Approx(bound).epsilon(1e-12));
    CHECK(std::abs(row.rmse_d - bound) < 0.15 * bound);
}

TEST_CASE("custom runner covers the general regimes") {
    SUBCASE("beta != 0 goes through the numeric MLE") {
        ScenarioConfig cfg;
        cfg.probe.alpha1 = 1.0;
        cfg.probe.alpha2 = 3.0;
        cfg.probe.r = 1.0;
        cfg.run.nu = 300;
        cfg.run.repetitions = 6;
        cfg.run.seed = 11;
        cfg.outputs.plots = false;
        cfg.combo_weights = {std::sqrt(0.1), std::sqrt(0.9)};
        const RunResult result = run_custom(cfg);
        REQUIRE(result.rows.size() == 1);
        CHECK(result.rows[0].fail_rate < 0.5);
        REQUIRE(result.fim.has_value());
        REQUIRE(result.fim_asymptotic.has_value());
        REQUIRE(result.combo_bound.has_value());
        // combination bound equals the closed form (16k^2+1)/(4 Ns Nc nu)
        const double n_s = std::sinh(1.0) * std::sinh(1.0);
        const double n_c = 10.0;
        const double expected = 2.0 / (4.0 * n_s * n_c * 300.0);
        CHECK(*result.combo_bound == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("explicit mistuned LOs degrade the phi_s bound scaling") {
        // fixed angles resolved at N = 8, held across the photon sweep
        const double n0 = 8.0;
        const GaussianState probe0 =
            make_probe(0.0, std::sqrt(n0 / 2), std::asinh(std::sqrt(n0 / 2)));
        const LoAngles fixed =
            resolve_lo(LoSetting::tuned(0.25), {0.7, 1.1}, probe0);

        ScenarioConfig cfg;
        cfg.lo.tuned = false;
        cfg.lo.theta1 = fixed.theta1 + 0.05;
        cfg.lo.theta2 = fixed.theta2 + 0.05;
        cfg.run.nu = 50;
        cfg.run.repetitions = 2;  // bounds are what matters here
        cfg.run.seed = 3;
        cfg.sweep.axis = SweepAxis::total_photons;
        cfg.sweep.values = {8, 32, 128, 512};
        cfg.outputs.plots = false;
        const RunResult result = run_custom(cfg);
        REQUIRE(result.rows.size() == 4);
        // log-log slope of the exact-FIM phi_s bound: far off the -1 line
        std::vector<double> lx, ly;
        for (const auto& row : result.rows) {
            REQUIRE(std::isfinite(row.crb_s));
            lx.push_back(std::log(*row.total_photons));
            ly.push_back(std::log(row.crb_s));
        }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        CHECK(sxy / sxx > -0.9);
    }
}

TEST_CASE("output files") {
    ScenarioConfig cfg = tiny_fig2_config();
    cfg.outputs.plots = true;
    const fs::path dir = fresh_dir("outputs");
    cfg.outputs.directory = dir.string();
    const RunResult result = run_and_emit("fig2", cfg);

    SUBCASE("CSV schema and regeneration") {
        const fs::path csv = dir / "fig2.csv";
        REQUIRE(fs::exists(csv));
        const std::string first = slurp(csv);
        CHECK(first.rfind("nu,bias_s,bias_d,rmse_s,rmse_d,crb_s,crb_d,fail_rate,seed\n",
                          0) == 0);
        run_and_emit("fig2", cfg);
        CHECK(slurp(csv) == first);  // byte identical
    }
    SUBCASE("metadata captures the configuration") {
        const auto meta = nlohmann::json::parse(slurp(dir / "fig2_meta.json"));
        CHECK(meta["run"] == "fig2");
        CHECK(meta["config"]["run"]["seed"] == 31337);
        CHECK(meta["config"]["probe"]["r"] == 1.7);
        CHECK(meta["rows"].size() == result.rows.size());
        CHECK(meta["columns"].contains("crb_s"));
    }
    SUBCASE("plots contain the data series and bound lines") {
        const std::string svg = slurp(dir / "fig2_rmse.svg");
        CHECK(svg.find("<svg") != std::string::npos);
        // two data series plus two distinct bound curves at this point
        std::size_t count = 0;
        for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
             pos = svg.find("<polyline", pos + 1)) {
            ++count;
        }
        CHECK(count == 4);
        CHECK(fs::exists(dir / "fig2_bias.svg"));
    }
    fs::remove_all(dir);
}

TEST_CASE("fig3-style plot carries a single bound line") {
    ScenarioConfig cfg;
    cfg.run.nu = 200;
    cfg.run.repetitions = 8;
    cfg.run.seed = 21;
    cfg.sweep.axis = SweepAxis::total_photons;
    cfg.sweep.values = {8, 16, 32};
    const fs::path dir = fresh_dir("fig3");
    cfg.outputs.directory = dir.string();
    run_and_emit("fig3", cfg);
    const std::string svg = slurp(dir / "fig3_rmse.svg");
    std::size_t count = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1)) {
        ++count;
    }
    CHECK(count == 3);  // rmse_s, rmse_d, shared bound
    fs::remove_all(dir);
}

TEST_CASE("empty tables cannot be plotted") {
    RunResult empty;
    empty.name = "custom";
    CHECK_THROWS_AS(emit_plots(empty, fs::temp_directory_path()), OutputError);
}

TEST_CASE("unwritable output directory raises an output error") {
    ScenarioConfig cfg = tiny_fig2_config();
    const fs::path dir = fresh_dir("blocked");
    const fs::path file = dir / "occupied";
    std::ofstream(file) << "x";
    cfg.outputs.directory = (file / "sub").string();  // file in the way
    CHECK_THROWS_AS(run_and_emit("fig2", cfg), OutputError);
    fs::remove_all(dir);
}

#ifdef MZPHASE_CLI_PATH
TEST_CASE("command line interface") {
    const fs::path dir = fresh_dir("cli");
    const fs::path config = dir / "scenario.ini";
    std::ofstream(config) << "[run]\nnu = 100\nrepetitions = 8\nseed = 5\n"
                          << "[sweep]\naxis = nu\nvalues = 100, 150\n";
    const std::string base = std::string(MZPHASE_CLI_PATH);

    auto run_cli = [](const std::string& cmd) {
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };

    SUBCASE("successful run writes outputs") {
        const int code = run_cli(base + " run fig2 --config " + config.string() +
                                 " --out " + (dir / "out").string() +
                                 " --threads 2 > /dev/null 2>&1");
        CHECK(code == 0);
        CHECK(fs::exists(dir / "out" / "fig2.csv"));
        CHECK(fs::exists(dir / "out" / "fig2_meta.json"));
        CHECK(fs::exists(dir / "out" / "fig2_rmse.svg"));
    }
    SUBCASE("seed override changes the samples") {
        REQUIRE(run_cli(base + " run fig2 --config " + config.string() + " --out " +
                        (dir / "a").string() + " --seed 1 > /dev/null 2>&1") == 0);
        REQUIRE(run_cli(base + " run fig2 --config " + config.string() + " --out " +
                        (dir / "b").string() + " --seed 1 > /dev/null 2>&1") == 0);
        REQUIRE(run_cli(base + " run fig2 --config " + config.string() + " --out " +
                        (dir / "c").string() + " --seed 2 > /dev/null 2>&1") == 0);
        CHECK(slurp(dir / "a" / "fig2.csv") == slurp(dir / "b" / "fig2.csv"));
        CHECK(slurp(dir / "a" / "fig2.csv") != slurp(dir / "c" / "fig2.csv"));
    }
    SUBCASE("config errors exit with code 2") {
        const fs::path bad = dir / "bad.ini";
        std::ofstream(bad) << "[probe]\nalpha1 = oops\n";
        CHECK(run_cli(base + " run fig2 --config " + bad.string() +
                      " > /dev/null 2>&1") == 2);
        CHECK(run_cli(base + " run nonsense --config " + config.string() +
                      " > /dev/null 2>&1") == 2);
        CHECK(run_cli(base + " run fig2 --config " + (dir / "missing.ini").string() +
                      " > /dev/null 2>&1") == 2);
    }
    SUBCASE("output errors exit with code 3") {
        const fs::path file = dir / "wall";
        std::ofstream(file) << "x";
        CHECK(run_cli(base + " run fig2 --config " + config.string() + " --out " +
                      (file / "sub").string() + " > /dev/null 2>&1") == 3);
    }
    SUBCASE("numerical failures exit with code 4") {
        // phi_d = 0 makes the tuned LO condition degenerate
        const fs::path degenerate = dir / "degenerate.ini";
        std::ofstream(degenerate) << "[truth]\nphi_s = 0.7\nphi_d = 0.0\n"
                                  << "[run]\nnu = 50\nrepetitions = 4\n";
        CHECK(run_cli(base + " run fig2 --config " + degenerate.string() +
                      " --out " + (dir / "deg").string() + " > /dev/null 2>&1") == 4);
    }
    fs::remove_all(dir);
}
#endif

TEST_CASE("estimator failures are counted and excluded") {
    // N_s = 1 with few samples: the arccos argument regularly leaves its
    // domain, so a visible fraction of repetitions must be excluded
    ScenarioConfig cfg;
    cfg.run.nu = 3;
    cfg.run.repetitions = 60;
    cfg.run.seed = 2024;
    cfg.sweep.axis = SweepAxis::total_photons;
    cfg.sweep.values = {2};
    cfg.outputs.plots = false;
    const RunResult result = run_custom(cfg);
    REQUIRE(result.rows.size() == 1);
    const SweepRow& row = result.rows.front();
    CHECK(row.fail_rate > 0.0);
    CHECK(row.fail_rate < 1.0);
    CHECK(std::isfinite(row.rmse_s));  // statistics over the surviving trials
}
