#include "mzphase/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mzphase/estimation.hpp"
#include "mzphase/rng.hpp"
#include "mzphase/version.hpp"
#include "svg_plot.hpp"

namespace mzphase {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// One sweep point fully specified.
struct PointSpec {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double r = 0.0;
    std::uint64_t nu = 0;
    std::optional<double> total_photons;
};

enum class EstimationPath { closed_form, numeric };

struct PointOutcome {
    SweepRow row;
    std::size_t failures = 0;
    std::size_t repetitions = 0;
};

// Draws one batch and runs the configured estimator pair.
EstimateRecord run_trial(const PointSpec& point, const ScenarioConfig& cfg,
                         const LoAngles& angles,
                         const HomodyneDistribution& dist,
                         EstimationPath path, const GaussianState& probe,
                         std::uint64_t trial_seed) {
    const SampleBatch batch = sample(dist, point.nu, trial_seed);
    if (path == EstimationPath::closed_form) {
        EstimateRecord rec;
        rec.method = EstimatorMethod::closed_form;
        rec.phi_d_hat = mle_phi_d(batch);
        rec.phi_s_hat = mle_phi_s(batch, rec.phi_d_hat, point.r, angles.theta1,
                                  cfg.truth.phi_s);
        rec.converged = true;
        return rec;
    }
    const PhasePair init{cfg.truth.phi_s, cfg.truth.phi_d};
    EstimateRecord rec = mle_numeric(batch, probe, angles, init);
    if (!rec.converged) {
        throw EstimatorFailure("numeric MLE did not converge");
    }
    return rec;
}

unsigned resolve_threads(unsigned configured) {
    if (configured > 0) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Executes the repetitions of one sweep point on a worker pool. Results land
// in per-trial slots, so the reduction below is order-independent of the
// scheduling.
PointOutcome run_point(const PointSpec& point, const ScenarioConfig& cfg,
                       std::uint64_t point_seed, EstimationPath path) {
    const GaussianState probe = make_probe(point.alpha1, point.alpha2, point.r);
    const PhasePair truth{cfg.truth.phi_s, cfg.truth.phi_d};
    const LoSetting lo = cfg.lo.tuned
                             ? LoSetting::tuned(cfg.lo.k1, cfg.lo.k2)
                             : LoSetting::explicit_angles(cfg.lo.theta1, cfg.lo.theta2);
    LoAngles angles;
    try {
        angles = resolve_lo(lo, truth, probe);
    } catch (const std::invalid_argument& e) {
        throw NumericalError(std::string("LO resolution failed: ") + e.what());
    }
    const HomodyneDistribution dist = [&] {
        try {
            return output_distribution(truth, probe, angles.theta1, angles.theta2);
        } catch (const std::invalid_argument& e) {
            throw NumericalError(std::string("model setup failed: ") + e.what());
        }
    }();

    const std::size_t reps = cfg.run.repetitions;
    std::vector<std::optional<EstimateRecord>> slots(reps);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= reps) return;
            try {
                slots[i] = run_trial(point, cfg, angles, dist, path, probe,
                                     derive_stream_seed(point_seed, i));
            } catch (const EstimatorFailure&) {
                slots[i] = std::nullopt;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const unsigned n_threads =
        std::min<unsigned>(resolve_threads(cfg.run.threads),
                           static_cast<unsigned>(reps));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::vector<EstimateRecord> records;
    records.reserve(reps);
    for (const auto& slot : slots) {
        if (slot) records.push_back(*slot);
    }

    PointOutcome out;
    out.repetitions = reps;
    out.failures = reps - records.size();
    out.row.nu = point.nu;
    out.row.seed = point_seed;
    out.row.total_photons = point.total_photons;
    out.row.fail_rate =
        static_cast<double>(out.failures) / static_cast<double>(reps);
    if (records.size() >= 2) {
        const EstimationStats stats = statistics(records, truth);
        out.row.bias_s = stats.bias_s;
        out.row.bias_d = stats.bias_d;
        out.row.rmse_s = stats.rmse_s;
        out.row.rmse_d = stats.rmse_d;
        out.row.stderr_s = stats.stderr_s;
        out.row.stderr_d = stats.stderr_d;
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.row.bias_s = out.row.bias_d = nan;
        out.row.rmse_s = out.row.rmse_d = nan;
        out.row.stderr_s = out.row.stderr_d = nan;
    }
    return out;
}

// Asymptotic CRB standard deviations at a symmetric tuned operating point
// with beta = 0: the diagonal-FIM bounds.
void asymptotic_crb_columns(SweepRow& row, double n_s, double n_c, double k,
                            std::uint64_t nu) {
    const double q = 16.0 * k * k + 1.0;
    row.crb_s = std::sqrt(q * q / (128.0 * n_s * n_s * k * k *
                                   static_cast<double>(nu)));
    row.crb_d = std::sqrt(q / (4.0 * n_c * n_s * static_cast<double>(nu)));
}

void exact_crb_columns(SweepRow& row, const PointSpec& point,
                       const ScenarioConfig& cfg) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        const GaussianState probe =
            make_probe(point.alpha1, point.alpha2, point.r);
        const PhasePair truth{cfg.truth.phi_s, cfg.truth.phi_d};
        const LoSetting lo =
            cfg.lo.tuned ? LoSetting::tuned(cfg.lo.k1, cfg.lo.k2)
                         : LoSetting::explicit_angles(cfg.lo.theta1, cfg.lo.theta2);
        const ExactFim fim = fim_exact(truth, probe, lo);
        const CrbReport report = crb(fim.total, point.nu);
        row.crb_s = std::sqrt(report.var_phi_s);
        row.crb_d = std::sqrt(report.var_phi_d);
    } catch (const std::invalid_argument&) {
        row.crb_s = nan;  // singular information: no per-parameter bound
        row.crb_d = nan;
    }
}

ScalingFit fit_loglog(const std::vector<double>& n_values,
                      const std::vector<double>& rmse_values) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (std::isfinite(rmse_values[i]) && rmse_values[i] > 0.0) {
            x.push_back(std::log(n_values[i]));
            y.push_back(std::log(rmse_values[i]));
        }
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw NumericalError("scaling fit needs at least 3 finite sweep points");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += resid * resid;
    }
    fit.slope_stderr =
        std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
    return fit;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError("[" + field + "] " + what);
}

void require_closed_form_regime(const ScenarioConfig& cfg, const char* kind) {
    require(cfg.probe.alpha1 == 0.0, std::string("probe.alpha1"),
            std::string(kind) + " requires alpha1 = 0 (closed-form estimators)");
    require(cfg.lo.tuned, "lo.mode", std::string(kind) + " requires tuned LOs");
    require(cfg.lo.k1 == cfg.lo.k2, "lo.k2",
            std::string(kind) + " requires symmetric offsets k1 = k2");
    require(cfg.probe.r != 0.0, "probe.r",
            std::string(kind) + " requires nonzero squeezing");
}

}  // namespace

RunResult run_fig2(const ScenarioConfig& config) {
    ScenarioConfig cfg = config;
    require_closed_form_regime(cfg, "fig2");
    if (cfg.sweep.axis == SweepAxis::none) {
        cfg.sweep.axis = SweepAxis::nu;
        if (cfg.sweep.values.empty()) {
            cfg.sweep.values = {200, 500, 1000, 2000};
        }
    }
    require(cfg.sweep.axis == SweepAxis::nu, "sweep.axis",
            "fig2 sweeps the repetition count nu");

    RunResult result;
    result.name = "fig2";
    result.estimator_path = "closed_form";
    result.config = cfg;
    const double n_s = std::sinh(cfg.probe.r) * std::sinh(cfg.probe.r);
    const double n_c = cfg.probe.alpha2 * cfg.probe.alpha2;
    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
        PointSpec point;
        point.alpha1 = cfg.probe.alpha1;
        point.alpha2 = cfg.probe.alpha2;
        point.r = cfg.probe.r;
        point.nu = static_cast<std::uint64_t>(cfg.sweep.values[i]);
        require(point.nu >= 2, "sweep.values", "nu values must be >= 2");
        PointOutcome outcome = run_point(
            point, cfg, derive_stream_seed(cfg.run.seed, i), EstimationPath::closed_form);
        asymptotic_crb_columns(outcome.row, n_s, n_c, cfg.lo.k1, point.nu);
        result.rows.push_back(outcome.row);
    }
    return result;
}

RunResult run_fig3(const ScenarioConfig& config) {
    ScenarioConfig cfg = config;
    require_closed_form_regime(cfg, "fig3");
    if (cfg.sweep.axis == SweepAxis::none) {
        cfg.sweep.axis = SweepAxis::total_photons;
        if (cfg.sweep.values.empty()) {
            cfg.sweep.values = {8, 16, 32, 64, 128};
        }
    }
    require(cfg.sweep.axis == SweepAxis::total_photons, "sweep.axis",
            "fig3 sweeps the total photon number N");

    RunResult result;
    result.name = "fig3";
    result.estimator_path = "closed_form";
    result.config = cfg;
    std::vector<double> n_list, rmse_s_list, rmse_d_list;
    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
        const double total = cfg.sweep.values[i];
        // equal split: N_c = N_s = N/2, derived rather than user-set
        const double half = 0.5 * total;
        PointSpec point;
        point.alpha1 = 0.0;
        point.alpha2 = std::sqrt(half);
        point.r = std::asinh(std::sqrt(half));
        point.nu = cfg.run.nu;
        point.total_photons = total;
        PointOutcome outcome = run_point(
            point, cfg, derive_stream_seed(cfg.run.seed, i), EstimationPath::closed_form);
        asymptotic_crb_columns(outcome.row, half, half, cfg.lo.k1, point.nu);
        result.rows.push_back(outcome.row);
        n_list.push_back(total);
        rmse_s_list.push_back(outcome.row.rmse_s);
        rmse_d_list.push_back(outcome.row.rmse_d);
    }
    if (n_list.size() >= 3) {  // a slope needs at least three sweep points
        result.fit_s = fit_loglog(n_list, rmse_s_list);
        result.fit_d = fit_loglog(n_list, rmse_d_list);
    }
    return result;
}

RunResult run_custom(const ScenarioConfig& config) {
    ScenarioConfig cfg = config;
    const bool closed_form_ok = cfg.probe.alpha1 == 0.0 && cfg.lo.tuned &&
                                cfg.lo.k1 == cfg.lo.k2 && cfg.probe.r != 0.0;
    const EstimationPath path =
        closed_form_ok ? EstimationPath::closed_form : EstimationPath::numeric;

    RunResult result;
    result.name = "custom";
    result.estimator_path =
        path == EstimationPath::closed_form ? "closed_form" : "numeric_mle";
    result.config = cfg;

    std::vector<PointSpec> points;
    if (cfg.sweep.axis == SweepAxis::none) {
        PointSpec point;
        point.alpha1 = cfg.probe.alpha1;
        point.alpha2 = cfg.probe.alpha2;
        point.r = cfg.probe.r;
        point.nu = cfg.run.nu;
        points.push_back(point);
    } else if (cfg.sweep.axis == SweepAxis::nu) {
        for (double v : cfg.sweep.values) {
            PointSpec point;
            point.alpha1 = cfg.probe.alpha1;
            point.alpha2 = cfg.probe.alpha2;
            point.r = cfg.probe.r;
            point.nu = static_cast<std::uint64_t>(v);
            points.push_back(point);
        }
    } else {
        for (double v : cfg.sweep.values) {
            const double half = 0.5 * v;
            PointSpec point;
            point.alpha1 = cfg.probe.alpha1;
            point.alpha2 = std::sqrt(half);
            point.r = std::asinh(std::sqrt(half));
            point.nu = cfg.run.nu;
            point.total_photons = v;
            points.push_back(point);
        }
    }

    std::vector<double> n_list, rmse_s_list, rmse_d_list;
    for (std::size_t i = 0; i < points.size(); ++i) {
        PointOutcome outcome = run_point(points[i], cfg,
                                         derive_stream_seed(cfg.run.seed, i), path);
        exact_crb_columns(outcome.row, points[i], cfg);
        result.rows.push_back(outcome.row);
        if (points[i].total_photons) {
            n_list.push_back(*points[i].total_photons);
            rmse_s_list.push_back(outcome.row.rmse_s);
            rmse_d_list.push_back(outcome.row.rmse_d);
        }
    }
    if (n_list.size() >= 3) {
        result.fit_s = fit_loglog(n_list, rmse_s_list);
        result.fit_d = fit_loglog(n_list, rmse_d_list);
    }

    // FIM diagnostics at the last sweep point
    const PointSpec& last = points.back();
    const GaussianState probe = make_probe(last.alpha1, last.alpha2, last.r);
    const PhasePair truth{cfg.truth.phi_s, cfg.truth.phi_d};
    const LoSetting lo = cfg.lo.tuned
                             ? LoSetting::tuned(cfg.lo.k1, cfg.lo.k2)
                             : LoSetting::explicit_angles(cfg.lo.theta1, cfg.lo.theta2);
    try {
        result.fim = fim_exact(truth, probe, lo);
    } catch (const std::invalid_argument& e) {
        throw NumericalError(std::string("FIM evaluation failed: ") + e.what());
    }
    const ProbeParams pp = probe_params(probe);
    const double n_s = pp.squeeze_photons();
    const double n_c = pp.coherent_photons();
    if (cfg.lo.tuned && cfg.lo.k1 == cfg.lo.k2 && n_s > 0.0 && n_c > 0.0) {
        result.fim_asymptotic =
            fim_total_asymptotic(pp.beta(), n_s, n_c, cfg.lo.k1);
    }
    if (cfg.combo_weights && cfg.lo.tuned && n_s > 0.0 && n_c > 0.0) {
        const Eigen::Vector2d weights(cfg.combo_weights->first,
                                      cfg.combo_weights->second);
        const FisherMatrix fs = fim_signal_asymptotic(
            pp.beta(), n_s, n_c, cfg.lo.k1, cfg.lo.k2, cfg.truth.phi_d);
        result.combo_bound = crb_pseudo(fs, weights, last.nu);
    }
    return result;
}

void write_csv(const RunResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
    if (!out) throw OutputError("cannot write CSV file: " + path.string());
    const bool with_n = !result.rows.empty() &&
                        result.rows.front().total_photons.has_value();
    out << "nu,bias_s,bias_d,rmse_s,rmse_d,crb_s,crb_d,fail_rate,seed";
    if (with_n) out << ",N";
    out << "\n";
    for (const auto& row : result.rows) {
        out << row.nu << ',' << fmt17(row.bias_s) << ',' << fmt17(row.bias_d)
            << ',' << fmt17(row.rmse_s) << ',' << fmt17(row.rmse_d) << ','
            << fmt17(row.crb_s) << ',' << fmt17(row.crb_d) << ','
            << fmt17(row.fail_rate) << ',' << row.seed;
        if (with_n) out << ',' << fmt17(row.total_photons.value_or(0.0));
        out << "\n";
    }
    if (!out) throw OutputError("failed writing CSV file: " + path.string());
}

namespace {

json fim_to_json(const FisherMatrix& f) {
    return json{{"ss", f.matrix(0, 0)},
                {"sd", f.matrix(0, 1)},
                {"dd", f.matrix(1, 1)}};
}

}  // namespace

void write_metadata(const RunResult& result, const std::filesystem::path& path) {
    const ScenarioConfig& cfg = result.config;
    json meta;
    meta["tool"] = "mzphase";
    meta["version"] = version;
    meta["run"] = result.name;
    meta["config"] = {
        {"probe", {{"alpha1", cfg.probe.alpha1},
                   {"alpha2", cfg.probe.alpha2},
                   {"r", cfg.probe.r}}},
        {"truth", {{"phi_s", cfg.truth.phi_s}, {"phi_d", cfg.truth.phi_d}}},
        {"lo", {{"mode", cfg.lo.tuned ? "tuned" : "explicit"},
                {"k1", cfg.lo.k1},
                {"k2", cfg.lo.k2},
                {"theta1", cfg.lo.theta1},
                {"theta2", cfg.lo.theta2}}},
        {"run", {{"nu", cfg.run.nu},
                 {"repetitions", cfg.run.repetitions},
                 {"seed", cfg.run.seed},
                 {"threads", cfg.run.threads}}},
        {"sweep", {{"axis", cfg.sweep.axis == SweepAxis::none
                                ? "none"
                                : (cfg.sweep.axis == SweepAxis::nu ? "nu" : "N")},
                   {"values", cfg.sweep.values}}},
        {"outputs", {{"directory", cfg.outputs.directory},
                     {"csv", cfg.outputs.csv},
                     {"metadata", cfg.outputs.metadata},
                     {"plots", cfg.outputs.plots}}},
    };
    meta["seed_mapping"] =
        "point_seed = derive_stream_seed(run.seed, point_index); "
        "trial_seed = derive_stream_seed(point_seed, repetition_index); "
        "samples from mt19937_64(trial_seed) via Box-Muller";
    meta["estimator"] = {
        {"path", result.estimator_path},
        {"phi_s_branch_center", cfg.truth.phi_s},
        {"numeric_init", "truth"},
    };
    meta["columns"] = {
        {"nu", "repetitions per estimate (config)"},
        {"bias_s", "mean of wrapped (phi_s_hat - phi_s) over repetitions"},
        {"bias_d", "mean of wrapped (phi_d_hat - phi_d) over repetitions"},
        {"rmse_s", "root mean square wrapped deviation from phi_s"},
        {"rmse_d", "root mean square wrapped deviation from phi_d"},
        {"crb_s", result.name == "custom"
                      ? "sqrt of (F_exact^-1)_ss / nu at the truth"
                      : "asymptotic Cramer-Rao standard deviation for phi_s"},
        {"crb_d", result.name == "custom"
                      ? "sqrt of (F_exact^-1)_dd / nu at the truth"
                      : "asymptotic Cramer-Rao standard deviation for phi_d"},
        {"fail_rate", "excluded repetitions (estimator undefined) / repetitions"},
        {"seed", "derived per-point seed"},
        {"N", "total mean photon number (photon sweeps only)"},
    };
    json rows = json::array();
    for (const auto& row : result.rows) {
        json r{{"nu", row.nu},
               {"bias_s", row.bias_s},
               {"bias_d", row.bias_d},
               {"rmse_s", row.rmse_s},
               {"rmse_d", row.rmse_d},
               {"stderr_s", row.stderr_s},
               {"stderr_d", row.stderr_d},
               {"crb_s", row.crb_s},
               {"crb_d", row.crb_d},
               {"fail_rate", row.fail_rate},
               {"seed", row.seed}};
        if (row.total_photons) r["N"] = *row.total_photons;
        rows.push_back(std::move(r));
    }
    meta["rows"] = std::move(rows);
    if (result.fit_s) {
        meta["scaling_fit"]["rmse_s"] = {{"slope", result.fit_s->slope},
                                         {"slope_stderr", result.fit_s->slope_stderr},
                                         {"intercept", result.fit_s->intercept}};
    }
    if (result.fit_d) {
        meta["scaling_fit"]["rmse_d"] = {{"slope", result.fit_d->slope},
                                         {"slope_stderr", result.fit_d->slope_stderr},
                                         {"intercept", result.fit_d->intercept}};
    }
    if (result.fim) {
        meta["fim_exact"] = {{"signal", fim_to_json(result.fim->signal)},
                             {"noise", fim_to_json(result.fim->noise)},
                             {"total", fim_to_json(result.fim->total)}};
    }
    if (result.fim_asymptotic) {
        meta["fim_asymptotic_total"] = fim_to_json(*result.fim_asymptotic);
    }
    if (result.combo_bound) {
        meta["combo_bound"] = {{"variance", *result.combo_bound},
                               {"weight_s", cfg.combo_weights->first},
                               {"weight_d", cfg.combo_weights->second},
                               {"source", "pseudo-inverse of the asymptotic signal FIM"}};
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write metadata file: " + path.string());
    out << meta.dump(2) << "\n";
    if (!out) throw OutputError("failed writing metadata file: " + path.string());
}

std::vector<std::filesystem::path> emit_plots(
    const RunResult& result, const std::filesystem::path& directory) {
    if (result.rows.empty()) throw OutputError("emit_plots: empty result table");
    const bool photon_sweep = result.rows.front().total_photons.has_value();
    std::vector<double> axis;
    for (const auto& row : result.rows) {
        axis.push_back(photon_sweep ? *row.total_photons
                                    : static_cast<double>(row.nu));
    }
    const std::string x_label = photon_sweep ? "N" : "nu";

    auto column = [&](double SweepRow::* member) {
        std::vector<double> v;
        for (const auto& row : result.rows) v.push_back(row.*member);
        return v;
    };

    std::vector<std::filesystem::path> written;

    detail::PlotSpec bias;
    bias.title = result.name + ": estimator bias";
    bias.x_label = x_label;
    bias.y_label = "bias";
    bias.log_x = true;
    bias.series.push_back({axis, column(&SweepRow::bias_s), "bias phi_s", "#c23b22", false, true});
    bias.series.push_back({axis, column(&SweepRow::bias_d), "bias phi_d", "#1f6fb2", false, true});
    const auto bias_path = directory / (result.name + "_bias.svg");
    detail::write_svg_plot(bias_path, bias);
    written.push_back(bias_path);

    detail::PlotSpec rmse;
    rmse.title = result.name + ": uncertainty vs bound";
    rmse.x_label = x_label;
    rmse.y_label = "rmse";
    rmse.log_x = true;
    rmse.log_y = true;
    rmse.series.push_back({axis, column(&SweepRow::rmse_s), "rmse phi_s", "#c23b22", false, true});
    rmse.series.push_back({axis, column(&SweepRow::rmse_d), "rmse phi_d", "#1f6fb2", false, true});
    const std::vector<double> crb_s = column(&SweepRow::crb_s);
    const std::vector<double> crb_d = column(&SweepRow::crb_d);
    double crb_gap = 0.0;
    for (std::size_t i = 0; i < crb_s.size(); ++i) {
        if (std::isfinite(crb_s[i]) && std::isfinite(crb_d[i])) {
            crb_gap = std::max(crb_gap,
                               std::abs(crb_s[i] - crb_d[i]) /
                                   std::max(crb_s[i], crb_d[i]));
        }
    }
    if (crb_gap < 1e-12) {
        rmse.series.push_back({axis, crb_s, "crb", "#2e8540", true, false});
    } else {
        rmse.series.push_back({axis, crb_s, "crb phi_s", "#2e8540", true, false});
        rmse.series.push_back({axis, crb_d, "crb phi_d", "#7a4fa3", true, false});
    }
    const auto rmse_path = directory / (result.name + "_rmse.svg");
    detail::write_svg_plot(rmse_path, rmse);
    written.push_back(rmse_path);
    return written;
}

RunResult run_and_emit(const std::string& kind, const ScenarioConfig& config) {
    RunResult result;
    if (kind == "fig2") {
        result = run_fig2(config);
    } else if (kind == "fig3") {
        result = run_fig3(config);
    } else if (kind == "custom") {
        result = run_custom(config);
    } else {
        throw ConfigError("unknown experiment kind '" + kind +
                          "' (expected fig2, fig3 or custom)");
    }

    namespace fs = std::filesystem;
    const fs::path dir(config.outputs.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw OutputError("cannot create output directory: " + dir.string());
    }
    if (config.outputs.csv) {
        write_csv(result, dir / (result.name + ".csv"));
    }
    if (config.outputs.metadata) {
        write_metadata(result, dir / (result.name + "_meta.json"));
    }
    if (config.outputs.plots) {
        emit_plots(result, dir);
    }
    return result;
}

}  // namespace mzphase
