// Acceptance suite: every release criterion in one run, one verdict line
// each. Exits with the number of failed criteria.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>
#include <vector>

#include "mzphase/estimation.hpp"
#include "mzphase/experiment.hpp"
#include "mzphase/fisher.hpp"
#include "mzphase/rng.hpp"
#include "oracles.hpp"

using namespace mzphase;

namespace {

int failures = 0;

void verdict(int index, const char* name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", index, name,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

double rel_norm(const Eigen::Matrix2d& a, const Eigen::Matrix2d& ref) {
    return (a - ref).norm() / ref.norm();
}

// ---- criterion 1: exact FIM vs Monte Carlo and finite-difference oracles ----
void criterion_fim_oracles() {
    struct Point {
        PhasePair phases;
        double beta, n_s, n_c;
    };
    std::mt19937_64 engine(0xACCE5501);
    std::uniform_real_distribution<double> phi_s(-3.0, 3.0);
    std::uniform_real_distribution<double> phi_d(0.15, M_PI - 0.15);
    std::uniform_real_distribution<double> photons(1.0, 50.0);
    std::vector<Point> points;
    for (int i = 0; i < 20; ++i) {
        points.push_back({{phi_s(engine), phi_d(engine)},
                          (i % 2 == 0) ? 0.0 : 0.5,
                          photons(engine),
                          photons(engine)});
    }

    std::atomic<int> mc_entry_failures{0};
    std::atomic<int> fd_failures{0};
    std::vector<double> worst_sigmas(points.size(), 0.0);
    std::vector<double> fd_errors(points.size(), 0.0);

    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            const Point& pt = points[i];
            const GaussianState probe =
                make_probe(std::sqrt(pt.beta * pt.n_c),
                           std::sqrt((1.0 - pt.beta) * pt.n_c),
                           std::asinh(std::sqrt(pt.n_s)));
            const LoSetting lo = LoSetting::tuned(0.25);
            const LoAngles angles = resolve_lo(lo, pt.phases, probe);
            const ExactFim fim = fim_exact(pt.phases, probe, lo);

            const oracles::McFim mc = oracles::mc_score_fim(
                pt.phases, probe, angles.theta1, angles.theta2, 1000000,
                derive_stream_seed(0xACCE5502, i));
            double worst = 0.0;
            for (int m = 0; m < 2; ++m) {
                for (int n = 0; n < 2; ++n) {
                    const double diff =
                        std::abs(mc.mean(m, n) - fim.total.matrix(m, n));
                    const double sigmas = diff / mc.stderr_mean(m, n);
                    worst = std::max(worst, sigmas);
                    if (sigmas > 3.0) ++mc_entry_failures;
                }
            }
            worst_sigmas[i] = worst;

            const Eigen::Matrix2d fd =
                oracles::fd_fim(pt.phases, probe, angles.theta1, angles.theta2);
            const double rel = (fd - fim.total.matrix).norm() / fd.norm();
            fd_errors[i] = rel;
            if (rel > 1e-5) ++fd_failures;
        }
    };
    const unsigned n_threads =
        std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    double max_sigma = 0.0, max_fd = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        max_sigma = std::max(max_sigma, worst_sigmas[i]);
        max_fd = std::max(max_fd, fd_errors[i]);
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "20 points, 1e6 samples each: worst %.2f sigma (limit 3), "
                  "worst FD rel err %.2e (limit 1e-5)",
                  max_sigma, max_fd);
    verdict(1, "FIM oracle equivalence", mc_entry_failures == 0 && fd_failures == 0,
            detail);
}

// ---- criterion 2: asymptotic formula pinning with monotone convergence ----
void criterion_asymptotic_pinning() {
    const std::vector<double> ladder = {10.0, 30.0, 100.0, 300.0};
    struct Track {
        const char* name;
        std::vector<double> errors;
    };
    std::vector<Track> tracks = {{"signal k1=k2", {}},
                                 {"noise k1=k2", {}},
                                 {"total k1=k2", {}},
                                 {"signal general-k", {}},
                                 {"noise general-k", {}}};

    for (double n_s : ladder) {
        const double n_c = n_s;
        {
            const double beta = 0.5;
            const double k = 0.25;
            const PhasePair phases{0.7, 1.1};
            const GaussianState probe =
                make_probe(std::sqrt(beta * n_c), std::sqrt((1.0 - beta) * n_c),
                           std::asinh(std::sqrt(n_s)));
            const ExactFim exact = fim_exact(phases, probe, LoSetting::tuned(k));
            tracks[0].errors.push_back(rel_norm(
                exact.signal.matrix,
                fim_signal_asymptotic(beta, n_s, n_c, k, k, phases.phi_d).matrix));
            Eigen::Matrix2d leading = Eigen::Matrix2d::Zero();
            leading(0, 0) = 128.0 * n_s * n_s * k * k / ((16 * k * k + 1) * (16 * k * k + 1));
            tracks[1].errors.push_back(rel_norm(exact.noise.matrix, leading));
            tracks[2].errors.push_back(rel_norm(
                exact.total.matrix,
                fim_total_asymptotic(beta, n_s, n_c, k).matrix));
        }
        {
            const double beta = 0.4;
            const double k1 = 0.3, k2 = 0.1;
            const PhasePair phases{0.7, 0.8};
            const GaussianState probe =
                make_probe(std::sqrt(beta * n_c), std::sqrt((1.0 - beta) * n_c),
                           std::asinh(std::sqrt(n_s)));
            const ExactFim exact =
                fim_exact(phases, probe, LoSetting::tuned(k1, k2));
            tracks[3].errors.push_back(rel_norm(
                exact.signal.matrix,
                fim_signal_asymptotic(beta, n_s, n_c, k1, k2, phases.phi_d).matrix));
            tracks[4].errors.push_back(rel_norm(
                exact.noise.matrix,
                fim_noise_asymptotic(n_s, k1, k2, phases.phi_d).matrix));
        }
    }

    bool ok = true;
    std::string detail;
    for (const Track& track : tracks) {
        for (std::size_t i = 1; i < track.errors.size(); ++i) {
            if (track.errors[i] >= track.errors[i - 1]) ok = false;
        }
        if (track.errors.back() >= 0.05) ok = false;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s%s %.4f->%.4f", detail.empty() ? "" : ", ",
                      track.name, track.errors.front(), track.errors.back());
        detail += buf;
    }
    verdict(2, "asymptotic formula pinning", ok, detail);
}

// ---- criterion 3: determinant structure ----
void criterion_determinant() {
    std::mt19937_64 engine(0xACCE5503);
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    double worst_quarter = 0.0;
    for (int i = 0; i < 50; ++i) {
        const GaussianState probe = make_probe(uni(engine), uni(engine), 0.0);
        const HomodyneDistribution dist = output_distribution(
            {uni(engine), uni(engine)}, probe, uni(engine), uni(engine));
        worst_quarter = std::max(worst_quarter, std::abs(dist.det_sigma() - 0.25));
    }

    const double k = 0.25;
    const double rho = k * k + 1.0 / 16.0;
    const double n_s = 100.0;
    const GaussianState probe = make_probe(0.0, 1.0, std::asinh(std::sqrt(n_s)));
    const PhasePair phases{0.7, 1.1};
    const LoAngles angles = resolve_lo(LoSetting::tuned(k), phases, probe);
    const double scaled =
        n_s *
        output_distribution(phases, probe, angles.theta1, angles.theta2).det_sigma();
    const double rel = std::abs(scaled - rho) / rho;

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "r=0 worst |det-1/4| = %.2e (limit 1e-12); N_s*det at N_s=100: "
                  "%.6f vs %.6f (rel %.4f, limit 0.05)",
                  worst_quarter, scaled, rho, rel);
    verdict(3, "determinant structure", worst_quarter < 1e-12 && rel < 0.05, detail);
}

// ---- criterion 4: pseudo-inverse bound ----
void criterion_pseudo_inverse() {
    double worst = 0.0;
    for (double beta : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        for (const auto& [n_s, n_c, nu] :
             {std::tuple{7.0, 10.0, std::uint64_t{2000}},
              std::tuple{3.0, 40.0, std::uint64_t{1}},
              std::tuple{25.0, 25.0, std::uint64_t{500}}}) {
            const double k = 0.25;
            const FisherMatrix f =
                fim_signal_asymptotic(beta, n_s, n_c, k, k, 1.1);
            const double bound = crb_pseudo(
                f, {std::sqrt(beta), std::sqrt(1.0 - beta)}, nu);
            const double expected =
                (16.0 * k * k + 1.0) / (4.0 * n_s * n_c * static_cast<double>(nu));
            worst = std::max(worst, std::abs(bound - expected) / expected);
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "worst rel err %.2e (limit 1e-10)", worst);
    verdict(4, "pseudo-inverse bound", worst < 1e-10, detail);
}

// ---- criterion 5: nu-sweep reproduction ----
void criterion_nu_sweep() {
    ScenarioConfig cfg;
    cfg.run.repetitions = 200;
    cfg.run.seed = 0xACCE5505;
    cfg.sweep.axis = SweepAxis::nu;
    cfg.sweep.values = {200, 500, 1000, 2000};
    cfg.outputs.plots = false;
    const RunResult result = run_fig2(cfg);

    bool ok = true;
    std::string detail;
    for (const auto& row : result.rows) {
        const bool bias_ok = std::abs(row.bias_s) < 3.0 * row.stderr_s &&
                             std::abs(row.bias_d) < 3.0 * row.stderr_d;
        if (!bias_ok) ok = false;
        if (row.nu == 2000) {
            const double ratio_s = row.rmse_s / row.crb_s;
            const double ratio_d = row.rmse_d / row.crb_d;
            if (ratio_s < 0.9 || ratio_s > 1.3 || ratio_d < 0.9 || ratio_d > 1.3) {
                ok = false;
            }
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "crb=(%.3e, %.3e), rmse/crb at nu=2000: (%.3f, %.3f) in "
                          "[0.9, 1.3]",
                          row.crb_s, row.crb_d, ratio_s, ratio_d);
            detail = buf;
        }
    }
    verdict(5, "nu-sweep reproduction (bias + bound saturation)", ok, detail);
}

// ---- criterion 6: photon-sweep reproduction ----
void criterion_photon_sweep() {
    ScenarioConfig cfg;
    cfg.run.nu = 2000;
    cfg.run.repetitions = 100;
    cfg.run.seed = 0xACCE5506;
    cfg.sweep.axis = SweepAxis::total_photons;
    cfg.sweep.values = {8, 16, 32, 64, 128};
    cfg.outputs.plots = false;
    const RunResult result = run_fig3(cfg);

    bool ok = true;
    for (const auto& row : result.rows) {
        if (std::abs(row.crb_s - row.crb_d) > 1e-12 * row.crb_s) ok = false;
    }
    const double slope_s = result.fit_s->slope;
    const double slope_d = result.fit_d->slope;
    if (slope_s < -1.1 || slope_s > -0.9) ok = false;
    if (slope_d < -1.1 || slope_d > -0.9) ok = false;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "slopes (%.4f, %.4f) in [-1.1, -0.9]; bounds coincide at k=1/4",
                  slope_s, slope_d);
    verdict(6, "photon-sweep reproduction (Heisenberg scaling)", ok, detail);
}

// ---- criterion 7: estimator round trip on exact moments ----
void criterion_round_trip() {
    std::mt19937_64 engine(0xACCE5507);
    std::uniform_real_distribution<double> phi_s_gen(-M_PI + 0.05, M_PI - 0.05);
    std::uniform_real_distribution<double> phi_d_gen(0.05, M_PI - 0.05);
    std::uniform_real_distribution<double> photons(2.0, 40.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double n_s = photons(engine);
        const double r = std::asinh(std::sqrt(n_s));
        const GaussianState probe = make_probe(0.0, std::sqrt(photons(engine)), r);
        const PhasePair truth{phi_s_gen(engine), phi_d_gen(engine)};
        const LoAngles angles = resolve_lo(LoSetting::tuned(0.25), truth, probe);
        const HomodyneDistribution dist =
            output_distribution(truth, probe, angles.theta1, angles.theta2);
        const SampleBatch batch =
            oracles::exact_moment_batch(dist.mu(), dist.sigma());
        const double phi_d_hat = mle_phi_d(batch);
        const double phi_s_hat =
            mle_phi_s(batch, phi_d_hat, r, angles.theta1, truth.phi_s);
        worst = std::max(worst, std::abs(wrap_angle(phi_d_hat - truth.phi_d)));
        worst = std::max(worst, std::abs(wrap_angle(phi_s_hat - truth.phi_s)));
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "worst recovery error %.2e (limit 1e-8)",
                  worst);
    verdict(7, "estimator round trip on exact moments", worst < 1e-8, detail);
}

// ---- criterion 8: property suite ----
void criterion_properties() {
    std::mt19937_64 engine(0xACCE5508);
    bool ok = true;
    std::string failing;

    // symplectic invariants
    const Eigen::MatrixXd omega = symplectic_form(2);
    for (int i = 0; i < 50; ++i) {
        const SymplecticRotation rot(oracles::random_unitary(2, engine));
        const Eigen::MatrixXd& r = rot.matrix();
        if ((r * r.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() >
                1e-12 ||
            (r * omega * r.transpose() - omega).cwiseAbs().maxCoeff() > 1e-12) {
            ok = false;
            failing = "symplectic invariants";
        }
    }

    // uncertainty relation and photon conservation under propagation
    std::uniform_real_distribution<double> amp(-2.5, 2.5);
    std::uniform_real_distribution<double> squeeze(-1.8, 1.8);
    for (int i = 0; i < 50 && ok; ++i) {
        const GaussianState s = make_probe(amp(engine), amp(engine), squeeze(engine));
        const GaussianState out =
            apply_network(s, oracles::random_unitary(2, engine));
        if (min_uncertainty_eigenvalue(out.covariance()) < -1e-10) {
            ok = false;
            failing = "uncertainty relation";
        }
        if (std::abs(mean_photon_number(out) - mean_photon_number(s)) > 1e-10) {
            ok = false;
            failing = "photon conservation";
        }
    }

    // score mean zero at the reference operating point
    if (ok) {
        const GaussianState probe =
            make_probe(0.0, std::sqrt(10.0), std::asinh(std::sqrt(7.0)));
        const PhasePair phases{0.7, 1.1};
        const LoAngles angles = resolve_lo(LoSetting::tuned(0.25), phases, probe);
        const oracles::McFim mc = oracles::mc_score_fim(
            phases, probe, angles.theta1, angles.theta2, 100000, 0xACCE5509);
        for (int m = 0; m < 2; ++m) {
            if (std::abs(mc.score_mean(m)) > 4.0 * mc.score_stderr(m)) {
                ok = false;
                failing = "score mean zero";
            }
        }
    }

    // dual-path moment agreement
    std::uniform_real_distribution<double> phase(-M_PI, M_PI);
    for (int i = 0; i < 100 && ok; ++i) {
        const PhasePair phases{phase(engine), phase(engine)};
        const GaussianState probe =
            make_probe(amp(engine), amp(engine), squeeze(engine));
        const double t1 = phase(engine);
        const double t2 = phase(engine);
        const HomodyneDistribution closed =
            output_distribution(phases, probe, t1, t2);
        const HomodyneDistribution propagated =
            oracles::propagated_distribution(phases, probe, t1, t2);
        if ((closed.mu() - propagated.mu()).cwiseAbs().maxCoeff() > 1e-10 ||
            (closed.sigma() - propagated.sigma()).cwiseAbs().maxCoeff() > 1e-10) {
            ok = false;
            failing = "dual-path moments";
        }
    }

    verdict(8, "property suite", ok,
            ok ? "symplectic, uncertainty, photons, score mean, dual path"
               : "first failing: " + failing);
}

}  // namespace

int main() {
    std::printf("acceptance suite (tolerances pinned in-code)\n");
    criterion_fim_oracles();
    criterion_asymptotic_pinning();
    criterion_determinant();
    criterion_pseudo_inverse();
    criterion_nu_sweep();
    criterion_photon_sweep();
    criterion_round_trip();
    criterion_properties();
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
