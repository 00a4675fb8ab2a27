#include "mzphase/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "mzphase/rng.hpp"

namespace mzphase {

namespace {

constexpr double kArccosSlack = 1e-6;

// Kahan-compensated accumulator; fixed summation order gives results
// independent of how the producing loop was scheduled.
class CompensatedSum {
public:
    void add(double x) {
        const double y = x - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

// Opaque identifier of the generating configuration: a hash over the
// distribution moments, the batch size and the seed.
std::string moment_digest(const HomodyneDistribution& dist, std::size_t nu,
                          std::uint64_t seed) {
    auto mix = [](std::uint64_t h, std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    };
    auto bits = [](double d) {
        std::uint64_t u;
        std::memcpy(&u, &d, sizeof(u));
        return u;
    };
    std::uint64_t h = 0x6d7a706861736512ULL;
    for (double v : {dist.mu()(0), dist.mu()(1), dist.sigma()(0, 0),
                     dist.sigma()(0, 1), dist.sigma()(1, 1)}) {
        h = mix(h, bits(v));
    }
    h = mix(h, nu);
    h = mix(h, seed);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

Eigen::Vector2d SampleBatch::mean() const {
    CompensatedSum s0, s1;
    for (const auto& x : outcomes) {
        s0.add(x(0));
        s1.add(x(1));
    }
    const double n = static_cast<double>(outcomes.size());
    return Eigen::Vector2d(s0.value() / n, s1.value() / n);
}

Eigen::Matrix2d SampleBatch::covariance() const {
    const Eigen::Vector2d m = mean();
    CompensatedSum s00, s01, s11;
    for (const auto& x : outcomes) {
        const Eigen::Vector2d d = x - m;
        s00.add(d(0) * d(0));
        s01.add(d(0) * d(1));
        s11.add(d(1) * d(1));
    }
    // 1/nu normalization: this is the maximum-likelihood covariance estimate
    const double n = static_cast<double>(outcomes.size());
    Eigen::Matrix2d c;
    c << s00.value() / n, s01.value() / n,
         s01.value() / n, s11.value() / n;
    return c;
}

SampleBatch sample(const HomodyneDistribution& dist, std::size_t nu,
                   std::uint64_t seed) {
    if (nu == 0) throw std::invalid_argument("sample: nu must be positive");
    const Eigen::Matrix2d& sig = dist.sigma();
    // closed-form lower Cholesky factor of the 2x2 covariance
    const double l11 = std::sqrt(sig(0, 0));
    const double l21 = sig(1, 0) / l11;
    const double rest = sig(1, 1) - l21 * l21;
    if (!(rest > 0.0)) {
        throw std::invalid_argument("sample: covariance not positive definite");
    }
    const double l22 = std::sqrt(rest);

    SampleBatch batch;
    batch.seed = seed;
    batch.scenario_digest = moment_digest(dist, nu, seed);
    batch.outcomes.resize(nu);
    NormalSampler rng(seed);
    for (std::size_t i = 0; i < nu; ++i) {
        const double z1 = rng.next();
        const double z2 = rng.next();
        batch.outcomes[i] = dist.mu() + Eigen::Vector2d(l11 * z1, l21 * z1 + l22 * z2);
    }
    return batch;
}

double mle_phi_d(const SampleBatch& batch) {
    const Eigen::Vector2d m = batch.mean();
    if (m.norm() < 1e-12) {
        throw EstimatorFailure("mle_phi_d: sample mean vanishes, estimator undefined");
    }
    return wrap_angle(2.0 * std::atan2(-m(0), m(1)));
}

double mle_phi_s(const SampleBatch& batch, double phi_d_hat, double r,
                 double theta1, double branch_center) {
    const double sh2r = std::sinh(2.0 * r);
    if (sh2r == 0.0) {
        throw EstimatorFailure("mle_phi_s: undefined at r = 0");
    }
    const double half = 0.5 * phi_d_hat;
    const double p1 = std::cos(half) * std::cos(half);
    const double p2 = 1.0 - p1;
    const Eigen::Matrix2d cov = batch.covariance();
    const double quad = p1 * cov(0, 0) + p2 * cov(1, 1) +
                        2.0 * std::sqrt(p1 * p2) * cov(0, 1);
    double arg = (2.0 * quad - std::cosh(2.0 * r)) / sh2r;
    if (arg < -1.0 - kArccosSlack || arg > 1.0 + kArccosSlack) {
        std::ostringstream msg;
        msg << "mle_phi_s: arccos argument " << arg << " outside [-1, 1]";
        throw EstimatorFailure(msg.str());
    }
    arg = std::clamp(arg, -1.0, 1.0);
    const double acos_val = std::acos(arg);

    // Both arccos branches solve the moment equation; take the one whose 2pi
    // reduction lands nearest the configured reference window.
    const double base = 2.0 * theta1 - 2.0 * M_PI;
    double best = 0.0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const double candidate : {base + acos_val, base - acos_val}) {
        const double reduced =
            branch_center + wrap_angle(candidate - branch_center);
        const double dist = std::abs(reduced - branch_center);
        if (dist < best_dist) {
            best_dist = dist;
            best = reduced;
        }
    }
    return best;
}

double log_likelihood(const SampleBatch& batch, const GaussianState& probe,
                      const LoAngles& lo, const PhasePair& phases) {
    const HomodyneDistribution dist =
        output_distribution(phases, probe, lo.theta1, lo.theta2);
    const Eigen::Matrix2d sig_inv = dist.inverse();
    const Eigen::Vector2d diff = batch.mean() - dist.mu();
    // per-sample second moment about the model mean:
    // (1/nu) sum (x_i - mu)(x_i - mu)^T = sample_cov + diff diff^T
    const Eigen::Matrix2d second = batch.covariance() + diff * diff.transpose();
    const double per_sample =
        -std::log(2.0 * M_PI * std::sqrt(dist.det_sigma())) -
        0.5 * (sig_inv * second).trace();
    return static_cast<double>(batch.size()) * per_sample;
}

Eigen::Vector2d log_likelihood_gradient(const SampleBatch& batch,
                                        const GaussianState& probe,
                                        const LoAngles& lo,
                                        const PhasePair& phases) {
    const HomodyneDistribution dist =
        output_distribution(phases, probe, lo.theta1, lo.theta2);
    const Eigen::Matrix2d sig_inv = dist.inverse();
    const Eigen::Vector2d diff = batch.mean() - dist.mu();
    const Eigen::Matrix2d second =
        batch.covariance() + diff * diff.transpose();

    // stationarity form: dmu^T Sigma^-1 (mean - mu)
    //   + 1/2 tr[Sigma^-1 dSigma Sigma^-1 (S - Sigma)]
    const ProbeParams pp = probe_params(probe);
    const double a = std::cos(0.5 * phases.phi_d);
    const double b = std::sin(0.5 * phases.phi_d);
    const double e1 = 0.5 * phases.phi_s - lo.theta1;
    const double e2 = 0.5 * phases.phi_s - lo.theta2;
    const double s2 = std::sinh(pp.r) * std::sinh(pp.r);
    const double sc = std::sinh(pp.r) * std::cosh(pp.r);
    const double half_rt2 = 0.5 * std::sqrt(2.0);

    Eigen::Vector2d dmu[2];
    dmu[0] << half_rt2 * (-pp.alpha1 * a * std::sin(e1) - pp.alpha2 * b * std::cos(e1)),
        half_rt2 * (-pp.alpha1 * b * std::cos(e2) - pp.alpha2 * a * std::sin(e2));
    dmu[1] << half_rt2 * (-pp.alpha1 * b * std::cos(e1) - pp.alpha2 * a * std::sin(e1)),
        half_rt2 * (-pp.alpha1 * a * std::sin(e2) - pp.alpha2 * b * std::cos(e2));

    Eigen::Matrix2d dsig[2];
    dsig[0](0, 0) = -a * a * std::sin(2.0 * e1) * sc;
    dsig[0](1, 1) = b * b * std::sin(2.0 * e2) * sc;
    dsig[0](0, 1) = dsig[0](1, 0) = -a * b * std::cos(e1 + e2) * sc;
    dsig[1](0, 0) = -a * b * (s2 + std::cos(2.0 * e1) * sc);
    dsig[1](1, 1) = a * b * (s2 - std::cos(2.0 * e2) * sc);
    dsig[1](0, 1) = dsig[1](1, 0) =
        0.5 * (a * a - b * b) * (std::sin(e1 - e2) * s2 - std::sin(e1 + e2) * sc);

    const Eigen::Matrix2d centered = second - dist.sigma();
    Eigen::Vector2d grad;
    for (int m = 0; m < 2; ++m) {
        grad(m) = dmu[m].dot(sig_inv * diff) +
                  0.5 * (sig_inv * dsig[m] * sig_inv * centered).trace();
    }
    return grad;
}

EstimateRecord mle_numeric(const SampleBatch& batch, const GaussianState& probe,
                           const LoAngles& lo, const PhasePair& init,
                           const MleOptions& options) {
    if (batch.outcomes.empty()) {
        throw std::invalid_argument("mle_numeric: empty batch");
    }
    const Eigen::Vector2d sample_mean = batch.mean();
    const Eigen::Matrix2d sample_cov = batch.covariance();

    const auto value_at = [&](const PhasePair& p) {
        const HomodyneDistribution dist =
            output_distribution(p, probe, lo.theta1, lo.theta2);
        const Eigen::Matrix2d sig_inv = dist.inverse();
        const Eigen::Vector2d diff = sample_mean - dist.mu();
        const Eigen::Matrix2d second = sample_cov + diff * diff.transpose();
        return -std::log(2.0 * M_PI * std::sqrt(dist.det_sigma())) -
               0.5 * (sig_inv * second).trace();
    };
    const auto grad_at = [&](const PhasePair& p) {
        return log_likelihood_gradient(batch, probe, lo, p);
    };

    PhasePair current = init;
    double value = value_at(current);
    Eigen::Vector2d grad = grad_at(current);
    bool converged = grad.norm() < options.gradient_tolerance;

    double damping = 1e-8;
    for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
        // Newton direction from a finite-difference Jacobian of the analytic
        // gradient, damped toward steepest ascent when not concave
        const double h = 1e-6;
        Eigen::Matrix2d hess;
        for (int m = 0; m < 2; ++m) {
            PhasePair plus = current;
            PhasePair minus = current;
            (m == 0 ? plus.phi_s : plus.phi_d) += h;
            (m == 0 ? minus.phi_s : minus.phi_d) -= h;
            hess.col(m) = (grad_at(plus) - grad_at(minus)) / (2.0 * h);
        }
        hess = (0.5 * (hess + hess.transpose())).eval();

        Eigen::Vector2d step;
        for (;;) {
            const Eigen::Matrix2d damped =
                hess - damping * Eigen::Matrix2d::Identity();
            const double det =
                damped(0, 0) * damped(1, 1) - damped(0, 1) * damped(1, 0);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(damped);
            if (es.eigenvalues().maxCoeff() < 0.0 && std::abs(det) > 1e-300) {
                step = -damped.inverse() * grad;
                break;
            }
            damping = std::max(damping * 10.0, 1e-6);
            if (damping > 1e12) {
                step = grad;  // fall back to plain ascent
                break;
            }
        }

        // backtracking line search on the log-likelihood
        double scale = 1.0;
        PhasePair next = current;
        double next_value = value;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            PhasePair trial{current.phi_s + scale * step(0),
                            current.phi_d + scale * step(1)};
            double trial_value;
            try {
                trial_value = value_at(trial);
            } catch (const std::invalid_argument&) {
                scale *= 0.5;
                continue;
            }
            if (trial_value > value) {
                next = trial;
                next_value = trial_value;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            // near the optimum the value comparison drowns in roundoff;
            // fall back to Newton on the stationarity condition and accept
            // steps that shrink the gradient
            if (grad.norm() >= 1e-4) break;
            const PhasePair trial{current.phi_s + step(0),
                                  current.phi_d + step(1)};
            Eigen::Vector2d trial_grad;
            try {
                trial_grad = grad_at(trial);
            } catch (const std::invalid_argument&) {
                break;
            }
            if (trial_grad.norm() >= grad.norm()) break;
            next = trial;
            try {
                next_value = value_at(trial);
            } catch (const std::invalid_argument&) {
                break;
            }
        }

        const double step_norm = std::hypot(next.phi_s - current.phi_s,
                                            next.phi_d - current.phi_d);
        current = next;
        value = next_value;
        grad = grad_at(current);
        damping = std::max(damping * 0.25, 1e-8);
        if (grad.norm() < options.gradient_tolerance ||
            step_norm < options.step_tolerance) {
            converged = true;
        }
    }

    EstimateRecord record;
    record.phi_s_hat = current.phi_s;
    record.phi_d_hat = current.phi_d;
    record.method = EstimatorMethod::numeric_mle;
    record.converged = converged;
    return record;
}

EstimationStats statistics(const std::vector<EstimateRecord>& records,
                           const PhasePair& truth) {
    if (records.size() < 2) {
        throw std::invalid_argument("statistics: need at least 2 records");
    }
    CompensatedSum sum_s, sum_d, sq_s, sq_d;
    for (const auto& rec : records) {
        const double ds = wrap_angle(rec.phi_s_hat - truth.phi_s);
        const double dd = wrap_angle(rec.phi_d_hat - truth.phi_d);
        sum_s.add(ds);
        sum_d.add(dd);
        sq_s.add(ds * ds);
        sq_d.add(dd * dd);
    }
    const double n = static_cast<double>(records.size());
    EstimationStats stats;
    stats.count = records.size();
    stats.bias_s = sum_s.value() / n;
    stats.bias_d = sum_d.value() / n;
    stats.rmse_s = std::sqrt(sq_s.value() / n);
    stats.rmse_d = std::sqrt(sq_d.value() / n);
    const double var_s =
        std::max(0.0, (sq_s.value() - n * stats.bias_s * stats.bias_s) / (n - 1.0));
    const double var_d =
        std::max(0.0, (sq_d.value() - n * stats.bias_d * stats.bias_d) / (n - 1.0));
    stats.stderr_s = std::sqrt(var_s / n);
    stats.stderr_d = std::sqrt(var_d / n);
    return stats;
}

}  // namespace mzphase
