#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mzphase/gaussian.hpp"
#include "mzphase/homodyne.hpp"
#include "mzphase/interferometer.hpp"

namespace mzphase {

/// Thrown when a closed-form estimator is undefined for the given sample
/// (e.g. arccos argument outside its domain at small nu). Callers count
/// these, exclude the trial from the statistics and report the rate.
class EstimatorFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// nu joint homodyne outcomes plus the seed and an identifier of the
/// generating configuration.
struct SampleBatch {
    std::vector<Eigen::Vector2d> outcomes;
    std::uint64_t seed = 0;
    std::string scenario_digest;

    std::size_t size() const { return outcomes.size(); }
    Eigen::Vector2d mean() const;
    /// Sample covariance with 1/nu normalization (about the sample mean).
    Eigen::Matrix2d covariance() const;
};

/// nu i.i.d. draws x = mu + L z, L the lower Cholesky factor of sigma,
/// z standard normal from the documented seeded stream. Deterministic for a
/// given seed.
SampleBatch sample(const HomodyneDistribution& dist, std::size_t nu,
                   std::uint64_t seed);

/// Closed-form estimator of phi_d from the sample mean:
/// phi_d = 2 atan2(-mean1, mean2), wrapped to (-pi, pi].
/// Valid in the beta = 0 regime (alpha1 = 0) with symmetric tuned LOs and
/// phi_d inside the principal branch (0, pi). Throws EstimatorFailure when
/// the sample mean vanishes.
double mle_phi_d(const SampleBatch& batch);

/// Closed-form estimator of phi_s from the sample covariance:
/// phi_s = 2 theta1 - 2 pi +/- arccos[(2(p1 S11 + p2 S22 + 2 sqrt(p1 p2) S12)
///         - cosh 2r) / sinh 2r],  p1 = cos^2(phi_d_hat / 2).
/// The arccos argument is clamped when within 1e-6 outside [-1, 1] (sampling
/// noise) and rejected beyond that. Of the two arccos branches (and their 2pi
/// translates) the one nearest branch_center is returned. Same validity
/// regime as mle_phi_d; requires r != 0.
double mle_phi_s(const SampleBatch& batch, double phi_d_hat, double r,
                 double theta1, double branch_center = 0.0);

enum class EstimatorMethod { closed_form, numeric_mle };

struct EstimateRecord {
    double phi_s_hat = 0.0;
    double phi_d_hat = 0.0;
    EstimatorMethod method = EstimatorMethod::closed_form;
    bool converged = true;
};

/// Log-likelihood of the batch under the model at (phases, probe, LO angles).
double log_likelihood(const SampleBatch& batch, const GaussianState& probe,
                      const LoAngles& lo, const PhasePair& phases);

/// Gradient of the log-likelihood in (phi_s, phi_d): the stationarity
/// residual of the likelihood equations. Normalized per sample (divided by
/// nu) so tolerances do not scale with batch size.
Eigen::Vector2d log_likelihood_gradient(const SampleBatch& batch,
                                        const GaussianState& probe,
                                        const LoAngles& lo,
                                        const PhasePair& phases);

struct MleOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;  // on the per-sample gradient norm
    double step_tolerance = 1e-10;
};

/// Numeric maximum-likelihood estimate: damped Newton ascent on the
/// log-likelihood from init, using the analytic gradient. Works for any
/// probe (including alpha1 != 0 where no closed forms exist); serves as the
/// oracle the closed-form estimators are validated against.
EstimateRecord mle_numeric(const SampleBatch& batch, const GaussianState& probe,
                           const LoAngles& lo, const PhasePair& init,
                           const MleOptions& options = {});

/// Bias, RMS error and standard errors of a set of estimates against the
/// truth. Differences are reduced to (-pi, pi] before averaging; sums are
/// compensated so the result does not depend on accumulation order.
struct EstimationStats {
    double bias_s = 0.0;
    double bias_d = 0.0;
    double rmse_s = 0.0;
    double rmse_d = 0.0;
    double stderr_s = 0.0;
    double stderr_d = 0.0;
    std::size_t count = 0;
};

EstimationStats statistics(const std::vector<EstimateRecord>& records,
                           const PhasePair& truth);

/// Circular difference reduced to (-pi, pi].
double wrap_angle(double x);

}  // namespace mzphase
