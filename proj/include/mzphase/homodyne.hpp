#pragma once

#include <Eigen/Dense>

#include "mzphase/gaussian.hpp"
#include "mzphase/interferometer.hpp"

namespace mzphase {

/// Local oscillator phases for the two output homodyne detectors.
///
/// Tuned mode places each LO at gamma_i1 + pi/2 + k_i/N_s, i.e. a k_i/N_s
/// offset from the minimum-variance quadrature of the squeezed input as seen
/// at output i. Tuning uses the true phases (oracle tuning); an explicit mode
/// exists for mistuned-LO studies.
struct LoSetting {
    enum class Mode { explicit_angles, tuned };

    Mode mode = Mode::tuned;
    double theta1 = 0.0;  // explicit mode
    double theta2 = 0.0;
    double k1 = 0.0;      // tuned mode offsets
    double k2 = 0.0;

    static LoSetting explicit_angles(double t1, double t2) {
        return {Mode::explicit_angles, t1, t2, 0.0, 0.0};
    }
    static LoSetting tuned(double k1, double k2) {
        return {Mode::tuned, 0.0, 0.0, k1, k2};
    }
    static LoSetting tuned(double k) { return tuned(k, k); }

    bool symmetric() const { return k1 == k2; }
    double k() const;  ///< common offset; throws if k1 != k2
};

struct LoAngles {
    double theta1 = 0.0;
    double theta2 = 0.0;
};

/// Resolves an LoSetting to concrete angles. Tuned mode reads gamma_i1 from
/// decompose(phases) and N_s from the probe; it requires N_s > 0 and both
/// first-column amplitudes nondegenerate.
LoAngles resolve_lo(const LoSetting& setting, const PhasePair& phases,
                    const GaussianState& probe);

/// Joint two-homodyne outcome distribution: Gaussian with mean mu and
/// 2x2 covariance sigma.
class HomodyneDistribution {
public:
    /// Validates sigma symmetric positive definite; caches the determinant.
    HomodyneDistribution(Eigen::Vector2d mu, Eigen::Matrix2d sigma);

    const Eigen::Vector2d& mu() const { return mu_; }
    const Eigen::Matrix2d& sigma() const { return sigma_; }
    double det_sigma() const { return det_; }

    /// Cofactor matrix C with C11 = sigma22, C22 = sigma11, C12 = C21 = -sigma12;
    /// sigma^{-1} = C / det.
    Eigen::Matrix2d cofactor() const;
    Eigen::Matrix2d inverse() const { return cofactor() / det_; }

private:
    Eigen::Vector2d mu_;
    Eigen::Matrix2d sigma_;
    double det_;
};

/// Closed-form (mu, sigma) of the joint homodyne outcome for a make_probe
/// state sent through the MZI, with LO angles theta1, theta2. Equals the
/// moment-propagation path (LO rotation diag(e^{-i theta_i}) appended to the
/// MZI, state propagated, q-block marginal read off) to roundoff.
HomodyneDistribution output_distribution(const PhasePair& phases,
                                         const GaussianState& probe,
                                         double theta1, double theta2);

/// Large-N_s expansion of det(sigma): det = N_s*b1 + b2 + b3/N_s + O(N_s^-2)
/// at fixed angles, where N_s = sinh^2 r.
struct DetExpansion {
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;

    double reconstruct(double n_s) const { return n_s * b1 + b2 + b3 / n_s; }
};

DetExpansion det_sigma_expansion(const PhasePair& phases, double r,
                                 double theta1, double theta2);

/// log p(x) of the bivariate Gaussian outcome density.
double log_density(const HomodyneDistribution& dist, const Eigen::Vector2d& x);

}  // namespace mzphase
