#include "mzphase/homodyne.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mzphase {

double LoSetting::k() const {
    if (mode != Mode::tuned) {
        throw std::logic_error("LoSetting::k: not a tuned setting");
    }
    if (k1 != k2) {
        throw std::logic_error("LoSetting::k: offsets differ, use k1/k2");
    }
    return k1;
}

LoAngles resolve_lo(const LoSetting& setting, const PhasePair& phases,
                    const GaussianState& probe) {
    if (setting.mode == LoSetting::Mode::explicit_angles) {
        return {setting.theta1, setting.theta2};
    }
    const double n_s = probe.quadratic_photons();
    if (!(n_s > 0.0)) {
        throw std::invalid_argument(
            "resolve_lo: tuned mode requires squeeze photons N_s > 0");
    }
    const UnitaryDecomposition dec = decompose(phases);
    for (int i = 0; i < 2; ++i) {
        if (dec.indeterminate(i, 0)) {
            std::ostringstream msg;
            msg << "resolve_lo: tuned mode undefined, output channel " << (i + 1)
                << " has vanishing first-column amplitude (p_" << (i + 1)
                << "1 ~ 0)";
            throw std::invalid_argument(msg.str());
        }
    }
    return {dec.gamma(0, 0) + M_PI / 2.0 + setting.k1 / n_s,
            dec.gamma(1, 0) + M_PI / 2.0 + setting.k2 / n_s};
}

HomodyneDistribution::HomodyneDistribution(Eigen::Vector2d mu,
                                           Eigen::Matrix2d sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
    sigma_ = (0.5 * (sigma_ + sigma_.transpose())).eval();
    det_ = sigma_(0, 0) * sigma_(1, 1) - sigma_(0, 1) * sigma_(1, 0);
    // det <= 0 never occurs for a physical homodyne marginal; treat it as an
    // upstream bug rather than clipping
    if (!(sigma_(0, 0) > 0.0) || !(det_ > 0.0)) {
        std::ostringstream msg;
        msg << "HomodyneDistribution: covariance not positive definite "
               "(sigma11 = " << sigma_(0, 0) << ", det = " << det_ << ")";
        throw std::invalid_argument(msg.str());
    }
}

Eigen::Matrix2d HomodyneDistribution::cofactor() const {
    Eigen::Matrix2d c;
    c << sigma_(1, 1), -sigma_(0, 1),
         -sigma_(1, 0), sigma_(0, 0);
    return c;
}

namespace {

struct ClosedFormTerms {
    double a;   // cos(phi_d/2), signed amplitude of the diagonal entries
    double b;   // sin(phi_d/2), signed amplitude of the cross entries
    double e1;  // phi_s/2 - theta1
    double e2;  // phi_s/2 - theta2
    double s2;  // sinh^2 r
    double sc;  // sinh r cosh r
};

ClosedFormTerms closed_form_terms(const PhasePair& phases, double r,
                                  double theta1, double theta2) {
    ClosedFormTerms t;
    t.a = std::cos(0.5 * phases.phi_d);
    t.b = std::sin(0.5 * phases.phi_d);
    t.e1 = 0.5 * phases.phi_s - theta1;
    t.e2 = 0.5 * phases.phi_s - theta2;
    t.s2 = std::sinh(r) * std::sinh(r);
    t.sc = std::sinh(r) * std::cosh(r);
    return t;
}

}  // namespace

HomodyneDistribution output_distribution(const PhasePair& phases,
                                         const GaussianState& probe,
                                         double theta1, double theta2) {
    const ProbeParams pp = probe_params(probe);
    const ClosedFormTerms t = closed_form_terms(phases, pp.r, theta1, theta2);
    const double rt2 = std::sqrt(2.0);

    // mean: sqrt(2) Re[e^{-i theta_i} U_ij] alpha_j written with the signed
    // amplitudes, so degenerate phi_d needs no special casing
    Eigen::Vector2d mu;
    mu << rt2 * (pp.alpha1 * t.a * std::cos(t.e1) -
                 pp.alpha2 * t.b * std::sin(t.e1)),
          rt2 * (-pp.alpha1 * t.b * std::sin(t.e2) +
                 pp.alpha2 * t.a * std::cos(t.e2));

    Eigen::Matrix2d sigma;
    sigma(0, 0) = 0.5 + t.a * t.a * (t.s2 + std::cos(2.0 * t.e1) * t.sc);
    sigma(1, 1) = 0.5 + t.b * t.b * (t.s2 - std::cos(2.0 * t.e2) * t.sc);
    sigma(0, 1) = t.a * t.b *
                  (std::sin(t.e1 - t.e2) * t.s2 - std::sin(t.e1 + t.e2) * t.sc);
    sigma(1, 0) = sigma(0, 1);
    return HomodyneDistribution(mu, sigma);
}

DetExpansion det_sigma_expansion(const PhasePair& phases, double r,
                                 double theta1, double theta2) {
    const ClosedFormTerms t = closed_form_terms(phases, r, theta1, theta2);
    const double p1 = t.a * t.a;
    const double p2 = t.b * t.b;
    // p_i cos 2(gamma_i1 - theta_i) for the two output channels
    const double y = p1 * std::cos(2.0 * t.e1) - p2 * std::cos(2.0 * t.e2);
    const double x = 1.0 - 2.0 * p1 * p2 * std::pow(std::cos(t.e1 - t.e2), 2);
    DetExpansion out;
    out.b1 = 0.5 * (x + y);
    out.b2 = 0.25 * (1.0 + y);
    out.b3 = -y / 16.0;
    return out;
}

double log_density(const HomodyneDistribution& dist, const Eigen::Vector2d& x) {
    const Eigen::Vector2d delta = x - dist.mu();
    const double quad = delta.dot(dist.inverse() * delta);
    return -std::log(2.0 * M_PI * std::sqrt(dist.det_sigma())) - 0.5 * quad;
}

}  // namespace mzphase
