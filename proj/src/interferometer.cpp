#include "mzphase/interferometer.hpp"

#include <cmath>
#include <complex>

namespace mzphase {

namespace {

const std::complex<double> kI(0.0, 1.0);

double wrap_pi(double x) {
    // (-pi, pi]
    double w = std::remainder(x, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

}  // namespace

Eigen::Matrix2cd mzi_unitary(const PhasePair& phases) {
    const double c = std::cos(0.5 * phases.phi_d);
    const double s = std::sin(0.5 * phases.phi_d);
    const std::complex<double> global = std::exp(kI * (0.5 * phases.phi_s));
    Eigen::Matrix2cd u;
    u << global * c, global * kI * s,
         global * kI * s, global * c;
    return u;
}

Eigen::Matrix2cd mzi_unitary_factored(const PhasePair& phases) {
    Eigen::Matrix2cd bs;
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    bs << inv_rt2, inv_rt2,
         -inv_rt2, inv_rt2;
    Eigen::Matrix2cd ph = Eigen::Matrix2cd::Zero();
    ph(0, 0) = std::exp(kI * phases.phi1());
    ph(1, 1) = std::exp(kI * phases.phi2());
    return bs.adjoint() * ph * bs;
}

UnitaryDecomposition decompose(const PhasePair& phases) {
    UnitaryDecomposition out;
    out.amp_diag = std::cos(0.5 * phases.phi_d);
    out.amp_cross = std::sin(0.5 * phases.phi_d);
    out.half_sum = 0.5 * phases.phi_s;

    const Eigen::Matrix2cd u = mzi_unitary(phases);
    const double p1 = out.amp_diag * out.amp_diag;
    const double p2 = out.amp_cross * out.amp_cross;
    out.p << p1, p2,
             p2, p1;

    const double dp1 = -0.5 * std::sin(phases.phi_d);
    out.dp_s = Eigen::Matrix2d::Zero();
    out.dp_d << dp1, -dp1,
                -dp1, dp1;

    out.dgamma_d = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (out.p(i, j) < UnitaryDecomposition::indeterminate_threshold) {
                out.indeterminate(i, j) = true;
                out.gamma(i, j) = 0.0;
                out.dgamma_s(i, j) = 0.0;
            } else {
                out.indeterminate(i, j) = false;
                out.gamma(i, j) = wrap_pi(std::arg(u(i, j)));
                out.dgamma_s(i, j) = 0.5;
            }
        }
    }
    return out;
}

}  // namespace mzphase
