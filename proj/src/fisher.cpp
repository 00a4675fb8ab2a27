#include "mzphase/fisher.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mzphase {

namespace {

struct ModelDerivatives {
    Eigen::Vector2d dmu_s, dmu_d;
    Eigen::Matrix2d dsig_s, dsig_d;
};

// Analytic phi derivatives of the closed-form (mu, sigma) at fixed LO angles.
// Written with the signed amplitudes a = cos(phi_d/2), b = sin(phi_d/2) and
// half-phases e_i = phi_s/2 - theta_i; smooth at every phi_d.
ModelDerivatives model_derivatives(const PhasePair& phases, const ProbeParams& pp,
                                   double theta1, double theta2) {
    const double a = std::cos(0.5 * phases.phi_d);
    const double b = std::sin(0.5 * phases.phi_d);
    const double e1 = 0.5 * phases.phi_s - theta1;
    const double e2 = 0.5 * phases.phi_s - theta2;
    const double s2 = std::sinh(pp.r) * std::sinh(pp.r);
    const double sc = std::sinh(pp.r) * std::cosh(pp.r);
    const double a1 = pp.alpha1;
    const double a2 = pp.alpha2;
    const double half_rt2 = 0.5 * std::sqrt(2.0);

    ModelDerivatives d;
    d.dmu_s << half_rt2 * (-a1 * a * std::sin(e1) - a2 * b * std::cos(e1)),
        half_rt2 * (-a1 * b * std::cos(e2) - a2 * a * std::sin(e2));
    d.dmu_d << half_rt2 * (-a1 * b * std::cos(e1) - a2 * a * std::sin(e1)),
        half_rt2 * (-a1 * a * std::sin(e2) - a2 * b * std::cos(e2));

    d.dsig_s(0, 0) = -a * a * std::sin(2.0 * e1) * sc;
    d.dsig_s(1, 1) = b * b * std::sin(2.0 * e2) * sc;
    d.dsig_s(0, 1) = -a * b * std::cos(e1 + e2) * sc;
    d.dsig_s(1, 0) = d.dsig_s(0, 1);

    d.dsig_d(0, 0) = -a * b * (s2 + std::cos(2.0 * e1) * sc);
    d.dsig_d(1, 1) = a * b * (s2 - std::cos(2.0 * e2) * sc);
    d.dsig_d(0, 1) = 0.5 * (a * a - b * b) *
                     (std::sin(e1 - e2) * s2 - std::sin(e1 + e2) * sc);
    d.dsig_d(1, 0) = d.dsig_d(0, 1);
    return d;
}

// Shared denominator of the asymptotic formulas; reduces to 16k^2 + 1 for
// k1 = k2 = k.
double asym_denominator(double k1, double k2, double phi_d) {
    return 1.0 + 6.0 * k1 * k1 + 6.0 * k2 * k2 + 4.0 * k1 * k2 +
           8.0 * (k1 * k1 - k2 * k2) * std::cos(phi_d) +
           2.0 * (k1 - k2) * (k1 - k2) * std::cos(2.0 * phi_d);
}

}  // namespace

ExactFim fim_exact(const PhasePair& phases, const GaussianState& probe,
                   const LoSetting& lo) {
    const LoAngles angles = resolve_lo(lo, phases, probe);
    const HomodyneDistribution dist =
        output_distribution(phases, probe, angles.theta1, angles.theta2);
    const Eigen::Matrix2d sig_inv = dist.inverse();
    const ProbeParams pp = probe_params(probe);
    const ModelDerivatives d =
        model_derivatives(phases, pp, angles.theta1, angles.theta2);

    const Eigen::Vector2d dmu[2] = {d.dmu_s, d.dmu_d};
    const Eigen::Matrix2d dsig[2] = {d.dsig_s, d.dsig_d};

    ExactFim out;
    for (int m = 0; m < 2; ++m) {
        for (int n = 0; n < 2; ++n) {
            out.signal.matrix(m, n) = dmu[m].dot(sig_inv * dmu[n]);
            out.noise.matrix(m, n) =
                0.5 * (sig_inv * dsig[m] * sig_inv * dsig[n]).trace();
        }
    }
    out.signal.matrix = (0.5 * (out.signal.matrix + out.signal.matrix.transpose())).eval();
    out.noise.matrix = (0.5 * (out.noise.matrix + out.noise.matrix.transpose())).eval();
    out.total.matrix = out.signal.matrix + out.noise.matrix;
    out.signal.kind = out.noise.kind = out.total.kind = FisherKind::exact;
    return out;
}

FisherMatrix fim_signal_asymptotic(double beta, double n_s, double n_c,
                                   double k1, double k2, double phi_d) {
    if (beta < 0.0 || beta > 1.0) {
        throw std::invalid_argument("fim_signal_asymptotic: beta must be in [0, 1]");
    }
    if (!(n_s > 0.0) || !(n_c > 0.0)) {
        throw std::invalid_argument("fim_signal_asymptotic: N_s, N_c must be positive");
    }
    const double q = asym_denominator(k1, k2, phi_d);
    const double nc1 = beta * n_c;
    const double nc2 = (1.0 - beta) * n_c;
    FisherMatrix f;
    f.kind = FisherKind::signal_asymptotic;
    f.matrix << nc1, std::sqrt(nc1 * nc2),
                std::sqrt(nc1 * nc2), nc2;
    f.matrix *= 4.0 * n_s / q;
    return f;
}

FisherMatrix fim_noise_asymptotic(double n_s, double k1, double k2,
                                  double phi_d) {
    if (!(n_s > 0.0)) {
        throw std::invalid_argument("fim_noise_asymptotic: N_s must be positive");
    }
    const double q = asym_denominator(k1, k2, phi_d);
    const double dk = k1 - k2;
    const double sk = k1 + k2;
    FisherMatrix f;
    f.kind = FisherKind::noise_asymptotic;
    const double edge = dk * std::cos(phi_d) + sk;
    f.matrix(0, 0) = 32.0 * n_s * n_s * edge * edge / (q * q);
    const double sd =
        2.0 * n_s * dk *
        ((15.0 * k1 * k1 + 18.0 * k1 * k2 + 15.0 * k2 * k2 - 1.0) * std::sin(phi_d) +
         12.0 * (k1 * k1 - k2 * k2) * std::sin(2.0 * phi_d) +
         dk * dk * std::sin(3.0 * phi_d)) /
        (q * q);
    f.matrix(0, 1) = f.matrix(1, 0) = sd;
    f.matrix(1, 1) = n_s / q;
    return f;
}

FisherMatrix fim_total_asymptotic(double beta, double n_s, double n_c,
                                  double k) {
    if (beta < 0.0 || beta > 1.0) {
        throw std::invalid_argument("fim_total_asymptotic: beta must be in [0, 1]");
    }
    const double q = 16.0 * k * k + 1.0;
    const double g = 4.0 * n_s * n_c / q;
    const double w = 128.0 * n_s * n_s * k * k / (q * q);
    FisherMatrix f;
    f.kind = FisherKind::total_asymptotic;
    f.matrix << g * beta + w, g * std::sqrt(beta * (1.0 - beta)),
                g * std::sqrt(beta * (1.0 - beta)), g * (1.0 - beta);
    return f;
}

CrbReport crb(const FisherMatrix& f, std::uint64_t nu) {
    if (nu == 0) throw std::invalid_argument("crb: nu must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(f.matrix);
    const double lo = solver.eigenvalues()(0);
    const double hi = solver.eigenvalues()(1);
    if (!(lo > 0.0) || hi / lo > 1e12) {
        std::ostringstream msg;
        msg << "crb: information matrix singular or ill-conditioned "
               "(eigenvalues " << lo << ", " << hi
            << "); use crb_pseudo for an identifiable linear combination";
        throw std::invalid_argument(msg.str());
    }
    const double det = f.matrix(0, 0) * f.matrix(1, 1) - f.matrix(0, 1) * f.matrix(1, 0);
    CrbReport report;
    report.nu = nu;
    report.var_phi_s = f.matrix(1, 1) / det / static_cast<double>(nu);
    report.var_phi_d = f.matrix(0, 0) / det / static_cast<double>(nu);
    return report;
}

double crb_pseudo(const FisherMatrix& f, const Eigen::Vector2d& weights,
                  std::uint64_t nu, double rank_threshold) {
    if (nu == 0) throw std::invalid_argument("crb_pseudo: nu must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(f.matrix);
    const Eigen::Vector2d eig = solver.eigenvalues();
    const Eigen::Matrix2d vec = solver.eigenvectors();
    const double cut = rank_threshold * f.matrix.trace();

    // reject weights with support only on the kernel
    double range_overlap = 0.0;
    Eigen::Matrix2d pinv = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 2; ++i) {
        const double proj = std::abs(vec.col(i).dot(weights));
        if (eig(i) > cut) {
            pinv += vec.col(i) * vec.col(i).transpose() / eig(i);
            range_overlap += proj;
        }
    }
    if (range_overlap <= 1e-12 * weights.norm()) {
        throw std::invalid_argument(
            "crb_pseudo: weights lie in the kernel of the information matrix; "
            "the combination is not identifiable");
    }
    return weights.dot(pinv * weights) / static_cast<double>(nu);
}

}  // namespace mzphase
