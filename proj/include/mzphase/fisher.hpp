#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "mzphase/gaussian.hpp"
#include "mzphase/homodyne.hpp"
#include "mzphase/interferometer.hpp"

namespace mzphase {

enum class FisherKind {
    exact,
    signal_asymptotic,
    noise_asymptotic,
    total_asymptotic,
};

/// 2x2 symmetric PSD information matrix in the (phi_s, phi_d) basis.
struct FisherMatrix {
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
    FisherKind kind = FisherKind::exact;

    double ss() const { return matrix(0, 0); }
    double sd() const { return matrix(0, 1); }
    double dd() const { return matrix(1, 1); }
};

/// Exact FIM split into the mean (signal) and covariance (noise) parts:
/// F_mn = dmu_m^T Sigma^{-1} dmu_n + 1/2 tr[Sigma^{-1} dSigma_m Sigma^{-1} dSigma_n].
struct ExactFim {
    FisherMatrix signal;
    FisherMatrix noise;
    FisherMatrix total;
};

/// Evaluates the exact FIM at an operating point from the analytic
/// derivatives of the closed-form (mu, sigma). The LO angles are resolved at
/// the operating point and then held fixed under the phi derivatives: theta
/// is an instrument setting, not a function of the unknown phases.
ExactFim fim_exact(const PhasePair& phases, const GaussianState& probe,
                   const LoSetting& lo);

/// Asymptotic signal FIM for tuned LOs with offsets (k1, k2); N_c1 = beta*N_c,
/// N_c2 = (1-beta)*N_c. For k1 == k2 this is phi_d-independent and exactly
/// rank <= 1.
FisherMatrix fim_signal_asymptotic(double beta, double n_s, double n_c,
                                   double k1, double k2, double phi_d);

/// Asymptotic noise FIM for tuned LOs: ss entry at O(N_s^2), sd at O(N_s),
/// dd at O(N_s).
FisherMatrix fim_noise_asymptotic(double n_s, double k1, double k2,
                                  double phi_d);

/// Asymptotic total FIM, symmetric tuning k1 = k2 = k.
FisherMatrix fim_total_asymptotic(double beta, double n_s, double n_c,
                                  double k);

/// Cramer-Rao variance bounds for nu repetitions.
struct CrbReport {
    double var_phi_s = 0.0;
    double var_phi_d = 0.0;
    std::uint64_t nu = 1;
    std::optional<double> linear_combo_variance;  // via crb_pseudo
    Eigen::Vector2d weights = Eigen::Vector2d::Zero();
};

/// var_phi_m = (F^{-1})_mm / nu. Throws if F is singular or has condition
/// number above 1e12, directing the caller to crb_pseudo.
CrbReport crb(const FisherMatrix& f, std::uint64_t nu);

/// Bound for the linear combination w_s phi_s + w_d phi_d via the
/// Moore-Penrose pseudo-inverse: J F^+ J^T / nu. Eigenvalues below
/// rank_threshold * trace are treated as zero. Throws if the weights lie in
/// the kernel of F (combination not identifiable).
double crb_pseudo(const FisherMatrix& f, const Eigen::Vector2d& weights,
                  std::uint64_t nu, double rank_threshold = 1e-9);

}  // namespace mzphase
