#pragma once

#include <Eigen/Dense>

#include <complex>

namespace mzphase {

/// Complex m x m matrix of a passive linear optical network, acting on the
/// mode creation operators.
using ModeUnitary = Eigen::MatrixXcd;

/// Symplectic form Omega = [[0, I], [-I, 0]] for m modes in (q..., p...)
/// quadrature ordering.
Eigen::MatrixXd symplectic_form(int modes);

/// Gaussian bosonic state given by its first and second quadrature moments.
///
/// Units convention (fixed throughout this library):
///   * hbar = 1, quadratures ordered (q_1..q_m, p_1..p_m),
///   * vacuum covariance is I/2 (vacuum quadrature variance 1/2),
///   * a coherent amplitude alpha displaces q by sqrt(2)*alpha.
/// Conventions vary across the literature; every formula here assumes the
/// above and nothing else.
class GaussianState {
public:
    /// Validates dimensions, symmetrizes the covariance, and checks the
    /// uncertainty relation: min eig of (Gamma + i/2 Omega) >= -1e-10.
    GaussianState(Eigen::VectorXd displacement, Eigen::MatrixXd covariance);

    static GaussianState vacuum(int modes);

    int modes() const { return modes_; }
    const Eigen::VectorXd& displacement() const { return displacement_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }

    /// |d|^2 / 2: photons carried by the displacement.
    double displacement_photons() const;
    /// tr(Gamma)/2 - m/2: photons carried by squeezing/thermal excitation.
    double quadratic_photons() const;

private:
    int modes_;
    Eigen::VectorXd displacement_;
    Eigen::MatrixXd covariance_;
};

/// Smallest eigenvalue of the Hermitian matrix Gamma + (i/2) Omega.
/// Physical states satisfy >= 0 up to roundoff.
double min_uncertainty_eigenvalue(const Eigen::MatrixXd& covariance);

/// Orthogonal symplectic rotation R = [[Re U, -Im U], [Im U, Re U]] induced
/// on quadrature space by a passive network U.
class SymplecticRotation {
public:
    explicit SymplecticRotation(const ModeUnitary& u);

    int modes() const { return modes_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

private:
    int modes_;
    Eigen::MatrixXd matrix_;
};

/// Two-mode probe: displaced squeezed state (alpha1, r) in mode 1 and a
/// coherent state alpha2 in mode 2. d = sqrt(2)(alpha1, alpha2, 0, 0),
/// Gamma = diag(e^{2r}, 1, e^{-2r}, 1)/2. alpha1, alpha2, r real.
GaussianState make_probe(double alpha1, double alpha2, double r);

/// Parameters of a make_probe state, recovered from its moments.
struct ProbeParams {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double r = 0.0;

    double coherent_photons() const { return alpha1 * alpha1 + alpha2 * alpha2; }
    double squeeze_photons() const;
    double beta() const;  ///< alpha1^2 / (alpha1^2 + alpha2^2); 0 when no displacement
};

/// Recovers (alpha1, alpha2, r) from a state produced by make_probe.
/// Throws std::invalid_argument if the moments do not have probe structure.
ProbeParams probe_params(const GaussianState& state);

/// Propagates the state through a passive network: d' = R d, Gamma' = R Gamma R^T.
GaussianState apply_network(const GaussianState& state, const ModeUnitary& u);

/// N = tr(Gamma)/2 + |d|^2/2 - m/2. Invariant under apply_network.
double mean_photon_number(const GaussianState& state);

}  // namespace mzphase
