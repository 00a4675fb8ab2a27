#include "mzphase/gaussian.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mzphase {

namespace {

constexpr double kUncertaintyTolerance = 1e-10;
constexpr double kSymplecticTolerance = 1e-12;

}  // namespace

Eigen::MatrixXd symplectic_form(int modes) {
    if (modes < 1) throw std::invalid_argument("symplectic_form: modes must be positive");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    omega.topRightCorner(modes, modes) = Eigen::MatrixXd::Identity(modes, modes);
    omega.bottomLeftCorner(modes, modes) = -Eigen::MatrixXd::Identity(modes, modes);
    return omega;
}

double min_uncertainty_eigenvalue(const Eigen::MatrixXd& covariance) {
    const int n = static_cast<int>(covariance.rows());
    Eigen::MatrixXcd herm =
        covariance.cast<std::complex<double>>() +
        std::complex<double>(0.0, 0.5) *
            symplectic_form(n / 2).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm,
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

GaussianState::GaussianState(Eigen::VectorXd displacement,
                             Eigen::MatrixXd covariance)
    : displacement_(std::move(displacement)), covariance_(std::move(covariance)) {
    const auto dim = displacement_.size();
    if (dim < 2 || dim % 2 != 0) {
        throw std::invalid_argument("GaussianState: displacement length must be 2m");
    }
    if (covariance_.rows() != dim || covariance_.cols() != dim) {
        throw std::invalid_argument("GaussianState: covariance must be 2m x 2m");
    }
    modes_ = static_cast<int>(dim / 2);
    // stored symmetrized; products upstream can drift off symmetry
    covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
    const double min_eig = min_uncertainty_eigenvalue(covariance_);
    if (min_eig < -kUncertaintyTolerance) {
        std::ostringstream msg;
        msg << "GaussianState: uncertainty relation violated, min eigenvalue of "
               "Gamma + (i/2)Omega is " << min_eig;
        throw std::invalid_argument(msg.str());
    }
}

GaussianState GaussianState::vacuum(int modes) {
    return GaussianState(Eigen::VectorXd::Zero(2 * modes),
                         0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
}

double GaussianState::displacement_photons() const {
    return 0.5 * displacement_.squaredNorm();
}

double GaussianState::quadratic_photons() const {
    return 0.5 * covariance_.trace() - 0.5 * modes_;
}

SymplecticRotation::SymplecticRotation(const ModeUnitary& u) {
    if (u.rows() != u.cols() || u.rows() < 1) {
        throw std::invalid_argument("SymplecticRotation: unitary must be square");
    }
    modes_ = static_cast<int>(u.rows());
    const Eigen::MatrixXd re = u.real();
    const Eigen::MatrixXd im = u.imag();
    matrix_.resize(2 * modes_, 2 * modes_);
    matrix_.topLeftCorner(modes_, modes_) = re;
    matrix_.topRightCorner(modes_, modes_) = -im;
    matrix_.bottomLeftCorner(modes_, modes_) = im;
    matrix_.bottomRightCorner(modes_, modes_) = re;

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2 * modes_, 2 * modes_);
    const double ortho_err =
        (matrix_ * matrix_.transpose() - eye).cwiseAbs().maxCoeff();
    if (ortho_err > kSymplecticTolerance) {
        std::ostringstream msg;
        msg << "SymplecticRotation: input not unitary (R R^T deviates by "
            << ortho_err << ")";
        throw std::invalid_argument(msg.str());
    }
    const Eigen::MatrixXd omega = symplectic_form(modes_);
    const double symp_err =
        (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
    if (symp_err > kSymplecticTolerance) {
        std::ostringstream msg;
        msg << "SymplecticRotation: symplectic form not preserved (deviation "
            << symp_err << ")";
        throw std::invalid_argument(msg.str());
    }
}

GaussianState make_probe(double alpha1, double alpha2, double r) {
    Eigen::VectorXd d(4);
    const double rt2 = std::sqrt(2.0);
    d << rt2 * alpha1, rt2 * alpha2, 0.0, 0.0;
    Eigen::VectorXd diag(4);
    diag << std::exp(2.0 * r), 1.0, std::exp(-2.0 * r), 1.0;
    return GaussianState(d, 0.5 * diag.asDiagonal().toDenseMatrix());
}

double ProbeParams::squeeze_photons() const {
    const double s = std::sinh(r);
    return s * s;
}

double ProbeParams::beta() const {
    const double nc = coherent_photons();
    if (nc == 0.0) return 0.0;
    return alpha1 * alpha1 / nc;
}

ProbeParams probe_params(const GaussianState& state) {
    if (state.modes() != 2) {
        throw std::invalid_argument("probe_params: expected a 2-mode state");
    }
    const Eigen::VectorXd& d = state.displacement();
    const Eigen::MatrixXd& g = state.covariance();
    constexpr double tol = 1e-9;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
    expected(0, 0) = g(0, 0);
    expected(1, 1) = 0.5;
    expected(2, 2) = 0.25 / g(0, 0);
    expected(3, 3) = 0.5;
    if (g(0, 0) <= 0.0 || (g - expected).cwiseAbs().maxCoeff() > tol ||
        std::abs(d(2)) > tol || std::abs(d(3)) > tol) {
        throw std::invalid_argument(
            "probe_params: state does not have make_probe structure");
    }
    ProbeParams out;
    out.alpha1 = d(0) / std::sqrt(2.0);
    out.alpha2 = d(1) / std::sqrt(2.0);
    out.r = 0.5 * std::log(2.0 * g(0, 0));
    return out;
}

GaussianState apply_network(const GaussianState& state, const ModeUnitary& u) {
    if (u.rows() != state.modes()) {
        std::ostringstream msg;
        msg << "apply_network: unitary has " << u.rows() << " modes, state has "
            << state.modes();
        throw std::invalid_argument(msg.str());
    }
    const SymplecticRotation rot(u);
    const Eigen::MatrixXd& r = rot.matrix();
    Eigen::VectorXd d = r * state.displacement();
    Eigen::MatrixXd g = r * state.covariance() * r.transpose();
    return GaussianState(std::move(d), std::move(g));
}

double mean_photon_number(const GaussianState& state) {
    return state.displacement_photons() + state.quadratic_photons();
}

}  // namespace mzphase
