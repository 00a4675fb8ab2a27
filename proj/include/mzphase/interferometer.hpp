#pragma once

#include <Eigen/Dense>

#include "mzphase/gaussian.hpp"

namespace mzphase {

/// Sum/difference parametrization of the two arm phases:
/// phi_s = phi1 + phi2, phi_d = phi1 - phi2.
struct PhasePair {
    double phi_s = 0.0;
    double phi_d = 0.0;

    static PhasePair from_arm_phases(double phi1, double phi2) {
        return {phi1 + phi2, phi1 - phi2};
    }
    double phi1() const { return 0.5 * (phi_s + phi_d); }
    double phi2() const { return 0.5 * (phi_s - phi_d); }
};

/// Balanced MZI in closed form:
/// U = e^{i phi_s/2} [[cos(phi_d/2), i sin(phi_d/2)], [i sin(phi_d/2), cos(phi_d/2)]].
Eigen::Matrix2cd mzi_unitary(const PhasePair& phases);

/// Same network built from its optical factors U_BS^dag U_PH U_BS with 50:50
/// beam splitters. Agrees with mzi_unitary entrywise to roundoff; kept as an
/// independent construction path.
Eigen::Matrix2cd mzi_unitary_factored(const PhasePair& phases);

/// Amplitude/phase split U_ij = sqrt(p_ij) e^{i gamma_ij} of the MZI entries,
/// with the analytic parameter derivatives.
///
/// gamma is wrapped to (-pi, pi]. Entries with p_ij < indeterminate_threshold
/// have no defined phase: they are flagged and their gamma and gamma
/// derivatives are set to zero so downstream sqrt(p)*f(gamma) products stay
/// finite.
struct UnitaryDecomposition {
    Eigen::Matrix2d p;
    Eigen::Matrix2d gamma;
    Eigen::Matrix2d dp_s;      // identically zero: p does not depend on phi_s
    Eigen::Matrix2d dp_d;
    Eigen::Matrix2d dgamma_s;  // 1/2 wherever p != 0
    Eigen::Matrix2d dgamma_d;  // identically zero
    Eigen::Matrix2<bool> indeterminate;

    // Smooth signed-amplitude form of the same matrix:
    //   U_11 = U_22 = amp_diag e^{i half_sum},
    //   U_12 = U_21 = i amp_cross e^{i half_sum},
    // with amp_diag = cos(phi_d/2), amp_cross = sin(phi_d/2), half_sum = phi_s/2.
    // Unlike (p, gamma) this parametrization has no branch points; the
    // homodyne and Fisher closed forms differentiate through it.
    double amp_diag = 1.0;
    double amp_cross = 0.0;
    double half_sum = 0.0;

    static constexpr double indeterminate_threshold = 1e-12;
};

UnitaryDecomposition decompose(const PhasePair& phases);

}  // namespace mzphase
