#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mzphase/estimation.hpp"
#include "mzphase/experiment.hpp"
#include "mzphase/fisher.hpp"
#include "mzphase/gaussian.hpp"
#include "mzphase/homodyne.hpp"
#include "mzphase/interferometer.hpp"
#include "mzphase/version.hpp"

namespace py = pybind11;
using namespace mzphase;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-parameter MZI phase estimation: Gaussian states, homodyne "
              "statistics, Fisher information and maximum-likelihood "
              "estimators";

    py::register_exception<EstimatorFailure>(m, "EstimatorFailure");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<GaussianState>(m, "GaussianState")
        .def(py::init<Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("displacement"),
             py::arg("covariance"))
        .def_static("vacuum", &GaussianState::vacuum, py::arg("modes"))
        .def_property_readonly("modes", &GaussianState::modes)
        .def_property_readonly("displacement", &GaussianState::displacement)
        .def_property_readonly("covariance", &GaussianState::covariance)
        .def("displacement_photons", &GaussianState::displacement_photons)
        .def("quadratic_photons", &GaussianState::quadratic_photons);

    py::class_<SymplecticRotation>(m, "SymplecticRotation")
        .def(py::init<const ModeUnitary&>(), py::arg("unitary"))
        .def_property_readonly("matrix", &SymplecticRotation::matrix)
        .def_property_readonly("modes", &SymplecticRotation::modes);

    m.def("symplectic_form", &symplectic_form, py::arg("modes"));
    m.def("make_probe", &make_probe, py::arg("alpha1"), py::arg("alpha2"),
          py::arg("r"));
    m.def("apply_network", &apply_network, py::arg("state"), py::arg("unitary"));
    m.def("mean_photon_number", &mean_photon_number, py::arg("state"));
    m.def("min_uncertainty_eigenvalue", &min_uncertainty_eigenvalue,
          py::arg("covariance"));

    py::class_<PhasePair>(m, "PhasePair")
        .def(py::init<double, double>(), py::arg("phi_s"), py::arg("phi_d"))
        .def_readwrite("phi_s", &PhasePair::phi_s)
        .def_readwrite("phi_d", &PhasePair::phi_d)
        .def_static("from_arm_phases", &PhasePair::from_arm_phases,
                    py::arg("phi1"), py::arg("phi2"))
        .def("phi1", &PhasePair::phi1)
        .def("phi2", &PhasePair::phi2);

    m.def("mzi_unitary", &mzi_unitary, py::arg("phases"));
    m.def("mzi_unitary_factored", &mzi_unitary_factored, py::arg("phases"));

    py::class_<UnitaryDecomposition>(m, "UnitaryDecomposition")
        .def_readonly("p", &UnitaryDecomposition::p)
        .def_readonly("gamma", &UnitaryDecomposition::gamma)
        .def_readonly("dp_s", &UnitaryDecomposition::dp_s)
        .def_readonly("dp_d", &UnitaryDecomposition::dp_d)
        .def_readonly("dgamma_s", &UnitaryDecomposition::dgamma_s)
        .def_readonly("dgamma_d", &UnitaryDecomposition::dgamma_d)
        .def_property_readonly("indeterminate",
                               [](const UnitaryDecomposition& d) {
                                   return std::array<std::array<bool, 2>, 2>{
                                       {{d.indeterminate(0, 0), d.indeterminate(0, 1)},
                                        {d.indeterminate(1, 0), d.indeterminate(1, 1)}}};
                               });
    m.def("decompose", &decompose, py::arg("phases"));

    py::class_<LoSetting> lo_setting(m, "LoSetting");
    lo_setting
        .def_static("explicit_angles", &LoSetting::explicit_angles,
                    py::arg("theta1"), py::arg("theta2"))
        .def_static("tuned", py::overload_cast<double, double>(&LoSetting::tuned),
                    py::arg("k1"), py::arg("k2"))
        .def_static("tuned", py::overload_cast<double>(&LoSetting::tuned),
                    py::arg("k"))
        .def_readonly("k1", &LoSetting::k1)
        .def_readonly("k2", &LoSetting::k2)
        .def_readonly("theta1", &LoSetting::theta1)
        .def_readonly("theta2", &LoSetting::theta2);

    py::class_<LoAngles>(m, "LoAngles")
        .def(py::init<double, double>(), py::arg("theta1"), py::arg("theta2"))
        .def_readonly("theta1", &LoAngles::theta1)
        .def_readonly("theta2", &LoAngles::theta2);

    m.def("resolve_lo", &resolve_lo, py::arg("setting"), py::arg("phases"),
          py::arg("probe"));

    py::class_<HomodyneDistribution>(m, "HomodyneDistribution")
        .def(py::init<Eigen::Vector2d, Eigen::Matrix2d>(), py::arg("mu"),
             py::arg("sigma"))
        .def_property_readonly("mu", &HomodyneDistribution::mu)
        .def_property_readonly("sigma", &HomodyneDistribution::sigma)
        .def_property_readonly("det_sigma", &HomodyneDistribution::det_sigma)
        .def("cofactor", &HomodyneDistribution::cofactor)
        .def("inverse", &HomodyneDistribution::inverse);

    m.def("output_distribution", &output_distribution, py::arg("phases"),
          py::arg("probe"), py::arg("theta1"), py::arg("theta2"));

    py::class_<DetExpansion>(m, "DetExpansion")
        .def_readonly("b1", &DetExpansion::b1)
        .def_readonly("b2", &DetExpansion::b2)
        .def_readonly("b3", &DetExpansion::b3)
        .def("reconstruct", &DetExpansion::reconstruct, py::arg("n_s"));

    m.def("det_sigma_expansion", &det_sigma_expansion, py::arg("phases"),
          py::arg("r"), py::arg("theta1"), py::arg("theta2"));
    m.def("log_density", &log_density, py::arg("dist"), py::arg("x"));

    py::enum_<FisherKind>(m, "FisherKind")
        .value("exact", FisherKind::exact)
        .value("signal_asymptotic", FisherKind::signal_asymptotic)
        .value("noise_asymptotic", FisherKind::noise_asymptotic)
        .value("total_asymptotic", FisherKind::total_asymptotic);

    py::class_<FisherMatrix>(m, "FisherMatrix")
        .def_readonly("matrix", &FisherMatrix::matrix)
        .def_readonly("kind", &FisherMatrix::kind);

    py::class_<ExactFim>(m, "ExactFim")
        .def_readonly("signal", &ExactFim::signal)
        .def_readonly("noise", &ExactFim::noise)
        .def_readonly("total", &ExactFim::total);

    m.def("fim_exact", &fim_exact, py::arg("phases"), py::arg("probe"),
          py::arg("lo"));
    m.def("fim_signal_asymptotic", &fim_signal_asymptotic, py::arg("beta"),
          py::arg("n_s"), py::arg("n_c"), py::arg("k1"), py::arg("k2"),
          py::arg("phi_d"));
    m.def("fim_noise_asymptotic", &fim_noise_asymptotic, py::arg("n_s"),
          py::arg("k1"), py::arg("k2"), py::arg("phi_d"));
    m.def("fim_total_asymptotic", &fim_total_asymptotic, py::arg("beta"),
          py::arg("n_s"), py::arg("n_c"), py::arg("k"));

    py::class_<CrbReport>(m, "CrbReport")
        .def_readonly("var_phi_s", &CrbReport::var_phi_s)
        .def_readonly("var_phi_d", &CrbReport::var_phi_d)
        .def_readonly("nu", &CrbReport::nu);

    m.def("crb", &crb, py::arg("fisher"), py::arg("nu"));
    m.def("crb_pseudo", &crb_pseudo, py::arg("fisher"), py::arg("weights"),
          py::arg("nu"), py::arg("rank_threshold") = 1e-9);

    py::class_<SampleBatch>(m, "SampleBatch")
        .def_readonly("outcomes", &SampleBatch::outcomes)
        .def_readonly("seed", &SampleBatch::seed)
        .def("__len__", &SampleBatch::size)
        .def("mean", &SampleBatch::mean)
        .def("covariance", &SampleBatch::covariance);

    m.def("sample", &sample, py::arg("dist"), py::arg("nu"), py::arg("seed"));
    m.def("mle_phi_d", &mle_phi_d, py::arg("batch"));
    m.def("mle_phi_s", &mle_phi_s, py::arg("batch"), py::arg("phi_d_hat"),
          py::arg("r"), py::arg("theta1"), py::arg("branch_center") = 0.0);

    py::enum_<EstimatorMethod>(m, "EstimatorMethod")
        .value("closed_form", EstimatorMethod::closed_form)
        .value("numeric_mle", EstimatorMethod::numeric_mle);

    py::class_<EstimateRecord>(m, "EstimateRecord")
        .def(py::init<>())
        .def_readwrite("phi_s_hat", &EstimateRecord::phi_s_hat)
        .def_readwrite("phi_d_hat", &EstimateRecord::phi_d_hat)
        .def_readwrite("method", &EstimateRecord::method)
        .def_readwrite("converged", &EstimateRecord::converged);

    m.def("log_likelihood", &log_likelihood, py::arg("batch"), py::arg("probe"),
          py::arg("lo"), py::arg("phases"));
    m.def("log_likelihood_gradient", &log_likelihood_gradient, py::arg("batch"),
          py::arg("probe"), py::arg("lo"), py::arg("phases"));
    m.def(
        "mle_numeric",
        [](const SampleBatch& batch, const GaussianState& probe,
           const LoAngles& lo, const PhasePair& init) {
            return mle_numeric(batch, probe, lo, init);
        },
        py::arg("batch"), py::arg("probe"), py::arg("lo"), py::arg("init"));

    py::class_<EstimationStats>(m, "EstimationStats")
        .def_readonly("bias_s", &EstimationStats::bias_s)
        .def_readonly("bias_d", &EstimationStats::bias_d)
        .def_readonly("rmse_s", &EstimationStats::rmse_s)
        .def_readonly("rmse_d", &EstimationStats::rmse_d)
        .def_readonly("stderr_s", &EstimationStats::stderr_s)
        .def_readonly("stderr_d", &EstimationStats::stderr_d)
        .def_readonly("count", &EstimationStats::count);

    m.def("statistics", &statistics, py::arg("records"), py::arg("truth"));
    m.def("wrap_angle", &wrap_angle, py::arg("x"));

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_property(
            "seed", [](const ScenarioConfig& c) { return c.run.seed; },
            [](ScenarioConfig& c, std::uint64_t s) { c.run.seed = s; })
        .def_property(
            "output_directory",
            [](const ScenarioConfig& c) { return c.outputs.directory; },
            [](ScenarioConfig& c, const std::string& d) {
                c.outputs.directory = d;
            });

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("nu", &SweepRow::nu)
        .def_readonly("bias_s", &SweepRow::bias_s)
        .def_readonly("bias_d", &SweepRow::bias_d)
        .def_readonly("rmse_s", &SweepRow::rmse_s)
        .def_readonly("rmse_d", &SweepRow::rmse_d)
        .def_readonly("stderr_s", &SweepRow::stderr_s)
        .def_readonly("stderr_d", &SweepRow::stderr_d)
        .def_readonly("crb_s", &SweepRow::crb_s)
        .def_readonly("crb_d", &SweepRow::crb_d)
        .def_readonly("fail_rate", &SweepRow::fail_rate)
        .def_readonly("seed", &SweepRow::seed)
        .def_readonly("total_photons", &SweepRow::total_photons);

    py::class_<ScalingFit>(m, "ScalingFit")
        .def_readonly("slope", &ScalingFit::slope)
        .def_readonly("slope_stderr", &ScalingFit::slope_stderr)
        .def_readonly("intercept", &ScalingFit::intercept);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("name", &RunResult::name)
        .def_readonly("rows", &RunResult::rows)
        .def_readonly("fit_s", &RunResult::fit_s)
        .def_readonly("fit_d", &RunResult::fit_d)
        .def_readonly("combo_bound", &RunResult::combo_bound);

    m.def("parse_config_file", &parse_config_file, py::arg("path"));
    m.def("parse_config", &parse_config, py::arg("text"),
          py::arg("origin") = "<string>");
    m.def("run_and_emit", &run_and_emit, py::arg("kind"), py::arg("config"));

#ifdef MZPHASE_VERSION_INFO
    m.attr("__version__") = MZPHASE_VERSION_INFO;
#else
    m.attr("__version__") = version;
#endif
}
