// Python bindings for the core operations: scenario synthesis, the
// detector statistics, and the Monte Carlo harness.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncpd/config.hpp"
#include "ncpd/csv_io.hpp"
#include "ncpd/montecarlo.hpp"
#include "ncpd/rng.hpp"
#include "ncpd/version.hpp"

namespace py = pybind11;
using namespace ncpd;

namespace {

DetectorId detector_from_string(const std::string& name) {
    const auto id = parse_detector(name);
    if (!id) {
        throw py::value_error("unknown detector '" + name +
                              "' (use cd, rncp, dncp or amf)");
    }
    return *id;
}

std::vector<DetectorId> detectors_from_strings(
    const std::vector<std::string>& names) {
    std::vector<DetectorId> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(detector_from_string(n));
    return out;
}

Hypothesis hypothesis_from_string(const std::string& name) {
    if (name == "h0" || name == "H0") return Hypothesis::h0;
    if (name == "h1" || name == "H1") return Hypothesis::h1;
    throw py::value_error("hypothesis must be 'h0' or 'h1'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Adaptive radar detection against noise-cover-pulse jamming: "
        "scenario synthesis, GLRT-based detectors and Monte Carlo harness";
    m.attr("__version__") = std::string(version);
    m.attr("detectors") = std::vector<std::string>{"cd", "rncp", "dncp", "amf"};

    py::register_exception<ValidationError>(m, "ValidationError",
                                            PyExc_ValueError);
    py::register_exception<NumericError>(m, "NcpdNumericError",
                                         PyExc_ArithmeticError);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("n_antennas", &ScenarioConfig::n_antennas)
        .def_readwrite("k_secondary", &ScenarioConfig::k_secondary)
        .def_readwrite("h_left", &ScenarioConfig::h_left)
        .def_readwrite("h_right", &ScenarioConfig::h_right)
        .def_readwrite("noise_power", &ScenarioConfig::noise_power)
        .def_readwrite("cnr_db", &ScenarioConfig::cnr_db)
        .def_readwrite("jnr_db", &ScenarioConfig::jnr_db)
        .def_readwrite("clutter_rho", &ScenarioConfig::clutter_rho)
        .def_readwrite("jammer_azimuth_deg", &ScenarioConfig::jammer_azimuth_deg)
        .def_readwrite("jammer_azimuth_random",
                       &ScenarioConfig::jammer_azimuth_random)
        .def_readwrite("target_azimuth_deg", &ScenarioConfig::target_azimuth_deg)
        .def_readwrite("jammer_present", &ScenarioConfig::jammer_present)
        .def_readwrite("pfa", &ScenarioConfig::pfa)
        .def_readwrite("scnr_grid_db", &ScenarioConfig::scnr_grid_db)
        .def_readwrite("max_iterations", &ScenarioConfig::max_iterations)
        .def_readwrite("rng_seed", &ScenarioConfig::rng_seed)
        .def("h_window", &ScenarioConfig::h_window)
        .def("clutter_power", &ScenarioConfig::clutter_power)
        .def("jammer_power", &ScenarioConfig::jammer_power)
        .def("validate", &ScenarioConfig::validate)
        .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) {
            return a == b;
        });

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("z_cut", &Dataset::z_cut)
        .def_readonly("z_omega", &Dataset::z_omega)
        .def_readonly("r_secondary", &Dataset::r_secondary)
        .def_property_readonly("hypothesis",
                               [](const Dataset& d) {
                                   return d.truth.hypothesis == Hypothesis::h1
                                              ? "h1"
                                              : "h0";
                               })
        .def_property_readonly(
            "truth_alpha", [](const Dataset& d) { return d.truth.alpha; })
        .def_property_readonly(
            "truth_jammer", [](const Dataset& d) { return d.truth.jammer; });

    py::class_<WhitenedData>(m, "WhitenedData")
        .def(py::init<>())
        .def_readwrite("x_cut", &WhitenedData::x_cut)
        .def_readwrite("x_omega", &WhitenedData::x_omega)
        .def_readwrite("v0", &WhitenedData::v0)
        .def_readwrite("whitener", &WhitenedData::whitener)
        .def_readwrite("unwhitener", &WhitenedData::unwhitener)
        .def("x_all", &WhitenedData::x_all);

    py::class_<DetectorOptions>(m, "DetectorOptions")
        .def(py::init<>())
        .def_readwrite("max_iterations", &DetectorOptions::max_iterations)
        .def_readwrite("init_signature", &DetectorOptions::init_signature)
        .def_readwrite("early_exit", &DetectorOptions::early_exit)
        .def_readwrite("eps_signature", &DetectorOptions::eps_signature)
        .def_readwrite("eps_amplitude", &DetectorOptions::eps_amplitude)
        .def_readwrite("record_trace", &DetectorOptions::record_trace);

    py::class_<DetectorOutcome>(m, "DetectorOutcome")
        .def_readonly("statistic", &DetectorOutcome::statistic)
        .def_readonly("iterations_run", &DetectorOutcome::iterations_run)
        .def_readonly("delta_signature", &DetectorOutcome::delta_signature)
        .def_readonly("delta_amplitude", &DetectorOutcome::delta_amplitude)
        .def_readonly("objective_trace", &DetectorOutcome::objective_trace)
        .def_readonly("p_trace", &DetectorOutcome::p_trace)
        .def_readonly("u0_norm_trace", &DetectorOutcome::u0_norm_trace);

    py::class_<ThresholdTable>(m, "ThresholdTable")
        .def_property_readonly("detector",
                               [](const ThresholdTable& t) {
                                   return std::string(detector_id(t.detector));
                               })
        .def_readonly("threshold", &ThresholdTable::threshold)
        .def_readonly("n_trials", &ThresholdTable::n_trials)
        .def_readonly("target_pfa", &ThresholdTable::target_pfa)
        .def_readonly("empirical_pfa", &ThresholdTable::empirical_pfa)
        .def_readonly("null_statistics", &ThresholdTable::null_statistics);

    py::class_<PdCurve>(m, "PdCurve")
        .def_property_readonly("detector",
                               [](const PdCurve& c) {
                                   return std::string(detector_id(c.detector));
                               })
        .def_readonly("scnr_db", &PdCurve::scnr_db)
        .def_readonly("pd", &PdCurve::pd)
        .def_readonly("std_err", &PdCurve::std_err)
        .def_readonly("n_trials", &PdCurve::n_trials);

    py::class_<ConvergenceProfile>(m, "ConvergenceProfile")
        .def_property_readonly("detector",
                               [](const ConvergenceProfile& p) {
                                   return std::string(detector_id(p.detector));
                               })
        .def_readonly("mean_delta_signature",
                      &ConvergenceProfile::mean_delta_signature)
        .def_readonly("mean_delta_amplitude",
                      &ConvergenceProfile::mean_delta_amplitude)
        .def_readonly("n_trials", &ConvergenceProfile::n_trials);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("thresholds", &ExperimentResult::thresholds)
        .def_readonly("curves", &ExperimentResult::curves);

    // scenario operations
    m.def("steering_vector", &steering_vector, py::arg("azimuth_rad"),
          py::arg("n"), "Unit-norm half-wavelength ULA response");
    m.def(
        "clutter_covariance",
        [](const ScenarioConfig& cfg) {
            return clutter_covariance(cfg).matrix();
        },
        py::arg("config"));
    m.def("jammer_signature", &jammer_signature, py::arg("config"),
          py::arg("azimuth_rad"));
    m.def(
        "scnr_to_amplitude",
        [](double scnr_db, const Vector& v, const Matrix& m) {
            return scnr_to_amplitude(scnr_db, v, HermitianCovariance{m});
        },
        py::arg("scnr_db"), py::arg("v"), py::arg("m"));
    m.def(
        "sample_cn",
        [](const Vector& mean, const Matrix& cov, std::uint64_t seed) {
            auto rng = make_stream(seed, 0, 0);
            return sample_cn(mean, HermitianCovariance{cov}, rng);
        },
        py::arg("mean"), py::arg("cov"), py::arg("seed"));
    m.def(
        "synthesize_dataset",
        [](const ScenarioConfig& cfg, const std::string& hypothesis,
           double scnr_db, std::uint64_t seed) {
            const Scenario scenario(cfg);
            auto rng = make_stream(seed, 0, 0);
            return scenario.synthesize(hypothesis_from_string(hypothesis),
                                       scnr_db, rng);
        },
        py::arg("config"), py::arg("hypothesis"), py::arg("scnr_db"),
        py::arg("seed"),
        "One trial's primary + secondary data from a seeded stream");

    // detector operations
    m.def(
        "sample_covariance",
        [](const Matrix& r) { return sample_covariance(r).matrix(); },
        py::arg("r_secondary"));
    m.def(
        "whiten",
        [](const Matrix& m_hat, const Vector& z_cut, const Matrix& z_omega,
           const Vector& v) {
            return whiten(HermitianCovariance{m_hat}, z_cut, z_omega, v);
        },
        py::arg("m_hat"), py::arg("z_cut"), py::arg("z_omega"), py::arg("v"));
    m.def("default_init_signature", &default_init_signature,
          py::arg("target_azimuth_rad"), py::arg("n"));
    m.def("rncp_h0_core", &rncp_h0_core, py::arg("x_all"));
    m.def("dncp_h0_core", &dncp_h0_core, py::arg("x_all"));
    m.def("rncp_statistic", &rncp_statistic, py::arg("whitened"),
          py::arg("options") = DetectorOptions{});
    m.def("dncp_statistic", &dncp_statistic, py::arg("whitened"),
          py::arg("options") = DetectorOptions{});
    m.def(
        "amf_statistic",
        [](const Vector& z_cut, const Vector& v, const Matrix& m_hat) {
            return amf_statistic(z_cut, v, HermitianCovariance{m_hat});
        },
        py::arg("z_cut"), py::arg("v"), py::arg("m_hat"));
    m.def("amf_constrained_core", &amf_constrained_core, py::arg("x_all"),
          py::arg("v0"));
    m.def(
        "cd_statistic",
        [](const Vector& z_cut, Complex alpha, const Vector& q,
           const Matrix& m, const Vector& v) {
            return cd_statistic(z_cut, alpha, q, HermitianCovariance{m}, v);
        },
        py::arg("z_cut"), py::arg("alpha"), py::arg("q"), py::arg("m"),
        py::arg("v"), "Pass an empty q for the jammer-free model");
    m.def(
        "cd_core_statistic",
        [](const Vector& z_cut, const Vector& q, const Matrix& m,
           const Vector& v) {
            return cd_core_statistic(z_cut, q, HermitianCovariance{m}, v);
        },
        py::arg("z_cut"), py::arg("q"), py::arg("m"), py::arg("v"));

    // Monte Carlo harness
    m.def(
        "calibrate_threshold",
        [](const std::string& detector, const ScenarioConfig& cfg,
           int n_trials, std::uint64_t seed, int workers) {
            return calibrate_threshold(detector_from_string(detector), cfg,
                                       n_trials, seed, workers);
        },
        py::arg("detector"), py::arg("config"), py::arg("n_trials"),
        py::arg("seed"), py::arg("workers") = 1);
    m.def(
        "estimate_pd",
        [](const std::string& detector, const ScenarioConfig& cfg,
           double threshold, double scnr_db, int n_trials, std::uint64_t seed,
           int workers) {
            return estimate_pd(detector_from_string(detector), cfg, threshold,
                               scnr_db, n_trials, seed, workers);
        },
        py::arg("detector"), py::arg("config"), py::arg("threshold"),
        py::arg("scnr_db"), py::arg("n_trials"), py::arg("seed"),
        py::arg("workers") = 1);
    m.def(
        "convergence_profile",
        [](const std::string& detector, const ScenarioConfig& cfg,
           double scnr_db, int n_trials, std::uint64_t seed, int workers) {
            return convergence_profile(detector_from_string(detector), cfg,
                                       scnr_db, n_trials, seed, workers);
        },
        py::arg("detector"), py::arg("config"), py::arg("scnr_db"),
        py::arg("n_trials"), py::arg("seed"), py::arg("workers") = 1);
    m.def(
        "run_experiment",
        [](const ScenarioConfig& cfg, const std::vector<std::string>& detectors,
           std::uint64_t seed, int workers, int n_calibration, int n_pd) {
            return run_experiment(cfg, detectors_from_strings(detectors), seed,
                                  workers, n_calibration, n_pd);
        },
        py::arg("config"), py::arg("detectors"), py::arg("seed"),
        py::arg("workers") = 1, py::arg("n_calibration") = 0,
        py::arg("n_pd") = 0);

    // config round trip
    m.def("parse_config_text", &parse_config_text, py::arg("text"),
          py::arg("origin") = "<string>");
    m.def("serialize_config", &serialize_config, py::arg("config"));
    m.def("config_digest", &config_digest, py::arg("config"));
    m.def("format_curves_csv", &format_curves_csv, py::arg("curves"));
}
