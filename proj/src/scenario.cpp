#include "ncpd/scenario.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Cholesky>

namespace ncpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Lower Cholesky factor, throwing NumericError when not positive definite.
Matrix cholesky_factor(const Matrix& m, const char* what) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericError(std::string(what) +
                           ": matrix is not positive definite");
    }
    return llt.matrixL();
}

HermitianCovariance validated_covariance(const ScenarioConfig& cfg) {
    cfg.validate();
    return clutter_covariance(cfg);
}

// mean + L w with w unit complex white noise.
Vector draw_colored(const Vector& mean, const Matrix& chol_factor,
                    std::mt19937_64& rng) {
    const Eigen::Index n = chol_factor.rows();
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector w(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        w(k) = Complex(re, im) * std::sqrt(0.5);
    }
    if (mean.size() == 0) {
        return chol_factor * w;
    }
    return mean + chol_factor * w;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> ScenarioConfig::default_scnr_grid() {
    std::vector<double> grid;
    for (double s = 0.0; s <= 32.0 + 1e-9; s += 2.0) grid.push_back(s);
    return grid;
}

double ScenarioConfig::clutter_power() const {
    return noise_power * db_to_linear(cnr_db);
}

double ScenarioConfig::jammer_power() const {
    return noise_power * db_to_linear(jnr_db);
}

void ScenarioConfig::validate() const {
    if (n_antennas < 1)
        throw ValidationError("n_antennas", "n_antennas must be >= 1");
    if (k_secondary < n_antennas)
        throw ValidationError("k_secondary",
                              "k_secondary must satisfy k_secondary >= n_antennas");
    if (h_left < 0)
        throw ValidationError("h_left", "h_left must be >= 0");
    if (h_right < 0)
        throw ValidationError("h_right", "h_right must be >= 0");
    if (h_window() < 2)
        throw ValidationError("h_left",
                              "window h_left + h_right + 1 must be >= 2");
    if (!(noise_power > 0.0))
        throw ValidationError("noise_power", "noise_power must be > 0");
    if (!(clutter_rho >= 0.0 && clutter_rho < 1.0))
        throw ValidationError("clutter_rho", "clutter_rho must lie in [0, 1)");
    if (!(pfa > 0.0 && pfa < 1.0))
        throw ValidationError("pfa", "pfa must lie in (0, 1)");
    if (scnr_grid_db.empty())
        throw ValidationError("scnr_grid_db", "scnr_grid_db must be nonempty");
    if (max_iterations < 1)
        throw ValidationError("max_iterations", "max_iterations must be >= 1");
}

HermitianCovariance::HermitianCovariance(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) {
        throw ValidationError("matrix", "covariance must be square");
    }
    const double asym = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-12)) {
        throw ValidationError("matrix",
                              "covariance is not Hermitian within 1e-12");
    }
}

Vector steering_vector(double azimuth_rad, int n) {
    if (n < 1) {
        throw std::invalid_argument("steering_vector: n must be >= 1");
    }
    const double s = std::sin(azimuth_rad);
    Vector v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        v(k) = std::polar(scale, kPi * k * s);
    }
    return v;
}

HermitianCovariance clutter_covariance(const ScenarioConfig& cfg) {
    if (!(cfg.clutter_rho >= 0.0 && cfg.clutter_rho < 1.0)) {
        throw std::invalid_argument(
            "clutter_covariance: clutter_rho must lie in [0, 1)");
    }
    const int n = cfg.n_antennas;
    const double pc = cfg.clutter_power();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double mc = std::pow(cfg.clutter_rho, std::abs(i - j));
            m(i, j) = Complex(pc * mc, 0.0);
        }
        m(i, i) += cfg.noise_power;
    }
    return HermitianCovariance(std::move(m));
}

Vector jammer_signature(const ScenarioConfig& cfg, double azimuth_rad) {
    const double amplitude =
        std::sqrt(static_cast<double>(cfg.n_antennas) * cfg.jammer_power());
    return amplitude * steering_vector(azimuth_rad, cfg.n_antennas);
}

double scnr_to_amplitude(double scnr_db, const Vector& v,
                         const HermitianCovariance& m) {
    const double scnr = db_to_linear(scnr_db);
    if (scnr == 0.0) return 0.0;
    Eigen::LDLT<Matrix> ldlt(m.matrix());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericError("scnr_to_amplitude: covariance not positive definite");
    }
    const double quad = std::real(v.dot(ldlt.solve(v)));
    if (!(quad > 0.0)) {
        throw NumericError("scnr_to_amplitude: v^H M^{-1} v must be positive");
    }
    return std::sqrt(scnr / quad);
}

Vector sample_cn(const Vector& mean, const HermitianCovariance& cov,
                 std::mt19937_64& rng) {
    const Matrix factor = cholesky_factor(cov.matrix(), "sample_cn");
    return draw_colored(mean, factor, rng);
}

Scenario::Scenario(ScenarioConfig cfg)
    : cfg_(std::move(cfg)), m_(validated_covariance(cfg_)) {
    v_target_ = steering_vector(deg_to_rad(cfg_.target_azimuth_deg),
                                cfg_.n_antennas);
    secondary_factor_ = cholesky_factor(m_.matrix(), "Scenario");
    if (cfg_.jammer_present && !cfg_.jammer_azimuth_random) {
        q_fixed_ = jammer_signature(cfg_, deg_to_rad(cfg_.jammer_azimuth_deg));
        const Matrix sigma =
            m_.matrix() + q_fixed_ * q_fixed_.adjoint();
        primary_factor_ = cholesky_factor(sigma, "Scenario");
    }
}

double Scenario::mainlobe_halfwidth_sin() const {
    return 2.0 / static_cast<double>(cfg_.n_antennas);
}

double Scenario::draw_sidelobe_sin(std::mt19937_64& rng) const {
    const double st = std::sin(deg_to_rad(cfg_.target_azimuth_deg));
    const double lo = std::max(-1.0, st - mainlobe_halfwidth_sin());
    const double hi = std::min(1.0, st + mainlobe_halfwidth_sin());
    const double left = lo - (-1.0);
    const double right = 1.0 - hi;
    const double total = left + right;
    if (!(total > 0.0)) {
        throw DegenerateGeometryError(
            "draw_sidelobe_sin: mainlobe covers the whole visible region");
    }
    std::uniform_real_distribution<double> uniform(0.0, total);
    const double x = uniform(rng);
    return x < left ? -1.0 + x : hi + (x - left);
}

Dataset Scenario::synthesize(Hypothesis hyp, double scnr_db,
                             std::mt19937_64& rng) const {
    const int n = cfg_.n_antennas;
    const int h = cfg_.h_window();
    const int k = cfg_.k_secondary;

    Dataset d;
    d.truth.hypothesis = hyp;

    const Matrix* primary_factor = &secondary_factor_;
    Matrix random_factor;
    if (cfg_.jammer_present) {
        if (cfg_.jammer_azimuth_random) {
            const double s = draw_sidelobe_sin(rng);
            d.truth.jammer = jammer_signature(cfg_, std::asin(s));
            random_factor = cholesky_factor(
                m_.matrix() + d.truth.jammer * d.truth.jammer.adjoint(),
                "Scenario::synthesize");
            primary_factor = &random_factor;
        } else {
            d.truth.jammer = q_fixed_;
            primary_factor = &primary_factor_;
        }
    }

    Vector cut_mean;
    if (hyp == Hypothesis::h1) {
        const double amplitude = scnr_to_amplitude(scnr_db, v_target_, m_);
        d.truth.alpha = Complex(amplitude, 0.0);
        cut_mean = d.truth.alpha * v_target_;
    }

    d.z_cut = draw_colored(cut_mean, *primary_factor, rng);
    d.z_omega.resize(n, h - 1);
    for (int i = 0; i < h - 1; ++i) {
        d.z_omega.col(i) = draw_colored(Vector(), *primary_factor, rng);
    }
    d.r_secondary.resize(n, k);
    for (int i = 0; i < k; ++i) {
        d.r_secondary.col(i) = draw_colored(Vector(), secondary_factor_, rng);
    }
    return d;
}

}  // namespace ncpd
