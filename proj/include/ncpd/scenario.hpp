#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ncpd/errors.hpp"

namespace ncpd {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

enum class Hypothesis { h0, h1 };

// All physical and experimental parameters of one simulated scenario.
// Angles are stored in degrees (as configured); conversions happen at use.
struct ScenarioConfig {
    int n_antennas = 8;           // N, uniform linear array, half-wavelength
    int k_secondary = 12;         // K >= N training cells
    int h_left = 10;              // contaminated cells left of the CUT
    int h_right = 10;             // contaminated cells right of the CUT
    double noise_power = 1.0;     // sigma_n^2, linear
    double cnr_db = 20.0;         // clutter-to-noise ratio
    double jnr_db = 30.0;         // jammer-to-noise ratio
    double clutter_rho = 0.9;     // one-lag correlation of the clutter model
    double jammer_azimuth_deg = 35.0;
    bool jammer_azimuth_random = false;  // draw azimuth outside the mainlobe
    double target_azimuth_deg = 0.0;
    bool jammer_present = true;
    double pfa = 1e-2;
    std::vector<double> scnr_grid_db = default_scnr_grid();
    int max_iterations = 10;      // alternating-estimator iteration budget
    std::uint64_t rng_seed = 1234567;

    static std::vector<double> default_scnr_grid();

    bool operator==(const ScenarioConfig&) const = default;

    int h_window() const { return h_left + h_right + 1; }   // H
    double clutter_power() const;                            // p_c
    double jammer_power() const;                             // p_j

    // Throws ValidationError naming the offending field.
    void validate() const;
};

// N x N Hermitian matrix wrapper. Construction enforces Hermitian symmetry
// to 1e-12 per entry; positive definiteness is checked where consumed.
class HermitianCovariance {
public:
    explicit HermitianCovariance(Matrix m);

    const Matrix& matrix() const noexcept { return mat_; }
    Eigen::Index dim() const noexcept { return mat_.rows(); }

private:
    Matrix mat_;
};

struct DatasetTruth {
    Hypothesis hypothesis = Hypothesis::h0;
    Complex alpha{0.0, 0.0};  // target amplitude actually injected
    Vector jammer;            // jammer signature actually injected; empty if off
};

// One trial: CUT return, the contaminated neighbour window, and training data.
struct Dataset {
    Vector z_cut;        // length N
    Matrix z_omega;      // N x (H-1)
    Matrix r_secondary;  // N x K
    DatasetTruth truth;
};

double db_to_linear(double db);

// Unit-norm plane-wave response of an N-element half-wavelength ULA.
Vector steering_vector(double azimuth_rad, int n);

// Clutter-plus-noise covariance: sigma_n^2 I + p_c M_c, M_c(i,j) = rho^|i-j|.
HermitianCovariance clutter_covariance(const ScenarioConfig& cfg);

// Jammer signature with per-antenna power p_j: q = sqrt(N p_j) v(azimuth).
Vector jammer_signature(const ScenarioConfig& cfg, double azimuth_rad);

// |alpha| such that |alpha|^2 v^H M^{-1} v equals the requested SCNR.
double scnr_to_amplitude(double scnr_db, const Vector& v,
                         const HermitianCovariance& m);

// Draw from CN(mean, cov): mean + L w with L L^H = cov and w unit complex
// white noise (real/imag parts each variance 1/2).
Vector sample_cn(const Vector& mean, const HermitianCovariance& cov,
                 std::mt19937_64& rng);

// Scenario precomputes steering vectors, covariances and their factors so
// per-trial synthesis stays cheap. All methods are const; concurrent use
// with independent RNG streams is safe.
class Scenario {
public:
    explicit Scenario(ScenarioConfig cfg);

    const ScenarioConfig& config() const noexcept { return cfg_; }
    const HermitianCovariance& clutter_plus_noise() const noexcept { return m_; }
    const Vector& target_steering() const noexcept { return v_target_; }

    // Half-width of the mainlobe in sin-space (first-null beamwidth / 2).
    double mainlobe_halfwidth_sin() const;

    // Uniform draw of sin(azimuth) on [-1,1] excluding the mainlobe.
    double draw_sidelobe_sin(std::mt19937_64& rng) const;

    Dataset synthesize(Hypothesis hyp, double scnr_db,
                       std::mt19937_64& rng) const;

private:
    ScenarioConfig cfg_;
    HermitianCovariance m_;
    Vector v_target_;
    Matrix secondary_factor_;   // chol(M)
    Vector q_fixed_;            // empty when off or random azimuth
    Matrix primary_factor_;     // chol(M + q q^H) for the fixed-azimuth case
};

}  // namespace ncpd
