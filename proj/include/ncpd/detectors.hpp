#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ncpd/scenario.hpp"

namespace ncpd {

enum class DetectorId { cd, rncp, dncp, amf };

inline constexpr std::array<DetectorId, 4> all_detectors = {
    DetectorId::cd, DetectorId::rncp, DetectorId::dncp, DetectorId::amf};

std::string_view detector_id(DetectorId d);     // "cd", "rncp", "dncp", "amf"
std::string_view detector_label(DetectorId d);  // "CD", "R-NCP-D", ...
std::optional<DetectorId> parse_detector(std::string_view s);

// Data after whitening by a factor W with W Mhat W^H = I. `unwhitener` is
// W^{-1}; for the Hermitian square root used here it equals Mhat^{1/2}.
struct WhitenedData {
    Vector x_cut;
    Matrix x_omega;
    Vector v0;
    Matrix whitener;
    Matrix unwhitener;

    Matrix x_all() const;  // [x_cut  x_omega], CUT first
};

// Mhat = (1/K) R R^H. Throws DegenerateTrainingError when the estimate is
// rank deficient or its condition number exceeds 1e12.
HermitianCovariance sample_covariance(const Matrix& r_secondary);

WhitenedData whiten(const HermitianCovariance& m_hat, const Vector& z_cut,
                    const Matrix& z_omega, const Vector& v);
WhitenedData whiten(const HermitianCovariance& m_hat, const Dataset& data,
                    const Vector& v);

struct DetectorOptions {
    int max_iterations = 10;
    // Unwhitened starting signature for the alternating estimators; empty
    // selects default_init_signature(0, N), i.e. a sidelobe steering vector
    // offset from boresight.
    Vector init_signature;
    // Optional early exit once both iterate deltas fall below the epsilons.
    bool early_exit = false;
    double eps_signature = 1e-6;
    double eps_amplitude = 1e-6;
    bool record_trace = true;
};

struct DetectorOutcome {
    double statistic = 0.0;
    int iterations_run = 0;
    // Per-iteration deltas: ||q_n - q_{n-1}|| and |alpha_n - alpha_{n-1}|
    // for the rank-one detector, ||u_n - u_{n-1}|| and |beta_n - beta_{n-1}|
    // for the deterministic one. Entry k corresponds to iteration k+1.
    std::vector<double> delta_signature;
    std::vector<double> delta_amplitude;
    // Log-likelihood core after each half-step (nondecreasing by
    // construction of the coordinate updates). 2*iterations + 1 entries.
    std::vector<double> objective_trace;
    // Rank-one detector only: jammer power and direction-norm per iterate.
    std::vector<double> p_trace;
    std::vector<double> u0_norm_trace;
};

// Sidelobe steering vector used to start the alternating estimators:
// sin-space offset +6/n from the target, reflected to -6/n and clamped to
// the visible region when out of range.
Vector default_init_signature(double target_azimuth_rad, int n);

// ---- rank-one jammer model (R-NCP-D) ----

// Data-dependent part of the compressed log-likelihood with no target:
// -tr(X X^H) plus the positive-power correction when lambda_1(X X^H) > H.
double rncp_h0_core(const Matrix& x_all);

// Objective maximized by the alternating updates (h = window size); equals
// the compressed log-likelihood up to constants shared by both hypotheses.
double rncp_objective(const Matrix& s_omega, const Vector& x_alpha, double p,
                      const Vector& u0, int h);

Complex rncp_alpha_update(const Vector& x_cut, const Vector& v0, double p,
                          const Vector& u0);

// Leading eigenpair of s_omega + x_alpha x_alpha^H mapped to the jammer
// power/direction pair; p clips at zero.
std::pair<double, Vector> rncp_pu_update(const Matrix& s_omega,
                                         const Vector& x_alpha, int h);

DetectorOutcome rncp_statistic(const WhitenedData& data,
                               const DetectorOptions& opts = {});

// ---- deterministic jammer model (D-NCP-D) ----

// lambda_1(S1) - tr(S1) with S1 the Gram matrix of all whitened columns.
double dncp_h0_core(const Matrix& x_all);

// Residual misfit of the deterministic jammer fit; the alternating updates
// never increase it.
double dncp_misfit(const Vector& u, Complex beta, const Vector& beta_omega,
                   const Vector& x_cut, const Matrix& x_omega,
                   const Vector& v0);

Vector dncp_u_update(const Vector& x_cut, const Matrix& x_omega,
                     const Vector& v0, Complex beta,
                     const Vector& beta_omega);

std::pair<Complex, Vector> dncp_beta_update(const Vector& u,
                                            const Vector& x_cut,
                                            const Matrix& x_omega,
                                            const Vector& v0);

DetectorOutcome dncp_statistic(const WhitenedData& data,
                               const DetectorOptions& opts = {});

// ---- baselines ----

// Adaptive matched filter: |v^H Mhat^{-1} z|^2 / (v^H Mhat^{-1} v).
double amf_statistic(const Vector& z_cut, const Vector& v,
                     const HermitianCovariance& m_hat);

// Both compressed cores of the orthogonally-constrained derivation; their
// difference equals amf_statistic on the whitened data.
std::pair<double, double> amf_constrained_core(const Matrix& x_all,
                                               const Vector& v0);

// Log-likelihood ratio with every parameter known:
// 2 Re{conj(alpha) v^H S^{-1} z} - |alpha|^2 v^H S^{-1} v, S = M + q q^H.
double cd_statistic(const Vector& z_cut, Complex alpha, const Vector& q,
                    const HermitianCovariance& m, const Vector& v);

// Monotone-equivalent core Re{v^H S^{-1} z} used for thresholding: for any
// fixed real alpha > 0 the full statistic is an increasing affine map of
// this value, so both induce the same decision regions.
double cd_core_statistic(const Vector& z_cut, const Vector& q,
                         const HermitianCovariance& m, const Vector& v);

}  // namespace ncpd
