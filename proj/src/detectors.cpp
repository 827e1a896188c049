#include "ncpd/detectors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace ncpd {

namespace {

// Rotate the first significant component to the real positive axis. The
// statistics are phase invariant; this only stabilizes iterate traces.
void fix_phase(Vector& u) {
    const double scale = u.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        if (std::abs(u(k)) > 1e-12 * scale) {
            u *= std::conj(u(k)) / std::abs(u(k));
            return;
        }
    }
}

std::pair<double, Vector> leading_eigenpair(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
    if (es.info() != Eigen::Success) {
        throw NumericError("leading_eigenpair: eigendecomposition failed");
    }
    const Eigen::Index last = hermitian.rows() - 1;
    Vector u = es.eigenvectors().col(last);
    fix_phase(u);
    return {es.eigenvalues()(last), std::move(u)};
}

double max_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian,
                                             Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("max_eigenvalue: eigendecomposition failed");
    }
    return es.eigenvalues()(hermitian.rows() - 1);
}

// Component of x orthogonal to span(v), with v already unit norm.
Vector project_out(const Vector& x, const Vector& v_unit) {
    return x - v_unit * v_unit.dot(x);
}

Vector resolve_init_signature(const DetectorOptions& opts, Eigen::Index n) {
    if (opts.max_iterations < 1) {
        throw std::invalid_argument("max_iterations must be >= 1");
    }
    if (opts.init_signature.size() == 0) {
        return default_init_signature(0.0, static_cast<int>(n));
    }
    if (opts.init_signature.size() != n) {
        throw std::invalid_argument(
            "init_signature length does not match the array size");
    }
    return opts.init_signature;
}

}  // namespace

std::string_view detector_id(DetectorId d) {
    switch (d) {
        case DetectorId::cd: return "cd";
        case DetectorId::rncp: return "rncp";
        case DetectorId::dncp: return "dncp";
        case DetectorId::amf: return "amf";
    }
    return "unknown";
}

std::string_view detector_label(DetectorId d) {
    switch (d) {
        case DetectorId::cd: return "CD";
        case DetectorId::rncp: return "R-NCP-D";
        case DetectorId::dncp: return "D-NCP-D";
        case DetectorId::amf: return "AMF";
    }
    return "unknown";
}

std::optional<DetectorId> parse_detector(std::string_view s) {
    for (DetectorId d : all_detectors) {
        if (s == detector_id(d) || s == detector_label(d)) return d;
    }
    return std::nullopt;
}

Matrix WhitenedData::x_all() const {
    Matrix all(x_cut.size(), x_omega.cols() + 1);
    all.col(0) = x_cut;
    all.rightCols(x_omega.cols()) = x_omega;
    return all;
}

HermitianCovariance sample_covariance(const Matrix& r_secondary) {
    const Eigen::Index n = r_secondary.rows();
    const Eigen::Index k = r_secondary.cols();
    if (k < 1) {
        throw std::invalid_argument("sample_covariance: no training columns");
    }
    Matrix m = (r_secondary * r_secondary.adjoint()) / static_cast<double>(k);
    m = ((m + m.adjoint()) * 0.5).eval();  // kill rounding asymmetry

    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("sample_covariance: eigendecomposition failed");
    }
    const double lambda_min = es.eigenvalues()(0);
    const double lambda_max = es.eigenvalues()(n - 1);
    if (!(lambda_min > 0.0) || lambda_max > 1e12 * lambda_min) {
        throw DegenerateTrainingError(
            "sample_covariance: estimate is singular or too ill conditioned "
            "(need K >= N independent training vectors)");
    }
    return HermitianCovariance(std::move(m));
}

WhitenedData whiten(const HermitianCovariance& m_hat, const Vector& z_cut,
                    const Matrix& z_omega, const Vector& v) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_hat.matrix());
    if (es.info() != Eigen::Success) {
        throw NumericError("whiten: eigendecomposition failed");
    }
    if (!(es.eigenvalues()(0) > 0.0)) {
        throw NumericError("whiten: covariance not positive definite");
    }
    const Matrix& basis = es.eigenvectors();
    const Eigen::VectorXd lambda = es.eigenvalues();

    WhitenedData out;
    out.whitener =
        basis * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * basis.adjoint();
    out.unwhitener = basis * lambda.cwiseSqrt().asDiagonal() * basis.adjoint();
    out.x_cut = out.whitener * z_cut;
    out.x_omega = out.whitener * z_omega;
    out.v0 = out.whitener * v;
    return out;
}

WhitenedData whiten(const HermitianCovariance& m_hat, const Dataset& data,
                    const Vector& v) {
    return whiten(m_hat, data.z_cut, data.z_omega, v);
}

Vector default_init_signature(double target_azimuth_rad, int n) {
    const double st = std::sin(target_azimuth_rad);
    const double offset = 6.0 / static_cast<double>(n);
    double s = st + offset;
    if (std::abs(s) > 1.0) s = st - offset;
    if (std::abs(s) > 1.0) s = st > 0.0 ? -1.0 : 1.0;
    return steering_vector(std::asin(s), n);
}

double rncp_h0_core(const Matrix& x_all) {
    const double h = static_cast<double>(x_all.cols());
    const Matrix gram = x_all * x_all.adjoint();
    const double lambda1 = max_eigenvalue(gram);
    const double trace = x_all.squaredNorm();
    double core = -trace;
    if (lambda1 > h) {
        core += h * std::log(h / lambda1) + lambda1 - h;
    }
    return core;
}

double rncp_objective(const Matrix& s_omega, const Vector& x_alpha, double p,
                      const Vector& u0, int h) {
    const double c = p / (1.0 + p);
    const double jam_energy =
        std::real(u0.dot(s_omega * u0)) + std::norm(x_alpha.dot(u0));
    return -h * std::log1p(p) + c * jam_energy - x_alpha.squaredNorm() -
           std::real(s_omega.trace());
}

Complex rncp_alpha_update(const Vector& x_cut, const Vector& v0, double p,
                          const Vector& u0) {
    const double c = p / (1.0 + p);
    const Vector bx = x_cut - c * u0 * u0.dot(x_cut);
    const Vector bv = v0 - c * u0 * u0.dot(v0);
    const Complex num = v0.dot(bx);
    const double den = std::real(v0.dot(bv));
    if (!(den > 1e-14 * v0.squaredNorm())) {
        throw DegenerateGeometryError(
            "rncp_alpha_update: steering vector annihilated by the jammer "
            "projector");
    }
    return num / den;
}

std::pair<double, Vector> rncp_pu_update(const Matrix& s_omega,
                                         const Vector& x_alpha, int h) {
    const Matrix a = s_omega + x_alpha * x_alpha.adjoint();
    auto [lambda1, u0] = leading_eigenpair(a);
    const double p = std::max(lambda1 / static_cast<double>(h) - 1.0, 0.0);
    return {p, std::move(u0)};
}

DetectorOutcome rncp_statistic(const WhitenedData& data,
                               const DetectorOptions& opts) {
    const Eigen::Index n = data.x_cut.size();
    const int h = static_cast<int>(data.x_omega.cols()) + 1;
    const Matrix s_omega = data.x_omega * data.x_omega.adjoint();

    const Vector q_init = resolve_init_signature(opts, n);
    Vector u = data.whitener * q_init;
    double p = u.squaredNorm();
    Vector u0 = u / std::sqrt(p);
    fix_phase(u0);

    // Amplitude estimate for the initial signature, then alternate
    // signature and amplitude solves; every half-step is an exact
    // coordinate maximization, so the objective never decreases.
    Complex alpha = rncp_alpha_update(data.x_cut, data.v0, p, u0);
    Vector x_alpha = data.x_cut - alpha * data.v0;
    // Iterate trace follows the physical signature sqrt(p) Mhat^{1/2} u0.
    Vector q_prev = std::sqrt(p) * (data.unwhitener * u0);
    double objective = rncp_objective(s_omega, x_alpha, p, u0, h);

    DetectorOutcome out;
    if (opts.record_trace) {
        out.objective_trace.push_back(objective);
        out.p_trace.push_back(p);
        out.u0_norm_trace.push_back(u0.norm());
    }

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        std::tie(p, u0) = rncp_pu_update(s_omega, x_alpha, h);
        if (opts.record_trace) {
            out.objective_trace.push_back(
                rncp_objective(s_omega, x_alpha, p, u0, h));
        }

        const Complex alpha_new = rncp_alpha_update(data.x_cut, data.v0, p, u0);
        x_alpha = data.x_cut - alpha_new * data.v0;
        objective = rncp_objective(s_omega, x_alpha, p, u0, h);

        const Vector q = std::sqrt(p) * (data.unwhitener * u0);
        const double dq = (q - q_prev).norm();
        const double da = std::abs(alpha_new - alpha);
        if (opts.record_trace) {
            out.objective_trace.push_back(objective);
            out.p_trace.push_back(p);
            out.u0_norm_trace.push_back(u0.norm());
            out.delta_signature.push_back(dq);
            out.delta_amplitude.push_back(da);
        }

        alpha = alpha_new;
        q_prev = q;
        out.iterations_run = iter;
        if (opts.early_exit && dq < opts.eps_signature &&
            da < opts.eps_amplitude) {
            break;
        }
    }

    out.statistic = objective - rncp_h0_core(data.x_all());
    return out;
}

double dncp_h0_core(const Matrix& x_all) {
    const Matrix gram = x_all * x_all.adjoint();
    return max_eigenvalue(gram) - x_all.squaredNorm();
}

double dncp_misfit(const Vector& u, Complex beta, const Vector& beta_omega,
                   const Vector& x_cut, const Matrix& x_omega,
                   const Vector& v0) {
    const Vector v_unit = v0.normalized();
    double misfit = project_out(x_cut - beta * u, v_unit).squaredNorm();
    for (Eigen::Index i = 0; i < x_omega.cols(); ++i) {
        misfit += (x_omega.col(i) - beta_omega(i) * u).squaredNorm();
    }
    return misfit;
}

Vector dncp_u_update(const Vector& x_cut, const Matrix& x_omega,
                     const Vector& v0, Complex beta,
                     const Vector& beta_omega) {
    const Eigen::Index n = x_cut.size();
    const Vector v_unit = v0.normalized();
    const double omega_weight = beta_omega.squaredNorm();
    const double cut_weight = std::norm(beta);

    if (omega_weight > 0.0) {
        Matrix system = omega_weight * Matrix::Identity(n, n);
        if (cut_weight > 0.0) {
            system += cut_weight *
                      (Matrix::Identity(n, n) - v_unit * v_unit.adjoint());
        }
        Vector rhs = x_omega * beta_omega.conjugate();
        if (cut_weight > 0.0) {
            rhs += std::conj(beta) * project_out(x_cut, v_unit);
        }
        Eigen::LDLT<Matrix> ldlt(system);
        if (ldlt.info() != Eigen::Success) {
            throw NumericError("dncp_u_update: normal equations solve failed");
        }
        return ldlt.solve(rhs);
    }

    if (cut_weight > 0.0) {
        // System acts only on the complement of v0: solvable there iff the
        // projected CUT is nonzero; minimum-norm solution otherwise absent.
        const Vector projected = project_out(x_cut, v_unit);
        if (projected.norm() <= 1e-12 * x_cut.norm() || x_cut.norm() == 0.0) {
            throw DegenerateGeometryError(
                "dncp_u_update: CUT lies in the steering span, system "
                "singular");
        }
        return projected / beta;
    }

    throw SingularUpdateError("dncp_u_update: all jammer amplitudes are zero");
}

std::pair<Complex, Vector> dncp_beta_update(const Vector& u,
                                            const Vector& x_cut,
                                            const Matrix& x_omega,
                                            const Vector& v0) {
    const double uu = u.squaredNorm();
    if (!(uu > 0.0)) {
        throw DegenerateGeometryError("dncp_beta_update: zero signature");
    }
    const Vector v_unit = v0.normalized();
    const Vector pu = project_out(u, v_unit);
    const double den = pu.squaredNorm();
    if (den <= 1e-12 * uu) {
        throw DegenerateGeometryError(
            "dncp_beta_update: signature parallel to the steering vector");
    }
    const Complex beta = pu.dot(x_cut) / den;
    Vector beta_omega = (x_omega.adjoint() * u).conjugate() / uu;
    return {beta, std::move(beta_omega)};
}

DetectorOutcome dncp_statistic(const WhitenedData& data,
                               const DetectorOptions& opts) {
    const Eigen::Index n = data.x_cut.size();
    const Eigen::Index n_omega = data.x_omega.cols();

    const Vector q_init = resolve_init_signature(opts, n);
    Vector u = data.whitener * q_init;
    Complex beta(0.0, 0.0);
    Vector beta_omega = Vector::Zero(n_omega);

    DetectorOutcome out;
    double misfit =
        dncp_misfit(u, beta, beta_omega, data.x_cut, data.x_omega, data.v0);
    if (opts.record_trace) out.objective_trace.push_back(-misfit);

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        Complex beta_new;
        Vector beta_omega_new;
        try {
            std::tie(beta_new, beta_omega_new) =
                dncp_beta_update(u, data.x_cut, data.x_omega, data.v0);
        } catch (const NumericError&) {
            break;  // keep the last valid state
        }
        misfit = dncp_misfit(u, beta_new, beta_omega_new, data.x_cut,
                             data.x_omega, data.v0);
        if (opts.record_trace) out.objective_trace.push_back(-misfit);

        const double da = std::abs(beta_new - beta);
        beta = beta_new;
        beta_omega = beta_omega_new;

        Vector u_new;
        try {
            u_new = dncp_u_update(data.x_cut, data.x_omega, data.v0, beta,
                                  beta_omega);
        } catch (const NumericError&) {
            out.iterations_run = iter;
            break;  // treat as converged; u unchanged
        }
        const double du = (u_new - u).norm();
        u = std::move(u_new);
        misfit =
            dncp_misfit(u, beta, beta_omega, data.x_cut, data.x_omega, data.v0);
        if (opts.record_trace) {
            out.objective_trace.push_back(-misfit);
            out.delta_signature.push_back(du);
            out.delta_amplitude.push_back(da);
        }
        out.iterations_run = iter;
        if (opts.early_exit && du < opts.eps_signature &&
            da < opts.eps_amplitude) {
            break;
        }
    }

    out.statistic = -misfit - dncp_h0_core(data.x_all());
    return out;
}

double amf_statistic(const Vector& z_cut, const Vector& v,
                     const HermitianCovariance& m_hat) {
    Eigen::LDLT<Matrix> ldlt(m_hat.matrix());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericError("amf_statistic: covariance not positive definite");
    }
    const Complex num = v.dot(ldlt.solve(z_cut));
    const double den = std::real(v.dot(ldlt.solve(v)));
    if (!(den > 0.0)) {
        throw NumericError("amf_statistic: v^H M^{-1} v must be positive");
    }
    return std::norm(num) / den;
}

std::pair<double, double> amf_constrained_core(const Matrix& x_all,
                                               const Vector& v0) {
    const Eigen::Index n = x_all.rows();
    if (n < 2) {
        throw std::invalid_argument(
            "amf_constrained_core: need at least two antennas");
    }
    if (!(v0.norm() > 0.0)) {
        throw std::invalid_argument("amf_constrained_core: v0 must be nonzero");
    }

    // Unitary completion of v0: remaining columns span its complement.
    Eigen::HouseholderQR<Matrix> qr(v0);
    const Matrix q_full = qr.householderQ();
    const Matrix basis = q_full.rightCols(n - 1);

    const Matrix s1 = x_all * x_all.adjoint();
    const double lambda1 = max_eigenvalue(basis.adjoint() * s1 * basis);
    const double trace = x_all.squaredNorm();

    const Vector v_unit = v0.normalized();
    const double cut_perp = project_out(x_all.col(0), v_unit).squaredNorm();
    const double omega_energy = trace - x_all.col(0).squaredNorm();

    const double h0_core = lambda1 - trace;
    const double h1_core = lambda1 - (cut_perp + omega_energy);
    return {h0_core, h1_core};
}

namespace {

Eigen::LDLT<Matrix> known_interference_factor(const Vector& q,
                                              const HermitianCovariance& m) {
    Matrix sigma = m.matrix();
    if (q.size() != 0) sigma += q * q.adjoint();
    Eigen::LDLT<Matrix> ldlt(sigma);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericError("cd_statistic: covariance not positive definite");
    }
    return ldlt;
}

}  // namespace

double cd_statistic(const Vector& z_cut, Complex alpha, const Vector& q,
                    const HermitianCovariance& m, const Vector& v) {
    const auto ldlt = known_interference_factor(q, m);
    const Complex cross = v.dot(ldlt.solve(z_cut));
    const double quad = std::real(v.dot(ldlt.solve(v)));
    return 2.0 * std::real(std::conj(alpha) * cross) - std::norm(alpha) * quad;
}

double cd_core_statistic(const Vector& z_cut, const Vector& q,
                         const HermitianCovariance& m, const Vector& v) {
    const auto ldlt = known_interference_factor(q, m);
    return std::real(v.dot(ldlt.solve(z_cut)));
}

}  // namespace ncpd
