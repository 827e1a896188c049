#include "oracles.hpp"

#include <cmath>

namespace ncpd::testing {

namespace {

// Jitter refinement: Gaussian proposals with decaying step size, keeping
// improvements only. objective is maximized.
template <typename Objective>
void refine(Vector& u, double& best, double sigma, int steps,
            const Objective& objective, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < steps; ++i) {
        Vector candidate = u;
        for (Eigen::Index k = 0; k < candidate.size(); ++k) {
            candidate(k) += Complex(normal(rng), normal(rng)) * sigma;
        }
        const double value = objective(candidate);
        if (value > best) {
            best = value;
            u = candidate;
        }
        sigma *= 0.997;
    }
}

}  // namespace

Vector random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (int k = 0; k < n; ++k) {
        v(k) = Complex(normal(rng), normal(rng)) * std::sqrt(0.5);
    }
    return v;
}

Vector random_unit_vector(int n, std::mt19937_64& rng) {
    Vector v = random_vector(n, rng);
    while (v.norm() < 1e-6) v = random_vector(n, rng);
    return v.normalized();
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    Matrix m(rows, cols);
    for (int c = 0; c < cols; ++c) m.col(c) = random_vector(rows, rng);
    return m;
}

Matrix random_spd(int n, std::mt19937_64& rng, double spread) {
    const Matrix a = random_matrix(n, 2 * n, rng);
    std::uniform_real_distribution<double> uniform(0.1, spread);
    Matrix m = a * a.adjoint() / (2.0 * n);
    m += uniform(rng) * Matrix::Identity(n, n);
    return ((m + m.adjoint()) * 0.5).eval();
}

double rank_one_loglik_dense(const Matrix& s, const Vector& x, const Vector& u,
                             int h) {
    const Matrix gram = s + x * x.adjoint();
    return rank_one_loglik_dense(gram, u, h);
}

double rank_one_loglik_dense(const Matrix& s, const Vector& u, int h) {
    const Eigen::Index n = s.rows();
    const Matrix b = Matrix::Identity(n, n) + u * u.adjoint();
    const double det = std::real(b.determinant());
    const Matrix inv = b.inverse();
    return -h * std::log(det) - std::real((inv * s).trace());
}

Complex least_squares_amplitude(const Vector& x, const Vector& v,
                                const Matrix& q_form) {
    // (x - a v)^H Q (x - a v) is quadratic in (re a, im a); solve the 2x2
    // normal equations directly.
    const Complex c = v.dot(q_form * x);
    const double d = std::real(v.dot(q_form * v));
    Eigen::Matrix2d normal;
    normal << d, 0.0, 0.0, d;
    Eigen::Vector2d rhs(c.real(), c.imag());
    const Eigen::Vector2d sol = normal.ldlt().solve(rhs);
    return Complex(sol(0), sol(1));
}

double rncp_h0_bruteforce(const Matrix& x_all, int n_samples,
                          std::mt19937_64& rng) {
    const int n = static_cast<int>(x_all.rows());
    const int h = static_cast<int>(x_all.cols());
    const Matrix gram = x_all * x_all.adjoint();

    const auto objective = [&](const Vector& u) {
        return rank_one_loglik_dense(gram, u, h);
    };

    // p = 0 (no jammer) is always feasible.
    double best = objective(Vector::Zero(n));
    Vector best_u = Vector::Zero(n);
    for (int i = 0; i < n_samples; ++i) {
        const Vector dir = random_unit_vector(n, rng);
        std::uniform_real_distribution<double> log_p(-4.0, 5.0);
        const double p = std::pow(10.0, log_p(rng));
        const Vector u = std::sqrt(p) * dir;
        const double value = objective(u);
        if (value > best) {
            best = value;
            best_u = u;
        }
    }
    refine(best_u, best, 0.3 * std::max(1.0, best_u.norm()), 2000, objective,
           rng);
    return best;
}

double rncp_glr_bruteforce(const WhitenedData& data, int n_samples,
                           std::mt19937_64& rng) {
    const int n = static_cast<int>(data.x_cut.size());
    const int h = static_cast<int>(data.x_omega.cols()) + 1;
    const Matrix s_omega = data.x_omega * data.x_omega.adjoint();
    const Matrix identity = Matrix::Identity(n, n);

    const auto objective = [&](const Vector& u) {
        const Matrix b = identity + u * u.adjoint();
        const Matrix inv = b.inverse();
        const Complex alpha = least_squares_amplitude(data.x_cut, data.v0, inv);
        const Vector x_alpha = data.x_cut - alpha * data.v0;
        return -h * std::log(std::real(b.determinant())) -
               std::real((inv * (s_omega + x_alpha * x_alpha.adjoint())).trace());
    };

    double best = objective(Vector::Zero(n));
    Vector best_u = Vector::Zero(n);
    for (int i = 0; i < n_samples; ++i) {
        const Vector dir = random_unit_vector(n, rng);
        std::uniform_real_distribution<double> log_p(-4.0, 5.0);
        const double p = std::pow(10.0, log_p(rng));
        const Vector u = std::sqrt(p) * dir;
        const double value = objective(u);
        if (value > best) {
            best = value;
            best_u = u;
        }
    }
    refine(best_u, best, 0.3 * std::max(1.0, best_u.norm()), 3000, objective,
           rng);

    return best - rncp_h0_bruteforce(data.x_all(), n_samples, rng);
}

double rayleigh_max_bruteforce(const Matrix& hermitian, int n_samples,
                               std::mt19937_64& rng) {
    const int n = static_cast<int>(hermitian.rows());
    const auto objective = [&](const Vector& w) {
        const double denom = w.squaredNorm();
        if (denom < 1e-12) return -1e300;
        return std::real(w.dot(hermitian * w)) / denom;
    };
    Vector best_w = random_unit_vector(n, rng);
    double best = objective(best_w);
    for (int i = 0; i < n_samples; ++i) {
        const Vector w = random_unit_vector(n, rng);
        const double value = objective(w);
        if (value > best) {
            best = value;
            best_w = w;
        }
    }
    refine(best_w, best, 0.3, 2500, objective, rng);
    return best;
}

double dncp_misfit_dense(const Vector& w, const Vector& x_cut,
                         const Matrix& x_omega, const Vector& v0) {
    const Eigen::Index n = x_cut.size();
    const Matrix perp = Matrix::Identity(n, n) -
                        (v0 * v0.adjoint()) / std::real(v0.dot(v0));
    double misfit = 0.0;

    const double cut_gain = std::real(w.dot(perp * w));
    if (cut_gain > 1e-14 * w.squaredNorm()) {
        const Complex beta = least_squares_amplitude(x_cut, w, perp);
        const Vector r = x_cut - beta * w;
        misfit += std::real(r.dot(perp * r));
    } else {
        misfit += std::real(x_cut.dot(perp * x_cut));
    }

    const Matrix identity = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < x_omega.cols(); ++i) {
        const Complex beta =
            least_squares_amplitude(x_omega.col(i), w, identity);
        misfit += (x_omega.col(i) - beta * w).squaredNorm();
    }
    return misfit;
}

double dncp_glr_bruteforce(const WhitenedData& data, int n_samples,
                           std::mt19937_64& rng) {
    const int n = static_cast<int>(data.x_cut.size());
    const auto objective = [&](const Vector& w) {
        if (w.norm() < 1e-9) return -1e300;
        return -dncp_misfit_dense(w, data.x_cut, data.x_omega, data.v0);
    };

    Vector best_w = random_unit_vector(n, rng);
    double best = objective(best_w);
    for (int i = 0; i < n_samples; ++i) {
        const Vector w = random_unit_vector(n, rng);
        const double value = objective(w);
        if (value > best) {
            best = value;
            best_w = w;
        }
    }
    refine(best_w, best, 0.3, 2500, objective, rng);

    const Matrix x_all = data.x_all();
    const double h0 = rayleigh_max_bruteforce(x_all * x_all.adjoint(),
                                              n_samples, rng) -
                      x_all.squaredNorm();
    return best - h0;
}

}  // namespace ncpd::testing
