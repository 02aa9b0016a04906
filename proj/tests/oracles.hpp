#pragma once

// Test-only oracles, independent of the library code paths they check:
// finite differences, the exact conjugate marginal likelihood, and plain
// trapezoid quadrature.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace oracle {

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        const double step = h * std::max(1.0, std::abs(x[i]));
        hi[i] += step;
        lo[i] -= step;
        g[i] = (f(hi) - f(lo)) / (2.0 * step);
    }
    return g;
}

inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd J(f0.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        const double step = h * std::max(1.0, std::abs(x[i]));
        hi[i] += step;
        lo[i] -= step;
        J.col(i) = (f(hi) - f(lo)) / (2.0 * step);
    }
    return J;
}

// Exact log marginal likelihood of the Normal-Gamma linear model
//   y | beta, h ~ N(X beta, h^-1 I),  beta | h ~ N(mu0, h^-1 V0),
//   h ~ Gamma(a, b)
inline double conjugate_log_marginal(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& mu0, const Eigen::MatrixXd& V0,
                                     double a, double b) {
    const double n = static_cast<double>(y.size());
    const Eigen::MatrixXd V0inv = V0.inverse();
    const Eigen::MatrixXd A = X.transpose() * X + V0inv;
    const Eigen::VectorXd mun = A.inverse() * (X.transpose() * y + V0inv * mu0);
    const double an = a + 0.5 * n;
    const double bn = b + 0.5 * (y.dot(y) + mu0.dot(V0inv * mu0) - mun.dot(A * mun));
    const double ld_post = std::log(A.inverse().determinant());
    const double ld_prior = std::log(V0.determinant());
    return -0.5 * n * 1.8378770664093454836 + 0.5 * (ld_post - ld_prior) + a * std::log(b) -
           an * std::log(bn) + std::lgamma(an) - std::lgamma(a);
}

// Tensor trapezoid over (beta, u = ln h); the exponential decay of both
// marginals makes the trapezoid rule spectrally accurate here.
inline double trapezoid2d(const std::function<double(double, double)>& f, double b_lo, double b_hi,
                          double u_lo, double u_hi, int nb, int nu) {
    const double db = (b_hi - b_lo) / (nb - 1);
    const double du = (u_hi - u_lo) / (nu - 1);
    double sum = 0.0;
    for (int i = 0; i < nb; ++i) {
        const double wb = (i == 0 || i == nb - 1) ? 0.5 : 1.0;
        const double beta = b_lo + i * db;
        for (int j = 0; j < nu; ++j) {
            const double wu = (j == 0 || j == nu - 1) ? 0.5 : 1.0;
            sum += wb * wu * f(beta, u_lo + j * du);
        }
    }
    return sum * db * du;
}

}  // namespace oracle
