#include "vbcomp/models.hpp"

#include <cmath>
#include <stdexcept>

#include "vbcomp/errors.hpp"
#include "vbcomp/normal.hpp"

namespace vbcomp {

namespace {

void check_linear_theta(const Dataset& data, const Eigen::VectorXd& theta) {
    if (theta.size() != data.p() + 1)
        throw std::invalid_argument("linear theta must have length p+1");
    if (!(theta[theta.size() - 1] > 0.0))
        throw std::invalid_argument("linear precision h must be positive");
}

void check_probit_theta(const Dataset& data, const Eigen::VectorXd& theta) {
    if (theta.size() != data.p())
        throw std::invalid_argument("probit theta must have length p");
    if (!theta.allFinite())
        throw std::invalid_argument("probit theta must be finite");
}

// Probit per-observation score/curvature weights at linear predictor m.
// score weight:      a(m,y) = y*lam(m) - (1-y)*lam(-m),     lam = phi/Phi
// curvature weight:  w(m,y) = y*lam(m)*(lam(m)+m) + (1-y)*lam(-m)*(lam(-m)-m)
// (h_t = -w x x'), both stable for large |m| through the hazard expansion.
double probit_score_weight(double m, double y) {
    return y != 0.0 ? num::inv_mills(m) : -num::inv_mills(-m);
}

double probit_curvature_weight(double m, double y) {
    if (y != 0.0) {
        const double lam = num::inv_mills(m);
        return lam * (lam + m);
    }
    const double lam = num::inv_mills(-m);
    return lam * (lam - m);
}

}  // namespace

std::string to_string(ModelKind kind) {
    return kind == ModelKind::LinearGaussian ? "linear" : "probit";
}

Eigen::Index param_dim(ModelKind kind, Eigen::Index p) {
    return kind == ModelKind::LinearGaussian ? p + 1 : p;
}

Eigen::VectorXd pack(const LinearParams& params) {
    Eigen::VectorXd theta(params.beta.size() + 1);
    theta.head(params.beta.size()) = params.beta;
    theta[params.beta.size()] = params.h;
    return theta;
}

Eigen::VectorXd pack(const ProbitParams& params) { return params.beta; }

LinearParams unpack_linear(const Eigen::VectorXd& theta) {
    return LinearParams{theta.head(theta.size() - 1), theta[theta.size() - 1]};
}

ProbitParams unpack_probit(const Eigen::VectorXd& theta) { return ProbitParams{theta}; }

double loglik(ModelKind kind, const Dataset& data, const Eigen::VectorXd& theta) {
    const Eigen::Index n = data.n();
    if (kind == ModelKind::LinearGaussian) {
        check_linear_theta(data, theta);
        const double h = theta[theta.size() - 1];
        const Eigen::VectorXd r = data.y - data.X * theta.head(data.p());
        return 0.5 * n * (std::log(h) - num::ln2pi) - 0.5 * h * r.squaredNorm();
    }
    check_probit_theta(data, theta);
    require_binary_response(data);
    const Eigen::VectorXd m = data.X * theta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        ll += data.y[i] != 0.0 ? num::log_norm_cdf(m[i]) : num::log_norm_cdf(-m[i]);
    return ll;
}

Eigen::VectorXd score_per_obs(ModelKind kind, const Dataset& data,
                              const Eigen::VectorXd& theta, Eigen::Index t) {
    if (t < 0 || t >= data.n()) throw std::invalid_argument("observation index out of range");
    if (kind == ModelKind::LinearGaussian) {
        check_linear_theta(data, theta);
        const Eigen::Index p = data.p();
        const double h = theta[p];
        const double r = data.y[t] - data.X.row(t).dot(theta.head(p));
        Eigen::VectorXd s(p + 1);
        s.head(p) = h * r * data.X.row(t).transpose();
        s[p] = 0.5 / h - 0.5 * r * r;
        return s;
    }
    check_probit_theta(data, theta);
    const double m = data.X.row(t).dot(theta);
    return probit_score_weight(m, data.y[t]) * data.X.row(t).transpose();
}

Eigen::MatrixXd hessian_sum(ModelKind kind, const Dataset& data, const Eigen::VectorXd& theta) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    Eigen::MatrixXd H;
    if (kind == ModelKind::LinearGaussian) {
        check_linear_theta(data, theta);
        const double h = theta[p];
        H.setZero(p + 1, p + 1);
        H.topLeftCorner(p, p) = -h * (data.X.transpose() * data.X);
        const Eigen::VectorXd off =
            data.X.transpose() * data.y - data.X.transpose() * (data.X * theta.head(p));
        H.topRightCorner(p, 1) = off;
        H.bottomLeftCorner(1, p) = off.transpose();
        H(p, p) = -0.5 * n / (h * h);
    } else {
        check_probit_theta(data, theta);
        const Eigen::VectorXd m = data.X * theta;
        H.setZero(p, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = probit_curvature_weight(m[i], data.y[i]);
            H.noalias() -= w * (data.X.row(i).transpose() * data.X.row(i));
        }
    }
    return 0.5 * (H + H.transpose()).eval();
}

void accumulate_score_outer_and_hessian(ModelKind kind, const Dataset& data,
                                        const Eigen::VectorXd& theta,
                                        Eigen::MatrixXd& score_outer_sum,
                                        Eigen::MatrixXd& hessian_sum_out) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    const Eigen::Index d = param_dim(kind, p);
    score_outer_sum.setZero(d, d);
    hessian_sum_out.setZero(d, d);
    if (kind == ModelKind::LinearGaussian) {
        check_linear_theta(data, theta);
        const double h = theta[p];
        Eigen::VectorXd s(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = data.y[i] - data.X.row(i).dot(theta.head(p));
            s.head(p) = h * r * data.X.row(i).transpose();
            s[p] = 0.5 / h - 0.5 * r * r;
            score_outer_sum.noalias() += s * s.transpose();
            hessian_sum_out.topLeftCorner(p, p).noalias() -=
                h * (data.X.row(i).transpose() * data.X.row(i));
            hessian_sum_out.topRightCorner(p, 1).noalias() += r * data.X.row(i).transpose();
            hessian_sum_out(p, p) -= 0.5 / (h * h);
        }
        hessian_sum_out.bottomLeftCorner(1, p) = hessian_sum_out.topRightCorner(p, 1).transpose();
    } else {
        check_probit_theta(data, theta);
        require_binary_response(data);
        const Eigen::VectorXd m = data.X * theta;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = probit_score_weight(m[i], data.y[i]);
            const double w = probit_curvature_weight(m[i], data.y[i]);
            const auto xi = data.X.row(i);
            score_outer_sum.noalias() += (a * a) * (xi.transpose() * xi);
            hessian_sum_out.noalias() -= w * (xi.transpose() * xi);
        }
    }
    score_outer_sum = 0.5 * (score_outer_sum + score_outer_sum.transpose()).eval();
    hessian_sum_out = 0.5 * (hessian_sum_out + hessian_sum_out.transpose()).eval();
}

namespace {

FitResult fit_linear(const Dataset& data) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
    if (qr.rank() < data.p())
        throw NumericalError("fit_mle: rank-deficient design matrix (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(data.p()) + ")");
    const Eigen::VectorXd beta = qr.solve(data.y);
    const double rss = (data.y - data.X * beta).squaredNorm();
    if (!(rss > 0.0))
        throw NumericalError("fit_mle: zero residual sum of squares, precision undefined");
    FitResult out;
    out.theta = pack(LinearParams{beta, static_cast<double>(data.n()) / rss});
    out.converged = true;
    out.iterations = 0;
    out.score_inf_norm = 0.0;
    return out;
}

FitResult fit_probit(const Dataset& data, const FitOptions& opts) {
    require_binary_response(data);
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double ll = loglik(ModelKind::Probit, data, beta);
    FitResult out;
    for (int it = 0; it < opts.max_iter; ++it) {
        const Eigen::VectorXd m = data.X * beta;
        Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            score.noalias() += probit_score_weight(m[i], data.y[i]) * data.X.row(i).transpose();
            hess.noalias() -= probit_curvature_weight(m[i], data.y[i]) *
                              (data.X.row(i).transpose() * data.X.row(i));
        }
        out.iterations = it;
        out.score_inf_norm = score.lpNorm<Eigen::Infinity>();
        if (out.score_inf_norm < opts.tol * static_cast<double>(n)) {
            out.theta = beta;
            out.converged = true;
            return out;
        }
        const Eigen::VectorXd step = hess.ldlt().solve(-score);
        if (!step.allFinite()) {
            out.theta = beta;
            out.message = "fit_mle: non-finite Newton step";
            return out;
        }
        // halve on likelihood decrease; probit can overshoot near separation.
        // Decreases below the summation noise floor of the log-likelihood do
        // not count, otherwise the search stalls on a rounding plateau.
        const double ll_noise = 1e-10 * (1.0 + std::abs(ll));
        double lambda = 1.0;
        double ll_new = ll;
        Eigen::VectorXd cand = beta;
        for (int half = 0; half <= 30; ++half) {
            cand = beta + lambda * step;
            ll_new = loglik(ModelKind::Probit, data, cand);
            if (std::isfinite(ll_new) && ll_new >= ll - ll_noise) break;
            lambda *= 0.5;
        }
        beta = cand;
        ll = ll_new;
    }
    out.theta = beta;
    out.message = "fit_mle: max_iter reached before score tolerance";
    return out;
}

}  // namespace

FitResult fit_mle(ModelKind kind, const Dataset& data, const FitOptions& opts) {
    return kind == ModelKind::LinearGaussian ? fit_linear(data) : fit_probit(data, opts);
}

}  // namespace vbcomp
