#include "vbcomp/vb.hpp"

#include <cmath>
#include <stdexcept>

#include "vbcomp/errors.hpp"
#include "vbcomp/normal.hpp"
#include "vbcomp/rng.hpp"

namespace vbcomp {

namespace {

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& V, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": matrix not SPD");
    return llt.solve(Eigen::MatrixXd::Identity(V.rows(), V.cols()));
}

double spd_log_det(const Eigen::MatrixXd& A, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": matrix not SPD");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Bound for arbitrary factor parameters, shared by elbo_linear and the
// per-iterate path recording.
double linear_bound(const Dataset& data, const LinearPrior& prior, const Eigen::VectorXd& mu,
                    const Eigen::MatrixXd& Vb, double a_h, double b_h,
                    const Eigen::MatrixXd& prior_Vinv, double prior_logdetV) {
    const double n = static_cast<double>(data.n());
    const double p = static_cast<double>(data.p());
    const double e_log_h = num::digamma(a_h) - std::log(b_h);
    const double e_h = a_h / b_h;
    const Eigen::VectorXd r = data.y - data.X * mu;
    const Eigen::MatrixXd xtx = data.X.transpose() * data.X;
    const Eigen::VectorXd dm = mu - prior.mu;

    const double lik = 0.5 * n * (e_log_h - num::ln2pi) -
                       0.5 * e_h * (r.squaredNorm() + (xtx * Vb).trace());
    const double prior_beta = 0.5 * p * (e_log_h - num::ln2pi) - 0.5 * prior_logdetV -
                              0.5 * e_h * (dm.dot(prior_Vinv * dm) + (prior_Vinv * Vb).trace());
    const double prior_h = prior.a * std::log(prior.b) - std::lgamma(prior.a) +
                           (prior.a - 1.0) * e_log_h - prior.b * e_h;
    const double ent_beta = 0.5 * p * (1.0 + num::ln2pi) + 0.5 * spd_log_det(Vb, "elbo_linear V*");
    const double ent_h = a_h - std::log(b_h) + std::lgamma(a_h) + (1.0 - a_h) * num::digamma(a_h);
    return lik + prior_beta + prior_h + ent_beta + ent_h;
}

}  // namespace

LinearPrior default_linear_prior(Eigen::Index p, double scale, double a, double b) {
    return LinearPrior{Eigen::VectorXd::Zero(p),
                       scale * Eigen::MatrixXd::Identity(p, p), a, b};
}

ProbitPrior default_probit_prior(Eigen::Index p, double scale) {
    return ProbitPrior{Eigen::VectorXd::Zero(p), scale * Eigen::MatrixXd::Identity(p, p)};
}

LinearVBPosterior cavi_linear(const Dataset& data, const LinearPrior& prior,
                              const CaviOptions& opts) {
    const Eigen::Index p = data.p();
    if (prior.mu.size() != p || prior.V.rows() != p || prior.V.cols() != p)
        throw std::invalid_argument("cavi_linear: prior dimension mismatch");
    if (!(prior.a > 0.0) || !(prior.b > 0.0))
        throw std::invalid_argument("cavi_linear: gamma prior needs a > 0, b > 0");
    const double tol = opts.tol > 0.0 ? opts.tol : 1e-8;

    const Eigen::MatrixXd prior_Vinv = spd_inverse(prior.V, "cavi_linear prior V");
    const double prior_logdetV = spd_log_det(prior.V, "cavi_linear prior V");
    const Eigen::MatrixXd xtx = data.X.transpose() * data.X;
    const Eigen::MatrixXd A = xtx + prior_Vinv;
    Eigen::LDLT<Eigen::MatrixXd> A_ldlt(A);
    if (A_ldlt.info() != Eigen::Success || !A_ldlt.isPositive())
        throw NumericalError("cavi_linear: update matrix X'X + V^-1 is singular");

    LinearVBPosterior post;
    post.mu_beta = A_ldlt.solve(prior_Vinv * prior.mu + data.X.transpose() * data.y);
    post.a_h = 0.5 * static_cast<double>(data.n()) + prior.a;

    const Eigen::MatrixXd S = A_ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    const double c0 =
        prior.b + 0.5 * (data.y - data.X * post.mu_beta).squaredNorm();
    const double c1 = 0.5 * (xtx * S).trace();
    if (!(post.a_h > c1))
        throw NumericalError("cavi_linear: fixed point undefined (a* <= tr(X'X A^-1)/2)");
    const double b_closed = c0 * post.a_h / (post.a_h - c1);

    // plain fixed-point iteration, kept as a cross-check on the closed form
    double b_it = c0;
    post.elbo_path.clear();
    for (int it = 0; it < opts.max_iter; ++it) {
        const Eigen::MatrixXd Vb = S * (b_it / post.a_h);
        post.elbo_path.push_back(
            linear_bound(data, prior, post.mu_beta, Vb, post.a_h, b_it, prior_Vinv, prior_logdetV));
        const double b_next = c0 + c1 * b_it / post.a_h;
        post.iters = it + 1;
        const bool done = std::abs(b_next - b_it) / b_next < tol;
        b_it = b_next;
        if (done) break;
        if (it + 1 == opts.max_iter)
            throw NumericalError("cavi_linear: fixed point not reached in max_iter");
    }
    if (std::abs(b_it - b_closed) / b_closed > 100.0 * tol)
        throw NumericalError("cavi_linear: iterative and closed-form b*_h disagree");

    post.b_h = b_closed;
    post.V_beta = S * (post.b_h / post.a_h);
    post.elbo = linear_bound(data, prior, post.mu_beta, post.V_beta, post.a_h, post.b_h,
                             prior_Vinv, prior_logdetV);
    return post;
}

double elbo_linear(const LinearVBPosterior& post, const LinearPrior& prior, const Dataset& data) {
    const Eigen::MatrixXd prior_Vinv = spd_inverse(prior.V, "elbo_linear prior V");
    const double prior_logdetV = spd_log_det(prior.V, "elbo_linear prior V");
    return linear_bound(data, prior, post.mu_beta, post.V_beta, post.a_h, post.b_h, prior_Vinv,
                        prior_logdetV);
}

ProbitVBPosterior cavi_probit(const Dataset& data, const ProbitPrior& prior,
                              const CaviOptions& opts) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (prior.mu.size() != p || prior.V.rows() != p || prior.V.cols() != p)
        throw std::invalid_argument("cavi_probit: prior dimension mismatch");
    require_binary_response(data);
    const double tol = opts.tol > 0.0 ? opts.tol : 1e-6;

    const Eigen::MatrixXd prior_Vinv = spd_inverse(prior.V, "cavi_probit prior V");
    const Eigen::MatrixXd A = data.X.transpose() * data.X + prior_Vinv;
    Eigen::LDLT<Eigen::MatrixXd> A_ldlt(A);
    if (A_ldlt.info() != Eigen::Success || !A_ldlt.isPositive())
        throw NumericalError("cavi_probit: update matrix X'X + V^-1 is singular");

    ProbitVBPosterior post;
    post.Sigma_beta = A_ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    post.mu_beta = Eigen::VectorXd::Zero(p);
    post.mu_z.resize(n);
    post.elbo_path.clear();

    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        const Eigen::VectorXd m = data.X * post.mu_beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            post.mu_z[i] = data.y[i] != 0.0 ? m[i] + num::inv_mills(m[i])
                                            : m[i] - num::inv_mills(-m[i]);
        }
        const Eigen::VectorXd mu_new =
            A_ldlt.solve(data.X.transpose() * post.mu_z + prior_Vinv * prior.mu);
        const double delta = (mu_new - post.mu_beta).lpNorm<Eigen::Infinity>();
        post.mu_beta = mu_new;
        post.iters = it + 1;
        post.elbo_path.push_back(elbo_probit(post, prior, data));
        if (delta < tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("cavi_probit: no convergence in " + std::to_string(opts.max_iter) +
                             " sweeps");
    post.elbo = post.elbo_path.back();
    return post;
}

double elbo_probit(const ProbitVBPosterior& post, const ProbitPrior& prior, const Dataset& data) {
    const Eigen::VectorXd m = data.X * post.mu_beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        ll += data.y[i] != 0.0 ? num::log_norm_cdf(m[i]) : num::log_norm_cdf(-m[i]);
    const Eigen::MatrixXd prior_Vinv = spd_inverse(prior.V, "elbo_probit prior V");
    const Eigen::VectorXd dm = post.mu_beta - prior.mu;
    // log det(V X'X + I) through the symmetric form L' X'X L + I, L = chol(V)
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(prior.V).matrixL();
    const Eigen::MatrixXd sym =
        L.transpose() * (data.X.transpose() * data.X) * L +
        Eigen::MatrixXd::Identity(data.p(), data.p());
    return ll - 0.5 * dm.dot(prior_Vinv * dm) - 0.5 * spd_log_det(sym, "elbo_probit det");
}

Eigen::VectorXd vb_mean(const LinearVBPosterior& post) {
    return pack(LinearParams{post.mu_beta, post.a_h / post.b_h});
}

Eigen::VectorXd vb_mean(const ProbitVBPosterior& post) { return post.mu_beta; }

Eigen::MatrixXd vb_post_cov(const LinearVBPosterior& post) {
    const Eigen::Index p = post.mu_beta.size();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p + 1, p + 1);
    cov.topLeftCorner(p, p) = post.V_beta;
    cov(p, p) = post.a_h / (post.b_h * post.b_h);
    return cov;
}

Eigen::MatrixXd vb_post_cov(const ProbitVBPosterior& post) { return post.Sigma_beta; }

namespace {

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError(std::string(what) + ": covariance not SPD");
    return llt.matrixL();
}

}  // namespace

std::vector<Eigen::VectorXd> sample_vb_posterior(const LinearVBPosterior& post, int count,
                                                 std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_vb_posterior: count must be >= 1");
    const Eigen::Index p = post.mu_beta.size();
    const Eigen::MatrixXd L = cholesky_factor(post.V_beta, "sample_vb_posterior V*");
    Rng rng(seed);
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(count);
    Eigen::VectorXd z(p);
    for (int j = 0; j < count; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) z[k] = rng.normal();
        Eigen::VectorXd theta(p + 1);
        theta.head(p) = post.mu_beta + L * z;
        theta[p] = rng.gamma(post.a_h, post.b_h);
        draws.push_back(std::move(theta));
    }
    return draws;
}

std::vector<Eigen::VectorXd> sample_vb_posterior(const ProbitVBPosterior& post, int count,
                                                 std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_vb_posterior: count must be >= 1");
    const Eigen::Index p = post.mu_beta.size();
    const Eigen::MatrixXd L = cholesky_factor(post.Sigma_beta, "sample_vb_posterior Sigma");
    Rng rng(seed);
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(count);
    Eigen::VectorXd z(p);
    for (int j = 0; j < count; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) z[k] = rng.normal();
        draws.push_back(post.mu_beta + L * z);
    }
    return draws;
}

}  // namespace vbcomp
