#pragma once

#include <Eigen/Dense>
#include <string>

#include "vbcomp/dataset.hpp"

namespace vbcomp {

enum class ModelKind { LinearGaussian, Probit };

std::string to_string(ModelKind kind);

// Gaussian linear regression, theta = (beta', h)' with error precision h = 1/sigma^2.
struct LinearParams {
    Eigen::VectorXd beta;
    double h = 1.0;
};

struct ProbitParams {
    Eigen::VectorXd beta;
};

// Parameter dimension for a design with p columns: p+1 linear (h last), p probit.
Eigen::Index param_dim(ModelKind kind, Eigen::Index p);

Eigen::VectorXd pack(const LinearParams& params);
Eigen::VectorXd pack(const ProbitParams& params);
LinearParams unpack_linear(const Eigen::VectorXd& theta);
ProbitParams unpack_probit(const Eigen::VectorXd& theta);

// Sum over observations of the per-observation log-likelihood l_t(theta).
double loglik(ModelKind kind, const Dataset& data, const Eigen::VectorXd& theta);

// Per-observation score s_t(theta), t in [0, n).
Eigen::VectorXd score_per_obs(ModelKind kind, const Dataset& data,
                              const Eigen::VectorXd& theta, Eigen::Index t);

// Sum over observations of per-observation Hessians, symmetrized by
// averaging with its own transpose.
Eigen::MatrixXd hessian_sum(ModelKind kind, const Dataset& data, const Eigen::VectorXd& theta);

// One pass over observations accumulating sum s_t s_t' and sum h_t.
void accumulate_score_outer_and_hessian(ModelKind kind, const Dataset& data,
                                        const Eigen::VectorXd& theta,
                                        Eigen::MatrixXd& score_outer_sum,
                                        Eigen::MatrixXd& hessian_sum_out);

struct FitOptions {
    double tol = 1e-8;
    int max_iter = 100;
};

struct FitResult {
    Eigen::VectorXd theta;
    bool converged = false;
    int iterations = 0;
    double score_inf_norm = 0.0;
    std::string message;
};

// Quasi maximum likelihood. Linear: closed form (QR), throws NumericalError
// on rank-deficient X. Probit: damped Newton-Raphson on the analytic
// score/Hessian; a non-finite step ends the iteration with converged=false
// and the last iterate.
FitResult fit_mle(ModelKind kind, const Dataset& data, const FitOptions& opts = {});

}  // namespace vbcomp
