#include "vbcomp/sandwich.hpp"

#include <stdexcept>

namespace vbcomp {

SandwichSet build_sandwich(ModelKind kind, const Dataset& data, const Eigen::VectorXd& theta) {
    const Eigen::Index d = param_dim(kind, data.p());
    if (theta.size() != d)
        throw std::invalid_argument("build_sandwich: theta dimension does not match model");
    if (data.n() < d)
        throw std::invalid_argument("build_sandwich: needs n >= parameter dimension");

    SandwichSet sw;
    sw.at = theta;
    sw.n = data.n();
    Eigen::MatrixXd score_outer, hess;
    accumulate_score_outer_and_hessian(kind, data, theta, score_outer, hess);
    const double inv_n = 1.0 / static_cast<double>(data.n());
    sw.omega = score_outer * inv_n;
    sw.h_bar = hess * inv_n;
    sw.h_diag = sw.h_bar.diagonal();

    // scale-invariant condition estimate: equilibrate by the diagonal so that
    // pure column scaling (raw polynomial designs) does not masquerade as
    // singularity; true collinearity still trips the threshold
    const Eigen::VectorXd diag_abs = sw.h_bar.diagonal().cwiseAbs();
    Eigen::MatrixXd gauge = sw.h_bar;
    if ((diag_abs.array() > 0.0).all()) {
        const Eigen::VectorXd s = diag_abs.cwiseSqrt().cwiseInverse();
        gauge = s.asDiagonal() * sw.h_bar * s.asDiagonal();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gauge);
    const Eigen::VectorXd abs_ev = es.eigenvalues().cwiseAbs();
    const double emax = abs_ev.maxCoeff();
    sw.h_rcond = emax > 0.0 ? abs_ev.minCoeff() / emax : 0.0;
    if (sw.h_rcond >= 1e-12) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(sw.h_bar);
        Eigen::MatrixXd c = ldlt.solve(ldlt.solve(sw.omega).transpose());
        sw.c_hat = 0.5 * (c + c.transpose()).eval();
    }
    return sw;
}

PenaltyInputs penalty_inputs(const SandwichSet& sw) {
    if (!sw.h_bar.allFinite())
        throw std::invalid_argument("penalty_inputs: non-finite h_bar");
    PenaltyInputs pi;
    pi.neg_h = -sw.h_bar;
    pi.neg_hd = -sw.h_diag;
    pi.m = pi.neg_h;
    pi.m.diagonal() += pi.neg_hd;
    pi.m_ldlt.compute(pi.m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pi.m);
    const Eigen::VectorXd abs_ev = es.eigenvalues().cwiseAbs();
    const double emax = abs_ev.maxCoeff();
    pi.m_ok = pi.m_ldlt.info() == Eigen::Success && emax > 0.0 &&
              abs_ev.minCoeff() / emax >= 1e-12;
    return pi;
}

}  // namespace vbcomp
