#pragma once

#include <Eigen/Dense>
#include <optional>

#include "vbcomp/dataset.hpp"
#include "vbcomp/models.hpp"

namespace vbcomp {

// Consistent sandwich ingredients at a parameter point:
//   omega  = (1/n) sum s_t s_t'      (uncentered outer-product form)
//   h_bar  = (1/n) sum h_t
//   h_diag = diagonal of h_bar
//   c_hat  = h_bar^-1 omega h_bar^-1, absent when h_bar is near-singular
struct SandwichSet {
    Eigen::MatrixXd omega;
    Eigen::MatrixXd h_bar;
    Eigen::VectorXd h_diag;
    std::optional<Eigen::MatrixXd> c_hat;
    Eigen::VectorXd at;
    Eigen::Index n = 0;
    double h_rcond = 0.0;  // min|eig|/max|eig| of the diagonally equilibrated h_bar

    Eigen::Index dim() const { return omega.rows(); }
    bool c_ok() const { return c_hat.has_value(); }
};

// Single pass over observations. Requires n >= parameter dimension.
// h_bar with reciprocal condition below 1e-12 flags the set: c_hat is
// omitted rather than computed from a hopeless solve.
SandwichSet build_sandwich(ModelKind kind, const Dataset& data, const Eigen::VectorXd& theta);

// Reusable pieces for the VPIC penalty: -h_bar, its diagonal, and
// m = -h_bar + diag(-h_diag) with a cached factorization for solves.
struct PenaltyInputs {
    Eigen::MatrixXd neg_h;
    Eigen::VectorXd neg_hd;
    Eigen::MatrixXd m;
    Eigen::LDLT<Eigen::MatrixXd> m_ldlt;
    bool m_ok = false;
};

PenaltyInputs penalty_inputs(const SandwichSet& sw);

}  // namespace vbcomp
