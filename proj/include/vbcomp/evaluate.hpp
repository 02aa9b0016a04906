#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "vbcomp/criteria.hpp"
#include "vbcomp/dataset.hpp"
#include "vbcomp/vb.hpp"

namespace vbcomp {

// One candidate model over a shared response: a design, a prior, a label.
struct Candidate {
    std::string model_id;
    ModelKind kind = ModelKind::LinearGaussian;
    Eigen::MatrixXd X;
    std::vector<std::string> names;
    std::variant<LinearPrior, ProbitPrior> prior;
};

struct EvalOptions {
    std::vector<Criterion> criteria;
    std::uint64_t seed = 0;   // stream for DIC draws
    int dic_draws = 10000;
    CaviOptions cavi;
    FitOptions mle;
};

struct CandidateEval {
    std::string model_id;
    std::vector<CriterionReport> reports;
    Eigen::VectorXd theta_vb;
    double elbo = 0.0;
    double loglik_vb = 0.0;
    int cavi_iters = 0;
    bool ok = false;
    std::string error;
};

// Fits VB (and the MLE when AIC/BIC/TIC ask for it), builds the sandwich
// set(s), and produces one report per requested criterion. Failures are
// captured in .error instead of escaping, so a bad candidate cannot take
// down a comparison or a replication batch.
CandidateEval evaluate_candidate(const Eigen::VectorXd& y, const Candidate& cand,
                                 const EvalOptions& opts);

}  // namespace vbcomp
