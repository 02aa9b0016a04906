#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vbcomp/dataset.hpp"
#include "vbcomp/models.hpp"
#include "vbcomp/sandwich.hpp"

namespace vbcomp {

enum class Criterion { VPIC, VDIC_M, ELBO, AIC, BIC, TIC, DIC, DIC_M };

std::string to_string(Criterion c);
std::optional<Criterion> criterion_from_string(const std::string& name);
const std::vector<Criterion>& all_criteria();

struct CriterionMeta {
    std::string model_id;
    int param_count = 0;
    Eigen::Index n = 0;
};

// One criterion evaluation. value = fit_term + 2*penalty throughout
// (BIC stores penalty = param_count*ln(n)/2, ELBO stores penalty = 0).
struct CriterionReport {
    Criterion criterion = Criterion::AIC;
    double fit_term = 0.0;
    double penalty = 0.0;
    double value = 0.0;
    std::string model_id;
    int param_count = 0;
    Eigen::Index n = 0;
};

// Plug-in predictive criterion at the VB mean: penalty -tr[omega h_bar^-1].
CriterionReport vdic_m(double loglik_at_vb_mean, const SandwichSet& sw, const CriterionMeta& meta);

// Posterior-predictive criterion at the VB mean. Four-term penalty
//   1/2 tr[omega (-H)^-1] + 1/2 ln|(-H)(-Hd)^-1 + I|
//   - 1/2 tr[M^-1 (omega + (-Hd) C (-Hd))] + 1/2 tr[(-Hd) C],
// log-det evaluated through the SPD similarity form
// (-Hd)^-1/2 (-H) (-Hd)^-1/2 + I; non-positive eigenvalues are an error,
// never silently absolute-valued.
CriterionReport vpic(double loglik_at_vb_mean, const SandwichSet& sw, const CriterionMeta& meta);

// Same penalty as vdic_m, evaluated at the MLE.
CriterionReport tic(double loglik_at_mle, const SandwichSet& sw, const CriterionMeta& meta);

CriterionReport aic(double loglik_at_mle, const CriterionMeta& meta);
CriterionReport bic(double loglik_at_mle, const CriterionMeta& meta);

// Classic DIC with the posterior expectation taken over the supplied draws
// (here: variational posterior draws). Rejects fewer than 100 draws.
CriterionReport dic(double loglik_at_post_mean, const std::vector<Eigen::VectorXd>& draws,
                    ModelKind kind, const Dataset& data, const CriterionMeta& meta);

// DIC_M: penalty tr[n omega post_cov].
CriterionReport dic_m(double loglik_at_post_mean, const SandwichSet& sw,
                      const Eigen::MatrixXd& post_cov, const CriterionMeta& meta);

// -2*ELBO so that smaller-is-better holds across the whole table.
CriterionReport elbo_criterion(double elbo, const CriterionMeta& meta);

struct ComparisonResult {
    std::vector<CriterionReport> reports;
    std::map<Criterion, std::string> winners;  // argmin of value; ties -> lowest model index
};

ComparisonResult compare_models(const std::vector<CriterionReport>& reports);

}  // namespace vbcomp
