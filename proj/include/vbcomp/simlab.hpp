#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vbcomp/criteria.hpp"
#include "vbcomp/dataset.hpp"
#include "vbcomp/evaluate.hpp"

namespace vbcomp {

enum class OrderRule { FloorLnN, FloorLnN34 };

std::string to_string(OrderRule rule);

// Default criterion set for the simulation tables.
const std::vector<Criterion>& experiment_criteria();

struct PolyExperimentConfig {
    Eigen::Index n = 500;
    int reps = 1;
    std::uint64_t seed = 1;
    OrderRule max_order_rule = OrderRule::FloorLnN;
    std::vector<Criterion> criteria = experiment_criteria();
    int workers = 0;  // 0 = hardware concurrency
    double prior_scale = 1e5;
    double prior_a = 1.0;
    double prior_b = 1.0;
};

struct ProbitExperimentConfig {
    Eigen::Index n = 500;
    int reps = 1;
    std::uint64_t seed = 1;
    std::vector<Criterion> criteria = experiment_criteria();
    int workers = 0;
    double prior_scale = 1e5;
};

// y_i = ln(1 + 46 x_i) + e_i, e_i ~ N(0,1), on the fixed grid
// x_i = 0.7 (i-1)/n. Returns y plus the raw x column; candidate designs are
// built from it per polynomial order.
Dataset gen_poly_data(Eigen::Index n, std::uint64_t seed);

// Polynomial candidates M_k with regressors x^0..x^{k-1}, k = 1..K, where
// K = floor(ln n) or floor(ln n^{3/4}) by rule. param_count is k+1
// (coefficients plus the noise precision).
std::vector<Candidate> candidate_poly_models(Eigen::Index n, OrderRule rule,
                                             double prior_scale = 1e5, double prior_a = 1.0,
                                             double prior_b = 1.0);

// Probit DGP: beta = (-0.2, 0.3, 0, 0.7), X_i = (1, x1, x2, x3) with the
// covariates drawn iid standard normal, y ~ Bernoulli(Phi(X'beta)).
Dataset gen_probit_data(Eigen::Index n, std::uint64_t seed);

// The seven candidate covariate subsets; index 4 (M5) is the
// correctly-specified one.
std::vector<std::vector<int>> candidate_probit_models();

struct RepRecord {
    int rep = 0;
    bool ok = false;
    std::string error;
    std::map<Criterion, int> selected;                    // 1-based model index
    std::map<Criterion, std::vector<double>> values;      // per candidate
    std::map<std::string, double> risk_terms;             // label -> IC at winner
};

struct RiskEstimate {
    double raw = 0.0;     // mean of IC_{k*} over replications
    double scaled = 0.0;  // (raw - 1 - ln 2pi) / 1e3, the reporting transform
    double se = 0.0;      // sample sd / sqrt(reps)
};

struct ExperimentResult {
    std::vector<RepRecord> per_rep;
    std::map<Criterion, std::vector<int>> freq;  // histogram over model index
    std::map<Criterion, double> avg_k;
    std::map<std::string, RiskEstimate> risks;
    int failures = 0;
    int reps = 0;
    Eigen::Index n = 0;
    int candidate_count = 0;
    std::string experiment;
    std::string note;
};

// One replication per work unit: generate data with seed + rep, evaluate
// every candidate under every requested criterion, record argmins and the
// risk terms. Replications run on a worker pool; results are merged by
// replication index so output does not depend on scheduling. Failed
// replications are excluded with a count; more than 1% of reps failing
// aborts the run.
ExperimentResult run_experiment(const PolyExperimentConfig& config);
ExperimentResult run_experiment(const ProbitExperimentConfig& config);

// Risk labels: VPIC, VDIC_M (each scored at its own winner), AIC (VPIC at
// the AIC winner), ELBO1/BIC1 (VDIC_M at the ELBO/BIC winner), ELBO2/BIC2
// (VPIC at those winners).
RiskEstimate estimate_risk(const std::vector<RepRecord>& per_rep, const std::string& label);

int resolve_workers(int requested);

}  // namespace vbcomp
