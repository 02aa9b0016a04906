#include "vbcomp/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <thread>

#include "vbcomp/errors.hpp"
#include "vbcomp/normal.hpp"
#include "vbcomp/rng.hpp"

namespace vbcomp {

namespace {

constexpr double dgp_slope = 46.0;
constexpr double dgp_span = 0.7;

Eigen::VectorXd poly_grid(Eigen::Index n) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = dgp_span * static_cast<double>(i) / static_cast<double>(n);
    return x;
}

Eigen::MatrixXd power_design(const Eigen::VectorXd& x, int order) {
    Eigen::MatrixXd X(x.size(), order);
    X.col(0).setOnes();
    for (int j = 1; j < order; ++j) X.col(j) = X.col(j - 1).cwiseProduct(x);
    return X;
}

struct RiskRule {
    std::string label;
    Criterion winner_of;
    Criterion scored_by;
};

const std::vector<RiskRule>& risk_rules() {
    static const std::vector<RiskRule> rules = {
        {"VPIC", Criterion::VPIC, Criterion::VPIC},
        {"VDIC_M", Criterion::VDIC_M, Criterion::VDIC_M},
        {"AIC", Criterion::AIC, Criterion::VPIC},
        {"ELBO1", Criterion::ELBO, Criterion::VDIC_M},
        {"ELBO2", Criterion::ELBO, Criterion::VPIC},
        {"BIC1", Criterion::BIC, Criterion::VDIC_M},
        {"BIC2", Criterion::BIC, Criterion::VPIC},
    };
    return rules;
}

bool has_criterion(const std::vector<Criterion>& set, Criterion c) {
    return std::find(set.begin(), set.end(), c) != set.end();
}

RepRecord evaluate_replication(int rep, const Eigen::VectorXd& y,
                               const std::vector<Candidate>& candidates,
                               const std::vector<Criterion>& criteria, std::uint64_t seed) {
    RepRecord rec;
    rec.rep = rep;
    EvalOptions opts;
    opts.criteria = criteria;
    opts.seed = seed;
    for (Criterion c : criteria) rec.values[c] = {};

    for (const auto& cand : candidates) {
        const CandidateEval ev = evaluate_candidate(y, cand, opts);
        if (!ev.ok) {
            rec.ok = false;
            rec.error = cand.model_id + ": " + ev.error;
            return rec;
        }
        for (const auto& rep_c : ev.reports) rec.values[rep_c.criterion].push_back(rep_c.value);
    }
    for (Criterion c : criteria) {
        const auto& vals = rec.values[c];
        int best = 0;
        for (int k = 1; k < static_cast<int>(vals.size()); ++k)
            if (vals[k] < vals[best]) best = k;
        rec.selected[c] = best + 1;
    }
    for (const auto& rule : risk_rules()) {
        if (!has_criterion(criteria, rule.winner_of) || !has_criterion(criteria, rule.scored_by))
            continue;
        rec.risk_terms[rule.label] = rec.values[rule.scored_by][rec.selected[rule.winner_of] - 1];
    }
    rec.ok = true;
    return rec;
}

// Runs the replication callback on a worker pool and aggregates. Results are
// stored by replication index, so output is independent of scheduling.
ExperimentResult run_pool(Eigen::Index n, int reps, int workers, int candidate_count,
                          const std::vector<Criterion>& criteria, const std::string& name,
                          const std::string& note,
                          const std::function<RepRecord(int)>& replicate) {
    if (reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
    if (n < 50) throw std::invalid_argument("run_experiment: n must be >= 50");

    ExperimentResult res;
    res.per_rep.resize(reps);
    res.reps = reps;
    res.n = n;
    res.candidate_count = candidate_count;
    res.experiment = name;
    res.note = note;

    const int pool = resolve_workers(workers);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= reps) return;
            try {
                res.per_rep[r] = replicate(r);
            } catch (const std::exception& e) {
                res.per_rep[r].rep = r;
                res.per_rep[r].ok = false;
                res.per_rep[r].error = e.what();
            }
        }
    };
    if (pool <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int t = 0; t < pool; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }

    for (const auto& rec : res.per_rep)
        if (!rec.ok) ++res.failures;
    if (res.failures > 0 && 100 * res.failures > reps) {
        std::string first;
        for (const auto& rec : res.per_rep)
            if (!rec.ok) { first = rec.error; break; }
        throw NumericalError("run_experiment: " + std::to_string(res.failures) + "/" +
                             std::to_string(reps) + " replications failed (cap 1%); first: " +
                             first);
    }

    for (Criterion c : criteria) {
        auto& hist = res.freq[c];
        hist.assign(candidate_count, 0);
        double sum = 0.0;
        int count = 0;
        for (const auto& rec : res.per_rep) {
            if (!rec.ok) continue;
            const int k = rec.selected.at(c);
            ++hist[k - 1];
            sum += k;
            ++count;
        }
        res.avg_k[c] = count > 0 ? sum / count : 0.0;
    }
    for (const auto& rule : risk_rules()) {
        if (!has_criterion(criteria, rule.winner_of) || !has_criterion(criteria, rule.scored_by))
            continue;
        res.risks[rule.label] = estimate_risk(res.per_rep, rule.label);
    }
    return res;
}

}  // namespace

std::string to_string(OrderRule rule) {
    return rule == OrderRule::FloorLnN ? "floor-ln-n" : "floor-ln-n34";
}

const std::vector<Criterion>& experiment_criteria() {
    static const std::vector<Criterion> set = {Criterion::VPIC, Criterion::VDIC_M, Criterion::ELBO,
                                               Criterion::AIC, Criterion::BIC};
    return set;
}

Dataset gen_poly_data(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_poly_data: n must be >= 1");
    const Eigen::VectorXd x = poly_grid(n);
    Rng rng(seed);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y[i] = std::log1p(dgp_slope * x[i]) + rng.normal();
    return make_dataset(std::move(y), x, {"x"});
}

std::vector<Candidate> candidate_poly_models(Eigen::Index n, OrderRule rule, double prior_scale,
                                             double prior_a, double prior_b) {
    const double ln_n = std::log(static_cast<double>(n));
    const int max_order =
        static_cast<int>(std::floor(rule == OrderRule::FloorLnN ? ln_n : 0.75 * ln_n));
    if (max_order < 1)
        throw std::invalid_argument("candidate_poly_models: n too small for any candidate");
    const Eigen::VectorXd x = poly_grid(n);
    std::vector<Candidate> cands;
    cands.reserve(max_order);
    for (int k = 1; k <= max_order; ++k) {
        Candidate c;
        c.model_id = "M" + std::to_string(k);
        c.kind = ModelKind::LinearGaussian;
        c.X = power_design(x, k);
        for (int j = 0; j < k; ++j) c.names.push_back("x^" + std::to_string(j));
        c.prior = default_linear_prior(k, prior_scale, prior_a, prior_b);
        cands.push_back(std::move(c));
    }
    return cands;
}

Dataset gen_probit_data(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_probit_data: n must be >= 1");
    const Eigen::Vector4d beta(-0.2, 0.3, 0.0, 0.7);
    Rng rng(seed);
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = rng.normal();
        X(i, 2) = rng.normal();
        X(i, 3) = rng.normal();
        const double pr = num::norm_cdf(X.row(i).dot(beta));
        y[i] = rng.uniform() < pr ? 1.0 : 0.0;
    }
    return make_dataset(std::move(y), std::move(X), {"const", "x1", "x2", "x3"});
}

std::vector<std::vector<int>> candidate_probit_models() {
    return {{0, 1}, {0, 2}, {0, 3}, {0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {0, 1, 2, 3}};
}

ExperimentResult run_experiment(const PolyExperimentConfig& config) {
    // the x grid is fixed under repeated sampling, so candidates are shared
    const auto candidates = candidate_poly_models(config.n, config.max_order_rule,
                                                  config.prior_scale, config.prior_a,
                                                  config.prior_b);
    auto replicate = [&](int r) {
        const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(r);
        const Dataset data = gen_poly_data(config.n, rep_seed);
        return evaluate_replication(r, data.y, candidates, config.criteria, rep_seed);
    };
    return run_pool(config.n, config.reps, config.workers,
                    static_cast<int>(candidates.size()), config.criteria, "poly",
                    "DGP y = ln(1+46x) + N(0,1) on x = 0.7(i-1)/n; rule " +
                        to_string(config.max_order_rule),
                    replicate);
}

ExperimentResult run_experiment(const ProbitExperimentConfig& config) {
    const auto masks = candidate_probit_models();
    auto replicate = [&](int r) {
        const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(r);
        // covariates are redrawn each replication, so candidate designs are per-rep
        const Dataset full = gen_probit_data(config.n, rep_seed);
        std::vector<Candidate> candidates;
        candidates.reserve(masks.size());
        for (std::size_t m = 0; m < masks.size(); ++m) {
            Candidate c;
            c.model_id = "M" + std::to_string(m + 1);
            c.kind = ModelKind::Probit;
            c.X.resize(full.n(), static_cast<Eigen::Index>(masks[m].size()));
            for (std::size_t j = 0; j < masks[m].size(); ++j) {
                c.X.col(static_cast<Eigen::Index>(j)) = full.X.col(masks[m][j]);
                c.names.push_back(full.names[masks[m][j]]);
            }
            c.prior = default_probit_prior(c.X.cols(), config.prior_scale);
            candidates.push_back(std::move(c));
        }
        return evaluate_replication(r, full.y, candidates, config.criteria, rep_seed);
    };
    return run_pool(config.n, config.reps, config.workers, static_cast<int>(masks.size()),
                    config.criteria, "probit",
                    "beta = (-0.2, 0.3, 0, 0.7); covariates iid N(0,1)", replicate);
}

RiskEstimate estimate_risk(const std::vector<RepRecord>& per_rep, const std::string& label) {
    std::vector<double> vals;
    for (const auto& rec : per_rep) {
        if (!rec.ok) continue;
        const auto it = rec.risk_terms.find(label);
        if (it != rec.risk_terms.end()) vals.push_back(it->second);
    }
    if (vals.empty())
        throw std::invalid_argument("estimate_risk: no replications carry label " + label);
    RiskEstimate est;
    const double count = static_cast<double>(vals.size());
    for (double v : vals) est.raw += v;
    est.raw /= count;
    est.scaled = (est.raw - 1.0 - num::ln2pi) / 1e3;
    if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - est.raw) * (v - est.raw);
        est.se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    return est;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VBCOMP_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace vbcomp
