#include "vbcomp/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "vbcomp/errors.hpp"

namespace vbcomp {

namespace {

CriterionReport make_report(Criterion c, double fit, double penalty, const CriterionMeta& meta) {
    CriterionReport r;
    r.criterion = c;
    r.fit_term = fit;
    r.penalty = penalty;
    r.value = fit + 2.0 * penalty;
    r.model_id = meta.model_id;
    r.param_count = meta.param_count;
    r.n = meta.n;
    return r;
}

// tr[A^-1 B] via a cached/LDLT solve, no explicit inverse
double trace_solve(const Eigen::LDLT<Eigen::MatrixXd>& ldlt, const Eigen::MatrixXd& B) {
    return ldlt.solve(B).trace();
}

double robust_penalty(const SandwichSet& sw, const char* who) {
    if (!sw.c_ok())
        throw NumericalError(std::string(who) + ": h_bar near-singular (rcond " +
                             std::to_string(sw.h_rcond) + ")");
    Eigen::LDLT<Eigen::MatrixXd> h_ldlt(sw.h_bar);
    if (h_ldlt.info() != Eigen::Success)
        throw NumericalError(std::string(who) + ": h_bar factorization failed");
    return -trace_solve(h_ldlt, sw.omega);
}

}  // namespace

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::VPIC: return "VPIC";
        case Criterion::VDIC_M: return "VDIC_M";
        case Criterion::ELBO: return "ELBO";
        case Criterion::AIC: return "AIC";
        case Criterion::BIC: return "BIC";
        case Criterion::TIC: return "TIC";
        case Criterion::DIC: return "DIC";
        case Criterion::DIC_M: return "DIC_M";
    }
    return "?";
}

std::optional<Criterion> criterion_from_string(const std::string& name) {
    std::string up;
    for (char ch : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    for (Criterion c : all_criteria())
        if (to_string(c) == up) return c;
    return std::nullopt;
}

const std::vector<Criterion>& all_criteria() {
    static const std::vector<Criterion> all = {Criterion::VPIC, Criterion::VDIC_M, Criterion::ELBO,
                                               Criterion::AIC,  Criterion::BIC,    Criterion::TIC,
                                               Criterion::DIC,  Criterion::DIC_M};
    return all;
}

CriterionReport vdic_m(double loglik_at_vb_mean, const SandwichSet& sw, const CriterionMeta& meta) {
    return make_report(Criterion::VDIC_M, -2.0 * loglik_at_vb_mean,
                       robust_penalty(sw, "vdic_m"), meta);
}

CriterionReport tic(double loglik_at_mle, const SandwichSet& sw, const CriterionMeta& meta) {
    return make_report(Criterion::TIC, -2.0 * loglik_at_mle, robust_penalty(sw, "tic"), meta);
}

CriterionReport vpic(double loglik_at_vb_mean, const SandwichSet& sw, const CriterionMeta& meta) {
    if (!sw.c_ok())
        throw NumericalError("vpic: h_bar near-singular, c_hat unavailable");
    const PenaltyInputs pi = penalty_inputs(sw);
    if (!pi.m_ok) throw NumericalError("vpic: -H + (-Hd) is singular");

    Eigen::LDLT<Eigen::MatrixXd> neg_h_ldlt(pi.neg_h);
    if (neg_h_ldlt.info() != Eigen::Success)
        throw NumericalError("vpic: -h_bar factorization failed");
    const double t1 = 0.5 * trace_solve(neg_h_ldlt, sw.omega);

    if ((pi.neg_hd.array() <= 0.0).any())
        throw NumericalError("vpic: -h_diag has non-positive entries, log-det undefined");
    const Eigen::VectorXd dinv_sqrt = pi.neg_hd.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd sim = dinv_sqrt.asDiagonal() * pi.neg_h * dinv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sim);
    double t2 = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i] + 1.0;
        if (!(lam > 0.0))
            throw NumericalError("vpic: log-determinant argument has eigenvalue " +
                                 std::to_string(lam) + " <= 0");
        t2 += 0.5 * std::log(lam);
    }

    const Eigen::MatrixXd& c = *sw.c_hat;
    const Eigen::MatrixXd hd_c_hd =
        pi.neg_hd.asDiagonal() * c * pi.neg_hd.asDiagonal();
    const double t3 = -0.5 * trace_solve(pi.m_ldlt, sw.omega + hd_c_hd);
    const double t4 = 0.5 * (pi.neg_hd.asDiagonal() * c).trace();

    return make_report(Criterion::VPIC, -2.0 * loglik_at_vb_mean, t1 + t2 + t3 + t4, meta);
}

CriterionReport aic(double loglik_at_mle, const CriterionMeta& meta) {
    return make_report(Criterion::AIC, -2.0 * loglik_at_mle,
                       static_cast<double>(meta.param_count), meta);
}

CriterionReport bic(double loglik_at_mle, const CriterionMeta& meta) {
    const double pen = 0.5 * meta.param_count * std::log(static_cast<double>(meta.n));
    return make_report(Criterion::BIC, -2.0 * loglik_at_mle, pen, meta);
}

CriterionReport dic(double loglik_at_post_mean, const std::vector<Eigen::VectorXd>& draws,
                    ModelKind kind, const Dataset& data, const CriterionMeta& meta) {
    if (draws.size() < 100)
        throw std::invalid_argument("dic: needs at least 100 posterior draws, got " +
                                    std::to_string(draws.size()));
    double mean_ll = 0.0;
    for (const auto& theta : draws) mean_ll += loglik(kind, data, theta);
    mean_ll /= static_cast<double>(draws.size());
    const double p_d = 2.0 * (loglik_at_post_mean - mean_ll);
    return make_report(Criterion::DIC, -2.0 * loglik_at_post_mean, p_d, meta);
}

CriterionReport dic_m(double loglik_at_post_mean, const SandwichSet& sw,
                      const Eigen::MatrixXd& post_cov, const CriterionMeta& meta) {
    if (post_cov.rows() != sw.dim() || post_cov.cols() != sw.dim())
        throw std::invalid_argument("dic_m: posterior covariance dimension mismatch");
    const double p_m = static_cast<double>(sw.n) * (sw.omega * post_cov).trace();
    return make_report(Criterion::DIC_M, -2.0 * loglik_at_post_mean, p_m, meta);
}

CriterionReport elbo_criterion(double elbo, const CriterionMeta& meta) {
    return make_report(Criterion::ELBO, -2.0 * elbo, 0.0, meta);
}

ComparisonResult compare_models(const std::vector<CriterionReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("compare_models: no reports");
    ComparisonResult out;
    out.reports = reports;
    // model index = order of first appearance; ties keep the earliest
    std::vector<std::string> model_order;
    for (const auto& r : reports)
        if (std::find(model_order.begin(), model_order.end(), r.model_id) == model_order.end())
            model_order.push_back(r.model_id);
    auto index_of = [&](const std::string& id) {
        return std::distance(model_order.begin(),
                             std::find(model_order.begin(), model_order.end(), id));
    };
    std::map<Criterion, std::pair<double, std::ptrdiff_t>> best;
    for (const auto& r : reports) {
        const auto idx = index_of(r.model_id);
        auto it = best.find(r.criterion);
        if (it == best.end() || r.value < it->second.first ||
            (r.value == it->second.first && idx < it->second.second)) {
            best[r.criterion] = {r.value, idx};
        }
    }
    for (const auto& [crit, val] : best) out.winners[crit] = model_order[val.second];
    return out;
}

}  // namespace vbcomp
