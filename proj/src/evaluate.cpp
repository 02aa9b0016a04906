#include "vbcomp/evaluate.hpp"

#include <algorithm>

#include "vbcomp/errors.hpp"
#include "vbcomp/sandwich.hpp"

namespace vbcomp {

namespace {

bool wants(const std::vector<Criterion>& set, Criterion c) {
    return std::find(set.begin(), set.end(), c) != set.end();
}

}  // namespace

CandidateEval evaluate_candidate(const Eigen::VectorXd& y, const Candidate& cand,
                                 const EvalOptions& opts) {
    CandidateEval out;
    out.model_id = cand.model_id;
    try {
        const Dataset data = make_dataset(y, cand.X, cand.names);
        CriterionMeta meta{cand.model_id, static_cast<int>(param_dim(cand.kind, data.p())),
                           data.n()};

        double elbo = 0.0;
        Eigen::VectorXd theta_vb;
        Eigen::MatrixXd post_cov;
        std::vector<Eigen::VectorXd> draws;
        if (cand.kind == ModelKind::LinearGaussian) {
            const auto post = cavi_linear(data, std::get<LinearPrior>(cand.prior), opts.cavi);
            elbo = post.elbo;
            theta_vb = vb_mean(post);
            post_cov = vb_post_cov(post);
            out.cavi_iters = post.iters;
            if (wants(opts.criteria, Criterion::DIC))
                draws = sample_vb_posterior(post, opts.dic_draws, opts.seed);
        } else {
            const auto post = cavi_probit(data, std::get<ProbitPrior>(cand.prior), opts.cavi);
            elbo = post.elbo;
            theta_vb = vb_mean(post);
            post_cov = vb_post_cov(post);
            out.cavi_iters = post.iters;
            if (wants(opts.criteria, Criterion::DIC))
                draws = sample_vb_posterior(post, opts.dic_draws, opts.seed);
        }
        out.theta_vb = theta_vb;
        out.elbo = elbo;
        out.loglik_vb = loglik(cand.kind, data, theta_vb);

        const bool need_vb_sandwich =
            wants(opts.criteria, Criterion::VPIC) || wants(opts.criteria, Criterion::VDIC_M) ||
            wants(opts.criteria, Criterion::DIC_M);
        SandwichSet sw_vb;
        if (need_vb_sandwich) sw_vb = build_sandwich(cand.kind, data, theta_vb);

        const bool need_mle = wants(opts.criteria, Criterion::AIC) ||
                              wants(opts.criteria, Criterion::BIC) ||
                              wants(opts.criteria, Criterion::TIC);
        double ll_mle = 0.0;
        Eigen::VectorXd theta_mle;
        if (need_mle) {
            const FitResult fit = fit_mle(cand.kind, data, opts.mle);
            if (!fit.converged) throw NumericalError(fit.message.empty() ? "MLE did not converge"
                                                                         : fit.message);
            theta_mle = fit.theta;
            ll_mle = loglik(cand.kind, data, theta_mle);
        }

        for (Criterion c : opts.criteria) {
            switch (c) {
                case Criterion::VPIC:
                    out.reports.push_back(vpic(out.loglik_vb, sw_vb, meta));
                    break;
                case Criterion::VDIC_M:
                    out.reports.push_back(vdic_m(out.loglik_vb, sw_vb, meta));
                    break;
                case Criterion::ELBO:
                    out.reports.push_back(elbo_criterion(elbo, meta));
                    break;
                case Criterion::AIC:
                    out.reports.push_back(aic(ll_mle, meta));
                    break;
                case Criterion::BIC:
                    out.reports.push_back(bic(ll_mle, meta));
                    break;
                case Criterion::TIC: {
                    const SandwichSet sw_mle = build_sandwich(cand.kind, data, theta_mle);
                    out.reports.push_back(tic(ll_mle, sw_mle, meta));
                    break;
                }
                case Criterion::DIC:
                    out.reports.push_back(dic(out.loglik_vb, draws, cand.kind, data, meta));
                    break;
                case Criterion::DIC_M:
                    out.reports.push_back(dic_m(out.loglik_vb, sw_vb, post_cov, meta));
                    break;
            }
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        out.reports.clear();
    }
    return out;
}

}  // namespace vbcomp
