#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vbcomp/criteria.hpp"
#include "vbcomp/errors.hpp"
#include "vbcomp/rng.hpp"
#include "vbcomp/simlab.hpp"
#include "vbcomp/vb.hpp"

using namespace vbcomp;

namespace {

// synthetic sandwich set with omega/h_bar chosen by the test
SandwichSet synth(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& h_bar, Eigen::Index n) {
    SandwichSet sw;
    sw.omega = omega;
    sw.h_bar = h_bar;
    sw.h_diag = h_bar.diagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h_bar);
    sw.c_hat = ldlt.solve(ldlt.solve(omega).transpose()).eval();
    sw.n = n;
    sw.h_rcond = 1.0;
    sw.at = Eigen::VectorXd::Zero(omega.rows());
    return sw;
}

Eigen::MatrixXd random_spd(int d, std::uint64_t seed, double ridge) {
    Rng rng(seed);
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
    return A * A.transpose() + ridge * Eigen::MatrixXd::Identity(d, d);
}

CriterionMeta meta_of(int d, Eigen::Index n) { return CriterionMeta{"M1", d, n}; }

}  // namespace

TEST_CASE("vdic_m") {
    SUBCASE("information equality collapses the penalty to d") {
        const int d = 4;
        const Eigen::MatrixXd neg_h = random_spd(d, 1, 4.0);
        const auto sw = synth(neg_h, -neg_h, 100);
        const auto r = vdic_m(-10.0, sw, meta_of(d, 100));
        CHECK(r.penalty == doctest::Approx(d).epsilon(1e-12));
        CHECK(r.value == doctest::Approx(20.0 + 2.0 * d).epsilon(1e-12));
    }
    SUBCASE("zero omega, zero penalty") {
        const auto sw = synth(Eigen::MatrixXd::Zero(3, 3), -random_spd(3, 2, 3.0), 50);
        const auto r = vdic_m(-5.0, sw, meta_of(3, 50));
        CHECK(r.penalty == 0.0);
        CHECK(r.value == r.fit_term);
    }
    SUBCASE("2x2 numeric case") {
        Eigen::MatrixXd omega(2, 2), h(2, 2);
        omega << 2.0, 0.0, 0.0, 1.0;
        h << -1.0, 0.0, 0.0, -1.0;
        const auto r = vdic_m(0.0, synth(omega, h, 10), meta_of(2, 10));
        CHECK(r.penalty == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("singular h_bar propagates") {
        SandwichSet sw = synth(Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(2, 2), 9);
        sw.c_hat.reset();
        sw.h_rcond = 0.0;
        CHECK_THROWS_AS(vdic_m(0.0, sw, meta_of(2, 9)), NumericalError);
    }
}

TEST_CASE("vpic penalty limits") {
    SUBCASE("diagonal h and information equality: 2P = d(1+ln2)") {
        const int d = 5;
        Eigen::VectorXd diag(d);
        diag << 1.0, 0.4, 2.2, 3.1, 0.9;
        const Eigen::MatrixXd neg_h = diag.asDiagonal();
        const auto sw = synth(neg_h, -neg_h, 60);
        const auto r = vpic(0.0, sw, meta_of(d, 60));
        CHECK(2.0 * r.penalty == doctest::Approx(d * (1.0 + std::log(2.0))).epsilon(1e-9));
    }
    SUBCASE("diagonal h, arbitrary PSD omega: middle terms cancel") {
        // middle terms cancel for diagonal h: 2P = d ln2 + tr[omega (-h)^-1]
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const int d = 2 + static_cast<int>(seed % 4);
            Rng rng(seed);
            Eigen::VectorXd diag(d);
            for (int j = 0; j < d; ++j) diag[j] = 0.3 + 2.0 * rng.uniform();
            const Eigen::MatrixXd omega = random_spd(d, seed * 7, 0.0);
            const auto sw = synth(omega, (-diag).asDiagonal(), 60);
            const auto r = vpic(0.0, sw, meta_of(d, 60));
            const double expect =
                d * std::log(2.0) + (omega * diag.cwiseInverse().asDiagonal()).trace();
            CHECK(2.0 * r.penalty == doctest::Approx(expect).epsilon(1e-9));
        }
    }
    SUBCASE("non-positive diagonal is an error, not an abs") {
        Eigen::MatrixXd h(2, 2);
        h << 1.0, 0.0, 0.0, -1.0;  // -h has a negative diagonal entry
        const auto sw = synth(Eigen::MatrixXd::Identity(2, 2), h, 30);
        CHECK_THROWS_AS(vpic(0.0, sw, meta_of(2, 30)), NumericalError);
    }
}

TEST_CASE("aic and tic") {
    CHECK(aic(0.0, meta_of(3, 10)).value == doctest::Approx(6.0));
    SUBCASE("tic equals aic under information equality") {
        const int d = 4;
        const Eigen::MatrixXd neg_h = random_spd(d, 3, 4.0);
        const auto sw = synth(neg_h, -neg_h, 80);
        const auto t = tic(-7.5, sw, meta_of(d, 80));
        const auto a = aic(-7.5, meta_of(d, 80));
        CHECK(t.value == doctest::Approx(a.value).epsilon(1e-9));
    }
    SUBCASE("2x2 numeric case") {
        Eigen::MatrixXd omega(2, 2), h(2, 2);
        omega << 2.0, 0.0, 0.0, 1.0;
        h << -1.0, 0.0, 0.0, -1.0;
        CHECK(tic(0.0, synth(omega, h, 10), meta_of(2, 10)).penalty ==
              doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("misspecified linear fit has a TIC penalty away from d") {
        // linear fit of the log DGP; median over seeds at n = 1e5
        std::vector<double> pens;
        for (std::uint64_t seed = 1; seed <= 9; ++seed) {
            const Dataset raw = gen_poly_data(100000, 40000 + seed);
            Eigen::MatrixXd X(raw.n(), 2);
            X.col(0).setOnes();
            X.col(1) = raw.X.col(0);
            const Dataset d = make_dataset(raw.y, X, {});
            const FitResult fit = fit_mle(ModelKind::LinearGaussian, d);
            const SandwichSet sw = build_sandwich(ModelKind::LinearGaussian, d, fit.theta);
            pens.push_back(tic(0.0, sw, meta_of(3, d.n())).penalty);
        }
        std::sort(pens.begin(), pens.end());
        CHECK(std::abs(pens[4] - 3.0) / 3.0 > 0.01);
    }
}

TEST_CASE("bic") {
    const auto r = bic(-12.0, meta_of(2, 7389));
    CHECK(r.value == doctest::Approx(24.0 + 2.0 * std::log(7389.0)).epsilon(1e-14));
    CHECK(r.value == doctest::Approx(r.fit_term + 2.0 * r.penalty).epsilon(1e-14));
}

TEST_CASE("dic") {
    const Dataset d = [] {
        Rng rng(11);
        const Eigen::Index n = 20000;
        Eigen::MatrixXd X(n, 4);
        X.col(0).setOnes();
        for (Eigen::Index i = 0; i < n; ++i)
            for (int j = 1; j < 4; ++j) X(i, j) = rng.normal();
        Eigen::VectorXd beta(4);
        beta << 1.0, -2.0, 0.5, 0.0;
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = X.row(i).dot(beta) + 1.3 * rng.normal();
        return make_dataset(y, X, {});
    }();
    const auto post = cavi_linear(d, default_linear_prior(4));
    const Eigen::VectorXd theta = vb_mean(post);
    const double ll = loglik(ModelKind::LinearGaussian, d, theta);
    const auto meta = meta_of(5, d.n());

    SUBCASE("degenerate draws give a zero penalty") {
        std::vector<Eigen::VectorXd> draws(150, theta);
        const auto r = dic(ll, draws, ModelKind::LinearGaussian, d, meta);
        // zero up to accumulation noise over 150 identical loglik values
        CHECK(std::abs(r.penalty) < 1e-8);
    }
    SUBCASE("conjugate large-n penalty approaches the parameter count") {
        const auto draws = sample_vb_posterior(post, 10000, 77);
        const auto r = dic(ll, draws, ModelKind::LinearGaussian, d, meta);
        CHECK(std::abs(r.penalty - 5.0) / 5.0 < 0.1);

        // DIC_M sits next to VDIC_M on the same fit
        const SandwichSet sw = build_sandwich(ModelKind::LinearGaussian, d, theta);
        const auto rm = dic_m(ll, sw, vb_post_cov(post), meta);
        const auto rv = vdic_m(ll, sw, meta);
        CHECK(std::abs(rm.penalty - rv.penalty) < 0.5);
    }
    SUBCASE("draw-count monte carlo error is small at 1e4 draws") {
        std::vector<double> pds;
        for (std::uint64_t s = 1; s <= 6; ++s) {
            const auto draws = sample_vb_posterior(post, 10000, 1000 + s);
            pds.push_back(dic(ll, draws, ModelKind::LinearGaussian, d, meta).penalty);
        }
        double mean = 0.0, ss = 0.0;
        for (double v : pds) mean += v;
        mean /= pds.size();
        for (double v : pds) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (pds.size() - 1));
        CHECK(sd < 0.02 * mean);
    }
    SUBCASE("fewer than 100 draws rejected") {
        std::vector<Eigen::VectorXd> draws(99, theta);
        CHECK_THROWS_AS(dic(ll, draws, ModelKind::LinearGaussian, d, meta),
                        std::invalid_argument);
    }
}

TEST_CASE("dic_m") {
    SUBCASE("posterior covariance (n(-h))^-1 under information equality gives d") {
        const int d = 4;
        const Eigen::MatrixXd neg_h = random_spd(d, 5, 4.0);
        const auto sw = synth(neg_h, -neg_h, 200);
        const Eigen::MatrixXd post_cov = neg_h.inverse() / 200.0;
        const auto r = dic_m(0.0, sw, post_cov, meta_of(d, 200));
        CHECK(r.penalty == doctest::Approx(d).epsilon(1e-10));
    }
    SUBCASE("2x2 hand matrices") {
        Eigen::MatrixXd omega(2, 2), h(2, 2), cov(2, 2);
        omega << 2.0, 0.0, 0.0, 1.0;
        h << -1.0, 0.0, 0.0, -1.0;
        cov << 0.1, 0.0, 0.0, 0.2;
        // 50 * tr(omega cov) = 50 * (0.2 + 0.2)
        const auto r = dic_m(0.0, synth(omega, h, 50), cov, meta_of(2, 50));
        CHECK(r.penalty == doctest::Approx(20.0).epsilon(1e-13));
    }
    SUBCASE("dimension mismatch") {
        const auto sw = synth(Eigen::MatrixXd::Identity(2, 2),
                              -Eigen::MatrixXd::Identity(2, 2), 10);
        CHECK_THROWS_AS(dic_m(0.0, sw, Eigen::MatrixXd::Identity(3, 3), meta_of(2, 10)),
                        std::invalid_argument);
    }
}

TEST_CASE("elbo_criterion") {
    CHECK(elbo_criterion(0.0, meta_of(1, 10)).value == 0.0);
    CHECK(elbo_criterion(-5.0, meta_of(1, 10)).value == 10.0);
    // ranking by value is ranking by -elbo
    std::vector<double> elbos = {-3.0, 1.5, 0.25, -0.25};
    std::vector<CriterionReport> reports;
    for (std::size_t i = 0; i < elbos.size(); ++i)
        reports.push_back(elbo_criterion(elbos[i], CriterionMeta{"M" + std::to_string(i + 1), 1, 10}));
    const auto cmp = compare_models(reports);
    CHECK(cmp.winners.at(Criterion::ELBO) == "M2");  // max elbo
}

TEST_CASE("compare_models") {
    SUBCASE("single model wins every criterion") {
        std::vector<CriterionReport> reports;
        reports.push_back(aic(-1.0, meta_of(2, 10)));
        reports.push_back(bic(-1.0, meta_of(2, 10)));
        const auto cmp = compare_models(reports);
        CHECK(cmp.winners.at(Criterion::AIC) == "M1");
        CHECK(cmp.winners.at(Criterion::BIC) == "M1");
    }
    SUBCASE("ties break toward the lower model index") {
        std::vector<CriterionReport> reports;
        reports.push_back(aic(-1.0, CriterionMeta{"A", 2, 10}));
        reports.push_back(aic(-1.0, CriterionMeta{"B", 2, 10}));
        CHECK(compare_models(reports).winners.at(Criterion::AIC) == "A");
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(compare_models({}), std::invalid_argument);
    }
    SUBCASE("scaling every value by a positive constant keeps all winners") {
        Rng rng(23);
        std::vector<CriterionReport> reports;
        for (int m = 0; m < 4; ++m)
            for (Criterion c : {Criterion::AIC, Criterion::VPIC, Criterion::ELBO}) {
                CriterionReport r;
                r.criterion = c;
                r.model_id = "M" + std::to_string(m + 1);
                r.value = rng.normal();
                reports.push_back(r);
            }
        const auto w1 = compare_models(reports).winners;
        for (auto& r : reports) r.value *= 37.5;
        const auto w2 = compare_models(reports).winners;
        CHECK(w1 == w2);
    }
}

TEST_CASE("nested linear candidates: the data-generating model wins the new criteria") {
    // two nested candidates where the larger one is the DGP
    int wins_vpic = 0, wins_vdicm = 0;
    const int seeds = 20;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        Rng rng(seed * 31);
        const Eigen::Index n = 10000;
        Eigen::MatrixXd X(n, 3);
        X.col(0).setOnes();
        for (Eigen::Index i = 0; i < n; ++i) {
            X(i, 1) = rng.normal();
            X(i, 2) = rng.normal();
        }
        Eigen::VectorXd beta(3);
        beta << 0.3, -0.5, 0.25;
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = X.row(i).dot(beta) + rng.normal();

        std::vector<CriterionReport> reports;
        for (int m = 0; m < 2; ++m) {
            const Eigen::MatrixXd Xm = m == 0 ? X.leftCols(2) : X;
            const Dataset d = make_dataset(y, Xm, {});
            const auto post = cavi_linear(d, default_linear_prior(Xm.cols()));
            const Eigen::VectorXd theta = vb_mean(post);
            const double ll = loglik(ModelKind::LinearGaussian, d, theta);
            const SandwichSet sw = build_sandwich(ModelKind::LinearGaussian, d, theta);
            const CriterionMeta meta{"M" + std::to_string(m + 1),
                                     static_cast<int>(Xm.cols()) + 1, n};
            reports.push_back(vpic(ll, sw, meta));
            reports.push_back(vdic_m(ll, sw, meta));
        }
        const auto cmp = compare_models(reports);
        wins_vpic += cmp.winners.at(Criterion::VPIC) == "M2";
        wins_vdicm += cmp.winners.at(Criterion::VDIC_M) == "M2";
    }
    CHECK(wins_vpic > seeds / 2);
    CHECK(wins_vdicm > seeds / 2);
}

TEST_CASE("penalties are invariant to observation permutation") {
    const Dataset d = gen_probit_data(300, 77);
    const auto post = cavi_probit(d, default_probit_prior(4));
    const Eigen::VectorXd theta = vb_mean(post);
    const double ll = loglik(ModelKind::Probit, d, theta);
    const SandwichSet sw1 = build_sandwich(ModelKind::Probit, d, theta);

    Eigen::VectorXd y2(d.n());
    Eigen::MatrixXd X2(d.n(), d.p());
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        y2[i] = d.y[d.n() - 1 - i];
        X2.row(i) = d.X.row(d.n() - 1 - i);
    }
    const SandwichSet sw2 =
        build_sandwich(ModelKind::Probit, make_dataset(y2, X2, d.names), theta);
    const auto meta = CriterionMeta{"M", 4, d.n()};
    CHECK(vpic(ll, sw1, meta).penalty == doctest::Approx(vpic(ll, sw2, meta).penalty).epsilon(1e-12));
    CHECK(vdic_m(ll, sw1, meta).penalty ==
          doctest::Approx(vdic_m(ll, sw2, meta).penalty).epsilon(1e-12));
}
