#include <CLI11.hpp>
#include <atomic>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "vbcomp/csv.hpp"
#include "vbcomp/errors.hpp"
#include "vbcomp/evaluate.hpp"
#include "vbcomp/report.hpp"
#include "vbcomp/simlab.hpp"

namespace {

using nlohmann::json;
using namespace vbcomp;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;
constexpr int exit_partial = 4;

struct CommonFlags {
    std::string model;
    std::string data_path;
    std::string response;
    std::string features;     // comma separated
    std::string config_path;  // declarative candidates for compare
    double prior_scale = 1e5;
    double a = 1.0;
    double b = 1.0;
    long long n = 500;
    int reps = 1;
    std::uint64_t seed = 1;
    std::string criteria;
    std::string rule = "lnn";
    int workers = 0;
    std::string out = "-";
    std::string format = "text";
    bool intercept = false;
};

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<Criterion> parse_criteria(const std::string& list,
                                      const std::vector<Criterion>& fallback) {
    if (list.empty()) return fallback;
    std::vector<Criterion> out;
    for (const auto& name : split_csv_list(list)) {
        const auto c = criterion_from_string(name);
        if (!c) throw std::invalid_argument("--criteria: unknown criterion '" + name + "'");
        out.push_back(*c);
    }
    if (out.empty()) throw std::invalid_argument("--criteria: empty criterion list");
    return out;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path == "-" || out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write output file '" + out_path + "'");
    out << text;
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "linear") return ModelKind::LinearGaussian;
    if (name == "probit") return ModelKind::Probit;
    throw std::invalid_argument("--model: expected linear|probit, got '" + name + "'");
}

int cmd_fit(const CommonFlags& flags) {
    const ModelKind kind = parse_model_kind(flags.model);
    const Dataset data = load_csv(flags.data_path, flags.response,
                                  split_csv_list(flags.features), flags.intercept);
    const OutputFormat fmt = format_from_string(flags.format);
    PosteriorReport rep;
    if (kind == ModelKind::LinearGaussian) {
        const auto post = cavi_linear(data, default_linear_prior(data.p(), flags.prior_scale,
                                                                 flags.a, flags.b));
        rep = summarize(post, data);
    } else {
        const auto post = cavi_probit(data, default_probit_prior(data.p(), flags.prior_scale));
        rep = summarize(post, data);
    }
    write_output(flags.out, render(rep, fmt));
    return exit_ok;
}

Candidate make_candidate(const std::string& id, ModelKind kind, const std::string& data_path,
                         const std::string& response, const std::vector<std::string>& features,
                         bool intercept, double scale, double a, double b) {
    Candidate c;
    c.model_id = id;
    c.kind = kind;
    const Dataset sub = load_csv(data_path, response, features, intercept);
    c.X = sub.X;
    c.names = sub.names;
    if (kind == ModelKind::LinearGaussian)
        c.prior = default_linear_prior(sub.p(), scale, a, b);
    else
        c.prior = default_probit_prior(sub.p(), scale);
    return c;
}

int cmd_compare(const CommonFlags& flags) {
    std::string response = flags.response;
    std::string data_path = flags.data_path;
    std::vector<Candidate> cands;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw std::invalid_argument("cannot open config '" + flags.config_path + "'");
        const json cfg = json::parse(in);
        // flags override config-file settings
        if (cfg.contains("data") && data_path.empty()) data_path = cfg["data"].get<std::string>();
        if (cfg.contains("response") && response.empty())
            response = cfg["response"].get<std::string>();
        for (const auto& jc : cfg.at("candidates")) {
            const json prior = jc.value("prior", json::object());
            const std::string id = jc.at("model_id").get<std::string>();
            // criterion values are only comparable over one response vector
            const std::string cand_response = jc.value("response", response);
            if (cand_response != response)
                throw std::invalid_argument("compare: candidate '" + id + "' names response '" +
                                            cand_response + "' but the run uses '" + response +
                                            "'; candidates must share the response column");
            cands.push_back(make_candidate(
                id, parse_model_kind(jc.at("kind").get<std::string>()), data_path, response,
                jc.at("features").get<std::vector<std::string>>(), jc.value("intercept", false),
                prior.value("scale", flags.prior_scale), prior.value("a", flags.a),
                prior.value("b", flags.b)));
        }
    } else {
        cands.push_back(make_candidate("M1", parse_model_kind(flags.model), data_path, response,
                                       split_csv_list(flags.features), flags.intercept,
                                       flags.prior_scale, flags.a, flags.b));
    }
    if (cands.empty()) throw std::invalid_argument("compare: no candidates");

    // response vector shared by all candidates (dummy intercept design)
    const Dataset base = load_csv(data_path, response, {}, true);
    EvalOptions opts;
    opts.criteria = parse_criteria(flags.criteria, all_criteria());
    opts.seed = flags.seed;

    // candidates fit on the worker pool; evaluations merge by index
    std::vector<CandidateEval> evals(cands.size());
    {
        const int pool = std::min<int>(resolve_workers(flags.workers),
                                       static_cast<int>(cands.size()));
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cands.size()) return;
                evals[i] = evaluate_candidate(base.y, cands[i], opts);
            }
        };
        if (pool <= 1) {
            work();
        } else {
            std::vector<std::thread> threads;
            for (int t = 0; t < pool; ++t) threads.emplace_back(work);
            for (auto& t : threads) t.join();
        }
    }
    std::vector<CriterionReport> reports;
    std::vector<FailedCandidate> failed;
    for (const auto& ev : evals) {
        if (!ev.ok) {
            failed.push_back({ev.model_id, ev.error});
            continue;
        }
        reports.insert(reports.end(), ev.reports.begin(), ev.reports.end());
    }
    if (reports.empty())
        throw NumericalError("compare: every candidate failed" +
                             (failed.empty() ? "" : ("; first: " + failed.front().error)));
    const ComparisonResult cmp = compare_models(reports);
    write_output(flags.out, render(cmp, failed, format_from_string(flags.format)));
    return failed.empty() ? exit_ok : exit_partial;
}

int cmd_simulate(const CommonFlags& flags) {
    ExperimentResult res;
    if (flags.model == "poly") {
        PolyExperimentConfig cfg;
        cfg.n = static_cast<Eigen::Index>(flags.n);
        cfg.reps = flags.reps;
        cfg.seed = flags.seed;
        cfg.workers = flags.workers;
        cfg.prior_scale = flags.prior_scale;
        cfg.prior_a = flags.a;
        cfg.prior_b = flags.b;
        if (flags.rule == "lnn")
            cfg.max_order_rule = OrderRule::FloorLnN;
        else if (flags.rule == "lnn34")
            cfg.max_order_rule = OrderRule::FloorLnN34;
        else
            throw std::invalid_argument("--rule: expected lnn|lnn34");
        cfg.criteria = parse_criteria(flags.criteria, experiment_criteria());
        res = run_experiment(cfg);
    } else if (flags.model == "probit") {
        ProbitExperimentConfig cfg;
        cfg.n = static_cast<Eigen::Index>(flags.n);
        cfg.reps = flags.reps;
        cfg.seed = flags.seed;
        cfg.workers = flags.workers;
        cfg.prior_scale = flags.prior_scale;
        cfg.criteria = parse_criteria(flags.criteria, experiment_criteria());
        res = run_experiment(cfg);
    } else {
        throw std::invalid_argument("--model: expected poly|probit for simulate");
    }
    write_output(flags.out, render(res, format_from_string(flags.format)));
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational Bayes model comparison: CAVI fits and predictive "
                 "information criteria for linear and probit regression"};
    app.require_subcommand(1);
    CommonFlags flags;

    auto add_common = [&](CLI::App* cmd, bool with_data) {
        if (with_data) {
            cmd->add_option("--data", flags.data_path, "input CSV path");
            cmd->add_option("--response", flags.response, "response column name");
            cmd->add_option("--features", flags.features, "comma-separated feature columns");
            cmd->add_flag("--intercept", flags.intercept, "prepend a column of ones");
        }
        cmd->add_option("--model", flags.model, "model / experiment name");
        cmd->add_option("--prior-scale", flags.prior_scale, "prior covariance scale (V = s*I)");
        cmd->add_option("--a", flags.a, "gamma prior shape (linear)");
        cmd->add_option("--b", flags.b, "gamma prior rate (linear)");
        cmd->add_option("--seed", flags.seed, "base RNG seed");
        cmd->add_option("--criteria", flags.criteria, "comma-separated criterion subset");
        cmd->add_option("--workers", flags.workers,
                        "parallel worker count (default: VBCOMP_WORKERS or all cores)");
        cmd->add_option("--out", flags.out, "output path, - for stdout");
        cmd->add_option("--format", flags.format, "text|csv|json");
    };

    CLI::App* fit = app.add_subcommand("fit", "fit one VB posterior and report it");
    add_common(fit, true);

    CLI::App* compare = app.add_subcommand("compare", "criteria table across candidate models");
    add_common(compare, true);
    compare->add_option("--config", flags.config_path, "JSON candidate-set file");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo model-selection experiment");
    add_common(simulate, false);
    simulate->add_option("--n", flags.n, "sample size per replication");
    simulate->add_option("--reps", flags.reps, "replication count");
    simulate->add_option("--rule", flags.rule, "poly candidate-order rule: lnn|lnn34");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints message/help
        return e.get_exit_code() == 0 ? exit_ok : exit_usage;
    }

    try {
        if (fit->parsed()) return cmd_fit(flags);
        if (compare->parsed()) return cmd_compare(flags);
        return cmd_simulate(flags);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}
