#include "vbcomp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vbcomp {

using nlohmann::json;

OutputFormat format_from_string(const std::string& name) {
    if (name == "text") return OutputFormat::Text;
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown format '" + name + "' (text|csv|json)");
}

std::string format_number(double v, bool machine) {
    char buf[40];
    std::snprintf(buf, sizeof buf, machine ? "%.17g" : "%.5g", v);
    return buf;
}

PosteriorReport summarize(const LinearVBPosterior& post, const Dataset& data) {
    PosteriorReport rep;
    rep.model = "linear";
    rep.n = data.n();
    rep.p = data.p();
    rep.names = data.names;
    rep.mu_beta = post.mu_beta;
    rep.beta_variances = post.V_beta.diagonal();
    rep.a_h = post.a_h;
    rep.b_h = post.b_h;
    rep.elbo = post.elbo;
    rep.iterations = post.iters;
    return rep;
}

PosteriorReport summarize(const ProbitVBPosterior& post, const Dataset& data) {
    PosteriorReport rep;
    rep.model = "probit";
    rep.n = data.n();
    rep.p = data.p();
    rep.names = data.names;
    rep.mu_beta = post.mu_beta;
    rep.beta_variances = post.Sigma_beta.diagonal();
    rep.elbo = post.elbo;
    rep.iterations = post.iters;
    return rep;
}

json make_meta(const std::string& command) {
    return json{{"tool", "vbcomp"}, {"schema_version", "1"}, {"command", command}};
}

json to_json(const PosteriorReport& rep) {
    json coef = json::array();
    for (Eigen::Index j = 0; j < rep.mu_beta.size(); ++j) {
        coef.push_back(json{{"name", rep.names[j]},
                            {"mean", rep.mu_beta[j]},
                            {"variance", rep.beta_variances[j]}});
    }
    json post{{"kind", "posterior"},
              {"model", rep.model},
              {"n", rep.n},
              {"p", rep.p},
              {"coefficients", coef},
              {"elbo", rep.elbo},
              {"iterations", rep.iterations}};
    if (rep.model == "linear") {
        post["a_h"] = rep.a_h;
        post["b_h"] = rep.b_h;
    }
    return json{{"meta", make_meta("fit")}, {"reports", json::array({post})}};
}

json to_json(const ComparisonResult& cmp, const std::vector<FailedCandidate>& failed) {
    json rows = json::array();
    for (const auto& r : cmp.reports) {
        rows.push_back(json{{"model", r.model_id},
                            {"criterion", to_string(r.criterion)},
                            {"fit", r.fit_term},
                            {"penalty", r.penalty},
                            {"value", r.value}});
    }
    json winners = json::object();
    for (const auto& [c, id] : cmp.winners) winners[to_string(c)] = id;
    json fail = json::array();
    for (const auto& f : failed) fail.push_back(json{{"model", f.model_id}, {"error", f.error}});
    return json{{"meta", make_meta("compare")},
                {"reports", rows},
                {"winners", winners},
                {"failed", fail}};
}

json to_json(const ExperimentResult& res) {
    json freq = json::object();
    for (const auto& [c, hist] : res.freq) freq[to_string(c)] = hist;
    json avg = json::object();
    for (const auto& [c, v] : res.avg_k) avg[to_string(c)] = v;
    json risks = json::object();
    for (const auto& [label, est] : res.risks)
        risks[label] = json{{"raw", est.raw}, {"scaled", est.scaled}, {"se", est.se}};
    return json{{"meta", make_meta("simulate")},
                {"experiment",
                 json{{"name", res.experiment},
                      {"n", res.n},
                      {"reps", res.reps},
                      {"candidates", res.candidate_count},
                      {"failures", res.failures},
                      {"note", res.note},
                      {"freq", freq},
                      {"avg_k", avg},
                      {"risks", risks}}}};
}

namespace {

// minimal aligned-table writer
std::string table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t j = 0; j < row.size(); ++j)
            width[j] = std::max(width[j], row[j].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << row[j];
            if (j + 1 < row.size()) out << std::string(width[j] - row[j].size() + 2, ' ');
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string render(const PosteriorReport& rep, OutputFormat fmt) {
    if (fmt == OutputFormat::Json) return to_json(rep).dump(2) + "\n";
    if (fmt == OutputFormat::Csv) {
        std::ostringstream out;
        out << "name,mean,variance\n";
        for (Eigen::Index j = 0; j < rep.mu_beta.size(); ++j)
            out << rep.names[j] << ',' << format_number(rep.mu_beta[j], true) << ','
                << format_number(rep.beta_variances[j], true) << '\n';
        out << "elbo," << format_number(rep.elbo, true) << ",\n";
        if (rep.model == "linear") {
            out << "a_h," << format_number(rep.a_h, true) << ",\n";
            out << "b_h," << format_number(rep.b_h, true) << ",\n";
        }
        out << "iterations," << rep.iterations << ",\n";
        return out.str();
    }
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"coefficient", "mean", "variance"});
    for (Eigen::Index j = 0; j < rep.mu_beta.size(); ++j)
        rows.push_back({rep.names[j], format_number(rep.mu_beta[j], false),
                        format_number(rep.beta_variances[j], false)});
    std::ostringstream out;
    out << rep.model << " VB posterior, n = " << rep.n << ", p = " << rep.p << "\n";
    out << table(rows);
    if (rep.model == "linear")
        out << "h ~ Gamma(a = " << format_number(rep.a_h, false)
            << ", b = " << format_number(rep.b_h, false)
            << "), mean " << format_number(rep.a_h / rep.b_h, false) << "\n";
    out << "ELBO " << format_number(rep.elbo, false) << ", " << rep.iterations << " iterations\n";
    return out.str();
}

std::string render(const ComparisonResult& cmp, const std::vector<FailedCandidate>& failed,
                   OutputFormat fmt) {
    if (fmt == OutputFormat::Json) return to_json(cmp, failed).dump(2) + "\n";
    if (fmt == OutputFormat::Csv) {
        std::ostringstream out;
        out << "model,criterion,fit,penalty,value\n";
        for (const auto& r : cmp.reports)
            out << r.model_id << ',' << to_string(r.criterion) << ','
                << format_number(r.fit_term, true) << ',' << format_number(r.penalty, true) << ','
                << format_number(r.value, true) << '\n';
        return out.str();
    }
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"model", "criterion", "fit", "penalty", "value"});
    for (const auto& r : cmp.reports)
        rows.push_back({r.model_id, to_string(r.criterion), format_number(r.fit_term, false),
                        format_number(r.penalty, false), format_number(r.value, false)});
    std::ostringstream out;
    out << table(rows);
    for (const auto& [c, id] : cmp.winners) out << "winner[" << to_string(c) << "] = " << id << "\n";
    for (const auto& f : failed) out << "failed[" << f.model_id << "]: " << f.error << "\n";
    return out.str();
}

std::string render(const ExperimentResult& res, OutputFormat fmt) {
    if (fmt == OutputFormat::Json) return to_json(res).dump(2) + "\n";
    if (fmt == OutputFormat::Csv) {
        std::ostringstream out;
        out << "table,key,model,value\n";
        for (const auto& [c, hist] : res.freq)
            for (std::size_t k = 0; k < hist.size(); ++k)
                out << "freq," << to_string(c) << ",M" << (k + 1) << ',' << hist[k] << '\n';
        for (const auto& [c, v] : res.avg_k)
            out << "avg_k," << to_string(c) << ",," << format_number(v, true) << '\n';
        for (const auto& [label, est] : res.risks) {
            out << "risk_raw," << label << ",," << format_number(est.raw, true) << '\n';
            out << "risk_scaled," << label << ",," << format_number(est.scaled, true) << '\n';
            out << "risk_se," << label << ",," << format_number(est.se, true) << '\n';
        }
        return out.str();
    }
    std::ostringstream out;
    out << res.experiment << " experiment: n = " << res.n << ", reps = " << res.reps
        << ", candidates = " << res.candidate_count << ", failures = " << res.failures << "\n";
    out << res.note << "\n\n";
    std::vector<std::vector<std::string>> fr;
    std::vector<std::string> head{"criterion"};
    for (int k = 1; k <= res.candidate_count; ++k) head.push_back("M" + std::to_string(k));
    head.push_back("avg_k");
    fr.push_back(head);
    for (const auto& [c, hist] : res.freq) {
        std::vector<std::string> row{to_string(c)};
        for (int v : hist) row.push_back(std::to_string(v));
        row.push_back(format_number(res.avg_k.at(c), false));
        fr.push_back(row);
    }
    out << "selection frequencies\n" << table(fr) << "\n";
    if (!res.risks.empty()) {
        std::vector<std::vector<std::string>> rr;
        rr.push_back({"label", "risk", "scaled", "se"});
        for (const auto& [label, est] : res.risks)
            rr.push_back({label, format_number(est.raw, false), format_number(est.scaled, false),
                          format_number(est.se, false)});
        out << "estimated risks\n" << table(rr);
    }
    return out.str();
}

}  // namespace vbcomp
