#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "vbcomp/criteria.hpp"
#include "vbcomp/simlab.hpp"
#include "vbcomp/vb.hpp"

namespace vbcomp {

enum class OutputFormat { Text, Csv, Json };

OutputFormat format_from_string(const std::string& name);

// Shared fit-report payload for cmd_fit.
struct PosteriorReport {
    std::string model;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    std::vector<std::string> names;
    Eigen::VectorXd mu_beta;
    Eigen::VectorXd beta_variances;
    double a_h = 0.0;   // linear only
    double b_h = 0.0;
    double elbo = 0.0;
    int iterations = 0;
};

PosteriorReport summarize(const LinearVBPosterior& post, const Dataset& data);
PosteriorReport summarize(const ProbitVBPosterior& post, const Dataset& data);

struct FailedCandidate {
    std::string model_id;
    std::string error;
};

// meta carried on every machine report; schema_version pins the JSON layout.
nlohmann::json make_meta(const std::string& command);

nlohmann::json to_json(const PosteriorReport& rep);
nlohmann::json to_json(const ComparisonResult& cmp, const std::vector<FailedCandidate>& failed);
nlohmann::json to_json(const ExperimentResult& res);

std::string render(const PosteriorReport& rep, OutputFormat fmt);
std::string render(const ComparisonResult& cmp, const std::vector<FailedCandidate>& failed,
                   OutputFormat fmt);
std::string render(const ExperimentResult& res, OutputFormat fmt);

// Machine formats print 17 significant digits, human tables 5.
std::string format_number(double v, bool machine);

}  // namespace vbcomp
