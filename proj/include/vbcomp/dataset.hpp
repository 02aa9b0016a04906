#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vbcomp {

// The only carrier of observations: response, design matrix, column labels.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<std::string> names;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index p() const { return X.cols(); }
};

// Validates and returns the dataset: n >= 1, p >= 1, matching dimensions,
// all entries finite. Throws std::invalid_argument on violation.
Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd X, std::vector<std::string> names);

// Throws std::invalid_argument unless every y[i] is exactly 0 or 1.
void require_binary_response(const Dataset& data);

}  // namespace vbcomp
