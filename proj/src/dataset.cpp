#include "vbcomp/dataset.hpp"

#include <stdexcept>

namespace vbcomp {

Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd X, std::vector<std::string> names) {
    if (y.size() < 1) throw std::invalid_argument("dataset: empty response");
    if (X.cols() < 1) throw std::invalid_argument("dataset: empty design");
    if (X.rows() != y.size())
        throw std::invalid_argument("dataset: X has " + std::to_string(X.rows()) +
                                    " rows but y has " + std::to_string(y.size()));
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols())
        throw std::invalid_argument("dataset: name count does not match column count");
    if (!y.allFinite()) throw std::invalid_argument("dataset: non-finite response entry");
    if (!X.allFinite()) throw std::invalid_argument("dataset: non-finite design entry");
    if (names.empty()) {
        names.reserve(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j));
    }
    return Dataset{std::move(y), std::move(X), std::move(names)};
}

void require_binary_response(const Dataset& data) {
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        const double v = data.y[i];
        if (v != 0.0 && v != 1.0)
            throw std::invalid_argument("probit response must be 0/1, found " +
                                        std::to_string(v) + " at row " + std::to_string(i));
    }
}

}  // namespace vbcomp
