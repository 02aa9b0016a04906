#include "vbcomp/csv.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vbcomp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    // allow trailing whitespace only
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (cell.empty() || pos != cell.size())
        throw std::invalid_argument("csv: non-numeric cell '" + cell + "' at data row " +
                                    std::to_string(row) + ", column '" + column + "'");
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& features, bool add_intercept) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_line(line);

    auto column_index = [&](const std::string& name) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw std::invalid_argument("csv: column '" + name + "' not found in '" + path + "'");
    };
    const std::size_t y_idx = column_index(response);
    std::vector<std::size_t> f_idx;
    f_idx.reserve(features.size());
    for (const auto& f : features) f_idx.push_back(column_index(f));

    std::vector<double> ys;
    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("csv: data row " + std::to_string(row) + " has " +
                                        std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(header.size()));
        ys.push_back(parse_cell(cells[y_idx], row, response));
        std::vector<double> r;
        r.reserve(f_idx.size());
        for (std::size_t j = 0; j < f_idx.size(); ++j)
            r.push_back(parse_cell(cells[f_idx[j]], row, features[j]));
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::invalid_argument("csv: no data rows in '" + path + "'");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index p = static_cast<Eigen::Index>(features.size()) + (add_intercept ? 1 : 0);
    Eigen::VectorXd y(n);
    Eigen::MatrixXd X(n, p);
    std::vector<std::string> names;
    if (add_intercept) names.push_back("const");
    names.insert(names.end(), features.begin(), features.end());
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = ys[i];
        Eigen::Index j0 = 0;
        if (add_intercept) X(i, j0++) = 1.0;
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            X(i, j0 + static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return make_dataset(std::move(y), std::move(X), std::move(names));
}

void save_csv(const std::string& path, const Dataset& data, const std::string& response_name) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("csv: cannot write '" + path + "'");
    out << response_name;
    for (const auto& name : data.names) out << ',' << name;
    out << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", data.y[i]);
        out << buf;
        for (Eigen::Index j = 0; j < data.p(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.X(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace vbcomp
