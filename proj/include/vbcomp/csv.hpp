#pragma once

#include <string>
#include <vector>

#include "vbcomp/dataset.hpp"

namespace vbcomp {

// Header row, comma delimiter, '.' decimal point, no quoting of numerics.
// Selects the response and feature columns by name; when add_intercept is
// set, a leading column of ones named "const" is prepended. Missing columns
// and non-numeric cells are reported with row/column context.
Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& features, bool add_intercept = false);

// 17 significant digits, enough for bit-exact reload.
void save_csv(const std::string& path, const Dataset& data, const std::string& response_name);

}  // namespace vbcomp
