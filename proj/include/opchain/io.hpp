#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "opchain/driving.hpp"

namespace opchain {

using json = nlohmann::json;

// Malformed input. `location` is "line L, column C" for syntax errors and a JSON pointer otherwise.
struct InputError : std::invalid_argument {
    std::string location;
    InputError(const std::string& what, std::string loc)
        : std::invalid_argument(what + " at " + loc), location(std::move(loc)) {}
};

// {"dims": [rows, cols], "data": [[re, im], ...]} in row-major order.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, const std::string& where = "");

json law_to_json(const GeneralizedLaw& law);
GeneralizedLaw law_from_json(const json& j, const std::string& where = "");

json driving_to_json(const StepDriving& dr);
StepDriving driving_from_json(const json& j, const std::string& where = "");

json parse_json_text(const std::string& text);
json load_json(const std::string& path);
StepDriving load_driving(const std::string& path);
Mat load_matrix(const std::string& path);
// {"name": matrix, ...}
std::map<std::string, Mat> load_named_matrices(const std::string& path);

void write_text(const std::string& path, const std::string& text);

}  // namespace opchain
