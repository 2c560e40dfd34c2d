#include "opchain/io.hpp"

#include <fstream>
#include <sstream>

namespace opchain {

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& where) {
    throw InputError(what, where.empty() ? std::string("/") : where);
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail("expected an object", where);
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field \"") + key + "\"", where);
    return *it;
}

int int_field(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer()) fail("expected an integer", where + "/" + key);
    return v.get<int>();
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail("expected a number", where);
    return v.get<double>();
}

}  // namespace

json matrix_to_json(const Mat& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
    return json{{"dims", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

Mat matrix_from_json(const json& j, const std::string& where) {
    const json& dims = field(j, "dims", where);
    if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_integer() || !dims[1].is_number_integer())
        fail("\"dims\" must be [rows, cols]", where + "/dims");
    const long r = dims[0].get<long>(), c = dims[1].get<long>();
    if (r < 0 || c < 0) fail("negative dimension", where + "/dims");
    const json& data = field(j, "data", where);
    if (!data.is_array() || static_cast<long>(data.size()) != r * c) {
        std::ostringstream os;
        os << "\"data\" must hold " << r * c << " [re, im] pairs";
        fail(os.str(), where + "/data");
    }
    Mat m(r, c);
    for (long i = 0; i < r * c; ++i) {
        const std::string at = where + "/data/" + std::to_string(i);
        const json& e = data[i];
        if (!e.is_array() || e.size() != 2) fail("entry must be [re, im]", at);
        m(i / c, i % c) = cplx(number(e[0], at + "/0"), number(e[1], at + "/1"));
    }
    return m;
}

json law_to_json(const GeneralizedLaw& law) {
    return json{{"d", law.d}, {"k", law.k}, {"X", matrix_to_json(law.X)}, {"W", matrix_to_json(law.W)}};
}

GeneralizedLaw law_from_json(const json& j, const std::string& where) {
    const int d = int_field(j, "d", where), k = int_field(j, "k", where);
    Mat X = matrix_from_json(field(j, "X", where), where + "/X");
    Mat W = matrix_from_json(field(j, "W", where), where + "/W");
    try {
        return GeneralizedLaw(d, k, std::move(X), std::move(W));
    } catch (const std::exception& e) {
        fail(e.what(), where);
    }
}

json driving_to_json(const StepDriving& dr) {
    json pieces = json::array();
    for (const GeneralizedLaw& p : dr.pieces) pieces.push_back(law_to_json(p));
    return json{{"T", dr.T()}, {"grid", dr.grid}, {"pieces", std::move(pieces)}};
}

StepDriving driving_from_json(const json& j, const std::string& where) {
    const double T = number(field(j, "T", where), where + "/T");
    const json& g = field(j, "grid", where);
    if (!g.is_array()) fail("\"grid\" must be an array", where + "/grid");
    std::vector<double> grid;
    for (std::size_t i = 0; i < g.size(); ++i) grid.push_back(number(g[i], where + "/grid/" + std::to_string(i)));
    const json& p = field(j, "pieces", where);
    if (!p.is_array()) fail("\"pieces\" must be an array", where + "/pieces");
    std::vector<GeneralizedLaw> pieces;
    for (std::size_t i = 0; i < p.size(); ++i) pieces.push_back(law_from_json(p[i], where + "/pieces/" + std::to_string(i)));
    if (grid.empty() || grid.back() != T) fail("grid must end at T", where + "/grid");
    try {
        return StepDriving(std::move(grid), std::move(pieces));
    } catch (const std::exception& e) {
        fail(e.what(), where);
    }
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte is 1-based and points just past the offending character
        const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << "line " << line << ", column " << col;
        throw InputError("malformed JSON", os.str());
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path, "file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_json_text(ss.str());
    } catch (const InputError& e) {
        throw InputError("malformed JSON in " + path, e.location);
    }
}

StepDriving load_driving(const std::string& path) { return driving_from_json(load_json(path)); }

Mat load_matrix(const std::string& path) { return matrix_from_json(load_json(path)); }

std::map<std::string, Mat> load_named_matrices(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object()) fail("expected an object of named matrices", "/");
    std::map<std::string, Mat> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = matrix_from_json(it.value(), "/" + it.key());
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace opchain
