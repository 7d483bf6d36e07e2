#include "pqdsim/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "pqdsim/errors.hpp"

namespace pqdsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_pair(const std::string& line, std::size_t lineno) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
        throw ConfigError("matrix", "CSV line " + std::to_string(lineno) + " is not a comma pair");
    }
    return {trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
}

}  // namespace

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("matrix", "expected an object");
    for (const char* key : {"rows", "cols", "re"}) {
        if (!j.contains(key)) throw ConfigError(std::string("matrix.") + key, "missing");
    }
    const auto rows = j.at("rows").get<long>();
    const auto cols = j.at("cols").get<long>();
    if (rows <= 0 || cols <= 0) throw ConfigError("matrix.rows", "dimensions must be positive");
    const auto& re = j.at("re");
    const std::size_t n = static_cast<std::size_t>(rows * cols);
    if (!re.is_array() || re.size() != n) {
        throw ConfigError("matrix.re", "expected " + std::to_string(n) + " entries");
    }
    const bool has_im = j.contains("im");
    if (has_im && (!j.at("im").is_array() || j.at("im").size() != n)) {
        throw ConfigError("matrix.im", "expected " + std::to_string(n) + " entries");
    }
    ComplexMatrix m(rows, cols);
    for (std::size_t k = 0; k < n; ++k) {
        const double im = has_im ? j.at("im")[k].get<double>() : 0.0;
        m(static_cast<Eigen::Index>(k) / cols, static_cast<Eigen::Index>(k) % cols) =
            Complex(re[k].get<double>(), im);
    }
    return m;
}

std::string matrix_to_csv(const ComplexMatrix& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.rows() << ',' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << m(i, j).real() << ',' << m(i, j).imag() << '\n';
    return os.str();
}

ComplexMatrix matrix_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() {
        while (std::getline(is, line)) {
            ++lineno;
            line = trim(line);
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next_line()) throw ConfigError("matrix", "empty CSV");
    auto header = split_pair(line, lineno);
    if (header.first == "rows" && header.second == "cols") {
        if (!next_line()) throw ConfigError("matrix", "CSV missing dimensions");
        header = split_pair(line, lineno);
    }
    long rows = 0;
    long cols = 0;
    try {
        rows = std::stol(header.first);
        cols = std::stol(header.second);
    } catch (const std::exception&) {
        throw ConfigError("matrix", "CSV header must be 'rows,cols' integers");
    }
    if (rows <= 0 || cols <= 0) throw ConfigError("matrix", "dimensions must be positive");
    ComplexMatrix m(rows, cols);
    for (long k = 0; k < rows * cols; ++k) {
        if (!next_line()) throw ConfigError("matrix", "CSV has fewer than rows*cols entries");
        const auto [re, im] = split_pair(line, lineno);
        try {
            m(k / cols, k % cols) = Complex(std::stod(re), std::stod(im));
        } catch (const std::exception&) {
            throw ConfigError("matrix", "bad number on CSV line " + std::to_string(lineno));
        }
    }
    if (next_line()) throw ConfigError("matrix", "CSV has more than rows*cols entries");
    return m;
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("lon.file", "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.extension() == ".csv") return matrix_from_csv(buf.str());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("lon.file", std::string("invalid JSON: ") + e.what());
    }
    return matrix_from_json(j);
}

}  // namespace pqdsim
