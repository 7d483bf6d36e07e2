#include "pqdsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "pqdsim/errors.hpp"
#include "pqdsim/matrix_io.hpp"

namespace pqdsim {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

double number(const json& j, const char* key, const std::string& where, std::optional<double> fallback = {}) {
    const std::string field = where.empty() ? std::string(key) : where + "." + key;
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(field, "missing");
    }
    if (!j.at(key).is_number()) throw ConfigError(field, "must be a number");
    return j.at(key).get<double>();
}

std::size_t index(const json& j, const char* key, const std::string& where) {
    const std::string field = where.empty() ? std::string(key) : where + "." + key;
    if (!j.contains(key)) throw ConfigError(field, "missing");
    if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
        throw ConfigError(field, "must be a non-negative integer");
    }
    return j.at(key).get<std::size_t>();
}

// Re-throws source/detector range errors with the config path in front.
template <class F>
auto with_field(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (e.field().empty()) throw ConfigError(where, what);
        throw ConfigError(where + "." + e.field(), what.substr(e.field().size() + 2));
    }
}

SourceAssignment parse_source(const json& j, std::size_t position, std::size_t& pair_count, std::size_t modes) {
    const std::string where = "sources[" + std::to_string(position) + "]";
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name != "vacuum") throw ConfigError(where, "string entries must be \"vacuum\", got \"" + name + "\"");
        return {Vacuum{}, {position}};
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw ConfigError(where + ".type", "missing source type");
    }
    const auto type = j.at("type").get<std::string>();
    auto port = [&]() { return j.contains("port") ? index(j, "port", where) : position; };

    SourceAssignment a{Vacuum{}, {}};
    if (type == "vacuum") {
        reject_unknown(j, {"type", "port"}, where);
        a = {Vacuum{}, {port()}};
    } else if (type == "single_photon") {
        reject_unknown(j, {"type", "port", "mu", "eta_b"}, where);
        a = {MixedSinglePhoton{number(j, "mu", where, 1.0), number(j, "eta_b", where, 1.0)}, {port()}};
    } else if (type == "coherent") {
        reject_unknown(j, {"type", "port", "re", "im"}, where);
        a = {Coherent{Complex(number(j, "re", where, 0.0), number(j, "im", where, 0.0))}, {port()}};
    } else if (type == "thermal") {
        reject_unknown(j, {"type", "port", "nbar"}, where);
        a = {Thermal{number(j, "nbar", where)}, {port()}};
    } else if (type == "spdc") {
        reject_unknown(j, {"type", "r", "eta_bl", "herald_port", "signal_port"}, where);
        std::size_t herald = pair_count;
        std::size_t signal = modes / 2 + pair_count;
        if (j.contains("herald_port")) herald = index(j, "herald_port", where);
        if (j.contains("signal_port")) signal = index(j, "signal_port", where);
        ++pair_count;
        a = {SpdcPair{number(j, "r", where), number(j, "eta_bl", where, 1.0)}, {herald, signal}};
    } else {
        throw ConfigError(where + ".type", "unknown source type \"" + type + "\"");
    }
    with_field(where, [&] {
        validate(a.source);
        return 0;
    });
    return a;
}

LonSpec parse_lon(const json& j, const std::filesystem::path& base_dir) {
    if (j.is_string()) {
        if (j.get<std::string>() == "identity") return IdentityLon{};
        throw ConfigError("lon", "string form must be \"identity\"");
    }
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("lon.kind", "missing");
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "identity") {
        reject_unknown(j, {"kind"}, "lon");
        return IdentityLon{};
    }
    if (kind == "matrix") {
        reject_unknown(j, {"kind", "file", "rows", "cols", "re", "im"}, "lon");
        MatrixLon m;
        if (j.contains("file")) m.file = j.at("file").get<std::string>();
        if (j.contains("re")) {
            m.matrix = matrix_from_json(j);
        } else if (!m.file.empty()) {
            std::filesystem::path p(m.file);
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            m.matrix = load_matrix(p);
        } else {
            throw ConfigError("lon.file", "matrix network needs a file or inline entries");
        }
        return m;
    }
    if (kind == "uniform-loss") {
        reject_unknown(j, {"kind", "eta0", "ell", "M", "unitary_seed"}, "lon");
        UniformLossLon u;
        u.model.eta0 = number(j, "eta0", "lon");
        u.model.ell = static_cast<int>(index(j, "ell", "lon"));
        u.model.modes = index(j, "M", "lon");
        u.unitary_seed = j.contains("unitary_seed") ? j.at("unitary_seed").get<std::uint64_t>() : 0;
        validate(u.model);
        return u;
    }
    throw ConfigError("lon.kind", "unknown network kind \"" + kind + "\"");
}

DetectorModel parse_detector(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    reject_unknown(j, {"eta_d", "p_d"}, where);
    DetectorModel d{number(j, "eta_d", where), number(j, "p_d", where, 0.0)};
    if (!(d.efficiency >= 0.0 && d.efficiency <= 1.0)) throw ConfigError(where + ".eta_d", "must lie in [0, 1]");
    if (!(d.random_count >= 0.0 && d.random_count <= 1.0)) throw ConfigError(where + ".p_d", "must lie in [0, 1]");
    return d;
}

json source_to_json(const SourceAssignment& a) {
    return std::visit(
        [&](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Vacuum>) {
                return {{"type", "vacuum"}, {"port", a.ports[0]}};
            } else if constexpr (std::is_same_v<T, MixedSinglePhoton>) {
                return {{"type", "single_photon"}, {"port", a.ports[0]}, {"mu", s.purity}, {"eta_b", s.mode_match}};
            } else if constexpr (std::is_same_v<T, Coherent>) {
                return {{"type", "coherent"}, {"port", a.ports[0]}, {"re", s.amplitude.real()}, {"im", s.amplitude.imag()}};
            } else if constexpr (std::is_same_v<T, Thermal>) {
                return {{"type", "thermal"}, {"port", a.ports[0]}, {"nbar", s.mean_photons}};
            } else {
                return {{"type", "spdc"}, {"r", s.squeezing}, {"eta_bl", s.transmissivity},
                        {"herald_port", a.ports[0]}, {"signal_port", a.ports[1]}};
            }
        },
        a.source);
}

json lon_to_json(const LonSpec& lon) {
    if (const auto* m = std::get_if<MatrixLon>(&lon)) {
        json j = matrix_to_json(m->matrix);
        j["kind"] = "matrix";
        if (!m->file.empty()) j["file"] = m->file;
        return j;
    }
    if (const auto* u = std::get_if<UniformLossLon>(&lon)) {
        return {{"kind", "uniform-loss"}, {"eta0", u->model.eta0}, {"ell", u->model.ell},
                {"M", u->model.modes}, {"unitary_seed", u->unitary_seed}};
    }
    return {{"kind", "identity"}};
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    reject_unknown(j, {"M", "scheme", "sources", "lon", "detectors", "mismatch"}, "");
    const std::size_t modes = index(j, "M", "");
    if (modes == 0) throw ConfigError("M", "mode count must be >= 1");

    std::optional<Scheme> scheme;
    if (j.contains("scheme")) {
        const auto name = j.at("scheme").get<std::string>();
        if (name == "single-photon") scheme = Scheme::SinglePhoton;
        else if (name == "spdc") scheme = Scheme::Spdc;
        else throw ConfigError("scheme", "must be \"single-photon\" or \"spdc\"");
    }

    if (!j.contains("sources") || !j.at("sources").is_array()) throw ConfigError("sources", "missing source list");
    std::vector<SourceAssignment> assignments;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < j.at("sources").size(); ++i) {
        assignments.push_back(parse_source(j.at("sources")[i], i, pairs, modes));
    }
    if (pairs > 0 && modes % 2 != 0) {
        throw ConfigError("M", "port pairing: spdc sources need an even mode count (heralds then signals)");
    }
    InputState input(modes, std::move(assignments));

    const LonSpec lon = j.contains("lon") ? parse_lon(j.at("lon"), base_dir) : LonSpec{IdentityLon{}};

    if (!j.contains("detectors")) throw ConfigError("detectors", "missing");
    std::vector<DetectorModel> detectors;
    const auto& dj = j.at("detectors");
    if (dj.is_array()) {
        for (std::size_t i = 0; i < dj.size(); ++i)
            detectors.push_back(parse_detector(dj[i], "detectors[" + std::to_string(i) + "]"));
    } else {
        detectors.push_back(parse_detector(dj, "detectors"));
    }

    std::optional<ModeMismatch> mismatch;
    if (j.contains("mismatch")) {
        const auto& mj = j.at("mismatch");
        reject_unknown(mj, {"f_b", "f_l"}, "mismatch");
        mismatch = ModeMismatch{number(mj, "f_b", "mismatch", 0.0), number(mj, "f_l", "mismatch", 0.0)};
    }

    try {
        return make_experiment(std::move(input), lon, std::move(detectors), mismatch, scheme);
    } catch (const NotAContraction& e) {
        throw ConfigError("lon", e.what());
    } catch (const InvalidDimension& e) {
        throw ConfigError("lon", e.what());
    }
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    try {
        return config_from_json(j, path.parent_path());
    } catch (const json::exception& e) {
        throw ConfigError("", std::string("schema violation: ") + e.what());
    }
}

json config_to_json(const ExperimentConfig& config) {
    json sources = json::array();
    for (const auto& a : config.input.assignments()) sources.push_back(source_to_json(a));
    json detectors = json::array();
    for (const auto& d : config.detectors) detectors.push_back({{"eta_d", d.efficiency}, {"p_d", d.random_count}});
    json j = {{"M", config.modes()},
              {"scheme", scheme_name(config.scheme)},
              {"sources", sources},
              {"lon", lon_to_json(config.lon)},
              {"detectors", detectors}};
    if (config.mismatch) {
        j["mismatch"] = {{"f_b", config.mismatch->input_fraction}, {"f_l", config.mismatch->network_fraction}};
    }
    return j;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    json j = config_to_json(config);
    if (j["lon"].contains("file")) j["lon"].erase("file");
    return sha256_hex(j.dump());
}

}  // namespace pqdsim
