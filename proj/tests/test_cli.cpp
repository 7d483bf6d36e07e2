#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pqdsim/cli.hpp"

using namespace pqdsim;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(PQDSIM_SOURCE_DIR) / "configs";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "pqdsim");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string hom_variant(const TempDir& dir, const std::string& name, double pd) {
    const auto path = dir / name;
    std::ofstream(path) << nlohmann::json{{"M", 2},
                                          {"sources",
                                           {{{"type", "single_photon"}, {"mu", 0.5}, {"eta_b", 0.6}},
                                            {{"type", "single_photon"}, {"mu", 0.5}, {"eta_b", 0.6}}}},
                                          {"lon", {{"kind", "matrix"}, {"file", (kConfigs / "beamsplitter.csv").string()}}},
                                          {"detectors", {{"eta_d", 0.9}, {"p_d", pd}}}}
                               .dump();
    return path.string();
}

}  // namespace

TEST_CASE("compare passes on the noisy HOM config") {
    TempDir dir("pqdsim_cli_compare");
    const auto r = run({"--seed", "1", "--out", dir.str(), "compare", "--config", (kConfigs / "hom_noisy.json").string(),
                        "--samples", "100000", "--tolerance", "0.02"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "compare.json"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "pqdsim-compare.manifest.json"));
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["subcommand"] == "compare");
}

TEST_CASE("compare against a different oracle config fails quantitatively") {
    TempDir dir("pqdsim_cli_mismatch");
    const auto other = hom_variant(dir, "other.json", 0.6);
    const auto r = run({"--seed", "1", "--out", dir.str(), "compare", "--config", (kConfigs / "hom_noisy.json").string(),
                        "--oracle-config", other, "--samples", "100000", "--tolerance", "0.02"});
    CHECK(r.code == kExitQuantitativeFail);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("oversized oracle requests are usage errors") {
    TempDir dir("pqdsim_cli_big");
    const auto path = dir / "big.json";
    std::ofstream(path) << R"({"M": 20, "sources": [{"type": "single_photon"}], "lon": "identity",
                               "detectors": {"eta_d": 0.9, "p_d": 0.95}})";
    const auto r = run({"--out", dir.str(), "oracle", "--config", path.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("oracle") != std::string::npos);
}

TEST_CASE("configs below threshold are refused") {
    TempDir dir("pqdsim_cli_refuse");
    const auto low = hom_variant(dir, "low.json", 0.2);
    CHECK(run({"--out", dir.str(), "check", "--config", low}).code == kExitRefused);
    const auto r = run({"--out", dir.str(), "sample", "--config", low, "--samples", "10"});
    CHECK(r.code == kExitRefused);
    CHECK(r.err.find("0.27") != std::string::npos);
    CHECK(run({"--out", dir.str(), "check", "--config", (kConfigs / "hom_noisy.json").string()}).code == kExitOk);
}

TEST_CASE("a manifest reproduces its run byte for byte") {
    TempDir dir("pqdsim_cli_repro");
    const auto config = (kConfigs / "uniform_loss_m16.json").string();
    const auto first = (dir / "a.csv").string();
    REQUIRE(run({"--seed", "12345", "--quiet", "sample", "--config", config, "--samples", "20000", "--out", first}).code ==
            kExitOk);
    const auto manifest = nlohmann::json::parse(slurp(first + ".manifest.json"));
    const auto second = (dir / "b.csv").string();
    REQUIRE(run({"--seed", std::to_string(manifest["seed"].get<std::uint64_t>()), "--quiet", "sample", "--config", config,
                 "--samples", std::to_string(manifest["samples"].get<int>()), "--out", second, "--workers", "3"})
                .code == kExitOk);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(first).size() == 20000 * 17);
}

TEST_CASE("jsonl to standard output") {
    TempDir dir("pqdsim_cli_jsonl");
    const auto r = run({"--seed", "2", "--quiet", "--out", dir.str(), "sample", "--config", (kConfigs / "vacuum_minimal.json").string(),
                        "--samples", "3", "--format", "jsonl"});
    CHECK(r.code == kExitOk);
    std::istringstream lines(r.out);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        CHECK(nlohmann::json::parse(line).contains("n"));
        ++n;
    }
    CHECK(n == 3);
}

TEST_CASE("thresholds subcommand") {
    TempDir dir("pqdsim_cli_thresholds");
    const auto r = run({"--out", dir.str(), "thresholds", "--scheme", "single-photon", "--json"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.size() == 3);
    CHECK(std::round(j[0]["threshold_p_d"].get<double>() * 1e4) == 444);
    CHECK(std::round(j[2]["N"].get<double>()) == 1044);
    CHECK(std::filesystem::exists(dir / "thresholds.json"));

    const auto text = run({"--out", dir.str(), "thresholds", "--modes", "10"});
    CHECK(text.out.find("0.0757") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"sample"}).code == kExitUsage);
    CHECK(run({"thresholds", "--scheme", "bosons"}).code == kExitUsage);
    CHECK(run({"check", "--config", "/nonexistent/config.json"}).code == kExitUsage);
    CHECK_FALSE(std::filesystem::exists("pqdsim-thresholds.manifest.json"));
    const auto v = run({"--version"});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find(tool_version()) != std::string::npos);
}
