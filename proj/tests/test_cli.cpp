#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dilatox/cli.hpp"

namespace fs = std::filesystem;
using dilatox::cli::run_cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"dilatox"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "dilatox_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

const std::string kGauss = R"([stationary]
model = "gauss"
A = [1.0]
kappa = 0.5
R = 0.2

[stationary.grid]
u_min = -20.0
u_max = 20.0
u_count = 401
)";

const std::string kSim = R"([simulate]
seed = 5
steps = 3000
burn_in = 100

[simulate.map]
kind = "ikeda"
kappa = 0.3
lambda = 50.0

[simulate.noise]
kind = "gaussian"
R = 0.05
)";

}  // namespace

TEST_CASE("version and usage errors") {
    const auto v = cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
    CHECK(cli({}).code == dilatox::cli::kConfigError);
    CHECK(cli({"bogus", "--config", "x.toml"}).code == dilatox::cli::kConfigError);
    CHECK(cli({"stationary"}).code == dilatox::cli::kConfigError);
    CHECK(cli({"stationary", "--config", "/nonexistent/dilatox.toml"}).code == dilatox::cli::kConfigError);
}

TEST_CASE("config errors name the field and line") {
    const auto dir = scratch("config_errors");
    std::string bad = kGauss;
    bad.replace(bad.find("kappa = 0.5"), 11, "kappa = 1.5");
    const auto r = cli({"stationary", "--config", write(dir, "bad.toml", bad).string(), "--out", (dir / "o").string()});
    CHECK(r.code == dilatox::cli::kConfigError);
    CHECK(r.err.find("kappa") != std::string::npos);
    CHECK(r.err.find("line") != std::string::npos);

    const auto missing = cli({"stationary", "--config", write(dir, "empty.toml", "[other]\nx = 1\n").string()});
    CHECK(missing.code == dilatox::cli::kConfigError);
    CHECK(missing.err.find("stationary") != std::string::npos);

    const auto typed = cli({"stationary", "--config",
                            write(dir, "typed.toml", "[stationary]\nmodel = \"gauss\"\nA = [1.0]\nkappa = \"half\"\n").string()});
    CHECK(typed.code == dilatox::cli::kConfigError);
    CHECK(typed.err.find("stationary.kappa (line 4)") != std::string::npos);

    CHECK(cli({"stationary", "--config", write(dir, "syntax.toml", "[stationary\n").string()}).code ==
          dilatox::cli::kConfigError);
}

TEST_CASE("stationary outputs carry provenance and Psi(0) = 1") {
    const auto dir = scratch("stationary");
    const auto r = cli({"stationary", "--config", write(dir, "g.toml", kGauss).string(), "--out", (dir / "o").string()});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(dir / "o" / "charfn.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "# dilatox 0.1.0");
    std::getline(csv, line);
    CHECK(line.rfind("# config: {\"stationary\"", 0) == 0);
    std::getline(csv, line);
    CHECK(line == "u,re,im,terms");
    bool found = false;
    while (std::getline(csv, line)) found = found || line == "0,1,0,0";
    CHECK(found);

    const auto report = nlohmann::ordered_json::parse(slurp(dir / "o" / "stationary.json"));
    CHECK(report["dilatox_version"] == "0.1.0");
    CHECK(report["config"]["stationary"]["kappa"] == 0.5);
    // defaults are part of the resolved config
    CHECK(report["config"]["stationary"]["truncation"]["tol"] == 1e-14);
    CHECK(report.begin().key() == "dilatox_version");
    CHECK(report["variance"][0].get<double>() == doctest::Approx(2.0 / 15.0));
}

TEST_CASE("JSON config alternative") {
    const auto dir = scratch("json_config");
    const std::string json = R"({"stationary": {"model": "gauss", "A": [1.0], "kappa": 0.5, "R": 0.2,
        "grid": {"u_min": -20.0, "u_max": 20.0, "u_count": 401}}})";
    const auto a = cli({"stationary", "--json", "--config", write(dir, "g.json", json).string(), "--out",
                        (dir / "a").string()});
    const auto b = cli({"stationary", "--config", write(dir, "g.toml", kGauss).string(), "--out", (dir / "b").string()});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a" / "charfn.csv") == slurp(dir / "b" / "charfn.csv"));
}

TEST_CASE("unnormalized weights need --unchecked") {
    const auto dir = scratch("policy");
    const auto cfg = write(dir, "w.toml", R"([mfi]
preset = "ikeda"
kappa = 0.4
n_max = 10

[mfi.function]
kind = "cos"
)").string();
    const auto refused = cli({"mfi", "--config", cfg, "--out", (dir / "a").string()});
    CHECK(refused.code == dilatox::cli::kPolicyRefusal);
    CHECK(refused.err.find("--unchecked") != std::string::npos);
    CHECK(cli({"mfi", "--config", cfg, "--out", (dir / "b").string(), "--unchecked"}).code == 0);
}

TEST_CASE("seed override is recorded and reruns are byte-identical") {
    const auto dir = scratch("seed");
    const auto cfg = write(dir, "s.toml", kSim).string();
    REQUIRE(cli({"simulate", "--config", cfg, "--out", (dir / "a").string()}).code == 0);
    REQUIRE(cli({"simulate", "--config", cfg, "--out", (dir / "b").string(), "--threads", "3"}).code == 0);
    REQUIRE(cli({"simulate", "--config", cfg, "--out", (dir / "c").string(), "--seed", "6"}).code == 0);
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
    }
    const auto summary = nlohmann::ordered_json::parse(slurp(dir / "c" / "summary.json"));
    CHECK(summary["config"]["simulate"]["seed"] == 6);
    CHECK(slurp(dir / "a" / "summary.json") != slurp(dir / "c" / "summary.json"));
}

TEST_CASE("compare exit code follows the thresholds") {
    const auto dir = scratch("compare");
    write(dir, "a.toml", kGauss);
    write(dir, "e.toml", R"([simulate]
seed = 1
steps = 20100
burn_in = 100

[simulate.map]
kind = "linear"
A = [1.0]
kappa = 0.5

[simulate.noise]
kind = "gaussian"
R = 0.2

[simulate.summary.charfn]
u_min = -5.0
u_max = 5.0
u_count = 101
)");
    const auto loose = write(dir, "loose.toml", "[compare]\nanalytic = \"a.toml\"\nempirical = \"e.toml\"\n\n"
                                                "[compare.thresholds]\ncf_sup = 0.1\n");
    const auto tight = write(dir, "tight.toml", "[compare]\nanalytic = \"a.toml\"\nempirical = \"e.toml\"\n\n"
                                                "[compare.thresholds]\ncf_sup = 1e-6\n");
    CHECK(cli({"compare", "--config", loose.string(), "--out", (dir / "l").string()}).code == 0);
    CHECK(cli({"compare", "--config", tight.string(), "--out", (dir / "t").string()}).code ==
          dilatox::cli::kNumericalFailure);
    const auto report = nlohmann::ordered_json::parse(slurp(dir / "t" / "compare.json"));
    CHECK(report["dilatox_version"] == "0.1.0");
}

TEST_CASE("every shipped config runs") {
    for (const auto& e : fs::directory_iterator(DILATOX_CONFIG_DIR)) {
        const std::string stem = e.path().stem().string();
        if (stem.rfind("compare", 0) == 0 || stem.rfind("ikeda", 0) == 0) continue;  // covered by acceptance
        const auto out = scratch("shipped") / stem;
        CAPTURE(stem);
        CHECK(cli({stem.substr(0, stem.find('_')), "--config", e.path().string(), "--out", out.string(), "--unchecked"})
                  .code == 0);
    }
}
