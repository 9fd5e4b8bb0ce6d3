#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "idma/cli.hpp"
#include "idma/error.hpp"

namespace fs = std::filesystem;
using idma::cli::run;

namespace {

struct Sandbox {
    fs::path dir;
    explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("idma_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int invoke(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int rc = run(args, out, err);
    if (err_text) *err_text = err.str();
    return rc;
}

const char* kOuTwoPoint = R"({"measure": {"kind": "two_point", "lambda": 1}, "kernel": {"kind": "signed_ou"})";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("conditions report for SignedOU + Dickman") {
    Sandbox box("conditions");
    const auto cfg = box.write(
        "c.json", R"({"measure": {"kind": "dickman"}, "kernel": {"kind": "signed_ou"}, "format": "json"})");
    REQUIRE(invoke({"conditions", "--config", cfg.string(), "--out", (box.dir / "out").string()}) == 0);
    const auto j = nlohmann::json::parse(slurp(box.dir / "out" / "conditions.json"));
    CHECK(std::abs(j["c2"].get<double>()) < 1e-6);
    CHECK(std::abs(j["c3"].get<double>() - 0.5) < 1e-6);
    CHECK(j["pass"] == nlohmann::json({true, true, true}));
    CHECK(j["meta"]["subcommand"] == "conditions");
}

TEST_CASE("cov table for SignedOU + TwoPoint") {
    Sandbox box("cov");
    const auto cfg = box.write("c.json", std::string(kOuTwoPoint) + R"(, "t_grid": [0, 1, 2]})");
    REQUIRE(invoke({"cov", "--config", cfg.string(), "--out", box.dir.string()}) == 0);
    std::istringstream csv(slurp(box.dir / "cov.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# idma cov config=", 0) == 0);
    std::getline(csv, line);
    CHECK(line == "t,covariance");
    const double expected[] = {1.0, 0.0, -std::exp(-2.0)};
    for (int i = 0; i < 3; ++i) {
        std::getline(csv, line);
        const auto comma = line.find(',');
        CHECK(std::stod(line.substr(0, comma)) == i);
        CHECK(std::abs(std::stod(line.substr(comma + 1)) - expected[i]) < 1e-6);
    }
    CHECK(fs::exists(box.dir / "cov_integral.csv"));
}

TEST_CASE("missing config file") {
    Sandbox box("missing");
    std::string err;
    CHECK(invoke({"cf", "--config", (box.dir / "nope.json").string(), "--out", (box.dir / "out").string()}, &err) == 2);
    CHECK_FALSE(err.empty());
    CHECK_FALSE(fs::exists(box.dir / "out"));
}

TEST_CASE("config errors exit with 2") {
    Sandbox box("badcfg");
    const auto unknown = box.write("u.json", std::string(kOuTwoPoint) + R"(, "colour": "blue"})");
    CHECK(invoke({"cf", "--config", unknown.string(), "--out", box.dir.string()}) == 2);
    const auto broken = box.write("b.json", "{not json");
    CHECK(invoke({"cf", "--config", broken.string(), "--out", box.dir.string()}) == 2);
    const auto bad_measure = box.write("m.json", R"({"measure": {"kind": "two_point", "lambda": -1}})");
    CHECK(invoke({"cf", "--config", bad_measure.string(), "--out", box.dir.string()}) == 2);
    const auto no_kernel = box.write("k.json", R"({"measure": {"kind": "dickman"}})");
    CHECK(invoke({"cov", "--config", no_kernel.string(), "--out", box.dir.string()}) == 2);
    const auto persistent =
        box.write("p.json", R"({"measure": {"kind": "dickman"}, "kernel": {"kind": "persistent_control"}})");
    CHECK(invoke({"converge", "--config", persistent.string(), "--out", box.dir.string()}) == 2);
    CHECK(invoke({"frobnicate"}) == 2);
    CHECK(invoke({"cf"}) == 2);
}

TEST_CASE("divergent moments exit with 4") {
    Sandbox box("divergent");
    const auto cfg = box.write(
        "c.json",
        R"({"measure": {"kind": "inner_truncated_stable", "alpha": 1.5, "c": 1, "delta": 0.1}, "kernel": {"kind": "signed_ou"}, "replicates": 0})");
    CHECK(invoke({"hyper", "--config", cfg.string(), "--out", box.dir.string()}) == 4);
}

TEST_CASE("quadrature failure exits with 3") {
    Sandbox box("nonconv");
    const auto cfg = box.write("c.json", std::string(kOuTwoPoint) + R"(, "quad_tol": 1e-300, "z_grid": [1]})");
    CHECK(invoke({"cf", "--config", cfg.string(), "--out", box.dir.string()}) == 3);
}

TEST_CASE("simulate output is identical across thread counts") {
    Sandbox box("simulate");
    const auto cfg = box.write("c.json", std::string(kOuTwoPoint) +
                                             R"(, "T": 5, "l_points": [0, 1.5], "replicates": 2000, "seed": 11})");
    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", (box.dir / "a").string(), "--threads", "1"}) == 0);
    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", (box.dir / "b").string(), "--threads", "4"}) == 0);
    const auto a = slurp(box.dir / "a" / "replicates.csv");
    CHECK(a == slurp(box.dir / "b" / "replicates.csv"));
    CHECK(a.find("replicate,l_index,S_value,Y_value\n") != std::string::npos);
    CHECK(a.rfind("# idma simulate config=", 0) == 0);
    CHECK(a.find(" seed=11\n") != std::string::npos);
    std::size_t lines = 0;
    for (char c : a) lines += c == '\n';
    CHECK(lines == 2 + 2 * 2000);

    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", (box.dir / "c").string(), "--seed", "12"}) == 0);
    const auto c = slurp(box.dir / "c" / "replicates.csv");
    CHECK(c.find(" seed=12\n") != std::string::npos);
    CHECK(c.substr(0, c.find(" seed=")) == a.substr(0, a.find(" seed=")));
}

TEST_CASE("every subcommand emits JSON that re-parses") {
    Sandbox box("json");
    const auto cfg = box.write("c.json", std::string(kOuTwoPoint) +
                                             R"(, "T": 2, "replicates": 200, "z_grid": {"from": -1, "to": 1, "step": 0.5},
                                             "T_grid": [1, 2, 4], "format": "json"})");
    const char* subs[] = {"conditions", "cf", "cov", "simulate", "converge", "hyper"};
    for (const char* sub : subs) {
        CAPTURE(sub);
        REQUIRE(invoke({sub, "--config", cfg.string(), "--out", box.dir.string()}) == 0);
    }
    for (const auto& entry : fs::directory_iterator(box.dir)) {
        if (entry.path().filename() == "c.json") continue;
        const auto j = nlohmann::json::parse(slurp(entry.path()));
        CHECK(j.contains("meta"));
        CHECK(j["meta"]["seed"] == 0);
    }
    const auto cf = nlohmann::json::parse(slurp(box.dir / "cf.json"));
    CHECK(cf["rows"].size() == 5);
    const auto conv = nlohmann::json::parse(slurp(box.dir / "converge.json"));
    CHECK(conv["entries"].size() == 3);
}

TEST_CASE("CSV reports for cf, converge and hyper") {
    Sandbox box("csv");
    const auto cfg = box.write("c.json", std::string(kOuTwoPoint) + R"(, "T_grid": [5, 10, 20, 40], "replicates": 0})");
    REQUIRE(invoke({"converge", "--config", cfg.string(), "--out", box.dir.string()}) == 0);
    const auto conv = slurp(box.dir / "converge.csv");
    CHECK(conv.find("# winner=boundary_augmented") != std::string::npos);
    const auto hyper_cfg = box.write("h.json", std::string(kOuTwoPoint) + R"(, "T_grid": [1, 2, 5, 10, 20], "replicates": 0})");
    REQUIRE(invoke({"hyper", "--config", hyper_cfg.string(), "--out", box.dir.string()}) == 0);
    CHECK(slurp(box.dir / "hyper.csv").find("classification=hyperuniform") != std::string::npos);
}

TEST_CASE("config parsing") {
    const auto cfg = idma::cli::parse_config(
        R"({"measure": {"kind": "truncated_stable", "beta": 0.5, "C": 2}, "kernel": {"kind": "product", "components": [{"kind": "signed_ou"}, {"kind": "gauss_deriv"}]},
            "l_points": [[0, 0], [1, 2]], "z": [1, -1], "z_grid": {"from": 0, "to": 1, "step": 0.25}})",
        ".");
    CHECK(cfg.d == 2);
    CHECK(cfg.points().size() == 2);
    CHECK(cfg.z_grid.size() == 5);
    CHECK(cfg.kernel->dimension() == 2);
    const auto widened = idma::cli::parse_config(R"({"kernel": {"kind": "signed_ou"}, "d": 2})", ".");
    CHECK(widened.kernel->dimension() == 2);
    CHECK_THROWS_AS(idma::cli::parse_config(R"({"l_points": [[0, 0]]})", "."), idma::ConfigError);
    CHECK_THROWS_AS(idma::cli::parse_config(R"({"kernel": {"kind": "signed_ou", "width": 2}})", "."),
                    idma::ConfigError);
    // digest ignores seed, threads, output and format
    const auto a = idma::cli::parse_config(R"({"T": 3, "seed": 1, "threads": 2})", ".");
    const auto b = idma::cli::parse_config(R"({"T": 3, "seed": 5, "format": "json"})", ".");
    const auto c = idma::cli::parse_config(R"({"T": 4})", ".");
    CHECK(a.digest == b.digest);
    CHECK(a.digest != c.digest);
}

TEST_CASE("user table kernels resolve relative to the config file") {
    Sandbox box("table");
    box.write("k.csv", "x,g\n-1,0\n0,1\n1,0\n");
    const auto cfg = box.write(
        "c.json", R"({"measure": {"kind": "two_point", "lambda": 1}, "kernel": {"kind": "user_table", "file": "k.csv"}, "t_grid": [0]})");
    REQUIRE(invoke({"cov", "--config", cfg.string(), "--out", box.dir.string()}) == 0);
    CHECK(slurp(box.dir / "cov.csv").find("\n0,2\n") != std::string::npos);
}

}
