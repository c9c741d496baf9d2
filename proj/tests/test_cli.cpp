#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pwexp/cli.hpp"
#include "pwexp/config.hpp"
#include "pwexp/errors.hpp"

using namespace pwexp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pwexp_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

cli::RunConfig linear_cfg(const fs::path& out) {
    cli::RunConfig cfg;
    cfg.source = example_source({ExampleId::Linear, 1, 101, 1.0});
    cfg.out = out;
    cfg.nx = 16;
    cfg.ny = 16;
    cfg.samples_per_cell = 50;
    cfg.trajectories = 2000;
    cfg.check_samples = 100;
    return cfg;
}

const char* kTwoPieces = R"({
  "name": "two strips", "L": 1, "alpha": 1, "eps1": 1, "Y": 3,
  "pieces": [
    {"index": 0, "constraints": [[0, 1, 0, 0, 0, 0]],
     "outline": [[-1, -1], [0, -1], [0, 1], [-1, 1]],
     "branch": {"coefficients": [1, 4, 0.5, 0, 0, 0], "A": 4, "M": 0.5}},
    {"index": 1, "constraints": [[0, -1, 0, 0, 0, 0]],
     "outline": [[0, -1], [1, -1], [1, 1], [0, 1]],
     "branch": {"coefficients": [-1, 4, 0.5, 0, 0, 0], "A": 4, "M": 0.5, "C": 0}}
  ]})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("map configs: examples and explicit pieces") {
    const MapSource nl = parse_map_config(nlohmann::json::parse(R"({"example": "nonlinear"})"));
    CHECK(nl.is_example);
    CHECK(nl.canonical == "example:nonlinear");
    const MapSource lin = parse_map_config(nlohmann::json::parse(R"({"example": "linear", "a": -1, "b": 103, "L": 1.5})"));
    CHECK(lin.example.a == -1);
    CHECK(lin.example.b == 103);
    CHECK(lin.example.L == 1.5);

    const MapSource two = parse_map_config(nlohmann::json::parse(kTwoPieces));
    CHECK_FALSE(two.is_example);
    REQUIRE(two.spec.pieces.size() == 2);
    CHECK(two.spec.pieces[0].constraints.size() == 5);  // four sides of the square plus one
    const PiecewiseMap map(build_spec(two));
    CHECK(map.locate({-0.5, 0.0}) == std::optional<std::size_t>{0});
    CHECK(map.locate({0.5, 0.0}) == std::optional<std::size_t>{1});
    CHECK_FALSE(map.locate({0.0, 0.3}).has_value());
}

TEST_CASE("config errors name the offending key") {
    auto key_of = [](const std::string& text) {
        try {
            parse_map_config(nlohmann::json::parse(text));
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("<none>");
    };
    CHECK(key_of(R"({"example": "circle"})") == "example");
    CHECK(key_of(R"({"example": "linear", "b": 0})") == "b");
    CHECK(key_of(R"({"example": "linear", "L": 0.3})") == "L");
    CHECK(key_of(R"({"L": 1, "eps1": 1, "Y": 1})") == "pieces");
    std::string broken = kTwoPieces;
    broken.replace(broken.find("\"A\": 4"), 6, "\"A\": \"x\"");
    CHECK(key_of(broken) == "pieces[0].branch.A");
    std::string no_outline = kTwoPieces;
    no_outline.replace(no_outline.find("\"outline\""), 9, "\"outlines\"");
    CHECK(key_of(no_outline) == "pieces[0].outline");

    const fs::path dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << "{ \"example\": ";
    try {
        load_map_config(dir / "bad.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "<file>");
    }
}

TEST_CASE("run config validation and lags") {
    cli::RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.effective_lags().size() == 21);
    cfg.lags = {5, 1, 5, 3};
    CHECK(cfg.effective_lags() == std::vector<long>{1, 3, 5});
    cfg.nx = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.nx = 4;
    cfg.samples_per_cell = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("fnv1a reference values") {
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    cli::RunConfig a, b;
    b.seed = a.seed + 1;
    CHECK(cli::density_key(a) != cli::density_key(b));
}

TEST_CASE("check: exit codes and report") {
    std::ostringstream log, err;
    const fs::path out = scratch("check");
    cli::RunConfig cfg = linear_cfg(out);
    CHECK(cli::run_check(cfg, log, err) == cli::kOk);
    const auto doc = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(doc["overall"] == "pass");
    CHECK(doc["checks"][0]["id"] == "linear_admissibility");

    cfg.source = example_source({ExampleId::Linear, 1, 50, 1.0});
    CHECK(cli::run_check(cfg, log, err) == cli::kHypothesisFail);
    cfg.nx = 0;
    CHECK(cli::run_check(cfg, log, err) == cli::kConfigError);
}

TEST_CASE("density: gate, files, cache and the minimal grid") {
    std::ostringstream log, err;
    const fs::path out = scratch("density");
    cli::RunConfig cfg = linear_cfg(out);
    cfg.write_operator = true;
    REQUIRE(cli::run_density(cfg, log, err) == cli::kOk);
    for (const char* f : {"density.csv", "marginal_x.csv", "marginal_y.csv", "spectrum.json", "operator.csv"}) {
        CHECK(fs::exists(out / f));
    }
    const auto spec = nlohmann::json::parse(slurp(out / "spectrum.json"));
    CHECK(spec["density"]["max_relative_deviation_from_mean"].get<double>() < 0.05);
    CHECK(spec["peripheral_count"] == 1);

    std::ifstream in(out / "density.csv");
    const GridFunction h = read_grid_csv(in);
    CHECK(h.nx == 16);
    CHECK(h.integral() == doctest::Approx(1.0).epsilon(1e-9));

    const std::string first = slurp(out / "density.csv");
    std::ostringstream log2;
    REQUIRE(cli::run_density(cfg, log2, err) == cli::kOk);
    CHECK(log2.str().find("reusing") != std::string::npos);
    CHECK(slurp(out / "density.csv") == first);

    cfg.nx = cfg.ny = 2;
    REQUIRE(cli::run_density(cfg, log, err) == cli::kOk);
    std::ifstream in2(out / "density.csv");
    CHECK(read_grid_csv(in2).integral() == doctest::Approx(1.0).epsilon(1e-12));

    // an inadmissible map stops at the gate unless forced
    cfg.source = example_source({ExampleId::Linear, 1, 50, 1.0});
    CHECK(cli::run_density(cfg, log, err) == cli::kHypothesisFail);
    cfg.force = true;
    CHECK(cli::run_density(cfg, log, err) == cli::kOk);
}

TEST_CASE("density: an iteration cap too small reports no convergence with a trace") {
    std::ostringstream log, err;
    const fs::path out = scratch("noconv");
    cli::RunConfig cfg = linear_cfg(out);
    cfg.source = example_source({});
    cfg.force = true;
    cfg.max_iters = 2;
    cfg.tol = 1e-15;
    CHECK(cli::run_density(cfg, log, err) == cli::kNoConvergence);
    CHECK(fs::exists(out / "residual_trace.csv"));
}

TEST_CASE("decay: byte-identical repeated runs") {
    std::ostringstream log, err;
    const fs::path a = scratch("decay_a"), b = scratch("decay_b");
    cli::RunConfig cfg = linear_cfg(a);
    const int rc = cli::run_decay(cfg, log, err);
    CHECK((rc == cli::kOk || rc == cli::kNoSignal));
    cfg.out = b;
    CHECK(cli::run_decay(cfg, log, err) == rc);
    CHECK(slurp(a / "decay.csv") == slurp(b / "decay.csv"));
    CHECK(slurp(a / "decay_fit.json") == slurp(b / "decay_fit.json"));
    CHECK(slurp(a / "decay.csv").rfind("lag,cov_mc,stderr,cov_op\n", 0) == 0);
}

TEST_CASE("example facts of the linear map") {
    std::ostringstream log, err;
    cli::RunConfig cfg = linear_cfg(scratch("facts"));
    CHECK(cli::run_example(cfg, log, err) == cli::kOk);
    const auto doc = nlohmann::json::parse(slurp(cfg.out / "facts.json"));
    for (const auto& f : doc) CHECK(f["holds"] == true);
}

}
