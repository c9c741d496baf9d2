// Command line front end: check, density, decay and example subcommands.
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pwexp/cli.hpp"
#include "pwexp/errors.hpp"

using namespace pwexp;

namespace {

struct MapFlags {
    std::string example;
    long a = 1;
    long b = 101;
    double L = 1.0;
    std::string config;
};

struct RunFlags {
    MapFlags map;
    cli::RunConfig cfg;
    std::string lags;
    std::string out = "pwexp_out";
};

std::vector<long> parse_lags(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-', 1);
        try {
            std::size_t used = 0;
            if (dash == std::string::npos) {
                out.push_back(std::stol(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } else {
                const long lo = std::stol(item.substr(0, dash));
                const long hi = std::stol(item.substr(dash + 1));
                if (hi < lo) throw std::invalid_argument(item);
                for (long l = lo; l <= hi; ++l) out.push_back(l);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("lags", "cannot parse '" + item + "' (expected e.g. 0,1,5-10)");
        }
    }
    return out;
}

MapSource resolve_map(const MapFlags& m, const CLI::App& sub) {
    const bool linear_flags = sub.count("--a") || sub.count("--b") || sub.count("--L");
    if (!m.config.empty()) {
        if (!m.example.empty() || linear_flags) throw ConfigError("config", "--config excludes --example and --a/--b/--L");
        return load_map_config(m.config);
    }
    ExampleParams ex;
    const std::string name = m.example.empty() ? (linear_flags ? "linear" : "nonlinear") : m.example;
    if (name == "nonlinear") {
        if (linear_flags) throw ConfigError("example", "--a/--b/--L apply to the linear example only");
        ex.id = ExampleId::Nonlinear;
    } else if (name == "linear") {
        ex.id = ExampleId::Linear;
        ex.a = m.a;
        ex.b = m.b;
        ex.L = m.L;
        if (ex.a == 0) throw ConfigError("a", "must be nonzero");
        if (ex.b == 0) throw ConfigError("b", "must be nonzero");
        if (!(ex.L > 0.0) || 2.0 * ex.L != std::round(2.0 * ex.L)) {
            throw ConfigError("L", "must be a positive integer or half-integer");
        }
    } else {
        throw ConfigError("example", "unknown example '" + name + "'");
    }
    return example_source(ex);
}

void add_map_flags(CLI::App* sub, MapFlags& m) {
    sub->add_option("--example", m.example, "Built-in map: nonlinear or linear");
    sub->add_option("--a", m.a, "Linear example coefficient a");
    sub->add_option("--b", m.b, "Linear example coefficient b");
    sub->add_option("--L", m.L, "Linear example half-width L");
    sub->add_option("--config", m.config, "JSON map description");
}

void add_common_flags(CLI::App* sub, RunFlags& f) {
    sub->add_option("--seed", f.cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", f.cfg.threads, "Worker threads (work currently runs on one thread)")
        ->capture_default_str();
}

void add_grid_flags(CLI::App* sub, RunFlags& f) {
    static const std::map<std::string, CellSampling> kSampling{
        {"lattice", CellSampling::Lattice}, {"stratified", CellSampling::Stratified}, {"iid", CellSampling::Iid}};
    sub->add_option("--nx", f.cfg.nx, "Grid cells along x")->capture_default_str();
    sub->add_option("--ny", f.cfg.ny, "Grid cells along y")->capture_default_str();
    sub->add_option("--samples-per-cell", f.cfg.samples_per_cell, "Ulam samples per cell")->capture_default_str();
    sub->add_option("--sampling", f.cfg.sampling, "Sample placement: lattice, stratified or iid")
        ->transform(CLI::CheckedTransformer(kSampling, CLI::ignore_case));
    sub->add_option("--eps0", f.cfg.eps0, "Smallest oscillation radius")->capture_default_str();
    sub->add_flag("--force", f.cfg.force, "Run even when hypotheses fail");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential decay of correlations for piecewise expanding recurrences"};
    app.require_subcommand(1);

    RunFlags check, density, decay, example;

    auto* c = app.add_subcommand("check", "Verify the hypotheses of a map and write report.json");
    add_map_flags(c, check.map);
    add_common_flags(c, check);
    c->add_option("--samples", check.cfg.check_samples, "Samples per piece for each check")->capture_default_str();

    auto* d = app.add_subcommand("density", "Invariant density of the Ulam operator");
    add_map_flags(d, density.map);
    add_common_flags(d, density);
    add_grid_flags(d, density);
    d->add_flag("--write-operator", density.cfg.write_operator, "Also write operator.csv");

    auto* y = app.add_subcommand("decay", "Correlation decay by Monte Carlo and by the operator");
    add_map_flags(y, decay.map);
    add_common_flags(y, decay);
    add_grid_flags(y, decay);
    y->add_option("--trajectories", decay.cfg.trajectories, "Monte Carlo trajectories")->capture_default_str();
    y->add_option("--lags", decay.lags, "Lags, e.g. 0-20 or 1,2,4,8 (default 0-20)");

    auto* e = app.add_subcommand("example", "Check the recorded facts of a built-in example");
    std::string which;
    e->add_option("name", which, "nonlinear or linear")->required()->check(CLI::IsMember({"nonlinear", "linear"}));
    add_map_flags(e, example.map);
    add_common_flags(e, example);
    add_grid_flags(e, example);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : cli::kConfigError;
    }

    auto run = [&](RunFlags& f, const CLI::App& sub, auto&& command) {
        try {
            f.cfg.source = resolve_map(f.map, sub);
            f.cfg.out = f.out;
            if (!f.lags.empty()) f.cfg.lags = parse_lags(f.lags);
        } catch (const ConfigError& err) {
            std::cerr << "config error: " << err.what() << "\n";
            return static_cast<int>(cli::kConfigError);
        }
        return command(f.cfg, std::cout, std::cerr);
    };

    if (*c) return run(check, *c, cli::run_check);
    if (*d) return run(density, *d, cli::run_density);
    if (*y) return run(decay, *y, cli::run_decay);
    if (!example.map.example.empty() && example.map.example != which) {
        std::cerr << "config error: example: conflicting names\n";
        return cli::kConfigError;
    }
    example.map.example = which;
    return run(example, *e, cli::run_example);
}
