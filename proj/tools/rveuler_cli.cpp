// rveuler: run orbit, convergence, entry and compare scenarios and write CSV
// series plus a summary document.
//
//   rveuler orbit --config configs/orbit.json --out out/orbit
//   rveuler convergence --steps 100,200,400 --formulation both
//
// Exit status: 0 success, 2 configuration error, 3 numerical domain error.

#include <rveuler/scenario.hpp>
#include <rveuler/scenario_config.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string formulation;
    std::vector<std::size_t> steps;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw rveuler::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// flags > file > defaults
rveuler::ScenarioConfig build_config(rveuler::ScenarioKind kind, const Options& opt) {
    using namespace rveuler;
    ScenarioConfig c = opt.config_path.empty() ? default_config(kind) : parse_config(read_file(opt.config_path), kind);
    if (c.kind != kind)
        throw ConfigError("scenario: config file declares '" + to_string(c.kind) + "' but the verb is '" +
                          to_string(kind) + "'");
    if (!opt.formulation.empty())
        c.formulation = parse_formulation(opt.formulation);
    if (!opt.steps.empty()) {
        for (auto n : opt.steps)
            if (n < 1)
                throw ConfigError("--steps: step counts must be positive");
        if (kind == ScenarioKind::Convergence) {
            c.integrator.steps_list = opt.steps;
        } else {
            if (opt.steps.size() != 1)
                throw ConfigError("--steps: only the convergence verb accepts a list");
            c.integrator.steps = opt.steps.front();
        }
    }
    return c;
}

int run(rveuler::ScenarioKind kind, const Options& opt) {
    using namespace rveuler;
    ScenarioConfig config;
    RunReport report;
    try {
        config = build_config(kind, opt);
        report = run_scenario(config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PropagationError& e) {
        std::cerr << "domain error at t = " << csv::num(e.time()) << " s: " << e.what() << '\n';
        return kExitDomain;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const InvalidInput& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const std::string out = opt.out_dir.empty() ? "out/" + to_string(kind) : opt.out_dir;
    try {
        for (const auto& f : write_report(report, config, out))
            std::cout << out << '/' << f << '\n';
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return 1;
    }

    for (const auto& r : report.runs)
        if (r.failure)
            std::cerr << to_string(r.formulation) << " run stopped at t = " << csv::num(r.failure->time)
                      << " s: " << r.failure->message << '\n';
    if (const RunFailure* f = blocking_failure(report, config)) {
        std::cerr << "domain error at t = " << csv::num(f->time) << " s\n";
        return kExitDomain;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rv-Euler trajectory scenarios"};
    app.require_subcommand(1);

    Options opt;
    const std::vector<std::pair<rveuler::ScenarioKind, std::string>> verbs = {
        {rveuler::ScenarioKind::Orbit, "Two-body orbit over one period with analytic error series"},
        {rveuler::ScenarioKind::Convergence, "Maximum position error over a sweep of step counts"},
        {rveuler::ScenarioKind::Entry, "Entry forward simulation with path-constraint evaluation"},
        {rveuler::ScenarioKind::Compare, "Two formulations of one orbit and their Cartesian difference"},
    };
    rveuler::ScenarioKind chosen = rveuler::ScenarioKind::Orbit;
    for (const auto& [kind, help] : verbs) {
        auto* sub = app.add_subcommand(rveuler::to_string(kind), help);
        sub->add_option("--config", opt.config_path, "JSON scenario file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "Output directory (default out/<verb>)");
        sub->add_option("--formulation", opt.formulation, "rv-euler | spherical | both")
            ->check(CLI::IsMember({"rv-euler", "spherical", "both"}));
        sub->add_option("--steps", opt.steps, "Step count; comma-separated list for convergence")->delimiter(',');
        sub->callback([&chosen, kind = kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    return run(chosen, opt);
}
