#include <iostream>

#include "CLI11.hpp"
#include "ftj/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::string scenario;
    std::string suite;
    int count = 100;
};

ftj::cli::RunConfig configFrom(const Flags& f) {
    ftj::cli::RunConfig c = ftj::cli::loadConfig(f.config);
    if (f.delta) c.delta = *f.delta;
    if (f.seed) {
        c.seed = *f.seed;
        c.search.seed = *f.seed;
    }
    if (!f.scenario.empty() && f.scenario != c.scenario)
        throw ftj::Error(ftj::ErrorKind::ConfigParseError,
                         "--scenario " + f.scenario + " does not match [run] scenario " + c.scenario);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Front tracking for a two-road junction: scenarios, property suites and control search"};
    app.require_subcommand(1);
    Flags f;

    auto* run = app.add_subcommand("run", "solve a scenario and write fronts, traces, control and report");
    run->add_option("--config", f.config, "scenario file")->required();
    run->add_option("--out", f.out, "output directory (default: [run] out)");
    run->add_option("--delta", f.delta, "front tracking resolution");
    run->add_option("--seed", f.seed, "seed");
    run->add_option("--scenario", f.scenario, "expected scenario name");

    auto* suite = app.add_subcommand("suite", "run a randomized property suite");
    suite->add_option("--suite", f.suite, "maximality | monotone | bvbound | conservation")->required();
    suite->add_option("--seed", f.seed, "seed");
    suite->add_option("--count", f.count, "number of cases");
    suite->add_option("--delta", f.delta, "front tracking resolution");
    suite->add_option("--out", f.out, "directory for the per-case CSV");

    auto* search = app.add_subcommand("search", "search the maximizer set for a small variation functional");
    search->add_option("--config", f.config, "scenario file with a [search] section")->required();
    search->add_option("--out", f.out, "output directory (default: [run] out)");
    search->add_option("--delta", f.delta, "front tracking resolution");
    search->add_option("--seed", f.seed, "seed");
    search->add_option("--scenario", f.scenario, "expected scenario name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : ftj::cli::kConfigError;
    }

    try {
        if (run->parsed()) {
            auto c = configFrom(f);
            return ftj::cli::cmdRun(c, f.out.empty() ? c.out_dir : f.out);
        }
        if (suite->parsed()) {
            std::optional<std::filesystem::path> out;
            if (!f.out.empty()) out = f.out;
            return ftj::cli::cmdSuite(f.suite, f.seed.value_or(1), f.count, f.delta.value_or(1e-3), out, std::cout);
        }
        auto c = configFrom(f);
        return ftj::cli::cmdSearch(c, f.out.empty() ? c.out_dir : f.out);
    } catch (const ftj::Error& e) {
        std::cerr << "error (" << ftj::kindName(e.kind()) << "): " << e.what() << '\n';
        return ftj::cli::exitCodeFor(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return ftj::cli::kInternal;
    }
}
