// Command-line entry point: run, validate, list-presets.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nathedge/config.hpp"
#include "nathedge/error.hpp"
#include "nathedge/experiment.hpp"
#include "nathedge/random.hpp"

namespace {

int fail(const nathedge::Error& e) {
    std::cerr << "nathedge: " << e.what() << '\n';
    return nathedge::exit_code_for(e.category());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural longevity hedging: valuation, calibration, evaluation and regions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", NATHEDGE_VERSION);

    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    unsigned threads = nathedge::default_threads();
    std::string format;

    auto* run = app.add_subcommand("run", "Run an experiment and write its outputs");
    run->add_option("--config", config, "Preset name or path to a JSON config")->required();
    run->add_option("--out-dir", out_dir, "Output directory (overrides the config)");
    run->add_option("--seed", seed, "Random seed (overrides the config)");
    run->add_option("--paths", paths, "Number of simulated paths (overrides the config)")
        ->check(CLI::Range(std::size_t{100}, std::size_t{10000000}));
    run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    run->add_option("--format", format, "Outputs to write")
        ->check(CLI::IsMember({"csv", "svg", "both"}));

    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("--config", config, "Preset name or path to a JSON config")->required();

    app.add_subcommand("list-presets", "List the bundled experiment configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("list-presets")) {
            for (const auto& name : nathedge::list_presets()) std::cout << name << '\n';
            return 0;
        }
        const auto path = nathedge::resolve_config_path(config);
        if (app.got_subcommand("validate")) {
            const auto diags = nathedge::validate_config(path);
            bool config_issue = false;
            for (const auto& d : diags) {
                std::cout << path.string() << ": " << nathedge::to_string(d) << '\n';
                config_issue = config_issue || d.category == nathedge::ErrorCategory::Config;
            }
            if (diags.empty()) {
                std::cout << path.string() << ": ok\n";
                return 0;
            }
            return nathedge::exit_code_for(config_issue ? nathedge::ErrorCategory::Config
                                                        : nathedge::ErrorCategory::Data);
        }

        auto cfg = nathedge::load_config(path);
        nathedge::ConfigOverrides o;
        o.seed = seed;
        o.paths = paths;
        if (!out_dir.empty()) o.output_dir = out_dir;
        if (!format.empty()) o.format = nathedge::parse_output_format(format);
        nathedge::apply_overrides(cfg, o);
        const auto manifest = nathedge::run_experiment(cfg, threads);
        std::cout << "config hash " << manifest.config_hash << ", seed " << manifest.seed << '\n';
        for (const auto& f : manifest.files) {
            std::cout << (cfg.output_dir / f).string() << '\n';
        }
        return 0;
    } catch (const nathedge::Error& e) {
        return fail(e);
    } catch (const std::bad_alloc&) {
        std::cerr << "nathedge: out of memory; reduce --paths\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "nathedge: " << e.what() << '\n';
        return 4;
    }
}
