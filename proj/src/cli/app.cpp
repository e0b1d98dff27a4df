#include "app.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "demos.hpp"
#include "fit.hpp"
#include "margin/error.hpp"

namespace margin::cli {

namespace {

struct RawOptions {
    std::string format = "csv";
    std::vector<std::string> sets;
    std::map<std::string, std::string> aliases;
};

void add_common(CLI::App& app, RunConfig& config, RawOptions& raw) {
    app.add_option("--seed", config.seed, "64-bit RNG seed")->capture_default_str();
    app.add_option("--out", config.out_dir, "output directory")->capture_default_str();
    app.add_option("--format", raw.format, "csv, json or both")->capture_default_str();
    app.add_flag("--svg", config.svg, "also write SVG plots");
    app.add_option("--grid-1d", config.grid_1d, "nodes per 1-D grid axis");
    app.add_option("--grid-2d", config.grid_2d, "nodes per axis of 2-D grids");
    app.add_option("--set", raw.sets, "parameter override key=value (repeatable)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    RawOptions raw;
    CLI::App app{"Grid-based marginal and profile likelihood demonstrations"};
    app.require_subcommand(1);

    std::string demo_list;
    for (const auto& n : demo_names()) demo_list += (demo_list.empty() ? "" : ", ") + n;
    auto* demo = app.add_subcommand("demo", "run a demonstration: " + demo_list);
    demo->add_option("name", config.name, "demo name")->required();
    add_common(*demo, config, raw);
    for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
             {"--pairs", "pairs"}, {"--sigma", "sigma"}, {"--flips", "flips"},
             {"--p", "p"}, {"--trials", "trials"}, {"--observed", "observed"}}) {
        demo->add_option_function<std::string>(
            flag, [&raw, key = key](const std::string& v) { raw.aliases[key] = v; }, "same as --set " + key + "=...");
    }

    auto* fit = app.add_subcommand("fit", "fit a data file");
    fit->require_subcommand(1);
    auto* counts = fit->add_subcommand("counts", "binned counts with a gamma discrepancy");
    counts->add_option("file", config.input, "CSV with header t,count")->required();
    config.model = "constant";
    counts->add_option("--model", config.model, "constant or pulse")->capture_default_str();
    add_common(*counts, config, raw);

    auto* list = app.add_subcommand("list", "print demo names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (list->parsed()) {
            for (const auto& n : demo_names()) out << n << '\n';
            return kExitOk;
        }
        config.format = parse_format(raw.format);
        for (const auto& s : raw.sets) {
            const auto [k, v] = parse_assignment(s);
            config.overrides[k] = v;
        }
        for (const auto& [k, v] : raw.aliases) config.overrides[k] = v;

        nlohmann::json manifest;
        if (demo->parsed()) {
            config.command = "demo";
            manifest = run_demo(config);
        } else {
            config.command = "fit";
            config.name = "counts";
            manifest = run_fit(config);
        }
        out << "wrote " << manifest["outputs"].size() + 1 << " files to " << config.out_dir.string() << '\n';
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace margin::cli
