// cabledyn: simulate | identify [synthesize] | analyze <sub>
//
// Exit codes: 0 ok, 1 other failure, 2 invalid config, 3 diverged, 4 I/O.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cabledyn/cabledyn.hpp"

#ifndef CABLEDYN_PRESET_DIR
#define CABLEDYN_PRESET_DIR "presets"
#endif

namespace {

struct Common {
    std::string config;
    std::string preset;
    std::string out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON run configuration");
    app->add_option("--preset", c.preset, "bundled preset name (see presets/)");
    app->add_option("--out", c.out, "output directory (default: output.dir of the config)");
}

std::string preset_path(const std::string& name) {
    const char* env = std::getenv("CABLEDYN_PRESETS");
    const std::filesystem::path dir = env && *env ? env : CABLEDYN_PRESET_DIR;
    const auto path = dir / (name + ".json");
    if (!std::filesystem::exists(path)) throw cabledyn::ConfigInvalid("unknown preset '" + name + "'");
    return path.string();
}

cabledyn::config::RunConfig load(const Common& c) {
    if (c.config.empty() == c.preset.empty()) throw cabledyn::ConfigInvalid("give exactly one of --config or --preset");
    return cabledyn::config::load_config(c.config.empty() ? preset_path(c.preset) : c.config);
}

std::string out_dir(const Common& c, const cabledyn::config::RunConfig& cfg) {
    return c.out.empty() ? cfg.output.dir : c.out;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = cabledyn::cli;
    CLI::App app{"lumped-mass cable dynamics between two underwater vehicles"};
    app.require_subcommand(1);

    Common sim_opts, id_opts, syn_opts, an_opts;
    std::string dataset;
    auto* simulate = app.add_subcommand("simulate", "integrate the configured scenario");
    add_common(simulate, sim_opts);

    auto* identify = app.add_subcommand("identify", "GA identification of E, C_n, C_t from a tension dataset");
    add_common(identify, id_opts);
    identify->add_option("--dataset", dataset, "dataset CSV (overrides identify.dataset)");
    auto* synthesize = identify->add_subcommand("synthesize", "write a model-generated dataset");
    add_common(synthesize, syn_opts);

    auto* analyze = app.add_subcommand("analyze", "convergence studies, sweeps and spectra");
    analyze->require_subcommand(1);
    const char* subs[] = {"converge-space", "converge-time", "sweep-material", "sweep-length", "spectral"};
    std::vector<CLI::App*> an_subs;
    for (const char* s : subs) {
        an_subs.push_back(analyze->add_subcommand(s));
        add_common(an_subs.back(), an_opts);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kConfigInvalid;
    }

    try {
        if (simulate->parsed()) {
            const auto cfg = load(sim_opts);
            return cli::simulate(cfg, out_dir(sim_opts, cfg));
        }
        if (synthesize->parsed()) {
            const auto cfg = load(syn_opts);
            return cli::identify_synthesize(cfg, out_dir(syn_opts, cfg));
        }
        if (identify->parsed()) {
            const auto cfg = load(id_opts);
            return cli::identify_run(cfg, out_dir(id_opts, cfg), dataset);
        }
        for (std::size_t k = 0; k < an_subs.size(); ++k) {
            if (!an_subs[k]->parsed()) continue;
            const auto cfg = load(an_opts);
            const std::string dir = out_dir(an_opts, cfg);
            switch (k) {
                case 0: return cli::converge_space(cfg, dir);
                case 1: return cli::converge_time(cfg, dir);
                case 2: return cli::sweep_material(cfg, dir);
                case 3: return cli::sweep_length(cfg, dir);
                default: return cli::spectral(cfg, dir);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
    return cli::kFailure;
}
