#pragma once

// The CLI commands. Each one parses nothing itself: it takes a validated
// RunConfig, runs, and writes its files plus manifest.json into the output
// directory.

#include <chrono>
#include <iostream>
#include <string>

#include "cabledyn/config.hpp"
#include "cabledyn/io.hpp"
#include "cabledyn/reports.hpp"

namespace cabledyn::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigInvalid = 2, kDiverged = 3, kIo = 4 };

/// Maps a library error to its exit code.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigInvalid*>(&e) || dynamic_cast<const EmptyDataset*>(&e) ||
        dynamic_cast<const UnknownProfile*>(&e)) {
        return kConfigInvalid;
    }
    if (dynamic_cast<const DivergedState*>(&e)) return kDiverged;
    if (dynamic_cast<const IoError*>(&e)) return kIo;
    return kFailure;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void write_record(io::RunWriter& w, const sim::SimRecord& rec, bool positions) {
    w.csv("record.csv", reports::record_table(rec));
    if (positions && !rec.states.empty()) w.csv("positions.csv", reports::positions_table(rec));
}

template <class T>
const T& require(const std::optional<T>& section, const char* name) {
    if (!section) throw ConfigInvalid(std::string("config has no ") + name + " section");
    return *section;
}

}  // namespace detail

/// Time integration of the configured scenario. A diverged run keeps its
/// partial record and returns exit code 3.
inline int simulate(const config::RunConfig& cfg, const std::string& out_dir) {
    const auto scenario = cfg.scenario.build(cfg.output.record_positions);
    io::RunWriter w(out_dir, "simulate", config::to_json(cfg));
    w.json("config.json", config::to_json(cfg));
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto rec = sim::run_scenario(scenario);
        detail::write_record(w, rec, cfg.output.record_positions);
        w.json("timing.json", {{"runtime_s", detail::seconds_since(t0)}, {"samples", rec.size()}});
        w.write_manifest();
        return kOk;
    } catch (const DivergedState& e) {
        if (e.partial_record()) detail::write_record(w, *e.partial_record(), cfg.output.record_positions);
        w.json("divergence.json", {{"time", e.time()}, {"message", e.what()}});
        w.status("diverged");
        w.write_manifest();
        std::cerr << "error: " << e.what() << "\n";
        return kDiverged;
    }
}

inline int converge_space(const config::RunConfig& cfg, const std::string& out_dir) {
    const analysis::SpatialConvergenceSpec spec =
        cfg.analysis && cfg.analysis->spatial ? *cfg.analysis->spatial : analysis::SpatialConvergenceSpec{};
    cfg.scenario.build(false);
    io::RunWriter w(out_dir, "analyze converge-space", config::to_json(cfg));
    const auto rows = analysis::spatial_convergence(cfg.scenario, spec);
    w.csv("convergence_space.csv", reports::convergence_table(rows, "n"));
    w.json("timing.json", reports::convergence_runtimes(rows, "n"));
    w.write_manifest();
    return kOk;
}

inline int converge_time(const config::RunConfig& cfg, const std::string& out_dir) {
    const analysis::TemporalConvergenceSpec spec =
        cfg.analysis && cfg.analysis->temporal ? *cfg.analysis->temporal : analysis::TemporalConvergenceSpec{};
    cfg.scenario.build(false);
    io::RunWriter w(out_dir, "analyze converge-time", config::to_json(cfg));
    const auto rows = analysis::temporal_convergence(cfg.scenario, spec);
    w.csv("convergence_time.csv", reports::convergence_table(rows, "dt"));
    w.json("timing.json", reports::convergence_runtimes(rows, "dt"));
    w.write_manifest();
    return kOk;
}

inline int sweep_material(const config::RunConfig& cfg, const std::string& out_dir) {
    const analysis::MaterialSweepSpec spec =
        cfg.analysis && cfg.analysis->material ? *cfg.analysis->material : analysis::MaterialSweepSpec{};
    cfg.scenario.build(false);
    io::RunWriter w(out_dir, "analyze sweep-material", config::to_json(cfg));
    const auto t0 = std::chrono::steady_clock::now();
    const auto cells = analysis::material_sweep(cfg.scenario, spec);
    w.csv("sweep_material.csv", reports::material_grid_table(cells));
    w.csv("sweep_material_cells.csv", reports::material_cells_table(cells));
    w.json("timing.json", {{"runtime_s", detail::seconds_since(t0)}, {"cells", cells.size()}});
    w.write_manifest();
    return kOk;
}

inline int sweep_length(const config::RunConfig& cfg, const std::string& out_dir) {
    const analysis::LengthSweepSpec spec =
        cfg.analysis && cfg.analysis->length ? *cfg.analysis->length : analysis::LengthSweepSpec{};
    io::RunWriter w(out_dir, "analyze sweep-length", config::to_json(cfg));
    const auto res = analysis::length_sweep(cfg.scenario, spec);
    w.csv("sweep_length_shapes.csv", reports::length_shapes_table(res));
    w.csv("sweep_length_summary.csv", reports::length_summary_table(res));
    w.json("sweep_length.json", {{"midpoint_spread", io::Json::array({res.midpoint_spread.x(), res.midpoint_spread.y(),
                                                                      res.midpoint_spread.z()})},
                                 {"spread", res.spread}});
    w.write_manifest();
    return kOk;
}

/// Runs the scenario, picks the slack and taut snapshots and reports the
/// spectrum of each.
inline int spectral(const config::RunConfig& cfg, const std::string& out_dir) {
    const config::SpectralSection spec =
        cfg.analysis && cfg.analysis->spectral ? *cfg.analysis->spectral : config::SpectralSection{};
    const auto scenario = cfg.scenario.build(true);
    io::RunWriter w(out_dir, "analyze spectral", config::to_json(cfg));
    const auto rec = sim::run_scenario(scenario);
    w.csv("record.csv", reports::record_table(rec));
    const auto [slack, taut] = spectral::select_snapshots(rec, spec.selection);
    io::Json summary = io::Json::object();
    for (const auto& [name, idx] : {std::pair<std::string, std::size_t>{"slack", slack}, {"taut", taut}}) {
        const auto& snap = rec.states[idx];
        const auto report =
            spectral::analyze_snapshot(snap, scenario.cable, scenario.current, scenario.integrator, spec.linearize,
                                       spec.options);
        const double chord = (snap.positions.back() - snap.positions.front()).norm();
        w.csv("spectral_" + name + "_eigenvalues.csv", reports::eigenvalue_table(report));
        w.csv("spectral_" + name + "_influence.csv", reports::influence_table(report));
        summary[name] = reports::spectral_summary(report, snap.time, chord, scenario.cable.node_count);
    }
    summary["taut_phase_exceeds_slack"] =
        summary["taut"]["max_dominant_stable_phase"].get<double>() >
        summary["slack"]["max_dominant_stable_phase"].get<double>();
    w.json("spectral_summary.json", summary);
    w.write_manifest();
    return kOk;
}

/// Forward model for dataset generation: the identification model with the
/// tighter synthesis steady-state settings.
inline identify::ModelConfig synthesis_model(const config::RunConfig& cfg) {
    auto model = config::model_config(cfg);
    if (cfg.identify) {
        model.steady.t_max = std::max(model.steady.t_max, cfg.identify->synth_t_max);
        model.steady.tolerance = std::min(model.steady.tolerance, cfg.identify->synth_tolerance);
    }
    return model;
}

/// Model-generated dataset at identify.truth over identify.separations.
inline int identify_synthesize(const config::RunConfig& cfg, const std::string& out_dir) {
    const auto& sec = detail::require(cfg.identify, "identify");
    if (sec.separations.empty()) throw ConfigInvalid("identify.separations is empty");
    identify::Dataset layout;
    for (const auto& [x, y] : sec.separations) {
        if (x < 0.0 || y < 0.0 || std::hypot(x, y) > cfg.scenario.cable.length) {
            throw ConfigInvalid("identify.separations must be non-negative and within the cable length");
        }
        layout.push_back({x, y, sec.speed});
    }
    const identify::ParamVector truth = sec.truth.value_or(identify::ParamVector{});
    io::RunWriter w(out_dir, "identify synthesize", config::to_json(cfg));
    w.seed(sec.noise_seed);
    const auto data = identify::synthesize(truth, layout, synthesis_model(cfg), sec.noise, sec.noise_seed);
    w.csv("dataset.csv", reports::dataset_table(data));
    w.write_manifest();
    return kOk;
}

/// GA identification against the configured (or given) dataset.
inline int identify_run(const config::RunConfig& cfg, const std::string& out_dir, const std::string& dataset_path) {
    const auto& ga = detail::require(cfg.ga, "ga");
    ga.validate();
    const auto model = config::model_config(cfg);
    std::string path = dataset_path;
    if (path.empty()) {
        if (!cfg.identify || cfg.identify->dataset.empty()) throw ConfigInvalid("no dataset given");
        path = (std::filesystem::path(cfg.scenario.base_dir) / cfg.identify->dataset).string();
    }
    if (!std::filesystem::exists(path)) throw ConfigInvalid("dataset file not found: " + path);
    const auto data = identify::read_dataset(path, model.cable.length);
    io::RunWriter w(out_dir, "identify", config::to_json(cfg));
    w.seed(*ga.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = identify::identify(data, ga, model);
    const double runtime = detail::seconds_since(t0);
    const auto stats = identify::rmse_mse_report(data, res.best, model);
    w.csv("identify_history.csv", reports::ga_history_table(res, ga.identify_added_mass));
    io::Json report{{"best", config::to_json(res.best)},
                    {"best_fitness", res.best_fitness},
                    {"evaluations", res.evaluations},
                    {"samples", data.size()},
                    {"channels", reports::channel_json(stats)},
                    {"runtime_s", runtime}};
    if (cfg.identify && cfg.identify->truth) {
        const auto& t = *cfg.identify->truth;
        report["truth"] = config::to_json(t);
        report["relative_error"] = {
            {"youngs_modulus", res.best.youngs_modulus / t.youngs_modulus - 1.0},
            {"normal_drag_coeff", res.best.normal_drag_coeff / t.normal_drag_coeff - 1.0},
            {"tangential_drag_coeff", res.best.tangential_drag_coeff / t.tangential_drag_coeff - 1.0}};
    }
    w.json("identify_report.json", report);
    w.write_manifest();
    return kOk;
}

}  // namespace cabledyn::cli
