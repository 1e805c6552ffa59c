#pragma once

// JSON run configuration. Every object rejects keys it does not know, and
// to_json(from_json(x)) re-parses to an equal value.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabledyn/analysis.hpp"
#include "cabledyn/errors.hpp"
#include "cabledyn/identify.hpp"
#include "cabledyn/sim.hpp"
#include "cabledyn/spectral.hpp"

namespace cabledyn::config {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct OutputConfig {
    std::string dir = "out";
    bool record_positions = true;

    bool operator==(const OutputConfig&) const = default;
};

/// Forward-model and dataset settings for `identify`.
struct IdentifySection {
    std::string dataset;  // CSV, relative to the config file
    bool include_z = false;
    double penalty = 1e9;
    double dt_safety = 0.5;
    // layout used by `identify synthesize`
    std::vector<std::pair<double, double>> separations;  // (X_d, Y_d)
    double speed = 0.514;
    double noise = 0.0;
    std::uint64_t noise_seed = 0;
    double synth_t_max = 300.0;     // s, steady-state cap for dataset generation
    double synth_tolerance = 1e-3;  // N, steady-state tolerance for dataset generation
    std::optional<identify::ParamVector> truth;  // generating parameters

    bool operator==(const IdentifySection&) const = default;
};

struct SpectralSection {
    spectral::SnapshotSelection selection;
    spectral::LinearizeOptions linearize;
    spectral::SpectralOptions options;

    bool operator==(const SpectralSection&) const = default;
};

struct AnalysisSection {
    std::optional<analysis::SpatialConvergenceSpec> spatial;
    std::optional<analysis::TemporalConvergenceSpec> temporal;
    std::optional<analysis::MaterialSweepSpec> material;
    std::optional<analysis::LengthSweepSpec> length;
    std::optional<SpectralSection> spectral;

    bool operator==(const AnalysisSection&) const = default;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    sim::ScenarioSpec scenario;
    sim::SteadyOptions steady;
    OutputConfig output;
    std::optional<identify::GaConfig> ga;
    std::optional<IdentifySection> identify;
    std::optional<AnalysisSection> analysis;

    bool operator==(const RunConfig& o) const {
        sim::ScenarioSpec a = scenario, b = o.scenario;
        a.base_dir.clear();
        b.base_dir.clear();
        return schema_version == o.schema_version && a == b && steady == o.steady && output == o.output &&
               ga == o.ga && identify == o.identify && analysis == o.analysis;
    }
};

namespace detail {

/// Walks one JSON object, records the keys read and rejects the rest.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigInvalid(path_ + " must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        const Json& v = at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigInvalid(child(key) + " must be a number");
                out = v.get<double>();
            } else if constexpr (std::is_same_v<T, int>) {
                if (!v.is_number_integer()) throw ConfigInvalid(child(key) + " must be an integer");
                out = v.get<int>();
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                    throw ConfigInvalid(child(key) + " must be a non-negative integer");
                }
                out = v.get<std::uint64_t>();
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigInvalid(child(key) + " must be a boolean");
                out = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigInvalid(child(key) + " must be a string");
                out = v.get<std::string>();
            } else if constexpr (std::is_same_v<T, Vec3>) {
                if (!v.is_array() || v.size() != 3) throw ConfigInvalid(child(key) + " must be [x, y, z]");
                for (int i = 0; i < 3; ++i) {
                    if (!v[i].is_number()) throw ConfigInvalid(child(key) + " must hold numbers");
                    out[i] = v[i].get<double>();
                }
            } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
                if (!v.is_array()) throw ConfigInvalid(child(key) + " must be an array");
                out.clear();
                for (const auto& e : v) {
                    if (!e.is_number()) throw ConfigInvalid(child(key) + " must hold numbers");
                    if constexpr (std::is_same_v<T, std::vector<int>>) {
                        if (!e.is_number_integer()) throw ConfigInvalid(child(key) + " must hold integers");
                    }
                    out.push_back(e.get<typename T::value_type>());
                }
            } else {
                static_assert(sizeof(T) == 0, "unsupported config field type");
            }
        } catch (const Json::exception& e) {
            throw ConfigInvalid(child(key) + ": " + e.what());
        }
    }

    /// Throws when the object has keys that were never read.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigInvalid("unknown key '" + child(it.key()) + "'");
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline Json vec(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Sections
// ---------------------------------------------------------------------------

inline cable::CableProperties parse_cable(const Json& j, const std::string& path = "cable") {
    detail::ObjectReader r(j, path);
    cable::CableProperties p;
    r.get("node_count", p.node_count);
    r.get("cable_density", p.cable_density);
    r.get("water_density", p.water_density);
    r.get("cross_section", p.cross_section);
    r.get("added_mass_coeff", p.added_mass_coeff);
    r.get("youngs_modulus", p.youngs_modulus);
    r.get("normal_drag_coeff", p.normal_drag_coeff);
    r.get("tangential_drag_coeff", p.tangential_drag_coeff);
    r.get("diameter", p.diameter);
    r.get("length", p.length);
    r.get("bending_stiffness", p.bending_stiffness);
    std::string density = "water";
    r.get("added_mass_density", density);
    if (density == "water") {
        p.added_mass_density = cable::AddedMassDensity::water;
    } else if (density == "cable") {
        p.added_mass_density = cable::AddedMassDensity::cable;
    } else {
        throw ConfigInvalid(path + ".added_mass_density must be \"water\" or \"cable\"");
    }
    r.get("gravity", p.gravity);
    r.finish();
    p.validate();
    return p;
}

inline Json to_json(const cable::CableProperties& p) {
    return {{"node_count", p.node_count},
            {"cable_density", p.cable_density},
            {"water_density", p.water_density},
            {"cross_section", p.cross_section},
            {"added_mass_coeff", p.added_mass_coeff},
            {"youngs_modulus", p.youngs_modulus},
            {"normal_drag_coeff", p.normal_drag_coeff},
            {"tangential_drag_coeff", p.tangential_drag_coeff},
            {"diameter", p.diameter},
            {"length", p.length},
            {"bending_stiffness", p.bending_stiffness},
            {"added_mass_density", p.added_mass_density == cable::AddedMassDensity::water ? "water" : "cable"},
            {"gravity", detail::vec(p.gravity)}};
}

inline sim::IntegratorConfig parse_integrator(const Json& j) {
    detail::ObjectReader r(j, "integrator");
    sim::IntegratorConfig c;
    r.get("dt", c.dt);
    std::string scheme = sim::to_string(c.scheme);
    r.get("scheme", scheme);
    c.scheme = sim::scheme_from_string(scheme);
    r.get("t_end", c.t_end);
    r.get("record_stride", c.record_stride);
    r.finish();
    c.validate();
    return c;
}

inline Json to_json(const sim::IntegratorConfig& c) {
    return {{"dt", c.dt}, {"scheme", sim::to_string(c.scheme)}, {"t_end", c.t_end}, {"record_stride", c.record_stride}};
}

inline auv::ProfileSpec parse_profile(const Json& j, const std::string& path) {
    detail::ObjectReader r(j, path);
    auv::ProfileSpec s;
    r.get("kind", s.kind);
    r.get("position", s.position);
    r.get("velocity", s.velocity);
    r.get("direction", s.direction);
    r.get("t_start", s.t_start);
    r.get("ramp", s.ramp);
    r.get("mean", s.mean);
    r.get("amplitude", s.amplitude);
    r.get("omega", s.omega);
    r.get("phase", s.phase);
    if (r.has("ramps")) {
        const Json& ramps = r.at("ramps");
        if (!ramps.is_array()) throw ConfigInvalid(path + ".ramps must be an array");
        for (std::size_t k = 0; k < ramps.size(); ++k) {
            detail::ObjectReader rr(ramps[k], path + ".ramps[" + std::to_string(k) + "]");
            auv::VelocityRamp v;
            rr.get("t_start", v.t_start);
            rr.get("duration", v.duration);
            rr.get("delta_velocity", v.delta_velocity);
            rr.finish();
            s.ramps.push_back(v);
        }
    }
    r.get("cruise_speed", s.cruise_speed);
    r.get("accel_start", s.accel_start);
    r.get("accel_duration", s.accel_duration);
    r.get("shift_start", s.shift_start);
    r.get("shift_duration", s.shift_duration);
    r.get("shift_ramp", s.shift_ramp);
    r.get("shift", s.shift);
    r.get("file", s.file);
    r.finish();
    static const std::set<std::string> kinds{"constant", "ramp_hold", "sinusoidal", "schedule",
                                             "formation_transition", "piecewise"};
    if (!kinds.count(s.kind)) throw ConfigInvalid(path + ".kind: unknown profile '" + s.kind + "'");
    return s;
}

inline Json to_json(const auv::ProfileSpec& s) {
    Json ramps = Json::array();
    for (const auto& v : s.ramps) {
        ramps.push_back({{"t_start", v.t_start}, {"duration", v.duration}, {"delta_velocity", detail::vec(v.delta_velocity)}});
    }
    return {{"kind", s.kind},
            {"position", detail::vec(s.position)},
            {"velocity", detail::vec(s.velocity)},
            {"direction", detail::vec(s.direction)},
            {"t_start", s.t_start},
            {"ramp", s.ramp},
            {"mean", s.mean},
            {"amplitude", s.amplitude},
            {"omega", s.omega},
            {"phase", s.phase},
            {"ramps", ramps},
            {"cruise_speed", s.cruise_speed},
            {"accel_start", s.accel_start},
            {"accel_duration", s.accel_duration},
            {"shift_start", s.shift_start},
            {"shift_duration", s.shift_duration},
            {"shift_ramp", s.shift_ramp},
            {"shift", detail::vec(s.shift)},
            {"file", s.file}};
}

inline sim::SteadyOptions parse_steady(const Json& j) {
    detail::ObjectReader r(j, "steady");
    sim::SteadyOptions s;
    r.get("window", s.window);
    r.get("tolerance", s.tolerance);
    r.get("t_max", s.t_max);
    r.get("check_interval", s.check_interval);
    r.finish();
    if (!(s.window > 0.0) || !(s.tolerance > 0.0) || !(s.t_max > 0.0) || !(s.check_interval > 0.0)) {
        throw ConfigInvalid("steady.* values must be > 0");
    }
    return s;
}

inline Json to_json(const sim::SteadyOptions& s) {
    return {{"window", s.window}, {"tolerance", s.tolerance}, {"t_max", s.t_max}, {"check_interval", s.check_interval}};
}

inline identify::Bounds parse_bounds(const Json& j, const std::string& path, identify::Bounds b) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigInvalid(path + " must be [lower, upper]");
    }
    b.lower = j[0].get<double>();
    b.upper = j[1].get<double>();
    return b;
}

inline identify::ParamVector parse_params(const Json& j, const std::string& path) {
    detail::ObjectReader r(j, path);
    identify::ParamVector p;
    r.get("youngs_modulus", p.youngs_modulus);
    r.get("normal_drag_coeff", p.normal_drag_coeff);
    r.get("tangential_drag_coeff", p.tangential_drag_coeff);
    if (r.has("added_mass_coeff")) {
        double k = 0.0;
        r.get("added_mass_coeff", k);
        p.added_mass_coeff = k;
    }
    r.finish();
    return p;
}

inline Json to_json(const identify::ParamVector& p) {
    Json j{{"youngs_modulus", p.youngs_modulus},
           {"normal_drag_coeff", p.normal_drag_coeff},
           {"tangential_drag_coeff", p.tangential_drag_coeff}};
    if (p.added_mass_coeff) j["added_mass_coeff"] = *p.added_mass_coeff;
    return j;
}

inline identify::GaConfig parse_ga(const Json& j) {
    detail::ObjectReader r(j, "ga");
    identify::GaConfig g;
    r.get("population", g.population);
    r.get("generations", g.generations);
    r.get("tournament", g.tournament);
    r.get("crossover_rate", g.crossover_rate);
    r.get("blend_alpha", g.blend_alpha);
    r.get("mutation_rate", g.mutation_rate);
    r.get("mutation_scale", g.mutation_scale);
    r.get("elitism", g.elitism);
    if (r.has("seed")) {
        std::uint64_t seed = 0;
        r.get("seed", seed);
        g.seed = seed;
    }
    if (r.has("bounds")) {
        detail::ObjectReader b(r.at("bounds"), "ga.bounds");
        if (b.has("youngs_modulus")) g.youngs_modulus = parse_bounds(b.at("youngs_modulus"), "ga.bounds.youngs_modulus", g.youngs_modulus);
        if (b.has("normal_drag_coeff")) g.normal_drag = parse_bounds(b.at("normal_drag_coeff"), "ga.bounds.normal_drag_coeff", g.normal_drag);
        if (b.has("tangential_drag_coeff")) g.tangential_drag = parse_bounds(b.at("tangential_drag_coeff"), "ga.bounds.tangential_drag_coeff", g.tangential_drag);
        if (b.has("added_mass_coeff")) g.added_mass = parse_bounds(b.at("added_mass_coeff"), "ga.bounds.added_mass_coeff", g.added_mass);
        b.finish();
    }
    r.get("identify_added_mass", g.identify_added_mass);
    if (r.has("initial_population")) {
        const Json& pop = r.at("initial_population");
        if (!pop.is_array()) throw ConfigInvalid("ga.initial_population must be an array");
        for (std::size_t k = 0; k < pop.size(); ++k) {
            g.initial_population.push_back(parse_params(pop[k], "ga.initial_population[" + std::to_string(k) + "]"));
        }
    }
    r.finish();
    g.validate();
    return g;
}

inline Json to_json(const identify::GaConfig& g) {
    auto b = [](const identify::Bounds& x) { return Json::array({x.lower, x.upper}); };
    Json pop = Json::array();
    for (const auto& p : g.initial_population) pop.push_back(to_json(p));
    Json j{{"population", g.population},
           {"generations", g.generations},
           {"tournament", g.tournament},
           {"crossover_rate", g.crossover_rate},
           {"blend_alpha", g.blend_alpha},
           {"mutation_rate", g.mutation_rate},
           {"mutation_scale", g.mutation_scale},
           {"elitism", g.elitism},
           {"bounds",
            {{"youngs_modulus", b(g.youngs_modulus)},
             {"normal_drag_coeff", b(g.normal_drag)},
             {"tangential_drag_coeff", b(g.tangential_drag)},
             {"added_mass_coeff", b(g.added_mass)}}},
           {"identify_added_mass", g.identify_added_mass},
           {"initial_population", pop}};
    if (g.seed) j["seed"] = *g.seed;
    return j;
}

inline IdentifySection parse_identify(const Json& j) {
    detail::ObjectReader r(j, "identify");
    IdentifySection s;
    r.get("dataset", s.dataset);
    r.get("include_z", s.include_z);
    r.get("penalty", s.penalty);
    r.get("dt_safety", s.dt_safety);
    if (r.has("separations")) {
        const Json& a = r.at("separations");
        if (!a.is_array()) throw ConfigInvalid("identify.separations must be an array of [X_d, Y_d]");
        for (const auto& e : a) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw ConfigInvalid("identify.separations must be an array of [X_d, Y_d]");
            }
            s.separations.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
    }
    r.get("speed", s.speed);
    r.get("noise", s.noise);
    r.get("noise_seed", s.noise_seed);
    r.get("synth_t_max", s.synth_t_max);
    r.get("synth_tolerance", s.synth_tolerance);
    if (r.has("truth")) s.truth = parse_params(r.at("truth"), "identify.truth");
    r.finish();
    if (!(s.penalty > 0.0)) throw ConfigInvalid("identify.penalty must be > 0");
    if (!(s.dt_safety > 0.0 && s.dt_safety <= 1.0)) throw ConfigInvalid("identify.dt_safety must be in (0, 1]");
    if (!(s.noise >= 0.0)) throw ConfigInvalid("identify.noise must be >= 0");
    if (!(s.synth_t_max > 0.0)) throw ConfigInvalid("identify.synth_t_max must be > 0");
    if (!(s.synth_tolerance > 0.0)) throw ConfigInvalid("identify.synth_tolerance must be > 0");
    return s;
}

inline Json to_json(const IdentifySection& s) {
    Json seps = Json::array();
    for (const auto& [x, y] : s.separations) seps.push_back(Json::array({x, y}));
    Json j{{"dataset", s.dataset},     {"include_z", s.include_z}, {"penalty", s.penalty},
           {"dt_safety", s.dt_safety}, {"separations", seps},      {"speed", s.speed},
           {"noise", s.noise},         {"noise_seed", s.noise_seed}, {"synth_t_max", s.synth_t_max},
           {"synth_tolerance", s.synth_tolerance}};
    if (s.truth) j["truth"] = to_json(*s.truth);
    return j;
}

inline analysis::BendingRule bending_rule_from_string(const std::string& s) {
    if (s == "fixed") return analysis::BendingRule::fixed;
    if (s == "solid_section") return analysis::BendingRule::solid_section;
    if (s == "solid_section_ref") return analysis::BendingRule::solid_section_ref;
    throw ConfigInvalid("analysis.material.bending must be fixed, solid_section or solid_section_ref");
}

inline std::string to_string(analysis::BendingRule b) {
    switch (b) {
        case analysis::BendingRule::fixed: return "fixed";
        case analysis::BendingRule::solid_section: return "solid_section";
        case analysis::BendingRule::solid_section_ref: return "solid_section_ref";
    }
    return "fixed";
}

inline AnalysisSection parse_analysis(const Json& j) {
    detail::ObjectReader r(j, "analysis");
    AnalysisSection a;
    if (r.has("spatial")) {
        detail::ObjectReader s(r.at("spatial"), "analysis.spatial");
        analysis::SpatialConvergenceSpec v;
        s.get("segments", v.segments);
        s.get("stations", v.stations);
        s.finish();
        if (v.segments.empty()) throw ConfigInvalid("analysis.spatial.segments is empty");
        for (int n : v.segments) {
            if (n < 3) throw ConfigInvalid("analysis.spatial.segments entries must be >= 3");
        }
        if (v.stations < 2) throw ConfigInvalid("analysis.spatial.stations must be >= 2");
        a.spatial = v;
    }
    if (r.has("temporal")) {
        detail::ObjectReader s(r.at("temporal"), "analysis.temporal");
        analysis::TemporalConvergenceSpec v;
        s.get("time_steps", v.time_steps);
        s.get("sample_interval", v.sample_interval);
        s.get("stations", v.stations);
        s.finish();
        if (v.time_steps.empty()) throw ConfigInvalid("analysis.temporal.time_steps is empty");
        for (double dt : v.time_steps) {
            if (!(dt > 0.0)) throw ConfigInvalid("analysis.temporal.time_steps entries must be > 0");
        }
        if (!(v.sample_interval > 0.0)) throw ConfigInvalid("analysis.temporal.sample_interval must be > 0");
        if (v.stations < 2) throw ConfigInvalid("analysis.temporal.stations must be >= 2");
        a.temporal = v;
    }
    if (r.has("material")) {
        detail::ObjectReader s(r.at("material"), "analysis.material");
        analysis::MaterialSweepSpec v;
        s.get("d_min", v.d_min);
        s.get("d_max", v.d_max);
        s.get("E_min", v.E_min);
        s.get("E_max", v.E_max);
        s.get("d_samples", v.d_samples);
        s.get("E_samples", v.E_samples);
        s.get("d_values", v.d_values);
        s.get("E_values", v.E_values);
        std::string bending = to_string(v.bending);
        s.get("bending", bending);
        v.bending = bending_rule_from_string(bending);
        s.get("reference_modulus", v.reference_modulus);
        s.get("cross_section_from_diameter", v.cross_section_from_diameter);
        s.get("dt_safety", v.dt_safety);
        s.get("average_window", v.average_window);
        s.get("steady_tolerance", v.steady_tolerance);
        s.finish();
        v.diameters();
        v.moduli();
        if (!(v.dt_safety > 0.0 && v.dt_safety <= 1.0)) throw ConfigInvalid("analysis.material.dt_safety must be in (0, 1]");
        if (!(v.average_window > 0.0)) throw ConfigInvalid("analysis.material.average_window must be > 0");
        a.material = v;
    }
    if (r.has("length")) {
        detail::ObjectReader s(r.at("length"), "analysis.length");
        analysis::LengthSweepSpec v;
        s.get("lateral_fraction", v.lateral_fraction);
        s.get("longitudinal_fraction", v.longitudinal_fraction);
        s.get("lengths", v.lengths);
        s.get("speed", v.speed);
        s.get("stations", v.stations);
        s.finish();
        if (v.lengths.empty()) throw ConfigInvalid("analysis.length.lengths is empty");
        if (std::hypot(v.lateral_fraction, v.longitudinal_fraction) > 1.0) {
            throw ConfigInvalid("analysis.length separation exceeds the cable length");
        }
        a.length = v;
    }
    if (r.has("spectral")) {
        detail::ObjectReader s(r.at("spectral"), "analysis.spectral");
        SpectralSection v;
        s.get("t_from", v.selection.t_from);
        if (s.has("slack_time")) {
            double t = 0.0;
            s.get("slack_time", t);
            v.selection.slack_time = t;
        }
        if (s.has("taut_time")) {
            double t = 0.0;
            s.get("taut_time", t);
            v.selection.taut_time = t;
        }
        s.get("delta", v.linearize.delta);
        s.get("dominant_count", v.options.dominant_count);
        s.finish();
        if (!(v.linearize.delta > 0.0)) throw ConfigInvalid("analysis.spectral.delta must be > 0");
        if (v.options.dominant_count < 1) throw ConfigInvalid("analysis.spectral.dominant_count must be >= 1");
        a.spectral = v;
    }
    r.finish();
    return a;
}

inline Json to_json(const AnalysisSection& a) {
    Json j = Json::object();
    if (a.spatial) j["spatial"] = {{"segments", a.spatial->segments}, {"stations", a.spatial->stations}};
    if (a.temporal) {
        j["temporal"] = {{"time_steps", a.temporal->time_steps},
                         {"sample_interval", a.temporal->sample_interval},
                         {"stations", a.temporal->stations}};
    }
    if (a.material) {
        const auto& m = *a.material;
        j["material"] = {{"d_min", m.d_min},
                         {"d_max", m.d_max},
                         {"E_min", m.E_min},
                         {"E_max", m.E_max},
                         {"d_samples", m.d_samples},
                         {"E_samples", m.E_samples},
                         {"d_values", m.d_values},
                         {"E_values", m.E_values},
                         {"bending", to_string(m.bending)},
                         {"reference_modulus", m.reference_modulus},
                         {"cross_section_from_diameter", m.cross_section_from_diameter},
                         {"dt_safety", m.dt_safety},
                         {"average_window", m.average_window},
                         {"steady_tolerance", m.steady_tolerance}};
    }
    if (a.length) {
        j["length"] = {{"lateral_fraction", a.length->lateral_fraction},
                       {"longitudinal_fraction", a.length->longitudinal_fraction},
                       {"lengths", a.length->lengths},
                       {"speed", a.length->speed},
                       {"stations", a.length->stations}};
    }
    if (a.spectral) {
        Json s{{"t_from", a.spectral->selection.t_from},
               {"delta", a.spectral->linearize.delta},
               {"dominant_count", a.spectral->options.dominant_count}};
        if (a.spectral->selection.slack_time) s["slack_time"] = *a.spectral->selection.slack_time;
        if (a.spectral->selection.taut_time) s["taut_time"] = *a.spectral->selection.taut_time;
        j["spectral"] = s;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Whole config
// ---------------------------------------------------------------------------

inline sim::InitialVelocity initial_velocity_from_string(const std::string& s) {
    if (s == "zero") return sim::InitialVelocity::zero;
    if (s == "co_moving") return sim::InitialVelocity::co_moving;
    throw ConfigInvalid("initial.velocity must be \"zero\" or \"co_moving\"");
}

/// Parses and validates a config. `base_dir` resolves relative file paths.
inline RunConfig parse_config(const Json& j, const std::string& base_dir = "") {
    detail::ObjectReader r(j, "");
    RunConfig c;
    if (!r.has("schema_version")) throw ConfigInvalid("schema_version is required");
    r.get("schema_version", c.schema_version);
    if (c.schema_version != kSchemaVersion) {
        throw ConfigInvalid("unsupported schema_version " + std::to_string(c.schema_version));
    }
    auto& sc = c.scenario;
    sc.base_dir = base_dir;
    if (r.has("cable")) sc.cable = parse_cable(r.at("cable"));
    if (r.has("integrator")) sc.integrator = parse_integrator(r.at("integrator"));
    if (r.has("boundary")) {
        detail::ObjectReader b(r.at("boundary"), "boundary");
        if (b.has("first")) sc.first = parse_profile(b.at("first"), "boundary.first");
        if (b.has("second")) sc.second = parse_profile(b.at("second"), "boundary.second");
        b.finish();
    }
    if (r.has("current")) {
        detail::ObjectReader cr(r.at("current"), "current");
        cr.get("uniform", sc.current);
        cr.finish();
    }
    if (r.has("initial")) {
        detail::ObjectReader ir(r.at("initial"), "initial");
        std::string v = "zero";
        ir.get("velocity", v);
        sc.initial_velocity = initial_velocity_from_string(v);
        ir.get("bowed", sc.initial_shape.bowed);
        ir.get("bow_direction", sc.initial_shape.bow_direction);
        ir.finish();
        if (!(sc.initial_shape.bow_direction.norm() > 0.0)) throw ConfigInvalid("initial.bow_direction must be non-zero");
    }
    if (r.has("classification")) {
        detail::ObjectReader cr(r.at("classification"), "classification");
        cr.get("chord_ratio", sc.thresholds.chord_ratio);
        cr.finish();
        if (!(sc.thresholds.chord_ratio > 0.0 && sc.thresholds.chord_ratio <= 1.5)) {
            throw ConfigInvalid("classification.chord_ratio must be in (0, 1.5]");
        }
    }
    if (r.has("steady")) c.steady = parse_steady(r.at("steady"));
    if (r.has("output")) {
        detail::ObjectReader o(r.at("output"), "output");
        o.get("dir", c.output.dir);
        o.get("record_positions", c.output.record_positions);
        o.finish();
    }
    if (r.has("ga")) c.ga = parse_ga(r.at("ga"));
    if (r.has("identify")) c.identify = parse_identify(r.at("identify"));
    if (r.has("analysis")) c.analysis = parse_analysis(r.at("analysis"));
    r.finish();

    for (const auto* p : {&sc.first, &sc.second}) {
        if (p->kind == "piecewise") {
            if (p->file.empty()) throw ConfigInvalid("piecewise profile needs a file");
            const auto path = std::filesystem::path(base_dir) / p->file;
            if (!std::filesystem::exists(path)) throw ConfigInvalid("trajectory file not found: " + path.string());
        }
    }
    return c;
}

inline Json to_json(const RunConfig& c) {
    const auto& sc = c.scenario;
    Json j{{"schema_version", c.schema_version},
           {"cable", to_json(sc.cable)},
           {"integrator", to_json(sc.integrator)},
           {"boundary", {{"first", to_json(sc.first)}, {"second", to_json(sc.second)}}},
           {"current", {{"uniform", detail::vec(sc.current)}}},
           {"initial",
            {{"velocity", sc.initial_velocity == sim::InitialVelocity::zero ? "zero" : "co_moving"},
             {"bowed", sc.initial_shape.bowed},
             {"bow_direction", detail::vec(sc.initial_shape.bow_direction)}}},
           {"classification", {{"chord_ratio", sc.thresholds.chord_ratio}}},
           {"steady", to_json(c.steady)},
           {"output", {{"dir", c.output.dir}, {"record_positions", c.output.record_positions}}}};
    if (c.ga) j["ga"] = to_json(*c.ga);
    if (c.identify) j["identify"] = to_json(*c.identify);
    if (c.analysis) j["analysis"] = to_json(*c.analysis);
    return j;
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigInvalid(origin + ": " + e.what());
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto base = std::filesystem::path(path).parent_path().string();
    return parse_config(parse_json_text(ss.str(), path), base);
}

/// Model settings for the identification forward runs.
inline identify::ModelConfig model_config(const RunConfig& c) {
    identify::ModelConfig m;
    m.cable = c.scenario.cable;
    m.integrator = c.scenario.integrator;
    m.steady = c.steady;
    if (c.identify) {
        m.include_z = c.identify->include_z;
        m.penalty = c.identify->penalty;
        m.dt_safety = c.identify->dt_safety;
    }
    return m;
}

}  // namespace cabledyn::config
