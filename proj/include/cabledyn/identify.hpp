#pragma once

// Genetic-algorithm inversion of (E, C_n, C_t[, k_a]) from steady endpoint
// tension samples.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cabledyn/analysis.hpp"
#include "cabledyn/errors.hpp"
#include "cabledyn/parallel.hpp"
#include "cabledyn/sim.hpp"

namespace cabledyn::identify {

/// One steady configuration: vehicle 2 at (X_d, Y_d) relative to vehicle 1,
/// both moving along +y at `speed`; forces are the measured cable loads.
struct TensionSample {
    double x_d = 0.0;    // m, lateral
    double y_d = 0.0;    // m, longitudinal
    double speed = 0.0;  // m/s
    Vec3 force_first = Vec3::Zero();
    Vec3 force_second = Vec3::Zero();

    bool operator==(const TensionSample&) const = default;
};

using Dataset = std::vector<TensionSample>;

struct ParamVector {
    double youngs_modulus = 3.68e6;
    double normal_drag_coeff = 1.8306;
    double tangential_drag_coeff = 0.0756;
    std::optional<double> added_mass_coeff;

    bool operator==(const ParamVector&) const = default;

    cable::CableProperties apply(cable::CableProperties p) const {
        p.youngs_modulus = youngs_modulus;
        p.normal_drag_coeff = normal_drag_coeff;
        p.tangential_drag_coeff = tangential_drag_coeff;
        if (added_mass_coeff) p.added_mass_coeff = *added_mass_coeff;
        return p;
    }
};

struct Bounds {
    double lower = 0.0;
    double upper = 1.0;
    bool operator==(const Bounds&) const = default;
};

struct GaConfig {
    int population = 48;
    int generations = 60;
    int tournament = 3;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;
    double mutation_rate = 0.15;
    double mutation_scale = 0.05;  // fraction of each search range
    int elitism = 2;
    std::optional<std::uint64_t> seed;
    Bounds youngs_modulus{1e5, 1e10};  // searched in log10
    Bounds normal_drag{0.1, 3.0};
    Bounds tangential_drag{0.001, 0.5};
    Bounds added_mass{0.5, 2.0};
    bool identify_added_mass = false;
    std::vector<ParamVector> initial_population;  // optional; random fill when short

    void validate() const {
        if (!seed) throw ConfigInvalid("ga.seed is required");
        if (population < 8) throw ConfigInvalid("ga.population must be >= 8");
        if (generations < 1) throw ConfigInvalid("ga.generations must be >= 1");
        if (tournament < 1) throw ConfigInvalid("ga.tournament must be >= 1");
        if (elitism < 0 || elitism >= population) throw ConfigInvalid("ga.elitism must be in [0, population)");
        auto rate = [](double v, const char* name) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigInvalid(std::string("ga.") + name + " must be in [0, 1]");
        };
        rate(crossover_rate, "crossover_rate");
        rate(mutation_rate, "mutation_rate");
        if (!(blend_alpha >= 0.0)) throw ConfigInvalid("ga.blend_alpha must be >= 0");
        if (!(mutation_scale >= 0.0)) throw ConfigInvalid("ga.mutation_scale must be >= 0");
        auto bounds = [](const Bounds& b, const char* name) {
            if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
                throw ConfigInvalid(std::string("ga.bounds.") + name + " needs finite lower < upper");
            }
        };
        bounds(youngs_modulus, "youngs_modulus");
        bounds(normal_drag, "normal_drag_coeff");
        bounds(tangential_drag, "tangential_drag_coeff");
        bounds(added_mass, "added_mass_coeff");
        if (!(youngs_modulus.lower > 0.0)) throw ConfigInvalid("ga.bounds.youngs_modulus must be positive");
    }

    bool operator==(const GaConfig&) const = default;
};

/// Forward model shared by the objective and dataset synthesis.
struct ModelConfig {
    cable::CableProperties cable;  // fixed properties (rho_c, sigma, d, L_c, N_c, ...)
    sim::IntegratorConfig integrator;
    sim::SteadyOptions steady{1.0, 1e-3, 60.0, 0.05};
    bool include_z = false;
    double penalty = 1e9;
    double dt_safety = 0.5;  // fraction of the RK4 axial stability limit

    bool operator==(const ModelConfig&) const = default;
};

/// Prescribed boundary of one sample.
inline sim::ScenarioSpec sample_scenario(const cable::CableProperties& p, const sim::IntegratorConfig& integ,
                                         const TensionSample& s) {
    sim::ScenarioSpec spec;
    spec.cable = p;
    spec.integrator = integ;
    return analysis::formation_scenario(spec, p.length, s.x_d, s.y_d, s.speed);
}

struct Prediction {
    Vec3 force_first = Vec3::Zero();
    Vec3 force_second = Vec3::Zero();
    bool ok = false;
    cable::CableState state;  // steady state, positions relative to vehicle 1
};

/// Steady forces of one sample. `warm` (positions relative to vehicle 1)
/// replaces the straight start when its node count matches.
inline Prediction predict(const ParamVector& params, const TensionSample& sample, const ModelConfig& model,
                          const cable::CableState* warm = nullptr) {
    Prediction out;
    cable::CableProperties p = params.apply(model.cable);
    sim::IntegratorConfig integ = model.integrator;
    const double limit = model.dt_safety * sim::rk4_stable_dt(p);
    if (integ.dt > limit) integ.dt = limit;
    try {
        // Constant-velocity ends are consistent by construction, so the
        // scenario is assembled directly instead of through prescribe().
        const sim::ScenarioSpec spec = sample_scenario(p, integ, sample);
        sim::Scenario sc;
        sc.cable = p;
        sc.integrator = integ;
        sc.boundary = auv::BoundaryPrescription(auv::make_trajectory(spec.first, 0), auv::make_trajectory(spec.second, 1));
        sc.initial_velocity = spec.initial_velocity;
        sc.record_positions = false;
        if (warm && static_cast<int>(warm->size()) == p.node_count) {
            cable::CableState init = *warm;
            const auto a = sc.boundary.first(0.0), z = sc.boundary.second(0.0);
            for (auto& x : init.positions) x += a.position;
            for (auto& v : init.velocities) v = a.velocity;
            init.positions.front() = a.position;
            init.positions.back() = z.position;
            init.time = 0.0;
            sc.initial = init;
        }
        const auto res = sim::run_to_steady(sc, model.steady);
        out.force_first = res.force_first;
        out.force_second = res.force_second;
        out.state = res.state;
        const Vec3 origin = res.state.positions.front();
        for (auto& x : out.state.positions) x -= origin;
        out.ok = res.force_first.allFinite() && res.force_second.allFinite();
    } catch (const Error&) {
        out.ok = false;
    }
    return out;
}

inline double residual_norm2(const TensionSample& s, const Vec3& f1, const Vec3& f2, bool include_z) {
    Vec3 d1 = s.force_first - f1, d2 = s.force_second - f2;
    if (!include_z) {
        d1.z() = 0.0;
        d2.z() = 0.0;
    }
    return d1.squaredNorm() + d2.squaredNorm();
}

/// Mean squared force residual over the dataset; failed forward runs
/// contribute model.penalty.
inline double objective(const ParamVector& params, const Dataset& data, const ModelConfig& model,
                        const std::vector<cable::CableState>* warm = nullptr) {
    if (data.empty()) throw EmptyDataset("dataset has no samples");
    double sum = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const cable::CableState* w = warm && k < warm->size() ? &(*warm)[k] : nullptr;
        const Prediction pr = predict(params, data[k], model, w);
        sum += pr.ok ? residual_norm2(data[k], pr.force_first, pr.force_second, model.include_z) : model.penalty;
    }
    return sum / static_cast<double>(data.size());
}

/// Model forces for every sample (e.g. to build a synthetic dataset).
/// Multiplicative noise N(1, noise) is applied per channel when noise > 0.
inline Dataset synthesize(const ParamVector& params, const std::vector<TensionSample>& layout,
                          const ModelConfig& model, double noise = 0.0, std::uint64_t seed = 0) {
    Dataset out = layout;
    auto preds = parallel::parallel_map<Prediction>(layout.size(),
                                                    [&](std::size_t k) { return predict(params, layout[k], model); });
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t k = 0; k < layout.size(); ++k) {
        if (!preds[k].ok) throw NotReached("forward model did not reach a steady state for sample " + std::to_string(k));
        out[k].force_first = preds[k].force_first;
        out[k].force_second = preds[k].force_second;
        if (noise > 0.0) {
            for (int c = 0; c < 3; ++c) out[k].force_first[c] *= 1.0 + noise * gauss(rng);
            for (int c = 0; c < 3; ++c) out[k].force_second[c] *= 1.0 + noise * gauss(rng);
        }
    }
    return out;
}

struct ChannelStats {
    std::array<double, 6> rmse{};  // Fx1 Fy1 Fz1 Fx2 Fy2 Fz2
    std::array<double, 6> mse{};
};

inline ChannelStats channel_stats(const Dataset& data, const std::vector<std::pair<Vec3, Vec3>>& predicted) {
    if (data.empty()) throw EmptyDataset("dataset has no samples");
    ChannelStats st;
    for (std::size_t k = 0; k < data.size(); ++k) {
        for (int c = 0; c < 3; ++c) {
            st.mse[c] += std::pow(data[k].force_first[c] - predicted[k].first[c], 2);
            st.mse[3 + c] += std::pow(data[k].force_second[c] - predicted[k].second[c], 2);
        }
    }
    for (int c = 0; c < 6; ++c) {
        st.mse[c] /= static_cast<double>(data.size());
        st.rmse[c] = std::sqrt(st.mse[c]);
    }
    return st;
}

/// Per-vehicle, per-axis RMSE and MSE of the model at `params`.
inline ChannelStats rmse_mse_report(const Dataset& data, const ParamVector& params, const ModelConfig& model) {
    if (data.empty()) throw EmptyDataset("dataset has no samples");
    auto preds = parallel::parallel_map<Prediction>(data.size(),
                                                    [&](std::size_t k) { return predict(params, data[k], model); });
    std::vector<std::pair<Vec3, Vec3>> forces;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : preds) {
        forces.emplace_back(p.ok ? p.force_first : Vec3::Constant(nan), p.ok ? p.force_second : Vec3::Constant(nan));
    }
    return channel_stats(data, forces);
}

struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    ParamVector best;
};

struct IdentifyResult {
    ParamVector best;
    double best_fitness = 0.0;
    std::vector<GenerationRecord> history;
    long evaluations = 0;
};

namespace detail {

struct SearchSpace {
    std::vector<Bounds> bounds;  // log10 E, C_n, C_t[, k_a]
    bool added_mass = false;

    explicit SearchSpace(const GaConfig& c) : added_mass(c.identify_added_mass) {
        bounds.push_back({std::log10(c.youngs_modulus.lower), std::log10(c.youngs_modulus.upper)});
        bounds.push_back(c.normal_drag);
        bounds.push_back(c.tangential_drag);
        if (added_mass) bounds.push_back(c.added_mass);
    }

    std::size_t size() const { return bounds.size(); }

    std::vector<double> encode(const ParamVector& p) const {
        std::vector<double> g{std::log10(p.youngs_modulus), p.normal_drag_coeff, p.tangential_drag_coeff};
        if (added_mass) g.push_back(p.added_mass_coeff.value_or(1.3));
        return clamp(g);
    }

    ParamVector decode(const std::vector<double>& g) const {
        ParamVector p;
        p.youngs_modulus = std::pow(10.0, g[0]);
        p.normal_drag_coeff = g[1];
        p.tangential_drag_coeff = g[2];
        if (added_mass) p.added_mass_coeff = g[3];
        return p;
    }

    std::vector<double> clamp(std::vector<double> g) const {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::clamp(g[i], bounds[i].lower, bounds[i].upper);
        return g;
    }
};

}  // namespace detail

/// Steady states of `params` for every sample, used as warm starts.
inline std::vector<cable::CableState> warm_states(const ParamVector& params, const Dataset& data,
                                                  const ModelConfig& model, const std::vector<cable::CableState>* prev) {
    std::vector<cable::CableState> out(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
        const cable::CableState* w = prev && k < prev->size() ? &(*prev)[k] : nullptr;
        ModelConfig m = model;
        m.steady.t_max = std::max(model.steady.t_max, 4.0 * model.steady.t_max);
        Prediction pr = predict(params, data[k], m, w);
        if (pr.ok) {
            out[k] = std::move(pr.state);
        } else if (w) {
            out[k] = *w;
        }
    }
    return out;
}

/// Seeded GA. Each generation evaluates its individuals from the steady
/// states of the previous generation's best, so results do not depend on
/// evaluation order or thread count.
inline IdentifyResult identify(const Dataset& data, const GaConfig& cfg, const ModelConfig& model) {
    cfg.validate();
    if (data.empty()) throw EmptyDataset("dataset has no samples");
    const detail::SearchSpace space(cfg);
    std::mt19937_64 rng(*cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> pop;
    for (const auto& p : cfg.initial_population) {
        if (static_cast<int>(pop.size()) < cfg.population) pop.push_back(space.encode(p));
    }
    while (static_cast<int>(pop.size()) < cfg.population) {
        std::vector<double> g(space.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = space.bounds[i].lower + unit(rng) * (space.bounds[i].upper - space.bounds[i].lower);
        }
        pop.push_back(g);
    }

    IdentifyResult result;
    std::vector<double> centre(space.size());
    for (std::size_t i = 0; i < centre.size(); ++i) centre[i] = 0.5 * (space.bounds[i].lower + space.bounds[i].upper);
    auto warm = warm_states(space.decode(cfg.initial_population.empty() ? centre : pop.front()), data, model, nullptr);

    auto evaluate = [&](const std::vector<std::vector<double>>& genomes, std::vector<double>& fit,
                        const std::vector<char>& need) {
        parallel::parallel_for(genomes.size(), [&](std::size_t i) {
            if (need[i]) fit[i] = objective(space.decode(genomes[i]), data, model, &warm);
        });
        for (char n : need) result.evaluations += n ? 1 : 0;
    };

    std::vector<double> fit(pop.size(), 0.0);
    evaluate(pop, fit, std::vector<char>(pop.size(), 1));

    auto ranking = [&](const std::vector<double>& f) {
        std::vector<std::size_t> idx(f.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        return idx;
    };
    auto record = [&](int gen) {
        const auto order = ranking(fit);
        GenerationRecord r;
        r.generation = gen;
        r.best_fitness = fit[order.front()];
        double mean = 0.0;
        for (double f : fit) mean += std::min(f, model.penalty);
        r.mean_fitness = mean / static_cast<double>(fit.size());
        r.best = space.decode(pop[order.front()]);
        result.history.push_back(r);
        return order;
    };

    auto order = record(0);
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        auto tournament = [&]() {
            std::size_t best = static_cast<std::size_t>(unit(rng) * pop.size()) % pop.size();
            for (int k = 1; k < cfg.tournament; ++k) {
                const std::size_t c = static_cast<std::size_t>(unit(rng) * pop.size()) % pop.size();
                if (fit[c] < fit[best] || (fit[c] == fit[best] && c < best)) best = c;
            }
            return best;
        };
        std::vector<std::vector<double>> next;
        std::vector<double> next_fit;
        std::vector<char> need;
        for (int e = 0; e < cfg.elitism; ++e) {
            next.push_back(pop[order[e]]);
            next_fit.push_back(fit[order[e]]);
            need.push_back(0);
        }
        while (static_cast<int>(next.size()) < cfg.population) {
            const auto& a = pop[tournament()];
            const auto& b = pop[tournament()];
            std::vector<double> child = a;
            if (unit(rng) < cfg.crossover_rate) {
                for (std::size_t i = 0; i < child.size(); ++i) {
                    const double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
                    const double span = hi - lo;
                    const double l = lo - cfg.blend_alpha * span, h = hi + cfg.blend_alpha * span;
                    child[i] = l + unit(rng) * (h - l);
                }
            }
            for (std::size_t i = 0; i < child.size(); ++i) {
                if (unit(rng) < cfg.mutation_rate) {
                    child[i] += cfg.mutation_scale * (space.bounds[i].upper - space.bounds[i].lower) * gauss(rng);
                }
            }
            next.push_back(space.clamp(child));
            next_fit.push_back(0.0);
            need.push_back(1);
        }
        // Warm starts follow the incumbent best.
        warm = warm_states(space.decode(pop[order.front()]), data, model, &warm);
        pop = std::move(next);
        fit = std::move(next_fit);
        evaluate(pop, fit, need);
        order = record(gen);
    }
    result.best = space.decode(pop[order.front()]);
    result.best_fitness = fit[order.front()];
    return result;
}

// ---------------------------------------------------------------------------
// Dataset file: X_d,Y_d,speed,Fx1,Fy1,Fz1,Fx2,Fy2,Fz2
// ---------------------------------------------------------------------------

inline const char* dataset_header() { return "X_d,Y_d,speed,Fx1,Fy1,Fz1,Fx2,Fy2,Fz2"; }

inline Dataset read_dataset(const std::string& path, double max_separation = std::numeric_limits<double>::infinity()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset " + path);
    std::string line;
    if (!std::getline(in, line)) throw EmptyDataset("dataset file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != dataset_header()) throw ConfigInvalid(std::string("dataset header must be ") + dataset_header());
    Dataset data;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
                throw ConfigInvalid("dataset row " + std::to_string(row) + ": non-numeric value '" + cell + "'");
            }
            v.push_back(value);
        }
        if (v.size() != 9) throw ConfigInvalid("dataset row " + std::to_string(row) + ": expected 9 columns");
        TensionSample s{v[0], v[1], v[2], Vec3(v[3], v[4], v[5]), Vec3(v[6], v[7], v[8])};
        if (s.x_d < 0.0 || s.y_d < 0.0) throw ConfigInvalid("dataset row " + std::to_string(row) + ": negative separation");
        if (std::hypot(s.x_d, s.y_d) > max_separation * (1.0 + 1e-12)) {
            throw ConfigInvalid("dataset row " + std::to_string(row) + ": separation exceeds cable length");
        }
        data.push_back(s);
    }
    if (data.empty()) throw EmptyDataset("dataset has no samples: " + path);
    return data;
}

}  // namespace cabledyn::identify
