#pragma once

// Convergence studies, material and length sweeps.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cabledyn/cable.hpp"
#include "cabledyn/errors.hpp"
#include "cabledyn/parallel.hpp"
#include "cabledyn/sim.hpp"

namespace cabledyn::analysis {

using Configuration = std::vector<Vec3>;

namespace detail {

inline std::vector<double> cumulative_arclength(std::span<const Vec3> nodes) {
    std::vector<double> s(nodes.size(), 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) s[i] = s[i - 1] + (nodes[i] - nodes[i - 1]).norm();
    return s;
}

inline Vec3 interpolate(std::span<const Vec3> nodes, const std::vector<double>& s, double target) {
    const std::size_t n = nodes.size();
    if (target <= 0.0) return nodes.front();
    if (target >= s.back()) return nodes.back();
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), target) - s.begin());
    const std::size_t i = std::min(k, n - 1);
    const double h = s[i] - s[i - 1];
    const double w = h > 0.0 ? (target - s[i - 1]) / h : 0.0;
    return nodes[i - 1] + w * (nodes[i] - nodes[i - 1]);
}

inline double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// m stations uniformly spaced in arc length along the polyline.
inline Configuration resample_to_arclength(std::span<const Vec3> nodes, int m) {
    if (m < 2) throw ConfigInvalid("resample station count must be >= 2");
    if (nodes.size() < 2) throw DegenerateSegment("configuration needs at least two nodes");
    const auto s = detail::cumulative_arclength(nodes);
    if (!(s.back() > geometry::kMinSegmentLength)) throw DegenerateSegment("configuration has zero length");
    Configuration out(m);
    for (int k = 0; k < m; ++k) {
        out[k] = detail::interpolate(nodes, s, s.back() * k / (m - 1));
    }
    out.front() = nodes.front();
    out.back() = nodes.back();
    return out;
}

/// Point at fraction f of the arc length.
inline Vec3 point_at_arclength(std::span<const Vec3> nodes, double f) {
    const auto s = detail::cumulative_arclength(nodes);
    if (!(s.back() > geometry::kMinSegmentLength)) throw DegenerateSegment("configuration has zero length");
    return detail::interpolate(nodes, s, f * s.back());
}

struct DeviationReport {
    double midpoint = 0.0;
    double average = 0.0;
    double max = 0.0;
    double runtime = 0.0;  // s, wall clock of the test run
};

/// Station-wise distances between two equally resampled configurations.
/// The midpoint is the station at half arc length (interpolated for an even
/// station count).
inline DeviationReport config_deviation(std::span<const Vec3> test, std::span<const Vec3> reference) {
    if (test.size() != reference.size() || test.empty()) {
        throw ConfigInvalid("configurations must share a station count");
    }
    const std::size_t m = test.size();
    DeviationReport r;
    for (std::size_t k = 0; k < m; ++k) {
        const double d = (test[k] - reference[k]).norm();
        r.average += d;
        r.max = std::max(r.max, d);
    }
    r.average /= static_cast<double>(m);
    if (m % 2 == 1) {
        r.midpoint = (test[m / 2] - reference[m / 2]).norm();
    } else {
        const Vec3 a = 0.5 * (test[m / 2 - 1] + test[m / 2]);
        const Vec3 b = 0.5 * (reference[m / 2 - 1] + reference[m / 2]);
        r.midpoint = (a - b).norm();
    }
    r.max = std::max(r.max, r.midpoint);
    return r;
}

/// Resample both to `stations` and compare.
inline DeviationReport compare_configurations(std::span<const Vec3> test, std::span<const Vec3> reference,
                                              int stations = 201) {
    const auto a = resample_to_arclength(test, stations);
    const auto b = resample_to_arclength(reference, stations);
    return config_deviation(a, b);
}

/// Fx1 Fy1 Fz1 Fx2 Fy2 Fz2.
using ForceChannels = std::array<double, 6>;

inline ForceChannels channels(const Vec3& f1, const Vec3& f2) {
    return {f1.x(), f1.y(), f1.z(), f2.x(), f2.y(), f2.z()};
}

/// One row of a convergence table. `parameter` is n (segments) or dt (s).
struct ConvergenceRow {
    double parameter = 0.0;
    bool diverged = false;
    DeviationReport geometry;
    ForceChannels force{};            // N, final (spatial) or at the worst sample (temporal)
    ForceChannels force_deviation{};  // N, |F - F_ref| per channel
    ForceChannels force_deviation_average{};
};

struct SpatialConvergenceSpec {
    std::vector<int> segments{5, 10, 15, 20, 25, 30, 40, 50, 60, 70};
    int stations = 201;

    bool operator==(const SpatialConvergenceSpec&) const = default;
};

/// Final configuration and endpoint forces per segment count, compared with
/// the largest count.
inline std::vector<ConvergenceRow> spatial_convergence(const sim::ScenarioSpec& base,
                                                       const SpatialConvergenceSpec& spec) {
    if (spec.segments.empty()) throw ConfigInvalid("segment list is empty");
    struct Run {
        Configuration config;
        ForceChannels force{};
        bool diverged = false;
        double runtime = 0.0;
    };
    auto runs = parallel::parallel_map<Run>(spec.segments.size(), [&](std::size_t i) {
        sim::ScenarioSpec s = base;
        s.cable.node_count = spec.segments[i] + 1;
        s.integrator.record_stride = std::max(1, static_cast<int>(s.integrator.steps()));
        Run r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto rec = sim::run_scenario(s.build(true));
            r.config = rec.states.back().positions;
            r.force = channels(rec.force_first.back(), rec.force_second.back());
        } catch (const DivergedState&) {
            r.diverged = true;
        }
        r.runtime = detail::elapsed_since(t0);
        return r;
    });
    const std::size_t ref = static_cast<std::size_t>(
        std::max_element(spec.segments.begin(), spec.segments.end()) - spec.segments.begin());
    if (runs[ref].diverged) throw DivergedState(base.integrator.t_end);
    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        ConvergenceRow row;
        row.parameter = spec.segments[i];
        row.diverged = runs[i].diverged;
        if (row.diverged) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.geometry = {nan, nan, nan, runs[i].runtime};
            row.force.fill(nan);
            row.force_deviation.fill(nan);
            row.force_deviation_average.fill(nan);
        } else {
            row.geometry = compare_configurations(runs[i].config, runs[ref].config, spec.stations);
            row.geometry.runtime = runs[i].runtime;
            row.force = runs[i].force;
            for (int c = 0; c < 6; ++c) {
                row.force_deviation[c] = std::abs(runs[i].force[c] - runs[ref].force[c]);
                row.force_deviation_average[c] = row.force_deviation[c];
            }
        }
        rows.push_back(row);
    }
    return rows;
}

struct TemporalConvergenceSpec {
    std::vector<double> time_steps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    double sample_interval = 0.1;  // s, common comparison grid
    int stations = 201;

    bool operator==(const TemporalConvergenceSpec&) const = default;
};

/// Whole-trajectory comparison against the smallest dt: configurations and
/// forces are compared at every sample of a common time grid. The geometric
/// max/average run over all samples and stations; the midpoint entry is the
/// largest midpoint deviation over time. Diverged runs yield NaN rows.
inline std::vector<ConvergenceRow> temporal_convergence(const sim::ScenarioSpec& base,
                                                        const TemporalConvergenceSpec& spec) {
    if (spec.time_steps.empty()) throw ConfigInvalid("time step list is empty");
    for (double dt : spec.time_steps) {
        const double ratio = spec.sample_interval / dt;
        if (!(dt > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-6 * ratio || std::round(ratio) < 1) {
            throw ConfigInvalid("sample_interval must be a whole multiple of every dt");
        }
    }
    struct Run {
        std::vector<Configuration> configs;
        std::vector<ForceChannels> forces;
        bool diverged = false;
        double runtime = 0.0;
    };
    auto runs = parallel::parallel_map<Run>(spec.time_steps.size(), [&](std::size_t i) {
        sim::ScenarioSpec s = base;
        s.integrator.dt = spec.time_steps[i];
        s.integrator.record_stride = static_cast<int>(std::llround(spec.sample_interval / s.integrator.dt));
        Run r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto rec = sim::run_scenario(s.build(true));
            for (std::size_t k = 0; k < rec.size(); ++k) {
                r.configs.push_back(resample_to_arclength(rec.states[k].positions, spec.stations));
                r.forces.push_back(channels(rec.force_first[k], rec.force_second[k]));
            }
        } catch (const DivergedState&) {
            r.diverged = true;
        }
        r.runtime = detail::elapsed_since(t0);
        return r;
    });
    const std::size_t ref = static_cast<std::size_t>(
        std::min_element(spec.time_steps.begin(), spec.time_steps.end()) - spec.time_steps.begin());
    if (runs[ref].diverged) throw DivergedState(base.integrator.t_end);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        ConvergenceRow row;
        row.parameter = spec.time_steps[i];
        row.diverged = runs[i].diverged;
        row.geometry.runtime = runs[i].runtime;
        if (row.diverged) {
            row.geometry.midpoint = row.geometry.average = row.geometry.max = nan;
            row.force.fill(nan);
            row.force_deviation.fill(nan);
            row.force_deviation_average.fill(nan);
            rows.push_back(row);
            continue;
        }
        const std::size_t samples = std::min(runs[i].configs.size(), runs[ref].configs.size());
        double sum = 0.0;
        row.force_deviation.fill(0.0);
        row.force_deviation_average.fill(0.0);
        for (std::size_t k = 0; k < samples; ++k) {
            const auto d = config_deviation(runs[i].configs[k], runs[ref].configs[k]);
            row.geometry.max = std::max(row.geometry.max, d.max);
            row.geometry.midpoint = std::max(row.geometry.midpoint, d.midpoint);
            sum += d.average;
            for (int c = 0; c < 6; ++c) {
                const double e = std::abs(runs[i].forces[k][c] - runs[ref].forces[k][c]);
                row.force_deviation[c] = std::max(row.force_deviation[c], e);
                row.force_deviation_average[c] += e / static_cast<double>(samples);
            }
        }
        row.geometry.average = sum / static_cast<double>(samples);
        row.force = runs[i].forces[samples - 1];
        rows.push_back(row);
    }
    return rows;
}

/// How the bending stiffness of a sweep cell follows the swept diameter.
enum class BendingRule {
    fixed,               // keep the base scenario's EI
    solid_section,       // E pi d^4 / 64 with the swept E
    solid_section_ref,   // E_ref pi d^4 / 64, independent of the swept (axial) E
};

struct MaterialSweepSpec {
    double d_min = 1e-3, d_max = 1e-1;
    double E_min = 1e6, E_max = 1e10;
    int d_samples = 9, E_samples = 9;
    std::vector<double> d_values;  // explicit lists override the log grids
    std::vector<double> E_values;
    BendingRule bending = BendingRule::solid_section_ref;
    double reference_modulus = 3.68e6;
    bool cross_section_from_diameter = false;
    double dt_safety = 0.5;        // fraction of the RK4 axial stability limit
    double average_window = 5.0;   // s, trailing mean of forces and X_mid
    double steady_tolerance = 0.05;

    std::vector<double> diameters() const;
    std::vector<double> moduli() const;

    bool operator==(const MaterialSweepSpec&) const = default;
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw ConfigInvalid("log grid needs 0 < min <= max and samples >= 1");
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) {
        v[k] = n == 1 ? lo : std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * k / (n - 1));
    }
    return v;
}

}  // namespace detail

inline std::vector<double> MaterialSweepSpec::diameters() const {
    return d_values.empty() ? detail::log_grid(d_min, d_max, d_samples) : d_values;
}

inline std::vector<double> MaterialSweepSpec::moduli() const {
    return E_values.empty() ? detail::log_grid(E_min, E_max, E_samples) : E_values;
}

struct SweepCell {
    double d = 0.0;
    double E = 0.0;
    Vec3 force_first = Vec3::Zero();
    Vec3 force_second = Vec3::Zero();
    double x_mid = 0.0;  // m, arc midpoint x relative to the mean end x
    double dt = 0.0;
    bool diverged = false;
    bool steady = false;
};

/// Midpoint x coordinate relative to the mean x of the two ends; negative
/// when the cable trails behind vehicles moving along +x.
inline double midpoint_lag(std::span<const Vec3> nodes) {
    return point_at_arclength(nodes, 0.5).x() - 0.5 * (nodes.front().x() + nodes.back().x());
}

inline sim::ScenarioSpec material_cell(const sim::ScenarioSpec& base, const MaterialSweepSpec& spec, double d,
                                       double E) {
    sim::ScenarioSpec s = base;
    s.cable.diameter = d;
    s.cable.youngs_modulus = E;
    if (spec.cross_section_from_diameter) s.cable.cross_section = std::numbers::pi * d * d / 4.0;
    switch (spec.bending) {
        case BendingRule::fixed: break;
        case BendingRule::solid_section: s.cable.bending_stiffness = cable::solid_section_bending_stiffness(E, d); break;
        case BendingRule::solid_section_ref:
            s.cable.bending_stiffness = cable::solid_section_bending_stiffness(spec.reference_modulus, d);
            break;
    }
    const double dt_limit = spec.dt_safety * sim::rk4_stable_dt(s.cable);
    if (s.integrator.dt > dt_limit) {
        // keep whole steps per second so the record grid stays aligned
        const double steps_per_s = std::ceil(1.0 / dt_limit);
        s.integrator.dt = 1.0 / steps_per_s;
    }
    return s;
}

/// Row-major grid (d outer, E inner). Diverged cells are flagged and carry NaN.
inline std::vector<SweepCell> material_sweep(const sim::ScenarioSpec& base, const MaterialSweepSpec& spec) {
    const auto ds = spec.diameters();
    const auto es = spec.moduli();
    return parallel::parallel_map<SweepCell>(ds.size() * es.size(), [&](std::size_t idx) {
        SweepCell cell;
        cell.d = ds[idx / es.size()];
        cell.E = es[idx % es.size()];
        sim::ScenarioSpec s = material_cell(base, spec, cell.d, cell.E);
        cell.dt = s.integrator.dt;
        s.integrator.record_stride = std::max(1, static_cast<int>(std::llround(0.1 / s.integrator.dt)));
        try {
            const auto rec = sim::run_scenario(s.build(true));
            const double t_from = rec.times.back() - spec.average_window;
            int count = 0;
            for (std::size_t k = 0; k < rec.size(); ++k) {
                if (rec.times[k] < t_from - 1e-9) continue;
                cell.force_first += rec.force_first[k];
                cell.force_second += rec.force_second[k];
                cell.x_mid += midpoint_lag(rec.states[k].positions);
                ++count;
            }
            cell.force_first /= count;
            cell.force_second /= count;
            cell.x_mid /= count;
            try {
                sim::steady_state_time(rec, spec.average_window, spec.steady_tolerance);
                cell.steady = true;
            } catch (const NotReached&) {
                cell.steady = false;
            }
        } catch (const DivergedState&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            cell.diverged = true;
            cell.force_first = cell.force_second = Vec3::Constant(nan);
            cell.x_mid = nan;
        }
        return cell;
    });
}

struct LengthSweepSpec {
    double lateral_fraction = 0.5;       // X_d / L_c
    double longitudinal_fraction = 0.0;  // Y_d / L_c
    std::vector<double> lengths{2.0, 4.0, 8.0, 16.0};
    double speed = 1.0;                  // m/s along +y
    int stations = 101;

    bool operator==(const LengthSweepSpec&) const = default;
};

struct LengthSweepRow {
    double length = 0.0;
    Configuration configuration;  // resampled, relative to vehicle 1
    Configuration normalized;     // configuration / L_c
    Vec3 midpoint_normalized = Vec3::Zero();
    Vec3 force_first = Vec3::Zero();
    Vec3 force_second = Vec3::Zero();
};

struct LengthSweepResult {
    std::vector<LengthSweepRow> rows;
    Vec3 midpoint_spread = Vec3::Zero();  // per coordinate: max - min of normalized midpoints
    double spread = 0.0;                  // largest coordinate spread, fraction of L_c
};

/// Vehicle 2 sits at (X_d, Y_d, 0) relative to vehicle 1; both move along +y
/// at `speed` from a straight co-moving start.
inline sim::ScenarioSpec formation_scenario(const sim::ScenarioSpec& base, double length, double x_d, double y_d,
                                            double speed) {
    if (std::hypot(x_d, y_d) > length * (1.0 + 1e-12)) throw ConfigInvalid("separation exceeds cable length");
    sim::ScenarioSpec s = base;
    s.cable.length = length;
    s.first = auv::ProfileSpec{};
    s.first.kind = "constant";
    s.first.velocity = Vec3(0.0, speed, 0.0);
    s.second = s.first;
    s.second.position = Vec3(x_d, y_d, 0.0);
    s.initial_velocity = sim::InitialVelocity::co_moving;
    return s;
}

inline LengthSweepResult length_sweep(const sim::ScenarioSpec& base, const LengthSweepSpec& spec) {
    if (spec.lengths.empty()) throw ConfigInvalid("length list is empty");
    LengthSweepResult res;
    res.rows = parallel::parallel_map<LengthSweepRow>(spec.lengths.size(), [&](std::size_t i) {
        const double L = spec.lengths[i];
        sim::ScenarioSpec s = formation_scenario(base, L, spec.lateral_fraction * L, spec.longitudinal_fraction * L,
                                                 spec.speed);
        s.integrator.record_stride = std::max(1, static_cast<int>(s.integrator.steps()));
        const auto rec = sim::run_scenario(s.build(true));
        LengthSweepRow row;
        row.length = L;
        const auto& nodes = rec.states.back().positions;
        row.configuration = resample_to_arclength(nodes, spec.stations);
        const Vec3 origin = nodes.front();
        for (auto& p : row.configuration) p -= origin;
        for (const auto& p : row.configuration) row.normalized.push_back(p / L);
        row.midpoint_normalized = (point_at_arclength(nodes, 0.5) - origin) / L;
        row.force_first = rec.force_first.back();
        row.force_second = rec.force_second.back();
        return row;
    });
    Vec3 lo = res.rows.front().midpoint_normalized, hi = lo;
    for (const auto& r : res.rows) {
        lo = lo.cwiseMin(r.midpoint_normalized);
        hi = hi.cwiseMax(r.midpoint_normalized);
    }
    res.midpoint_spread = hi - lo;
    res.spread = res.midpoint_spread.maxCoeff();
    return res;
}

}  // namespace cabledyn::analysis
