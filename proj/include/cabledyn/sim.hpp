#pragma once

// Time integration of the node ODEs with kinematically prescribed ends,
// scenario execution, steady-state detection and taut/slack classification.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cabledyn/cable.hpp"
#include "cabledyn/errors.hpp"
#include "cabledyn/prescription.hpp"

namespace cabledyn::sim {

using cable::CableProperties;
using cable::CableState;
using cable::CurrentField;

enum class Scheme { rk4, semi_implicit_euler };

inline std::string to_string(Scheme s) { return s == Scheme::rk4 ? "explicit-rk4" : "semi-implicit-euler"; }

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "explicit-rk4" || s == "rk4") return Scheme::rk4;
    if (s == "semi-implicit-euler") return Scheme::semi_implicit_euler;
    throw ConfigInvalid("unknown integrator scheme '" + s + "'");
}

struct IntegratorConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::rk4;
    double t_end = 60.0;
    int record_stride = 100;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigInvalid("integrator.dt must be > 0");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigInvalid("integrator.t_end must be > 0");
        if (record_stride < 1) throw ConfigInvalid("integrator.record_stride must be >= 1");
    }

    /// Number of whole steps covering [0, t_end].
    long steps() const { return static_cast<long>(std::llround(t_end / dt)); }

    bool operator==(const IntegratorConfig&) const = default;
};

enum class Regime { slack = 0, taut = 1 };

struct TautSlackThresholds {
    double chord_ratio = 0.98;

    bool operator==(const TautSlackThresholds&) const = default;
};

/// Chord between the ends over L_c at or above the threshold, with the cable
/// carrying a positive mean strain.
inline Regime classify_taut_slack(const CableState& s, const CableProperties& p,
                                  const TautSlackThresholds& th = {}) {
    const std::size_t n = s.positions.size();
    const double chord = (s.positions[n - 1] - s.positions[0]).norm();
    double strain = 0.0;
    const double l0 = p.rest_length();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        strain += cable::segment_strain((s.positions[i + 1] - s.positions[i]).norm(), l0);
    }
    strain /= static_cast<double>(n - 1);
    return chord / p.length >= th.chord_ratio && strain > 0.0 ? Regime::taut : Regime::slack;
}

/// Time samples on a uniform grid. `states` is empty when positions are not
/// recorded. Forces are the loads the cable applies on each vehicle.
struct SimRecord {
    std::vector<double> times;
    std::vector<CableState> states;
    std::vector<Vec3> force_first;
    std::vector<Vec3> force_second;
    std::vector<Regime> regime;
    bool diverged = false;
    double diverged_time = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const { return times.size(); }
};

/// How the initial node velocities are set.
enum class InitialVelocity { zero, co_moving };

/// Initial node layout: the straight chord, or a half-sine bow of arc length
/// L_c bulging along `bow_direction` (requires chord < L_c).
struct InitialShape {
    bool bowed = false;
    Vec3 bow_direction = -Vec3::UnitX();

    bool operator==(const InitialShape&) const = default;
};

struct Scenario {
    CableProperties cable;
    IntegratorConfig integrator;
    auv::BoundaryPrescription boundary;
    CurrentField current = cable::still_water();
    TautSlackThresholds thresholds;
    InitialVelocity initial_velocity = InitialVelocity::zero;
    InitialShape initial_shape;
    bool record_positions = true;
    std::optional<CableState> initial;  // overrides the straight-line start
};

/// Config-level description of a scenario; build() resolves the boundary
/// profiles into a prescription.
struct ScenarioSpec {
    CableProperties cable;
    IntegratorConfig integrator;
    auv::ProfileSpec first;
    auv::ProfileSpec second;
    Vec3 current = Vec3::Zero();
    TautSlackThresholds thresholds;
    InitialVelocity initial_velocity = InitialVelocity::zero;
    InitialShape initial_shape;
    std::string base_dir;  // resolves relative trajectory files

    bool operator==(const ScenarioSpec&) const = default;

    Scenario build(bool record_positions = true) const {
        cable.validate();
        integrator.validate();
        Scenario sc;
        sc.cable = cable;
        sc.integrator = integrator;
        sc.boundary = auv::prescribe(first, second, integrator.t_end, base_dir);
        sc.current = cable::uniform_current(current);
        sc.thresholds = thresholds;
        sc.initial_velocity = initial_velocity;
        sc.initial_shape = initial_shape;
        sc.record_positions = record_positions;
        return sc;
    }
};

namespace detail {

// Half-sine bow between a and b with amplitude h along unit direction e,
// sampled at n nodes equally spaced in arc length.
inline std::vector<Vec3> bow_nodes(const Vec3& a, const Vec3& b, const Vec3& e, double h, int n) {
    constexpr int dense = 4000;
    std::vector<Vec3> pts(dense + 1);
    std::vector<double> s(dense + 1, 0.0);
    for (int k = 0; k <= dense; ++k) {
        const double u = static_cast<double>(k) / dense;
        pts[k] = (1.0 - u) * a + u * b + h * std::sin(std::numbers::pi * u) * e;
        if (k > 0) s[k] = s[k - 1] + (pts[k] - pts[k - 1]).norm();
    }
    std::vector<Vec3> out(n);
    std::size_t j = 1;
    for (int i = 0; i < n; ++i) {
        const double target = s.back() * i / (n - 1);
        while (j < s.size() - 1 && s[j] < target) ++j;
        const double w = (target - s[j - 1]) / (s[j] - s[j - 1]);
        out[i] = pts[j - 1] + std::clamp(w, 0.0, 1.0) * (pts[j] - pts[j - 1]);
    }
    out.front() = a;
    out.back() = b;
    return out;
}

inline double bow_length(const Vec3& a, const Vec3& b, const Vec3& e, double h) {
    const auto p = bow_nodes(a, b, e, h, 2001);
    double l = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) l += (p[i] - p[i - 1]).norm();
    return l;
}

}  // namespace detail

/// Initial layout between the prescribed ends at time t; velocities zero or
/// linearly interpolated between the end velocities.
inline CableState initial_state(const CableProperties& p, const auv::BoundaryPrescription& b, double t = 0.0,
                                InitialVelocity iv = InitialVelocity::zero, const InitialShape& shape = {}) {
    const auto a = b.first(t), z = b.second(t);
    const int n = p.node_count;
    CableState s;
    s.time = t;
    s.positions.resize(n);
    s.velocities.resize(n);
    const double chord = (z.position - a.position).norm();
    if (shape.bowed && chord < p.length) {
        Vec3 e = shape.bow_direction;
        const Vec3 c = chord > 0.0 ? ((z.position - a.position) / chord).eval() : Vec3::Zero().eval();
        e -= e.dot(c) * c;
        if (!(e.norm() > 1e-12)) throw ConfigInvalid("bow direction is parallel to the chord");
        e.normalize();
        double lo = 0.0, hi = p.length;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (detail::bow_length(a.position, z.position, e, mid) < p.length ? lo : hi) = mid;
        }
        s.positions = detail::bow_nodes(a.position, z.position, e, 0.5 * (lo + hi), n);
    } else {
        for (int i = 0; i < n; ++i) {
            const double f = static_cast<double>(i) / (n - 1);
            s.positions[i] = (1.0 - f) * a.position + f * z.position;
        }
    }
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        s.velocities[i] = iv == InitialVelocity::zero ? Vec3::Zero().eval()
                                                      : ((1.0 - f) * a.velocity + f * z.velocity).eval();
    }
    s.velocities.front() = a.velocity;
    s.velocities.back() = z.velocity;
    return s;
}

/// Reusable integrator with preallocated stage buffers.
class Stepper {
public:
    Stepper(const CableProperties& p, const auv::BoundaryPrescription& b, const CurrentField& current,
            IntegratorConfig cfg)
        : p_(p), b_(b), current_(current), cfg_(cfg) {}

    const IntegratorConfig& config() const { return cfg_; }

    /// Advance `s` by one dt in place. Throws DivergedState on non-finite values.
    void step(CableState& s) { step(s, s.time + cfg_.dt); }

    /// As step(s), stamping the new state with `t_next` (the caller's time grid).
    void step(CableState& s, double t_next) {
        const double t = s.time, dt = cfg_.dt;
        const std::size_t n = s.positions.size();
        const auto a0 = b_.first(t), z0 = b_.second(t);
        const auto a1 = b_.first(t_next), z1 = b_.second(t_next);
        if (cfg_.scheme == Scheme::semi_implicit_euler) {
            eval(s.positions, s.velocities, t, a0.acceleration, z0.acceleration, k1v_);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                s.velocities[i] += dt * k1v_[i];
                s.positions[i] += dt * s.velocities[i];
            }
        } else {
            const double th = t + 0.5 * dt;
            const auto ah = b_.first(th), zh = b_.second(th);
            eval(s.positions, s.velocities, t, a0.acceleration, z0.acceleration, k1v_);
            stage(s, 0.5 * dt, s.velocities, k1v_, ah, zh);
            k2x_ = vtmp_;
            eval(xtmp_, vtmp_, th, ah.acceleration, zh.acceleration, k2v_);
            stage(s, 0.5 * dt, k2x_, k2v_, ah, zh);
            k3x_ = vtmp_;
            eval(xtmp_, vtmp_, th, ah.acceleration, zh.acceleration, k3v_);
            stage(s, dt, k3x_, k3v_, a1, z1);
            k4x_ = vtmp_;
            eval(xtmp_, vtmp_, t_next, a1.acceleration, z1.acceleration, k4v_);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                s.positions[i] += dt / 6.0 * (s.velocities[i] + 2.0 * k2x_[i] + 2.0 * k3x_[i] + k4x_[i]);
                s.velocities[i] += dt / 6.0 * (k1v_[i] + 2.0 * k2v_[i] + 2.0 * k3v_[i] + k4v_[i]);
            }
        }
        s.time = t_next;
        s.positions.front() = a1.position;
        s.velocities.front() = a1.velocity;
        s.positions.back() = z1.position;
        s.velocities.back() = z1.velocity;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!s.positions[i].allFinite() || !s.velocities[i].allFinite()) throw DivergedState(s.time);
        }
    }

    /// Loads the cable applies on the two vehicles at state s.
    std::pair<Vec3, Vec3> endpoint_loads(const CableState& s) {
        const auto a = b_.first(s.time), z = b_.second(s.time);
        cable::assemble_rhs(p_, s.positions, s.velocities, s.time, current_, a.acceleration, z.acceleration,
                            work_, rhs_);
        return {rhs_.load_first, rhs_.load_last};
    }

private:
    void eval(const std::vector<Vec3>& x, const std::vector<Vec3>& v, double t, const Vec3& acc_first,
              const Vec3& acc_last, std::vector<Vec3>& acc) {
        cable::assemble_rhs(p_, x, v, t, current_, acc_first, acc_last, work_, rhs_);
        acc.swap(rhs_.accelerations);
    }

    // xtmp = x + h*dx, vtmp = v + h*dv for interior nodes; ends from the prescription.
    void stage(const CableState& s, double h, const std::vector<Vec3>& dx, const std::vector<Vec3>& dv,
               const auv::Kinematics& first, const auv::Kinematics& last) {
        const std::size_t n = s.positions.size();
        xtmp_.resize(n);
        vtmp_.resize(n);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            xtmp_[i] = s.positions[i] + h * dx[i];
            vtmp_[i] = s.velocities[i] + h * dv[i];
        }
        xtmp_[0] = first.position;
        vtmp_[0] = first.velocity;
        xtmp_[n - 1] = last.position;
        vtmp_[n - 1] = last.velocity;
    }

    const CableProperties& p_;
    const auv::BoundaryPrescription& b_;
    const CurrentField& current_;
    IntegratorConfig cfg_;
    cable::NodalForces work_;
    cable::RhsResult rhs_;
    std::vector<Vec3> k1v_, k2v_, k3v_, k4v_, k2x_, k3x_, k4x_, xtmp_, vtmp_;
};

/// One step of `cfg.scheme` from `s`.
inline CableState step(const CableState& s, const CableProperties& p, const CurrentField& current,
                       const auv::BoundaryPrescription& b, const IntegratorConfig& cfg) {
    Stepper stepper(p, b, current, cfg);
    CableState out = s;
    stepper.step(out);
    return out;
}

namespace detail {

inline void record_sample(SimRecord& rec, const CableState& s, Stepper& stepper, const Scenario& sc) {
    const auto [f1, f2] = stepper.endpoint_loads(s);
    rec.times.push_back(s.time);
    rec.force_first.push_back(f1);
    rec.force_second.push_back(f2);
    rec.regime.push_back(classify_taut_slack(s, sc.cable, sc.thresholds));
    if (sc.record_positions) rec.states.push_back(s);
}

}  // namespace detail

inline CableState scenario_initial_state(const Scenario& sc) {
    if (sc.initial) return *sc.initial;
    return initial_state(sc.cable, sc.boundary, 0.0, sc.initial_velocity, sc.initial_shape);
}

/// Integrate over [0, t_end], sampling every record_stride steps. On
/// divergence throws DivergedState carrying the partial record.
inline SimRecord run_scenario(const Scenario& sc) {
    sc.cable.validate();
    sc.integrator.validate();
    Stepper stepper(sc.cable, sc.boundary, sc.current, sc.integrator);
    CableState s = scenario_initial_state(sc);
    if (static_cast<int>(s.positions.size()) != sc.cable.node_count) {
        throw ConfigInvalid("initial state size does not match cable.node_count");
    }
    SimRecord rec;
    const long steps = sc.integrator.steps();
    const double t0 = s.time;
    try {
        detail::record_sample(rec, s, stepper, sc);
        for (long k = 1; k <= steps; ++k) {
            stepper.step(s, t0 + k * sc.integrator.dt);
            if (k % sc.integrator.record_stride == 0) detail::record_sample(rec, s, stepper, sc);
        }
    } catch (const DivergedState& e) {
        rec.diverged = true;
        rec.diverged_time = e.time();
        throw DivergedState(e.time(), std::make_shared<const SimRecord>(std::move(rec)));
    }
    return rec;
}

/// Earliest recorded time from which every force channel stays within `tol`
/// (peak to peak) until the end of the record, provided that tail spans at
/// least `window` seconds.
inline double steady_state_time(const SimRecord& rec, double window, double tol) {
    const std::size_t n = rec.size();
    if (n == 0) throw NotReached("empty record");
    std::array<double, 6> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    std::optional<std::size_t> earliest;
    for (std::size_t k = n; k-- > 0;) {
        bool finite = true;
        for (int c = 0; c < 6; ++c) {
            const double v = c < 3 ? rec.force_first[k][c] : rec.force_second[k][c - 3];
            if (!std::isfinite(v)) finite = false;
            lo[c] = std::min(lo[c], v);
            hi[c] = std::max(hi[c], v);
        }
        if (!finite) break;
        double p2p = 0.0;
        for (int c = 0; c < 6; ++c) p2p = std::max(p2p, hi[c] - lo[c]);
        if (!(p2p < tol)) break;
        earliest = k;
    }
    if (rec.diverged || !earliest) throw NotReached("endpoint forces never settle");
    // A record that is flat from its first sample is steady from the start.
    const double tail = rec.times.back() - rec.times[*earliest];
    if (*earliest != 0 && tail < window - 1e-12) throw NotReached("steady tail shorter than window");
    return rec.times[*earliest];
}

struct SteadyOptions {
    double window = 5.0;      // s
    double tolerance = 0.05;  // N, peak to peak
    double t_max = 200.0;     // s
    double check_interval = 0.05;

    bool operator==(const SteadyOptions&) const = default;
};

struct SteadyResult {
    CableState state;
    Vec3 force_first = Vec3::Zero();
    Vec3 force_second = Vec3::Zero();
    double time = 0.0;
};

/// Integrate until the forces over the trailing window vary by less than the
/// tolerance; throws NotReached when t_max is hit first.
inline SteadyResult run_to_steady(const Scenario& sc, const SteadyOptions& opt) {
    Stepper stepper(sc.cable, sc.boundary, sc.current, sc.integrator);
    CableState s = scenario_initial_state(sc);
    const double dt = sc.integrator.dt;
    const long stride = std::max(1L, static_cast<long>(std::llround(opt.check_interval / dt)));
    const long window_samples = std::max(2L, static_cast<long>(std::llround(opt.window / (stride * dt))) + 1);
    std::vector<std::array<double, 6>> ring;
    const long max_steps = static_cast<long>(std::llround(opt.t_max / dt));
    const double t0 = s.time;
    for (long k = 1; k <= max_steps; ++k) {
        stepper.step(s, t0 + k * dt);
        if (k % stride != 0) continue;
        const auto [f1, f2] = stepper.endpoint_loads(s);
        ring.push_back({f1.x(), f1.y(), f1.z(), f2.x(), f2.y(), f2.z()});
        if (static_cast<long>(ring.size()) > window_samples) ring.erase(ring.begin());
        if (static_cast<long>(ring.size()) < window_samples) continue;
        double p2p = 0.0;
        for (int c = 0; c < 6; ++c) {
            double lo = ring[0][c], hi = ring[0][c];
            for (const auto& r : ring) {
                lo = std::min(lo, r[c]);
                hi = std::max(hi, r[c]);
            }
            p2p = std::max(p2p, hi - lo);
        }
        if (p2p < opt.tolerance) return {s, f1, f2, s.time};
    }
    throw NotReached("no steady state before t = " + std::to_string(opt.t_max) + " s");
}

/// Largest dt for which explicit RK4 stays stable on the axial mode of a
/// taut cable, dt * omega_max < 2.83, with omega_max = (2 / l0) sqrt(E / rho_eff).
inline double rk4_stable_dt(const CableProperties& p) {
    const double rho_eff = p.cable_density + p.added_mass_density_value() * p.added_mass_coeff;
    const double omega = 2.0 / p.rest_length() * std::sqrt(p.youngs_modulus / rho_eff);
    return 2.83 / omega;
}

}  // namespace cabledyn::sim
