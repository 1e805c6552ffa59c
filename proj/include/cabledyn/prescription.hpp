#pragma once

// Prescribed endpoint trajectories. The vehicles act as moving boundaries:
// each cable end follows a closed-form (or spline-interpolated) path.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cabledyn/errors.hpp"
#include "cabledyn/geometry.hpp"

namespace cabledyn::auv {

struct Kinematics {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
};

/// A C1 velocity change of `delta_velocity` spread over [t_start, t_start + duration].
struct VelocityRamp {
    double t_start = 0.0;
    double duration = 1.0;
    Vec3 delta_velocity = Vec3::Zero();

    bool operator==(const VelocityRamp&) const = default;
};

/// Named profile plus the union of its parameters.
///
///   constant             position + velocity * t
///   ramp_hold            0 -> velocity over [t_start, t_start + ramp]
///   sinusoidal           speed (mean + amplitude sin(omega t + phase)) along direction
///   schedule             velocity0 plus a list of ramps
///   formation_transition cruise ramp then a lateral/vertical shift (see expand)
///   piecewise            cubic spline through CSV samples t,x1,y1,z1,x2,y2,z2
struct ProfileSpec {
    std::string kind = "constant";
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 direction = Vec3::UnitX();
    double t_start = 0.0;
    double ramp = 1.0;
    double mean = 0.0;
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    std::vector<VelocityRamp> ramps;
    // formation_transition
    double cruise_speed = 0.5;
    double accel_start = 10.0;
    double accel_duration = 15.0;
    double shift_start = 55.0;
    double shift_duration = 45.0;
    double shift_ramp = 5.0;
    Vec3 shift = Vec3::Zero();
    // piecewise
    std::string file;

    bool operator==(const ProfileSpec&) const = default;
};

namespace detail {

// Smooth step S(u) = 3u^2 - 2u^3 and its integral / derivative.
inline double smoothstep(double u) { return u <= 0 ? 0 : u >= 1 ? 1 : u * u * (3.0 - 2.0 * u); }
inline double smoothstep_rate(double u) { return u <= 0 || u >= 1 ? 0 : 6.0 * u * (1.0 - u); }
inline double smoothstep_integral(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 0.5 + (u - 1.0);
    return u * u * u - 0.5 * u * u * u * u;
}

/// Natural cubic spline through (t_k, y_k), evaluates value and two derivatives.
class NaturalSpline {
public:
    NaturalSpline() = default;
    NaturalSpline(std::vector<double> t, std::vector<double> y) : t_(std::move(t)), y_(std::move(y)) {
        const std::size_t n = t_.size();
        m_.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t_[i] - t_[i - 1], h1 = t_[i + 1] - t_[i];
            const double a = h0, b = 2.0 * (h0 + h1), cc = h1;
            const double r = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
        }
    }

    std::array<double, 3> eval(double t) const {
        const std::size_t n = t_.size();
        if (n == 1) return {y_[0], 0.0, 0.0};
        std::size_t k = 0;
        if (t >= t_.back()) {
            k = n - 2;
        } else if (t > t_.front()) {
            k = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
        }
        const double h = t_[k + 1] - t_[k];
        // Outside the sample range, hold the end derivative (linear extrapolation).
        const double tc = std::clamp(t, t_.front(), t_.back());
        const double a = (t_[k + 1] - tc) / h, b = (tc - t_[k]) / h;
        const double val = a * y_[k] + b * y_[k + 1] + ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
        const double der = (y_[k + 1] - y_[k]) / h + (-(3 * a * a - 1) * m_[k] + (3 * b * b - 1) * m_[k + 1]) * h / 6.0;
        const double acc = a * m_[k] + b * m_[k + 1];
        if (t != tc) return {val + der * (t - tc), der, 0.0};
        return {val, der, acc};
    }

private:
    std::vector<double> t_, y_, m_;
};

}  // namespace detail

/// Time-parameterized endpoint path.
class Trajectory {
public:
    using Fn = std::function<Kinematics(double)>;
    Trajectory() : fn_([](double) { return Kinematics{}; }) {}
    explicit Trajectory(Fn fn) : fn_(std::move(fn)) {}
    Kinematics operator()(double t) const { return fn_(t); }

private:
    Fn fn_;
};

inline Trajectory constant_velocity(const Vec3& p0, const Vec3& v) {
    return Trajectory([=](double t) { return Kinematics{p0 + v * t, v, Vec3::Zero()}; });
}

inline Trajectory velocity_schedule(const Vec3& p0, const Vec3& v0, std::vector<VelocityRamp> ramps) {
    return Trajectory([=, ramps = std::move(ramps)](double t) {
        Kinematics k{p0 + v0 * t, v0, Vec3::Zero()};
        for (const VelocityRamp& r : ramps) {
            const double u = (t - r.t_start) / r.duration;
            k.position += r.delta_velocity * (r.duration * detail::smoothstep_integral(u));
            k.velocity += r.delta_velocity * detail::smoothstep(u);
            k.acceleration += r.delta_velocity * (detail::smoothstep_rate(u) / r.duration);
        }
        return k;
    });
}

inline Trajectory sinusoidal(const Vec3& p0, const Vec3& direction, double mean, double amplitude,
                             double omega, double phase) {
    const Vec3 e = direction.normalized();
    return Trajectory([=](double t) {
        const double s = mean * t + (omega != 0.0 ? amplitude * (std::cos(phase) - std::cos(omega * t + phase)) / omega : 0.0);
        const double v = mean + amplitude * std::sin(omega * t + phase);
        const double a = amplitude * omega * std::cos(omega * t + phase);
        return Kinematics{p0 + s * e, v * e, a * e};
    });
}

/// Endpoint samples loaded from a trajectory file.
struct TrajectoryTable {
    std::vector<double> t;
    std::array<std::vector<double>, 6> coords;  // x1 y1 z1 x2 y2 z2
};

inline TrajectoryTable read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigInvalid("trajectory file is empty: " + path);
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    {
        std::stringstream ss(line);
        std::string cell, joined;
        while (std::getline(ss, cell, ',')) joined += (joined.empty() ? "" : ",") + trim(cell);
        if (joined != "t,x1,y1,z1,x2,y2,z2") throw ConfigInvalid("trajectory header must be t,x1,y1,z1,x2,y2,z2");
    }
    TrajectoryTable table;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigInvalid("non-numeric trajectory value '" + cell + "'");
            }
        }
        if (row.size() != 7) throw ConfigInvalid("trajectory rows need 7 columns");
        if (!table.t.empty() && !(row[0] > table.t.back())) throw ConfigInvalid("trajectory time must increase");
        table.t.push_back(row[0]);
        for (int c = 0; c < 6; ++c) table.coords[c].push_back(row[c + 1]);
    }
    if (table.t.size() < 2) throw ConfigInvalid("trajectory needs at least two samples");
    return table;
}

inline Trajectory piecewise(const TrajectoryTable& table, int endpoint) {
    auto splines = std::make_shared<std::array<detail::NaturalSpline, 3>>();
    for (int c = 0; c < 3; ++c) (*splines)[c] = detail::NaturalSpline(table.t, table.coords[3 * endpoint + c]);
    return Trajectory([splines](double t) {
        Kinematics k;
        for (int c = 0; c < 3; ++c) {
            const auto e = (*splines)[c].eval(t);
            k.position[c] = e[0];
            k.velocity[c] = e[1];
            k.acceleration[c] = e[2];
        }
        return k;
    });
}

/// formation_transition as an explicit ramp list: accelerate along +x to the
/// cruise speed, then move by `shift` over the shift window with C1 velocity
/// ramps of length shift_ramp at both ends.
inline std::vector<VelocityRamp> expand_formation_transition(const ProfileSpec& s) {
    std::vector<VelocityRamp> ramps;
    ramps.push_back({s.accel_start, s.accel_duration, Vec3(s.cruise_speed, 0.0, 0.0)});
    if (s.shift.norm() > 0.0) {
        const double plateau = s.shift_duration - s.shift_ramp;
        const Vec3 v = s.shift / plateau;
        ramps.push_back({s.shift_start, s.shift_ramp, v});
        ramps.push_back({s.shift_start + plateau, s.shift_ramp, -v});
    }
    return ramps;
}

inline Trajectory make_trajectory(const ProfileSpec& s, int endpoint, const std::string& base_dir = "") {
    if (s.kind == "constant") return constant_velocity(s.position, s.velocity);
    if (s.kind == "ramp_hold") {
        return velocity_schedule(s.position, Vec3::Zero(), {VelocityRamp{s.t_start, s.ramp, s.velocity}});
    }
    if (s.kind == "sinusoidal") return sinusoidal(s.position, s.direction, s.mean, s.amplitude, s.omega, s.phase);
    if (s.kind == "schedule") return velocity_schedule(s.position, s.velocity, s.ramps);
    if (s.kind == "formation_transition") {
        return velocity_schedule(s.position, Vec3::Zero(), expand_formation_transition(s));
    }
    if (s.kind == "piecewise") {
        std::string path = s.file;
        if (!base_dir.empty() && !path.empty() && path.front() != '/') path = base_dir + "/" + path;
        return piecewise(read_trajectory_csv(path), endpoint);
    }
    throw UnknownProfile("unknown boundary profile '" + s.kind + "'");
}

/// Kinematics of both cable ends.
class BoundaryPrescription {
public:
    BoundaryPrescription() = default;
    BoundaryPrescription(Trajectory first, Trajectory second) : ends_{std::move(first), std::move(second)} {}

    Kinematics at(int endpoint, double t) const { return ends_[endpoint](t); }
    Kinematics first(double t) const { return ends_[0](t); }
    Kinematics second(double t) const { return ends_[1](t); }

    /// Largest central-difference mismatch |dp/dt - v| / (1 + |v|) on a grid
    /// of step h over [0, horizon].
    double velocity_consistency(double horizon, double h = 1e-3) const {
        double worst = 0.0;
        for (int e = 0; e < 2; ++e) {
            for (double t = h; t < horizon; t += h) {
                const Vec3 fd = (ends_[e](t + h).position - ends_[e](t - h).position) / (2.0 * h);
                const Vec3 v = ends_[e](t).velocity;
                worst = std::max(worst, (fd - v).norm() / (1.0 + v.norm()));
            }
        }
        return worst;
    }

private:
    std::array<Trajectory, 2> ends_;
};

/// Build and self-check a prescription; throws ConfigInvalid when velocity is
/// not the derivative of position within 1e-6 (1 + |v|).
inline BoundaryPrescription prescribe(const ProfileSpec& first, const ProfileSpec& second, double horizon,
                                      const std::string& base_dir = "") {
    BoundaryPrescription b(make_trajectory(first, 0, base_dir), make_trajectory(second, 1, base_dir));
    const double mismatch = b.velocity_consistency(std::min(horizon, 600.0));
    if (!(mismatch <= 1e-6)) {
        throw ConfigInvalid("boundary velocity is not the derivative of position (mismatch " +
                            std::to_string(mismatch) + ")");
    }
    return b;
}

}  // namespace cabledyn::auv
