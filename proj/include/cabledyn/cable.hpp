#pragma once

// Lumped-mass cable: node masses, one-sided elastic tension, net buoyancy,
// normal/tangential drag, bending stencils and the nodal right-hand side.
//
// Indexing: nodes 0..N-1, segment s joins node s to node s+1. Node i carries
// half of each adjacent segment (tributary mass, volume and drag).

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cabledyn/errors.hpp"
#include "cabledyn/geometry.hpp"

namespace cabledyn::cable {

enum class AddedMassDensity { water, cable };

/// Material and hydrodynamic constants. Defaults are the identified values of
/// the tank cable.
struct CableProperties {
    int node_count = 30;
    double cable_density = 1025.0;      // kg/m^3
    double water_density = 1025.0;      // kg/m^3
    double cross_section = 0.00384;     // m^2
    double added_mass_coeff = 1.3;
    double youngs_modulus = 3.68e6;     // Pa
    double normal_drag_coeff = 1.8306;
    double tangential_drag_coeff = 0.0756;
    double diameter = 0.07;             // m
    double length = 10.0;               // unstretched, m
    double bending_stiffness = 0.001;   // N m^2
    AddedMassDensity added_mass_density = AddedMassDensity::water;
    Vec3 gravity{0.0, 0.0, 9.81};       // m/s^2, z down

    double rest_length() const { return length / (node_count - 1); }
    double axial_stiffness() const { return youngs_modulus * cross_section; }
    double added_mass_density_value() const {
        return added_mass_density == AddedMassDensity::water ? water_density : cable_density;
    }

    /// Throws ConfigInvalid when an invariant is violated.
    void validate() const {
        if (node_count < 4) throw ConfigInvalid("cable.node_count must be >= 4");
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigInvalid(std::string("cable.") + name + " must be > 0");
        };
        positive(cable_density, "cable_density");
        positive(water_density, "water_density");
        positive(cross_section, "cross_section");
        positive(added_mass_coeff, "added_mass_coeff");
        positive(youngs_modulus, "youngs_modulus");
        positive(normal_drag_coeff, "normal_drag_coeff");
        positive(tangential_drag_coeff, "tangential_drag_coeff");
        positive(diameter, "diameter");
        positive(length, "length");
        if (!(bending_stiffness >= 0.0) || !std::isfinite(bending_stiffness)) {
            throw ConfigInvalid("cable.bending_stiffness must be >= 0");
        }
        if (!gravity.allFinite()) throw ConfigInvalid("cable.gravity must be finite");
    }

    /// Non-fatal consistency findings (cross section vs diameter).
    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        const double circle = std::numbers::pi * diameter * diameter / 4.0;
        if (std::abs(cross_section - circle) > 0.1 * circle) {
            out.push_back("cross_section differs from pi d^2/4 by more than 10%");
        }
        return out;
    }

    bool operator==(const CableProperties&) const = default;
};

/// EI of a solid circular section of diameter d.
inline double solid_section_bending_stiffness(double youngs_modulus, double diameter) {
    return youngs_modulus * std::numbers::pi * std::pow(diameter, 4) / 64.0;
}

struct CableState {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    double time = 0.0;

    std::size_t size() const { return positions.size(); }
    bool all_finite() const {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (!positions[i].allFinite() || !velocities[i].allFinite()) return false;
        }
        return true;
    }
};

/// Water velocity at (position, time): a uniform value unless a field
/// function is supplied.
struct CurrentField {
    Vec3 uniform = Vec3::Zero();
    std::function<Vec3(const Vec3&, double)> field;

    Vec3 operator()(const Vec3& position, double t) const { return field ? field(position, t) : uniform; }
};

inline CurrentField still_water() { return {}; }

inline CurrentField uniform_current(const Vec3& velocity) { return {velocity, {}}; }

// ---------------------------------------------------------------------------
// Per-node force terms
// ---------------------------------------------------------------------------

/// Inertial plus added mass of a node with adjacent lengths l_left, l_right.
inline double node_mass(const CableProperties& p, double l_left, double l_right) {
    const double half = 0.5 * (l_left + l_right);
    return half * p.cross_section * (p.cable_density + p.added_mass_density_value() * p.added_mass_coeff);
}

inline Mat3 node_mass_matrix(const CableProperties& p, double l_left, double l_right) {
    return node_mass(p, l_left, l_right) * Mat3::Identity();
}

/// One-sided strain: slack segments carry no tension.
inline double segment_strain(double length, double rest_length) {
    return length > rest_length ? length / rest_length - 1.0 : 0.0;
}

/// Elastic force on the node at the left end of a segment with unit vector
/// `unit` (pointing to its right end): E sigma eps along +unit.
inline Vec3 segment_tension(const CableProperties& p, const Vec3& unit, double strain) {
    return p.axial_stiffness() * strain * unit;
}

/// Net elastic force on an interior node from its left and right segments.
/// Each taut segment pulls the node toward its other end.
inline Vec3 tension_delta(const CableProperties& p,
                          const geometry::SegmentFrame& left, double left_strain,
                          const geometry::SegmentFrame& right, double right_strain) {
    return segment_tension(p, right.tangent(), right_strain) - segment_tension(p, left.tangent(), left_strain);
}

/// Tributary net weight; zero for a neutrally buoyant cable.
inline Vec3 net_buoyancy(const CableProperties& p, double l_left, double l_right) {
    const double volume = 0.5 * p.cross_section * (l_left + l_right);
    return (p.cable_density - p.water_density) * volume * p.gravity;
}

/// Quadratic drag on `wetted_length` of a segment with unit tangent `unit`.
/// Relative velocity is split into tangential and normal parts.
inline Vec3 drag_force(const CableProperties& p, const Vec3& node_velocity, const Vec3& current,
                       const Vec3& unit, double strain, double wetted_length) {
    const Vec3 rel = node_velocity - current;
    const Vec3 vt = rel.dot(unit) * unit;
    const Vec3 vn = rel - vt;
    const double k = 0.5 * p.water_density * std::sqrt(1.0 + strain) * wetted_length * p.diameter;
    return -k * (p.normal_drag_coeff * vn.norm() * vn +
                 std::numbers::pi * p.tangential_drag_coeff * vt.norm() * vt);
}

inline Vec3 drag_force(const CableProperties& p, const Vec3& node_velocity, const Vec3& current,
                       const geometry::SegmentFrame& frame, double strain, double wetted_length) {
    return drag_force(p, node_velocity, current, frame.tangent(), strain, wetted_length);
}

enum class NodeRole { interior, left_boundary, right_boundary };

/// Finite-difference bending restoring force.
///
/// `window` holds (P_{i-1}, P_i, P_{i+1}) for interior nodes, (P_1..P_4) for
/// the left boundary and (P_N, P_{N-1}, P_{N-2}, P_{N-3}) for the right one.
/// The force points toward the local chord.
inline Vec3 bending_force(const CableProperties& p, std::span<const Vec3> window, NodeRole role) {
    const double l0 = p.rest_length();
    const double k = p.bending_stiffness / (l0 * l0 * l0);
    switch (role) {
        case NodeRole::interior:
            return k * (window[2] - 2.0 * window[1] + window[0]);
        case NodeRole::left_boundary:
        case NodeRole::right_boundary:
            return k * (2.0 * window[0] - 5.0 * window[1] + 4.0 * window[2] - window[3]);
    }
    return Vec3::Zero();
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// Cached per-segment quantities for one configuration.
struct SegmentData {
    Vec3 unit = Vec3::Zero();
    double length = 0.0;
    double strain = 0.0;
};

/// Nodal forces of one configuration. `force[i]` is the resultant of
/// buoyancy, drag, tension and bending; `mass[i]` the isotropic node mass.
struct NodalForces {
    std::vector<SegmentData> segments;
    std::vector<Vec3> force;
    std::vector<double> mass;
};

inline void compute_segments(const CableProperties& p, std::span<const Vec3> pos,
                             std::vector<SegmentData>& seg) {
    const std::size_t n = pos.size();
    const double l0 = p.rest_length();
    seg.resize(n - 1);
    for (std::size_t s = 0; s + 1 < n; ++s) {
        const Vec3 d = pos[s + 1] - pos[s];
        const double l = d.norm();
        if (!(l > geometry::kMinSegmentLength)) {
            throw DegenerateSegment("nodes " + std::to_string(s) + " and " + std::to_string(s + 1) + " coincide");
        }
        seg[s].unit = d / l;
        seg[s].length = l;
        seg[s].strain = segment_strain(l, l0);
    }
}

inline void compute_nodal_forces(const CableProperties& p, std::span<const Vec3> pos,
                                 std::span<const Vec3> vel, double t, const CurrentField& current,
                                 NodalForces& out) {
    const std::size_t n = pos.size();
    compute_segments(p, pos, out.segments);
    out.force.resize(n);
    out.mass.resize(n);

    const double ea = p.axial_stiffness();
    const double l0 = p.rest_length();
    const double kb = p.bending_stiffness / (l0 * l0 * l0);
    const double dbuoy = (p.cable_density - p.water_density) * 0.5 * p.cross_section;
    const double mass_per_len = 0.5 * p.cross_section *
                                (p.cable_density + p.added_mass_density_value() * p.added_mass_coeff);
    const auto& seg = out.segments;

    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 water = current(pos[i], t);
        Vec3 f = Vec3::Zero();
        double adjacent = 0.0;
        if (i > 0) {
            const SegmentData& s = seg[i - 1];
            f -= ea * s.strain * s.unit;
            f += drag_force(p, vel[i], water, s.unit, s.strain, 0.5 * s.length);
            adjacent += s.length;
        }
        if (i + 1 < n) {
            const SegmentData& s = seg[i];
            f += ea * s.strain * s.unit;
            f += drag_force(p, vel[i], water, s.unit, s.strain, 0.5 * s.length);
            adjacent += s.length;
        }
        f += dbuoy * adjacent * p.gravity;
        if (kb != 0.0) {
            if (i == 0) {
                f += kb * (2.0 * pos[0] - 5.0 * pos[1] + 4.0 * pos[2] - pos[3]);
            } else if (i + 1 == n) {
                f += kb * (2.0 * pos[n - 1] - 5.0 * pos[n - 2] + 4.0 * pos[n - 3] - pos[n - 4]);
            } else {
                f += kb * (pos[i + 1] - 2.0 * pos[i] + pos[i - 1]);
            }
        }
        out.force[i] = f;
        out.mass[i] = mass_per_len * adjacent;
    }
}

/// Accelerations of every node plus the loads the cable applies to the two
/// vehicles. Endpoint accelerations are the prescribed ones; the load is the
/// nodal resultant minus M_end * a_end (the negative of the constraint
/// reaction the vehicle exerts on the end node).
struct RhsResult {
    std::vector<Vec3> accelerations;
    Vec3 load_first = Vec3::Zero();
    Vec3 load_last = Vec3::Zero();
};

inline void assemble_rhs(const CableProperties& p, std::span<const Vec3> pos, std::span<const Vec3> vel,
                         double t, const CurrentField& current, const Vec3& accel_first,
                         const Vec3& accel_last, NodalForces& work, RhsResult& out) {
    const std::size_t n = pos.size();
    compute_nodal_forces(p, pos, vel, t, current, work);
    out.accelerations.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out.accelerations[i] = work.force[i] / work.mass[i];
    }
    out.accelerations[0] = accel_first;
    out.accelerations[n - 1] = accel_last;
    out.load_first = work.force[0] - work.mass[0] * accel_first;
    out.load_last = work.force[n - 1] - work.mass[n - 1] * accel_last;
    for (const Vec3& a : out.accelerations) {
        if (!a.allFinite()) throw DivergedState(t);
    }
}

inline RhsResult assemble_rhs(const CableProperties& p, const CableState& state, const CurrentField& current,
                              const Vec3& accel_first, const Vec3& accel_last) {
    NodalForces work;
    RhsResult out;
    assemble_rhs(p, state.positions, state.velocities, state.time, current, accel_first, accel_last, work, out);
    return out;
}

}  // namespace cabledyn::cable
