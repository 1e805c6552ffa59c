#pragma once

// Segment frames of the lumped-mass cable and the vehicle Euler-angle
// transforms. Earth frame is x forward, y starboard, z down.

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "cabledyn/errors.hpp"

namespace cabledyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

namespace geometry {

/// Coincident-node threshold [m].
inline constexpr double kMinSegmentLength = 1e-9;
/// Lower bound on |cos(theta)| accepted by the angular-rate transform.
inline constexpr double kMinCosPitch = 1e-6;

/// Orientation of one massless spring segment joining node i-1 to node i.
struct SegmentFrame {
    double length = 0.0;
    double phi = 0.0;    // rotation about x_E
    double gamma = 0.0;  // rotation about b_i, two-branch convention
    Mat3 rotation = Mat3::Identity();

    /// Earth-frame unit vector from node i-1 to node i.
    Vec3 tangent() const { return rotation.col(0); }
};

inline double segment_length(const Vec3& p_prev, const Vec3& p_curr) {
    return (p_curr - p_prev).norm();
}

namespace detail {

// Ry(gamma) * Rz(phi); columns are the local (t, n, b) axes in Earth coordinates.
inline Mat3 frame_rotation(double phi, double gamma) {
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    Mat3 r;
    r << cg * cp, -cg * sp, sg,
         sp,       cp,      0.0,
        -sg * cp,  sg * sp, cg;
    return r;
}

}  // namespace detail

/// Euler angles and rotation of the segment from p_prev to p_curr.
///
/// (phi, gamma) follow the two-branch rule on the sign of dX. That rule places
/// gamma half a turn away from the rotation whose first column is the segment
/// direction, so the rotation is assembled at gamma - pi; tangent() then
/// returns (p_curr - p_prev) / l.
inline SegmentFrame segment_frame(const Vec3& p_prev, const Vec3& p_curr) {
    const Vec3 d = p_curr - p_prev;
    const double l = d.norm();
    if (!(l > kMinSegmentLength)) {
        throw DegenerateSegment("segment shorter than 1e-9 m");
    }
    SegmentFrame f;
    f.length = l;
    // asin of the branch rule evaluated through atan2, which keeps full
    // precision near +-pi/2
    const double lc = std::hypot(d.x(), d.z());
    f.phi = std::atan2(d.y(), lc);
    const double z = lc > kMinSegmentLength ? d.z() : 0.0;
    f.gamma = d.x() <= 0.0 ? std::atan2(z, -d.x()) : std::numbers::pi - std::atan2(z, d.x());
    f.rotation = detail::frame_rotation(f.phi, f.gamma - std::numbers::pi);
    return f;
}

/// Body-to-Earth rotation of linear velocities (roll phi, pitch theta, yaw psi).
inline Mat3 linear_velocity_rotation(double phi, double theta, double psi) {
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cs = std::cos(psi), ss = std::sin(psi);
    Mat3 r;
    r << ct * cs, sf * st * cs - cf * ss, cf * st * cs + sf * ss,
         ct * ss, sf * st * ss + cf * cs, cf * st * ss - sf * cs,
        -st,      sf * ct,                cf * ct;
    return r;
}

/// Body angular rates to Euler-angle rates.
inline Mat3 angular_velocity_transform(double phi, double theta) {
    const double ct = std::cos(theta);
    if (std::abs(ct) < kMinCosPitch) {
        throw GimbalSingularity("pitch angle too close to +-pi/2");
    }
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double tt = std::tan(theta);
    Mat3 t;
    t << 1.0, sf * tt, cf * tt,
         0.0, cf,      -sf,
         0.0, sf / ct, cf / ct;
    return t;
}

/// Full 6x6 block-diagonal transform from body velocities to pose rates.
inline Mat6 auv_rotation(double phi, double theta, double psi) {
    Mat6 r = Mat6::Zero();
    r.block<3, 3>(3, 3) = angular_velocity_transform(phi, theta);
    r.block<3, 3>(0, 0) = linear_velocity_rotation(phi, theta, psi);
    return r;
}

}  // namespace geometry
}  // namespace cabledyn
