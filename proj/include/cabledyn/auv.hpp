#pragma once

// 6-DoF vehicle model: kinematics, added-mass/Coriolis/damping dynamics and
// the cable wrench at the attachment point.

#include <cmath>

#include "cabledyn/errors.hpp"
#include "cabledyn/geometry.hpp"

namespace cabledyn::auv {

/// Pose eta = [x y z phi theta psi] (Earth) and body velocity
/// nu = [u v w p q r]; attach_offset is the cable attachment in body axes.
struct AuvState {
    Vec6 eta = Vec6::Zero();
    Vec6 nu = Vec6::Zero();
    Vec3 attach_offset = Vec3::Zero();
};

/// Coefficients are stored as positive magnitudes: M_A is positive
/// definite and the linear damping opposes the velocity. Only the mass is a
/// measured value; the remaining defaults are strip-theory estimates for a
/// 1.05 m x 0.16 m hull.
struct AuvHydroParams {
    double mass = 13.17;               // kg
    Vec3 inertia{0.042, 1.2, 1.2};     // kg m^2 about body axes
    // added mass
    double x_udot = 1.3, y_vdot = 21.6, y_rdot = 0.0, z_wdot = 21.6, z_qdot = 0.0;
    double k_pdot = 0.01, m_wdot = 0.0, m_qdot = 1.5, n_vdot = 0.0, n_rdot = 1.5;
    // linear damping
    double x_u = 10.0, y_v = 60.0, z_w = 60.0, k_p = 0.5, m_q = 8.0, n_r = 8.0;

    Mat6 added_mass() const {
        Mat6 m = Mat6::Zero();
        m(0, 0) = x_udot;
        m(1, 1) = y_vdot; m(1, 5) = y_rdot;
        m(2, 2) = z_wdot; m(2, 4) = z_qdot;
        m(3, 3) = k_pdot;
        m(4, 2) = m_wdot; m(4, 4) = m_qdot;
        m(5, 1) = n_vdot; m(5, 5) = n_rdot;
        return m;
    }

    Mat6 rigid_body_mass() const {
        Mat6 m = Mat6::Zero();
        m.diagonal() << mass, mass, mass, inertia.x(), inertia.y(), inertia.z();
        return m;
    }

    Mat6 damping() const {
        Mat6 d = Mat6::Zero();
        d.diagonal() << x_u, y_v, z_w, k_p, m_q, n_r;
        return d;
    }

    /// Symmetrized M_RB + M_A; throws SingularMassMatrix unless positive definite.
    Mat6 total_mass() const {
        const Mat6 m = rigid_body_mass() + added_mass();
        const Mat6 sym = 0.5 * (m + m.transpose());
        Eigen::LLT<Mat6> llt(sym);
        if (llt.info() != Eigen::Success) throw SingularMassMatrix("M_RB + M_A is not positive definite");
        return sym;
    }
};

/// Added-mass Coriolis/centripetal matrix; skew-symmetric for every nu.
inline Mat6 coriolis_added_mass(const AuvHydroParams& h, const Vec6& nu) {
    const double a1 = h.x_udot * nu[0], a2 = h.y_vdot * nu[1], a3 = h.z_wdot * nu[2];
    const double b1 = h.k_pdot * nu[3], b2 = h.m_qdot * nu[4], b3 = h.n_rdot * nu[5];
    Mat6 c;
    c << 0,   0,   0,   0,   -a3,  a2,
         0,   0,   0,   a3,   0,  -a1,
         0,   0,   0,  -a2,   a1,  0,
         0,  -a3,  a2,  0,   -b3,  b2,
         a3,  0,  -a1,  b3,   0,  -b1,
        -a2,  a1,  0,  -b2,   b1,  0;
    return -c;
}

inline Vec6 auv_kinematics(const AuvState& s) {
    return geometry::auv_rotation(s.eta[3], s.eta[4], s.eta[5]) * s.nu;
}

/// Body accelerations from
///   (M_RB + M_A) nu_dot = tau_c + T_prop + tau_H - C_A(nu) nu - D nu.
inline Vec6 auv_dynamics(const AuvState& s, const AuvHydroParams& h, const Vec6& tau_cable,
                         const Vec6& thrust, const Vec6& tau_hydro = Vec6::Zero()) {
    const Mat6 m = h.total_mass();
    const Vec6 rhs = tau_cable + thrust + tau_hydro - coriolis_added_mass(h, s.nu) * s.nu - h.damping() * s.nu;
    return m.llt().solve(rhs);
}

/// Body-frame wrench of an Earth-frame cable force applied at the attachment point.
inline Vec6 cable_wrench(const Vec3& force_earth, const AuvState& s) {
    const Mat3 r = geometry::linear_velocity_rotation(s.eta[3], s.eta[4], s.eta[5]);
    const Vec3 f = r.transpose() * force_earth;
    Vec6 w;
    w << f, s.attach_offset.cross(f);
    return w;
}

/// One RK4 step of the free vehicle under a constant wrench and thrust.
inline AuvState integrate_vehicle(const AuvState& s, const AuvHydroParams& h, const Vec6& tau_cable,
                                  const Vec6& thrust, double dt) {
    auto deriv = [&](const AuvState& x, Vec6& deta, Vec6& dnu) {
        deta = auv_kinematics(x);
        dnu = auv_dynamics(x, h, tau_cable, thrust);
    };
    Vec6 e1, n1, e2, n2, e3, n3, e4, n4;
    AuvState tmp = s;
    deriv(s, e1, n1);
    tmp.eta = s.eta + 0.5 * dt * e1; tmp.nu = s.nu + 0.5 * dt * n1;
    deriv(tmp, e2, n2);
    tmp.eta = s.eta + 0.5 * dt * e2; tmp.nu = s.nu + 0.5 * dt * n2;
    deriv(tmp, e3, n3);
    tmp.eta = s.eta + dt * e3; tmp.nu = s.nu + dt * n3;
    deriv(tmp, e4, n4);
    AuvState out = s;
    out.eta = s.eta + dt / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
    out.nu = s.nu + dt / 6.0 * (n1 + 2.0 * n2 + 2.0 * n3 + n4);
    return out;
}

}  // namespace cabledyn::auv
