#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cabledyn/cable.hpp"

using namespace cabledyn;
using cable::CableProperties;

namespace {

std::vector<Vec3> straight(int n, double spacing, const Vec3& dir = Vec3::UnitX()) {
    std::vector<Vec3> p;
    for (int i = 0; i < n; ++i) p.push_back(i * spacing * dir);
    return p;
}

Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
}

}  // namespace

TEST(NodeMass, TableOneUnitLengths) {
    CableProperties p;
    const double rigid = 1025.0 * 0.00384;
    EXPECT_NEAR(rigid, 3.936, 1e-12);
    EXPECT_NEAR(node_mass(p, 1.0, 1.0), rigid * (1.0 + 1.3), 1e-12);
    EXPECT_NEAR(node_mass(p, 1.0, 1.0) - rigid, 5.1168, 1e-4);
    const Mat3 m = cable::node_mass_matrix(p, 1.0, 1.0);
    EXPECT_LT((m - m(0, 0) * Mat3::Identity()).norm(), 1e-15);
}

TEST(NodeMass, MasslessLimitAndNoAddedMass) {
    CableProperties p;
    EXPECT_EQ(cable::node_mass_matrix(p, 0.0, 0.0), Mat3::Zero());
    p.added_mass_coeff = 0.0;
    EXPECT_DOUBLE_EQ(node_mass(p, 0.4, 0.6), 0.5 * 1025.0 * 0.00384 * 1.0);
}

TEST(NodeMass, AddedMassDensitySwitch) {
    CableProperties p;
    p.cable_density = 1300.0;
    const double water = node_mass(p, 1.0, 1.0);
    p.added_mass_density = cable::AddedMassDensity::cable;
    const double cable = node_mass(p, 1.0, 1.0);
    EXPECT_NEAR(cable - water, 0.00384 * 1.3 * (1300.0 - 1025.0), 1e-12);
}

TEST(Strain, OneSidedLaw) {
    EXPECT_NEAR(cable::segment_strain(1.1, 1.0), 0.1, 1e-15);
    EXPECT_EQ(cable::segment_strain(0.9, 1.0), 0.0);
    EXPECT_EQ(cable::segment_strain(1.0, 1.0), 0.0);
}

TEST(TensionDelta, SlackAndBalancedCases) {
    CableProperties p;
    const auto left = geometry::segment_frame({0, 0, 0}, {1, 0, 0});
    const auto right = geometry::segment_frame({1, 0, 0}, {2, 0, 0});
    EXPECT_EQ(cable::tension_delta(p, left, 0.0, right, 0.0), Vec3::Zero());
    EXPECT_LT(cable::tension_delta(p, left, 0.02, right, 0.02).norm(), 1e-12);
}

TEST(TensionDelta, SingleStrainedSegmentMagnitude) {
    CableProperties p;
    const auto left = geometry::segment_frame({0, 0, 0}, {1, 0, 0});
    const auto right = geometry::segment_frame({1, 0, 0}, {1, 1, 0});
    const Vec3 f = cable::tension_delta(p, left, 0.01, right, 0.0);
    EXPECT_NEAR(f.norm(), 3.68e6 * 0.00384 * 0.01, 1e-9);
    EXPECT_NEAR(f.norm(), 141.3, 0.05);
    // pulls the node back toward its left neighbour
    EXPECT_LT(f.dot(left.tangent()), 0.0);
}

TEST(NetBuoyancy, NeutralHeavyAndZeroSection) {
    CableProperties p;
    EXPECT_EQ(cable::net_buoyancy(p, 1.0, 1.0), Vec3::Zero());
    p.cable_density = 1300.0;
    const Vec3 b = cable::net_buoyancy(p, 1.0, 1.0);
    EXPECT_NEAR(b.z(), 275.0 * 0.00384 * 9.81, 1e-12);
    EXPECT_NEAR(b.z(), 10.36, 0.005);
    EXPECT_EQ(b.x(), 0.0);
    p.cross_section = 0.0;
    EXPECT_EQ(cable::net_buoyancy(p, 1.0, 1.0), Vec3::Zero());
}

TEST(Drag, NormalFlowMagnitude) {
    CableProperties p;
    const Vec3 d = cable::drag_force(p, Vec3(1, 0, 0), Vec3::Zero(), Vec3::UnitY(), 0.0, 1.0);
    EXPECT_NEAR(d.norm(), 0.5 * 1025.0 * 1.8306 * 0.07, 1e-10);
    EXPECT_NEAR(d.norm(), 65.67, 0.005);
    EXPECT_LT(d.x(), 0.0);
}

TEST(Drag, TangentialFlowCarriesPi) {
    CableProperties p;
    const Vec3 d = cable::drag_force(p, Vec3(1, 0, 0), Vec3::Zero(), Vec3::UnitX(), 0.0, 1.0);
    EXPECT_NEAR(d.norm(), 0.5 * 1025.0 * std::numbers::pi * 0.0756 * 0.07, 1e-10);
}

TEST(Drag, NoRelativeFlowAndQuadraticLaw) {
    CableProperties p;
    const Vec3 unit = Vec3(1, 2, -1).normalized();
    EXPECT_EQ(cable::drag_force(p, Vec3(0.3, -0.2, 1), Vec3(0.3, -0.2, 1), unit, 0.05, 0.7), Vec3::Zero());
    const Vec3 v(0.4, -0.3, 0.2);
    const Vec3 d1 = cable::drag_force(p, v, Vec3::Zero(), unit, 0.01, 0.7);
    const Vec3 d2 = cable::drag_force(p, 2.0 * v, Vec3::Zero(), unit, 0.01, 0.7);
    EXPECT_LT((d2 - 4.0 * d1).norm(), 1e-12 * d2.norm());
}

TEST(Drag, StrainEntersAsSqrtFactor) {
    CableProperties p;
    const Vec3 v(0.0, 0.5, 0.0);
    const Vec3 d0 = cable::drag_force(p, v, Vec3::Zero(), Vec3::UnitX(), 0.0, 1.0);
    const Vec3 d1 = cable::drag_force(p, v, Vec3::Zero(), Vec3::UnitX(), 0.21, 1.0);
    EXPECT_NEAR(d1.norm() / d0.norm(), 1.1, 1e-12);
}

TEST(Bending, CollinearGivesZeroForEveryStencil) {
    CableProperties p;
    p.bending_stiffness = 2.5;
    const auto line = straight(4, 0.3, Vec3(1, 1, 1).normalized());
    std::vector<Vec3> rev(line.rbegin(), line.rend());
    EXPECT_LT(cable::bending_force(p, std::span(line).first(3), cable::NodeRole::interior).norm(), 1e-12);
    EXPECT_LT(cable::bending_force(p, line, cable::NodeRole::left_boundary).norm(), 1e-12);
    EXPECT_LT(cable::bending_force(p, rev, cable::NodeRole::right_boundary).norm(), 1e-12);
}

TEST(Bending, ZeroStiffnessIsZero) {
    CableProperties p;
    p.bending_stiffness = 0.0;
    const std::vector<Vec3> w{{0, 0, 0}, {0.1, 0.4, 0}, {0.7, 0, 0.2}, {1, 1, 1}};
    EXPECT_EQ(cable::bending_force(p, w, cable::NodeRole::left_boundary), Vec3::Zero());
}

TEST(Bending, DisplacedInteriorNodeIsPulledBack) {
    CableProperties p;
    p.bending_stiffness = 0.8;
    const double l0 = p.rest_length(), delta = 0.01;
    const std::vector<Vec3> w{{0, 0, 0}, {0, delta, 0}, {0, 0, 0}};
    const Vec3 f = cable::bending_force(p, w, cable::NodeRole::interior);
    EXPECT_NEAR(f.norm(), 2.0 * p.bending_stiffness * delta / std::pow(l0, 3), 1e-9);
    EXPECT_LT(f.y(), 0.0);
}

TEST(Bending, InteriorStencilsSumToZeroOnStraightCable) {
    CableProperties p;
    p.bending_stiffness = 1.0;
    const auto line = straight(12, 0.25, Vec3(0.3, -0.4, 0.2).normalized());
    Vec3 sum = Vec3::Zero();
    for (std::size_t i = 1; i + 1 < line.size(); ++i) {
        sum += cable::bending_force(p, std::span(line).subspan(i - 1, 3), cable::NodeRole::interior);
    }
    EXPECT_LT(sum.norm(), 1e-10);
}

TEST(NodalForces, SegmentPairCancelsExactly) {
    CableProperties p;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0), e(0.0, 0.2);
    for (int k = 0; k < 10000; ++k) {
        const Vec3 unit = Vec3(u(rng), u(rng), u(rng)).normalized();
        const double strain = e(rng);
        const Vec3 on_left = cable::segment_tension(p, unit, strain);
        const Vec3 on_right = -cable::segment_tension(p, unit, strain);
        EXPECT_EQ(on_left + on_right, Vec3::Zero());
    }
}

TEST(NodalForces, ElasticForcesSumToZeroOverCable) {
    CableProperties p;
    p.bending_stiffness = 0.0;
    p.node_count = 8;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    auto pos = straight(8, p.rest_length() * 1.05);
    for (auto& x : pos) x += Vec3(u(rng), u(rng), u(rng));
    const std::vector<Vec3> vel(8, Vec3::Zero());
    cable::NodalForces nf;
    cable::compute_nodal_forces(p, pos, vel, 0.0, cable::still_water(), nf);
    Vec3 sum = Vec3::Zero();
    double scale = 0.0;
    for (const auto& f : nf.force) sum += f, scale += f.norm();
    EXPECT_LT(sum.norm(), 1e-12 * scale);
}

TEST(NodalForces, CompressedSegmentsCarryNoElasticForce) {
    CableProperties p;
    p.bending_stiffness = 0.0;
    p.node_count = 10;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0), frac(0.2, 0.999);
    for (int k = 0; k < 200; ++k) {
        std::vector<Vec3> pos{Vec3::Zero()};
        for (int i = 1; i < p.node_count; ++i) {
            pos.push_back(pos.back() + frac(rng) * p.rest_length() * Vec3(u(rng), u(rng), u(rng)).normalized());
        }
        const std::vector<Vec3> vel(p.node_count, Vec3::Zero());
        cable::NodalForces nf;
        cable::compute_nodal_forces(p, pos, vel, 0.0, cable::still_water(), nf);
        for (const auto& f : nf.force) EXPECT_EQ(f, Vec3::Zero());
    }
}

TEST(NodalForces, DragIsDissipative) {
    CableProperties p;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0), e(0.0, 0.1), l(0.01, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const Vec3 v(u(rng), u(rng), u(rng)), j(u(rng), u(rng), u(rng));
        const Vec3 unit = Vec3(u(rng), u(rng), u(rng)).normalized();
        const Vec3 d = cable::drag_force(p, v, j, unit, e(rng), l(rng));
        EXPECT_LE(d.dot(v - j), 0.0);
    }
}

TEST(NodalForces, FrameIndependence) {
    CableProperties p;
    p.node_count = 9;
    p.cable_density = 1300.0;
    p.bending_stiffness = 0.05;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    auto pos = straight(9, p.rest_length() * 1.01, Vec3(1, 0.2, 0.1).normalized());
    std::vector<Vec3> vel;
    for (auto& x : pos) {
        x += Vec3(u(rng), u(rng), u(rng));
        vel.emplace_back(u(rng), u(rng), u(rng));
    }
    const Vec3 water(0.2, -0.1, 0.05);
    cable::NodalForces base;
    cable::compute_nodal_forces(p, pos, vel, 0.0, cable::uniform_current(water), base);
    for (int k = 0; k < 100; ++k) {
        const Mat3 r = random_rotation(rng);
        CableProperties q = p;
        q.gravity = r * p.gravity;
        std::vector<Vec3> rp, rv;
        for (std::size_t i = 0; i < pos.size(); ++i) rp.push_back(r * pos[i]), rv.push_back(r * vel[i]);
        cable::NodalForces rot;
        cable::compute_nodal_forces(q, rp, rv, 0.0, cable::uniform_current(r * water), rot);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const Vec3 expected = r * base.force[i];
            EXPECT_LE((rot.force[i] - expected).norm(), 1e-8 * std::max(1.0, expected.norm()));
        }
    }
}

TEST(NodalForces, MassPositiveDefinite) {
    CableProperties p;
    EXPECT_GT(node_mass(p, 0.0, 0.2), 0.0);
    EXPECT_GT(node_mass(p, 0.3, 0.0), 0.0);
    Eigen::LLT<Mat3> llt(cable::node_mass_matrix(p, 0.1, 0.2));
    EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(AssembleRhs, StraightNeutralCableAtRestIsInEquilibrium) {
    CableProperties p;
    p.node_count = 11;
    p.length = 5.0;
    cable::CableState s;
    s.positions = straight(11, p.rest_length());
    s.velocities.assign(11, Vec3::Zero());
    const auto r = cable::assemble_rhs(p, s, cable::still_water(), Vec3::Zero(), Vec3::Zero());
    for (const auto& a : r.accelerations) EXPECT_LT(a.norm(), 1e-12);
    EXPECT_LT(r.load_first.norm(), 1e-12);
    EXPECT_LT(r.load_last.norm(), 1e-12);
}

TEST(AssembleRhs, EndpointAccelerationsArePrescribed) {
    CableProperties p;
    p.node_count = 6;
    p.length = 2.0;
    cable::CableState s;
    s.positions = straight(6, p.rest_length() * 1.02);
    s.velocities.assign(6, Vec3(0.1, 0, 0));
    const Vec3 a0(0.3, 0, 0), a1(-0.2, 0.1, 0);
    const auto r = cable::assemble_rhs(p, s, cable::still_water(), a0, a1);
    EXPECT_EQ(r.accelerations.front(), a0);
    EXPECT_EQ(r.accelerations.back(), a1);
    // a stretched cable pulls the first vehicle toward the second
    EXPECT_GT(r.load_first.x(), 0.0);
    EXPECT_LT(r.load_last.x(), 0.0);
}

TEST(AssembleRhs, NonFiniteStateDiverges) {
    CableProperties p;
    p.node_count = 5;
    cable::CableState s;
    s.positions = straight(5, p.rest_length());
    s.velocities.assign(5, Vec3::Zero());
    s.velocities[2].x() = std::numeric_limits<double>::infinity();
    EXPECT_THROW(cable::assemble_rhs(p, s, cable::still_water(), Vec3::Zero(), Vec3::Zero()), DivergedState);
}

TEST(AssembleRhs, CoincidentNodesAreRejected) {
    CableProperties p;
    p.node_count = 5;
    cable::CableState s;
    s.positions = straight(5, p.rest_length());
    s.positions[3] = s.positions[2];
    s.velocities.assign(5, Vec3::Zero());
    EXPECT_THROW(cable::assemble_rhs(p, s, cable::still_water(), Vec3::Zero(), Vec3::Zero()), DegenerateSegment);
}

TEST(CableProperties, ValidationAndWarnings) {
    CableProperties p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_TRUE(p.warnings().empty());
    p.node_count = 3;
    EXPECT_THROW(p.validate(), ConfigInvalid);
    p = CableProperties{};
    p.bending_stiffness = -1.0;
    EXPECT_THROW(p.validate(), ConfigInvalid);
    p = CableProperties{};
    p.cross_section = 0.001;
    EXPECT_EQ(p.warnings().size(), 1u);
}
