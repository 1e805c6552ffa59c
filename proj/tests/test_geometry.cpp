#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cabledyn/geometry.hpp"

using namespace cabledyn;
using geometry::segment_frame;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(SegmentLength, AxisAlignedAndPythagorean) {
    EXPECT_DOUBLE_EQ(geometry::segment_length({0, 0, 0}, {1, 0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(geometry::segment_length({0, 0, 0}, {3, 4, 0}), 5.0);
    EXPECT_DOUBLE_EQ(geometry::segment_length({0, 0, 0}, {0, 0, 0}), 0.0);
}

TEST(SegmentFrame, BranchAnglesMatchHandEvaluation) {
    auto back = segment_frame({0, 0, 0}, {-1, 0, 0});
    EXPECT_NEAR(back.phi, 0.0, 1e-15);
    EXPECT_NEAR(back.gamma, 0.0, 1e-15);
    auto fwd = segment_frame({0, 0, 0}, {1, 0, 0});
    EXPECT_NEAR(fwd.phi, 0.0, 1e-15);
    EXPECT_NEAR(fwd.gamma, kPi, 1e-15);
    auto lateral = segment_frame({0, 0, 0}, {0, 1, 0});
    EXPECT_NEAR(lateral.phi, kPi / 2, 1e-12);
}

TEST(SegmentFrame, DegenerateSegmentThrows) {
    EXPECT_THROW(segment_frame({1, 2, 3}, {1, 2, 3}), DegenerateSegment);
    EXPECT_THROW(segment_frame({0, 0, 0}, {1e-10, 0, 0}), DegenerateSegment);
}

TEST(SegmentFrame, RotationIsProperOrthogonalAndReconstructsTangent) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 2000; ++k) {
        const Vec3 a(u(rng), u(rng), u(rng));
        Vec3 b(u(rng), u(rng), u(rng));
        if (k % 10 == 0) b.x() = a.x();  // exactly on the branch boundary
        const auto f = segment_frame(a, b);
        const Mat3 r = f.rotation;
        EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-10);
        const Vec3 expected = (b - a) / (b - a).norm();
        EXPECT_LT((f.tangent() - expected).norm(), 1e-9);
        EXPECT_GE(f.length, 0.0);
    }
}

TEST(SegmentFrame, TranslationInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), t(u(rng), u(rng), u(rng));
        const auto f = segment_frame(a, b);
        const auto g = segment_frame(a + t, b + t);
        EXPECT_NEAR(f.length, g.length, 1e-12);
        EXPECT_NEAR(f.phi, g.phi, 1e-9);
        EXPECT_LT((f.rotation - g.rotation).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(AuvRotation, ZeroAttitudeIsIdentity) {
    EXPECT_LT((geometry::auv_rotation(0, 0, 0) - Mat6::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AuvRotation, YawQuarterTurnMapsSurgeToSway) {
    const Mat6 r = geometry::auv_rotation(0, 0, kPi / 2);
    const Vec3 x = r.block<3, 3>(0, 0) * Vec3::UnitX();
    EXPECT_LT((x - Vec3::UnitY()).norm(), 1e-15);
}

TEST(AuvRotation, GimbalSingularity) {
    EXPECT_THROW(geometry::auv_rotation(0, kPi / 2, 0), GimbalSingularity);
    EXPECT_THROW(geometry::angular_velocity_transform(0.3, -kPi / 2), GimbalSingularity);
    EXPECT_NO_THROW(geometry::auv_rotation(0, 1.5, 0));
}

TEST(AuvRotation, LinearBlockProperOrthogonal) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-kPi, kPi), pitch(-1.5, 1.5);
    for (int k = 0; k < 500; ++k) {
        const Mat3 r = geometry::linear_velocity_rotation(ang(rng), pitch(rng), ang(rng));
        EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
}

TEST(AuvRotation, LinearBlockMatchesZyxComposition) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(-kPi, kPi), pitch(-1.5, 1.5);
    for (int k = 0; k < 100; ++k) {
        const double phi = ang(rng), theta = pitch(rng), psi = ang(rng);
        const Mat3 oracle = (Eigen::AngleAxisd(psi, Vec3::UnitZ()) * Eigen::AngleAxisd(theta, Vec3::UnitY()) *
                             Eigen::AngleAxisd(phi, Vec3::UnitX()))
                                .toRotationMatrix();
        EXPECT_LT((geometry::linear_velocity_rotation(phi, theta, psi) - oracle).cwiseAbs().maxCoeff(), 1e-12);
    }
}
