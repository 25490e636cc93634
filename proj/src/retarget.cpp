#include "quadloco/retarget.hpp"

#include <cmath>

namespace quadloco {

namespace {

constexpr double kStanceDrop = 0.25;  // feet rest this far below the anchors

} // namespace

const std::array<Vec3, kLimbCount>& quad_anchors() {
    static const std::array<Vec3, kLimbCount> anchors = {
        Vec3{-0.2, 0.0, 0.35}, Vec3{0.2, 0.0, 0.35}, Vec3{-0.2, 0.0, -0.35}, Vec3{0.2, 0.0, -0.35}};
    return anchors;
}

QuadPose neutral_quad_pose() {
    QuadPose pose;
    for (std::size_t i = 0; i < kLimbCount; ++i) pose.feet[i] = quad_anchors()[i] - Vec3{0.0, kStanceDrop, 0.0};
    return pose;
}

QuadPose retarget_pose(const SkeletonFrame& frame, const Calibration& calibration, const QuadPose& previous,
                       const RetargetParams& params) {
    const QuadPose stance = neutral_quad_pose();
    QuadPose pose;
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        const JointId limb = kLimbs[i];
        if (frame.lost(limb)) {
            pose.feet[i] = previous.feet[i];
            pose.degraded = true;
            continue;
        }
        const Vec3 displacement = frame.at(limb) - calibration.neutral[index(limb)];
        const Vec3 anchor = quad_anchors()[i];
        Vec3 target = stance.feet[i] + displacement * params.scale;
        const Vec3 reach = target - anchor;
        const double len = reach.norm();
        if (len > params.reach) target = anchor + reach * (params.reach / len);
        pose.feet[i] = target;
    }
    const double front_y = 0.5 * (pose.feet[0].y + pose.feet[1].y);
    const double hind_y = 0.5 * (pose.feet[2].y + pose.feet[3].y);
    const double spacing = quad_anchors()[0].z - quad_anchors()[2].z;
    pose.pitch = std::atan2(front_y - hind_y, spacing);
    return pose;
}

} // namespace quadloco
