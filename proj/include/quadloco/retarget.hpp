#pragma once

#include <array>

#include "quadloco/mapper.hpp"

namespace quadloco {

// Foot order: front-left, front-right, hind-left, hind-right. Human hands drive
// the front feet, human feet the hind feet.
struct QuadPose {
    std::array<Vec3, kLimbCount> feet{};
    double pitch = 0.0;  // radians, positive when the front is raised
    bool degraded = false;
    friend bool operator==(const QuadPose&, const QuadPose&) = default;
};

struct RetargetParams {
    double scale = 1.0;
    double reach = 0.45;  // max distance from a foot target to its anchor
};

// Shoulder/hip anchors in avatar-local coordinates.
const std::array<Vec3, kLimbCount>& quad_anchors();
QuadPose neutral_quad_pose();

QuadPose retarget_pose(const SkeletonFrame& frame, const Calibration& calibration,
                       const QuadPose& previous, const RetargetParams& params = {});

} // namespace quadloco
