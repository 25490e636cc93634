#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <optional>
#include <string_view>

#include "quadloco/vec3.hpp"

namespace quadloco {

// End effectors first; they double as limb indices.
enum class JointId : std::size_t {
    LeftHand,
    RightHand,
    LeftFoot,
    RightFoot,
    Head,
    Pelvis,
    LeftElbow,
    RightElbow,
    LeftKnee,
    RightKnee,
    Chest,
    LeftShoulder,
    RightShoulder,
    LeftHip,
    RightHip,
};

inline constexpr std::size_t kJointCount = 15;
inline constexpr std::size_t kLimbCount = 4;

inline constexpr std::array<JointId, kLimbCount> kLimbs = {
    JointId::LeftHand, JointId::RightHand, JointId::LeftFoot, JointId::RightFoot};

constexpr std::size_t index(JointId j) { return static_cast<std::size_t>(j); }
constexpr bool is_end_effector(JointId j) { return index(j) < kLimbCount; }

std::string_view joint_name(JointId j);
std::optional<JointId> joint_from_name(std::string_view name);

enum class Confidence : unsigned char { Tracked, Inferred, Lost };

char confidence_code(Confidence c);
std::optional<Confidence> confidence_from_code(char c);

struct SkeletonFrame {
    double timestamp = 0.0;
    std::array<Vec3, kJointCount> joints{};
    std::array<Confidence, kJointCount> confidence{};
    // Auxiliary joints may be missing from a record; end effectors never are.
    std::bitset<kJointCount> present;

    const Vec3& at(JointId j) const { return joints[index(j)]; }
    Vec3& at(JointId j) { return joints[index(j)]; }
    Confidence conf(JointId j) const { return confidence[index(j)]; }
    bool lost(JointId j) const { return confidence[index(j)] == Confidence::Lost; }

    friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

} // namespace quadloco
