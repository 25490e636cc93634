#include "quadloco/skeleton.hpp"

namespace quadloco {

namespace {

constexpr std::array<std::string_view, kJointCount> kNames = {
    "leftHand",  "rightHand",  "leftFoot", "rightFoot",    "head",
    "pelvis",    "leftElbow",  "rightElbow", "leftKnee",   "rightKnee",
    "chest",     "leftShoulder", "rightShoulder", "leftHip", "rightHip",
};

} // namespace

std::string_view joint_name(JointId j) { return kNames[index(j)]; }

std::optional<JointId> joint_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return static_cast<JointId>(i);
    }
    return std::nullopt;
}

char confidence_code(Confidence c) {
    switch (c) {
    case Confidence::Tracked: return 'T';
    case Confidence::Inferred: return 'I';
    case Confidence::Lost: return 'L';
    }
    return 'T';
}

std::optional<Confidence> confidence_from_code(char c) {
    switch (c) {
    case 'T': return Confidence::Tracked;
    case 'I': return Confidence::Inferred;
    case 'L': return Confidence::Lost;
    default: return std::nullopt;
    }
}

} // namespace quadloco
