#include "quadloco/error.hpp"

namespace quadloco {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::InsufficientFrames: return "InsufficientFrames";
    case Errc::CalibrationUnstable: return "CalibrationUnstable";
    case Errc::ZeroDt: return "ZeroDt";
    case Errc::InvalidC: return "InvalidC";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::InvalidLevel: return "InvalidLevel";
    case Errc::Io: return "Io";
    case Errc::BindFailure: return "BindFailure";
    case Errc::MalformedCommand: return "MalformedCommand";
    case Errc::Unsupported: return "Unsupported";
    }
    return "Unknown";
}

} // namespace quadloco
