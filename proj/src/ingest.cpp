#include "quadloco/ingest.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "quadloco/error.hpp"
#include "text_util.hpp"

namespace quadloco {

namespace {

using detail::format_double;

[[noreturn]] void malformed(int line, const std::string& what) {
    throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": " + what, line);
}

// Snaps t onto the 1/rate grid when within 1e-9 of it.
double snap_to_grid(double t, double rate) {
    const double k = std::round(t * rate);
    const double grid = k / rate;
    return std::abs(grid - t) < 1e-9 ? grid : t;
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidParams, what);
}

} // namespace

double TrackedSequence::duration() const {
    if (frames.size() < 2) return 0.0;
    return frames.back().timestamp - frames.front().timestamp;
}

TrackedSequence parse_trace(std::string_view text) {
    TrackedSequence seq;
    int line_no = 0;
    for (std::string_view raw : detail::lines(text)) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;

        auto toks = detail::tokens(line);
        if (toks.front().substr(0, 2) != "t=") malformed(line_no, "record must start with t=<seconds>");
        auto t = detail::parse_double(toks.front().substr(2));
        if (!t || !std::isfinite(*t)) malformed(line_no, "bad timestamp");

        SkeletonFrame frame;
        frame.timestamp = *t;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            auto eq = toks[i].find('=');
            if (eq == std::string_view::npos) malformed(line_no, "expected joint=x,y,z");
            auto joint = joint_from_name(toks[i].substr(0, eq));
            if (!joint) malformed(line_no, "unknown joint '" + std::string(toks[i].substr(0, eq)) + "'");
            if (frame.present.test(index(*joint)))
                malformed(line_no, "duplicate joint '" + std::string(joint_name(*joint)) + "'");

            auto fields = detail::split(toks[i].substr(eq + 1), ',');
            if (fields.size() != 3 && fields.size() != 4) malformed(line_no, "expected x,y,z[,conf]");
            Vec3 p;
            double* dst[3] = {&p.x, &p.y, &p.z};
            for (int k = 0; k < 3; ++k) {
                auto v = detail::parse_double(fields[k]);
                if (!v || !std::isfinite(*v)) malformed(line_no, "bad coordinate '" + std::string(fields[k]) + "'");
                *dst[k] = *v;
            }
            Confidence conf = Confidence::Tracked;
            if (fields.size() == 4) {
                if (fields[3].size() != 1 || !confidence_from_code(fields[3][0]))
                    malformed(line_no, "confidence must be T, I or L");
                conf = *confidence_from_code(fields[3][0]);
            }
            frame.joints[index(*joint)] = p;
            frame.confidence[index(*joint)] = conf;
            frame.present.set(index(*joint));
        }
        for (JointId limb : kLimbs) {
            if (!frame.present.test(index(limb)))
                malformed(line_no, "missing end effector '" + std::string(joint_name(limb)) + "'");
        }
        if (!seq.frames.empty()) {
            const SkeletonFrame& prev = seq.frames.back();
            if (frame.timestamp <= prev.timestamp) {
                throw Error(Errc::NonMonotonicTimestamps,
                            "line " + std::to_string(line_no) + ": timestamp " +
                                format_double(frame.timestamp) + " does not follow " +
                                format_double(prev.timestamp),
                            line_no);
            }
            for (std::size_t j = 0; j < kJointCount; ++j) {
                if (frame.present.test(j) && frame.confidence[j] == Confidence::Lost && prev.present.test(j))
                    frame.joints[j] = prev.joints[j];
            }
        }
        seq.frames.push_back(frame);
    }
    if (seq.frames.empty()) throw Error(Errc::EmptyTrace, "trace contains no records");
    if (seq.frames.size() >= 2) {
        const double est = static_cast<double>(seq.frames.size() - 1) / seq.duration();
        const double whole = std::round(est);
        seq.nominal_rate = std::abs(est - whole) <= 1e-9 * whole ? whole : est;
    }
    return seq;
}

TrackedSequence load_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open trace '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

std::string serialize_trace(const TrackedSequence& seq) {
    std::string out;
    out.reserve(seq.frames.size() * 512);
    for (const SkeletonFrame& f : seq.frames) {
        out += "t=";
        out += format_double(f.timestamp);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            if (!f.present.test(j)) continue;
            out += ' ';
            out += joint_name(static_cast<JointId>(j));
            out += '=';
            out += detail::format_vec3(f.joints[j]);
            if (f.confidence[j] != Confidence::Tracked) {
                out += ',';
                out += confidence_code(f.confidence[j]);
            }
        }
        out += '\n';
    }
    return out;
}

void save_trace(const TrackedSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write trace '" + path.string() + "'");
    out << serialize_trace(seq);
}

double quantize(double v) {
    double q = std::round(v * 1e4) / 1e4;
    return q == 0.0 ? 0.0 : q;  // no negative zero
}

SkeletonFrame neutral_pose(double timestamp) {
    SkeletonFrame f;
    f.timestamp = timestamp;
    auto set = [&f](JointId j, Vec3 p) {
        f.at(j) = p;
        f.present.set(index(j));
    };
    set(JointId::LeftHand, {-0.25, 0.05, 0.45});
    set(JointId::RightHand, {0.25, 0.05, 0.45});
    set(JointId::LeftFoot, {-0.15, 0.05, -0.55});
    set(JointId::RightFoot, {0.15, 0.05, -0.55});
    set(JointId::Head, {0.0, 0.1, 0.7});
    set(JointId::Pelvis, {0.0, 0.0, 0.0});
    set(JointId::LeftElbow, {-0.3, 0.2, 0.3});
    set(JointId::RightElbow, {0.3, 0.2, 0.3});
    set(JointId::LeftKnee, {-0.13, 0.3, -0.3});
    set(JointId::RightKnee, {0.13, 0.3, -0.3});
    set(JointId::Chest, {0.0, 0.08, 0.35});
    set(JointId::LeftShoulder, {-0.2, 0.08, 0.42});
    set(JointId::RightShoulder, {0.2, 0.08, 0.42});
    set(JointId::LeftHip, {-0.12, 0.05, -0.05});
    set(JointId::RightHip, {0.12, 0.05, -0.05});
    return f;
}

double gait_envelope(double t, double ramp) {
    if (t <= 0.0) return 0.0;
    if (t >= ramp) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * t / ramp));
}

LimbOffsets gait_offsets(double phase, double envelope, double amplitude) {
    // LH and RF lead, RH and LF run half a cycle behind.
    constexpr std::array<double, kLimbCount> kPhaseShift = {0.0, std::numbers::pi, std::numbers::pi, 0.0};
    const double lift = 0.5 * amplitude;
    LimbOffsets out{};
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        const double theta = phase + kPhaseShift[i];
        out[i].z = envelope * amplitude * std::sin(theta);
        out[i].y = envelope * lift * std::max(0.0, -std::cos(theta));
    }
    return out;
}

LimbOffsets jump_offsets(double t, double peak_speed) {
    constexpr double r = kJumpRampSeconds;
    constexpr double h = kJumpHoldSeconds;
    double y = 0.0;
    if (t <= 0.0) {
        y = 0.0;
    } else if (t < r) {
        y = peak_speed * t * t / (2.0 * r);
    } else if (t < r + h) {
        y = peak_speed * (r / 2.0 + (t - r));
    } else if (t < 2.0 * r + h) {
        const double s = t - r - h;
        y = peak_speed * (r / 2.0 + h + s - s * s / (2.0 * r));
    } else {
        y = peak_speed * (r + h);
    }
    LimbOffsets out{};
    for (auto& o : out) o.y = y;
    return out;
}

SkeletonFrame apply_offsets(const SkeletonFrame& base, const LimbOffsets& offsets) {
    SkeletonFrame f = base;
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        Vec3& p = f.joints[index(kLimbs[i])];
        p = base.joints[index(kLimbs[i])] + offsets[i];
        p = {quantize(p.x), quantize(p.y), quantize(p.z)};
    }
    return f;
}

TrackedSequence synth_gait(double frequency, double amplitude, double duration, double rate) {
    require(frequency > 0.0 && std::isfinite(frequency), "gait frequency must be positive");
    require(amplitude >= 0.0 && std::isfinite(amplitude), "gait amplitude must be non-negative");
    require(duration > 0.0 && std::isfinite(duration), "gait duration must be positive");
    require(rate > 0.0 && std::isfinite(rate), "gait rate must be positive");

    const auto n = static_cast<std::size_t>(std::llround(duration * rate));
    TrackedSequence seq;
    seq.nominal_rate = rate;
    seq.frames.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rate;
        const double phase = 2.0 * std::numbers::pi * frequency * t;
        seq.frames.push_back(
            apply_offsets(neutral_pose(t), gait_offsets(phase, gait_envelope(t, kGaitRampSeconds), amplitude)));
    }
    return seq;
}

TrackedSequence synth_jump(double peak_speed, double onset, double duration, double rate) {
    require(peak_speed > 0.0 && std::isfinite(peak_speed), "jump peak speed must be positive");
    require(duration > 0.0 && std::isfinite(duration), "jump duration must be positive");
    require(rate > 0.0 && std::isfinite(rate), "jump rate must be positive");
    require(onset >= 0.0 && onset < duration, "jump onset must lie within the duration");

    const auto n = static_cast<std::size_t>(std::llround(duration * rate));
    TrackedSequence seq;
    seq.nominal_rate = rate;
    seq.frames.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rate;
        seq.frames.push_back(apply_offsets(neutral_pose(t), jump_offsets(t - onset, peak_speed)));
    }
    return seq;
}

TrackedSequence with_calibration_hold(const TrackedSequence& seq, double hold) {
    require(hold >= 0.0 && std::isfinite(hold), "hold must be non-negative");
    const double rate = seq.nominal_rate;
    const auto n_hold = static_cast<std::size_t>(std::llround(hold * rate));
    const double start = seq.empty() ? 0.0 : seq.frames.front().timestamp;

    TrackedSequence out;
    out.nominal_rate = rate;
    out.frames.reserve(n_hold + seq.size());
    for (std::size_t k = 0; k < n_hold; ++k) {
        SkeletonFrame f = neutral_pose(static_cast<double>(k) / rate);
        out.frames.push_back(f);
    }
    const double shift = static_cast<double>(n_hold) / rate - start;
    for (const SkeletonFrame& f : seq.frames) {
        SkeletonFrame g = f;
        g.timestamp = snap_to_grid(f.timestamp + shift, rate);
        out.frames.push_back(g);
    }
    return out;
}

void add_jitter(TrackedSequence& seq, double sigma, std::uint64_t seed) {
    require(sigma >= 0.0 && std::isfinite(sigma), "jitter sigma must be non-negative");
    if (sigma == 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (SkeletonFrame& f : seq.frames) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            if (!f.present.test(j)) continue;
            Vec3& p = f.joints[j];
            p = {quantize(p.x + noise(rng)), quantize(p.y + noise(rng)), quantize(p.z + noise(rng))};
        }
    }
}

SampleClock::SampleClock(double sensor_rate, double physics_rate)
    : sensor_rate_(sensor_rate), physics_rate_(physics_rate) {
    if (!(sensor_rate > 0.0) || !(physics_rate >= sensor_rate))
        throw Error(Errc::InvalidParams, "physics rate must be at least the sensor rate");
}

std::optional<SkeletonFrame> SampleClock::next_sample(const TrackedSequence& seq, double tick_time) {
    if (cursor_ < seq.size() && seq.frames[cursor_].timestamp <= tick_time) return seq.frames[cursor_++];
    return std::nullopt;
}

} // namespace quadloco
