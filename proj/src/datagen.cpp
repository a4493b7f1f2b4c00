#include "gmr/datagen.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>

namespace gmr {

namespace {

// LocalPose indices (tree joint - 1) for the default 24-joint skeleton.
constexpr int kLHip = 0, kRHip = 1, kSpine1 = 2, kLKnee = 3, kRKnee = 4;
constexpr int kLShoulder = 15, kRShoulder = 16;

UnitQuaternion about_y(double angle) { return aa_to_quat(AxisAngle{{0, angle, 0}}); }
UnitQuaternion about_z(double angle) { return aa_to_quat(AxisAngle{{0, 0, angle}}); }

}  // namespace

MotionKind motion_kind_from_string(const std::string& s) {
    if (s == "straight-walk") return MotionKind::StraightWalk;
    if (s == "circle-walk") return MotionKind::CircleWalk;
    if (s == "figure-8") return MotionKind::FigureEight;
    if (s == "turn-in-place") return MotionKind::TurnInPlace;
    if (s == "hop") return MotionKind::Hop;
    if (s == "idle") return MotionKind::Idle;
    throw InvalidInput("unknown motion kind: " + s);
}

std::string to_string(MotionKind k) {
    switch (k) {
        case MotionKind::StraightWalk: return "straight-walk";
        case MotionKind::CircleWalk: return "circle-walk";
        case MotionKind::FigureEight: return "figure-8";
        case MotionKind::TurnInPlace: return "turn-in-place";
        case MotionKind::Hop: return "hop";
        case MotionKind::Idle: return "idle";
    }
    return "?";
}

void GeneratorSpec::validate() const {
    if (!(duration > 0.0) || !(fps > 0.0) || !(gait_freq > 0.0)) {
        throw InvalidInput("generator spec: duration, fps, gait_freq must be positive");
    }
    if (!std::isfinite(speed) || !std::isfinite(turn_rate)) {
        throw InvalidInput("generator spec: non-finite parameters");
    }
}

GeneratedSequence generate(const GeneratorSpec& spec, const BodySkeleton& skel) {
    spec.validate();
    const int num_joints = skel.num_joints();
    const int frames = static_cast<int>(std::lround(spec.duration * spec.fps)) + 1;

    // small per-sequence style jitter so equal specs with different seeds differ
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(0.95, 1.05);
    const double hip_gain = jitter(rng), arm_gain = jitter(rng), knee_gain = jitter(rng);

    const bool idle = spec.kind == MotionKind::Idle;
    const bool turning_only = spec.kind == MotionKind::TurnInPlace;
    const double speed = (idle || turning_only) ? 0.0 : spec.speed;
    const double base_turn =
        (spec.kind == MotionKind::CircleWalk || spec.kind == MotionKind::FigureEight ||
         turning_only)
            ? spec.turn_rate
            : 0.0;
    const double hop_amp = spec.kind == MotionKind::Hop ? 0.15 : 0.0;

    // gait amplitude keyed to speed (or turn rate when stepping in place)
    const double amp = idle ? 0.0
                            : std::clamp(turning_only ? 0.35 * std::abs(base_turn) : 0.6 * speed,
                                         0.0, 1.2);

    GeneratedSequence out;
    out.poses.fps = spec.fps;
    out.poses.poses.reserve(frames);
    out.local.reserve(frames);

    auto height = [&](double t) {
        return hop_amp * std::max(0.0, std::sin(2.0 * M_PI * spec.gait_freq * t));
    };

    GlobalPose g;  // starts at identity
    for (int i = 0; i < frames; ++i) {
        const double t = i / spec.fps;
        const double phase = 2.0 * M_PI * spec.gait_freq * t;
        // figure-8: reverse the turn halfway through
        const double turn =
            (spec.kind == MotionKind::FigureEight && t >= 0.5 * spec.duration) ? -base_turn
                                                                               : base_turn;

        LocalPose pose = LocalPose::rest(num_joints);
        if (!idle) {
            const double swing = amp * std::sin(phase);
            pose.joints[kLHip] = about_y(hip_gain * swing);
            pose.joints[kRHip] = about_y(-hip_gain * swing);
            pose.joints[kLKnee] = about_y(0.45 * knee_gain * amp * (1.0 - std::cos(phase)));
            pose.joints[kRKnee] = about_y(0.45 * knee_gain * amp * (1.0 + std::cos(phase)));
            pose.joints[kLShoulder] = about_y(-0.5 * arm_gain * swing);
            pose.joints[kRShoulder] = about_y(0.5 * arm_gain * swing);
            pose.joints[kSpine1] = about_z(0.5 * turn);
        }
        out.local.push_back(std::move(pose));
        out.poses.poses.push_back(g);

        // advance the global pose to the next frame
        const double step = speed / spec.fps;
        const double dz = height(t + 1.0 / spec.fps) - height(t);
        GlobalPose next;
        next.T = g.T + g.R * Eigen::Vector3d(step, 0.0, dz);
        next.R = g.R * rot_z(turn / spec.fps);
        g = next;
    }
    return out;
}

std::vector<MotionSample> window(const GeneratedSequence& seq, int window_len, int stride,
                                 std::int64_t source_id, const Eigen::VectorXd& beta) {
    if (window_len < 2 || stride < 1) throw InvalidInput("window_len >= 2 and stride >= 1");
    std::vector<MotionSample> out;
    const int n = static_cast<int>(seq.poses.poses.size());
    for (int o = 0; o + window_len <= n; o += stride) {
        MotionSample s;
        s.fps = seq.poses.fps;
        s.source_id = source_id;
        s.window_offset = o;
        s.beta = beta;
        s.local.assign(seq.local.begin() + o, seq.local.begin() + o + window_len);
        for (int i = 0; i + 1 < window_len; ++i) {
            s.gt_motions.push_back(
                extract_motion(seq.poses.poses[o + i], seq.poses.poses[o + i + 1]));
        }
        // rebase: identity first pose, then accumulate the exact raw motions
        s.gt_poses = accumulate(GlobalPose::identity(), s.gt_motions, seq.poses.fps);
        out.push_back(std::move(s));
    }
    return out;
}

MotionSample flip(const MotionSample& sample) {
    MotionSample out;
    out.fps = sample.fps;
    out.source_id = sample.source_id;
    out.window_offset = sample.window_offset;
    out.beta = sample.beta;
    out.local.assign(sample.local.rbegin(), sample.local.rend());
    const std::size_t n = sample.gt_motions.size();
    out.gt_motions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const GlobalMotion& m = sample.gt_motions[n - 1 - i];
        RotMatrix r = m.dR().transpose();
        GlobalMotion f;
        f.dA = mat_to_aa(r);
        f.dT = -(r * m.dT);
        out.gt_motions.push_back(f);
    }
    out.gt_poses = accumulate(GlobalPose::identity(), out.gt_motions, sample.fps);
    return out;
}

MotionSample perturb_local(const MotionSample& sample, double noise_std, std::uint64_t seed) {
    if (noise_std < 0.0) throw InvalidInput("noise_std must be nonnegative");
    MotionSample out = sample;
    if (noise_std == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise_std);
    for (auto& frame : out.local) {
        for (auto& q : frame.joints) {
            Eigen::Vector3d delta(n(rng), n(rng), n(rng));
            q = quat_mul(q, aa_to_quat(AxisAngle::wrapped(delta)));
        }
    }
    return out;
}

std::string sample_to_jsonl(const MotionSample& sample) {
    nlohmann::json j;
    j["version"] = 1;
    j["source_id"] = sample.source_id;
    j["window_offset"] = sample.window_offset;
    j["fps"] = sample.fps;
    j["beta"] = std::vector<double>(sample.beta.data(), sample.beta.data() + sample.beta.size());
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < sample.local.size(); ++i) {
        nlohmann::json f;
        nlohmann::json quats = nlohmann::json::array();
        for (const auto& q : sample.local[i].joints) quats.push_back({q.w, q.x, q.y, q.z});
        f["quat"] = quats;
        const GlobalPose& g = sample.gt_poses.poses.at(i);
        std::vector<double> r(9);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) r[3 * a + b] = g.R(a, b);  // row-major
        f["R"] = r;
        f["T"] = {g.T.x(), g.T.y(), g.T.z()};
        frames.push_back(std::move(f));
    }
    j["frames"] = std::move(frames);
    return j.dump();
}

MotionSample sample_from_jsonl(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    MotionSample s;
    s.source_id = j.at("source_id").get<std::int64_t>();
    s.window_offset = j.at("window_offset").get<std::int64_t>();
    s.fps = j.at("fps").get<double>();
    auto beta = j.at("beta").get<std::vector<double>>();
    if (beta.size() != 10) throw ShapeMismatch("beta must have 10 entries");
    s.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), 10);
    s.gt_poses.fps = s.fps;
    for (const auto& f : j.at("frames")) {
        LocalPose pose;
        for (const auto& q : f.at("quat")) {
            pose.joints.push_back(UnitQuaternion::fromComponents(
                q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()));
        }
        s.local.push_back(std::move(pose));
        auto r = f.at("R").get<std::vector<double>>();
        auto t = f.at("T").get<std::vector<double>>();
        if (r.size() != 9 || t.size() != 3) throw ShapeMismatch("bad pose entry");
        GlobalPose g;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) g.R(a, b) = r[3 * a + b];
        g.T = Eigen::Vector3d(t[0], t[1], t[2]);
        s.gt_poses.poses.push_back(g);
    }
    s.gt_motions = motions_of(s.gt_poses);
    return s;
}

void write_dataset(const std::string& path, const std::vector<MotionSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open dataset file for writing: " + path);
    for (const auto& s : samples) out << sample_to_jsonl(s) << "\n";
}

std::vector<MotionSample> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open dataset file: " + path);
    std::vector<MotionSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(sample_from_jsonl(line));
    }
    return out;
}

}  // namespace gmr
