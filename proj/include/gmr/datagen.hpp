#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmr/body.hpp"

namespace gmr {

/// One training window: T+1 local pose frames, T+1 ground-truth global poses
/// rebased so pose[0] is the identity, and the T derived motions.
struct MotionSample {
    LocalPoseSeq local;                  // T+1 frames
    PoseTrajectory gt_poses;             // T+1 poses
    std::vector<GlobalMotion> gt_motions;  // T
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(10);
    double fps = 10.0;
    std::int64_t source_id = 0;
    std::int64_t window_offset = 0;
};

enum class MotionKind { StraightWalk, CircleWalk, FigureEight, TurnInPlace, Hop, Idle };

MotionKind motion_kind_from_string(const std::string& s);
std::string to_string(MotionKind k);

/// Procedural motion: a phase-driven gait whose joint swings are keyed to the
/// same speed/turn-rate that drives the analytically integrated global pose.
struct GeneratorSpec {
    MotionKind kind = MotionKind::StraightWalk;
    double duration = 8.0;    // seconds
    double speed = 1.0;       // m/s
    double turn_rate = 0.0;   // rad/s
    double gait_freq = 1.0;   // Hz
    double fps = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GeneratedSequence {
    LocalPoseSeq local;
    PoseTrajectory poses;
};

/// Deterministic per (spec, seed). Local gait phase is consistent with the
/// global displacement so the mapping is learnable.
GeneratedSequence generate(const GeneratorSpec& spec, const BodySkeleton& skel);

/// Overlapping windows of window_len = T+1 frames, each rebased so its first
/// pose is the identity. Returns an empty list if the sequence is too short.
std::vector<MotionSample> window(const GeneratedSequence& seq, int window_len, int stride,
                                 std::int64_t source_id = 0,
                                 const Eigen::VectorXd& beta = Eigen::VectorXd::Zero(10));

/// Temporal reversal: local poses reversed, motions transformed by
/// dR'_i = dR_{T-1-i}^T, dT'_i = -dR'_i * dT_{T-1-i}; poses rebuilt by
/// accumulation from the identity.
MotionSample flip(const MotionSample& sample);

/// Composes each joint quaternion with a small random rotation whose
/// axis-angle components are i.i.d. N(0, noise_std^2). Ground truth untouched.
MotionSample perturb_local(const MotionSample& sample, double noise_std, std::uint64_t seed);

// ---- dataset serialization (one JSON object per line)

std::string sample_to_jsonl(const MotionSample& sample);
MotionSample sample_from_jsonl(const std::string& line);
void write_dataset(const std::string& path, const std::vector<MotionSample>& samples);
std::vector<MotionSample> read_dataset(const std::string& path);

}  // namespace gmr
