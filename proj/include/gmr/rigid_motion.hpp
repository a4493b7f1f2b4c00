#pragma once

#include <vector>

#include "gmr/rot3.hpp"

namespace gmr {

/// Absolute world pose of the whole body: orientation R, translation T (meters).
struct GlobalPose {
    RotMatrix R = RotMatrix::Identity();
    Eigen::Vector3d T = Eigen::Vector3d::Zero();

    static GlobalPose identity() { return {}; }
};

/// Frame-to-frame SE(3) displacement: orientation motion dA (axis-angle,
/// canonical ball) and translation motion dT (meters, expressed in the
/// earlier frame's body coordinates).
struct GlobalMotion {
    AxisAngle dA;
    Eigen::Vector3d dT = Eigen::Vector3d::Zero();

    static GlobalMotion identity() { return {}; }

    RotMatrix dR() const { return aa_to_mat(dA); }
};

/// Ordered per-frame poses at a declared frame rate.
struct PoseTrajectory {
    std::vector<GlobalPose> poses;
    double fps = 10.0;
};

/// R' = R * dR, T' = R * dT + T.
GlobalPose compose(const GlobalPose& g, const GlobalMotion& dg);

/// dR = R1^T R2, dT = R1^T (T2 - T1); inverse of compose.
GlobalMotion extract_motion(const GlobalPose& g1, const GlobalPose& g2);

/// pose[0] = g1, pose[i+1] = compose(pose[i], motions[i]).
PoseTrajectory accumulate(const GlobalPose& g1, const std::vector<GlobalMotion>& motions,
                          double fps = 10.0);

/// Left-multiplies every pose by the fixed world transform w. Frame-to-frame
/// motions are unchanged.
PoseTrajectory reframe(const PoseTrajectory& traj, const GlobalPose& w);

/// Subject pose in world coordinates from a camera-to-world pose and the
/// subject pose in camera coordinates: R_w = R_cam * R_c, T_w = R_cam * T_c + T_cam.
GlobalPose world_from_camera(const GlobalPose& cam, const GlobalPose& subj_cam);

/// Algebraic inverse of world_from_camera.
GlobalPose camera_from_world(const GlobalPose& cam, const GlobalPose& subj_world);

/// SE(3) inverse.
GlobalPose inverse(const GlobalPose& g);

std::vector<GlobalMotion> motions_of(const PoseTrajectory& traj);

}  // namespace gmr
