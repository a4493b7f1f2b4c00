#include "gmr/rigid_motion.hpp"

namespace gmr {

GlobalPose compose(const GlobalPose& g, const GlobalMotion& dg) {
    if (!g.T.allFinite() || !dg.dT.allFinite()) throw InvalidInput("non-finite pose/motion");
    GlobalPose out;
    out.R = g.R * dg.dR();
    out.T = g.R * dg.dT + g.T;
    return out;
}

GlobalMotion extract_motion(const GlobalPose& g1, const GlobalPose& g2) {
    GlobalMotion m;
    m.dA = mat_to_aa(g1.R.transpose() * g2.R);
    m.dT = g1.R.transpose() * (g2.T - g1.T);
    return m;
}

PoseTrajectory accumulate(const GlobalPose& g1, const std::vector<GlobalMotion>& motions,
                          double fps) {
    PoseTrajectory traj;
    traj.fps = fps;
    traj.poses.reserve(motions.size() + 1);
    traj.poses.push_back(g1);
    for (const auto& m : motions) {
        traj.poses.push_back(compose(traj.poses.back(), m));
    }
    return traj;
}

PoseTrajectory reframe(const PoseTrajectory& traj, const GlobalPose& w) {
    PoseTrajectory out;
    out.fps = traj.fps;
    out.poses.reserve(traj.poses.size());
    for (const auto& g : traj.poses) {
        GlobalPose p;
        p.R = w.R * g.R;
        p.T = w.R * g.T + w.T;
        out.poses.push_back(p);
    }
    return out;
}

GlobalPose world_from_camera(const GlobalPose& cam, const GlobalPose& subj_cam) {
    GlobalPose out;
    out.R = cam.R * subj_cam.R;
    out.T = cam.R * subj_cam.T + cam.T;
    return out;
}

GlobalPose camera_from_world(const GlobalPose& cam, const GlobalPose& subj_world) {
    GlobalPose out;
    out.R = cam.R.transpose() * subj_world.R;
    out.T = cam.R.transpose() * (subj_world.T - cam.T);
    return out;
}

GlobalPose inverse(const GlobalPose& g) {
    GlobalPose out;
    out.R = g.R.transpose();
    out.T = -(g.R.transpose() * g.T);
    return out;
}

std::vector<GlobalMotion> motions_of(const PoseTrajectory& traj) {
    std::vector<GlobalMotion> out;
    if (traj.poses.size() < 2) return out;
    out.reserve(traj.poses.size() - 1);
    for (size_t i = 0; i + 1 < traj.poses.size(); ++i) {
        out.push_back(extract_motion(traj.poses[i], traj.poses[i + 1]));
    }
    return out;
}

}  // namespace gmr
