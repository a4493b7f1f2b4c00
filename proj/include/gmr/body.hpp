#pragma once

#include <string>
#include <vector>

#include "gmr/rigid_motion.hpp"

namespace gmr {

/// Per-frame relative rotations of the J body joints (root excluded; the
/// root orientation is the global pose).
struct LocalPose {
    std::vector<UnitQuaternion> joints;  // size J, rest pose = identities

    static LocalPose rest(int num_joints);
};

using LocalPoseSeq = std::vector<LocalPose>;

/// Joint positions and the rigidly-skinned vertex set, world frame, meters.
struct PosedBody {
    std::vector<Eigen::Vector3d> joint_pos;  // J+1
    std::vector<Eigen::Vector3d> vertices;   // N
};

/// Articulated kinematic tree with a box-corner vertex template per bone.
/// Joint 0 is the root; LocalPose joint k drives tree joint k+1. Shape
/// coefficient k scales the rest-offset lengths of a fixed disjoint joint
/// subset by (1 + 0.05 * beta_k).
class BodySkeleton {
public:
    std::vector<int> parent;                               // J+1, parent[0] == -1
    std::vector<Eigen::Vector3d> rest_offset;              // J+1, parent-frame, meters
    std::vector<std::vector<Eigen::Vector3d>> vertex_template;  // per joint, bone-local
    std::vector<std::vector<int>> shape_subset;            // 10 disjoint joint lists

    int num_joints() const { return static_cast<int>(parent.size()) - 1; }  // J
    int num_vertices() const;

    /// Per-joint offset-length multiplier for the given 10 shape coefficients.
    std::vector<double> bone_scales(const Eigen::VectorXd& beta) const;

    void validate() const;

    static BodySkeleton default_skeleton();
    static BodySkeleton from_json(const std::string& json_text);
    std::string to_json() const;
};

/// Chain FK: root orientation = g.R, joint rotations compose down the tree,
/// vertices are rigidly attached bone templates, g.T is added to everything.
PosedBody forward_kinematics(const BodySkeleton& skel, const LocalPose& pose,
                             const Eigen::VectorXd& beta, const GlobalPose& g);

/// forward_kinematics evaluated with the motion (dR, dT) as the global pose;
/// this is the quantity supervised by the vertex loss and measured by VME.
PosedBody mesh_offset(const BodySkeleton& skel, const LocalPose& pose,
                      const Eigen::VectorXd& beta, const GlobalMotion& dg);

/// All points (J+1 joints then N vertices) posed with identity global, as
/// columns of a 3 x (J+1+N) matrix. forward_kinematics is g.R * cols + g.T.
Eigen::Matrix3Xd local_points(const BodySkeleton& skel, const LocalPose& pose,
                              const Eigen::VectorXd& beta);

/// Vertex block of local_points (3 x N).
Eigen::Matrix3Xd local_vertices(const BodySkeleton& skel, const LocalPose& pose,
                                const Eigen::VectorXd& beta);

}  // namespace gmr
