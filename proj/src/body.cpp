#include "gmr/body.hpp"

#include <json.hpp>

namespace gmr {

namespace {

// Chain walk with an explicit root orientation; positions relative to the
// root joint before the global translation is applied.
void walk_chain(const BodySkeleton& skel, const LocalPose& pose, const Eigen::VectorXd& beta,
                const RotMatrix& root_rot, std::vector<RotMatrix>& world_rot,
                std::vector<Eigen::Vector3d>& joint_pos) {
    const int n = skel.num_joints() + 1;
    const auto scales = skel.bone_scales(beta);
    world_rot.resize(n);
    joint_pos.resize(n);
    world_rot[0] = root_rot;
    joint_pos[0] = Eigen::Vector3d::Zero();
    for (int j = 1; j < n; ++j) {
        const int p = skel.parent[j];
        world_rot[j] = world_rot[p] * quat_to_mat(pose.joints[j - 1]);
        joint_pos[j] = joint_pos[p] + world_rot[p] * (scales[j] * skel.rest_offset[j]);
    }
}

std::vector<Eigen::Vector3d> box_corners(const Eigen::Vector3d& bone_dir) {
    Eigen::Vector3d d = bone_dir;
    if (d.norm() < 1e-9) d = Eigen::Vector3d(0, 0, 0.06);
    Eigen::Vector3d u = d.cross(Eigen::Vector3d::UnitX());
    if (u.norm() < 1e-6) u = d.cross(Eigen::Vector3d::UnitY());
    u.normalize();
    Eigen::Vector3d v = d.normalized().cross(u);
    constexpr double w = 0.03;
    std::vector<Eigen::Vector3d> corners;
    for (int t = 0; t < 2; ++t)
        for (int su = -1; su <= 1; su += 2)
            for (int sv = -1; sv <= 1; sv += 2)
                corners.push_back(double(t) * d + w * (su * u + sv * v));
    return corners;
}

}  // namespace

LocalPose LocalPose::rest(int num_joints) {
    LocalPose p;
    p.joints.assign(num_joints, UnitQuaternion{});
    return p;
}

int BodySkeleton::num_vertices() const {
    int n = 0;
    for (const auto& t : vertex_template) n += static_cast<int>(t.size());
    return n;
}

std::vector<double> BodySkeleton::bone_scales(const Eigen::VectorXd& beta) const {
    if (beta.size() != 10) throw ShapeMismatch("beta must have 10 coefficients");
    std::vector<double> s(parent.size(), 1.0);
    for (int k = 0; k < 10; ++k) {
        for (int j : shape_subset[k]) s[j] = 1.0 + 0.05 * beta[k];
    }
    return s;
}

void BodySkeleton::validate() const {
    const int n = static_cast<int>(parent.size());
    if (n < 2 || parent[0] != -1) throw ShapeMismatch("skeleton must be a tree rooted at joint 0");
    for (int j = 1; j < n; ++j) {
        if (parent[j] < 0 || parent[j] >= j) throw ShapeMismatch("parents must precede children");
    }
    if (static_cast<int>(rest_offset.size()) != n || static_cast<int>(vertex_template.size()) != n) {
        throw ShapeMismatch("offset/template arrays must match joint count");
    }
    if (shape_subset.size() != 10) throw ShapeMismatch("expected 10 shape subsets");
}

BodySkeleton BodySkeleton::default_skeleton() {
    BodySkeleton s;
    s.parent = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};
    s.rest_offset = {
        {0, 0, 0},           // 0 pelvis
        {0, 0.10, -0.05},    // 1 left hip
        {0, -0.10, -0.05},   // 2 right hip
        {0, 0, 0.10},        // 3 spine1
        {0, 0, -0.40},       // 4 left knee
        {0, 0, -0.40},       // 5 right knee
        {0, 0, 0.12},        // 6 spine2
        {0, 0, -0.40},       // 7 left ankle
        {0, 0, -0.40},       // 8 right ankle
        {0, 0, 0.12},        // 9 spine3
        {0.12, 0, -0.05},    // 10 left foot
        {0.12, 0, -0.05},    // 11 right foot
        {0, 0, 0.10},        // 12 neck
        {0, 0.08, 0.05},     // 13 left collar
        {0, -0.08, 0.05},    // 14 right collar
        {0, 0, 0.12},        // 15 head
        {0, 0.12, 0},        // 16 left shoulder
        {0, -0.12, 0},       // 17 right shoulder
        {0, 0.26, 0},        // 18 left elbow
        {0, -0.26, 0},       // 19 right elbow
        {0, 0.25, 0},        // 20 left wrist
        {0, -0.25, 0},       // 21 right wrist
        {0, 0.08, 0},        // 22 left hand
        {0, -0.08, 0},       // 23 right hand
    };
    const int n = static_cast<int>(s.parent.size());
    // bone box template points along the offset to the first child
    std::vector<Eigen::Vector3d> child_dir(n, Eigen::Vector3d::Zero());
    for (int j = n - 1; j >= 1; --j) child_dir[s.parent[j]] = s.rest_offset[j];
    s.vertex_template.resize(n);
    for (int j = 0; j < n; ++j) s.vertex_template[j] = box_corners(child_dir[j]);
    s.shape_subset = {
        {3, 6, 9},            // 0: spine
        {1, 2},               // 1: hips
        {4, 5},               // 2: thighs (knee offsets)
        {7, 8},               // 3: shins (ankle offsets)
        {10, 11},             // 4: feet
        {12, 15},             // 5: neck + head
        {13, 14},             // 6: collars
        {16, 17},             // 7: shoulders
        {18, 19, 20, 21},     // 8: arms
        {22, 23},             // 9: hands
    };
    s.validate();
    return s;
}

BodySkeleton BodySkeleton::from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    BodySkeleton s = default_skeleton();
    s.parent = j.at("parents").get<std::vector<int>>();
    const int n = static_cast<int>(s.parent.size());
    s.rest_offset.clear();
    for (const auto& o : j.at("offsets")) {
        s.rest_offset.emplace_back(o[0].get<double>(), o[1].get<double>(), o[2].get<double>());
    }
    s.vertex_template.clear();
    for (const auto& joint_verts : j.at("vertex_template")) {
        std::vector<Eigen::Vector3d> vs;
        for (const auto& v : joint_verts) {
            vs.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
        }
        s.vertex_template.push_back(std::move(vs));
    }
    if (j.contains("shape_subsets")) {
        s.shape_subset = j.at("shape_subsets").get<std::vector<std::vector<int>>>();
    } else if (n != 24) {
        throw ShapeMismatch("non-default joint count requires explicit shape_subsets");
    }
    s.validate();
    return s;
}

std::string BodySkeleton::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["parents"] = parent;
    for (const auto& o : rest_offset) j["offsets"].push_back({o.x(), o.y(), o.z()});
    for (const auto& joint_verts : vertex_template) {
        nlohmann::json vs = nlohmann::json::array();
        for (const auto& v : joint_verts) vs.push_back({v.x(), v.y(), v.z()});
        j["vertex_template"].push_back(vs);
    }
    j["shape_subsets"] = shape_subset;
    return j.dump();
}

PosedBody forward_kinematics(const BodySkeleton& skel, const LocalPose& pose,
                             const Eigen::VectorXd& beta, const GlobalPose& g) {
    if (static_cast<int>(pose.joints.size()) != skel.num_joints()) {
        throw ShapeMismatch("local pose joint count does not match skeleton");
    }
    std::vector<RotMatrix> world_rot;
    PosedBody body;
    walk_chain(skel, pose, beta, g.R, world_rot, body.joint_pos);
    const int n = skel.num_joints() + 1;
    body.vertices.reserve(skel.num_vertices());
    for (int j = 0; j < n; ++j) {
        for (const auto& c : skel.vertex_template[j]) {
            body.vertices.push_back(body.joint_pos[j] + world_rot[j] * c);
        }
    }
    for (auto& p : body.joint_pos) p += g.T;
    for (auto& v : body.vertices) v += g.T;
    return body;
}

PosedBody mesh_offset(const BodySkeleton& skel, const LocalPose& pose,
                      const Eigen::VectorXd& beta, const GlobalMotion& dg) {
    return forward_kinematics(skel, pose, beta, GlobalPose{dg.dR(), dg.dT});
}

Eigen::Matrix3Xd local_points(const BodySkeleton& skel, const LocalPose& pose,
                              const Eigen::VectorXd& beta) {
    PosedBody b = forward_kinematics(skel, pose, beta, GlobalPose::identity());
    Eigen::Matrix3Xd out(3, b.joint_pos.size() + b.vertices.size());
    Eigen::Index c = 0;
    for (const auto& p : b.joint_pos) out.col(c++) = p;
    for (const auto& v : b.vertices) out.col(c++) = v;
    return out;
}

Eigen::Matrix3Xd local_vertices(const BodySkeleton& skel, const LocalPose& pose,
                                const Eigen::VectorXd& beta) {
    Eigen::Matrix3Xd all = local_points(skel, pose, beta);
    return all.rightCols(all.cols() - (skel.num_joints() + 1));
}

}  // namespace gmr
