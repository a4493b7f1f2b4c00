#include "gmr/objective.hpp"

#include <cmath>
#include <json.hpp>
#include <sstream>

namespace gmr {

namespace {

constexpr double kRad2Deg = 180.0 / M_PI;

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw ShapeMismatch("pred/gt sequence length mismatch");
    if (a == 0) throw ShapeMismatch("empty sequence");
}

}  // namespace

OrientationLossKind orientation_kind_from_string(const std::string& s) {
    if (s == "angular") return OrientationLossKind::Angular;
    if (s == "chordal") return OrientationLossKind::Chordal;
    if (s == "axis-angle") return OrientationLossKind::AxisAngleDiff;
    throw InvalidInput("unknown orientation loss kind: " + s);
}

std::string to_string(OrientationLossKind k) {
    switch (k) {
        case OrientationLossKind::Angular: return "angular";
        case OrientationLossKind::Chordal: return "chordal";
        case OrientationLossKind::AxisAngleDiff: return "axis-angle";
    }
    return "?";
}

std::string MetricReport::to_json() const {
    nlohmann::json j;
    j["ome_deg"] = ome_deg;
    j["tme_mm"] = tme_mm;
    j["vme_mm"] = vme_mm;
    j["curve_mm"] = curve_mm;
    return j.dump();
}

MetricReport MetricReport::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MetricReport r;
    r.ome_deg = j.at("ome_deg").get<double>();
    r.tme_mm = j.at("tme_mm").get<double>();
    r.vme_mm = j.at("vme_mm").get<double>();
    if (j.contains("curve_mm")) r.curve_mm = j.at("curve_mm").get<std::vector<double>>();
    return r;
}

const char* MetricReport::csv_header() { return "ome_deg,tme_mm,vme_mm"; }

std::string MetricReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << ome_deg << "," << tme_mm << "," << vme_mm;
    return os.str();
}

double loss_orientation(const std::vector<RotMatrix>& pred, const std::vector<RotMatrix>& gt,
                        OrientationLossKind kind) {
    check_lengths(pred.size(), gt.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        switch (kind) {
            case OrientationLossKind::Angular: {
                double theta = geodesic_angle(gt[i], pred[i]);
                total += theta * theta;
                break;
            }
            case OrientationLossKind::Chordal:
                total += (pred[i] - gt[i]).squaredNorm();
                break;
            case OrientationLossKind::AxisAngleDiff:
                total += (mat_to_aa(pred[i]).v - mat_to_aa(gt[i]).v).squaredNorm();
                break;
        }
    }
    return total;
}

double loss_translation(const std::vector<Eigen::Vector3d>& pred,
                        const std::vector<Eigen::Vector3d>& gt) {
    check_lengths(pred.size(), gt.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i] - gt[i]).squaredNorm();
    return total;
}

double loss_vertex(const BodySkeleton& skel, const LocalPoseSeq& poses,
                   const Eigen::VectorXd& beta, const std::vector<GlobalMotion>& pred,
                   const std::vector<GlobalMotion>& gt) {
    check_lengths(pred.size(), gt.size());
    if (poses.size() < pred.size()) throw ShapeMismatch("pose sequence shorter than motions");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        PosedBody a = mesh_offset(skel, poses[i], beta, pred[i]);
        PosedBody b = mesh_offset(skel, poses[i], beta, gt[i]);
        for (std::size_t j = 0; j < a.vertices.size(); ++j) {
            total += (a.vertices[j] - b.vertices[j]).cwiseAbs().sum();
        }
    }
    return total;
}

double loss_smooth(const std::vector<RotMatrix>& pred) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pred.size(); ++i) {
        total += (pred[i] - pred[i + 1]).squaredNorm();
    }
    return total;
}

double loss_total(double ori, double trans, double vertex, double smooth,
                  const LossWeights& w) {
    return w.w_ori * ori + w.w_trans * trans + w.w_vertex * vertex + w.w_smooth * smooth;
}

double metric_ome(const std::vector<GlobalMotion>& pred, const std::vector<GlobalMotion>& gt) {
    check_lengths(pred.size(), gt.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        total += geodesic_angle(pred[i].dR(), gt[i].dR());
    }
    return kRad2Deg * total / static_cast<double>(pred.size());
}

double metric_tme(const std::vector<GlobalMotion>& pred, const std::vector<GlobalMotion>& gt) {
    check_lengths(pred.size(), gt.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i].dT - gt[i].dT).norm();
    return 1000.0 * total / static_cast<double>(pred.size());
}

double metric_vme(const BodySkeleton& skel, const LocalPoseSeq& poses,
                  const Eigen::VectorXd& beta, const std::vector<GlobalMotion>& pred,
                  const std::vector<GlobalMotion>& gt) {
    check_lengths(pred.size(), gt.size());
    if (poses.size() < pred.size()) throw ShapeMismatch("pose sequence shorter than motions");
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        PosedBody a = mesh_offset(skel, poses[i], beta, pred[i]);
        PosedBody b = mesh_offset(skel, poses[i], beta, gt[i]);
        for (std::size_t j = 0; j < a.vertices.size(); ++j) {
            total += (a.vertices[j] - b.vertices[j]).norm();
            ++count;
        }
    }
    return 1000.0 * total / static_cast<double>(count);
}

std::vector<double> accumulated_vertex_error(const PoseTrajectory& pred_traj,
                                             const PoseTrajectory& gt_traj,
                                             const BodySkeleton& skel,
                                             const LocalPoseSeq& poses,
                                             const Eigen::VectorXd& beta) {
    check_lengths(pred_traj.poses.size(), gt_traj.poses.size());
    if (poses.size() < pred_traj.poses.size()) throw ShapeMismatch("pose sequence too short");
    std::vector<double> curve;
    curve.reserve(pred_traj.poses.size());
    for (std::size_t i = 0; i < pred_traj.poses.size(); ++i) {
        PosedBody a = forward_kinematics(skel, poses[i], beta, pred_traj.poses[i]);
        PosedBody b = forward_kinematics(skel, poses[i], beta, gt_traj.poses[i]);
        double total = 0.0;
        for (std::size_t j = 0; j < a.vertices.size(); ++j) {
            total += (a.vertices[j] - b.vertices[j]).norm();
        }
        curve.push_back(1000.0 * total / static_cast<double>(a.vertices.size()));
    }
    return curve;
}

LossNodes build_losses(Tape& tape, const std::vector<NodeId>& outputs,
                       const std::vector<GlobalMotion>& gt, OrientationLossKind kind,
                       const LossWeights& weights,
                       const std::vector<Eigen::Matrix3Xd>& frame_verts) {
    check_lengths(outputs.size(), gt.size());
    const bool with_vertex = !frame_verts.empty();
    if (with_vertex && frame_verts.size() < outputs.size()) {
        throw ShapeMismatch("frame_verts shorter than outputs");
    }
    const NodeId zero = tape.leaf(Eigen::MatrixXd::Zero(1, 1));
    NodeId ori = zero, trans = zero, vertex = zero, smooth = zero;
    std::vector<NodeId> rot_nodes;
    rot_nodes.reserve(outputs.size());

    for (std::size_t i = 0; i < outputs.size(); ++i) {
        NodeId da = tape.rows(outputs[i], 0, 3);
        NodeId dt = tape.rows(outputs[i], 3, 3);
        NodeId r = tape.rodrigues(da);
        rot_nodes.push_back(r);
        const Eigen::Matrix3d gt_r = gt[i].dR();

        NodeId ori_i;
        switch (kind) {
            case OrientationLossKind::Angular:
                ori_i = tape.angular_sq(r, gt_r);
                break;
            case OrientationLossKind::Chordal:
                ori_i = tape.sq_frobenius(tape.sub_const(r, gt_r));
                break;
            case OrientationLossKind::AxisAngleDiff:
                ori_i = tape.sq_frobenius(tape.sub_const(tape.wrap_axis_angle(da), gt[i].dA.v));
                break;
        }
        ori = tape.add(ori, ori_i);
        trans = tape.add(trans, tape.sq_frobenius(tape.sub_const(dt, gt[i].dT)));

        if (with_vertex) {
            const Eigen::Matrix3Xd& p = frame_verts[i];
            Eigen::Matrix3Xd gt_verts = (gt_r * p).colwise() + gt[i].dT;
            NodeId pred_verts = tape.colwise_add(tape.matmul_const_r(r, p), dt);
            vertex = tape.add(vertex, tape.l1(tape.sub_const(pred_verts, gt_verts)));
        }
    }
    for (std::size_t i = 0; i + 1 < rot_nodes.size(); ++i) {
        smooth = tape.add(smooth, tape.sq_frobenius(tape.sub(rot_nodes[i], rot_nodes[i + 1])));
    }

    LossNodes nodes{ori, trans, vertex, smooth, -1};
    nodes.total = tape.add(
        tape.add(tape.scale(ori, weights.w_ori), tape.scale(trans, weights.w_trans)),
        tape.add(tape.scale(vertex, weights.w_vertex), tape.scale(smooth, weights.w_smooth)));
    return nodes;
}

}  // namespace gmr
