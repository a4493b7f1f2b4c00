#pragma once

#include <vector>

#include "gmr/body.hpp"
#include "gmr/tape.hpp"

namespace gmr {

enum class OrientationLossKind { Angular, Chordal, AxisAngleDiff };

OrientationLossKind orientation_kind_from_string(const std::string& s);
std::string to_string(OrientationLossKind k);

struct LossWeights {
    double w_ori = 1.0;
    double w_trans = 1.0;
    double w_vertex = 1.0;
    double w_smooth = 1e-2;
};

/// Evaluation report. Losses sum; metrics average and convert to
/// degrees/millimeters at this boundary.
struct MetricReport {
    double ome_deg = 0.0;
    double tme_mm = 0.0;
    double vme_mm = 0.0;
    std::vector<double> curve_mm;  // accumulated vertex error over time

    std::string to_json() const;
    static MetricReport from_json(const std::string& text);
    /// Column order: ome_deg,tme_mm,vme_mm
    std::string csv_row() const;
    static const char* csv_header();
};

// ---- losses (plain evaluation; summed over frames, per the training objective)

double loss_orientation(const std::vector<RotMatrix>& pred, const std::vector<RotMatrix>& gt,
                        OrientationLossKind kind);
double loss_translation(const std::vector<Eigen::Vector3d>& pred,
                        const std::vector<Eigen::Vector3d>& gt);
double loss_vertex(const BodySkeleton& skel, const LocalPoseSeq& poses,
                   const Eigen::VectorXd& beta, const std::vector<GlobalMotion>& pred,
                   const std::vector<GlobalMotion>& gt);
double loss_smooth(const std::vector<RotMatrix>& pred);
double loss_total(double ori, double trans, double vertex, double smooth,
                  const LossWeights& w);

// ---- metrics (means; degrees / mm)

double metric_ome(const std::vector<GlobalMotion>& pred, const std::vector<GlobalMotion>& gt);
double metric_tme(const std::vector<GlobalMotion>& pred, const std::vector<GlobalMotion>& gt);
double metric_vme(const BodySkeleton& skel, const LocalPoseSeq& poses,
                  const Eigen::VectorXd& beta, const std::vector<GlobalMotion>& pred,
                  const std::vector<GlobalMotion>& gt);

/// Per-frame mean vertex distance between bodies posed with the predicted vs
/// ground-truth accumulated global poses (mm). Frame 1 is zero when the
/// trajectories share their initial pose.
std::vector<double> accumulated_vertex_error(const PoseTrajectory& pred_traj,
                                             const PoseTrajectory& gt_traj,
                                             const BodySkeleton& skel,
                                             const LocalPoseSeq& poses,
                                             const Eigen::VectorXd& beta);

// ---- taped losses, for training

struct LossNodes {
    NodeId ori, trans, vertex, smooth, total;
};

/// Records every loss term on the tape from the raw per-frame 6x1 network
/// outputs. Predicted dA is wrapped into the canonical ball before loss
/// evaluation with a straight-through gradient. frame_verts[i] holds the
/// identity-posed vertex columns for frame i (see local_vertices); pass an
/// empty vector to drop the vertex term.
LossNodes build_losses(Tape& tape, const std::vector<NodeId>& outputs,
                       const std::vector<GlobalMotion>& gt, OrientationLossKind kind,
                       const LossWeights& weights,
                       const std::vector<Eigen::Matrix3Xd>& frame_verts);

}  // namespace gmr
