#pragma once

#include <string>
#include <vector>

#include "gmr/body.hpp"
#include "gmr/rigid_motion.hpp"
#include "gmr/tape.hpp"

namespace gmr {

struct GmrConfig {
    int input_dim = 92;   // 4 * J
    int layers = 4;
    int hidden = 2048;    // per-direction GRU width
    int proj_dim = 2048;
    int output_dim = 6;   // dA ++ dT

    int num_joints() const { return input_dim / 4; }
    void validate() const;

    bool operator==(const GmrConfig&) const = default;
};

/// Desk-scale configuration used by tests and the acceptance experiments.
GmrConfig desk_config(int layers = 2, int hidden = 64);

struct Tensor {
    std::string name;
    Eigen::MatrixXd value;
};

/// All trainable tensors in a fixed canonical order: per layer, per
/// direction (fwd then bwd): Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh; then
/// proj.W, proj.b, head.W, head.b. The order is also the checkpoint order.
struct GmrParams {
    GmrConfig config;
    std::uint64_t seed = 0;
    std::int64_t step = 0;
    std::vector<Tensor> tensors;

    Eigen::MatrixXd& at(const std::string& name);
    const Eigen::MatrixXd& at(const std::string& name) const;
};

/// Tensor name for layer/direction/part, e.g. gru_name(0, 1, "Wz") == "gru0.bwd.Wz".
std::string gru_name(int layer, int dir, const std::string& part);

/// Deterministic initialization: each matrix uniform(-1/sqrt(fan_in),
/// +1/sqrt(fan_in)) with fan_in = column count, biases zero.
GmrParams init_params(const GmrConfig& config, std::uint64_t seed);

/// Expected tensor shapes for a config, in canonical order.
std::vector<Tensor> tensor_layout(const GmrConfig& config);

/// One GRU update, recorded on the tape. p = {Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh}.
NodeId gru_cell(Tape& tape, NodeId x, NodeId h, const std::vector<NodeId>& p);

/// Plain (untaped) GRU update for reference/testing.
Eigen::VectorXd gru_cell_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                              const std::vector<Eigen::MatrixXd>& p);

/// Parameter leaves for one tape, in canonical tensor order.
std::vector<NodeId> param_leaves(Tape& tape, const GmrParams& params);

/// Flattens a local pose frame into the 4J input column (w, x, y, z per joint).
Eigen::VectorXd encode_frame(const LocalPose& frame);

/// Records the full bidirectional forward pass; returns one 6x1 output node
/// per input frame. Throws InvalidInput on an empty sequence.
std::vector<NodeId> gmr_forward(Tape& tape, const GmrConfig& config,
                                const std::vector<NodeId>& params,
                                const std::vector<Eigen::VectorXd>& frames);

/// Convenience inference: runs the forward pass on a scratch tape and wraps
/// the raw outputs into GlobalMotion values.
std::vector<GlobalMotion> gmr_infer(const GmrParams& params, const LocalPoseSeq& seq);

}  // namespace gmr
