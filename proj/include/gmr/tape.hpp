#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gmr/errors.hpp"

namespace gmr {

using NodeId = std::int32_t;

/// Reverse-mode gradient tape over dense f64 matrices (column vectors are
/// n x 1). Records the primitives needed by the regressor and its losses;
/// backward() fills exact adjoints in reverse recording order.
class Tape {
public:
    enum class Op : std::uint8_t {
        Leaf,
        MatMul,        // A * B
        MatMulConstR,  // A * K, K constant
        Add,
        Sub,
        SubConst,      // A - K
        Hadamard,
        Sigmoid,
        Tanh,
        OneMinus,      // 1 - A
        Scale,         // s * A
        VStack,        // rows of A over rows of B
        Rows,          // row slice [i0, i0+n)
        ColwiseAdd,    // A + v replicated over columns
        SqFrob,        // scalar sum of squares
        L1,            // scalar sum of |a_ij|
        Rodrigues,     // 3x1 axis-angle -> 3x3 rotation
        AngularSq,     // squared geodesic angle to a constant rotation
        WrapAxisAngle, // wrap into the canonical ball; identity gradient
    };

    NodeId leaf(const Eigen::MatrixXd& value);
    NodeId matmul(NodeId a, NodeId b);
    NodeId matmul_const_r(NodeId a, const Eigen::MatrixXd& k);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId sub_const(NodeId a, const Eigen::MatrixXd& k);
    NodeId hadamard(NodeId a, NodeId b);
    NodeId sigmoid(NodeId a);
    NodeId tanh_(NodeId a);
    NodeId one_minus(NodeId a);
    NodeId scale(NodeId a, double s);
    NodeId vstack(NodeId a, NodeId b);
    NodeId rows(NodeId a, int i0, int n);
    NodeId colwise_add(NodeId m, NodeId v);
    NodeId sq_frobenius(NodeId a);
    NodeId l1(NodeId a);
    NodeId rodrigues(NodeId v);
    NodeId angular_sq(NodeId r, const Eigen::Matrix3d& r_ref);
    NodeId wrap_axis_angle(NodeId v);

    const Eigen::MatrixXd& value(NodeId id) const { return nodes_[id].value; }
    const Eigen::MatrixXd& grad(NodeId id) const { return nodes_[id].grad; }
    std::size_t size() const { return nodes_.size(); }

    /// Seeds the (scalar) loss node with 1 and propagates adjoints to every
    /// recorded node. Throws InvalidInput if the loss node is not 1x1.
    void backward(NodeId loss);

private:
    struct Node {
        Op op;
        NodeId in0 = -1, in1 = -1;
        Eigen::MatrixXd value;
        Eigen::MatrixXd grad;
        Eigen::MatrixXd aux;  // constant operand where the op needs one
        double s = 0.0;
        int i0 = 0, n = 0;
    };

    NodeId push(Node&& node);

    std::vector<Node> nodes_;
};

}  // namespace gmr
