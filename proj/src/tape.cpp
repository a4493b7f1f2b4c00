#include "gmr/tape.hpp"

#include <cmath>

#include "gmr/rot3.hpp"

namespace gmr {

namespace {

Eigen::Matrix3d skew3(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
        -v.y(), v.x(), 0;
    return s;
}

}  // namespace

NodeId Tape::push(Node&& node) {
    node.grad = Eigen::MatrixXd::Zero(node.value.rows(), node.value.cols());
    nodes_.push_back(std::move(node));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::leaf(const Eigen::MatrixXd& value) {
    return push(Node{Op::Leaf, -1, -1, value});
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    if (nodes_[a].value.cols() != nodes_[b].value.rows()) throw ShapeMismatch("matmul dims");
    return push(Node{Op::MatMul, a, b, nodes_[a].value * nodes_[b].value});
}

NodeId Tape::matmul_const_r(NodeId a, const Eigen::MatrixXd& k) {
    if (nodes_[a].value.cols() != k.rows()) throw ShapeMismatch("matmul dims");
    Node n{Op::MatMulConstR, a, -1, nodes_[a].value * k};
    n.aux = k;
    return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
    return push(Node{Op::Add, a, b, nodes_[a].value + nodes_[b].value});
}

NodeId Tape::sub(NodeId a, NodeId b) {
    return push(Node{Op::Sub, a, b, nodes_[a].value - nodes_[b].value});
}

NodeId Tape::sub_const(NodeId a, const Eigen::MatrixXd& k) {
    return push(Node{Op::SubConst, a, -1, nodes_[a].value - k});
}

NodeId Tape::hadamard(NodeId a, NodeId b) {
    return push(Node{Op::Hadamard, a, b, nodes_[a].value.cwiseProduct(nodes_[b].value)});
}

NodeId Tape::sigmoid(NodeId a) {
    Eigen::MatrixXd y = nodes_[a].value.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    return push(Node{Op::Sigmoid, a, -1, std::move(y)});
}

NodeId Tape::tanh_(NodeId a) {
    Eigen::MatrixXd y = nodes_[a].value.array().tanh();
    return push(Node{Op::Tanh, a, -1, std::move(y)});
}

NodeId Tape::one_minus(NodeId a) {
    Eigen::MatrixXd y = 1.0 - nodes_[a].value.array();
    return push(Node{Op::OneMinus, a, -1, std::move(y)});
}

NodeId Tape::scale(NodeId a, double s) {
    Node n{Op::Scale, a, -1, s * nodes_[a].value};
    n.s = s;
    return push(std::move(n));
}

NodeId Tape::vstack(NodeId a, NodeId b) {
    if (nodes_[a].value.cols() != nodes_[b].value.cols()) throw ShapeMismatch("vstack cols");
    Eigen::MatrixXd y(nodes_[a].value.rows() + nodes_[b].value.rows(), nodes_[a].value.cols());
    y << nodes_[a].value, nodes_[b].value;
    return push(Node{Op::VStack, a, b, std::move(y)});
}

NodeId Tape::rows(NodeId a, int i0, int n) {
    Node node{Op::Rows, a, -1, nodes_[a].value.middleRows(i0, n)};
    node.i0 = i0;
    node.n = n;
    return push(std::move(node));
}

NodeId Tape::colwise_add(NodeId m, NodeId v) {
    if (nodes_[v].value.cols() != 1 || nodes_[v].value.rows() != nodes_[m].value.rows()) {
        throw ShapeMismatch("colwise_add vector shape");
    }
    Eigen::MatrixXd y = nodes_[m].value.colwise() + Eigen::VectorXd(nodes_[v].value);
    return push(Node{Op::ColwiseAdd, m, v, std::move(y)});
}

NodeId Tape::sq_frobenius(NodeId a) {
    Eigen::MatrixXd y(1, 1);
    y(0, 0) = nodes_[a].value.squaredNorm();
    return push(Node{Op::SqFrob, a, -1, std::move(y)});
}

NodeId Tape::l1(NodeId a) {
    Eigen::MatrixXd y(1, 1);
    y(0, 0) = nodes_[a].value.cwiseAbs().sum();
    return push(Node{Op::L1, a, -1, std::move(y)});
}

NodeId Tape::rodrigues(NodeId v) {
    if (nodes_[v].value.rows() != 3 || nodes_[v].value.cols() != 1) {
        throw ShapeMismatch("rodrigues expects a 3x1 vector");
    }
    return push(Node{Op::Rodrigues, v, -1, aa_to_mat(AxisAngle{nodes_[v].value})});
}

NodeId Tape::angular_sq(NodeId r, const Eigen::Matrix3d& r_ref) {
    const Eigen::Matrix3d m = Eigen::Matrix3d(nodes_[r].value) * r_ref.transpose();
    Eigen::Vector3d w(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    double theta = std::atan2(0.5 * w.norm(), 0.5 * (m.trace() - 1.0));
    Node n{Op::AngularSq, r, -1, Eigen::MatrixXd::Constant(1, 1, theta * theta)};
    n.aux = r_ref;
    n.s = theta;
    return push(std::move(n));
}

NodeId Tape::wrap_axis_angle(NodeId v) {
    return push(Node{Op::WrapAxisAngle, v, -1, AxisAngle::wrapped(nodes_[v].value).v});
}

void Tape::backward(NodeId loss) {
    if (nodes_[loss].value.size() != 1) throw InvalidInput("backward expects a scalar loss node");
    for (auto& n : nodes_) n.grad.setZero();
    nodes_[loss].grad(0, 0) = 1.0;
    for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
        Node& n = nodes_[id];
        if (n.grad.isZero(0.0) && id != loss) continue;
        const Eigen::MatrixXd& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::MatMul:
                nodes_[n.in0].grad.noalias() += g * nodes_[n.in1].value.transpose();
                nodes_[n.in1].grad.noalias() += nodes_[n.in0].value.transpose() * g;
                break;
            case Op::MatMulConstR:
                nodes_[n.in0].grad.noalias() += g * n.aux.transpose();
                break;
            case Op::Add:
                nodes_[n.in0].grad += g;
                nodes_[n.in1].grad += g;
                break;
            case Op::Sub:
                nodes_[n.in0].grad += g;
                nodes_[n.in1].grad -= g;
                break;
            case Op::SubConst:
            case Op::WrapAxisAngle:  // straight-through
                nodes_[n.in0].grad += g;
                break;
            case Op::Hadamard:
                nodes_[n.in0].grad += g.cwiseProduct(nodes_[n.in1].value);
                nodes_[n.in1].grad += g.cwiseProduct(nodes_[n.in0].value);
                break;
            case Op::Sigmoid:
                nodes_[n.in0].grad.array() += g.array() * n.value.array() * (1.0 - n.value.array());
                break;
            case Op::Tanh:
                nodes_[n.in0].grad.array() += g.array() * (1.0 - n.value.array().square());
                break;
            case Op::OneMinus:
                nodes_[n.in0].grad -= g;
                break;
            case Op::Scale:
                nodes_[n.in0].grad += n.s * g;
                break;
            case Op::VStack: {
                const auto r0 = nodes_[n.in0].value.rows();
                nodes_[n.in0].grad += g.topRows(r0);
                nodes_[n.in1].grad += g.bottomRows(g.rows() - r0);
                break;
            }
            case Op::Rows:
                nodes_[n.in0].grad.middleRows(n.i0, n.n) += g;
                break;
            case Op::ColwiseAdd:
                nodes_[n.in0].grad += g;
                nodes_[n.in1].grad += g.rowwise().sum();
                break;
            case Op::SqFrob:
                nodes_[n.in0].grad += 2.0 * g(0, 0) * nodes_[n.in0].value;
                break;
            case Op::L1:
                nodes_[n.in0].grad += g(0, 0) * nodes_[n.in0].value.unaryExpr([](double v) {
                    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                });
                break;
            case Op::Rodrigues: {
                // d vec(R)/dv per Gallego & Yezzi: for each component i,
                // dR/dv_i = (v_i [v]x + [v x ((I - R) e_i)]x) / ||v||^2 * R,
                // with the v -> 0 limit dR/dv_i = [e_i]x.
                const Eigen::Vector3d v = nodes_[n.in0].value;
                const Eigen::Matrix3d r = n.value;
                const double t2 = v.squaredNorm();
                for (int i = 0; i < 3; ++i) {
                    Eigen::Matrix3d dr;
                    if (t2 < 1e-16) {
                        dr = skew3(Eigen::Vector3d::Unit(i));
                    } else {
                        Eigen::Vector3d e = Eigen::Vector3d::Unit(i);
                        Eigen::Vector3d c = v.cross((Eigen::Matrix3d::Identity() - r) * e);
                        dr = ((v[i] * skew3(v) + skew3(c)) / t2) * r;
                    }
                    nodes_[n.in0].grad(i, 0) += g.cwiseProduct(dr).sum();
                }
                break;
            }
            case Op::AngularSq: {
                // d(theta^2)/dR = -(theta / sin(theta)) * R_ref
                const double theta = n.s;
                double f;
                const double st = std::sin(theta);
                if (theta < 1e-8) f = 1.0;
                else f = theta / std::max(st, 1e-9);
                nodes_[n.in0].grad.noalias() += (-g(0, 0) * f) * n.aux;
                break;
            }
        }
    }
}

}  // namespace gmr
