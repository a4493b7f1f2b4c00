#include "gmr/net.hpp"

#include <random>

namespace gmr {

void GmrConfig::validate() const {
    if (input_dim <= 0 || layers <= 0 || hidden <= 0 || proj_dim <= 0) {
        throw InvalidInput("GmrConfig dimensions must be positive");
    }
    if (input_dim % 4 != 0) throw InvalidInput("input_dim must be 4 * J");
    if (output_dim != 6) throw InvalidInput("output_dim must be 6");
}

GmrConfig desk_config(int layers, int hidden) {
    GmrConfig c;
    c.layers = layers;
    c.hidden = hidden;
    c.proj_dim = hidden;
    return c;
}

std::string gru_name(int layer, int dir, const std::string& part) {
    return "gru" + std::to_string(layer) + (dir == 0 ? ".fwd." : ".bwd.") + part;
}

std::vector<Tensor> tensor_layout(const GmrConfig& config) {
    config.validate();
    std::vector<Tensor> out;
    const int h = config.hidden;
    for (int l = 0; l < config.layers; ++l) {
        const int in = l == 0 ? config.input_dim : 2 * h;
        for (int d = 0; d < 2; ++d) {
            for (const char* w : {"Wz", "Wr", "Wh"})
                out.push_back({gru_name(l, d, w), Eigen::MatrixXd::Zero(h, in)});
            for (const char* u : {"Uz", "Ur", "Uh"})
                out.push_back({gru_name(l, d, u), Eigen::MatrixXd::Zero(h, h)});
            for (const char* b : {"bz", "br", "bh"})
                out.push_back({gru_name(l, d, b), Eigen::MatrixXd::Zero(h, 1)});
        }
    }
    out.push_back({"proj.W", Eigen::MatrixXd::Zero(config.proj_dim, 2 * h)});
    out.push_back({"proj.b", Eigen::MatrixXd::Zero(config.proj_dim, 1)});
    out.push_back({"head.W", Eigen::MatrixXd::Zero(config.output_dim, config.proj_dim)});
    out.push_back({"head.b", Eigen::MatrixXd::Zero(config.output_dim, 1)});
    return out;
}

Eigen::MatrixXd& GmrParams::at(const std::string& name) {
    for (auto& t : tensors)
        if (t.name == name) return t.value;
    throw InvalidInput("unknown tensor: " + name);
}

const Eigen::MatrixXd& GmrParams::at(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return t.value;
    throw InvalidInput("unknown tensor: " + name);
}

GmrParams init_params(const GmrConfig& config, std::uint64_t seed) {
    GmrParams p;
    p.config = config;
    p.seed = seed;
    p.tensors = tensor_layout(config);
    std::mt19937_64 rng(seed);
    for (auto& t : p.tensors) {
        if (t.value.cols() == 1) continue;  // biases stay zero
        const double bound = 1.0 / std::sqrt(static_cast<double>(t.value.cols()));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index i = 0; i < t.value.rows(); ++i)
            for (Eigen::Index j = 0; j < t.value.cols(); ++j) t.value(i, j) = u(rng);
    }
    return p;
}

NodeId gru_cell(Tape& tape, NodeId x, NodeId h, const std::vector<NodeId>& p) {
    const NodeId wz = p[0], wr = p[1], wh = p[2], uz = p[3], ur = p[4], uh = p[5],
                 bz = p[6], br = p[7], bh = p[8];
    NodeId z = tape.sigmoid(tape.add(tape.add(tape.matmul(wz, x), tape.matmul(uz, h)), bz));
    NodeId r = tape.sigmoid(tape.add(tape.add(tape.matmul(wr, x), tape.matmul(ur, h)), br));
    NodeId cand = tape.tanh_(
        tape.add(tape.add(tape.matmul(wh, x), tape.matmul(uh, tape.hadamard(r, h))), bh));
    return tape.add(tape.hadamard(tape.one_minus(z), cand), tape.hadamard(z, h));
}

Eigen::VectorXd gru_cell_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                              const std::vector<Eigen::MatrixXd>& p) {
    auto sig = [](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return v.unaryExpr([](double a) { return 1.0 / (1.0 + std::exp(-a)); });
    };
    Eigen::VectorXd z = sig(p[0] * x + p[3] * h + p[6]);
    Eigen::VectorXd r = sig(p[1] * x + p[4] * h + p[7]);
    Eigen::VectorXd cand = (p[2] * x + p[5] * r.cwiseProduct(h) + p[8]).array().tanh();
    return (1.0 - z.array()) * cand.array() + z.array() * h.array();
}

std::vector<NodeId> param_leaves(Tape& tape, const GmrParams& params) {
    std::vector<NodeId> out;
    out.reserve(params.tensors.size());
    for (const auto& t : params.tensors) out.push_back(tape.leaf(t.value));
    return out;
}

Eigen::VectorXd encode_frame(const LocalPose& frame) {
    Eigen::VectorXd x(4 * frame.joints.size());
    for (std::size_t j = 0; j < frame.joints.size(); ++j) {
        x.segment<4>(4 * j) = frame.joints[j].coeffs();
    }
    return x;
}

std::vector<NodeId> gmr_forward(Tape& tape, const GmrConfig& config,
                                const std::vector<NodeId>& params,
                                const std::vector<Eigen::VectorXd>& frames) {
    config.validate();
    if (frames.empty()) throw InvalidInput("empty input sequence");
    const std::size_t T = frames.size();
    const int h = config.hidden;

    std::vector<NodeId> layer_in;
    layer_in.reserve(T);
    for (const auto& f : frames) {
        if (f.size() != config.input_dim) throw ShapeMismatch("frame width != input_dim");
        layer_in.push_back(tape.leaf(f));
    }

    // params layout mirrors tensor_layout: 18 tensors per layer, then proj/head
    for (int l = 0; l < config.layers; ++l) {
        const int base = 18 * l;
        std::vector<NodeId> fwd_p(params.begin() + base, params.begin() + base + 9);
        std::vector<NodeId> bwd_p(params.begin() + base + 9, params.begin() + base + 18);

        std::vector<NodeId> fwd(T), bwd(T);
        NodeId state = tape.leaf(Eigen::VectorXd::Zero(h));
        for (std::size_t t = 0; t < T; ++t) {
            state = gru_cell(tape, layer_in[t], state, fwd_p);
            fwd[t] = state;
        }
        state = tape.leaf(Eigen::VectorXd::Zero(h));
        for (std::size_t t = T; t-- > 0;) {
            state = gru_cell(tape, layer_in[t], state, bwd_p);
            bwd[t] = state;
        }
        for (std::size_t t = 0; t < T; ++t) layer_in[t] = tape.vstack(fwd[t], bwd[t]);
    }

    const NodeId proj_w = params[18 * config.layers];
    const NodeId proj_b = params[18 * config.layers + 1];
    const NodeId head_w = params[18 * config.layers + 2];
    const NodeId head_b = params[18 * config.layers + 3];

    std::vector<NodeId> out;
    out.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        NodeId f = tape.add(tape.matmul(proj_w, layer_in[t]), proj_b);
        out.push_back(tape.add(tape.matmul(head_w, f), head_b));
    }
    return out;
}

std::vector<GlobalMotion> gmr_infer(const GmrParams& params, const LocalPoseSeq& seq) {
    Tape tape;
    std::vector<Eigen::VectorXd> frames;
    frames.reserve(seq.size());
    for (const auto& f : seq) frames.push_back(encode_frame(f));
    auto outs = gmr_forward(tape, params.config, param_leaves(tape, params), frames);
    std::vector<GlobalMotion> motions;
    motions.reserve(outs.size());
    for (NodeId id : outs) {
        const Eigen::VectorXd& o = tape.value(id);
        GlobalMotion m;
        m.dA = AxisAngle::wrapped(o.head<3>());
        m.dT = o.tail<3>();
        motions.push_back(m);
    }
    return motions;
}

}  // namespace gmr
