#include <doctest.h>

#include <random>

#include "gmr/net.hpp"

using namespace gmr;

namespace {

std::mt19937_64 g_rng(909);

std::vector<Eigen::VectorXd> random_frames(int T, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Eigen::VectorXd> frames(T);
    for (auto& f : frames) {
        f.resize(dim);
        for (int i = 0; i < dim; ++i) f[i] = n(g_rng);
    }
    return frames;
}

void randomize(GmrParams& p, double s = 0.4) {
    std::normal_distribution<double> n(0.0, s);
    for (auto& t : p.tensors)
        for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = n(g_rng);
}

std::vector<Eigen::MatrixXd> forward_values(const GmrParams& p,
                                            const std::vector<Eigen::VectorXd>& frames) {
    Tape tape;
    auto outs = gmr_forward(tape, p.config, param_leaves(tape, p), frames);
    std::vector<Eigen::MatrixXd> vals;
    for (NodeId id : outs) vals.push_back(tape.value(id));
    return vals;
}

// exchange the forward and backward roles of every parameter block
GmrParams swap_directions(const GmrParams& p) {
    GmrParams q = p;
    const int h = p.config.hidden;
    for (int l = 0; l < p.config.layers; ++l) {
        for (const char* part : {"Wz", "Wr", "Wh", "Uz", "Ur", "Uh", "bz", "br", "bh"}) {
            q.at(gru_name(l, 0, part)) = p.at(gru_name(l, 1, part));
            q.at(gru_name(l, 1, part)) = p.at(gru_name(l, 0, part));
        }
        if (l > 0) {
            // inputs of deeper layers are [fwd; bwd] concatenations: swap the
            // corresponding column halves of the input matrices
            for (int d = 0; d < 2; ++d) {
                for (const char* part : {"Wz", "Wr", "Wh"}) {
                    Eigen::MatrixXd& w = q.at(gru_name(l, d, part));
                    Eigen::MatrixXd tmp = w.leftCols(h);
                    w.leftCols(h) = w.rightCols(h);
                    w.rightCols(h) = tmp;
                }
            }
        }
    }
    Eigen::MatrixXd& pw = q.at("proj.W");
    const int half = p.config.hidden;
    Eigen::MatrixXd tmp = pw.leftCols(half);
    pw.leftCols(half) = pw.rightCols(half);
    pw.rightCols(half) = tmp;
    return q;
}

}  // namespace

TEST_CASE("gru_cell analytic anchors") {
    const int d = 4;
    std::vector<Eigen::MatrixXd> zero(9);
    for (int i = 0; i < 6; ++i) zero[i] = Eigen::MatrixXd::Zero(d, d);
    for (int i = 6; i < 9; ++i) zero[i] = Eigen::MatrixXd::Zero(d, 1);

    Eigen::VectorXd h = Eigen::VectorXd::Random(d);
    // all-zero params: z = 0.5, cand = 0 -> h' = 0.5 h
    Eigen::VectorXd out = gru_cell_eval(Eigen::VectorXd::Zero(d), h, zero);
    CHECK((out - 0.5 * h).norm() < 1e-15);
    CHECK(gru_cell_eval(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d), zero).norm() == 0.0);
}

TEST_CASE("gru_cell matches a scalar-by-scalar reference") {
    const int d = 3;
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Eigen::MatrixXd> p(9);
    for (int i = 0; i < 6; ++i) p[i] = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return n(g_rng); });
    for (int i = 6; i < 9; ++i) p[i] = Eigen::MatrixXd::NullaryExpr(d, 1, [&] { return n(g_rng); });
    Eigen::VectorXd x = Eigen::VectorXd::Random(d), h = Eigen::VectorXd::Random(d);

    // independent scalar reference
    auto dot_row = [&](const Eigen::MatrixXd& m, int row, const Eigen::VectorXd& v) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += m(row, k) * v[k];
        return s;
    };
    Eigen::VectorXd expected(d);
    for (int i = 0; i < d; ++i) {
        double z = 1.0 / (1.0 + std::exp(-(dot_row(p[0], i, x) + dot_row(p[3], i, h) + p[6](i, 0))));
        double r = 1.0 / (1.0 + std::exp(-(dot_row(p[1], i, x) + dot_row(p[4], i, h) + p[7](i, 0))));
        double cand_pre = dot_row(p[2], i, x) + p[8](i, 0);
        for (int k = 0; k < d; ++k) {
            double rk = 1.0 / (1.0 + std::exp(-(dot_row(p[1], k, x) + dot_row(p[4], k, h) + p[7](k, 0))));
            cand_pre += p[5](i, k) * rk * h[k];
        }
        (void)r;
        expected[i] = (1.0 - z) * std::tanh(cand_pre) + z * h[i];
    }

    CHECK((gru_cell_eval(x, h, p) - expected).norm() < 1e-12);

    // taped cell agrees with the plain evaluation
    Tape tape;
    std::vector<NodeId> pn;
    for (const auto& m : p) pn.push_back(tape.leaf(m));
    NodeId out = gru_cell(tape, tape.leaf(x), tape.leaf(h), pn);
    CHECK((tape.value(out) - expected).norm() < 1e-12);
}

TEST_CASE("init_params determinism and fan-in bound") {
    GmrConfig cfg = desk_config(2, 16);
    GmrParams a = init_params(cfg, 42), b = init_params(cfg, 42), c = init_params(cfg, 43);
    bool identical = true, differs = false;
    for (size_t i = 0; i < a.tensors.size(); ++i) {
        identical = identical && a.tensors[i].value == b.tensors[i].value;
        differs = differs || a.tensors[i].value != c.tensors[i].value;
    }
    CHECK(identical);
    CHECK(differs);
    for (const auto& t : a.tensors) {
        if (t.value.cols() == 1) {
            CHECK(t.value.norm() == 0.0);
        } else {
            double bound = 1.0 / std::sqrt(double(t.value.cols()));
            CHECK(t.value.maxCoeff() <= bound);
            CHECK(t.value.minCoeff() >= -bound);
        }
    }
}

TEST_CASE("config invariants") {
    GmrConfig paper;  // defaults are the full-scale model
    paper.validate();
    CHECK(2 * paper.hidden == 4096);  // concatenated hidden width H_i
    CHECK(paper.proj_dim == 2048);
    CHECK(paper.input_dim == 92);
    CHECK(paper.num_joints() == 23);

    GmrConfig bad;
    bad.input_dim = 93;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("forward output shape and determinism") {
    GmrConfig cfg = desk_config(2, 8);
    cfg.input_dim = 12;
    GmrParams p = init_params(cfg, 5);
    randomize(p);
    for (int T : {1, 3, 9}) {
        auto frames = random_frames(T, cfg.input_dim);
        auto out = forward_values(p, frames);
        CHECK(int(out.size()) == T);
        for (auto& o : out) {
            CHECK(o.rows() == 6);
            CHECK(o.cols() == 1);
        }
        auto again = forward_values(p, frames);
        for (int t = 0; t < T; ++t) CHECK(out[t] == again[t]);
    }
    Tape tape;
    CHECK_THROWS_AS(gmr_forward(tape, cfg, param_leaves(tape, p), {}), InvalidInput);
}

TEST_CASE("bidirectional symmetry under direction swap") {
    for (int layers : {1, 2}) {
        GmrConfig cfg = desk_config(layers, 6);
        cfg.input_dim = 8;
        GmrParams p = init_params(cfg, 11);
        randomize(p);
        auto frames = random_frames(5, cfg.input_dim);
        auto forward = forward_values(p, frames);

        std::vector<Eigen::VectorXd> reversed(frames.rbegin(), frames.rend());
        auto swapped = forward_values(swap_directions(p), reversed);
        for (size_t t = 0; t < frames.size(); ++t) {
            CHECK((swapped[t] - forward[frames.size() - 1 - t]).norm() < 1e-12);
        }
    }
}

TEST_CASE("output depends on the whole window") {
    GmrConfig cfg = desk_config(1, 8);
    cfg.input_dim = 8;
    GmrParams p = init_params(cfg, 3);
    randomize(p);
    auto frames = random_frames(6, cfg.input_dim);
    auto base = forward_values(p, frames);
    frames.back()[0] += 0.5;
    auto perturbed = forward_values(p, frames);
    CHECK((perturbed.front() - base.front()).norm() > 1e-12);
}

TEST_CASE("backward: bias gradient of the sum loss, zero nets") {
    GmrConfig cfg = desk_config(1, 2);
    cfg.input_dim = 8;
    GmrParams p = init_params(cfg, 0);
    for (auto& t : p.tensors) t.value.setZero();  // zero-weight net
    const int T = 2;

    Tape tape;
    auto leaves = param_leaves(tape, p);
    auto outs = gmr_forward(tape, cfg, leaves, random_frames(T, cfg.input_dim));
    NodeId ones = tape.leaf(Eigen::MatrixXd::Ones(1, 6));
    NodeId loss = tape.leaf(Eigen::MatrixXd::Zero(1, 1));
    for (NodeId o : outs) loss = tape.add(loss, tape.matmul(ones, o));
    tape.backward(loss);

    // outputs are head.b at every frame; d(loss)/d(head.b) accumulates one
    // per frame, everything upstream is cut off by the zero head weight
    for (size_t i = 0; i < p.tensors.size(); ++i) {
        if (p.tensors[i].name == "head.b") {
            CHECK((tape.grad(leaves[i]) - double(T) * Eigen::MatrixXd::Ones(6, 1)).norm() == 0.0);
        } else if (p.tensors[i].name != "proj.b") {
            CHECK(tape.grad(leaves[i]).norm() == 0.0);
        }
    }

    // constant loss: all gradients vanish
    Tape tape2;
    auto leaves2 = param_leaves(tape2, p);
    auto outs2 = gmr_forward(tape2, cfg, leaves2, random_frames(T, cfg.input_dim));
    NodeId loss2 = tape2.sq_frobenius(tape2.sub_const(outs2[0], tape2.value(outs2[0])));
    tape2.backward(loss2);
    for (NodeId l : leaves2) CHECK(tape2.grad(l).norm() == 0.0);
}

TEST_CASE("finite-difference gradient of a squared-output loss") {
    GmrConfig cfg = desk_config(1, 4);
    cfg.input_dim = 8;
    GmrParams p = init_params(cfg, 21);
    randomize(p, 0.3);
    auto frames = random_frames(3, cfg.input_dim);

    auto loss_of = [&](const GmrParams& params) {
        Tape tape;
        auto outs = gmr_forward(tape, cfg, param_leaves(tape, params), frames);
        NodeId loss = tape.leaf(Eigen::MatrixXd::Zero(1, 1));
        for (NodeId o : outs) loss = tape.add(loss, tape.sq_frobenius(o));
        return std::pair<Tape, NodeId>(std::move(tape), loss);
    };

    auto [tape, loss] = loss_of(p);
    tape.backward(loss);
    auto leaves_count = p.tensors.size();

    const double h = 1e-5;
    for (size_t ti = 0; ti < leaves_count; ++ti) {
        Eigen::MatrixXd analytic = tape.grad(NodeId(ti));  // leaves are the first nodes
        for (Eigen::Index k = 0; k < p.tensors[ti].value.size(); ++k) {
            GmrParams pp = p;
            pp.tensors[ti].value.data()[k] += h;
            auto [tp, lp] = loss_of(pp);
            pp.tensors[ti].value.data()[k] -= 2 * h;
            auto [tm, lm] = loss_of(pp);
            double fd = (tp.value(lp)(0, 0) - tm.value(lm)(0, 0)) / (2 * h);
            CHECK(analytic.data()[k] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
        }
    }
}
