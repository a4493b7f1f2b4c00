#include "gmr/trainer.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace gmr {

namespace {

std::vector<Eigen::VectorXd> input_frames(const MotionSample& s) {
    // feed T frames so all T regressed motions are supervised
    const std::size_t T = s.gt_motions.size();
    if (s.local.size() < T) throw ShapeMismatch("sample local sequence shorter than motions");
    std::vector<Eigen::VectorXd> frames;
    frames.reserve(T);
    for (std::size_t i = 0; i < T; ++i) frames.push_back(encode_frame(s.local[i]));
    return frames;
}

std::vector<Eigen::Matrix3Xd> vertex_context(const BodySkeleton& skel, const MotionSample& s) {
    std::vector<Eigen::Matrix3Xd> out;
    out.reserve(s.gt_motions.size());
    for (std::size_t i = 0; i < s.gt_motions.size(); ++i) {
        out.push_back(local_vertices(skel, s.local[i], s.beta));
    }
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(lr > 0.0) && lr != 0.0) throw InvalidInput("learning rate must be finite");
    if (batch < 1) throw InvalidInput("batch must be >= 1");
    if (steps < 0) throw InvalidInput("steps must be nonnegative");
}

AdamState AdamState::init(const GmrParams& params) {
    AdamState s;
    s.m.reserve(params.tensors.size());
    s.v.reserve(params.tensors.size());
    for (const auto& t : params.tensors) {
        s.m.push_back(Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
        s.v.push_back(Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
    }
    return s;
}

LossBreakdown train_step(GmrParams& params, AdamState& adam,
                         const std::vector<const MotionSample*>& batch,
                         const TrainConfig& config, const BodySkeleton& skel) {
    if (batch.empty()) throw InvalidInput("empty batch");
    Tape tape;
    std::vector<NodeId> leaves = param_leaves(tape, params);

    LossBreakdown bd;
    NodeId total = tape.leaf(Eigen::MatrixXd::Zero(1, 1));
    for (const MotionSample* s : batch) {
        auto outputs = gmr_forward(tape, params.config, leaves, input_frames(*s));
        LossNodes l = build_losses(tape, outputs, s->gt_motions, config.ori_kind, config.weights,
                                   vertex_context(skel, *s));
        bd.ori += tape.value(l.ori)(0, 0);
        bd.trans += tape.value(l.trans)(0, 0);
        bd.vertex += tape.value(l.vertex)(0, 0);
        bd.smooth += tape.value(l.smooth)(0, 0);
        total = tape.add(total, l.total);
    }
    bd.total = tape.value(total)(0, 0);
    if (!std::isfinite(bd.total)) throw NumericFailure("non-finite training loss");

    tape.backward(total);

    adam.step += 1;
    const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
    const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        const Eigen::MatrixXd& g = tape.grad(leaves[i]);
        adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * g;
        adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * g.cwiseProduct(g);
        Eigen::ArrayXXd mhat = adam.m[i].array() / c1;
        Eigen::ArrayXXd vhat = adam.v[i].array() / c2;
        params.tensors[i].value.array() -= config.lr * mhat / (vhat.sqrt() + adam.eps);
    }
    params.step += 1;
    return bd;
}

MetricReport evaluate(const GmrParams& params, const std::vector<MotionSample>& dataset,
                      const BodySkeleton& skel) {
    return evaluate_rule(dataset, skel, [&](const MotionSample& s) {
        LocalPoseSeq seq(s.local.begin(), s.local.begin() + s.gt_motions.size());
        return gmr_infer(params, seq);
    });
}

TrainResult train(GmrParams params, const TrainConfig& config,
                  const std::vector<MotionSample>& train_set,
                  const std::vector<MotionSample>& eval_set, const BodySkeleton& skel,
                  AdamState* adam) {
    config.validate();
    if (train_set.empty()) throw InvalidInput("empty training set");
    AdamState local_adam;
    if (!adam) {
        local_adam = AdamState::init(params);
        adam = &local_adam;
    }
    std::uniform_int_distribution<std::size_t> pick(0, train_set.size() - 1);
    std::bernoulli_distribution coin(0.5);

    std::ostringstream log;
    log.precision(17);
    log << "step,L_total,L_ori,L_trans,L_vertex,L_smooth,ome_deg,tme_mm,vme_mm\n";

    std::vector<MotionSample> flipped;  // storage for the batch's reversed samples
    for (int step = 1; step <= config.steps; ++step) {
        // keyed to the global step counter so a resumed run draws the same batches
        std::mt19937_64 sampler(config.seed ^
                                (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(params.step + 1)));
        flipped.clear();
        flipped.reserve(config.batch);
        std::vector<const MotionSample*> batch;
        batch.reserve(config.batch);
        for (int b = 0; b < config.batch; ++b) {
            const MotionSample& s = train_set[pick(sampler)];
            if (config.flip_aug && coin(sampler)) {
                flipped.push_back(flip(s));
                batch.push_back(&flipped.back());
            } else {
                batch.push_back(&s);
            }
        }
        LossBreakdown bd = train_step(params, *adam, batch, config, skel);

        const bool eval_now =
            config.eval_every > 0 && !eval_set.empty() &&
            (step % config.eval_every == 0 || step == config.steps);
        log << params.step << "," << bd.total << "," << bd.ori << "," << bd.trans << "," << bd.vertex
            << "," << bd.smooth;
        if (eval_now) {
            MetricReport r = evaluate(params, eval_set, skel);
            log << "," << r.ome_deg << "," << r.tme_mm << "," << r.vme_mm;
        } else {
            log << ",,,";
        }
        log << "\n";
    }
    return TrainResult{std::move(params), log.str()};
}

}  // namespace gmr
