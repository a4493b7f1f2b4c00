#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gmr/serialize.hpp"
#include "gmr/trainer.hpp"

using namespace gmr;

namespace {

const BodySkeleton& skel() {
    static BodySkeleton s = BodySkeleton::default_skeleton();
    return s;
}

std::vector<MotionSample> tiny_dataset(int window_len = 6) {
    GeneratorSpec spec;
    spec.kind = MotionKind::CircleWalk;
    spec.turn_rate = 0.6;
    spec.duration = 3.0;
    spec.seed = 1;
    return window(generate(spec, skel()), window_len, window_len);
}

bool same_tensors(const GmrParams& a, const GmrParams& b) {
    if (a.tensors.size() != b.tensors.size()) return false;
    for (size_t i = 0; i < a.tensors.size(); ++i) {
        if (a.tensors[i].name != b.tensors[i].name) return false;
        if (a.tensors[i].value != b.tensors[i].value) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("zero learning rate leaves parameters untouched") {
    auto data = tiny_dataset();
    GmrParams p = init_params(desk_config(1, 12), 3);
    GmrParams before = p;
    AdamState adam = AdamState::init(p);
    TrainConfig cfg;
    cfg.lr = 0.0;
    train_step(p, adam, {&data[0]}, cfg, skel());
    CHECK(same_tensors(p, before));
    CHECK(p.step == before.step + 1);
    CHECK(adam.step == 1);
}

TEST_CASE("train_step matches a scalar Adam reference") {
    auto data = tiny_dataset();
    GmrParams p = init_params(desk_config(1, 8), 7);
    TrainConfig cfg;
    cfg.lr = 1e-3;

    // gradients from an identical tape, applied by a hand-written Adam
    GmrParams ref = p;
    AdamState ref_adam = AdamState::init(ref);
    {
        Tape tape;
        auto leaves = param_leaves(tape, ref);
        std::vector<Eigen::VectorXd> frames;
        for (size_t i = 0; i < data[0].gt_motions.size(); ++i)
            frames.push_back(encode_frame(data[0].local[i]));
        std::vector<Eigen::Matrix3Xd> verts;
        for (size_t i = 0; i < data[0].gt_motions.size(); ++i)
            verts.push_back(local_vertices(skel(), data[0].local[i], data[0].beta));
        auto outs = gmr_forward(tape, ref.config, leaves, frames);
        LossNodes l = build_losses(tape, outs, data[0].gt_motions, cfg.ori_kind, cfg.weights, verts);
        NodeId total = tape.add(tape.leaf(Eigen::MatrixXd::Zero(1, 1)), l.total);
        tape.backward(total);
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        for (size_t i = 0; i < ref.tensors.size(); ++i) {
            const Eigen::MatrixXd& g = tape.grad(leaves[i]);
            Eigen::MatrixXd& w = ref.tensors[i].value;
            for (Eigen::Index k = 0; k < w.size(); ++k) {
                double gk = g.data()[k];
                double m = (1.0 - b1) * gk;           // first step, moments start at zero
                double v = (1.0 - b2) * gk * gk;
                double mhat = m / (1.0 - b1);
                double vhat = v / (1.0 - b2);
                w.data()[k] -= cfg.lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }

    AdamState adam = AdamState::init(p);
    train_step(p, adam, {&data[0]}, cfg, skel());
    for (size_t i = 0; i < p.tensors.size(); ++i) {
        CHECK((p.tensors[i].value - ref.tensors[i].value).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("a few steps of overfitting reduce the loss") {
    auto data = tiny_dataset();
    std::vector<MotionSample> one{data[0]};
    GmrParams p = init_params(desk_config(1, 16), 11);
    TrainConfig cfg;
    cfg.lr = 2e-3;
    cfg.batch = 1;
    cfg.steps = 40;
    AdamState adam = AdamState::init(p);
    double first = train_step(p, adam, {&one[0]}, cfg, skel()).total;
    double last = first;
    for (int i = 1; i < cfg.steps; ++i) last = train_step(p, adam, {&one[0]}, cfg, skel()).total;
    CHECK(last < 0.7 * first);
}

TEST_CASE("training is deterministic per seed") {
    auto data = tiny_dataset();
    TrainConfig cfg;
    cfg.lr = 1e-3;
    cfg.batch = 2;
    cfg.steps = 5;
    cfg.seed = 99;
    cfg.flip_aug = true;
    cfg.eval_every = 5;

    GmrParams init = init_params(desk_config(1, 8), 1);
    TrainResult a = train(init, cfg, data, data, skel());
    TrainResult b = train(init, cfg, data, data, skel());
    CHECK(same_tensors(a.params, b.params));
    CHECK(a.log_csv == b.log_csv);
    CHECK(a.log_csv.rfind("step,L_total,L_ori,L_trans,L_vertex,L_smooth,ome_deg,tme_mm,vme_mm\n",
                          0) == 0);

    cfg.flip_aug = false;
    TrainResult c = train(init, cfg, data, data, skel());
    CHECK_FALSE(same_tensors(a.params, c.params));
}

TEST_CASE("a resumed run replays the uninterrupted one byte-exactly") {
    auto data = tiny_dataset();
    TrainConfig cfg;
    cfg.lr = 1e-3;
    cfg.batch = 2;
    cfg.steps = 6;
    cfg.seed = 17;
    cfg.flip_aug = true;
    GmrParams init = init_params(desk_config(1, 8), 4);

    AdamState adam_full = AdamState::init(init);
    TrainResult full = train(init, cfg, data, {}, skel(), &adam_full);

    cfg.steps = 3;
    AdamState adam_split = AdamState::init(init);
    TrainResult half = train(init, cfg, data, {}, skel(), &adam_split);
    const std::string path = "trainer_resume_tmp.bin";
    save_checkpoint(path, half.params, &adam_split);
    AdamState adam_back;
    GmrParams resumed = load_checkpoint(path, &adam_back);
    CHECK(adam_back.step == 3);
    TrainResult second = train(resumed, cfg, data, {}, skel(), &adam_back);

    CHECK(second.params.step == full.params.step);
    CHECK(same_tensors(second.params, full.params));
    for (size_t i = 0; i < adam_full.m.size(); ++i) {
        CHECK(adam_back.m[i] == adam_full.m[i]);
        CHECK(adam_back.v[i] == adam_full.v[i]);
    }
    std::remove(path.c_str());
}

TEST_CASE("evaluate and the zero-motion baseline") {
    auto data = tiny_dataset();
    GmrParams p = init_params(desk_config(1, 8), 2);
    MetricReport r = evaluate(p, data, skel());
    CHECK(std::isfinite(r.ome_deg));
    CHECK(std::isfinite(r.tme_mm));
    CHECK(std::isfinite(r.vme_mm));

    MetricReport zero = evaluate_rule(data, skel(), [](const MotionSample& s) {
        return std::vector<GlobalMotion>(s.gt_motions.size());
    });
    CHECK(zero.tme_mm > 0.0);  // the subject actually moves
    MetricReport perfect = evaluate_rule(data, skel(), [](const MotionSample& s) {
        return s.gt_motions;
    });
    CHECK(perfect.ome_deg < 1e-9);
    CHECK(perfect.tme_mm < 1e-9);
    CHECK(perfect.vme_mm < 1e-9);
}

TEST_CASE("input validation") {
    auto data = tiny_dataset();
    GmrParams p = init_params(desk_config(1, 8), 2);
    AdamState adam = AdamState::init(p);
    TrainConfig cfg;
    CHECK_THROWS_AS(train_step(p, adam, {}, cfg, skel()), InvalidInput);
    cfg.batch = 0;
    CHECK_THROWS_AS(train(p, cfg, data, {}, skel()), InvalidInput);
    cfg.batch = 1;
    CHECK_THROWS_AS(train(p, cfg, {}, {}, skel()), InvalidInput);
}

TEST_CASE("checkpoint round-trips byte-exactly") {
    GmrParams p = init_params(desk_config(2, 8), 77);
    p.step = 123;
    const std::string path = "trainer_ckpt_tmp.bin";
    save_checkpoint(path, p);
    GmrParams q = load_checkpoint(path);
    CHECK(q.config == p.config);
    CHECK(q.seed == p.seed);
    CHECK(q.step == p.step);
    CHECK(same_tensors(p, q));

    const std::string path2 = "trainer_ckpt_tmp2.bin";
    save_checkpoint(path2, q);
    CHECK(read_file(path) == read_file(path2));
    std::remove(path.c_str());
    std::remove(path2.c_str());
    CHECK_THROWS_AS(load_checkpoint("no_such_ckpt.bin"), InvalidInput);
}

TEST_CASE("trajectory files and manifests") {
    GeneratorSpec spec;
    spec.duration = 1.0;
    PoseTrajectory traj = generate(spec, skel()).poses;
    const std::string path = "trainer_traj_tmp.json";
    save_trajectory(path, traj);
    PoseTrajectory back = load_trajectory(path);
    CHECK(back.fps == traj.fps);
    REQUIRE(back.poses.size() == traj.poses.size());
    for (size_t i = 0; i < traj.poses.size(); ++i) {
        CHECK((back.poses[i].R - traj.poses[i].R).norm() == 0.0);
        CHECK((back.poses[i].T - traj.poses[i].T).norm() == 0.0);
    }

    RunManifest m;
    m.command = "infer";
    m.config_hash = fnv1a_hex("a=1\n");
    m.seed = 5;
    m.outputs = {path};
    write_manifest(path, m);
    std::ifstream in(path + ".manifest.json");
    CHECK(in.good());
    std::remove(path.c_str());
    std::remove((path + ".manifest.json").c_str());

    // FNV-1a 64-bit reference values
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
