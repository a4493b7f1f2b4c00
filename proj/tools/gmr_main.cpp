// gmr: local-pose-to-global-motion toolkit.
//
// Subcommands: generate, train, infer, camera-sim, report.
// Exit codes: 0 success, 2 usage/parse error, 3 numeric failure.

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "gmr/datagen.hpp"
#include "gmr/serialize.hpp"
#include "gmr/trainer.hpp"

using namespace gmr;
using nlohmann::json;

namespace {

// ---- flat key=value config helpers

using KvMap = std::map<std::string, std::string>;

double get_d(const KvMap& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("config key '" + key + "': not a number: " + it->second);
    }
}

long get_i(const KvMap& kv, const std::string& key, long fallback) {
    double v = get_d(kv, key, double(fallback));
    long i = static_cast<long>(v);
    if (double(i) != v) throw InvalidInput("config key '" + key + "': not an integer");
    return i;
}

std::string get_s(const KvMap& kv, const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

bool get_b(const KvMap& kv, const std::string& key, bool fallback) {
    std::string v = get_s(kv, key, fallback ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InvalidInput("config key '" + key + "': expected true/false");
}

KvMap load_config(const std::string& path) { return path.empty() ? KvMap{} : read_kv_config(path); }

std::string kv_text(const KvMap& kv) {
    std::ostringstream out;
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
    return out.str();
}

RunManifest make_manifest(const std::string& command, const KvMap& kv, std::uint64_t seed,
                          std::vector<std::string> inputs, std::vector<std::string> outputs) {
    RunManifest m;
    m.command = command;
    m.config_hash = fnv1a_hex(kv_text(kv));
    m.seed = seed;
    m.inputs = std::move(inputs);
    m.outputs = std::move(outputs);
    return m;
}

// ---- camera paths (world poses of a camera over time, z-up)

struct CameraSpec {
    std::string kind = "static";       // static | linear | panning | circular
    double velocity = 1.0;             // m/s, linear
    double angular_rate = 0.5;         // rad/s, panning & circular
    double radius = 2.0;               // m, circular
    bool has_look_at = false;          // circular: aim the x-axis at a target
    Eigen::Vector3d look_at = Eigen::Vector3d::Zero();
};

CameraSpec parse_camera(const KvMap& kv) {
    CameraSpec c;
    c.kind = get_s(kv, "kind", "static");
    if (c.kind != "static" && c.kind != "linear" && c.kind != "panning" && c.kind != "circular") {
        throw InvalidInput("camera kind must be static|linear|panning|circular: " + c.kind);
    }
    c.velocity = get_d(kv, "velocity", c.velocity);
    c.angular_rate = get_d(kv, "angular_rate", c.angular_rate);
    c.radius = get_d(kv, "radius", c.radius);
    if (!std::isfinite(c.velocity) || !std::isfinite(c.angular_rate) || !std::isfinite(c.radius)) {
        throw InvalidInput("camera parameters must be finite");
    }
    if (c.kind == "circular" && c.radius <= 0.0) throw InvalidInput("circular radius must be > 0");
    if (kv.count("look_at")) {
        std::istringstream in(kv.at("look_at"));
        char c1 = 0, c2 = 0;
        if (!(in >> c.look_at.x() >> c1 >> c.look_at.y() >> c2 >> c.look_at.z()) || c1 != ',' ||
            c2 != ',') {
            throw InvalidInput("look_at must be 'x,y,z'");
        }
        c.has_look_at = true;
    }
    return c;
}

RotMatrix aim_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
    Eigen::Vector3d x = target - eye;
    if (x.norm() < 1e-9) throw InvalidInput("camera look_at coincides with the camera position");
    x.normalize();
    Eigen::Vector3d up(0, 0, 1);
    Eigen::Vector3d y = up.cross(x);
    if (y.norm() < 1e-9) throw InvalidInput("camera look direction is vertical");
    y.normalize();
    RotMatrix r;
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = x.cross(y);
    return r;
}

PoseTrajectory camera_trajectory(const CameraSpec& c, std::size_t frames, double fps) {
    PoseTrajectory traj;
    traj.fps = fps;
    traj.poses.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const double t = double(i) / fps;
        GlobalPose g;
        if (c.kind == "linear") {
            g.T = Eigen::Vector3d(c.velocity * t, 0, 0);
        } else if (c.kind == "panning") {
            g.R = rot_z(c.angular_rate * t);
        } else if (c.kind == "circular") {
            const double a = c.angular_rate * t;
            g.T = Eigen::Vector3d(c.radius * std::cos(a), c.radius * std::sin(a), 0);
            if (c.has_look_at) g.R = aim_at(g.T, c.look_at);
        }
        traj.poses.push_back(g);
    }
    return traj;
}

// The camera-frame baseline reports the subject's camera-coordinate pose as
// its world pose; its motion estimate is the frame-to-frame displacement of
// those camera-frame poses.
MetricReport baseline_metrics(const std::vector<MotionSample>& data, const CameraSpec& cam,
                              const BodySkeleton& skel) {
    return evaluate_rule(data, skel, [&](const MotionSample& s) {
        PoseTrajectory cam_traj = camera_trajectory(cam, s.gt_poses.poses.size(), s.fps);
        PoseTrajectory in_camera;
        in_camera.fps = s.fps;
        for (std::size_t i = 0; i < s.gt_poses.poses.size(); ++i) {
            in_camera.poses.push_back(camera_from_world(cam_traj.poses[i], s.gt_poses.poses[i]));
        }
        return motions_of(in_camera);
    });
}

json report_to_json(const MetricReport& r) { return json::parse(r.to_json()); }

// ---- subcommands

int cmd_generate(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    KvMap kv = load_config(config_path);
    std::vector<std::string> kinds;
    {
        std::istringstream in(get_s(kv, "kinds", "straight-walk"));
        std::string tok;
        while (std::getline(in, tok, ',')) kinds.push_back(tok);
        if (kinds.empty()) throw InvalidInput("kinds must name at least one motion kind");
    }
    const long count = get_i(kv, "count", 10);
    const int window_len = static_cast<int>(get_i(kv, "window_len", 17));
    const int stride = static_cast<int>(get_i(kv, "stride", 8));
    const double noise_std = get_d(kv, "noise_std", 0.0);
    if (count < 1) throw InvalidInput("count must be >= 1");

    GeneratorSpec base;
    base.duration = get_d(kv, "duration", 8.0);
    base.speed = get_d(kv, "speed", 1.0);
    base.turn_rate = get_d(kv, "turn_rate", 0.6);
    base.gait_freq = get_d(kv, "gait_freq", 1.0);
    base.fps = get_d(kv, "fps", 10.0);

    BodySkeleton skel = BodySkeleton::default_skeleton();
    std::vector<MotionSample> dataset;
    for (long i = 0; i < count; ++i) {
        GeneratorSpec spec = base;
        spec.kind = motion_kind_from_string(kinds[std::size_t(i) % kinds.size()]);
        spec.seed = seed + std::uint64_t(i);
        // deterministic per-sequence variation so same-kind sequences differ
        std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> u(0.6, 1.4);
        spec.speed *= u(rng);
        spec.turn_rate *= u(rng);
        auto windows = window(generate(spec, skel), window_len, stride, i);
        for (auto& s : windows) {
            if (noise_std > 0.0) s = perturb_local(s, noise_std, spec.seed + 1000003u * std::uint64_t(s.window_offset));
            dataset.push_back(std::move(s));
        }
    }
    if (dataset.empty()) throw InvalidInput("no windows produced; shorten window_len or extend duration");
    write_dataset(out, dataset);
    write_manifest(out, make_manifest("generate", kv, seed, {config_path}, {out}));
    std::cout << "wrote " << dataset.size() << " samples to " << out << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out,
              const std::string& data_path, const std::string& eval_path,
              const std::string& resume_path) {
    KvMap kv = load_config(config_path);
    TrainConfig cfg;
    cfg.lr = get_d(kv, "lr", cfg.lr);
    cfg.batch = static_cast<int>(get_i(kv, "batch", cfg.batch));
    cfg.steps = static_cast<int>(get_i(kv, "steps", cfg.steps));
    cfg.seed = seed;
    cfg.weights.w_ori = get_d(kv, "w_ori", cfg.weights.w_ori);
    cfg.weights.w_trans = get_d(kv, "w_trans", cfg.weights.w_trans);
    cfg.weights.w_vertex = get_d(kv, "w_vertex", cfg.weights.w_vertex);
    cfg.weights.w_smooth = get_d(kv, "w_smooth", cfg.weights.w_smooth);
    cfg.ori_kind = orientation_kind_from_string(get_s(kv, "ori_loss", "chordal"));
    cfg.flip_aug = get_b(kv, "flip_aug", cfg.flip_aug);
    cfg.eval_every = static_cast<int>(get_i(kv, "eval_every", cfg.eval_every));
    cfg.validate();

    std::vector<MotionSample> train_set = read_dataset(data_path);
    std::vector<MotionSample> eval_set;
    if (!eval_path.empty()) eval_set = read_dataset(eval_path);
    if (train_set.empty()) throw InvalidInput("training dataset is empty");

    GmrParams params;
    AdamState adam;
    if (!resume_path.empty()) {
        params = load_checkpoint(resume_path, &adam);
    } else {
        GmrConfig net = desk_config(static_cast<int>(get_i(kv, "layers", 2)),
                                    static_cast<int>(get_i(kv, "hidden", 64)));
        net.input_dim = 4 * static_cast<int>(train_set.front().local.front().joints.size());
        net.validate();
        params = init_params(net, seed);
        adam = AdamState::init(params);
    }

    TrainResult result = train(std::move(params), cfg, train_set, eval_set,
                               BodySkeleton::default_skeleton(), &adam);
    save_checkpoint(out, result.params, &adam);
    const std::string log_path = out + ".log.csv";
    write_file(log_path, result.log_csv);
    std::vector<std::string> outputs{out, log_path};
    if (!eval_set.empty()) {
        MetricReport final_eval = evaluate(result.params, eval_set, BodySkeleton::default_skeleton());
        write_file(out + ".eval.json", final_eval.to_json() + "\n");
        outputs.push_back(out + ".eval.json");
    }
    std::vector<std::string> inputs{config_path, data_path};
    if (!eval_path.empty()) inputs.push_back(eval_path);
    if (!resume_path.empty()) inputs.push_back(resume_path);
    write_manifest(out, make_manifest("train", kv, seed, inputs, outputs));
    std::cout << "trained " << cfg.steps << " steps; checkpoint " << out << "\n";
    return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& input, long index,
              const std::string& out) {
    GmrParams params = load_checkpoint(checkpoint);
    std::vector<MotionSample> data = read_dataset(input);
    if (index < 0 || std::size_t(index) >= data.size()) {
        throw InvalidInput("sample index out of range: " + std::to_string(index));
    }
    const MotionSample& s = data[std::size_t(index)];
    if (4 * static_cast<int>(s.local.front().joints.size()) != params.config.input_dim) {
        throw ShapeMismatch("checkpoint input dimension does not match the dataset");
    }
    // L input frames regress L motions; the trajectory uses the first L-1 so
    // its length equals the input length.
    std::vector<GlobalMotion> motions = gmr_infer(params, s.local);
    motions.pop_back();
    PoseTrajectory traj = accumulate(GlobalPose::identity(), motions, s.fps);
    save_trajectory(out, traj);
    write_manifest(out, make_manifest("infer", {{"index", std::to_string(index)}}, params.seed,
                                      {checkpoint, input}, {out}));
    std::cout << "trajectory of " << traj.poses.size() << " poses written to " << out << "\n";
    return 0;
}

int cmd_camera_sim(const std::string& config_path, const std::string& data_path,
                   const std::string& checkpoint, const std::string& out) {
    KvMap kv = load_config(config_path);
    CameraSpec cam = parse_camera(kv);
    std::vector<MotionSample> data = read_dataset(data_path);
    if (data.empty()) throw InvalidInput("dataset is empty");
    BodySkeleton skel = BodySkeleton::default_skeleton();

    CameraSpec off;  // static reference run
    json j;
    j["camera"] = {{"kind", cam.kind},
                   {"velocity", cam.velocity},
                   {"angular_rate", cam.angular_rate},
                   {"radius", cam.radius}};
    if (cam.has_look_at) j["camera"]["look_at"] = {cam.look_at.x(), cam.look_at.y(), cam.look_at.z()};
    j["baseline_on"] = report_to_json(baseline_metrics(data, cam, skel));
    j["baseline_off"] = report_to_json(baseline_metrics(data, off, skel));
    if (!checkpoint.empty()) {
        GmrParams params = load_checkpoint(checkpoint);
        // the regressor consumes local poses only, which no camera touches;
        // both entries are computed the same way and must stay identical
        j["gmr_on"] = report_to_json(evaluate(params, data, skel));
        j["gmr_off"] = report_to_json(evaluate(params, data, skel));
    }
    write_file(out, j.dump(2) + "\n");
    std::vector<std::string> inputs{config_path, data_path};
    if (!checkpoint.empty()) inputs.push_back(checkpoint);
    write_manifest(out, make_manifest("camera-sim", kv, 0, inputs, {out}));
    std::cout << "camera comparison written to " << out << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& metric_files, const std::string& out) {
    if (metric_files.empty()) throw InvalidInput("no metric files given");
    std::vector<MetricReport> reports;
    for (const auto& p : metric_files) reports.push_back(MetricReport::from_json(read_file(p)));

    std::ostringstream csv;
    csv.precision(17);
    csv << "file," << MetricReport::csv_header() << "\n";
    MetricReport mean;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        csv << metric_files[i] << "," << reports[i].csv_row() << "\n";
        mean.ome_deg += reports[i].ome_deg;
        mean.tme_mm += reports[i].tme_mm;
        mean.vme_mm += reports[i].vme_mm;
        longest = std::max(longest, reports[i].curve_mm.size());
    }
    const double n = double(reports.size());
    mean.ome_deg /= n;
    mean.tme_mm /= n;
    mean.vme_mm /= n;
    csv << "mean," << mean.csv_row() << "\n";
    write_file(out, csv.str());

    // plot-ready accumulated-error curve, averaged over the reports that have one
    if (longest > 0) {
        std::ostringstream curve;
        curve.precision(17);
        curve << "frame,mean_curve_mm\n";
        for (std::size_t f = 0; f < longest; ++f) {
            double sum = 0.0;
            int cnt = 0;
            for (const auto& r : reports) {
                if (f < r.curve_mm.size()) {
                    sum += r.curve_mm[f];
                    ++cnt;
                }
            }
            curve << f << "," << sum / cnt << "\n";
        }
        write_file(out + ".curve.csv", curve.str());
    }
    write_manifest(out, make_manifest("report", {}, 0, metric_files, {out}));
    std::cout << "aggregated " << reports.size() << " reports into " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local-pose to global-motion toolkit"};
    app.require_subcommand(1);

    std::string config_path, out, data_path, eval_path, resume_path, checkpoint, input;
    std::uint64_t seed = 0;
    long index = 0;
    std::vector<std::string> metric_files;

    auto* gen = app.add_subcommand("generate", "produce a procedural motion dataset");
    gen->add_option("--config", config_path, "key=value generator spec");
    gen->add_option("--seed", seed, "master seed");
    gen->add_option("--out", out, "output dataset (JSON lines)")->required();

    auto* tr = app.add_subcommand("train", "train the motion regressor");
    tr->add_option("--config", config_path, "key=value training config");
    tr->add_option("--seed", seed, "init and sampling seed");
    tr->add_option("--data", data_path, "training dataset")->required();
    tr->add_option("--eval-data", eval_path, "held-out dataset for periodic metrics");
    tr->add_option("--resume", resume_path, "checkpoint to continue from");
    tr->add_option("--out", out, "output checkpoint")->required();

    auto* inf = app.add_subcommand("infer", "accumulate a world trajectory from local poses");
    inf->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
    inf->add_option("--input", input, "dataset holding the local pose sequence")->required();
    inf->add_option("--index", index, "sample index within the dataset");
    inf->add_option("--out", out, "output trajectory JSON")->required();

    auto* sim = app.add_subcommand("camera-sim",
                                   "compare the camera-frame baseline against the regressor "
                                   "under a moving camera");
    sim->add_option("--config", config_path, "key=value camera path spec");
    sim->add_option("--data", data_path, "dataset of subject motion")->required();
    sim->add_option("--checkpoint", checkpoint, "optional trained checkpoint");
    sim->add_option("--out", out, "output comparison JSON")->required();

    auto* rep = app.add_subcommand("report", "aggregate metric JSON files into CSV tables");
    rep->add_option("files", metric_files, "metric JSON files");
    rep->add_option("--out", out, "output CSV")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_generate(config_path, seed, out);
        if (tr->parsed()) return cmd_train(config_path, seed, out, data_path, eval_path, resume_path);
        if (inf->parsed()) return cmd_infer(checkpoint, input, index, out);
        if (sim->parsed()) return cmd_camera_sim(config_path, data_path, checkpoint, out);
        if (rep->parsed()) return cmd_report(metric_files, out);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}
