#include "gmr/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <json.hpp>
#include <sstream>

namespace gmr {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blob assumes a little-endian host");

namespace {

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    }
}

void read_matrix(std::ifstream& in, Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v;
            if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
                throw InvalidInput("checkpoint blob truncated");
            }
            m(i, j) = v;
        }
    }
}

}  // namespace

void save_checkpoint(const std::string& path, const GmrParams& params, const AdamState* adam) {
    nlohmann::json header;
    header["version"] = 1;
    header["config"] = {{"input_dim", params.config.input_dim},
                        {"layers", params.config.layers},
                        {"hidden", params.config.hidden},
                        {"proj_dim", params.config.proj_dim},
                        {"output_dim", params.config.output_dim}};
    header["seed"] = params.seed;
    header["step"] = params.step;
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& t : params.tensors) {
        tensors.push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
    }
    header["tensors"] = std::move(tensors);
    if (adam) {
        if (adam->m.size() != params.tensors.size() || adam->v.size() != params.tensors.size()) {
            throw ShapeMismatch("optimizer state does not match the parameter tensors");
        }
        header["adam"] = {{"step", adam->step},
                          {"beta1", adam->beta1},
                          {"beta2", adam->beta2},
                          {"eps", adam->eps}};
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open checkpoint for writing: " + path);
    out << header.dump() << "\n";
    for (const auto& t : params.tensors) write_matrix(out, t.value);
    if (adam) {
        for (const auto& m : adam->m) write_matrix(out, m);
        for (const auto& v : adam->v) write_matrix(out, v);
    }
}

GmrParams load_checkpoint(const std::string& path, AdamState* adam) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open checkpoint: " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw InvalidInput("checkpoint missing header");
    nlohmann::json header = nlohmann::json::parse(header_line);

    GmrParams p;
    const auto& c = header.at("config");
    p.config.input_dim = c.at("input_dim").get<int>();
    p.config.layers = c.at("layers").get<int>();
    p.config.hidden = c.at("hidden").get<int>();
    p.config.proj_dim = c.at("proj_dim").get<int>();
    p.config.output_dim = c.at("output_dim").get<int>();
    p.seed = header.at("seed").get<std::uint64_t>();
    p.step = header.at("step").get<std::int64_t>();

    for (const auto& t : header.at("tensors")) {
        Tensor tensor;
        tensor.name = t.at("name").get<std::string>();
        tensor.value.resize(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
        read_matrix(in, tensor.value);
        p.tensors.push_back(std::move(tensor));
    }
    if (adam) {
        *adam = AdamState::init(p);
        if (header.contains("adam")) {
            const auto& a = header.at("adam");
            adam->step = a.at("step").get<std::int64_t>();
            adam->beta1 = a.at("beta1").get<double>();
            adam->beta2 = a.at("beta2").get<double>();
            adam->eps = a.at("eps").get<double>();
            for (auto& m : adam->m) read_matrix(in, m);
            for (auto& v : adam->v) read_matrix(in, v);
        }
    }
    return p;
}

void save_trajectory(const std::string& path, const PoseTrajectory& traj) {
    nlohmann::json j;
    j["version"] = 1;
    j["fps"] = traj.fps;
    nlohmann::json poses = nlohmann::json::array();
    for (const auto& g : traj.poses) {
        std::vector<double> r(9);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) r[3 * a + b] = g.R(a, b);
        poses.push_back({{"R", r}, {"T", {g.T.x(), g.T.y(), g.T.z()}}});
    }
    j["poses"] = std::move(poses);
    write_file(path, j.dump() + "\n");
}

PoseTrajectory load_trajectory(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    PoseTrajectory traj;
    traj.fps = j.at("fps").get<double>();
    for (const auto& p : j.at("poses")) {
        auto r = p.at("R").get<std::vector<double>>();
        auto t = p.at("T").get<std::vector<double>>();
        GlobalPose g;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) g.R(a, b) = r[3 * a + b];
        g.T = Eigen::Vector3d(t[0], t[1], t[2]);
        traj.poses.push_back(g);
    }
    return traj;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void write_manifest(const std::string& artifact_path, const RunManifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["config_hash"] = manifest.config_hash;
    j["seed"] = manifest.seed;
    j["inputs"] = manifest.inputs;
    j["outputs"] = manifest.outputs;
    j["version"] = manifest.version;
    write_file(artifact_path + ".manifest.json", j.dump(2) + "\n");
}

std::map<std::string, std::string> read_kv_config(const std::string& path) {
    std::istringstream in(read_file(path));
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput("bad config line: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open file for writing: " + path);
    out << text;
}

}  // namespace gmr
