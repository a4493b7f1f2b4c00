#pragma once

#include <map>
#include <string>

#include "gmr/rigid_motion.hpp"
#include "gmr/trainer.hpp"

namespace gmr {

/// Checkpoint layout: one JSON header line (config, seed, step, tensor names
/// and shapes in canonical order), '\n', then a little-endian f64 blob with
/// each tensor's values row-major in header order. When optimizer state is
/// included, the blob is followed by each tensor's Adam first then second
/// moments in the same order. Round-trips byte-exactly.
void save_checkpoint(const std::string& path, const GmrParams& params,
                     const AdamState* adam = nullptr);
/// If adam is non-null and the file carries optimizer state, restores it;
/// otherwise leaves *adam freshly initialized for the loaded parameters.
GmrParams load_checkpoint(const std::string& path, AdamState* adam = nullptr);

/// Trajectory file: JSON {version, fps, poses: [{R: [9 row-major], T: [3]}]}.
void save_trajectory(const std::string& path, const PoseTrajectory& traj);
PoseTrajectory load_trajectory(const std::string& path);

/// Reproducibility manifest written next to every artifact (path + ".manifest.json").
struct RunManifest {
    std::string command;
    std::string config_hash;  // FNV-1a hex of the resolved configuration text
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string version = "gmr 0.1.0";
};

void write_manifest(const std::string& artifact_path, const RunManifest& manifest);

/// FNV-1a 64-bit hash, hex-encoded.
std::string fnv1a_hex(const std::string& text);

/// Flat key=value config file: '#' comments, blank lines ignored.
std::map<std::string, std::string> read_kv_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace gmr
