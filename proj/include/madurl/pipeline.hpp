#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "madurl/extractor.hpp"
#include "madurl/kmeans.hpp"
#include "madurl/metrics.hpp"
#include "madurl/zoo.hpp"

namespace madurl {

// Resolved run settings: one root seed, one provider mode, explicit paths.
// Every command writes the resolved snapshot next to its outputs so a rerun
// needs nothing but this file.
struct RunConfig {
    std::uint64_t seed = 42;
    std::string provider_mode = "replay";
    std::string fixture_dir = "fixtures";
    std::string today = "2022-01-01";
    DataPaths paths;

    std::size_t synth_n_per_class = 500;

    std::string model_kind = "regularized_boost";
    TrainOptions train;
    double train_fraction = 0.7;

    int folds = 10;

    int cluster_k_lo = 1;
    int cluster_k_hi = 9;
    int cluster_restarts = 5;
    int cluster_max_iter = 100;

    // Tree ensembles are piecewise constant, so the pipeline default probes
    // wider and steps larger than the generic AttackConfig defaults.
    AttackConfig attack = [] {
        AttackConfig c;
        c.probe_k = 0.5;
        c.step_h = 0.05;
        return c;
    }();
    std::size_t attack_samples = 200;

    std::vector<int> grid = {1, 100, 200, 500, 1000, 1500};
    int grid_folds = 5;
    int grid_max_depth = 4;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
};

struct CommandIO {
    std::vector<std::string> inputs;
    std::string out_dir = "out";
    std::string model_path;  // attack: model.json written by train
};

// Each command runs one module pipeline and writes its documented outputs
// plus config.resolved.json and manifest.json into `io.out_dir`.
void cmd_synth(const RunConfig& cfg, const CommandIO& io);
void cmd_profile(const RunConfig& cfg, const CommandIO& io);
void cmd_extract(const RunConfig& cfg, const CommandIO& io);
void cmd_train(const RunConfig& cfg, const CommandIO& io, bool run_grid = false);
void cmd_eval_matched(const RunConfig& cfg, const CommandIO& io);
void cmd_eval_mismatched(const RunConfig& cfg, const CommandIO& io);
void cmd_cluster(const RunConfig& cfg, const CommandIO& io);
void cmd_attack(const RunConfig& cfg, const CommandIO& io);

}  // namespace madurl
