#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "madurl/pipeline.hpp"

#ifndef MADURL_DATA_DIR
#define MADURL_DATA_DIR "data"
#endif

using namespace madurl;

int main(int argc, char** argv) {
    CLI::App app{"malicious advertisement URL detection, clustering and ZOO attack toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", model_path, providers_flag;
    std::vector<std::string> inputs;
    std::uint64_t seed_flag = 0;
    bool seed_set = false, grid = false;

    app.add_option("--config", config_path, "JSON config file; flags override its keys");
    app.add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t s) { seed_flag = s; seed_set = true; }, "root seed")
        ->expected(1);
    app.add_option("--providers", providers_flag, "provider mode: live|record|replay");
    app.add_option("--out", out_dir, "output directory");

    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    auto* profile = app.add_subcommand("profile", "statistical profile of a url,label csv");
    auto* extract = app.add_subcommand("extract", "extract 89-slot feature vectors");
    auto* train = app.add_subcommand("train", "train one ensemble on a features csv");
    auto* eval_m = app.add_subcommand("eval-matched", "k-fold cross validation on one dataset");
    auto* eval_x = app.add_subcommand("eval-mismatched", "ordered train/test over many datasets");
    auto* cluster = app.add_subcommand("cluster", "k-means + elbow over feature vectors");
    auto* attack = app.add_subcommand("attack", "ZOO attack against a trained model");

    for (auto* cmd : {profile, extract, train, eval_m, eval_x, cluster, attack})
        cmd->add_option("--in", inputs, "input csv(s)")->required();
    train->add_flag("--grid", grid, "sweep the n_estimators grid before the final fit");
    attack->add_option("--model", model_path, "model.json produced by train")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::load(config_path);
        if (seed_set) cfg.seed = seed_flag;
        if (!providers_flag.empty()) cfg.provider_mode = providers_flag;

        // Any path the config leaves blank falls back to the bundled data dir.
        const std::string data_dir = MADURL_DATA_DIR;
        auto fallback = [](std::string& p, const std::string& dflt) {
            if (p.empty()) p = dflt;
        };
        fallback(cfg.paths.tld_snapshot, data_dir + "/tld_snapshot.txt");
        fallback(cfg.paths.dictionary, data_dir + "/word_pos.tsv");
        fallback(cfg.paths.sensitive_words, data_dir + "/sensitive_words.txt");
        fallback(cfg.paths.suspicious_domains, data_dir + "/suspicious_domains.txt");
        fallback(cfg.paths.homoglyphs, data_dir + "/homoglyphs.txt");

        CommandIO io;
        io.inputs = inputs;
        io.out_dir = out_dir;
        io.model_path = model_path;

        if (synth->parsed()) cmd_synth(cfg, io);
        else if (profile->parsed()) cmd_profile(cfg, io);
        else if (extract->parsed()) cmd_extract(cfg, io);
        else if (train->parsed()) cmd_train(cfg, io, grid);
        else if (eval_m->parsed()) cmd_eval_matched(cfg, io);
        else if (eval_x->parsed()) cmd_eval_mismatched(cfg, io);
        else if (cluster->parsed()) cmd_cluster(cfg, io);
        else if (attack->parsed()) cmd_attack(cfg, io);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
