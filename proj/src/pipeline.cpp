#include "madurl/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

namespace madurl {

using nlohmann::json;
namespace fs = std::filesystem;

nlohmann::json RunConfig::to_json() const {
    return json{
        {"seed", seed},
        {"providers", {{"mode", provider_mode}, {"fixture_dir", fixture_dir}, {"today", today}}},
        {"paths",
         {{"tld_snapshot", paths.tld_snapshot},
          {"dictionary", paths.dictionary},
          {"sensitive_words", paths.sensitive_words},
          {"suspicious_domains", paths.suspicious_domains},
          {"homoglyphs", paths.homoglyphs}}},
        {"synth", {{"n_per_class", synth_n_per_class}}},
        {"train",
         {{"kind", model_kind},
          {"n_estimators", train.n_estimators},
          {"max_depth", train.max_depth},
          {"base_depth", train.base_depth},
          {"boost_depth", train.boost_depth},
          {"learning_rate", train.learning_rate},
          {"lambda", train.lambda},
          {"gamma", train.gamma},
          {"train_fraction", train_fraction}}},
        {"eval", {{"folds", folds}}},
        {"cluster",
         {{"k_lo", cluster_k_lo},
          {"k_hi", cluster_k_hi},
          {"restarts", cluster_restarts},
          {"max_iter", cluster_max_iter}}},
        {"attack",
         {{"mode", attack.mode == AttackMode::Targeted ? "targeted" : "untargeted"},
          {"rho", attack.rho},
          {"probe_k", attack.probe_k},
          {"step_h", attack.step_h},
          {"budget", attack.budget},
          {"box_delta", attack.box_delta},
          {"samples", attack_samples}}},
        {"grid", {{"n_estimators", grid}, {"folds", grid_folds}, {"max_depth", grid_max_depth}}},
    };
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    if (j.contains("providers")) {
        const auto& p = j["providers"];
        c.provider_mode = p.value("mode", c.provider_mode);
        c.fixture_dir = p.value("fixture_dir", c.fixture_dir);
        c.today = p.value("today", c.today);
    }
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        c.paths.tld_snapshot = p.value("tld_snapshot", c.paths.tld_snapshot);
        c.paths.dictionary = p.value("dictionary", c.paths.dictionary);
        c.paths.sensitive_words = p.value("sensitive_words", c.paths.sensitive_words);
        c.paths.suspicious_domains = p.value("suspicious_domains", c.paths.suspicious_domains);
        c.paths.homoglyphs = p.value("homoglyphs", c.paths.homoglyphs);
    }
    if (j.contains("synth")) c.synth_n_per_class = j["synth"].value("n_per_class", c.synth_n_per_class);
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.model_kind = t.value("kind", c.model_kind);
        c.train.n_estimators = t.value("n_estimators", c.train.n_estimators);
        c.train.max_depth = t.value("max_depth", c.train.max_depth);
        c.train.base_depth = t.value("base_depth", c.train.base_depth);
        c.train.boost_depth = t.value("boost_depth", c.train.boost_depth);
        c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
        c.train.lambda = t.value("lambda", c.train.lambda);
        c.train.gamma = t.value("gamma", c.train.gamma);
        c.train_fraction = t.value("train_fraction", c.train_fraction);
    }
    if (j.contains("eval")) c.folds = j["eval"].value("folds", c.folds);
    if (j.contains("cluster")) {
        const auto& k = j["cluster"];
        c.cluster_k_lo = k.value("k_lo", c.cluster_k_lo);
        c.cluster_k_hi = k.value("k_hi", c.cluster_k_hi);
        c.cluster_restarts = k.value("restarts", c.cluster_restarts);
        c.cluster_max_iter = k.value("max_iter", c.cluster_max_iter);
    }
    if (j.contains("attack")) {
        const auto& a = j["attack"];
        c.attack.mode = a.value("mode", std::string("untargeted")) == "targeted"
                            ? AttackMode::Targeted
                            : AttackMode::Untargeted;
        c.attack.rho = a.value("rho", c.attack.rho);
        c.attack.probe_k = a.value("probe_k", c.attack.probe_k);
        c.attack.step_h = a.value("step_h", c.attack.step_h);
        c.attack.budget = a.value("budget", c.attack.budget);
        c.attack.box_delta = a.value("box_delta", c.attack.box_delta);
        c.attack_samples = a.value("samples", c.attack_samples);
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        c.grid = g.value("n_estimators", c.grid);
        c.grid_folds = g.value("folds", c.grid_folds);
        c.grid_max_depth = g.value("max_depth", c.grid_max_depth);
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    return from_json(json::parse(in));
}

namespace {

using Clock = std::chrono::steady_clock;

// Accumulates step timings and the output list, then writes the resolved
// config + manifest; every command funnels through one of these.
class RunContext {
  public:
    RunContext(const RunConfig& cfg, const CommandIO& io, std::string command)
        : cfg_(cfg), io_(io), command_(std::move(command)), started_(Clock::now()) {
        fs::create_directories(io_.out_dir);
    }

    std::string out_path(const std::string& name) {
        outputs_.push_back(name);
        return (fs::path(io_.out_dir) / name).string();
    }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream out(out_path(name));
        if (!out) throw Error("cannot write output: " + name);
        out << text;
    }

    void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

    void step_done(const std::string& name) {
        const auto now = Clock::now();
        timings_.push_back({name, std::chrono::duration<double, std::milli>(now - last_).count()});
        last_ = now;
    }

    void finish() {
        const json resolved = cfg_.to_json();
        write_json("config.resolved.json", resolved);
        json steps = json::array();
        for (const auto& [name, ms] : timings_) steps.push_back({{"step", name}, {"ms", ms}});
        const double total =
            std::chrono::duration<double, std::milli>(Clock::now() - started_).count();
        write_json("manifest.json", json{{"command", command_},
                                         {"seed", cfg_.seed},
                                         {"config_hash", fnv1a64(resolved.dump())},
                                         {"inputs", io_.inputs},
                                         {"outputs", outputs_},
                                         {"steps", steps},
                                         {"total_ms", total}});
    }

  private:
    const RunConfig& cfg_;
    const CommandIO& io_;
    std::string command_;
    Clock::time_point started_;
    Clock::time_point last_ = Clock::now();
    std::vector<std::pair<std::string, double>> timings_;
    std::vector<std::string> outputs_;
};

ProviderSuite open_providers(const RunConfig& cfg) {
    const ProviderMode mode = provider_mode_from_string(cfg.provider_mode);
    if (mode == ProviderMode::Replay && !fs::is_directory(cfg.fixture_dir))
        throw Error("replay mode requires an existing fixture directory: " + cfg.fixture_dir);
    if (mode == ProviderMode::Record) fs::create_directories(cfg.fixture_dir);
    return make_provider_suite(mode, cfg.fixture_dir);
}

std::int64_t resolve_today(const RunConfig& cfg) {
    auto day = parse_epoch_day(cfg.today);
    if (!day) throw Error("config today is not YYYY-MM-DD: " + cfg.today);
    return *day;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

LabeledDataset load_features_input(const std::string& path) {
    LabeledDataset d = read_features_csv(path);
    d.name = stem_of(path);
    return d;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "synth");
    const LabeledDataset d = synthesize_corpus(cfg.synth_n_per_class, cfg.seed);
    ctx.step_done("synthesize");
    write_csv(d, ctx.out_path("corpus.csv"));
    ctx.step_done("write");
    ctx.finish();
}

void cmd_profile(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "profile");
    if (io.inputs.empty()) throw Error("profile: need an input csv");
    const LabeledDataset d = ingest_csv(io.inputs[0]);
    ctx.step_done("ingest");
    const ProfileReport rep = profile(d);
    ctx.step_done("profile");
    ctx.write_json("profile.json", rep.to_json());
    ctx.write_text("histogram_benign.csv", ProfileReport::histogram_csv(rep.benign));
    ctx.write_text("histogram_malicious.csv", ProfileReport::histogram_csv(rep.malicious));
    ctx.finish();
}

void cmd_extract(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "extract");
    if (io.inputs.empty()) throw Error("extract: need at least one input csv");
    const ExtractorResources res = ExtractorResources::load(cfg.paths);
    const ProviderSuite providers = open_providers(cfg);
    const std::int64_t today = resolve_today(cfg);
    ctx.step_done("load-resources");

    // The first input acts as the training corpus for the categorical
    // encoders and n-gram models; the same fit is applied to every input so
    // cross-dataset feature spaces line up.
    std::vector<LabeledDataset> datasets;
    for (const auto& input : io.inputs)
        datasets.push_back(preprocess(ingest_csv(input), cfg.seed));
    ctx.step_done("ingest");

    const FeatureExtractor fx = FeatureExtractor::fit(datasets[0], res);
    ctx.step_done("fit");

    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const LabeledDataset out = fx.extract_all(datasets[i], providers, today);
        write_features_csv(out, ctx.out_path("features_" + stem_of(io.inputs[i]) + ".csv"));
    }
    providers.flush();
    ctx.step_done("extract");
    ctx.write_json("encoders.json", fx.encoders_to_json());
    ctx.finish();
}

void cmd_train(const RunConfig& cfg, const CommandIO& io, bool run_grid) {
    RunContext ctx(cfg, io, run_grid ? "train-grid" : "train");
    if (io.inputs.empty()) throw Error("train: need a features csv");
    const LabeledDataset d = load_features_input(io.inputs[0]);
    const EnsembleKind kind = ensemble_kind_from_string(cfg.model_kind);
    ctx.step_done("load");

    auto [train, test] = split(d, cfg.train_fraction, derive_seed(cfg.seed, "train/split"));
    const ScalerState scaler = ScalerState::fit(train);
    scaler.apply_in_place(train);
    scaler.apply_in_place(test);
    ctx.step_done("scale");

    TrainOptions opts = cfg.train;
    opts.seed = derive_seed(cfg.seed, "train/model");

    EnsembleModel model;
    if (run_grid) {
        TrainOptions base = opts;
        base.max_depth = cfg.grid_max_depth;
        const GridSearchResult res =
            grid_search(train, kind, cfg.grid, cfg.grid_folds, base, cfg.seed);
        std::string table = "n_estimators,mean_accuracy\n";
        for (const auto& row : res.table)
            table += std::to_string(row.n_estimators) + "," + fmt_double(row.mean_accuracy) + "\n";
        ctx.write_text("grid.csv", table);
        ctx.write_json("grid.json", json{{"best_n_estimators", res.best_n_estimators},
                                         {"best_accuracy", res.best_accuracy}});
        model = res.best_model;
        ctx.step_done("grid-search");
    } else {
        model = train_ensemble(kind, train, opts);
        ctx.step_done("fit-model");
    }

    const Matrix xt = to_matrix(test);
    const auto y = labels_of(test);
    std::vector<int> pred(xt.n_rows);
    const auto probs = predict_proba_batch(model, xt);
    for (std::size_t i = 0; i < xt.n_rows; ++i) pred[i] = probs[i][1] > probs[i][0] ? 1 : 0;
    const MetricsResult m = metrics(confusion_from_predictions(pred, y));
    ctx.step_done("holdout-eval");

    model.save(ctx.out_path("model.json"));
    ctx.write_json("scaler.json", scaler.to_json());
    ctx.write_json("train_report.json",
                   json{{"kind", cfg.model_kind},
                        {"train_rows", train.rows.size()},
                        {"test_rows", test.rows.size()},
                        {"test_accuracy", m.accuracy_pct},
                        {"test_precision", m.precision_pct ? json(*m.precision_pct) : json()},
                        {"test_fpr", m.fpr ? json(*m.fpr) : json()},
                        {"test_fnr", m.fnr ? json(*m.fnr) : json()}});
    ctx.finish();
}

void cmd_eval_matched(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "eval-matched");
    if (io.inputs.empty()) throw Error("eval-matched: need a features csv");
    const LabeledDataset d = load_features_input(io.inputs[0]);
    const EnsembleKind kind = ensemble_kind_from_string(cfg.model_kind);
    ctx.step_done("load");

    const EvalReport rep = eval_matched(d, kind, cfg.folds, cfg.seed, cfg.train);
    ctx.step_done("evaluate");

    ctx.write_text("report.csv", EvalReport::csv_header() + "\n" + rep.csv_row() + "\n");
    ctx.write_json("report.json", rep.to_json());
    ctx.finish();
}

void cmd_eval_mismatched(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "eval-mismatched");
    if (io.inputs.size() < 2) throw Error("eval-mismatched: need >= 2 features csvs");
    std::vector<LabeledDataset> datasets;
    for (const auto& input : io.inputs) datasets.push_back(load_features_input(input));
    const EnsembleKind kind = ensemble_kind_from_string(cfg.model_kind);
    ctx.step_done("load");

    const auto reports = eval_mismatched(datasets, kind, cfg.seed, cfg.train);
    ctx.step_done("evaluate");

    std::string csv = EvalReport::csv_header() + "\n";
    json jreports = json::array();
    for (const auto& r : reports) {
        csv += r.csv_row() + "\n";
        jreports.push_back(r.to_json());
    }
    ctx.write_text("reports.csv", csv);
    ctx.write_json("reports.json", jreports);
    ctx.finish();
}

void cmd_cluster(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "cluster");
    if (io.inputs.empty()) throw Error("cluster: need a features csv");
    LabeledDataset d = load_features_input(io.inputs[0]);
    const ScalerState scaler = ScalerState::fit(d);
    scaler.apply_in_place(d);
    const Matrix x = to_matrix(d);
    ctx.step_done("load");

    const ElbowResult elbow = elbow_scan(x, cfg.cluster_k_lo, cfg.cluster_k_hi,
                                         derive_seed(cfg.seed, "cluster/elbow"),
                                         cfg.cluster_restarts, cfg.cluster_max_iter);
    ctx.step_done("elbow");

    const KMeansResult km = kmeans(x, elbow.chosen_k, derive_seed(cfg.seed, "cluster/final"),
                                   cfg.cluster_max_iter, cfg.cluster_restarts);
    const auto points = project_2d(x);
    ctx.step_done("cluster");

    std::string curve = "k,distortion\n";
    for (std::size_t i = 0; i < elbow.ks.size(); ++i)
        curve += std::to_string(elbow.ks[i]) + "," + fmt_double(elbow.distortions[i]) + "\n";
    ctx.write_text("elbow.csv", curve);

    std::string scatter = "x,y,cluster,label\n";
    for (std::size_t i = 0; i < points.size(); ++i)
        scatter += fmt_double(points[i][0]) + "," + fmt_double(points[i][1]) + "," +
                   std::to_string(km.assignments[i]) + "," + std::to_string(d.rows[i].label) + "\n";
    ctx.write_text("scatter.csv", scatter);

    ctx.write_json("cluster.json", json{{"chosen_k", elbow.chosen_k},
                                        {"distortion", km.distortion},
                                        {"iterations", km.iterations}});
    ctx.finish();
}

void cmd_attack(const RunConfig& cfg, const CommandIO& io) {
    RunContext ctx(cfg, io, "attack");
    if (io.inputs.empty()) throw Error("attack: need a features csv");
    if (io.model_path.empty()) throw Error("attack: need --model pointing at model.json");
    LabeledDataset d = load_features_input(io.inputs[0]);
    const EnsembleModel model = EnsembleModel::load(io.model_path);

    const fs::path scaler_path = fs::path(io.model_path).parent_path() / "scaler.json";
    std::ifstream sin(scaler_path);
    if (!sin) throw Error("attack: missing scaler next to model: " + scaler_path.string());
    const ScalerState scaler = ScalerState::from_json(json::parse(sin));
    scaler.apply_in_place(d);
    ctx.step_done("load");

    // Seeded sample of the requested row count.
    LabeledDataset sample;
    sample.name = d.name;
    std::vector<std::size_t> idx(d.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(derive_seed(cfg.seed, "attack/rows"));
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size() && sample.rows.size() < cfg.attack_samples; ++i)
        sample.rows.push_back(d.rows[idx[i]]);

    AttackConfig acfg = cfg.attack;
    acfg.seed = derive_seed(cfg.seed, "attack/run");
    const AttackEvalResult res = attack_accuracy_rate(model, sample, acfg);
    ctx.step_done("attack");

    std::string csv = "dataset,confidence,model_kind,attack_accuracy_rate,clean_accuracy,"
                      "attack_success_rate\n";
    csv += d.name + "," + fmt_double(acfg.rho) + "," + to_string(model.kind) + "," +
           fmt_double(res.robust_accuracy_pct) + "," + fmt_double(res.clean_accuracy_pct) + "," +
           fmt_double(res.attack_success_rate_pct) + "\n";
    ctx.write_text("attack_report.csv", csv);

    std::string jsonl;
    for (const auto& out : res.outcomes) {
        jsonl += json{{"queries", out.queries},
                      {"l2_distortion", out.l2_distortion},
                      {"success", out.success},
                      {"final_loss", out.final_loss}}
                     .dump() +
                 "\n";
    }
    ctx.write_text("samples.jsonl", jsonl);
    ctx.write_json("attack.json", json{{"total", res.total},
                                       {"attacked", res.attacked},
                                       {"flipped", res.flipped},
                                       {"clean_accuracy", res.clean_accuracy_pct},
                                       {"robust_accuracy", res.robust_accuracy_pct},
                                       {"attack_success_rate", res.attack_success_rate_pct},
                                       {"total_queries", res.total_queries}});
    ctx.finish();
}

}  // namespace madurl
