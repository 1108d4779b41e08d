#include "madurl/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "madurl/parallel.hpp"

namespace madurl {

void AttackConfig::validate() const {
    if (!(rho >= 0)) throw Error("attack: rho must be >= 0");
    if (!(probe_k > 0)) throw Error("attack: probe_k must be > 0");
    if (!(step_h > 0)) throw Error("attack: step_h must be > 0");
    if (!(alpha1 > 0 && alpha1 < 1) || !(alpha2 > 0 && alpha2 < 1))
        throw Error("attack: alpha1, alpha2 must lie in (0,1)");
    if (!(epsilon > 0)) throw Error("attack: epsilon must be > 0");
    if (budget < 0) throw Error("attack: budget must be >= 0");
    if (!(box_delta > 0)) throw Error("attack: box_delta must be > 0");
}

namespace {

double max_log_excluding(std::span<const double> probs, int excluded) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < probs.size(); ++j)
        if (static_cast<int>(j) != excluded) best = std::max(best, std::log(probs[j]));
    return best;
}

}  // namespace

double loss_targeted(std::span<const double> probs, int target, double rho) {
    if (target < 0 || static_cast<std::size_t>(target) >= probs.size()) throw InvalidClass{};
    return std::max(max_log_excluding(probs, target) - std::log(probs[static_cast<std::size_t>(target)]),
                    -rho);
}

double loss_untargeted(std::span<const double> probs, int original, double rho) {
    if (original < 0 || static_cast<std::size_t>(original) >= probs.size()) throw InvalidClass{};
    return std::max(std::log(probs[static_cast<std::size_t>(original)]) -
                        max_log_excluding(probs, original),
                    -rho);
}

double estimate_gradient(const ScalarLoss& oracle, std::vector<double>& a, std::size_t j,
                         double probe_k) {
    if (!(probe_k > 0)) throw Error("estimate_gradient: probe_k must be > 0");
    const double saved = a[j];
    a[j] = saved + probe_k;
    const double up = oracle(a);
    a[j] = saved - probe_k;
    const double down = oracle(a);
    a[j] = saved;
    return (up - down) / (2.0 * probe_k);
}

double estimate_hessian(const ScalarLoss& oracle, std::vector<double>& a, std::size_t j,
                        double probe_k) {
    if (!(probe_k > 0)) throw Error("estimate_hessian: probe_k must be > 0");
    const double saved = a[j];
    const double center = oracle(a);
    a[j] = saved + probe_k;
    const double up = oracle(a);
    a[j] = saved - probe_k;
    const double down = oracle(a);
    a[j] = saved;
    return (up - 2.0 * center + down) / (probe_k * probe_k);
}

double adam_coordinate_step(AdamState& state, std::size_t j, double g, const AttackConfig& cfg) {
    state.update_count[j] += 1;
    state.first_moment[j] = cfg.alpha1 * state.first_moment[j] + (1.0 - cfg.alpha1) * g;
    state.second_moment[j] = cfg.alpha2 * state.second_moment[j] + (1.0 - cfg.alpha2) * g * g;
    const double u = static_cast<double>(state.update_count[j]);
    const double n_hat = state.first_moment[j] / (1.0 - std::pow(cfg.alpha1, u));
    const double tau_hat = state.second_moment[j] / (1.0 - std::pow(cfg.alpha2, u));
    return -cfg.step_h * n_hat / (std::sqrt(tau_hat) + cfg.epsilon);
}

namespace {

struct AttackLoop {
    const LossOracle& oracle;
    const AttackConfig& cfg;
    const ClassCheck& class_ok;
    AttackOutcome out;
    std::vector<double> a, lo, hi;
    long long queries = 0;

    AttackLoop(const LossOracle& o, std::span<const double> a0, const AttackConfig& c,
               const ClassCheck& ck)
        : oracle(o), cfg(c), class_ok(ck), a(a0.begin(), a0.end()) {
        cfg.validate();
        out.original.assign(a0.begin(), a0.end());
        lo.resize(a.size());
        hi.resize(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            lo[j] = a[j] - cfg.box_delta;
            hi[j] = a[j] + cfg.box_delta;
        }
    }

    LossEval query(std::span<const double> v) {
        ++queries;
        return oracle(v);
    }
    double query_scalar(std::span<const double> v) { return query(v).loss; }

    bool succeeded(const LossEval& ev) const {
        if (ev.loss > -cfg.rho) return false;
        if (class_ok && ev.predicted >= 0) return class_ok(ev.predicted);
        return true;
    }

    AttackOutcome finish(const LossEval& last) {
        out.adversarial = a;
        out.queries = queries;
        out.final_loss = last.loss;
        out.success = succeeded(last);
        double l2 = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double d = a[j] - out.original[j];
            l2 += d * d;
        }
        out.l2_distortion = std::sqrt(l2);
        return std::move(out);
    }
};

}  // namespace

AttackOutcome attack_scd(const LossOracle& oracle, std::span<const double> a0,
                         const AttackConfig& cfg, const ClassCheck& class_ok) {
    AttackLoop loop(oracle, a0, cfg, class_ok);
    Rng rng(derive_seed(cfg.seed, "scd"));

    LossEval center = loop.query(loop.a);
    loop.out.loss_trace.push_back(center.loss);
    if (loop.succeeded(center)) return loop.finish(center);

    const std::size_t m = loop.a.size();
    for (long long l = 0; l < cfg.budget; ++l) {
        const std::size_t j = rng.uniform_int(m);
        const double saved = loop.a[j];
        loop.a[j] = saved + cfg.probe_k;
        const double up = loop.query_scalar(loop.a);
        loop.a[j] = saved - cfg.probe_k;
        const double down = loop.query_scalar(loop.a);
        loop.a[j] = saved;

        const double g = (up - down) / (2.0 * cfg.probe_k);
        const double h = (up - 2.0 * center.loss + down) / (cfg.probe_k * cfg.probe_k);
        // Guarded Newton: the second-order step only applies on locally
        // convex slices; otherwise fall back to a plain gradient step.
        const double eta = h > 0.0 ? -g / h : -cfg.step_h * g;
        loop.a[j] = std::clamp(saved + eta, loop.lo[j], loop.hi[j]);

        center = loop.query(loop.a);
        ++loop.out.coordinate_updates;
        loop.out.loss_trace.push_back(center.loss);
        if (loop.succeeded(center)) break;
    }
    return loop.finish(center);
}

AttackOutcome attack_adam_scd(const LossOracle& oracle, std::span<const double> a0,
                              const AttackConfig& cfg, const ClassCheck& class_ok) {
    AttackLoop loop(oracle, a0, cfg, class_ok);
    Rng rng(derive_seed(cfg.seed, "adam_scd"));
    AdamState state(loop.a.size());

    LossEval center = loop.query(loop.a);
    loop.out.loss_trace.push_back(center.loss);
    if (loop.succeeded(center)) return loop.finish(center);

    const std::size_t m = loop.a.size();
    for (long long l = 0; l < cfg.budget; ++l) {
        const std::size_t j = rng.uniform_int(m);
        const double saved = loop.a[j];
        loop.a[j] = saved + cfg.probe_k;
        const double up = loop.query_scalar(loop.a);
        loop.a[j] = saved - cfg.probe_k;
        const double down = loop.query_scalar(loop.a);
        loop.a[j] = saved;

        const double g = (up - down) / (2.0 * cfg.probe_k);
        const double eta = adam_coordinate_step(state, j, g, cfg);
        loop.a[j] = std::clamp(saved + eta, loop.lo[j], loop.hi[j]);

        center = loop.query(loop.a);
        ++loop.out.coordinate_updates;
        loop.out.loss_trace.push_back(center.loss);
        if (loop.succeeded(center)) break;
    }
    return loop.finish(center);
}

LossOracle make_model_loss_oracle(const EnsembleModel& model, AttackMode mode, int class_index,
                                  double rho) {
    return [&model, mode, class_index, rho](std::span<const double> v) {
        const auto probs = model.predict_proba(v);
        LossEval ev;
        ev.predicted = probs[1] > probs[0] ? 1 : 0;
        ev.loss = mode == AttackMode::Targeted ? loss_targeted(probs, class_index, rho)
                                               : loss_untargeted(probs, class_index, rho);
        return ev;
    };
}

AttackEvalResult attack_accuracy_rate(const EnsembleModel& model, const LabeledDataset& test,
                                      const AttackConfig& cfg) {
    const Matrix x = to_matrix(test);
    const std::vector<int> y = labels_of(test);

    AttackEvalResult res;
    res.total = x.n_rows;
    if (res.total == 0) return res;

    std::vector<int> clean_pred(x.n_rows);
    parallel_for(x.n_rows, [&](std::size_t i) { clean_pred[i] = model.predict(x.row(i)); });

    std::vector<std::size_t> attacked_rows;
    for (std::size_t i = 0; i < x.n_rows; ++i)
        if (clean_pred[i] == y[i]) attacked_rows.push_back(i);
    res.attacked = attacked_rows.size();
    res.clean_accuracy_pct =
        100.0 * static_cast<double>(res.attacked) / static_cast<double>(res.total);

    res.outcomes.resize(attacked_rows.size());
    parallel_for(attacked_rows.size(), [&](std::size_t idx) {
        const std::size_t i = attacked_rows[idx];
        AttackConfig sample_cfg = cfg;
        sample_cfg.seed = derive_seed(cfg.seed, "attack/sample", i);
        const int b0 = clean_pred[i];
        const auto oracle = make_model_loss_oracle(model, AttackMode::Untargeted, b0, cfg.rho);
        res.outcomes[idx] = attack_adam_scd(oracle, x.row(i), sample_cfg,
                                            [b0](int pred) { return pred != b0; });
    });

    std::size_t still_correct = 0;
    for (std::size_t idx = 0; idx < attacked_rows.size(); ++idx) {
        const std::size_t i = attacked_rows[idx];
        res.total_queries += res.outcomes[idx].queries;
        const int after = model.predict(res.outcomes[idx].adversarial);
        if (after == y[i]) ++still_correct;
        else ++res.flipped;
    }
    res.robust_accuracy_pct =
        100.0 * static_cast<double>(still_correct) / static_cast<double>(res.total);
    res.attack_success_rate_pct =
        res.attacked == 0 ? 0.0
                          : 100.0 * static_cast<double>(res.flipped) /
                                static_cast<double>(res.attacked);
    return res;
}

}  // namespace madurl
