#pragma once

#include <functional>
#include <span>
#include <vector>

#include "madurl/ensemble.hpp"

namespace madurl {

struct InvalidClass : Error {
    InvalidClass() : Error("loss: class index out of range") {}
};

enum class AttackMode { Targeted, Untargeted };

struct AttackConfig {
    AttackMode mode = AttackMode::Untargeted;
    double rho = 0.0;        // confidence margin
    double probe_k = 0.1;    // finite-difference probe; tree ensembles are
                             // piecewise constant, so this stays well above
                             // an infinitesimal step
    double step_h = 0.01;    // ADAM step size (also the non-Newton fallback scale)
    double alpha1 = 0.9;
    double alpha2 = 0.99;
    double epsilon = 1e-8;
    long long budget = 1000;  // coordinate-update cap K
    double box_delta = 3.0;   // per-coordinate clamp around the original point
    std::uint64_t seed = 0;

    void validate() const;
};

// Targeted attack loss: max{ max_{j != b} log p_j - log p_b, -rho }.
double loss_targeted(std::span<const double> probs, int target, double rho);
// Untargeted attack loss: max{ log p_b0 - max_{j != b0} log p_j, -rho }.
double loss_untargeted(std::span<const double> probs, int original, double rho);

// Scalar loss oracle for the finite-difference estimators.
using ScalarLoss = std::function<double(std::span<const double>)>;

// Symmetric difference quotient (two oracle queries).
double estimate_gradient(const ScalarLoss& oracle, std::vector<double>& a, std::size_t j,
                         double probe_k);
// Central second difference (three queries standalone; the attack loop reuses
// the center evaluation).
double estimate_hessian(const ScalarLoss& oracle, std::vector<double>& a, std::size_t j,
                        double probe_k);

// Loss evaluation carrying the oracle's predicted class, so success checks
// do not cost an extra query. `predicted` is -1 for pure optimization tests.
struct LossEval {
    double loss = 0.0;
    int predicted = -1;
};
using LossOracle = std::function<LossEval(std::span<const double>)>;

struct AdamState {
    std::vector<double> first_moment;   // N
    std::vector<double> second_moment;  // tau
    std::vector<long long> update_count;  // U

    explicit AdamState(std::size_t dims)
        : first_moment(dims, 0.0), second_moment(dims, 0.0), update_count(dims, 0) {}
};

// One coordinate-wise ADAM update: refreshes the state from gradient `g` and
// returns the step eta* = -h * N_hat / (sqrt(tau_hat) + eps).
double adam_coordinate_step(AdamState& state, std::size_t j, double g, const AttackConfig& cfg);

struct AttackOutcome {
    std::vector<double> original;
    std::vector<double> adversarial;
    long long queries = 0;  // every loss-oracle invocation
    long long coordinate_updates = 0;
    double final_loss = 0.0;
    bool success = false;
    double l2_distortion = 0.0;
    std::vector<double> loss_trace;
};

// Success requires loss <= -rho, plus the class condition when the oracle
// reports classes: the prediction moved off b0 (untargeted) or onto the
// target (targeted). `class_ok` encodes that condition; empty = loss only.
using ClassCheck = std::function<bool(int predicted)>;

// Plain stochastic coordinate descent: uniformly random coordinate, guarded
// Newton step eta* = -g/h (falling back to -step_h * g when h <= 0), box
// clamp, early stop on success.
AttackOutcome attack_scd(const LossOracle& oracle, std::span<const double> a0,
                         const AttackConfig& cfg, const ClassCheck& class_ok = {});

// Coordinate-wise ADAM variant of the same loop.
AttackOutcome attack_adam_scd(const LossOracle& oracle, std::span<const double> a0,
                              const AttackConfig& cfg, const ClassCheck& class_ok = {});

// Loss oracle over a trained model's class probabilities.
LossOracle make_model_loss_oracle(const EnsembleModel& model, AttackMode mode, int class_index,
                                  double rho);

struct AttackEvalResult {
    std::size_t total = 0;
    std::size_t attacked = 0;  // originally correctly classified
    std::size_t flipped = 0;   // attacked rows pushed off their label
    double clean_accuracy_pct = 0.0;
    double robust_accuracy_pct = 0.0;  // still-correct share after the attack
    double attack_success_rate_pct = 0.0;  // flipped / attacked
    long long total_queries = 0;
    std::vector<AttackOutcome> outcomes;  // one per attacked row
};

// Untargeted ADAM-SCD against every correctly classified row of `test`
// (features must already be scaled). Robust accuracy counts originally
// misclassified rows as errors, so a zero budget reproduces clean accuracy.
AttackEvalResult attack_accuracy_rate(const EnsembleModel& model, const LabeledDataset& test,
                                      const AttackConfig& cfg);

}  // namespace madurl
