#pragma once

#include <utility>
#include <vector>

#include "asrlab/net.hpp"

namespace asrlab {

enum class ConcentrationMode { SoftmaxOfMean, MeanOfSoftmax };

// Hyperparameters, defaulted to the reference configuration. The fallback
// values are used only by variants that disable the on-the-fly adjuster.
struct AsrParams {
    double alpha_0 = 0.5;          // cumulative-concentration init factor
    double mu_c_fallback = 0.995;  // EMA momentum when the adjuster is off
    double r_0 = 0.5;              // minimum reset proportion
    double lambda_r = 20.0;        // reset proportion scaling factor
    double lambda_f_fallback = 5.0;
    double lambda_0 = 5.0;
    double mu_0 = 0.15;
    double mu_f = 0.9;       // EMA momentum for the Fisher store
    double mu_theta = 0.9;   // EMA momentum for the parameter store
    double delay_epsilon = 0.0;  // delayed-reset variant; 0 = immediate rule
};

// Negative entropy of the batch-aggregated prediction, in [-ln C, 0].
// Values near 0 mean concentrated predictions, i.e. collapse risk.
double prediction_concentration(const Matrix& logits, ConcentrationMode mode);

// EMA baseline of C_t. bar_c starts (and restarts after each reset) at
// -ln(alpha_0 * C), strictly above the uniform bound for alpha_0 < 1.
class ConcentrationTracker {
public:
    ConcentrationTracker(double alpha_0, std::size_t class_count);
    double bar_c() const { return bar_c_; }
    void update(double c_t, double mu_c);  // only when no reset fires
    void reinit();
private:
    double bar_c_;
    double init_value_;
};

bool should_reset(double c_t, double bar_c, double delay_epsilon);

// r_t = min(1, r_0 + lambda_r * (c_t - bar_c)); requires c_t > bar_c.
double reset_proportion(double c_t, double bar_c, const AsrParams& p);

// Deepest max(1, round_half_up(r_t * L)) layer indices, ascending.
std::vector<std::size_t> select_reset_layers(std::size_t layer_count, double r_t);

struct FisherPenalty {
    double value = 0.0;
    GradientSet gradient;
};
// lambda_f * sum_i bar_f[i] * (theta[i] - bar_theta[i])^2 over all parameters.
FisherPenalty fisher_penalty(const Network& net, const ParamSet& bar_f,
                             const ParamSet& bar_theta, double lambda_f);

// CMA stores refreshed every step, folded into the EMA stores at each reset.
class KnowledgeStore {
public:
    explicit KnowledgeStore(const Network& net);

    // Equal-weight accumulation of current parameters and squared total-loss
    // gradients (diagonal Fisher). Call once per step, before the optimizer.
    void cma_accumulate(const Network& net, const GradientSet& total_grads);

    // Fold CMA into EMA, then zero the CMA stores. Call when a reset fires.
    void ema_aggregate_on_reset(double mu_f, double mu_theta);

    const ParamSet& tilde_f() const { return tilde_f_; }
    const ParamSet& tilde_theta() const { return tilde_theta_; }
    const ParamSet& bar_f() const { return bar_f_; }
    const ParamSet& bar_theta() const { return bar_theta_; }
    long count_since_reset() const { return count_since_reset_; }

private:
    ParamSet tilde_f_, tilde_theta_, bar_f_, bar_theta_;
    long count_since_reset_ = 0;
};

// Fraction of rows whose argmax differs between source and current model
// logits. Ties break to the lowest class index.
double prediction_inconsistency(const Matrix& source_logits, const Matrix& current_logits);

// (lambda_f, mu_c) = (lambda_0 * phi^2, mu_0 * phi + 1 - mu_0).
std::pair<double, double> reparameterize(double phi, double lambda_0, double mu_0);

}  // namespace asrlab
