#include "asrlab/controller.hpp"

#include <algorithm>
#include <cmath>

#include "asrlab/kernels.hpp"

namespace asrlab {

double prediction_concentration(const Matrix& logits, ConcentrationMode mode) {
    if (logits.rows() == 0) throw ShapeError("prediction_concentration: empty batch");
    if (!logits.all_finite()) throw NumericError("prediction_concentration: non-finite logits");

    const std::size_t c_count = logits.cols();
    std::vector<double> p_hat(c_count, 0.0);
    if (mode == ConcentrationMode::SoftmaxOfMean) {
        Matrix mean(1, c_count);
        for (std::size_t r = 0; r < logits.rows(); ++r)
            kernels::ops().axpy(1.0, logits.row(r), mean.row(0), c_count);
        kernels::ops().scale(1.0 / double(logits.rows()), mean.row(0), c_count);
        Matrix sm = softmax_rows(mean);
        p_hat.assign(sm.row(0), sm.row(0) + c_count);
    } else {
        Matrix sm = softmax_rows(logits);
        for (std::size_t r = 0; r < sm.rows(); ++r)
            kernels::ops().axpy(1.0, sm.row(r), p_hat.data(), c_count);
        kernels::ops().scale(1.0 / double(sm.rows()), p_hat.data(), c_count);
    }
    double c_t = 0.0;
    for (double p : p_hat)
        if (p > 0.0) c_t += p * std::log(p);
    return c_t;
}

ConcentrationTracker::ConcentrationTracker(double alpha_0, std::size_t class_count)
    : bar_c_(0.0), init_value_(-std::log(alpha_0 * double(class_count))) {
    bar_c_ = init_value_;
}

void ConcentrationTracker::update(double c_t, double mu_c) {
    bar_c_ = mu_c * bar_c_ + (1.0 - mu_c) * c_t;
}

void ConcentrationTracker::reinit() { bar_c_ = init_value_; }

bool should_reset(double c_t, double bar_c, double delay_epsilon) {
    return c_t - bar_c > delay_epsilon;
}

double reset_proportion(double c_t, double bar_c, const AsrParams& p) {
    if (c_t <= bar_c) throw NumericError("reset_proportion: called without a firing trigger");
    return std::min(1.0, p.r_0 + p.lambda_r * (c_t - bar_c));
}

std::vector<std::size_t> select_reset_layers(std::size_t layer_count, double r_t) {
    // round half up, at least one layer
    std::size_t n = std::size_t(std::floor(r_t * double(layer_count) + 0.5));
    n = std::clamp<std::size_t>(n, 1, layer_count);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = layer_count - n + i;
    return idx;
}

FisherPenalty fisher_penalty(const Network& net, const ParamSet& bar_f,
                             const ParamSet& bar_theta, double lambda_f) {
    if (!bar_f.congruent(net) || !bar_theta.congruent(net))
        throw ShapeError("fisher_penalty: store shape mismatch");
    FisherPenalty out;
    out.gradient = GradientSet::zeros_like(net);
    const auto& k = kernels::ops();
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& l = net.layers[li];
        out.value += k.fisher_penalty(l.weights.data(), bar_f.layers[li].weights.data(),
                                      bar_theta.layers[li].weights.data(), lambda_f,
                                      out.gradient.layers[li].weights.data(), l.weights.size());
        out.value += k.fisher_penalty(l.bias.data(), bar_f.layers[li].bias.data(),
                                      bar_theta.layers[li].bias.data(), lambda_f,
                                      out.gradient.layers[li].bias.data(), l.bias.size());
    }
    return out;
}

KnowledgeStore::KnowledgeStore(const Network& net)
    : tilde_f_(ParamSet::zeros_like(net)),
      tilde_theta_(ParamSet::zeros_like(net)),
      bar_f_(ParamSet::zeros_like(net)),
      bar_theta_(ParamSet::zeros_like(net)) {}

void KnowledgeStore::cma_accumulate(const Network& net, const GradientSet& total_grads) {
    if (!total_grads.congruent(net)) throw ShapeError("cma_accumulate: gradient shape mismatch");
    const double n = double(count_since_reset_);
    const auto& k = kernels::ops();
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& l = net.layers[li];
        k.cma_update_sq(tilde_f_.layers[li].weights.data(), total_grads.layers[li].weights.data(),
                        n, l.weights.size());
        k.cma_update_sq(tilde_f_.layers[li].bias.data(), total_grads.layers[li].bias.data(), n,
                        l.bias.size());
        k.cma_update(tilde_theta_.layers[li].weights.data(), l.weights.data(), n,
                     l.weights.size());
        k.cma_update(tilde_theta_.layers[li].bias.data(), l.bias.data(), n, l.bias.size());
    }
    ++count_since_reset_;
}

void KnowledgeStore::ema_aggregate_on_reset(double mu_f, double mu_theta) {
    const auto& k = kernels::ops();
    for (std::size_t li = 0; li < bar_f_.layers.size(); ++li) {
        k.ema_update(bar_f_.layers[li].weights.data(), tilde_f_.layers[li].weights.data(), mu_f,
                     bar_f_.layers[li].weights.size());
        k.ema_update(bar_f_.layers[li].bias.data(), tilde_f_.layers[li].bias.data(), mu_f,
                     bar_f_.layers[li].bias.size());
        k.ema_update(bar_theta_.layers[li].weights.data(), tilde_theta_.layers[li].weights.data(),
                     mu_theta, bar_theta_.layers[li].weights.size());
        k.ema_update(bar_theta_.layers[li].bias.data(), tilde_theta_.layers[li].bias.data(),
                     mu_theta, bar_theta_.layers[li].bias.size());
    }
    tilde_f_.fill(0.0);
    tilde_theta_.fill(0.0);
    count_since_reset_ = 0;
}

namespace {
std::size_t argmax_row(const double* row, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < n; ++c)
        if (row[c] > row[best]) best = c;  // first max wins: lowest-index tie-break
    return best;
}
}  // namespace

double prediction_inconsistency(const Matrix& source_logits, const Matrix& current_logits) {
    if (!source_logits.same_shape(current_logits))
        throw ShapeError("prediction_inconsistency: batch mismatch");
    if (source_logits.rows() == 0) throw ShapeError("prediction_inconsistency: empty batch");
    std::size_t mismatches = 0;
    for (std::size_t r = 0; r < source_logits.rows(); ++r)
        if (argmax_row(source_logits.row(r), source_logits.cols()) !=
            argmax_row(current_logits.row(r), current_logits.cols()))
            ++mismatches;
    return double(mismatches) / double(source_logits.rows());
}

std::pair<double, double> reparameterize(double phi, double lambda_0, double mu_0) {
    return {lambda_0 * phi * phi, mu_0 * phi + 1.0 - mu_0};
}

}  // namespace asrlab
