#pragma once

#include <cstdint>
#include <vector>

#include "asrlab/matrix.hpp"

namespace asrlab {

enum class Activation { Relu, Identity };

struct Layer {
    Matrix weights;             // out_dim x in_dim
    std::vector<double> bias;   // out_dim
    Activation activation = Activation::Relu;
    std::size_t depth_index = 0;

    std::size_t in_dim() const { return weights.cols(); }
    std::size_t out_dim() const { return weights.rows(); }
};

// Ordered dense stack, layer 0 nearest the input. The final layer emits
// logits (identity activation, out_dim == class_count).
struct Network {
    std::vector<Layer> layers;
    std::size_t class_count = 0;

    std::size_t in_dim() const { return layers.front().in_dim(); }
    std::size_t depth() const { return layers.size(); }
    void validate() const;  // throws ShapeError on broken invariants
};

// Per-layer parameter-shaped storage; doubles as gradients, snapshots and
// the controller's Fisher/parameter accumulators.
struct ParamSet {
    struct Entry {
        Matrix weights;
        std::vector<double> bias;
    };
    std::vector<Entry> layers;

    static ParamSet zeros_like(const Network& net);
    bool congruent(const Network& net) const;
    bool all_finite() const;
    void fill(double v);
    void add(const ParamSet& other);          // elementwise +=
    void scale(double a);
    std::size_t parameter_count() const;
};

using GradientSet = ParamSet;
using ParameterSnapshot = ParamSet;

struct ForwardTrace {
    Matrix input;
    std::vector<Matrix> pre;   // pre-activation per layer
    std::vector<Matrix> post;  // post-activation per layer (post.back() == logits)
};

// Random He-style initialization; deterministic for a given seed.
Network make_network(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                     std::size_t class_count, std::uint64_t seed);

Matrix forward(const Network& net, const Matrix& batch, ForwardTrace* trace = nullptr);
Matrix softmax_rows(const Matrix& logits);
double entropy_loss(const Matrix& probs);
// d(mean per-row entropy)/d(logits), for probs = softmax_rows(logits)
Matrix entropy_loss_grad_logits(const Matrix& probs);

GradientSet backward(const Network& net, const ForwardTrace& trace, const Matrix& upstream);

void sgd_step(Network& net, const GradientSet& grads, double lr);

ParameterSnapshot snapshot(const Network& net);
void restore_layers(Network& net, const ParameterSnapshot& snap,
                    const std::vector<std::size_t>& layer_indices);

// Source-training helpers (labels are available before deployment only).
double cross_entropy_loss(const Matrix& probs, const std::vector<int>& labels);
Matrix cross_entropy_grad_logits(const Matrix& probs, const std::vector<int>& labels);

}  // namespace asrlab
