#include "asrlab/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "asrlab/kernels.hpp"
#include "asrlab/rng.hpp"

namespace asrlab {

void Network::validate() const {
    if (layers.empty()) throw ShapeError("Network: no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Layer& l = layers[k];
        if (l.bias.size() != l.out_dim())
            throw ShapeError("Layer: bias length != weights.rows");
        if (l.depth_index != k)
            throw ShapeError("Layer: depth_index not contiguous from 0");
        if (k + 1 < layers.size() && l.out_dim() != layers[k + 1].in_dim())
            throw ShapeError("Network: adjacent layer dimensions do not compose");
    }
    if (layers.back().out_dim() != class_count)
        throw ShapeError("Network: final layer out_dim != class_count");
    if (layers.back().activation != Activation::Identity)
        throw ShapeError("Network: final layer must emit logits (identity activation)");
}

ParamSet ParamSet::zeros_like(const Network& net) {
    ParamSet p;
    p.layers.reserve(net.layers.size());
    for (const Layer& l : net.layers)
        p.layers.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
    return p;
}

bool ParamSet::congruent(const Network& net) const {
    if (layers.size() != net.layers.size()) return false;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (!layers[k].weights.same_shape(net.layers[k].weights)) return false;
        if (layers[k].bias.size() != net.layers[k].bias.size()) return false;
    }
    return true;
}

bool ParamSet::all_finite() const {
    for (const Entry& e : layers)
        if (!e.weights.all_finite() || !asrlab::all_finite(e.bias)) return false;
    return true;
}

void ParamSet::fill(double v) {
    for (Entry& e : layers) {
        std::fill(e.weights.data(), e.weights.data() + e.weights.size(), v);
        std::fill(e.bias.begin(), e.bias.end(), v);
    }
}

void ParamSet::add(const ParamSet& other) {
    const auto& k = kernels::ops();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        k.axpy(1.0, other.layers[i].weights.data(), layers[i].weights.data(),
               layers[i].weights.size());
        k.axpy(1.0, other.layers[i].bias.data(), layers[i].bias.data(), layers[i].bias.size());
    }
}

void ParamSet::scale(double a) {
    const auto& k = kernels::ops();
    for (Entry& e : layers) {
        k.scale(a, e.weights.data(), e.weights.size());
        k.scale(a, e.bias.data(), e.bias.size());
    }
}

std::size_t ParamSet::parameter_count() const {
    std::size_t n = 0;
    for (const Entry& e : layers) n += e.weights.size() + e.bias.size();
    return n;
}

Network make_network(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                     std::size_t class_count, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed));
    Network net;
    net.class_count = class_count;
    std::vector<std::size_t> dims;
    dims.push_back(in_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(class_count);
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        Layer l;
        l.weights = Matrix(dims[k + 1], dims[k]);
        l.bias.assign(dims[k + 1], 0.0);
        l.activation = (k + 2 == dims.size()) ? Activation::Identity : Activation::Relu;
        l.depth_index = k;
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / double(dims[k])));
        for (std::size_t i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = init(rng);
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

Matrix forward(const Network& net, const Matrix& batch, ForwardTrace* trace) {
    if (batch.rows() == 0) throw ShapeError("forward: empty batch");
    if (batch.cols() != net.in_dim())
        throw ShapeError("forward: batch.cols != first layer in_dim");
    if (!batch.all_finite()) throw NumericError("forward: non-finite input");

    const auto& k = kernels::ops();
    if (trace) {
        trace->input = batch;
        trace->pre.clear();
        trace->post.clear();
    }
    Matrix cur = batch;
    for (const Layer& l : net.layers) {
        Matrix out(cur.rows(), l.out_dim());
        for (std::size_t r = 0; r < cur.rows(); ++r) {
            double* orow = out.row(r);
            const double* irow = cur.row(r);
            for (std::size_t o = 0; o < l.out_dim(); ++o)
                orow[o] = l.bias[o] + k.dot(l.weights.row(o), irow, l.in_dim());
        }
        if (trace) trace->pre.push_back(out);
        if (l.activation == Activation::Relu)
            for (std::size_t i = 0; i < out.size(); ++i)
                if (out.data()[i] < 0.0) out.data()[i] = 0.0;
        if (trace) trace->post.push_back(out);
        cur = std::move(out);
    }
    return cur;
}

Matrix softmax_rows(const Matrix& logits) {
    if (!logits.all_finite()) throw NumericError("softmax_rows: non-finite logits");
    const auto& k = kernels::ops();
    Matrix probs(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const double* in = logits.row(r);
        double* out = probs.row(r);
        const double m = k.max(in, logits.cols());
        // floor keeps entries strictly positive even at extreme logit spans
        for (std::size_t c = 0; c < logits.cols(); ++c)
            out[c] = std::max(std::exp(in[c] - m), std::numeric_limits<double>::min());
        const double z = k.sum(out, logits.cols());
        k.scale(1.0 / z, out, logits.cols());
    }
    return probs;
}

double entropy_loss(const Matrix& probs) {
    double total = 0.0;
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const double* p = probs.row(r);
        double h = 0.0;
        for (std::size_t c = 0; c < probs.cols(); ++c)
            if (p[c] > 0.0) h -= p[c] * std::log(p[c]);
        total += h;
    }
    return total / double(probs.rows());
}

Matrix entropy_loss_grad_logits(const Matrix& probs) {
    // For one row: dH/dz_j = -p_j * (log p_j - sum_c p_c log p_c).
    Matrix g(probs.rows(), probs.cols());
    const double inv_b = 1.0 / double(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const double* p = probs.row(r);
        double* gr = g.row(r);
        double mean_lp = 0.0;
        for (std::size_t c = 0; c < probs.cols(); ++c)
            if (p[c] > 0.0) mean_lp += p[c] * std::log(p[c]);
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            const double lp = (p[c] > 0.0) ? std::log(p[c]) : 0.0;
            gr[c] = -inv_b * p[c] * (lp - mean_lp);
        }
    }
    return g;
}

GradientSet backward(const Network& net, const ForwardTrace& trace, const Matrix& upstream) {
    if (trace.post.size() != net.layers.size())
        throw ShapeError("backward: trace does not match network");
    if (!upstream.same_shape(trace.post.back()))
        throw ShapeError("backward: upstream shape does not match logits");

    const auto& k = kernels::ops();
    GradientSet grads = GradientSet::zeros_like(net);
    Matrix delta = upstream;  // d loss / d pre-activation of current layer
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const Layer& l = net.layers[li];
        // Relu mask on this layer's pre-activation.
        if (l.activation == Activation::Relu) {
            const Matrix& pre = trace.pre[li];
            for (std::size_t i = 0; i < delta.size(); ++i)
                if (pre.data()[i] <= 0.0) delta.data()[i] = 0.0;
        }
        const Matrix& input = (li == 0) ? trace.input : trace.post[li - 1];
        ParamSet::Entry& g = grads.layers[li];
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            const double* drow = delta.row(r);
            const double* irow = input.row(r);
            for (std::size_t o = 0; o < l.out_dim(); ++o) {
                k.axpy(drow[o], irow, g.weights.row(o), l.in_dim());
                g.bias[o] += drow[o];
            }
        }
        if (li == 0) break;
        // d loss / d input = delta * W
        Matrix next(delta.rows(), l.in_dim());
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            const double* drow = delta.row(r);
            double* nrow = next.row(r);
            for (std::size_t o = 0; o < l.out_dim(); ++o)
                k.axpy(drow[o], l.weights.row(o), nrow, l.in_dim());
        }
        delta = std::move(next);
    }
    return grads;
}

void sgd_step(Network& net, const GradientSet& grads, double lr) {
    if (lr <= 0.0) throw ConfigError("sgd_step: lr must be positive");
    if (!grads.congruent(net)) throw ShapeError("sgd_step: gradient shape mismatch");
    if (!grads.all_finite()) throw NumericError("sgd_step: non-finite gradients");
    const auto& k = kernels::ops();
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        Layer& l = net.layers[li];
        const ParamSet::Entry& g = grads.layers[li];
        k.sgd_update(l.weights.data(), g.weights.data(), lr, l.weights.size());
        k.sgd_update(l.bias.data(), g.bias.data(), lr, l.bias.size());
    }
}

ParameterSnapshot snapshot(const Network& net) {
    ParameterSnapshot s;
    s.layers.reserve(net.layers.size());
    for (const Layer& l : net.layers) s.layers.push_back({l.weights, l.bias});
    return s;
}

void restore_layers(Network& net, const ParameterSnapshot& snap,
                    const std::vector<std::size_t>& layer_indices) {
    if (!snap.congruent(net)) throw ShapeError("restore_layers: snapshot shape mismatch");
    for (std::size_t idx : layer_indices) {
        if (idx >= net.layers.size())
            throw ShapeError("restore_layers: layer index out of range");
        net.layers[idx].weights = snap.layers[idx].weights;
        net.layers[idx].bias = snap.layers[idx].bias;
    }
}

double cross_entropy_loss(const Matrix& probs, const std::vector<int>& labels) {
    if (labels.size() != probs.rows()) throw ShapeError("cross_entropy_loss: length mismatch");
    double total = 0.0;
    for (std::size_t r = 0; r < probs.rows(); ++r)
        total -= std::log(std::max(probs(r, std::size_t(labels[r])), 1e-300));
    return total / double(probs.rows());
}

Matrix cross_entropy_grad_logits(const Matrix& probs, const std::vector<int>& labels) {
    if (labels.size() != probs.rows()) throw ShapeError("cross_entropy_grad: length mismatch");
    Matrix g = probs;
    const double inv_b = 1.0 / double(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        g(r, std::size_t(labels[r])) -= 1.0;
        kernels::ops().scale(inv_b, g.row(r), g.cols());
    }
    return g;
}

}  // namespace asrlab
