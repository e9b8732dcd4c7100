#include "asrlab/kernels.hpp"

namespace asrlab::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double max_scalar(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > m) m = x[i];
    return m;
}

void sgd_update_scalar(double* theta, const double* g, double lr, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) theta[i] -= lr * g[i];
}

void cma_update_scalar(double* acc, const double* v, double n_prev, std::size_t n) {
    const double inv = 1.0 / (n_prev + 1.0);
    for (std::size_t i = 0; i < n; ++i) acc[i] = (n_prev * acc[i] + v[i]) * inv;
}

void cma_update_sq_scalar(double* acc, const double* g, double n_prev, std::size_t n) {
    const double inv = 1.0 / (n_prev + 1.0);
    for (std::size_t i = 0; i < n; ++i) acc[i] = (n_prev * acc[i] + g[i] * g[i]) * inv;
}

void ema_update_scalar(double* bar, const double* tilde, double mu, std::size_t n) {
    const double w = 1.0 - mu;
    for (std::size_t i = 0; i < n; ++i) bar[i] = mu * bar[i] + w * tilde[i];
}

double fisher_penalty_scalar(const double* theta, const double* f, const double* anchor,
                             double lambda, double* grad_out, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = theta[i] - anchor[i];
        acc += f[i] * d * d;
        grad_out[i] += 2.0 * lambda * f[i] * d;
    }
    return lambda * acc;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{dot_scalar,        axpy_scalar,       scale_scalar,
                         sum_scalar,        max_scalar,        sgd_update_scalar,
                         cma_update_scalar, cma_update_sq_scalar, ema_update_scalar,
                         fisher_penalty_scalar};
    return ops;
}

}  // namespace asrlab::kernels
