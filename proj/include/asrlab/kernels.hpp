#pragma once

#include <cstddef>
#include <string_view>

namespace asrlab::kernels {

// Arithmetic inner loops used by the network and the controller stores.
// Every entry has a scalar reference implementation and, on x86-64 with
// AVX2, a vectorized variant selected once at startup. The two are
// equivalence-tested against each other; ASRLAB_KERNELS=scalar|avx2
// forces a backend.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*max)(const double* x, std::size_t n);
    // theta -= lr * g
    void (*sgd_update)(double* theta, const double* g, double lr, std::size_t n);
    // acc = (n_prev * acc + v) / (n_prev + 1)
    void (*cma_update)(double* acc, const double* v, double n_prev, std::size_t n);
    // acc = (n_prev * acc + g^2) / (n_prev + 1)
    void (*cma_update_sq)(double* acc, const double* g, double n_prev, std::size_t n);
    // bar = mu * bar + (1 - mu) * tilde
    void (*ema_update)(double* bar, const double* tilde, double mu, std::size_t n);
    // returns lambda * sum_i f[i] * (theta[i] - anchor[i])^2,
    // grad_out[i] += 2 * lambda * f[i] * (theta[i] - anchor[i])
    double (*fisher_penalty)(const double* theta, const double* f, const double* anchor,
                             double lambda, double* grad_out, std::size_t n);
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported by the CPU or build
const Ops& ops();       // runtime-selected backend
std::string_view active_backend();

}  // namespace asrlab::kernels
