#include "asrlab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace asrlab::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double max_avx2(const double* x, std::size_t n) {
    double m = x[0];
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
        __m128d lo = _mm256_castpd256_pd128(vm);
        __m128d hi = _mm256_extractf128_pd(vm, 1);
        lo = _mm_max_pd(lo, hi);
        __m128d sh = _mm_unpackhi_pd(lo, lo);
        m = _mm_cvtsd_f64(_mm_max_sd(lo, sh));
    }
    for (; i < n; ++i)
        if (x[i] > m) m = x[i];
    return m;
}

void sgd_update_avx2(double* theta, const double* g, double lr, std::size_t n) {
    axpy_avx2(-lr, g, theta, n);
}

void cma_update_avx2(double* acc, const double* v, double n_prev, std::size_t n) {
    const __m256d vp = _mm256_set1_pd(n_prev);
    const __m256d vi = _mm256_set1_pd(1.0 / (n_prev + 1.0));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_fmadd_pd(vp, _mm256_loadu_pd(acc + i), _mm256_loadu_pd(v + i));
        _mm256_storeu_pd(acc + i, _mm256_mul_pd(t, vi));
    }
    const double inv = 1.0 / (n_prev + 1.0);
    for (; i < n; ++i) acc[i] = (n_prev * acc[i] + v[i]) * inv;
}

void cma_update_sq_avx2(double* acc, const double* g, double n_prev, std::size_t n) {
    const __m256d vp = _mm256_set1_pd(n_prev);
    const __m256d vi = _mm256_set1_pd(1.0 / (n_prev + 1.0));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d t = _mm256_fmadd_pd(vp, _mm256_loadu_pd(acc + i), _mm256_mul_pd(vg, vg));
        _mm256_storeu_pd(acc + i, _mm256_mul_pd(t, vi));
    }
    const double inv = 1.0 / (n_prev + 1.0);
    for (; i < n; ++i) acc[i] = (n_prev * acc[i] + g[i] * g[i]) * inv;
}

void ema_update_avx2(double* bar, const double* tilde, double mu, std::size_t n) {
    const __m256d vm = _mm256_set1_pd(mu);
    const __m256d vw = _mm256_set1_pd(1.0 - mu);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(vm, _mm256_loadu_pd(bar + i));
        t = _mm256_fmadd_pd(vw, _mm256_loadu_pd(tilde + i), t);
        _mm256_storeu_pd(bar + i, t);
    }
    const double w = 1.0 - mu;
    for (; i < n; ++i) bar[i] = mu * bar[i] + w * tilde[i];
}

double fisher_penalty_avx2(const double* theta, const double* f, const double* anchor,
                           double lambda, double* grad_out, std::size_t n) {
    const __m256d vl2 = _mm256_set1_pd(2.0 * lambda);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(theta + i), _mm256_loadu_pd(anchor + i));
        __m256d vf = _mm256_loadu_pd(f + i);
        __m256d fd = _mm256_mul_pd(vf, d);
        acc = _mm256_fmadd_pd(fd, d, acc);
        __m256d g = _mm256_loadu_pd(grad_out + i);
        _mm256_storeu_pd(grad_out + i, _mm256_fmadd_pd(vl2, fd, g));
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        const double d = theta[i] - anchor[i];
        r += f[i] * d * d;
        grad_out[i] += 2.0 * lambda * f[i] * d;
    }
    return lambda * r;
}

}  // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Ops ops{dot_avx2,        axpy_avx2,       scale_avx2,
                         sum_avx2,        max_avx2,        sgd_update_avx2,
                         cma_update_avx2, cma_update_sq_avx2, ema_update_avx2,
                         fisher_penalty_avx2};
    return &ops;
}

}  // namespace asrlab::kernels

#else

namespace asrlab::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace asrlab::kernels

#endif
