#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "asrlab/kernels.hpp"

using namespace asrlab;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) <= tol * (1.0 + std::abs(a[i])));
}

}  // namespace

TEST_CASE("avx2 backend matches the scalar reference") {
    const kernels::Ops* simd = kernels::avx2_ops();
    if (simd == nullptr) return;  // no AVX2 on this host
    const kernels::Ops& ref = kernels::scalar_ops();

    std::mt19937_64 rng(7);
    // sizes chosen to cover full lanes and every tail length
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u, 33u, 127u, 1000u}) {
        const auto a = random_vec(rng, n), b = random_vec(rng, n);
        const double tol = 1e-12;

        CHECK(std::abs(ref.dot(a.data(), b.data(), n) - simd->dot(a.data(), b.data(), n)) <=
              tol * (1.0 + std::abs(ref.dot(a.data(), b.data(), n))));
        CHECK(ref.sum(a.data(), n) == doctest::Approx(simd->sum(a.data(), n)).epsilon(1e-12));
        CHECK(ref.max(a.data(), n) == simd->max(a.data(), n));

        auto y1 = b, y2 = b;
        ref.axpy(0.37, a.data(), y1.data(), n);
        simd->axpy(0.37, a.data(), y2.data(), n);
        check_close(y1, y2, tol);

        auto s1 = a, s2 = a;
        ref.scale(-1.7, s1.data(), n);
        simd->scale(-1.7, s2.data(), n);
        check_close(s1, s2, tol);

        auto t1 = a, t2 = a;
        ref.sgd_update(t1.data(), b.data(), 0.05, n);
        simd->sgd_update(t2.data(), b.data(), 0.05, n);
        check_close(t1, t2, tol);

        auto c1 = a, c2 = a;
        ref.cma_update(c1.data(), b.data(), 6.0, n);
        simd->cma_update(c2.data(), b.data(), 6.0, n);
        check_close(c1, c2, tol);

        auto q1 = a, q2 = a;
        ref.cma_update_sq(q1.data(), b.data(), 3.0, n);
        simd->cma_update_sq(q2.data(), b.data(), 3.0, n);
        check_close(q1, q2, tol);

        auto e1 = a, e2 = a;
        ref.ema_update(e1.data(), b.data(), 0.9, n);
        simd->ema_update(e2.data(), b.data(), 0.9, n);
        check_close(e1, e2, tol);

        const auto f = random_vec(rng, n, 0.5);
        std::vector<double> g1(n, 0.1), g2(n, 0.1);
        const double p1 = ref.fisher_penalty(a.data(), f.data(), b.data(), 5.0, g1.data(), n);
        const double p2 = simd->fisher_penalty(a.data(), f.data(), b.data(), 5.0, g2.data(), n);
        CHECK(p1 == doctest::Approx(p2).epsilon(1e-12));
        check_close(g1, g2, tol);
    }
}

TEST_CASE("dispatch selects a working backend") {
    const kernels::Ops& k = kernels::ops();
    const double xs[] = {1.0, 2.0, 3.0};
    CHECK(k.sum(xs, 3) == doctest::Approx(6.0));
    CHECK((kernels::active_backend() == "scalar" || kernels::active_backend() == "avx2"));
}
