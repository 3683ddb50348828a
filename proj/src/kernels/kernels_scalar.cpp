#include "kernels_impl.hpp"

#include <cstring>

// Scalar reference kernels. These define the semantics; the SIMD variants
// must match them bit for bit on every input.

namespace s2::kernels::detail {

void matmul_scalar(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        float* crow = c + i * n;
        std::memset(crow, 0, static_cast<std::size_t>(n) * sizeof(float));
        const float* arow = a + i * k;
        for (std::int64_t t = 0; t < k; ++t) {
            const float av = arow[t];
            const float* brow = b + t * n;
            for (std::int64_t j = 0; j < n; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

void vec_add_scalar(float* dst, const float* a, const float* b, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = a[i] + b[i];
    }
}

void vec_scale_scalar(float* dst, const float* a, float s, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = a[i] * s;
    }
}

void blend4_scalar(float* dst, const float* a, const float* b, const float* c, const float* d,
                   float wa, float wb, float wc, float wd, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) {
        dst[i] = ((wa * a[i] + wb * b[i]) + wc * c[i]) + wd * d[i];
    }
}

} // namespace s2::kernels::detail
