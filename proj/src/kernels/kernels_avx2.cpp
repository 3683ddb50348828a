#include "kernels_impl.hpp"

#if defined(S2_HAVE_AVX2)

#include <immintrin.h>

#include <cstring>

// AVX2 variants. Lanes run across independent output elements only; each
// element sees the same mul-then-add rounding sequence as the scalar
// kernel. _mm256_fmadd_ps is deliberately not used: a fused multiply-add
// rounds once where the reference rounds twice, which would break the
// bitwise scalar/SIMD equivalence contract.

namespace s2::kernels::detail {

void matmul_avx2(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        float* crow = c + i * n;
        std::memset(crow, 0, static_cast<std::size_t>(n) * sizeof(float));
        const float* arow = a + i * k;
        for (std::int64_t t = 0; t < k; ++t) {
            const float av = arow[t];
            const __m256 avv = _mm256_set1_ps(av);
            const float* brow = b + t * n;
            std::int64_t j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256 acc = _mm256_loadu_ps(crow + j);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(avv, _mm256_loadu_ps(brow + j)));
                _mm256_storeu_ps(crow + j, acc);
            }
            for (; j < n; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

void vec_add_avx2(float* dst, const float* a, const float* b, std::int64_t n) {
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] + b[i];
    }
}

void vec_scale_avx2(float* dst, const float* a, float s, std::int64_t n) {
    const __m256 sv = _mm256_set1_ps(s);
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(dst + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), sv));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] * s;
    }
}

void blend4_avx2(float* dst, const float* a, const float* b, const float* c, const float* d,
                 float wa, float wb, float wc, float wd, std::int64_t n) {
    const __m256 wav = _mm256_set1_ps(wa);
    const __m256 wbv = _mm256_set1_ps(wb);
    const __m256 wcv = _mm256_set1_ps(wc);
    const __m256 wdv = _mm256_set1_ps(wd);
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 acc = _mm256_add_ps(_mm256_mul_ps(wav, _mm256_loadu_ps(a + i)),
                                   _mm256_mul_ps(wbv, _mm256_loadu_ps(b + i)));
        acc = _mm256_add_ps(acc, _mm256_mul_ps(wcv, _mm256_loadu_ps(c + i)));
        acc = _mm256_add_ps(acc, _mm256_mul_ps(wdv, _mm256_loadu_ps(d + i)));
        _mm256_storeu_ps(dst + i, acc);
    }
    for (; i < n; ++i) {
        dst[i] = ((wa * a[i] + wb * b[i]) + wc * c[i]) + wd * d[i];
    }
}

} // namespace s2::kernels::detail

#endif // S2_HAVE_AVX2
