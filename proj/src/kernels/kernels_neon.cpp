#include "kernels_impl.hpp"

#if defined(S2_HAVE_NEON)

#include <arm_neon.h>

#include <cstring>

// NEON variants, same bitwise contract as the AVX2 ones: separate
// vmulq/vaddq instead of vfmaq so each lane rounds exactly like the
// scalar reference.

namespace s2::kernels::detail {

void matmul_neon(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        float* crow = c + i * n;
        std::memset(crow, 0, static_cast<std::size_t>(n) * sizeof(float));
        const float* arow = a + i * k;
        for (std::int64_t t = 0; t < k; ++t) {
            const float av = arow[t];
            const float32x4_t avv = vdupq_n_f32(av);
            const float* brow = b + t * n;
            std::int64_t j = 0;
            for (; j + 4 <= n; j += 4) {
                float32x4_t acc = vld1q_f32(crow + j);
                acc = vaddq_f32(acc, vmulq_f32(avv, vld1q_f32(brow + j)));
                vst1q_f32(crow + j, acc);
            }
            for (; j < n; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

void vec_add_neon(float* dst, const float* a, const float* b, std::int64_t n) {
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(dst + i, vaddq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] + b[i];
    }
}

void vec_scale_neon(float* dst, const float* a, float s, std::int64_t n) {
    const float32x4_t sv = vdupq_n_f32(s);
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(dst + i, vmulq_f32(vld1q_f32(a + i), sv));
    }
    for (; i < n; ++i) {
        dst[i] = a[i] * s;
    }
}

void blend4_neon(float* dst, const float* a, const float* b, const float* c, const float* d,
                 float wa, float wb, float wc, float wd, std::int64_t n) {
    const float32x4_t wav = vdupq_n_f32(wa);
    const float32x4_t wbv = vdupq_n_f32(wb);
    const float32x4_t wcv = vdupq_n_f32(wc);
    const float32x4_t wdv = vdupq_n_f32(wd);
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t acc = vaddq_f32(vmulq_f32(wav, vld1q_f32(a + i)), vmulq_f32(wbv, vld1q_f32(b + i)));
        acc = vaddq_f32(acc, vmulq_f32(wcv, vld1q_f32(c + i)));
        acc = vaddq_f32(acc, vmulq_f32(wdv, vld1q_f32(d + i)));
        vst1q_f32(dst + i, acc);
    }
    for (; i < n; ++i) {
        dst[i] = ((wa * a[i] + wb * b[i]) + wc * c[i]) + wd * d[i];
    }
}

} // namespace s2::kernels::detail

#endif // S2_HAVE_NEON
