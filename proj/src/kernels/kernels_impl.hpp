#pragma once

#include <cstdint>

namespace s2::kernels::detail {

void matmul_scalar(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n);
void vec_add_scalar(float* dst, const float* a, const float* b, std::int64_t n);
void vec_scale_scalar(float* dst, const float* a, float s, std::int64_t n);
void blend4_scalar(float* dst, const float* a, const float* b, const float* c, const float* d,
                   float wa, float wb, float wc, float wd, std::int64_t n);

#if defined(S2_HAVE_AVX2)
void matmul_avx2(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n);
void vec_add_avx2(float* dst, const float* a, const float* b, std::int64_t n);
void vec_scale_avx2(float* dst, const float* a, float s, std::int64_t n);
void blend4_avx2(float* dst, const float* a, const float* b, const float* c, const float* d,
                 float wa, float wb, float wc, float wd, std::int64_t n);
#endif

#if defined(S2_HAVE_NEON)
void matmul_neon(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n);
void vec_add_neon(float* dst, const float* a, const float* b, std::int64_t n);
void vec_scale_neon(float* dst, const float* a, float s, std::int64_t n);
void blend4_neon(float* dst, const float* a, const float* b, const float* c, const float* d,
                 float wa, float wb, float wc, float wd, std::int64_t n);
#endif

} // namespace s2::kernels::detail
