#pragma once

#include <cstdint>

// Data-parallel inner loops behind the tensor and image operations.
//
// Every kernel exists as a scalar reference implementation plus optional
// SIMD variants (AVX2 on x86-64, NEON on aarch64) selected at runtime.
// All variants of one kernel are bitwise-equivalent: vectorization only
// spans independent output elements, each element's operation sequence
// (including reduction order) is the same in every variant, and no
// fused-multiply-add contraction is used anywhere. The equivalence is
// asserted by tests, not assumed.

namespace s2::kernels {

enum class Isa {
    scalar,
    avx2,
    neon,
};

struct Ops {
    // c[m,n] = a[m,k] * b[k,n], row-major, overwriting c.
    // Per output element the reduction runs t = 0..k-1 left to right.
    void (*matmul)(const float* a, const float* b, float* c, std::int64_t m, std::int64_t k, std::int64_t n);

    // dst[i] = a[i] + b[i]
    void (*vec_add)(float* dst, const float* a, const float* b, std::int64_t n);

    // dst[i] = a[i] * s
    void (*vec_scale)(float* dst, const float* a, float s, std::int64_t n);

    // dst[i] = ((wa*a[i] + wb*b[i]) + wc*c[i]) + wd*d[i]   (bilinear 4-tap)
    void (*blend4)(float* dst, const float* a, const float* b, const float* c, const float* d,
                   float wa, float wb, float wc, float wd, std::int64_t n);

    Isa isa;
    const char* name;
};

// Kernel table for the given ISA. Throws s2::InputError if this build or
// CPU does not provide it.
const Ops& table(Isa isa);

bool available(Isa isa);

// Best available table, overridable via S2SCALES_ISA=scalar|avx2|neon.
// The choice is made once per process so repeated evaluation of any
// operation stays bitwise identical.
const Ops& active();

const char* isa_name(Isa isa);

} // namespace s2::kernels
