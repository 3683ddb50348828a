#include "s2/kernels.hpp"

#include "kernels_impl.hpp"
#include "s2/errors.hpp"

#include <cstdlib>
#include <string>

namespace s2::kernels {

namespace {

constexpr Ops kScalarOps = {
    detail::matmul_scalar, detail::vec_add_scalar, detail::vec_scale_scalar, detail::blend4_scalar,
    Isa::scalar, "scalar",
};

#if defined(S2_HAVE_AVX2)
constexpr Ops kAvx2Ops = {
    detail::matmul_avx2, detail::vec_add_avx2, detail::vec_scale_avx2, detail::blend4_avx2,
    Isa::avx2, "avx2",
};
#endif

#if defined(S2_HAVE_NEON)
constexpr Ops kNeonOps = {
    detail::matmul_neon, detail::vec_add_neon, detail::vec_scale_neon, detail::blend4_neon,
    Isa::neon, "neon",
};
#endif

bool cpu_has_avx2() {
#if defined(S2_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Ops* select_active() {
    if (const char* env = std::getenv("S2SCALES_ISA")) {
        const std::string want(env);
        if (want == "scalar") return &table(Isa::scalar);
        if (want == "avx2") return &table(Isa::avx2);
        if (want == "neon") return &table(Isa::neon);
        throw InputError("S2SCALES_ISA must be one of scalar|avx2|neon, got '" + want + "'");
    }
#if defined(S2_HAVE_AVX2)
    if (cpu_has_avx2()) return &kAvx2Ops;
#endif
#if defined(S2_HAVE_NEON)
    return &kNeonOps;
#endif
    return &kScalarOps;
}

} // namespace

bool available(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
        return cpu_has_avx2();
    case Isa::neon:
#if defined(S2_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const Ops& table(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return kScalarOps;
    case Isa::avx2:
#if defined(S2_HAVE_AVX2)
        if (cpu_has_avx2()) return kAvx2Ops;
#endif
        throw InputError("avx2 kernels are not available on this build/CPU");
    case Isa::neon:
#if defined(S2_HAVE_NEON)
        return kNeonOps;
#else
        throw InputError("neon kernels are not available on this build/CPU");
#endif
    }
    throw InputError("unknown kernel ISA");
}

const Ops& active() {
    static const Ops* ops = select_active();
    return *ops;
}

const char* isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    case Isa::neon:
        return "neon";
    }
    return "?";
}

} // namespace s2::kernels
