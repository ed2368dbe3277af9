// AVX2 variants of the word-loop kernels. This translation unit is compiled
// with -mavx2; callers reach it only through the runtime dispatch table after
// a cpuid check, so the binary stays safe on non-AVX2 hosts.

#include "ltbsm/gf2.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace ltbsm::gf2 {

namespace {

void xor_into_avx2(Word* dst, const Word* src, size_t nwords) {
    size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(d, s));
    }
    for (; i < nwords; ++i) dst[i] ^= src[i];
}

unsigned and_parity_avx2(const Word* a, const Word* b, size_t nwords) {
    __m256i acc = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        acc = _mm256_xor_si256(acc, _mm256_and_si256(va, vb));
    }
    Word lanes[4];
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(lanes), acc);
    Word folded = lanes[0] ^ lanes[1] ^ lanes[2] ^ lanes[3];
    for (; i < nwords; ++i) folded ^= a[i] & b[i];
    return static_cast<unsigned>(__builtin_popcountll(folded) & 1);
}

const Kernels g_avx2{&xor_into_avx2, &and_parity_avx2, "avx2"};

}  // namespace

const Kernels* avx2_kernels_if_supported() {
    return __builtin_cpu_supports("avx2") ? &g_avx2 : nullptr;
}

}  // namespace ltbsm::gf2

#endif  // __x86_64__
