// NEON variants of the word-loop kernels (aarch64 baseline, no runtime check
// needed).

#include "ltbsm/gf2.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace ltbsm::gf2 {

namespace {

void xor_into_neon(Word* dst, const Word* src, size_t nwords) {
    size_t i = 0;
    for (; i + 2 <= nwords; i += 2) {
        uint64x2_t d = vld1q_u64(dst + i);
        uint64x2_t s = vld1q_u64(src + i);
        vst1q_u64(dst + i, veorq_u64(d, s));
    }
    for (; i < nwords; ++i) dst[i] ^= src[i];
}

unsigned and_parity_neon(const Word* a, const Word* b, size_t nwords) {
    uint64x2_t acc = vdupq_n_u64(0);
    size_t i = 0;
    for (; i + 2 <= nwords; i += 2) {
        acc = veorq_u64(acc, vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
    }
    Word folded = vgetq_lane_u64(acc, 0) ^ vgetq_lane_u64(acc, 1);
    for (; i < nwords; ++i) folded ^= a[i] & b[i];
    return static_cast<unsigned>(__builtin_popcountll(folded) & 1);
}

const Kernels g_neon{&xor_into_neon, &and_parity_neon, "neon"};

}  // namespace

const Kernels* neon_kernels() { return &g_neon; }

}  // namespace ltbsm::gf2

#endif  // __aarch64__
