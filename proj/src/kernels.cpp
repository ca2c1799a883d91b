#include "thetaobs/kernels.hpp"

#include <bit>

#if defined(__x86_64__) || defined(_M_X64)
#define THETAOBS_X86 1
#include <immintrin.h>
#else
#define THETAOBS_X86 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define THETAOBS_NEON 1
#include <arm_neon.h>
#else
#define THETAOBS_NEON 0
#endif

namespace thetaobs::kernels {

void xor_rows_scalar(uint64_t *dst, const uint64_t *src, size_t nwords)
{
    for (size_t i = 0; i < nwords; ++i)
        dst[i] ^= src[i];
}

uint64_t and_popcount_scalar(const uint64_t *a, const uint64_t *b,
                             size_t nwords)
{
    uint64_t total = 0;
    for (size_t i = 0; i < nwords; ++i)
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i]));
    return total;
}

void addmul_mod_scalar(uint32_t *dst, const uint32_t *src, uint32_t scale,
                       uint32_t m, size_t n)
{
    for (size_t i = 0; i < n; ++i) {
        uint64_t v = dst[i] + static_cast<uint64_t>(scale) * src[i];
        dst[i] = static_cast<uint32_t>(v % m);
    }
}

#if THETAOBS_X86

// AVX2 variants.  Compiled with target attributes so the file itself can
// be built without -mavx2; the dispatcher only installs them after a
// cpuid check.

__attribute__((target("avx2"))) static void
xor_rows_avx2(uint64_t *dst, const uint64_t *src, size_t nwords)
{
    size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<__m256i *>(dst + i));
        __m256i s =
            _mm256_loadu_si256(reinterpret_cast<const __m256i *>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i),
                            _mm256_xor_si256(d, s));
    }
    for (; i < nwords; ++i)
        dst[i] ^= src[i];
}

__attribute__((target("avx2"))) static uint64_t
and_popcount_avx2(const uint64_t *a, const uint64_t *b, size_t nwords)
{
    // Word-at-a-time popcnt on the AND of 256-bit chunks; the hardware
    // popcnt instruction is the fast path, the vector unit just feeds it.
    uint64_t total = 0;
    size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        __m256i x = _mm256_and_si256(
            _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i)),
            _mm256_loadu_si256(reinterpret_cast<const __m256i *>(b + i)));
        alignas(32) uint64_t w[4];
        _mm256_store_si256(reinterpret_cast<__m256i *>(w), x);
        total += static_cast<uint64_t>(_mm_popcnt_u64(w[0]));
        total += static_cast<uint64_t>(_mm_popcnt_u64(w[1]));
        total += static_cast<uint64_t>(_mm_popcnt_u64(w[2]));
        total += static_cast<uint64_t>(_mm_popcnt_u64(w[3]));
    }
    for (; i < nwords; ++i)
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i]));
    return total;
}

__attribute__((target("avx2"))) static void
addmul_mod_avx2(uint32_t *dst, const uint32_t *src, uint32_t scale,
                uint32_t m, size_t n)
{
    // 32x32 -> 64 products in even lanes, remainder folded back with the
    // scalar modulus.  The modulus is tiny in practice (n of a type, a
    // prime power) so a multiplicative Barrett step is not worth it;
    // keep the division in scalar tail form but vectorize the multiply.
    size_t i = 0;
    __m256i vscale = _mm256_set1_epi32(static_cast<int>(scale));
    for (; i + 8 <= n; i += 8) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<__m256i *>(dst + i));
        __m256i s =
            _mm256_loadu_si256(reinterpret_cast<const __m256i *>(src + i));
        // even lanes
        __m256i pe = _mm256_mul_epu32(s, vscale);
        // odd lanes
        __m256i po = _mm256_mul_epu32(_mm256_srli_epi64(s, 32), vscale);
        __m256i de = _mm256_and_si256(d, _mm256_set1_epi64x(0xffffffff));
        __m256i dofs = _mm256_srli_epi64(d, 32);
        pe = _mm256_add_epi64(pe, de);
        po = _mm256_add_epi64(po, dofs);
        alignas(32) uint64_t we[4], wo[4];
        _mm256_store_si256(reinterpret_cast<__m256i *>(we), pe);
        _mm256_store_si256(reinterpret_cast<__m256i *>(wo), po);
        for (int k = 0; k < 4; ++k) {
            dst[i + 2 * static_cast<size_t>(k)] =
                static_cast<uint32_t>(we[k] % m);
            dst[i + 2 * static_cast<size_t>(k) + 1] =
                static_cast<uint32_t>(wo[k] % m);
        }
    }
    for (; i < n; ++i) {
        uint64_t v = dst[i] + static_cast<uint64_t>(scale) * src[i];
        dst[i] = static_cast<uint32_t>(v % m);
    }
}

#endif // THETAOBS_X86

#if THETAOBS_NEON

static void xor_rows_neon(uint64_t *dst, const uint64_t *src, size_t nwords)
{
    size_t i = 0;
    for (; i + 2 <= nwords; i += 2) {
        uint64x2_t d = vld1q_u64(dst + i);
        uint64x2_t s = vld1q_u64(src + i);
        vst1q_u64(dst + i, veorq_u64(d, s));
    }
    for (; i < nwords; ++i)
        dst[i] ^= src[i];
}

static uint64_t and_popcount_neon(const uint64_t *a, const uint64_t *b,
                                  size_t nwords)
{
    uint64_t total = 0;
    size_t i = 0;
    for (; i + 2 <= nwords; i += 2) {
        uint64x2_t x = vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i));
        uint8x16_t counts = vcntq_u8(vreinterpretq_u8_u64(x));
        total += vaddvq_u8(counts);
    }
    for (; i < nwords; ++i)
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i]));
    return total;
}

#endif // THETAOBS_NEON

static const Ops g_tables[] = {
    {xor_rows_scalar, and_popcount_scalar, addmul_mod_scalar, "scalar"},
#if THETAOBS_X86
    {xor_rows_avx2, and_popcount_avx2, addmul_mod_avx2, "avx2"},
#endif
#if THETAOBS_NEON
    {xor_rows_neon, and_popcount_neon, addmul_mod_scalar, "neon"},
#endif
};

const Ops *available_tables(size_t *count)
{
    *count = sizeof(g_tables) / sizeof(g_tables[0]);
    return g_tables;
}

static const Ops &select()
{
#if THETAOBS_X86
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt"))
        return g_tables[1];
#elif THETAOBS_NEON
    return g_tables[1];
#endif
    return g_tables[0];
}

const Ops &ops()
{
    static const Ops &selected = select();
    return selected;
}

} // namespace thetaobs::kernels
