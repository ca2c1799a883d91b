#pragma once

// Bit-packed and residue-vector inner loops, with a scalar reference
// implementation and SIMD variants (AVX2 on x86-64, NEON on aarch64)
// selected once at startup.  Everything above this layer is arithmetic
// over Z/m and F2; everything below is word shuffling.

#include <cstddef>
#include <cstdint>

namespace thetaobs::kernels {

// dst[i] ^= src[i] for i < nwords.  The F2 row operation.
using XorRowsFn = void (*)(uint64_t *dst, const uint64_t *src, size_t nwords);

// popcount(a & b).  F2 dot products come from this (parity of the result).
using AndPopcountFn = uint64_t (*)(const uint64_t *a, const uint64_t *b,
                                   size_t nwords);

// dst[i] = (dst[i] + scale * src[i]) mod m.  Requires m < 2^31 so the
// 64-bit intermediate cannot overflow.  The Z/m row operation.
using AddMulModFn = void (*)(uint32_t *dst, const uint32_t *src,
                             uint32_t scale, uint32_t m, size_t n);

struct Ops {
    XorRowsFn xor_rows;
    AndPopcountFn and_popcount;
    AddMulModFn addmul_mod;
    const char *name; // "scalar", "avx2", "neon"
};

// Scalar reference kernels.  These define the semantics; the SIMD
// variants are tested for exact agreement against them.
void xor_rows_scalar(uint64_t *dst, const uint64_t *src, size_t nwords);
uint64_t and_popcount_scalar(const uint64_t *a, const uint64_t *b,
                             size_t nwords);
void addmul_mod_scalar(uint32_t *dst, const uint32_t *src, uint32_t scale,
                       uint32_t m, size_t n);

// The table picked at startup (cpuid probe on x86-64).
const Ops &ops();

// All tables compiled into this binary, reference first.  Exposed so the
// equivalence tests can run every variant, not just the selected one.
const Ops *available_tables(size_t *count);

} // namespace thetaobs::kernels
