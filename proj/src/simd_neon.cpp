// NEON variants of the retrieval dot-product kernels (aarch64 baseline).
#include <arm_neon.h>

#include "geosolve/simd.hpp"

namespace geosolve::simd {

float dot_neon(const float* a, const float* b, std::size_t n) {
    float32x4_t acc0 = vdupq_n_f32(0.0f);
    float32x4_t acc1 = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
        acc1 = vfmaq_f32(acc1, vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));

    float total = vaddvq_f32(vaddq_f32(acc0, acc1));
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

void dot_batch_neon(const float* keys, std::size_t rows, std::size_t dim, const float* query,
                    float* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_neon(keys + r * dim, query, dim);
}

}  // namespace geosolve::simd
