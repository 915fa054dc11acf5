// AVX2 + FMA variants of the retrieval dot-product kernels. This translation
// unit is compiled with -mavx2 -mfma; the dispatcher only calls in here after
// checking cpu support at runtime.
#include <immintrin.h>

#include "geosolve/simd.hpp"

namespace geosolve::simd {

float dot_avx2(const float* a, const float* b, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);

    __m256 acc = _mm256_add_ps(acc0, acc1);
    __m128 lo = _mm256_castps256_ps128(acc);
    __m128 hi = _mm256_extractf128_ps(acc, 1);
    __m128 sum4 = _mm_add_ps(lo, hi);
    __m128 sum2 = _mm_add_ps(sum4, _mm_movehl_ps(sum4, sum4));
    __m128 sum1 = _mm_add_ss(sum2, _mm_shuffle_ps(sum2, sum2, 0x1));
    float total = _mm_cvtss_f32(sum1);

    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

void dot_batch_avx2(const float* keys, std::size_t rows, std::size_t dim, const float* query,
                    float* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(keys + r * dim, query, dim);
}

}  // namespace geosolve::simd
